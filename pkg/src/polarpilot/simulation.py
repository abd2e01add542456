"""Monte-Carlo FER/BER and channel-estimation MSE experiments.

Each sweep point runs rounds of frame batches.  In every round each worker
draws one batch from random streams seeded by ``(seed, worker, round)``; the
round's counts are merged and the stop rule is checked.  Results are
reproducible for a fixed seed and worker count.

Data bits, fading and noise come from three separate child streams and the
sweep point is not part of the seed, so every scheme and operating point sees
the same fading and noise draws (common random numbers).  Comparisons between
curves are then paired rather than independent.
"""

from __future__ import annotations

import csv
import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .channel import FadingScenario, gen_rayleigh_block, transmit
from .codec import SCDecoder, encode_systematic, encode_with_pilots, init_llrs, polar_transform
from .construction import CodeSpec, construct_info_set
from .estimation import (
    Estimator,
    EstimatorConfig,
    channel_llrs,
    interpolation_matrix,
    parse_estimator,
    wiener_matrix,
)
from .pilots import (
    PilotPlan,
    Scheme,
    effective_rate,
    no_pilots,
    parse_scheme,
    select_eps,
    select_ueps,
    validate_plan,
)

CSV_COLUMNS = [
    "scheme", "estimator", "fd_hz", "ebno_db", "frames", "frame_errors", "fer",
    "bit_errors", "ber", "mse_pilots", "mse_full", "throughput", "wall_time_s",
]

BATCH_SCHEDULE = (250, 500, 1000, 2000, 4000)


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


@dataclass(frozen=True)
class ExperimentConfig:
    scheme: Scheme = Scheme.EPS
    n: int = 8
    K: int = 128
    num_pilots: int = 64
    num_info_pilots: int | None = None
    design_ebno_db: float = 3.0
    method: str = "gaussian_approximation"
    sweep: tuple[tuple[float, float], ...] = ((10.0, 50.0),)
    estimator: Estimator = Estimator.MMSE
    symbol_rate: float = 256e3
    max_frames: int = 200_000
    min_frame_errors: int = 100
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "scheme", parse_scheme(self.scheme))
        object.__setattr__(self, "estimator", parse_estimator(self.estimator))
        object.__setattr__(self, "sweep", tuple((float(e), float(f)) for e, f in self.sweep))
        if self.max_frames < 1 or self.min_frame_errors < 1:
            raise ConfigError("stop rule needs max_frames >= 1 and min_frame_errors >= 1")
        if not self.sweep:
            raise ConfigError("sweep is empty")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    @property
    def symbol_time(self) -> float:
        return 1.0 / self.symbol_rate


@dataclass
class ResultRow:
    scheme: str
    estimator: str
    fd_hz: float
    ebno_db: float
    frames: int = 0
    frame_errors: int = 0
    fer: float = math.nan
    bit_errors: int = 0
    ber: float = math.nan
    mse_pilots: float = math.nan
    mse_full: float = math.nan
    throughput: float = math.nan
    wall_time_s: float = 0.0
    capped: bool = field(default=False, compare=False)

    def as_csv(self) -> dict:
        return {name: getattr(self, name) for name in CSV_COLUMNS}


def insertion_positions(N: int, num_pilots: int) -> tuple[np.ndarray, np.ndarray]:
    """1-based pilot and data positions when a pilot follows every ``N / num_pilots`` coded symbols."""
    if num_pilots == 0:
        return np.array([], dtype=np.int64), np.arange(1, N + 1)
    if num_pilots < 0 or N % num_pilots:
        raise ValueError(f"{num_pilots} pilots do not divide a block of {N} evenly")
    step = N // num_pilots
    total = N + num_pilots
    pilots = np.arange(step + 1, total + 1, step + 1)
    data = np.setdiff1d(np.arange(1, total + 1), pilots)
    return pilots, data


def traditional_insertion_pipeline(codewords, num_pilots: int, pilot_bit: int = 0) -> np.ndarray:
    """Interleave pilot bits into the transmit stream; inverse is :func:`deinsert`."""
    x = np.asarray(codewords, dtype=np.uint8)
    N = x.shape[-1]
    pilots, data = insertion_positions(N, num_pilots)
    out = np.full(x.shape[:-1] + (N + num_pilots,), pilot_bit, dtype=np.uint8)
    out[..., data - 1] = x
    return out


def deinsert(stream, N: int, num_pilots: int) -> np.ndarray:
    _, data = insertion_positions(N, num_pilots)
    return np.asarray(stream)[..., data - 1]


class LinkSimulator:
    """One scheme, code and pilot plan; produces per-batch error and MSE counts."""

    def __init__(self, config: ExperimentConfig, spec: CodeSpec | None = None,
                 plan: PilotPlan | None = None):
        self.config = config
        self.spec = spec or construct_info_set(config.n, config.K, config.design_ebno_db,
                                               config.method)
        self.plan = plan or build_plan(self.spec, config)
        if self.plan.scheme is not Scheme.TRADITIONAL:
            report = validate_plan(self.spec, self.plan)
            if not report:
                raise ConfigError(f"pilot plan fails: {', '.join(report.failures())}")
        N = self.spec.N
        self.rate = effective_rate(self.plan, self.spec)
        if self.plan.scheme is Scheme.TRADITIONAL:
            pilots, data = insertion_positions(N, self.plan.num_inserted)
            self.stream_length = N + self.plan.num_inserted
            self.pilot_pos = pilots
            self.code_pos = data
            self.pilot_bits = np.zeros(pilots.size, dtype=np.uint8)
            llr_mode = "L"
            self.num_data = self.spec.K
        else:
            self.stream_length = N
            self.pilot_pos = self.plan.positions.members
            self.code_pos = np.arange(1, N + 1)
            self.pilot_bits = self.plan.pilot_values
            llr_mode = "L_f_and_i"
            self.num_data = self.spec.K - self.plan.info_pilots.size
        if config.estimator is not Estimator.PERFECT and self.pilot_pos.size == 0:
            raise ConfigError("channel estimation needs at least one pilot")
        self.llr_mode = llr_mode
        prior = init_llrs(self.spec, self.plan, np.zeros(N), llr_mode).prior_llrs
        self.decoder = SCDecoder(prior)
        self.data_idx = self.plan.data_positions(self.spec).zero_based
        self._interp = (interpolation_matrix(self.pilot_pos, self.stream_length)
                        if self.pilot_pos.size else None)
        self._wiener = {}

    def scenario(self, ebno_db: float, fd_hz: float) -> FadingScenario:
        return FadingScenario(fd_hz, self.config.symbol_time, ebno_db, self.rate)

    def _estimate(self, y, h, ebno_db, fd_hz):
        kind = self.config.estimator
        if kind is Estimator.PERFECT:
            return h, h[:, self.pilot_pos - 1] if self.pilot_pos.size else h[:, :0]
        s_p = 1.0 - 2.0 * self.pilot_bits.astype(np.float64)
        h_p = y[:, self.pilot_pos - 1] / s_p
        if kind is Estimator.MMSE:
            key = (ebno_db, fd_hz)
            if key not in self._wiener:
                cfg = EstimatorConfig.jakes(kind, ebno_db, self.rate, fd_hz,
                                            self.config.symbol_time)
                self._wiener[key] = wiener_matrix(self.pilot_pos, cfg)
            h_p = h_p @ self._wiener[key].T
        return h_p @ self._interp.T, h_p

    def run_batch(self, ebno_db: float, fd_hz: float, frames: int, streams,
                  decode: bool = True) -> dict:
        """Simulate ``frames`` frames; ``streams`` is a ``(data, fading, noise)`` generator triple."""
        spec, plan = self.spec, self.plan
        data_rng, fading_rng, noise_rng = streams
        scen = self.scenario(ebno_db, fd_hz)
        data = data_rng.integers(0, 2, size=(frames, self.num_data), dtype=np.uint8)
        if plan.scheme is Scheme.TRADITIONAL:
            x = encode_systematic(spec, data)
            stream = traditional_insertion_pipeline(x, plan.num_inserted)
        else:
            stream = encode_with_pilots(spec, plan, data)
        real = gen_rayleigh_block(scen, self.stream_length, fading_rng, frames)
        y = transmit(stream, real, noise_rng)
        h_hat, h_p = self._estimate(y, real.h, ebno_db, fd_hz)

        out = {
            "sq_pilots": float(np.sum(np.abs(h_p - real.h[:, self.pilot_pos - 1]) ** 2)),
            "n_pilots": int(h_p.size),
            "sq_full": float(np.sum(np.abs(h_hat - real.h) ** 2)),
            "n_full": int(h_hat.size),
            "frames": frames,
            "frame_errors": 0,
            "bit_errors": 0,
        }
        if decode:
            cols = self.code_pos - 1
            llr = channel_llrs(y[:, cols], h_hat[:, cols], scen.n0)
            word = init_llrs(spec, plan, llr, self.llr_mode)
            u_hat = self.decoder.decode(word.channel_llrs)
            info_hat = polar_transform(u_hat)[:, self.data_idx]
            wrong = info_hat != data
            out["bit_errors"] = int(wrong.sum())
            out["frame_errors"] = int(wrong.any(axis=1).sum())
        return out


def build_plan(spec: CodeSpec, config: ExperimentConfig) -> PilotPlan:
    if config.scheme is Scheme.UEPS:
        return select_ueps(spec, config.num_pilots, config.num_info_pilots)
    if config.scheme is Scheme.EPS:
        plan = select_eps(spec, config.num_pilots)
        if config.num_info_pilots is not None and plan.info_pilots.size != config.num_info_pilots:
            raise ConfigError(
                f"EPS gives {plan.info_pilots.size} information pilots, "
                f"config asks for {config.num_info_pilots}"
            )
        return plan
    return no_pilots(spec, config.num_pilots)


_WORKER_SIMS: dict = {}


def _worker_batch(args):
    config, point, worker, round_idx, ebno_db, fd_hz, frames, decode = args
    sim = _WORKER_SIMS.get(config)
    if sim is None:
        sim = _WORKER_SIMS[config] = LinkSimulator(config)
    return sim.run_batch(ebno_db, fd_hz, frames, batch_streams(config.seed, worker, round_idx), decode)


def batch_streams(seed: int, worker: int, round_idx: int):
    """Independent ``(data, fading, noise)`` generators for one batch."""
    children = np.random.SeedSequence([seed, worker, round_idx]).spawn(3)
    return tuple(np.random.default_rng(c) for c in children)


def _merge(total: dict, part: dict) -> None:
    for key, value in part.items():
        total[key] = total.get(key, 0) + value


def _run(config: ExperimentConfig, decode: bool, simulator: LinkSimulator | None = None):
    sim = simulator or LinkSimulator(config)
    pool = ProcessPoolExecutor(config.workers) if config.workers > 1 else None
    rows = []
    try:
        for point, (ebno_db, fd_hz) in enumerate(config.sweep):
            start = time.perf_counter()
            total: dict = {}
            frames = errors = 0
            for round_idx in itertools.count():
                batch = BATCH_SCHEDULE[min(round_idx, len(BATCH_SCHEDULE) - 1)]
                jobs = []
                for worker in range(config.workers):
                    take = min(batch, config.max_frames - frames)
                    if take <= 0:
                        break
                    frames += take
                    jobs.append((config, point, worker, round_idx, ebno_db, fd_hz, take, decode))
                if pool is None:
                    parts = [sim.run_batch(j[4], j[5], j[6], batch_streams(config.seed, j[2], j[3]),
                                           decode) for j in jobs]
                else:
                    parts = list(pool.map(_worker_batch, jobs))
                for part in parts:
                    _merge(total, part)
                errors = total.get("frame_errors", 0)
                if frames >= config.max_frames or (decode and errors >= config.min_frame_errors):
                    break
            rows.append(_row(config, sim, ebno_db, fd_hz, total, decode,
                             time.perf_counter() - start))
    finally:
        if pool is not None:
            pool.shutdown()
    return rows


def _row(config, sim, ebno_db, fd_hz, total, decode, wall) -> ResultRow:
    frames = total["frames"]
    row = ResultRow(
        scheme=config.scheme.value,
        estimator=config.estimator.value,
        fd_hz=fd_hz,
        ebno_db=ebno_db,
        frames=frames,
        mse_pilots=total["sq_pilots"] / total["n_pilots"] if total["n_pilots"] else math.nan,
        mse_full=total["sq_full"] / total["n_full"],
        throughput=sim.rate,
        wall_time_s=round(wall, 3),
    )
    if decode:
        row.frame_errors = total["frame_errors"]
        row.bit_errors = total["bit_errors"]
        row.fer = row.frame_errors / frames
        row.ber = row.bit_errors / (frames * sim.num_data)
        row.capped = row.frame_errors < config.min_frame_errors
    return row


def run_fer(config: ExperimentConfig, simulator: LinkSimulator | None = None) -> list[ResultRow]:
    """Frame/bit error rates per sweep point under the stop rule."""
    return _run(config, decode=True, simulator=simulator)


def run_mse(config: ExperimentConfig, simulator: LinkSimulator | None = None) -> list[ResultRow]:
    """Estimation MSE at the pilots and over the whole block, ``max_frames`` frames per point."""
    return _run(config, decode=False, simulator=simulator)


def write_csv(rows, path, timing: bool = True) -> None:
    """Write rows in the fixed column order to a path or open text stream.

    ``timing=False`` zeroes wall time for byte-stable output.
    """
    if hasattr(path, "write"):
        _write_rows(rows, path, timing)
        return
    with open(path, "w", newline="") as fh:
        _write_rows(rows, fh, timing)


def _write_rows(rows, fh, timing: bool) -> None:
    writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        rec = row.as_csv()
        if not timing:
            rec["wall_time_s"] = 0.0
        writer.writerow(rec)


def write_plot_data(rows, path, metric: str = "fer") -> None:
    """One block per curve ``(scheme, estimator, fd)``: lines of ``ebno_db value``."""
    curves: dict = {}
    for row in rows:
        curves.setdefault((row.scheme, row.estimator, row.fd_hz), []).append(
            (row.ebno_db, getattr(row, metric)))
    with open(path, "w") as fh:
        for (scheme, est, fd), pts in curves.items():
            fh.write(f"# {scheme} {est} fd={fd:g} {metric}\n")
            for x, y in sorted(pts):
                fh.write(f"{x:g} {y:.6g}\n")
            fh.write("\n")


# -- flat key=value configuration files --------------------------------------

_INT_KEYS = {"n", "K", "num_pilots", "num_info_pilots", "max_frames", "min_frame_errors",
             "seed", "workers"}
_FLOAT_KEYS = {"design_ebno_db", "symbol_rate"}
_KEY_ALIASES = {"k": "K", "pilots": "num_pilots", "info_pilots": "num_info_pilots",
                "design_ebno": "design_ebno_db"}


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse ``key = value`` lines into an :class:`ExperimentConfig`.

    ``ebno_db`` and ``fd_hz`` take comma- or space-separated lists; the sweep
    is their Cartesian product.  ``block_length`` may replace ``n``.
    """
    values: dict = {}
    ebnos, fds = [10.0], [50.0]
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = _KEY_ALIASES.get(key, key)
        try:
            if key == "ebno_db":
                ebnos = _floats(value)
            elif key == "fd_hz":
                fds = _floats(value)
            elif key == "block_length":
                length = int(value)
                if length < 2 or length & (length - 1):
                    raise ConfigError(f"line {lineno}: block_length must be a power of two")
                values["n"] = length.bit_length() - 1
            elif key in _INT_KEYS:
                values[key] = None if value.lower() in ("", "none") else int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key in ("scheme", "estimator", "method"):
                values[key] = value
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {value!r}") from exc
    values["sweep"] = tuple(itertools.product(ebnos, fds))
    try:
        return ExperimentConfig(**values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text())


def with_overrides(config: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Replace fields; ``ebno_db`` / ``fd_hz`` lists replace that axis of the sweep."""
    clean = {k: v for k, v in overrides.items() if v is not None}
    ebnos = clean.pop("ebno_db", None)
    fds = clean.pop("fd_hz", None)
    if ebnos is not None or fds is not None:
        old_e = list(dict.fromkeys(e for e, _ in config.sweep))
        old_f = list(dict.fromkeys(f for _, f in config.sweep))
        clean["sweep"] = tuple(itertools.product(ebnos or old_e, fds or old_f))
    try:
        return replace(config, **clean) if clean else config
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


__all__ = [
    "CSV_COLUMNS",
    "ConfigError",
    "ExperimentConfig",
    "LinkSimulator",
    "ResultRow",
    "batch_streams",
    "build_plan",
    "deinsert",
    "insertion_positions",
    "load_config",
    "parse_config_text",
    "run_fer",
    "run_mse",
    "traditional_insertion_pipeline",
    "with_overrides",
    "write_csv",
    "write_plot_data",
]
