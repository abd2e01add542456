"""Information-set construction for polar codes with ``G_N = F^{(x) n}``.

Bit channel ``i`` (1-based) is reached from the physical channel by applying
the "minus" (check) or "plus" (variable) transform once per bit of ``i-1``,
most significant bit first; a zero bit means minus.  Three reliability proxies
are provided:

* ``gaussian_approximation`` tracks the mean LLR under BPSK-AWGN,
* ``bhattacharyya_bec`` runs the exact BEC recursion on a Bhattacharyya seed,
* ``external_order`` reads a published reliability sequence from a text file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .gf2 import IndexSet, is_domination_contiguous, is_involution, is_zero, kron_power, submatrix


class Method(str, Enum):
    GAUSSIAN_APPROXIMATION = "gaussian_approximation"
    BHATTACHARYYA_BEC = "bhattacharyya_bec"
    EXTERNAL_ORDER = "external_order"


_METHOD_ALIASES = {"ga": Method.GAUSSIAN_APPROXIMATION, "bec": Method.BHATTACHARYYA_BEC,
                   "external": Method.EXTERNAL_ORDER}


def parse_method(method) -> Method:
    if isinstance(method, Method):
        return method
    key = str(method).lower()
    if key in _METHOD_ALIASES:
        return _METHOD_ALIASES[key]
    try:
        return Method(key)
    except ValueError:
        raise ValueError(f"unknown construction method {method!r}") from None


@dataclass(frozen=True)
class CodeSpec:
    """A polar code: block length ``N = 2**n``, information set and frozen values."""

    n: int
    info_set: IndexSet
    frozen_values: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.info_set.universe_size != self.N:
            raise ValueError("information set universe must equal the block length")
        if self.frozen_values is None:
            fv = np.zeros(self.N - self.K, dtype=np.uint8)
        else:
            fv = np.asarray(self.frozen_values, dtype=np.uint8).copy()
            if fv.shape != (self.N - self.K,) or np.any(fv > 1):
                raise ValueError(f"frozen values must be {self.N - self.K} bits")
        fv.setflags(write=False)
        object.__setattr__(self, "frozen_values", fv)

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def K(self) -> int:
        return self.info_set.size

    @property
    def rate(self) -> float:
        return self.K / self.N

    @property
    def frozen_set(self) -> IndexSet:
        return self.info_set.complement()

    @classmethod
    def from_info_set(cls, members, N: int, frozen_values=None) -> "CodeSpec":
        n = int(N).bit_length() - 1
        if N != 1 << n:
            raise ValueError(f"block length must be a power of two, got {N}")
        return cls(n, IndexSet(members, N), frozen_values)

    def generator(self):
        return kron_power(self.n)


@dataclass
class ValidationReport:
    """Named pass/fail checks; truthy when every check passed."""

    checks: dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def __bool__(self) -> bool:
        return self.passed

    def failures(self) -> list[str]:
        return [name for name, ok in self.checks.items() if not ok]


# -- Gaussian approximation -------------------------------------------------

_A, _B, _C = -0.4527, 0.86, 0.0218


def _log_phi_low(x):
    return _A * x**_B + _C


def _log_phi_high(x):
    return 0.5 * math.log(math.pi / x) - x / 4 + math.log1p(-10 / (7 * x))


# The two branches cross near x = 14.39; switching exactly at the crossing
# keeps phi continuous and strictly decreasing, so channel ordering under
# domination is preserved.
PHI_CROSSOVER = brentq(lambda x: _log_phi_low(x) - _log_phi_high(x), 8.0, 20.0, xtol=1e-14)
_LOG_PHI_AT_CROSSOVER = _log_phi_low(PHI_CROSSOVER)

def log_phi(x: float) -> float:
    """Natural log of the GA phi-function, two-branch closed form."""
    if x <= 0:
        return 0.0
    if x < PHI_CROSSOVER:
        # the fitted branch exceeds phi = 1 below x ~ 0.03; phi(0) = 1 is the true limit
        return min(_log_phi_low(x), 0.0)
    return _log_phi_high(x)


def inv_log_phi(log_y: float) -> float:
    if log_y >= 0:
        return 0.0
    if log_y >= _LOG_PHI_AT_CROSSOVER:
        if log_y >= _C:
            # only reachable for y within rounding of 1
            return 0.0
        return ((log_y - _C) / _A) ** (1 / _B)
    hi = PHI_CROSSOVER * 2
    while _log_phi_high(hi) > log_y:
        hi *= 2
    return brentq(lambda x: _log_phi_high(x) - log_y, PHI_CROSSOVER, hi, xtol=1e-13, rtol=1e-15)


def ga_minus(m: float) -> float:
    """Mean LLR after the check-node combination of two channels of mean ``m``."""
    lp = log_phi(m)
    # 1 - (1 - phi)^2 = phi * (2 - phi), evaluated in the log domain
    return inv_log_phi(lp + math.log(2 - math.exp(lp)))


def ga_plus(m: float) -> float:
    return 2.0 * m


def ga_means(n: int, design_ebno_db: float, rate: float) -> np.ndarray:
    """Mean LLR of each bit channel (0-based array) for BPSK-AWGN at the design point."""
    ebno = 10 ** (design_ebno_db / 10)
    # LLR mean 2/sigma^2 with sigma^2 = 1 / (2 R Eb/N0)
    means = np.array([4.0 * rate * ebno])
    for _ in range(n):
        minus = np.array([ga_minus(m) for m in means])
        means = np.column_stack([minus, ga_plus(means)]).ravel()
    return means


def bec_bhattacharyya(n: int, z0: float) -> np.ndarray:
    """Exact BEC Bhattacharyya parameters per bit channel (0-based array)."""
    if not 0.0 <= z0 <= 1.0:
        raise ValueError("Bhattacharyya seed must lie in [0, 1]")
    z = np.array([z0])
    for _ in range(n):
        z = np.column_stack([2 * z - z * z, z * z]).ravel()
    return z


def read_reliability_order(path) -> list[int]:
    """One 1-based index per line, most reliable first; blank lines and ``#`` comments skipped."""
    order = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            order.append(int(line))
    return order


def _top_k(reliability: np.ndarray, k: int) -> np.ndarray:
    # sort by reliability descending, ties to the larger index
    idx = np.arange(reliability.size)
    order = np.lexsort((-idx, -reliability))
    return np.sort(order[:k]) + 1


def construct_info_set(
    n: int,
    K: int,
    design_ebno_db: float = 3.0,
    method="gaussian_approximation",
    *,
    erasure_prob: float | None = None,
    order_path=None,
    order=None,
    design_rate: float = 0.5,
) -> CodeSpec:
    """Pick the ``K`` most reliable bit channels of a length ``2**n`` code.

    ``design_ebno_db`` is converted to a channel SNR with ``design_rate``
    rather than ``K/N``, so the reliability order does not depend on ``K``
    and the sets are nested in ``K``.  For the BEC
    method the seed is ``erasure_prob`` when given, else the AWGN
    Bhattacharyya bound ``exp(-R Eb/N0)``.  The external order is taken from
    ``order`` (a sequence) or ``order_path`` (a file).
    """
    method = parse_method(method)
    N = 1 << n
    if not 0 < K <= N:
        raise ValueError(f"need 0 < K <= N, got K={K}, N={N}")
    if not math.isfinite(design_ebno_db):
        raise ValueError("design Eb/N0 must be finite")
    rate = design_rate
    if not 0 < rate <= 1:
        raise ValueError("design rate must lie in (0, 1]")
    if method is Method.GAUSSIAN_APPROXIMATION:
        members = _top_k(ga_means(n, design_ebno_db, rate), K)
    elif method is Method.BHATTACHARYYA_BEC:
        z0 = erasure_prob if erasure_prob is not None else math.exp(-rate * 10 ** (design_ebno_db / 10))
        members = _top_k(-bec_bhattacharyya(n, z0), K)
    else:
        if order is None:
            if order_path is None:
                raise ValueError("external_order needs order or order_path")
            order = read_reliability_order(order_path)
        order = list(order)
        if sorted(order) != list(range(1, N + 1)):
            raise ValueError(f"reliability order must be a permutation of 1..{N}")
        members = order[:K]
    return CodeSpec(n, IndexSet(members, N))


def validate_code_spec(spec: CodeSpec) -> ValidationReport:
    g = spec.generator()
    a, abar = spec.info_set, spec.frozen_set
    return ValidationReport(
        {
            "frozen_rows_zero": is_zero(submatrix(g, abar, a)),
            "domination_contiguous": is_domination_contiguous(a, spec.n),
            "involution": is_involution(submatrix(g, a, a)),
        }
    )
