"""Flat Rayleigh fading with a Jakes (Bessel J0) time correlation, BPSK and AWGN."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import toeplitz
from scipy.special import j0

DIAGONAL_LOADING = 1e-9


class ChannelGenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class FadingScenario:
    fd_hz: float
    symbol_time: float
    ebno_db: float
    rate: float = 0.5
    seed: int | None = None

    def __post_init__(self):
        if self.fd_hz < 0:
            raise ValueError("Doppler frequency must be non-negative")
        if self.symbol_time <= 0:
            raise ValueError("symbol duration must be positive")
        if not 0 < self.rate <= 1:
            raise ValueError("rate must lie in (0, 1]")

    @property
    def n0(self) -> float:
        return noise_density(self.ebno_db, self.rate)


@dataclass(frozen=True)
class ChannelRealization:
    h: np.ndarray
    z_variance: float


def noise_density(ebno_db: float, rate: float) -> float:
    """``N0`` for unit-energy symbols carrying ``rate`` information bits each."""
    return 1.0 / (rate * 10 ** (ebno_db / 10))


def jakes_autocorr(k, fd_hz: float, symbol_time: float):
    """``J0(2 pi fd k T)``; accepts scalar or array lags."""
    return j0(2 * np.pi * fd_hz * np.asarray(k, dtype=np.float64) * symbol_time)


@lru_cache(maxsize=32)
def _cholesky(length: int, fd_t: float) -> np.ndarray:
    cov = toeplitz(j0(2 * np.pi * fd_t * np.arange(length)))
    cov[np.diag_indices(length)] += DIAGONAL_LOADING
    try:
        factor = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise ChannelGenerationError(
            f"covariance not positive definite for N={length}, fd*T={fd_t}"
        ) from exc
    factor.setflags(write=False)
    return factor


def gen_rayleigh_block(scenario: FadingScenario, length: int, rng: np.random.Generator,
                       frames: int | None = None) -> ChannelRealization:
    """Correlated unit-power complex Gaussian gains, one independent block per frame."""
    if length < 1:
        raise ValueError("block length must be at least 1")
    factor = _cholesky(int(length), float(scenario.fd_hz * scenario.symbol_time))
    shape = (1 if frames is None else frames, length)
    w = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    h = w @ factor.T
    if frames is None:
        h = h[0]
    return ChannelRealization(h, scenario.n0 / 2)


def bpsk(x) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(x, dtype=np.float64)


def transmit(x, realization: ChannelRealization, rng: np.random.Generator) -> np.ndarray:
    """``y = h s + z`` with ``s = 1 - 2x`` and complex noise of variance ``z_variance`` per dimension."""
    s = bpsk(x)
    h = realization.h
    if s.shape != h.shape:
        raise ValueError(f"codeword shape {s.shape} does not match channel shape {h.shape}")
    sd = np.sqrt(realization.z_variance)
    z = sd * (rng.standard_normal(h.shape) + 1j * rng.standard_normal(h.shape))
    return h * s + z
