"""Pilot-based channel estimation: LS, MMSE refinement and linear interpolation."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .channel import jakes_autocorr, noise_density
from .codec import LLR_MAX


class Estimator(str, Enum):
    LS = "ls"
    MMSE = "mmse"
    PERFECT = "perfect"


def parse_estimator(kind) -> Estimator:
    if isinstance(kind, Estimator):
        return kind
    key = str(kind).lower()
    if key == "perfect_csi":
        return Estimator.PERFECT
    try:
        return Estimator(key)
    except ValueError:
        raise ValueError(f"unknown estimator {kind!r}") from None


@dataclass(frozen=True)
class EstimatorConfig:
    kind: Estimator
    ebno_db: float
    rate_for_noise: float
    autocorr: Callable | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", parse_estimator(self.kind))
        if self.rate_for_noise <= 0:
            raise ValueError("rate for noise must be positive")
        if self.kind is Estimator.MMSE and self.autocorr is None:
            raise ValueError("MMSE needs the channel autocorrelation")

    @classmethod
    def jakes(cls, kind, ebno_db, rate_for_noise, fd_hz, symbol_time):
        return cls(kind, ebno_db, rate_for_noise,
                   lambda k: jakes_autocorr(k, fd_hz, symbol_time))

    @property
    def noise_variance(self) -> float:
        """LS error variance ``1 / (R Eb/N0)``, also the MMSE loading term."""
        return noise_density(self.ebno_db, self.rate_for_noise)


def ls_estimate(y_pilots, pilot_symbols) -> np.ndarray:
    s = np.asarray(pilot_symbols)
    if np.any(s == 0):
        raise ValueError("pilot symbols must be nonzero")
    return np.asarray(y_pilots) / s


def wiener_matrix(pilot_positions, config: EstimatorConfig) -> np.ndarray:
    """``R_hh (R_hh + v I)^{-1}`` on the pilot positions.

    The LS error is independent of ``h``, so the channel/estimate
    cross-correlation equals ``R_hh``.
    """
    p = np.asarray(pilot_positions, dtype=np.int64)
    r_hh = config.autocorr(np.abs(p[:, None] - p[None, :]))
    loaded = r_hh + config.noise_variance * np.eye(p.size)
    # both factors are functions of R_hh and commute, so W is symmetric
    return cho_solve(cho_factor(loaded), r_hh)


def mmse_estimate(h_tilde, pilot_positions, config: EstimatorConfig) -> np.ndarray:
    h_tilde = np.asarray(h_tilde)
    if len(pilot_positions) < 1:
        raise ValueError("MMSE needs at least one pilot")
    w = wiener_matrix(pilot_positions, config)
    return h_tilde @ w.T


def interpolation_matrix(pilot_positions, length: int) -> np.ndarray:
    """``length x P`` matrix mapping pilot values to a piecewise-linear fill.

    Positions outside the pilot span hold the nearest pilot's value.
    """
    p = np.asarray(pilot_positions, dtype=np.float64)
    if p.size == 0:
        raise ValueError("interpolation needs at least one pilot")
    grid = np.arange(1, length + 1, dtype=np.float64)
    return np.column_stack([np.interp(grid, p, e) for e in np.eye(p.size)])


def interpolate_linear(pilot_positions, estimates, length: int) -> np.ndarray:
    est = np.asarray(estimates)
    return est @ interpolation_matrix(pilot_positions, length).T


def channel_llrs(y, h_hat, noise_variance: float) -> np.ndarray:
    """BPSK LLRs ``4 Re(conj(h) y) / N0``, clamped to ``LLR_MAX``."""
    if noise_variance <= 0:
        raise ValueError("noise variance must be positive")
    y = np.asarray(y)
    h_hat = np.asarray(h_hat)
    if y.shape != h_hat.shape:
        raise ValueError("received samples and channel estimates differ in shape")
    llr = 4.0 * np.real(np.conj(h_hat) * y) / noise_variance
    return np.clip(llr, -LLR_MAX, LLR_MAX)
