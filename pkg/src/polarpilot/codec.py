"""Polar encoding and successive cancellation decoding.

All routines accept a single frame (1-D) or a batch of frames stacked along
the first axis.  LLR sign convention: positive means bit 0 (BPSK symbol +1).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .construction import CodeSpec
from .gf2 import IndexSet
from .pilots import PilotPlan, no_pilots

LLR_MAX = 300.0


class LlrMode(str, Enum):
    L = "L"
    L_F = "L_f"
    L_I = "L_i"
    L_F_AND_I = "L_f_and_i"


def polar_transform(u) -> np.ndarray:
    """``x = u G_N`` over GF(2) with the butterfly, along the last axis."""
    u = np.asarray(u, dtype=np.uint8)
    N = u.shape[-1]
    lead = u.shape[:-1]
    x = u.reshape(-1, N).copy()
    h = 1
    while h < N:
        v = x.reshape(x.shape[0], N // (2 * h), 2, h)
        v[:, :, 0, :] ^= v[:, :, 1, :]
        h *= 2
    return x.reshape(*lead, N)


def _as_bits(bits, length: int) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.shape[-1:] != (length,):
        raise ValueError(f"expected {length} bits on the last axis, got shape {arr.shape}")
    if np.any(arr > 1):
        raise ValueError("bits must be 0 or 1")
    return arr


def encode_nonsystematic(spec: CodeSpec, info_bits) -> np.ndarray:
    info = _as_bits(info_bits, spec.K)
    u = np.zeros(info.shape[:-1] + (spec.N,), dtype=np.uint8)
    u[..., spec.frozen_set.zero_based] = spec.frozen_values
    u[..., spec.info_set.zero_based] = info
    return polar_transform(u)


def _systematic_on(spec: CodeSpec, c: IndexSet, x_c: np.ndarray) -> np.ndarray:
    # u_C = x_C G_CC, valid whenever G_{Cbar,C} = 0: one transform of x_C
    # zero-padded, then a second transform with the frozen bits restored.
    cz = c.zero_based
    v = np.zeros(x_c.shape[:-1] + (spec.N,), dtype=np.uint8)
    v[..., cz] = x_c
    u_c = polar_transform(v)[..., cz]
    frozen_vals = np.zeros(spec.N, dtype=np.uint8)
    frozen_vals[spec.frozen_set.zero_based] = spec.frozen_values
    u = np.broadcast_to(frozen_vals, v.shape).copy()
    u[..., cz] = u_c
    return polar_transform(u)


def encode_systematic(spec: CodeSpec, info_bits) -> np.ndarray:
    """Codeword whose positions ``A`` carry ``info_bits`` verbatim."""
    info = _as_bits(info_bits, spec.K)
    return _systematic_on(spec, spec.info_set, info)


def encode_with_pilots(spec: CodeSpec, plan: PilotPlan, info_bits) -> np.ndarray:
    """Systematic encoding over ``C = A | P_f`` with pilot values pinned.

    ``info_bits`` fill ``A \\ P_i`` in ascending order.  The plan must satisfy
    ``G_{Cbar,C} = 0`` (see :func:`polarpilot.pilots.validate_plan`).
    """
    data = plan.data_positions(spec)
    info = _as_bits(info_bits, data.size)
    c = plan.encoding_set(spec)
    x_full = np.zeros(info.shape[:-1] + (spec.N,), dtype=np.uint8)
    x_full[..., data.zero_based] = info
    x_full[..., plan.positions.zero_based] = plan.pilot_values
    return _systematic_on(spec, c, x_full[..., c.zero_based])


@dataclass(frozen=True)
class LlrWord:
    """Decoder inputs: channel-side LLRs (per frame) and source-side priors (shared)."""

    channel_llrs: np.ndarray
    prior_llrs: np.ndarray


def _signed_max(bits: np.ndarray) -> np.ndarray:
    return LLR_MAX * (1.0 - 2.0 * bits.astype(np.float64))


def init_llrs(spec: CodeSpec, plan: PilotPlan | None, received_llrs, mode="L_f_and_i") -> LlrWord:
    """Apply the initial conditions of the decoding graph.

    Frozen sources always get a certain prior.  ``L_f`` turns frozen-side
    pilots into unknown sources known on the channel side, ``L_i`` pins the
    channel LLRs of information-side pilots, ``L_f_and_i`` does both.
    """
    mode = LlrMode(mode)
    plan = plan if plan is not None else no_pilots(spec)
    ch = np.clip(np.array(received_llrs, dtype=np.float64), -LLR_MAX, LLR_MAX)
    if ch.shape[-1] != spec.N:
        raise ValueError(f"expected {spec.N} LLRs, got shape {ch.shape}")
    prior = np.zeros(spec.N)
    prior[spec.frozen_set.zero_based] = _signed_max(spec.frozen_values)

    values = dict(zip(plan.positions.tolist(), plan.pilot_values.tolist()))
    if mode in (LlrMode.L_F, LlrMode.L_F_AND_I) and plan.frozen_pilots.size:
        pf = plan.frozen_pilots
        prior[pf.zero_based] = 0.0
        ch[..., pf.zero_based] = _signed_max(np.array([values[p] for p in pf]))
    if mode in (LlrMode.L_I, LlrMode.L_F_AND_I) and plan.info_pilots.size:
        pi = plan.info_pilots
        ch[..., pi.zero_based] = _signed_max(np.array([values[p] for p in pi]))
    return LlrWord(ch, prior)


def f_exact(a, b):
    """Check-node update ``2 atanh(tanh(a/2) tanh(b/2))`` in a stable form."""
    return (
        np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
        + np.log1p(np.exp(-np.abs(a + b)))
        - np.log1p(np.exp(-np.abs(a - b)))
    )


def f_minsum(a, b):
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def g_update(a, b, bit):
    """Variable-node update given the left partial sum ``bit``."""
    return b + (1.0 - 2.0 * bit) * a


class SCDecoder:
    """Successive cancellation decoder for one prior pattern.

    Sources whose prior magnitude reaches ``LLR_MAX`` are decided by the sign
    of the prior; all others by the sign of channel-plus-prior LLR, with zero
    decided as bit 0.  Subtrees made only of such certain sources are skipped.
    The instance keeps per-call scratch state, so use one per worker.
    """

    def __init__(self, prior_llrs, min_sum: bool = False):
        prior = np.asarray(prior_llrs, dtype=np.float64)
        if prior.ndim != 1 or prior.size & (prior.size - 1):
            raise ValueError("prior LLRs must be one frame of power-of-two length")
        self.N = prior.size
        self.prior = prior
        self.fixed = np.abs(prior) >= LLR_MAX
        self.fixed_bits = (prior < 0).astype(np.uint8)
        self._f = f_minsum if min_sum else f_exact
        self._u = None

    def _node(self, alpha: np.ndarray, start: int) -> np.ndarray:
        size = alpha.shape[1]
        stop = start + size
        if self.fixed[start:stop].all():
            bits = self.fixed_bits[start:stop]
            self._u[:, start:stop] = bits
            return np.broadcast_to(polar_transform(bits), alpha.shape)
        if size == 1:
            llr = alpha[:, 0] + self.prior[start]
            bit = (llr < 0).astype(np.uint8)
            self._u[:, start] = bit
            return bit[:, None]
        half = size // 2
        left, right = alpha[:, :half], alpha[:, half:]
        beta_l = self._node(self._f(left, right), start)
        beta_r = self._node(g_update(left, right, beta_l), start + half)
        return np.concatenate([beta_l ^ beta_r, beta_r], axis=1)

    def decode(self, channel_llrs) -> np.ndarray:
        """Return the decided source vector(s) ``u_hat``."""
        llr = np.asarray(channel_llrs, dtype=np.float64)
        single = llr.ndim == 1
        llr = llr.reshape(-1, self.N)
        self._u = np.zeros(llr.shape, dtype=np.uint8)
        self._node(llr, 0)
        u, self._u = self._u, None
        return u[0] if single else u


def sc_decode(spec: CodeSpec, plan: PilotPlan | None, llrs: LlrWord, min_sum: bool = False):
    """Decode and read the information back off the re-encoded codeword.

    Returns ``(u_hat, info_hat)`` where ``info_hat`` is ``x_hat`` restricted to
    the data positions ``A \\ P_i``.
    """
    plan = plan if plan is not None else no_pilots(spec)
    u_hat = SCDecoder(llrs.prior_llrs, min_sum=min_sum).decode(llrs.channel_llrs)
    x_hat = polar_transform(u_hat)
    return u_hat, x_hat[..., plan.data_positions(spec).zero_based]
