"""Pilot selection from coded symbols.

Two selections keep the systematic encoder efficient (``G_CC`` an involution
with ``C = A | P_f``):

* UEPS draws its frozen-side pilots from ``S``, the frozen positions whose
  column inside the frozen rows of ``G_N`` has weight one; the remaining pilots
  are information positions spread as evenly as possible.
* EPS uses the multiples of four.  Every multiple of four in the frozen set
  must be a pilot; information-side pilots are any subset of the rest.

A third scheme, traditional insertion, carries no pilots inside the codeword.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .construction import CodeSpec, ValidationReport
from .gf2 import (
    IndexSet,
    is_domination_contiguous,
    is_involution,
    is_zero,
    kron_power,
    submatrix,
)


class Scheme(str, Enum):
    UEPS = "ueps"
    EPS = "eps"
    TRADITIONAL = "traditional_insertion"


def parse_scheme(scheme) -> Scheme:
    if isinstance(scheme, Scheme):
        return scheme
    key = str(scheme).lower()
    if key in ("traditional", "insertion", "tpi"):
        return Scheme.TRADITIONAL
    try:
        return Scheme(key)
    except ValueError:
        raise ValueError(f"unknown pilot scheme {scheme!r}") from None


@dataclass(frozen=True)
class PilotPlan:
    """Pilot positions for one code.

    ``pilot_values`` are bits ordered like ``positions`` (ascending over
    ``P_f | P_i``).  ``num_inserted`` is only nonzero for traditional insertion,
    whose pilots live outside the codeword.
    """

    scheme: Scheme
    frozen_pilots: IndexSet
    info_pilots: IndexSet
    pilot_values: np.ndarray = field(default=None, repr=False)
    num_inserted: int = 0

    def __post_init__(self):
        if not self.frozen_pilots.isdisjoint(self.info_pilots):
            raise ValueError("frozen and information pilots overlap")
        k = self.frozen_pilots.size + self.info_pilots.size
        if self.pilot_values is None:
            pv = np.zeros(k, dtype=np.uint8)
        else:
            pv = np.asarray(self.pilot_values, dtype=np.uint8).copy()
            if pv.shape != (k,) or np.any(pv > 1):
                raise ValueError(f"pilot values must be {k} bits")
        pv.setflags(write=False)
        object.__setattr__(self, "pilot_values", pv)

    @property
    def positions(self) -> IndexSet:
        return self.frozen_pilots.union(self.info_pilots)

    @property
    def num_pilots(self) -> int:
        return self.positions.size + self.num_inserted

    def encoding_set(self, spec: CodeSpec) -> IndexSet:
        """``C = A | P_f``."""
        return spec.info_set.union(self.frozen_pilots)

    def data_positions(self, spec: CodeSpec) -> IndexSet:
        """Information positions that still carry data, ``A \\ P_i``."""
        return spec.info_set.difference(self.info_pilots)


def no_pilots(spec: CodeSpec, num_inserted: int = 0) -> PilotPlan:
    empty = IndexSet.empty(spec.N)
    scheme = Scheme.TRADITIONAL
    return PilotPlan(scheme, empty, empty, num_inserted=num_inserted)


@dataclass(frozen=True)
class ThroughputReport:
    rate: float
    alpha: float
    r_selection: float
    r_insertion: float
    gamma: float
    gamma_exact: float


def compute_S(spec: CodeSpec) -> IndexSet:
    """Frozen positions whose column within the frozen rows of ``G_N`` has weight one."""
    g = spec.generator().bits
    frozen = spec.frozen_set
    weights = g[frozen.zero_based].sum(axis=0, dtype=np.int64)
    return IndexSet([j for j in frozen if weights[j - 1] == 1], spec.N)


def compute_D(N: int) -> IndexSet:
    if N < 4 or N & (N - 1):
        raise ValueError(f"the multiples-of-four set needs a power of two N >= 4, got {N}")
    return IndexSet(range(4, N + 1, 4), N)


def gap_profile(positions, N: int) -> np.ndarray:
    """Distances between consecutive pilots, with sentinels at 0 and ``N + 1``."""
    p = np.concatenate([[0], np.sort(np.asarray(list(positions), dtype=np.int64)), [N + 1]])
    return np.diff(p)


def spread_pilots(forced, candidates, count: int, N: int) -> list[int]:
    """Pick ``count`` candidates so that, with ``forced``, pilots are evenly spread.

    The objective is lexicographic: first the largest gap, then the sum of
    squared gaps, both measured by :func:`gap_profile`.  Solved exactly by
    dynamic programming over the sorted positions.
    """
    forced = sorted(set(int(f) for f in forced))
    cands = sorted(set(int(c) for c in candidates) - set(forced))
    if count < 0 or count > len(cands):
        raise ValueError(f"cannot place {count} pilots among {len(cands)} candidates")
    if count == 0:
        return []

    pts = np.array([0] + sorted(forced + cands) + [N + 1], dtype=np.int64)
    is_forced = np.isin(pts, forced)
    is_forced[0] = is_forced[-1] = True
    last_forced = np.maximum.accumulate(np.where(is_forced, np.arange(pts.size), 0))
    m = count

    def run(gap_cost, limit=None, keep=False):
        big = np.inf
        dp = np.full((pts.size, m + 1), big)
        dp[0, 0] = 0.0
        back = np.zeros((pts.size, m + 1), dtype=np.int64) if keep else None
        for j in range(1, pts.size):
            lo = last_forced[j - 1]
            gaps = (pts[j] - pts[lo:j]).astype(np.float64)
            prev = dp[lo:j]
            if not is_forced[j]:
                prev = np.concatenate([np.full((j - lo, 1), big), prev[:, :-1]], axis=1)
            cost = gap_cost(prev, gaps[:, None])
            if limit is not None:
                cost = np.where(gaps[:, None] > limit, big, cost)
            best = np.argmin(cost, axis=0)
            dp[j] = cost[best, np.arange(m + 1)]
            if keep:
                back[j] = best + lo
        return dp, back

    dp_max, _ = run(np.maximum)
    g_star = dp_max[-1, m]
    dp_sq, back = run(lambda prev, g: prev + g * g, limit=g_star, keep=True)

    chosen = []
    j, c = pts.size - 1, m
    while j > 0:
        i = back[j, c]
        if not is_forced[j]:
            chosen.append(int(pts[j]))
            c -= 1
        j = i
    return sorted(chosen)


def select_ueps(spec: CodeSpec, num_pilots: int, num_info_pilots: int | None = None,
                pilot_values=None) -> PilotPlan:
    """Uneven pilot selection.

    ``P_f`` is the smallest ``min(num_pilots, |S|)`` members of ``S`` unless
    ``num_info_pilots`` fixes the split; the information-side pilots are then
    spread by :func:`spread_pilots`.
    """
    s = compute_S(spec)
    if num_pilots > s.size + spec.K or num_pilots > spec.N:
        raise ValueError(f"{num_pilots} pilots exceed |S| + |A| = {s.size + spec.K}")
    if num_info_pilots is None:
        n_f = min(num_pilots, s.size)
    else:
        n_f = num_pilots - num_info_pilots
        if not 0 <= n_f <= s.size or num_info_pilots > spec.K:
            raise ValueError(f"cannot take {n_f} frozen pilots from |S| = {s.size}")
    p_f = IndexSet(s.members[:n_f], spec.N)
    p_i = IndexSet(spread_pilots(p_f, spec.info_set, num_pilots - n_f, spec.N), spec.N)
    return PilotPlan(Scheme.UEPS, p_f, p_i, pilot_values)


def _even_subsample(members: np.ndarray, count: int) -> np.ndarray:
    if count == 0:
        return members[:0]
    picks = np.unique(np.round(np.linspace(0, members.size - 1, count)).astype(int))
    return members[picks]


def select_eps(spec: CodeSpec, num_pilots: int, pilot_values=None) -> PilotPlan:
    """Even pilot selection on the multiples of four.

    All of ``D & Abar`` is taken; the rest is an even subsample of ``D & A``.
    """
    d = compute_D(spec.N)
    d_f = d.intersection(spec.frozen_set)
    d_i = d.intersection(spec.info_set)
    if num_pilots < d_f.size:
        raise ValueError(f"EPS needs at least |D_f| = {d_f.size} pilots, got {num_pilots}")
    if num_pilots > d.size:
        raise ValueError(f"EPS pilots live on D, at most N/4 = {d.size}, got {num_pilots}")
    p_i = IndexSet(_even_subsample(d_i.members, num_pilots - d_f.size), spec.N)
    return PilotPlan(Scheme.EPS, d_f, p_i, pilot_values)


def select_pilots(spec: CodeSpec, scheme, num_pilots: int, **kwargs) -> PilotPlan:
    scheme = parse_scheme(scheme)
    if scheme is Scheme.UEPS:
        return select_ueps(spec, num_pilots, **kwargs)
    if scheme is Scheme.EPS:
        return select_eps(spec, num_pilots, **kwargs)
    return no_pilots(spec, num_pilots)


def validate_plan(spec: CodeSpec, plan: PilotPlan) -> ValidationReport:
    g = kron_power(spec.n)
    a, abar = spec.info_set, spec.frozen_set
    c = plan.encoding_set(spec)
    cbar = c.complement()
    p_f = plan.frozen_pilots

    checks = {
        "pilot_sets_valid": p_f.issubset(abar) and plan.info_pilots.issubset(a),
        "complement_rows_zero": is_zero(submatrix(g, cbar, c)),
        "involution": is_involution(submatrix(g, c, c)),
        "domination_contiguous": is_domination_contiguous(c, spec.n),
    }
    # columns added to G_{Abar,A} come from G_{Abar,Abar}: G_{Cbar,P_f} is a
    # block of it and G_{Cbar,A} a block of G_{Abar,A}
    if p_f.size and cbar.size:
        g_ff = submatrix(g, abar, abar).bits
        rows = np.searchsorted(abar.members, cbar.members)
        cols = np.searchsorted(abar.members, p_f.members)
        added = submatrix(g, cbar, p_f).bits
        checks["added_columns_from_frozen_block"] = bool(
            cbar.issubset(abar) and np.array_equal(added, g_ff[np.ix_(rows, cols)])
        )
    else:
        checks["added_columns_from_frozen_block"] = True

    if plan.scheme is Scheme.UEPS:
        checks["scheme_rule"] = p_f.issubset(compute_S(spec))
    elif plan.scheme is Scheme.EPS:
        checks["scheme_rule"] = p_f == compute_D(spec.N).intersection(abar)
    return ValidationReport(checks)


def throughput(plan: PilotPlan, spec: CodeSpec) -> ThroughputReport:
    n, k = spec.N, spec.K
    kp = plan.num_pilots
    alpha = kp / n
    r_sel = (k - plan.info_pilots.size) / n
    r_ins = k / (n + kp)
    return ThroughputReport(
        rate=k / n,
        alpha=alpha,
        r_selection=r_sel,
        r_insertion=r_ins,
        gamma=(1 - alpha) * (1 + alpha),
        gamma_exact=r_sel / r_ins,
    )


def gamma_closed_form(alpha: float) -> float:
    return (1 - alpha) * (1 + alpha)


def effective_rate(plan: PilotPlan, spec: CodeSpec) -> float:
    """Information bits per transmitted symbol for the plan's scheme."""
    if plan.scheme is Scheme.TRADITIONAL:
        return spec.K / (spec.N + plan.num_inserted)
    return (spec.K - plan.info_pilots.size) / spec.N


__all__ = [
    "PilotPlan",
    "Scheme",
    "ThroughputReport",
    "compute_D",
    "compute_S",
    "effective_rate",
    "gamma_closed_form",
    "gap_profile",
    "no_pilots",
    "parse_scheme",
    "select_eps",
    "select_pilots",
    "select_ueps",
    "spread_pilots",
    "throughput",
    "validate_plan",
]
