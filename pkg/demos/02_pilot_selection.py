"""Choosing pilots from coded symbols.

UEPS takes frozen-side pilots from S (weight-one columns of G over the frozen
rows) and spreads the rest over the information set.  EPS puts every pilot on
a multiple of four, which gives evenly spaced pilots.

Run with ``python3 demos/02_pilot_selection.py``.
"""
# %%
import numpy as np

from polarpilot import compute_D, compute_S, construct_info_set, select_eps, select_ueps
from polarpilot import throughput, validate_plan
from polarpilot.pilots import gap_profile

spec = construct_info_set(8, 128)
S = compute_S(spec)
D = compute_D(spec.N)
print(f"|S| = {S.size}, |D| = {D.size}, |D cap Abar| = {D.intersection(spec.frozen_set).size}")

# %% Both plans with 64 pilots.
for plan in (select_ueps(spec, 64), select_eps(spec, 64)):
    gaps = gap_profile(plan.positions.tolist(), spec.N)
    print(f"{plan.scheme.value}: |P_f|={plan.frozen_pilots.size} |P_i|={plan.info_pilots.size} "
          f"max gap={gaps.max()} valid={validate_plan(spec, plan).passed}")

# %% Pilot maps: one character per position, '|' marks a pilot.
for plan in (select_ueps(spec, 64), select_eps(spec, 64)):
    row = np.full(spec.N, ".")
    row[plan.positions.zero_based] = "|"
    print(f"{plan.scheme.value:>4} " + "".join(row))

# %% Throughput against inserting 64 extra pilot symbols.
print(throughput(select_eps(spec, 64), spec))

# %% Equal throughput: K = 147 with 45 information-side pilots gives R_p = 102/256.
spec147 = construct_info_set(8, 147)
ueps = select_ueps(spec147, 64, num_info_pilots=45)
print("UEPS K=147 R_p =", throughput(ueps, spec147).r_selection, "vs", 102 / 256)
