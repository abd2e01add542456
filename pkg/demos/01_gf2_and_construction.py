"""Generator matrix structure and code construction.

Builds G_N = F^(x)n, constructs an information set by Gaussian-approximation
density evolution and checks the three structural facts that make efficient
systematic encoding possible.

Run with ``python3 demos/01_gf2_and_construction.py``.
"""
# %%
import numpy as np

from polarpilot import IndexSet, construct_info_set, is_domination_contiguous, kron_power
from polarpilot import validate_code_spec
from polarpilot.gf2 import is_involution, is_zero, submatrix

# %% The N = 8 generator matrix: row i has a one in column j iff (i-1) covers (j-1) bitwise.
G8 = kron_power(3)
print(G8.bits)

# %% A worked N = 16 example.  G restricted to (frozen, info) is all zero and
# G restricted to (info, info) squares to the identity.
G16 = kron_power(4)
A = IndexSet([8, 10, 11, 12, 13, 14, 15, 16], 16)
print("G_AbarA zero:", is_zero(submatrix(G16, A.complement(), A)))
print("G_AA involution:", is_involution(submatrix(G16, A, A)))
print("A domination contiguous:", is_domination_contiguous(A, 4))
print("G_AbarAbar =")
print(submatrix(G16, A.complement(), A.complement()).bits)

# %% Involution does not imply contiguity: {1, 4} at N = 8 is a counterexample.
B = IndexSet([1, 4], 8)
print("{1,4}: involution", is_involution(submatrix(G8, B, B)),
      "contiguous", is_domination_contiguous(B, 3))

# %% GA construction at N = 256, K = 128, 3 dB design point.
spec = construct_info_set(8, 128, design_ebno_db=3.0, method="ga")
report = validate_code_spec(spec)
print("N=256 K=128 checks:", report.checks)
print("first information indices:", spec.info_set.tolist()[:12])

# %% The GA and BEC constructions agree on most of A.
bec = construct_info_set(8, 128, design_ebno_db=3.0, method="bec")
overlap = np.intersect1d(spec.info_set.members, bec.info_set.members).size
print(f"GA and BEC share {overlap} of 128 information indices")
