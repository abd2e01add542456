"""Dense GF(2) matrices, 1-based index sets and the binary domination order.

Every public index in this package is 1-based, so that position ``i`` here is
position ``i`` of a length-``N`` codeword.  Conversion to 0-based numpy
indexing happens inside the functions that touch arrays.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

MAX_KRON_POWER = 16


class SizeError(ValueError):
    """Raised when a requested matrix or set size is out of range."""


class SingularMatrixError(ValueError):
    """Raised when a matrix that must be invertible is not."""


class IndexSet:
    """Immutable ascending set of 1-based positions drawn from ``{1..N}``."""

    __slots__ = ("_members", "_universe_size")

    def __init__(self, members: Iterable[int], universe_size: int):
        if universe_size < 1:
            raise SizeError(f"universe size must be positive, got {universe_size}")
        arr = np.unique(np.fromiter((int(m) for m in members), dtype=np.int64))
        if arr.size and (arr[0] < 1 or arr[-1] > universe_size):
            raise IndexError(f"members must lie in [1, {universe_size}]")
        arr.setflags(write=False)
        self._members = arr
        self._universe_size = int(universe_size)

    @classmethod
    def full(cls, universe_size: int) -> "IndexSet":
        return cls(range(1, universe_size + 1), universe_size)

    @classmethod
    def empty(cls, universe_size: int) -> "IndexSet":
        return cls((), universe_size)

    @classmethod
    def from_mask(cls, mask) -> "IndexSet":
        mask = np.asarray(mask, dtype=bool)
        return cls(np.flatnonzero(mask) + 1, mask.size)

    @property
    def members(self) -> np.ndarray:
        """Read-only ascending array of 1-based members."""
        return self._members

    @property
    def universe_size(self) -> int:
        return self._universe_size

    @property
    def zero_based(self) -> np.ndarray:
        return self._members - 1

    @property
    def mask(self) -> np.ndarray:
        out = np.zeros(self._universe_size, dtype=bool)
        out[self.zero_based] = True
        return out

    def complement(self) -> "IndexSet":
        return IndexSet.from_mask(~self.mask)

    def _check(self, other: "IndexSet") -> None:
        if other.universe_size != self._universe_size:
            raise SizeError("index sets live in different universes")

    def union(self, other: "IndexSet") -> "IndexSet":
        self._check(other)
        return IndexSet(np.concatenate([self._members, other._members]), self._universe_size)

    def intersection(self, other: "IndexSet") -> "IndexSet":
        self._check(other)
        return IndexSet(np.intersect1d(self._members, other._members), self._universe_size)

    def difference(self, other: "IndexSet") -> "IndexSet":
        self._check(other)
        return IndexSet(np.setdiff1d(self._members, other._members), self._universe_size)

    def issubset(self, other: "IndexSet") -> bool:
        self._check(other)
        return bool(np.isin(self._members, other._members).all())

    def isdisjoint(self, other: "IndexSet") -> bool:
        return self.intersection(other).size == 0

    @property
    def size(self) -> int:
        return int(self._members.size)

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        return (int(m) for m in self._members)

    def __contains__(self, item) -> bool:
        return bool(np.any(self._members == item))

    def __eq__(self, other) -> bool:
        if isinstance(other, IndexSet):
            return self._universe_size == other._universe_size and np.array_equal(
                self._members, other._members
            )
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self._universe_size, self._members.tobytes()))

    def tolist(self) -> list[int]:
        return [int(m) for m in self._members]

    def __repr__(self) -> str:
        return f"IndexSet({self.tolist()}, N={self._universe_size})"


class BitMatrix:
    """Dense matrix over GF(2).

    Entries are held as a read-only ``uint8`` array of zeros and ones.  Products
    go through a floating point BLAS matmul followed by reduction mod 2, which
    is exact for inner dimensions below 2**53.
    """

    __slots__ = ("_bits",)

    def __init__(self, bits):
        arr = np.array(bits, dtype=np.uint8, copy=True)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2 or 0 in arr.shape:
            raise SizeError(f"a BitMatrix needs two positive dimensions, got {arr.shape}")
        if np.any(arr > 1):
            raise ValueError("BitMatrix entries must be 0 or 1")
        arr.setflags(write=False)
        self._bits = arr

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(np.eye(n, dtype=np.uint8))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def rows(self) -> int:
        return self._bits.shape[0]

    @property
    def cols(self) -> int:
        return self._bits.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._bits.shape

    @property
    def T(self) -> "BitMatrix":
        return BitMatrix(self._bits.T)

    def packed(self) -> np.ndarray:
        """Rows packed into bytes, most significant bit first."""
        return np.packbits(self._bits, axis=1)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return gf2_multiply(self, other)

    def __eq__(self, other) -> bool:
        if isinstance(other, BitMatrix):
            return self.shape == other.shape and np.array_equal(self._bits, other._bits)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.shape, self._bits.tobytes()))

    def __getitem__(self, key):
        return self._bits[key]

    def __repr__(self) -> str:
        body = "\n ".join("".join(str(b) for b in row) for row in self._bits)
        return f"BitMatrix({self.rows}x{self.cols},\n {body})"


_F = np.array([[1, 0], [1, 1]], dtype=np.uint8)


def kron_power(n: int, max_power: int = MAX_KRON_POWER) -> BitMatrix:
    """Return ``F^{(x) n}`` with ``F = [[1, 0], [1, 1]]`` and no bit reversal."""
    if not 1 <= n <= max_power:
        raise SizeError(f"Kronecker power must be in [1, {max_power}], got {n}")
    g = _F
    for _ in range(n - 1):
        g = np.kron(g, _F)
    return BitMatrix(g)


def _check_range(i: int, n: int) -> None:
    if not 1 <= i <= 1 << n:
        raise IndexError(f"index {i} outside [1, {1 << n}]")


def dominates(i: int, j: int, n: int) -> bool:
    """True iff every set bit of ``j-1`` is also set in ``i-1``."""
    _check_range(i, n)
    _check_range(j, n)
    a, b = i - 1, j - 1
    return (a & b) == b


def domination_matrix(n: int) -> np.ndarray:
    """Boolean ``N x N`` array with entry ``(i, j)`` set iff ``i`` dominates ``j`` (0-based)."""
    idx = np.arange(1 << n)
    return (idx[:, None] & idx[None, :]) == idx[None, :]


def submatrix(g: BitMatrix, rows: IndexSet, cols: IndexSet) -> BitMatrix | None:
    """Select ``rows x cols`` of ``g`` in ascending index order.

    Returns ``None`` when either selection is empty, since a ``BitMatrix`` has
    positive dimensions; the structural predicates treat ``None`` as the empty
    (vacuously zero) matrix.
    """
    r, c = rows.zero_based, cols.zero_based
    if (r.size and r[-1] >= g.rows) or (c.size and c[-1] >= g.cols):
        raise IndexError("selection exceeds matrix dimensions")
    if r.size == 0 or c.size == 0:
        return None
    return BitMatrix(g.bits[np.ix_(r, c)])


def gf2_multiply(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.cols != b.rows:
        raise SizeError(f"inner dimensions differ: {a.shape} @ {b.shape}")
    prod = a.bits.astype(np.float64) @ b.bits.astype(np.float64)
    return BitMatrix(np.mod(prod, 2).astype(np.uint8))


def is_involution(m: BitMatrix) -> bool:
    if m.rows != m.cols:
        raise SizeError(f"involution check needs a square matrix, got {m.shape}")
    return gf2_multiply(m, m) == BitMatrix.identity(m.rows)


def is_zero(m: BitMatrix | None) -> bool:
    return m is None or not m.bits.any()


def gf2_invert_lower_triangular(m: BitMatrix) -> BitMatrix:
    """Invert a unit lower-triangular matrix by forward substitution."""
    if m.rows != m.cols:
        raise SizeError(f"expected a square matrix, got {m.shape}")
    bits = m.bits
    if not np.all(np.diag(bits) == 1):
        raise SingularMatrixError("zero on the diagonal")
    if np.triu(bits, 1).any():
        raise ValueError("matrix is not lower triangular")
    k = m.rows
    inv = np.eye(k, dtype=np.uint8)
    # row i of the inverse: e_i + sum_{j<i} m[i, j] * inv[j]
    for i in range(1, k):
        sel = bits[i, :i].astype(bool)
        if sel.any():
            inv[i] ^= np.bitwise_xor.reduce(inv[:i][sel], axis=0)
    return BitMatrix(inv)


def is_domination_contiguous(c: IndexSet, n: int) -> bool:
    """Check the sandwich property directly over all ``(h, i, j)`` triples.

    For every pair ``h, j`` in ``c`` and every ``i`` in ``{1..N}`` with
    ``h-1 >= i-1 >= j-1`` in the domination order, ``i`` must be in ``c``.
    """
    size = 1 << n
    if c.universe_size != size:
        raise SizeError("index set universe does not match 2**n")
    dom = domination_matrix(n)
    members = c.zero_based
    outside = ~c.mask
    # between[h, i]: h dominates i; below[i, j]: i dominates j
    above = dom[members][:, outside]  # h in C dominates i outside C
    below = dom[outside][:, members]  # i outside C dominates j in C
    # a violation needs some h and some j for the same outside i
    return not np.any(above.any(axis=0) & below.any(axis=1))


def selection_matrix(a: IndexSet) -> BitMatrix:
    """``K x N`` matrix with a single one per row at the row's member of ``a``."""
    if a.size == 0:
        raise SizeError("selection matrix needs a nonempty set")
    e = np.zeros((a.size, a.universe_size), dtype=np.uint8)
    e[np.arange(a.size), a.zero_based] = 1
    return BitMatrix(e)


def bit_reversal_permutation(n: int) -> np.ndarray:
    """0-based bit-reversal permutation of ``range(2**n)``."""
    idx = np.arange(1 << n)
    rev = np.zeros_like(idx)
    for t in range(n):
        rev |= ((idx >> t) & 1) << (n - 1 - t)
    return rev

