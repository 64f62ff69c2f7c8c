"""GF(2) linear algebra on packed bit vectors and column-sparse matrices.

Bit vectors are stored in a single Python int (bit ``i`` of the int is
position ``i`` of the vector), so XOR and popcount are word-parallel.
Matrices keep per-column supports and derive packed row/column masks
lazily.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DimensionMismatch, InconsistentSystem


class BinaryVector:
    """Immutable fixed-length vector over GF(2)."""

    __slots__ = ("_value", "_len")

    def __init__(self, value: int, length: int):
        if length < 0:
            raise ValueError("length must be non-negative")
        if value < 0 or value >> length:
            raise ValueError(f"value does not fit in {length} bits")
        self._value = value
        self._len = length

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BinaryVector:
        value = 0
        length = 0
        for i, b in enumerate(bits):
            if b not in (0, 1, True, False):
                raise ValueError(f"bit {i} is {b!r}, expected 0 or 1")
            if b:
                value |= 1 << i
            length = i + 1
        return cls(value, length)

    @classmethod
    def from_str(cls, text: str) -> BinaryVector:
        """Parse ``"10110"``; the leftmost character is position 0."""
        text = text.strip()
        if any(ch not in "01" for ch in text):
            raise ValueError(f"not a bit string: {text!r}")
        return cls.from_bits(int(ch) for ch in text)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> BinaryVector:
        arr = np.asarray(arr).astype(np.uint8).ravel()
        if arr.size and arr.max() > 1:
            raise ValueError("array entries must be 0 or 1")
        packed = np.packbits(arr, bitorder="little").tobytes()
        return cls(int.from_bytes(packed, "little"), int(arr.size))

    @classmethod
    def zeros(cls, length: int) -> BinaryVector:
        return cls(0, length)

    @classmethod
    def ones(cls, length: int) -> BinaryVector:
        return cls((1 << length) - 1, length)

    @property
    def value(self) -> int:
        return self._value

    def __len__(self) -> int:
        return self._len

    def __getitem__(self, i: int) -> int:
        if i < 0:
            i += self._len
        if not 0 <= i < self._len:
            raise IndexError(i)
        return (self._value >> i) & 1

    def __iter__(self) -> Iterator[int]:
        v = self._value
        for _ in range(self._len):
            yield v & 1
            v >>= 1

    def __xor__(self, other: BinaryVector) -> BinaryVector:
        _check_same_length(self, other)
        return BinaryVector(self._value ^ other._value, self._len)

    def __invert__(self) -> BinaryVector:
        return BinaryVector(self._value ^ ((1 << self._len) - 1), self._len)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryVector):
            return NotImplemented
        return self._len == other._len and self._value == other._value

    def __hash__(self) -> int:
        return hash((self._value, self._len))

    def __str__(self) -> str:
        return "".join("1" if b else "0" for b in self)

    def __repr__(self) -> str:
        return f"BinaryVector('{self}')"

    def weight(self) -> int:
        return self._value.bit_count()

    def support(self) -> list[int]:
        return [i for i, b in enumerate(self) if b]

    def to_array(self) -> np.ndarray:
        nbytes = (self._len + 7) // 8
        raw = np.frombuffer(self._value.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self._len].copy()


def _check_same_length(a: BinaryVector, b: BinaryVector) -> None:
    if len(a) != len(b):
        raise DimensionMismatch(f"lengths differ: {len(a)} vs {len(b)}")


def hamming_distance(a: BinaryVector, b: BinaryVector) -> int:
    _check_same_length(a, b)
    return (a.value ^ b.value).bit_count()


class SparseBinaryMatrix:
    """Immutable GF(2) matrix stored as sorted per-column row supports."""

    def __init__(self, rows: int, cols: int, column_supports: Sequence[Iterable[int]]):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if len(column_supports) != cols:
            raise DimensionMismatch(f"expected {cols} column supports, got {len(column_supports)}")
        supports = []
        for j, col in enumerate(column_supports):
            col = tuple(int(i) for i in col)
            if any(b <= a for a, b in zip(col, col[1:])):
                raise ValueError(f"column {j} support is not strictly increasing")
            if col and (col[0] < 0 or col[-1] >= rows):
                raise ValueError(f"column {j} has a row index outside [0, {rows})")
            supports.append(col)
        self.rows = rows
        self.cols = cols
        self.column_supports: tuple[tuple[int, ...], ...] = tuple(supports)

    @classmethod
    def from_placements(cls, rows: int, cols: int, placements: Sequence[Iterable[int]]) -> SparseBinaryMatrix:
        """Build from per-column row placements; repeated placements cancel mod 2."""
        supports = []
        for col in placements:
            odd: set[int] = set()
            for i in col:
                odd ^= {int(i)}
            supports.append(sorted(odd))
        return cls(rows, cols, supports)

    @classmethod
    def from_row_placements(cls, rows: int, cols: int, placements: Sequence[Iterable[int]]) -> SparseBinaryMatrix:
        return cls.from_placements(cols, rows, placements).transpose()

    @classmethod
    def from_dense(cls, dense) -> SparseBinaryMatrix:
        arr = np.asarray(dense, dtype=np.uint8) & 1
        if arr.ndim != 2:
            raise ValueError("dense matrix must be 2-D")
        r, c = arr.shape
        return cls(r, c, [np.flatnonzero(arr[:, j]).tolist() for j in range(c)])

    @classmethod
    def identity(cls, size: int) -> SparseBinaryMatrix:
        return cls(size, size, [(j,) for j in range(size)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> SparseBinaryMatrix:
        return cls(rows, cols, [()] * cols)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @cached_property
    def row_supports(self) -> tuple[tuple[int, ...], ...]:
        acc: list[list[int]] = [[] for _ in range(self.rows)]
        for j, col in enumerate(self.column_supports):
            for i in col:
                acc[i].append(j)
        return tuple(tuple(r) for r in acc)

    @cached_property
    def column_masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << i for i in col) for col in self.column_supports)

    @cached_property
    def row_masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << j for j in row) for row in self.row_supports)

    def column_weights(self) -> list[int]:
        return [len(c) for c in self.column_supports]

    def row_weights(self) -> list[int]:
        return [len(r) for r in self.row_supports]

    def nnz(self) -> int:
        return sum(len(c) for c in self.column_supports)

    def transpose(self) -> SparseBinaryMatrix:
        return SparseBinaryMatrix(self.cols, self.rows, self.row_supports)

    @property
    def T(self) -> SparseBinaryMatrix:
        return self.transpose()

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for j, col in enumerate(self.column_supports):
            out[list(col), j] = 1
        return out

    def take_rows(self, start: int, stop: int) -> SparseBinaryMatrix:
        """Rows ``start..stop-1`` as a new matrix (row indices renumbered)."""
        if not 0 <= start <= stop <= self.rows:
            raise IndexError(f"row slice [{start}, {stop}) out of range for {self.rows} rows")
        return SparseBinaryMatrix(
            stop - start,
            self.cols,
            [tuple(i - start for i in col if start <= i < stop) for col in self.column_supports],
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseBinaryMatrix):
            return NotImplemented
        return self.shape == other.shape and self.column_supports == other.column_supports

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.column_supports))

    def __repr__(self) -> str:
        return f"SparseBinaryMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


def vstack(top: SparseBinaryMatrix, bottom: SparseBinaryMatrix) -> SparseBinaryMatrix:
    if top.cols != bottom.cols:
        raise DimensionMismatch(f"column counts differ: {top.cols} vs {bottom.cols}")
    off = top.rows
    return SparseBinaryMatrix(
        top.rows + bottom.rows,
        top.cols,
        [a + tuple(i + off for i in b) for a, b in zip(top.column_supports, bottom.column_supports)],
    )


def mat_vec_mul(z: BinaryVector, M: SparseBinaryMatrix) -> BinaryVector:
    """Row-vector product ``z . M`` over GF(2)."""
    if len(z) != M.rows:
        raise DimensionMismatch(f"vector length {len(z)} != matrix rows {M.rows}")
    zv = z.value
    out = 0
    for j, mask in enumerate(M.column_masks):
        if (zv & mask).bit_count() & 1:
            out |= 1 << j
    return BinaryVector(out, M.cols)


def syndrome(H: SparseBinaryMatrix, z: BinaryVector) -> BinaryVector:
    """Column-vector product ``H . z`` over GF(2)."""
    if len(z) != H.cols:
        raise DimensionMismatch(f"vector length {len(z)} != matrix cols {H.cols}")
    zv = z.value
    out = 0
    for i, mask in enumerate(H.row_masks):
        if (zv & mask).bit_count() & 1:
            out |= 1 << i
    return BinaryVector(out, H.rows)


def rank(M: SparseBinaryMatrix) -> int:
    pivots: dict[int, int] = {}
    for r in M.row_masks:
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                break
    return len(pivots)


@dataclass(frozen=True)
class _Elimination:
    """Reduced row echelon form of H together with the row transform T (T H = R)."""

    ncols: int
    reduced: tuple[int, ...]
    transform: tuple[int, ...]
    pivot_columns: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivot_columns)


@lru_cache(maxsize=256)
def _eliminate(H: SparseBinaryMatrix) -> _Elimination:
    rows = list(H.row_masks)
    trans = [1 << i for i in range(H.rows)]
    pivots = []
    r = 0
    for col in range(H.cols):
        bit = 1 << col
        piv = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        trans[r], trans[piv] = trans[piv], trans[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
                trans[i] ^= trans[r]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return _Elimination(H.cols, tuple(rows), tuple(trans), tuple(pivots))


@dataclass(frozen=True)
class AffineSolutionSpace:
    """All solutions of H z = t, as ``particular`` plus the span of ``basis``.

    ``basis[i]`` is the null vector with free variable ``free_columns[i]`` set
    and every other free variable clear. Solution ``index`` takes its free
    variable assignment from the binary expansion of ``index`` with
    ``free_columns[0]`` as the most significant bit, so increasing indices
    enumerate assignments lexicographically.
    """

    length: int
    particular: int
    free_columns: tuple[int, ...]
    basis: tuple[int, ...]

    @property
    def dimension(self) -> int:
        return len(self.free_columns)

    def __len__(self) -> int:
        return 1 << self.dimension

    def solution(self, index: int) -> BinaryVector:
        f = self.dimension
        if not 0 <= index < (1 << f):
            raise IndexError(index)
        z = self.particular
        for i, b in enumerate(self.basis):
            if (index >> (f - 1 - i)) & 1:
                z ^= b
        return BinaryVector(z, self.length)

    def __iter__(self) -> Iterator[BinaryVector]:
        for index in range(len(self)):
            yield self.solution(index)


def solve_affine(H: SparseBinaryMatrix, t: BinaryVector) -> AffineSolutionSpace:
    if len(t) != H.rows:
        raise DimensionMismatch(f"right-hand side length {len(t)} != matrix rows {H.rows}")
    el = _eliminate(H)
    tv = t.value
    rhs = [(tr & tv).bit_count() & 1 for tr in el.transform]
    if any(rhs[el.rank:]):
        raise InconsistentSystem("right-hand side is not in the column space of H")
    particular = 0
    for i, col in enumerate(el.pivot_columns):
        if rhs[i]:
            particular |= 1 << col
    pivot_set = set(el.pivot_columns)
    free = tuple(c for c in range(H.cols) if c not in pivot_set)
    basis = []
    for f in free:
        vec = 1 << f
        for i, col in enumerate(el.pivot_columns):
            if (el.reduced[i] >> f) & 1:
                vec |= 1 << col
        basis.append(vec)
    return AffineSolutionSpace(H.cols, particular, free, tuple(basis))


def enumerate_solutions(H: SparseBinaryMatrix, t: BinaryVector) -> Iterator[BinaryVector]:
    """Stream every solution of H z = t once, in lexicographic free-variable order.

    Raises InconsistentSystem eagerly, before the first solution is requested.
    """
    return iter(solve_affine(H, t))
