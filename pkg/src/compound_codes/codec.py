"""Exhaustive ML quantization and decoding over compound-code cosets.

The operative codebook is ``{z G : H1 z = t1, H2 z = t2}`` (``t2`` may be
left unconstrained). Candidates are scanned in the lexicographic order of
``gf2.AffineSolutionSpace``; every tie is resolved in favour of the first
candidate in that order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .analysis import decoding_threshold
from .ensembles import CompoundCode
from .errors import DimensionMismatch, SearchSpaceTooLarge
from .gf2 import AffineSolutionSpace, BinaryVector, mat_vec_mul, solve_affine, vstack

DEFAULT_CAP = 26  # log2 of the largest coset we agree to scan
_BLOCK_BITS = 14


class DecodeStatus(str, enum.Enum):
    DECODED = "decoded"
    NO_CODEWORD = "no_codeword"
    AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class DecodeOutcome:
    status: DecodeStatus
    z_hat: Optional[BinaryVector] = None
    distance: Optional[int] = None

    @property
    def decoded(self) -> bool:
        return self.status is DecodeStatus.DECODED


@dataclass(frozen=True)
class CosetConstraint:
    """Required syndromes: ``H1 z = t1`` and, unless ``t2`` is None, ``H2 z = t2``."""

    t1: BinaryVector
    t2: Optional[BinaryVector] = None

    @classmethod
    def zero(cls, code: CompoundCode, *, constrain_h2: bool = False) -> CosetConstraint:
        return cls(BinaryVector.zeros(code.k1), BinaryVector.zeros(code.k2) if constrain_h2 else None)

    def check(self, code: CompoundCode) -> None:
        if len(self.t1) != code.k1:
            raise DimensionMismatch(f"t1 has length {len(self.t1)}, code has k1 = {code.k1}")
        if self.t2 is not None and len(self.t2) != code.k2:
            raise DimensionMismatch(f"t2 has length {len(self.t2)}, code has k2 = {code.k2}")


def _pack(value: int, words: int) -> np.ndarray:
    return np.frombuffer(value.to_bytes(8 * words, "little"), dtype="<u8").astype(np.uint64)


def _span(vectors: list[np.ndarray], words: int) -> np.ndarray:
    """Row j is the XOR of vectors[i] over the bits of j, vectors[0] most significant."""
    table = np.zeros((1, words), dtype=np.uint64)
    for vec in reversed(vectors):
        table = np.concatenate([table, table ^ vec])
    return table


class _CosetScan:
    """Packed images of the constrained coset under G, streamed in fixed-size blocks."""

    def __init__(self, code: CompoundCode, constraint: Optional[CosetConstraint], cap: int):
        if constraint is None:
            constraint = CosetConstraint.zero(code)
        constraint.check(code)
        if constraint.t2 is None:
            H, t = code.H1, constraint.t1
        else:
            H = vstack(code.H1, code.H2)
            t = BinaryVector(constraint.t1.value | (constraint.t2.value << code.k1), code.k1 + code.k2)
        self.space: AffineSolutionSpace = solve_affine(H, t)
        f = self.space.dimension
        if f > cap:
            raise SearchSpaceTooLarge(f"coset has 2^{f} candidates, cap is 2^{cap}")
        self.code = code
        self.words = max(1, (code.n + 63) // 64)
        G = code.G
        m = code.m
        self.offset = _pack(mat_vec_mul(BinaryVector(self.space.particular, m), G).value, self.words)
        self.images = [_pack(mat_vec_mul(BinaryVector(b, m), G).value, self.words) for b in self.space.basis]
        self.low = min(f, _BLOCK_BITS)
        self.high = f - self.low
        self._table = _span(self.images[self.high:], self.words)

    def __len__(self) -> int:
        return len(self.space)

    def blocks(self) -> Iterator[tuple[int, np.ndarray]]:
        """Yield ``(first_index, codewords)`` with codewords shaped (block, words)."""
        size = 1 << self.low
        for h in range(1 << self.high):
            off = self.offset.copy()
            for i in range(self.high):
                if (h >> (self.high - 1 - i)) & 1:
                    off ^= self.images[i]
            yield h * size, self._table ^ off

    def distances(self, y: BinaryVector) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
        if len(y) != self.code.n:
            raise DimensionMismatch(f"word length {len(y)} != n = {self.code.n}")
        yp = _pack(y.value, self.words)
        for start, block in self.blocks():
            yield start, block, np.bitwise_count(block ^ yp).sum(axis=1, dtype=np.int64)


def enumerate_codebook(
    code: CompoundCode, constraint: Optional[CosetConstraint] = None, *, cap: int = DEFAULT_CAP
) -> Iterator[tuple[BinaryVector, BinaryVector]]:
    """Stream every constrained pair ``(z, z G)`` once, in enumeration order."""
    scan = _CosetScan(code, constraint, cap)
    n = code.n

    def gen():
        for start, block in scan.blocks():
            raw = block.astype("<u8").tobytes()
            step = 8 * scan.words
            for j in range(block.shape[0]):
                c = int.from_bytes(raw[j * step:(j + 1) * step], "little")
                yield scan.space.solution(start + j), BinaryVector(c, n)

    return gen()


def _minimum(scan: _CosetScan, y: BinaryVector) -> tuple[int, int, int]:
    """Return (first minimizing index, minimum distance, distinct minimizing codewords).

    The distinct count saturates at 2; that is all ambiguity detection needs.
    """
    best_idx, best, distinct = -1, None, set()
    for start, block, dist in scan.distances(y):
        j = int(np.argmin(dist))
        d = int(dist[j])
        if best is not None and d > best:
            continue
        if best is None or d < best:
            best_idx, best, distinct = start + j, d, set()
        if len(distinct) < 2:
            distinct |= _distinct_rows(block[dist == d])
    return best_idx, best, len(distinct)


def _distinct_rows(rows: np.ndarray) -> set[bytes]:
    """At most two distinct rows of ``rows``, as bytes."""
    if rows.shape[0] > 1:
        rows = np.unique(rows, axis=0)
    return {r.tobytes() for r in rows[:2]}


def quantize(
    code: CompoundCode, s: BinaryVector, constraint: Optional[CosetConstraint] = None, *, cap: int = DEFAULT_CAP
) -> tuple[BinaryVector, int]:
    """Minimum-distortion ``z`` in the constrained coset and its Hamming distortion to ``s``."""
    scan = _CosetScan(code, constraint, cap)
    idx, dist, _ = _minimum(scan, s)
    return scan.space.solution(idx), dist


def ml_decode(
    code: CompoundCode, y: BinaryVector, constraint: Optional[CosetConstraint] = None, *, cap: int = DEFAULT_CAP
) -> DecodeOutcome:
    """Minimum Hamming distance decoding (ML over a BSC with flip probability below 1/2).

    Two or more distinct codewords at the minimum distance give AMBIGUOUS;
    ``z_hat`` still holds the first minimizer. Middle-layer words with the
    same image ``z G`` are one codeword and never cause ambiguity.
    """
    scan = _CosetScan(code, constraint, cap)
    idx, dist, distinct = _minimum(scan, y)
    status = DecodeStatus.DECODED if distinct == 1 else DecodeStatus.AMBIGUOUS
    return DecodeOutcome(status, scan.space.solution(idx), dist)


def threshold_decode(
    code: CompoundCode,
    y: BinaryVector,
    flip_prob: float,
    constraint: Optional[CosetConstraint] = None,
    *,
    cap: int = DEFAULT_CAP,
) -> DecodeOutcome:
    """Accept the unique codeword within d(n) = floor((flip_prob + n^(-1/3)) n) of ``y``.

    Uniqueness is over codewords ``z G``, not over middle-layer words.
    """
    radius = decoding_threshold(code.n, flip_prob)
    scan = _CosetScan(code, constraint, cap)
    first, first_dist, seen = -1, None, set()
    for start, block, dist in scan.distances(y):
        hits = np.flatnonzero(dist <= radius)
        if not hits.size:
            continue
        if first < 0:
            first, first_dist = start + int(hits[0]), int(dist[hits[0]])
        seen |= _distinct_rows(block[hits])
        if len(seen) > 1:
            return DecodeOutcome(DecodeStatus.AMBIGUOUS)
    if first < 0:
        return DecodeOutcome(DecodeStatus.NO_CODEWORD)
    return DecodeOutcome(DecodeStatus.DECODED, scan.space.solution(first), first_dist)


def coset_size(code: CompoundCode, constraint: Optional[CosetConstraint] = None) -> int:
    return len(_CosetScan(code, constraint, cap=10**9).space)


__all__ = [
    "DEFAULT_CAP",
    "CosetConstraint",
    "DecodeOutcome",
    "DecodeStatus",
    "coset_size",
    "enumerate_codebook",
    "ml_decode",
    "quantize",
    "threshold_decode",
]
