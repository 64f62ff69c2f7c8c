"""Random LDGM/LDPC ensembles and the three-layer compound code.

All samplers draw from ``numpy.random.Generator(PCG64(seed))``; PCG64 is a
fixed, documented bit generator, so a seed reproduces the same matrices on
every platform.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, TextIO

import numpy as np

from .errors import SocketMismatch
from .gf2 import SparseBinaryMatrix, rank, vstack

SEED_BITS = 64
LDPC_MODELS = ("configuration", "gallager")


@dataclass(frozen=True)
class DegreeParams:
    gamma_t: int
    gamma_v: int
    gamma_c: int

    def __post_init__(self):
        if self.gamma_t < 1:
            raise ValueError(f"gamma_t must be >= 1, got {self.gamma_t}")
        if self.gamma_v < 1:
            raise ValueError(f"gamma_v must be >= 1, got {self.gamma_v}")
        if self.gamma_c < 2 or self.gamma_c % 2:
            raise ValueError(f"gamma_c must be a positive even integer, got {self.gamma_c}")
        if self.gamma_v >= self.gamma_c:
            raise ValueError(f"need gamma_v < gamma_c, got ({self.gamma_v}, {self.gamma_c})")


def make_rng(seed: int) -> np.random.Generator:
    if not 0 <= seed < 1 << SEED_BITS:
        raise ValueError(f"seed must be an unsigned {SEED_BITS}-bit integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def check_sockets(m: int, k: int, gamma_v: int, gamma_c: int) -> None:
    if m * gamma_v != k * gamma_c:
        raise SocketMismatch(f"m*gamma_v = {m}*{gamma_v} = {m * gamma_v} != k*gamma_c = {k}*{gamma_c} = {k * gamma_c}")


def _ldgm_placements(rng: np.random.Generator, n: int, m: int, gamma_t: int, replace: bool) -> np.ndarray:
    if replace:
        return rng.integers(0, m, size=(n, gamma_t))
    if gamma_t > m:
        raise ValueError(f"cannot place {gamma_t} distinct ones in a column of height {m}")
    return np.array([rng.choice(m, size=gamma_t, replace=False) for _ in range(n)]).reshape(n, gamma_t)


def ldgm_placements(n: int, m: int, degrees: DegreeParams | int, seed: int, *, replace: bool = True) -> np.ndarray:
    """Raw (n, gamma_t) array of row draws, one row of the array per column of G.

    ``degrees`` may be a bare gamma_t, since the LDGM layer needs nothing else.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    gamma_t = degrees if isinstance(degrees, int) else degrees.gamma_t
    if gamma_t < 1:
        raise ValueError(f"gamma_t must be >= 1, got {gamma_t}")
    return _ldgm_placements(make_rng(seed), n, m, gamma_t, replace)


def sample_ldgm(n: int, m: int, degrees: DegreeParams | int, seed: int, *, replace: bool = True) -> SparseBinaryMatrix:
    """Sample an m x n generator matrix with gamma_t placements per column.

    With ``replace=True`` (default) the placements are i.i.d. uniform rows and
    repeated rows cancel mod 2, so a column may end up with fewer than
    gamma_t ones. That is what makes ``z G`` exactly Bernoulli with the
    induced weight for any fixed ``z``.
    """
    return SparseBinaryMatrix.from_placements(m, n, ldgm_placements(n, m, degrees, seed, replace=replace))


def _ldpc_sockets(rng: np.random.Generator, m: int, k: int, gamma_v: int, gamma_c: int, model: str) -> np.ndarray:
    check_sockets(m, k, gamma_v, gamma_c)
    if model == "configuration":
        return rng.permutation(np.repeat(np.arange(m), gamma_v)).reshape(k, gamma_c)
    if model == "gallager":
        if m % gamma_c:
            raise SocketMismatch(f"gallager model needs gamma_c | m, got m={m}, gamma_c={gamma_c}")
        bands = [rng.permutation(m).reshape(m // gamma_c, gamma_c) for _ in range(gamma_v)]
        return np.concatenate(bands, axis=0)
    raise ValueError(f"unknown LDPC model {model!r}; expected one of {LDPC_MODELS}")


def ldpc_socket_graph(m: int, k: int, degrees: DegreeParams, seed: int, *, model: str = "configuration") -> np.ndarray:
    """Raw (k, gamma_c) array: row i lists the variable attached to each socket of check i."""
    return _ldpc_sockets(make_rng(seed), m, k, degrees.gamma_v, degrees.gamma_c, model)


def sample_ldpc(m: int, k: int, degrees: DegreeParams, seed: int, *, model: str = "configuration") -> SparseBinaryMatrix:
    """Sample a k x m parity-check matrix from a (gamma_v, gamma_c)-regular ensemble.

    ``configuration`` matches the m*gamma_v variable sockets to the k*gamma_c
    check sockets by one uniform permutation. ``gallager`` stacks gamma_v
    column-permuted copies of a block-diagonal band. Parallel edges cancel
    mod 2 in both.
    """
    sockets = ldpc_socket_graph(m, k, degrees, seed, model=model)
    return SparseBinaryMatrix.from_row_placements(k, m, sockets)


@dataclass(frozen=True)
class Rates:
    r_g: Fraction
    r_h: Fraction
    r_com: Fraction
    r1: Fraction
    r2: Fraction
    r_trans: Fraction
    effective_r_com: Fraction

    def as_floats(self) -> dict[str, float]:
        return {k: float(v) for k, v in self.__dict__.items()}


@dataclass(frozen=True)
class CompoundCode:
    """LDGM top code G (m x n) over nested LDPC checks H1 (k1 x m) and H2 (k2 x m).

    Codewords are ``z G`` for middle-layer words ``z`` obeying whatever
    syndrome constraints the caller imposes on ``H1 z`` and ``H2 z``.
    """

    G: SparseBinaryMatrix
    H1: SparseBinaryMatrix
    H2: SparseBinaryMatrix
    degrees: Optional[DegreeParams] = None
    seed: Optional[int] = None
    effective_rank_h: int = field(default=-1, compare=False)

    def __post_init__(self):
        m = self.G.rows
        if self.H1.cols != m or self.H2.cols != m:
            raise ValueError(f"H1/H2 must have m = {m} columns, got {self.H1.cols} and {self.H2.cols}")
        if self.effective_rank_h < 0:
            object.__setattr__(self, "effective_rank_h", rank(self.H))

    @classmethod
    def ldgm_only(cls, G: SparseBinaryMatrix, degrees: Optional[DegreeParams] = None, seed: Optional[int] = None) -> CompoundCode:
        """A code with no lower checks (R(H) = 1)."""
        empty = SparseBinaryMatrix.zeros(0, G.rows)
        return cls(G, empty, empty, degrees, seed)

    @property
    def n(self) -> int:
        return self.G.cols

    @property
    def m(self) -> int:
        return self.G.rows

    @property
    def k1(self) -> int:
        return self.H1.rows

    @property
    def k2(self) -> int:
        return self.H2.rows

    @property
    def H(self) -> SparseBinaryMatrix:
        return vstack(self.H1, self.H2)

    def rates(self) -> Rates:
        return rates(self)


def build_compound(
    n: int,
    m: int,
    k1: int,
    k2: int,
    degrees: DegreeParams,
    seed: int,
    resample_limit: int = 10,
    *,
    ldpc_model: str = "configuration",
    ldgm_replace: bool = True,
) -> CompoundCode:
    """Sample G and a stacked (k1 + k2) x m LDPC matrix, split by row index into H1, H2.

    A rank-deficient stacked matrix is redrawn up to ``resample_limit`` times;
    the last draw is kept either way and its rank is recorded on the code.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    if k1 < 0 or k2 < 0:
        raise ValueError("k1 and k2 must be non-negative")
    k = k1 + k2
    check_sockets(m, k, degrees.gamma_v, degrees.gamma_c)
    rng = make_rng(seed)
    G = SparseBinaryMatrix.from_placements(m, n, _ldgm_placements(rng, n, m, degrees.gamma_t, ldgm_replace))
    for _ in range(resample_limit + 1):
        sockets = _ldpc_sockets(rng, m, k, degrees.gamma_v, degrees.gamma_c, ldpc_model)
        H = SparseBinaryMatrix.from_row_placements(k, m, sockets)
        r = rank(H)
        if r == k:
            break
    return CompoundCode(G, H.take_rows(0, k1), H.take_rows(k1, k), degrees, seed, r)


def rates(code: CompoundCode) -> Rates:
    n, m, k1, k2 = code.n, code.m, code.k1, code.k2
    return Rates(
        r_g=Fraction(m, n),
        r_h=1 - Fraction(k1 + k2, m),
        r_com=Fraction(m - k1 - k2, n),
        r1=Fraction(m - k1, n),
        r2=Fraction(m - k1 - k2, n),
        r_trans=Fraction(k2, n),
        effective_r_com=Fraction(m - code.effective_rank_h, n),
    )


# Text format: a header line "n m k1 k2 gamma_t gamma_v gamma_c seed", then n
# lines of G column supports, then k1 lines of H1 row supports and k2 lines of
# H2 row supports. Absent degrees are written as 0 and an absent seed as "-".


def dumps_code(code: CompoundCode) -> str:
    d = code.degrees
    gt, gv, gc = (d.gamma_t, d.gamma_v, d.gamma_c) if d else (0, 0, 0)
    seed = "-" if code.seed is None else str(code.seed)
    lines = [f"{code.n} {code.m} {code.k1} {code.k2} {gt} {gv} {gc} {seed}"]
    lines += [" ".join(map(str, col)) for col in code.G.column_supports]
    lines += [" ".join(map(str, row)) for row in code.H1.row_supports]
    lines += [" ".join(map(str, row)) for row in code.H2.row_supports]
    return "\n".join(lines) + "\n"


def loads_code(text: str) -> CompoundCode:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    header = lines[0].split()
    if len(header) != 8:
        raise ValueError(f"line 1: expected 8 header fields, got {len(header)}")
    n, m, k1, k2, gt, gv, gc = (int(x) for x in header[:7])
    seed = None if header[7] == "-" else int(header[7])
    expected = 1 + n + k1 + k2
    if len(lines) != expected:
        raise ValueError(f"expected {expected} lines for n={n}, k1={k1}, k2={k2}, got {len(lines)}")

    def parse(i: int) -> list[int]:
        try:
            return [int(x) for x in lines[i].split()]
        except ValueError as exc:
            raise ValueError(f"line {i + 1}: {exc}") from None

    G = SparseBinaryMatrix(m, n, [parse(1 + j) for j in range(n)])
    H1 = SparseBinaryMatrix(m, k1, [parse(1 + n + i) for i in range(k1)]).transpose()
    H2 = SparseBinaryMatrix(m, k2, [parse(1 + n + k1 + i) for i in range(k2)]).transpose()
    degrees = DegreeParams(gt, gv, gc) if (gt, gv, gc) != (0, 0, 0) else None
    return CompoundCode(G, H1, H2, degrees, seed)


def dump_code(code: CompoundCode, fh: TextIO) -> None:
    fh.write(dumps_code(code))


def load_code(fh: TextIO) -> CompoundCode:
    return loads_code(fh.read())
