"""Information-theoretic quantities behind the compound construction.

Entropies and divergences are in bits. Log-domain enumerators use
``NEG_INF`` (IEEE -inf) for weights that no codeword can have; it
propagates through sums and comparisons instead of posing as a finite
number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np
from scipy.optimize import brentq

from .errors import NoPositiveThreshold, SocketMismatch

NEG_INF = float("-inf")
DEFAULT_GRID_STEP = 1e-3
_LOG_X_BOUND = 40.0


def _check_prob(name: str, t: float, *, open_low=False, open_high=False, high=1.0) -> None:
    lo_ok = t > 0 if open_low else t >= 0
    hi_ok = t < high if open_high else t <= high
    if not (lo_ok and hi_ok) or math.isnan(t):
        raise ValueError(f"{name} = {t} outside its domain")


def binary_entropy(t: float) -> float:
    _check_prob("t", t)
    if t == 0.0 or t == 1.0:
        return 0.0
    return -t * math.log2(t) - (1 - t) * math.log2(1 - t)


def binary_kl(a: float, b: float) -> float:
    """D(Ber(a) || Ber(b)) in bits; +inf when b is 0 or 1 and a differs from it."""
    _check_prob("a", a)
    _check_prob("b", b)
    total = 0.0
    for pa, pb in ((a, b), (1 - a, 1 - b)):
        if pa == 0.0:
            continue
        if pb == 0.0:
            return math.inf
        total += pa * math.log2(pa / pb)
    return max(total, 0.0)


def bernoulli_convolve(a: float, b: float) -> float:
    """Flip probability of the XOR of independent Ber(a) and Ber(b) bits."""
    _check_prob("a", a)
    _check_prob("b", b)
    return a * (1 - b) + b * (1 - a)


def induced_weight(v: float, gamma_t: int) -> float:
    """One-probability of an LDGM parity bit over gamma_t draws from a word of one-fraction v."""
    _check_prob("v", v)
    if gamma_t < 1:
        raise ValueError(f"gamma_t must be >= 1, got {gamma_t}")
    return 0.5 * (1.0 - (1.0 - 2.0 * v) ** gamma_t)


def decoding_threshold(n: int, p: float) -> int:
    """floor((p + n^(-1/3)) n), computed as floor(p n + n^(2/3)) with a rounding guard."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _check_prob("p", p, open_low=True, open_high=True, high=0.5)
    x = p * n + n ** (2.0 / 3.0)
    r = round(x)
    return int(r) if abs(x - r) < 1e-9 else math.floor(x)


# ---------------------------------------------------------------------------
# LDPC weight enumerators


def _check_pair(gamma_v: int, gamma_c: int) -> None:
    if gamma_v < 1 or gamma_c < 2 or gamma_c % 2:
        raise ValueError(f"invalid degree pair ({gamma_v}, {gamma_c})")


@lru_cache(maxsize=64)
def _check_polynomial_power(gamma_c: int, power: int) -> tuple[int, ...]:
    """Coefficients (in x) of [((1+x)^gc + (1-x)^gc) / 2]^power, exact.

    Works in y = x^2, where the base polynomial is sum_i C(gc, 2i) y^i, and
    uses the power recurrence  n c_n = sum_j ((power+1) j - n) a_j c_{n-j}
    (a_0 = 1), which needs O(degree) big-integer steps instead of repeated
    convolution.
    """
    a = [math.comb(gamma_c, 2 * i) for i in range(gamma_c // 2 + 1)]
    d = len(a) - 1
    top = d * power
    c = [0] * (top + 1)
    c[0] = 1
    for n in range(1, top + 1):
        acc = 0
        for j in range(1, min(n, d) + 1):
            acc += ((power + 1) * j - n) * a[j] * c[n - j]
        q, r = divmod(acc, n)
        assert r == 0
        c[n] = q
    out = [0] * (2 * top + 1)
    out[::2] = c
    return tuple(out)


def expected_weight_count(m: int, gamma_v: int, gamma_c: int, weight: int, *, ensemble: str = "configuration") -> Fraction:
    """Exact ensemble average of card{z : |z| = weight, H z = 0}.

    ``configuration``: the socket-permutation ensemble drawn by
    ``ensembles.sample_ldpc``. Conditioning on the weight-``l`` word, its
    ``l gamma_v`` sockets land on a uniformly random subset of the
    ``m gamma_v`` check sockets, and the word satisfies H z = 0 iff every
    check sees an even number of them:
        C(m, l) * [x^(l gamma_v)] q(x)^(m gamma_v / gamma_c) / C(m gamma_v, l gamma_v).
    ``gallager``: gamma_v independent bands of m / gamma_c checks each:
        C(m, l) * (N(l) / C(m, l))^gamma_v,  N(l) = [x^l] q(x)^(m / gamma_c).
    Here q(x) = ((1+x)^gamma_c + (1-x)^gamma_c) / 2.
    """
    _check_pair(gamma_v, gamma_c)
    if (m * gamma_v) % gamma_c:
        raise SocketMismatch(f"m*gamma_v = {m * gamma_v} is not a multiple of gamma_c = {gamma_c}")
    if not 0 <= weight <= m:
        raise ValueError(f"weight {weight} outside [0, {m}]")
    binom = math.comb(m, weight)
    if ensemble == "configuration":
        coeffs = _check_polynomial_power(gamma_c, m * gamma_v // gamma_c)
        return Fraction(binom * coeffs[weight * gamma_v], math.comb(m * gamma_v, weight * gamma_v))
    if ensemble == "gallager":
        if m % gamma_c:
            raise SocketMismatch(f"gallager ensemble needs gamma_c | m, got m={m}, gamma_c={gamma_c}")
        coeffs = _check_polynomial_power(gamma_c, m // gamma_c)
        return binom * Fraction(coeffs[weight], binom) ** gamma_v
    raise ValueError(f"unknown ensemble {ensemble!r}")


def _log2_fraction(x: Fraction) -> float:
    if x == 0:
        return NEG_INF
    return math.log2(x.numerator) - math.log2(x.denominator)


def finite_weight_enumerator(m: int, gamma_v: int, gamma_c: int, weight: int, *, ensemble: str = "configuration") -> float:
    """(1/m) log2 of ``expected_weight_count``; NEG_INF when no such codeword can exist."""
    return _log2_fraction(expected_weight_count(m, gamma_v, gamma_c, weight, ensemble=ensemble)) / m


def _log_check_poly(t: float, logc: Sequence[float], js: Sequence[int]) -> tuple[float, float]:
    """Natural log of q(e^t) and its t-derivative (the tilted mean of j)."""
    terms = [lc + j * t for lc, j in zip(logc, js)]
    top = max(terms)
    ws = [math.exp(x - top) for x in terms]
    s = sum(ws)
    return top + math.log(s), sum(w * j for w, j in zip(ws, js)) / s


def asymptotic_weight_enumerator(gamma_v: int, gamma_c: int, v: float) -> float:
    """Large-m limit of the LDPC log-domain weight enumerator at relative weight v.

    A(v) = (1 - gamma_v) h(v) + (gamma_v / gamma_c) inf_{x>0} [log2 q(x) - v gamma_c log2 x].
    The objective is convex in log x, so the infimum sits where the tilted
    mean degree equals v gamma_c; that root is found by Brent's method on
    log x in [-40, 40].
    """
    _check_pair(gamma_v, gamma_c)
    _check_prob("v", v)
    if v == 0.0 or v == 1.0:
        return 0.0
    js = list(range(0, gamma_c + 1, 2))
    logc = [math.log(math.comb(gamma_c, j)) for j in js]
    target = v * gamma_c

    def slope(t):
        return _log_check_poly(t, logc, js)[1] - target

    lo, hi = -_LOG_X_BOUND, _LOG_X_BOUND
    if slope(lo) >= 0:
        t = lo
    elif slope(hi) <= 0:
        t = hi
    else:
        t = brentq(slope, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=500)
    log_q, _ = _log_check_poly(t, logc, js)
    inner = (log_q - target * t) / math.log(2)
    return (1 - gamma_v) * binary_entropy(v) + gamma_v / gamma_c * inner


def _enumerator(gamma_v: Optional[int], gamma_c: Optional[int]):
    if gamma_v is None or gamma_c is None:
        return binary_entropy
    return lambda v: asymptotic_weight_enumerator(gamma_v, gamma_c, v)


def nu_star(gamma_v: int, gamma_c: int, *, tol: float = 1e-8, probe: float = 1e-6, grid_step: float = DEFAULT_GRID_STEP) -> float:
    """Largest nu with A(v) <= 0 on (0, nu] (relative minimum-distance threshold)."""
    _check_pair(gamma_v, gamma_c)
    A = _enumerator(gamma_v, gamma_c)
    if A(probe) > 0:
        raise NoPositiveThreshold(f"A(v) > 0 already at v = {probe} for ({gamma_v}, {gamma_c})")
    lo = probe
    hi = None
    steps = int(round(0.5 / grid_step))
    for i in range(1, steps + 1):
        v = i * grid_step
        if v <= lo:
            continue
        if A(v) > 0:
            hi = v
            break
        lo = v
    if hi is None:
        return 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if A(mid) > 0:
            hi = mid
        else:
            lo = mid
    return lo


# ---------------------------------------------------------------------------
# Error exponent


@dataclass(frozen=True)
class ExponentCurve:
    grid: tuple[float, ...]
    values: tuple[float, ...]
    label: str

    def __post_init__(self):
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values differ in length")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly increasing")


def exponent_terms(v: float, r_g: float, gamma_t: int, gamma_v: Optional[int], gamma_c: Optional[int], p: float) -> tuple[float, float]:
    """(r_g A(v), D(p || omega(v) * p)); leave gamma_v/gamma_c as None for an LDGM-only code (A = h)."""
    rate_term = r_g * _enumerator(gamma_v, gamma_c)(v)
    kl_term = binary_kl(p, bernoulli_convolve(induced_weight(v, gamma_t), p))
    return rate_term, kl_term


def error_exponent(v: float, r_g: float, gamma_t: int, gamma_v: Optional[int], gamma_c: Optional[int], p: float) -> float:
    rate_term, kl_term = exponent_terms(v, r_g, gamma_t, gamma_v, gamma_c, p)
    return rate_term - kl_term


def taylor_bound_function(v: float, r_com: float, gamma_t: int, p: float) -> float:
    """r_com h(v) - D(p || omega(v) * p): dominates the exponent wherever A(v) <= R(H) h(v)."""
    return r_com * binary_entropy(v) - binary_kl(p, bernoulli_convolve(induced_weight(v, gamma_t), p))


def exponent_grid(grid_step: float = DEFAULT_GRID_STEP) -> list[float]:
    """v = grid_step, 2 grid_step, ..., 1/2 (the last point pinned to exactly 1/2)."""
    if not grid_step > 0:
        raise ValueError("grid_step must be positive")
    steps = int(round(0.5 / grid_step))
    if steps < 1 or abs(steps * grid_step - 0.5) > 1e-9:
        raise ValueError(f"grid_step {grid_step} does not divide 1/2")
    return [i / steps * 0.5 for i in range(1, steps + 1)]


def exponent_curves(
    r_g: float, gamma_t: int, gamma_v: Optional[int], gamma_c: Optional[int], p: float, grid_step: float = DEFAULT_GRID_STEP
) -> list[ExponentCurve]:
    grid = exponent_grid(grid_step)
    rate, kl = zip(*(exponent_terms(v, r_g, gamma_t, gamma_v, gamma_c, p) for v in grid))
    g = tuple(grid)
    return [
        ExponentCurve(g, tuple(rate), "rate_term"),
        ExponentCurve(g, tuple(-x for x in kl), "neg_kl_term"),
        ExponentCurve(g, tuple(a - b for a, b in zip(rate, kl)), "exponent"),
    ]


@dataclass(frozen=True)
class ChannelCondition:
    satisfied: bool
    worst_v: float
    worst_value: float


def check_channel_condition(
    r_g: float, gamma_t: int, gamma_v: Optional[int], gamma_c: Optional[int], p: float, grid_step: float = DEFAULT_GRID_STEP
) -> ChannelCondition:
    """Is the exponent negative on every grid point of (0, 1/2]?"""
    return condition_of(exponent_curves(r_g, gamma_t, gamma_v, gamma_c, p, grid_step)[-1])


def condition_of(curve: ExponentCurve) -> ChannelCondition:
    i = int(np.argmax(curve.values))
    worst = curve.values[i]
    return ChannelCondition(worst < 0, curve.grid[i], worst)


# ---------------------------------------------------------------------------
# Rate regions


@dataclass(frozen=True)
class RatePoint:
    x: float
    rate: float


def _envelope(xs: Sequence[float], ys: Sequence[float], upper: bool) -> list[float]:
    """Values of the lower (or upper) convex envelope at each x, via a monotone chain."""
    pts = sorted(zip(xs, ys))
    sign = -1.0 if upper else 1.0
    hull: list[tuple[float, float]] = []
    for x, y in pts:
        y = sign * y
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) <= 0:
                hull.pop()
            else:
                break
        if hull and hull[-1][0] == x:
            if y < hull[-1][1]:
                hull[-1] = (x, y)
            continue
        hull.append((x, y))
    vertex = {hx: hy for hx, hy in hull}
    hx = np.array([h[0] for h in hull])
    hy = np.array([h[1] for h in hull])
    out = []
    for x, _ in pts:
        val = vertex[x] if x in vertex else float(np.interp(x, hx, hy))
        out.append(sign * val)
    return out


def wz_raw_rate(D: float, p: float) -> float:
    return binary_entropy(bernoulli_convolve(D, p)) - binary_entropy(D)


def ie_raw_rate(w: float, p: float) -> float:
    return binary_entropy(w) - binary_entropy(p)


def _points(xs: Iterable[float], values: list[float], corner: tuple[float, float]) -> list[RatePoint]:
    merged = sorted(set(xs) | {corner[0]})
    return [RatePoint(x, max(0.0, r)) for x, r in zip(merged, values)]


def wz_rate_curve(p: float, grid: Iterable[float]) -> list[RatePoint]:
    """Lower convex envelope of h(D*p) - h(D) over the grid together with (p, 0)."""
    _check_prob("p", p, open_low=True, high=0.5)
    grid = sorted(set(float(d) for d in grid))
    for d in grid:
        _check_prob("D", d, open_low=True, high=0.5)
    raw = {d: wz_raw_rate(d, p) for d in grid}
    raw[p] = min(raw.get(p, 0.0), 0.0)
    xs = sorted(raw)
    return _points(grid, _envelope(xs, [raw[x] for x in xs], upper=False), (p, 0.0))


def ie_capacity_curve(p: float, grid: Iterable[float]) -> list[RatePoint]:
    """Upper convex envelope of h(w) - h(p) over the grid together with (0, 0)."""
    _check_prob("p", p, open_low=True, open_high=True, high=0.5)
    grid = sorted(set(float(w) for w in grid))
    for w in grid:
        _check_prob("w", w, high=0.5)
    raw = {w: ie_raw_rate(w, p) for w in grid}
    raw[0.0] = max(raw.get(0.0, 0.0), 0.0)
    xs = sorted(raw)
    return _points(grid, _envelope(xs, [raw[x] for x in xs], upper=True), (0.0, 0.0))


def write_curves_csv(fh: TextIO, curves: Iterable[ExponentCurve]) -> None:
    fh.write("v,value,label\n")
    for curve in curves:
        for v, val in zip(curve.grid, curve.values):
            fh.write(f"{v!r},{val!r},{curve.label}\n")
