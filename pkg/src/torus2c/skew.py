"""The skew product T(x, y) = (x + alpha, f(x) + y) on the two-torus.

The base coordinate rotates rigidly; the fiber coordinate accumulates values
of f along the base orbit. Two sum APIs coexist on purpose: ``birkhoff_lift``
returns the real-valued sum of lift values (it grows like n*l and carries the
growth information the separation arguments need), while ``orbit`` reduces
everything mod 1. Both run through one shared accumulation routine so that
the identity  orbit-y  ==  reduce(y + birkhoff_lift)  holds bit for bit, not
merely within tolerance.

Sums are accumulated in extended precision (80-bit on x86) and rounded to
double per prefix; for n up to 10^6 the accumulated error stays far below
every tolerance used downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .funcspace import FlFunction, eval_lift
from .torus import CirclePoint, TorusPoint, circle_dist, reduce, torus_dist, wrap_abs

_CHUNK = 1 << 15


@dataclass(frozen=True)
class SkewProduct:
    """Rotation number alpha (stored reduced mod 1) plus an FlFunction fiber map.

    ``rational_warning`` is set when alpha sits within 1e-12 of a fraction
    with denominator at most 1000; such systems have periodic base dynamics
    and most asymptotic statements about them degenerate. The flag warns, it
    does not reject: rational alpha is handy in tests.
    """

    alpha: float
    f: FlFunction
    rational_warning: bool = False

    def __post_init__(self):
        a = reduce(float(self.alpha))
        object.__setattr__(self, "alpha", a)
        q = np.arange(1, 1001, dtype=float)
        near = np.abs(a * q - np.round(a * q)) < 1e-12 * q
        object.__setattr__(self, "rational_warning", bool(np.any(near)))


def step(T: SkewProduct, p: TorusPoint) -> TorusPoint:
    x = p.x.value
    return TorusPoint.of(x + T.alpha, p.y.value + eval_lift(T.f, x))


def step_inverse(T: SkewProduct, p: TorusPoint) -> TorusPoint:
    """Inverse map (x, y) -> (x - alpha, y - f(x - alpha))."""
    xprev = reduce(p.x.value - T.alpha)
    return TorusPoint.of(xprev, p.y.value - eval_lift(T.f, xprev))


# === Birkhoff sums ===

def _lift_prefix(f: FlFunction, alpha: float, x: float, m: int) -> np.ndarray:
    """Prefix sums S_0 .. S_m of eval_lift(f, x + i*alpha), S_0 = 0, as float64."""
    out = np.empty(m + 1)
    out[0] = 0.0
    if m:
        t = x + alpha * np.arange(m, dtype=float)
        u = np.asarray(eval_lift(f, t), dtype=float)
        out[1:] = np.cumsum(u.astype(np.longdouble)).astype(float)
    return out


def birkhoff_lift(f: FlFunction, alpha: float, x: float, n: int) -> float:
    """Real-valued sum of the first n lift values along the rotation orbit of x.

    Not reduced mod 1: for degree l the value grows like n*l*x-wise increments,
    and callers rely on that growth.
    """
    if n < 1:
        raise PreconditionError(f"birkhoff_lift needs n >= 1, got {n}")
    return float(_lift_prefix(f, alpha, x, n)[n])


def birkhoff_prefix_mod1(f: FlFunction, alpha: float, x: float, n: int) -> np.ndarray:
    """S_0 .. S_{n-1} reduced mod 1, as float64 of length n.

    The reduction happens in extended precision before the final rounding, so
    the mod-1 residue keeps full double resolution even when the raw sums are
    large. Separation/spanning computations only ever need these residues.
    """
    if n < 1:
        raise PreconditionError(f"birkhoff_prefix_mod1 needs n >= 1, got {n}")
    out = np.empty(n)
    out[0] = 0.0
    if n > 1:
        t = x + alpha * np.arange(n - 1, dtype=float)
        u = np.asarray(eval_lift(f, t), dtype=float)
        c = np.cumsum(u.astype(np.longdouble))
        frac = (c - np.floor(c)).astype(float)
        out[1:] = np.where(frac >= 1.0, frac - 1.0, frac)
    return out


# === Orbits ===

def orbit_arrays(T: SkewProduct, x: float, y: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of p, Tp, ..., T^{n-1}p as two float arrays in [0,1)."""
    if n < 0:
        raise PreconditionError(f"orbit length must be >= 0, got {n}")
    if n == 0:
        return np.empty(0), np.empty(0)
    x = reduce(x)
    y = reduce(y)
    t = x + T.alpha * np.arange(n, dtype=float)
    xs = t - np.floor(t)
    yt = y + _lift_prefix(T.f, T.alpha, x, n - 1)
    ys = yt - np.floor(yt)
    return xs, ys


def orbit(T: SkewProduct, p: TorusPoint, n: int) -> list[TorusPoint]:
    """[p, Tp, ..., T^{n-1}p]; empty for n = 0."""
    xs, ys = orbit_arrays(T, p.x.value, p.y.value, n)
    return [TorusPoint(CirclePoint(a), CirclePoint(b)) for a, b in zip(xs, ys)]


def dn_dist(T: SkewProduct, p: TorusPoint, q: TorusPoint, n: int) -> float:
    """max over 0 <= i < n of the torus distance between i-th iterates.

    The base coordinates of both orbits shift by the same alpha, so the base
    term is constant in i; only the fiber gap evolves. Evaluated in chunks
    with an early exit once the running max hits the metric diameter 0.5.
    """
    if n < 1:
        raise PreconditionError(f"dn_dist needs n >= 1, got {n}")
    best = circle_dist(p.x, q.x)
    if best >= 0.5:
        return best
    dy0 = p.y.value - q.y.value
    x1, x2 = p.x.value, q.x.value
    carry1 = np.longdouble(0.0)
    carry2 = np.longdouble(0.0)
    for s in range(0, n, _CHUNK):
        m = min(_CHUNK, n - s)
        # fiber gap at steps s .. s+m-1 needs sums of the first s..s+m-1 terms
        i = np.arange(s, s + m, dtype=float)
        u1 = np.asarray(eval_lift(T.f, x1 + T.alpha * i), dtype=float)
        u2 = np.asarray(eval_lift(T.f, x2 + T.alpha * i), dtype=float)
        c1 = np.cumsum(u1.astype(np.longdouble))
        c2 = np.cumsum(u2.astype(np.longdouble))
        s1 = carry1 + np.concatenate([[np.longdouble(0.0)], c1[:-1]])
        s2 = carry2 + np.concatenate([[np.longdouble(0.0)], c2[:-1]])
        carry1 += c1[-1]
        carry2 += c2[-1]
        gap = wrap_abs(np.asarray(dy0 + (s1 - s2), dtype=float))
        best = max(best, float(np.max(gap)))
        if best >= 0.5:
            return best
    return best
