"""Circle functions with an integer winding degree and their roughness data.

A function here is f(x) = l*x + p(x) with integer degree l and p continuous
and 1-periodic, so f(x + 1) - f(x) = l for every real x. The periodic part is
one of two representations:

  * ``FourierSeries``: finitely many positive frequencies n with complex
    coefficients c_n, evaluated as sum of 2*Re(c_n * e^{2 pi i n x}), i.e.
    2*(re*cos(2 pi n x) - im*sin(2 pi n x)). Storing positive frequencies
    only keeps the series real without carrying redundant conjugate terms.
  * ``PiecewiseLinear``: knots (x_i, y_i) with x_i strictly increasing in
    [0, 1); the last segment wraps around to (x_0 + 1, y_0).

Variation, modulus of continuity, and the monotone decomposition are grid
approximants. The grid variation is a lower approximant that is nondecreasing
under grid refinement; ``variation_refined`` doubles the grid until the
relative change falls below a tolerance.

File format (see ``function_to_json`` / ``function_from_json``):

    {"l": 1, "periodic": {"type": "fourier",
                          "terms": [{"n": 2, "re": 0.1, "im": -0.3}]}}
    {"l": 0, "periodic": {"type": "piecewise_linear",
                          "knots": [[0.0, 0.0], [0.5, 1.0]]}}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FourierSeries:
    """Finite Fourier data on positive frequencies, evaluated conjugate-symmetrically."""

    terms: tuple[tuple[int, complex], ...]

    def __post_init__(self):
        norm = []
        seen = set()
        for n, c in self.terms:
            if int(n) != n or n <= 0:
                raise PreconditionError(f"frequencies must be positive integers, got {n!r}")
            n = int(n)
            if n in seen:
                raise PreconditionError(f"duplicate frequency {n}")
            seen.add(n)
            c = complex(c)
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise PreconditionError(f"non-finite coefficient at frequency {n}")
            norm.append((n, c))
        norm.sort(key=lambda t: t[0])
        object.__setattr__(self, "terms", tuple(norm))

    def eval(self, x):
        """Evaluate at x (scalar or array); x is reduced mod 1 internally."""
        xs = np.asarray(x, dtype=float)
        out = np.zeros(xs.shape if xs.ndim else (), dtype=float)
        xr = np.mod(xs, 1.0)
        for n, c in self.terms:
            # float(n) first: n can exceed the int64 range (lacunary spectra),
            # and the phase is kept in [0,1) before the trig call
            ang = TWO_PI * np.mod(float(n) * xr, 1.0)
            out = out + 2.0 * (c.real * np.cos(ang) - c.imag * np.sin(ang))
        return float(out) if out.ndim == 0 else out

    def derivative_sup(self) -> float:
        """Analytic bound on sup|p'|: sum of 4*pi*n*|c_n|."""
        return sum(2.0 * TWO_PI * n * abs(c) for n, c in self.terms)

    def mean(self) -> float:
        """Zero mode; identically 0 since no constant term is stored."""
        return 0.0


@dataclass(frozen=True)
class PiecewiseLinear:
    """1-periodic interpolant of knots in [0, 1); wraps back to the first knot."""

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ks = tuple((float(a), float(b)) for a, b in self.knots)
        if len(ks) < 1:
            raise PreconditionError("piecewise linear part needs at least one knot")
        xs = [a for a, _ in ks]
        if any(not (0.0 <= a < 1.0) for a in xs):
            raise PreconditionError("knot positions must lie in [0, 1)")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise PreconditionError("knot positions must be strictly increasing")
        object.__setattr__(self, "knots", ks)

    def _extended(self):
        xs = np.array([a for a, _ in self.knots])
        ys = np.array([b for _, b in self.knots])
        return np.append(xs, xs[0] + 1.0), np.append(ys, ys[0])

    def eval(self, x):
        xs_e, ys_e = self._extended()
        t = np.asarray(x, dtype=float)
        # shift into the covered window [x_0, x_0 + 1)
        tt = np.mod(t - xs_e[0], 1.0) + xs_e[0]
        out = np.interp(tt, xs_e, ys_e)
        return float(out) if out.ndim == 0 else out

    def derivative_sup(self) -> float:
        xs_e, ys_e = self._extended()
        if len(xs_e) < 2:
            return 0.0
        slopes = np.diff(ys_e) / np.diff(xs_e)
        return float(np.max(np.abs(slopes)))

    def segment_slopes(self) -> np.ndarray:
        xs_e, ys_e = self._extended()
        if len(xs_e) < 2:
            return np.zeros(0)
        return np.diff(ys_e) / np.diff(xs_e)

    def mean(self) -> float:
        """Exact trapezoid mean over one period."""
        xs_e, ys_e = self._extended()
        if len(xs_e) < 2:
            return float(ys_e[0])
        return float(np.sum(np.diff(xs_e) * (ys_e[:-1] + ys_e[1:]) / 2.0))


PeriodicPart = FourierSeries | PiecewiseLinear

#: the everywhere-zero periodic part
ZERO_PERIODIC = FourierSeries(())


@dataclass(frozen=True)
class FlFunction:
    """f(x) = l*x + periodic_part(x) with f(x+1) - f(x) = l.

    ``derivative_bound`` is sup|f'|; filled in automatically (analytically for
    Fourier data, from segment slopes for piecewise-linear data) unless the
    caller supplies a value.
    """

    l: int
    periodic_part: PeriodicPart
    derivative_bound: float | None = None

    def __post_init__(self):
        if int(self.l) != self.l:
            raise PreconditionError(f"degree must be an integer, got {self.l!r}")
        object.__setattr__(self, "l", int(self.l))
        if self.derivative_bound is None:
            if isinstance(self.periodic_part, FourierSeries):
                b = abs(self.l) + self.periodic_part.derivative_sup()
            else:
                slopes = self.periodic_part.segment_slopes()
                b = float(np.max(np.abs(self.l + slopes))) if len(slopes) else float(abs(self.l))
            object.__setattr__(self, "derivative_bound", b)
        elif self.derivative_bound < 0:
            raise PreconditionError("derivative_bound must be nonnegative")


def eval_lift(f: FlFunction, x):
    """Evaluate the lift f(x) = l*x + p(x) at real x (scalar or array)."""
    xs = np.asarray(x, dtype=float)
    out = f.l * xs + f.periodic_part.eval(xs)
    return float(out) if out.ndim == 0 else out


def variation(f: FlFunction, grid_size: int) -> float:
    """Grid approximant of the total variation of the lift over [0, 1].

    A lower approximant: refining the grid can only increase it (when the
    finer grid contains the coarse one, e.g. doubling).
    """
    if grid_size < 2:
        raise PreconditionError(f"variation needs grid_size >= 2, got {grid_size}")
    xs = np.arange(grid_size + 1) / grid_size
    vals = eval_lift(f, xs)
    return float(np.sum(np.abs(np.diff(vals))))


def variation_refined(f: FlFunction, start_grid: int = 4096,
                      rel_tol: float = 1e-3, max_grid: int = 1 << 20) -> tuple[float, int]:
    """Double the grid until the variation estimate moves by less than rel_tol.

    Returns (value, grid used). Hits max_grid at worst.
    """
    g = start_grid
    v = variation(f, g)
    while 2 * g <= max_grid:
        v2 = variation(f, 2 * g)
        g *= 2
        if abs(v2 - v) <= rel_tol * max(abs(v2), 1e-12):
            return v2, g
        v = v2
    return v, g


@dataclass(frozen=True)
class ModulusEstimate:
    """Grid estimate of eta(eps) = sup{|f(x)-f(y)| : |x-y| <= eps}."""

    eps: float
    eta: float
    grid_size: int
    refined: bool


def modulus(f: FlFunction, eps: float, grid_size: int) -> ModulusEstimate:
    """Estimate the modulus of continuity of the lift at scale eps.

    Samples the lift on [0, 2] at spacing 1/grid_size and takes the largest
    (max - min) over windows of width eps; by periodicity of increments this
    covers every pair |x - y| <= eps. ``refined`` reports whether halving the
    grid changes the answer by less than 0.1%.
    """
    if not (0.0 < eps <= 1.0):
        raise PreconditionError(f"modulus needs 0 < eps <= 1, got {eps}")
    if grid_size < math.ceil(4.0 / eps):
        raise PreconditionError(
            f"modulus grid_size {grid_size} too coarse for eps={eps}; need >= {math.ceil(4.0 / eps)}")

    def estimate(g: int) -> float:
        xs = np.arange(2 * g + 1) / g
        vals = eval_lift(f, xs)
        w = int(math.floor(eps * g))
        if w < 1:
            return 0.0
        windows = np.lib.stride_tricks.sliding_window_view(vals, w + 1)
        return float(np.max(windows.max(axis=1) - windows.min(axis=1)))

    eta = estimate(grid_size)
    eta_coarse = estimate(max(grid_size // 2, math.ceil(4.0 / eps)))
    refined = abs(eta - eta_coarse) <= 1e-3 * max(eta, 1e-12)
    return ModulusEstimate(eps=eps, eta=eta, grid_size=grid_size, refined=refined)


@dataclass(frozen=True, eq=False)
class JordanDecomposition:
    """Samples of the monotone split f = g - h on a uniform grid of [0, 1].

    g = (V + f)/2 and h = (V - f)/2 where V is the cumulative grid variation,
    so both are nondecreasing on the grid by construction. M = (V(1) + l)/2
    is the common period increment of g; h increases by M - l.
    """

    xs: np.ndarray
    g: np.ndarray
    h: np.ndarray
    M: float
    grid_size: int

    @property
    def variation(self) -> float:
        return float(self.g[-1] - self.g[0] + self.h[-1] - self.h[0])

    def interpolators(self):
        """Periodic-increment evaluators for g and h at arbitrary real x."""
        return _MonotoneLift(self.g), _MonotoneLift(self.h)


class _MonotoneLift:
    """Linear interpolant of uniform samples on [0,1], extended by s(x+1) = s(x) + s(1) - s(0)."""

    def __init__(self, samples: np.ndarray):
        self.samples = samples
        self.grid = len(samples) - 1
        self.inc = float(samples[-1] - samples[0])

    def __call__(self, x):
        t = np.asarray(x, dtype=float)
        k = np.floor(t)
        u = (t - k) * self.grid
        i0 = np.minimum(u.astype(int), self.grid - 1)
        w = u - i0
        vals = self.samples[i0] * (1.0 - w) + self.samples[i0 + 1] * w + k * self.inc
        return float(vals) if vals.ndim == 0 else vals


def jordan(f: FlFunction, grid_size: int) -> JordanDecomposition:
    """Monotone split of the lift from cumulative grid variation."""
    if grid_size < 2:
        raise PreconditionError(f"jordan needs grid_size >= 2, got {grid_size}")
    xs = np.arange(grid_size + 1) / grid_size
    vals = eval_lift(f, xs)
    cumvar = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(vals)))])
    g = (cumvar + vals) / 2.0
    h = (cumvar - vals) / 2.0
    M = (cumvar[-1] + f.l) / 2.0
    return JordanDecomposition(xs=xs, g=g, h=h, M=M, grid_size=grid_size)


# === serialization ===

def function_to_json(f: FlFunction) -> dict:
    if isinstance(f.periodic_part, FourierSeries):
        periodic = {
            "type": "fourier",
            "terms": [{"n": n, "re": c.real, "im": c.imag} for n, c in f.periodic_part.terms],
        }
    else:
        periodic = {
            "type": "piecewise_linear",
            "knots": [[a, b] for a, b in f.periodic_part.knots],
        }
    return {"l": f.l, "periodic": periodic}


def function_from_json(obj: dict) -> FlFunction:
    try:
        l = obj["l"]
        periodic = obj["periodic"]
        kind = periodic["type"]
    except (KeyError, TypeError) as exc:
        raise PreconditionError(f"malformed function object: missing {exc}") from exc
    if not isinstance(l, int) or isinstance(l, bool):
        raise PreconditionError(f"degree l must be an integer, got {l!r}")
    if kind == "fourier":
        try:
            terms = tuple((t["n"], complex(t["re"], t["im"])) for t in periodic["terms"])
        except (KeyError, TypeError) as exc:
            raise PreconditionError(f"malformed fourier terms: {exc}") from exc
        part: PeriodicPart = FourierSeries(terms)
    elif kind == "piecewise_linear":
        try:
            knots = tuple((k[0], k[1]) for k in periodic["knots"])
        except (TypeError, IndexError) as exc:
            raise PreconditionError(f"malformed knots: {exc}") from exc
        part = PiecewiseLinear(knots)
    else:
        raise PreconditionError(f"unknown periodic type {kind!r}")
    return FlFunction(l=l, periodic_part=part)


def save_function(f: FlFunction, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(function_to_json(f), fh, indent=2)
        fh.write("\n")


def load_function(path: str) -> FlFunction:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise PreconditionError(f"not valid JSON: {exc}") from exc
    return function_from_json(obj)
