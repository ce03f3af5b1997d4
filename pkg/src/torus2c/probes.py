"""Finite-horizon empirical probes: orbit coverage, Birkhoff averages,
deviation scans, and proximality witnesses.

Everything here is evidence, not proof. A coverage fraction of 1 at some
horizon says the orbit met every cell of a finite grid, nothing more; a
proximality witness certifies one concrete distance at one concrete time.
The qualitative statements these probes circle around are limit claims,
so callers (and the CLI JSON, via its evidence-only flag) must treat the
output as diagnostics.

Grid scans are written as chunked array sweeps. The reductions picking a
best starting point break ties toward the smaller x, so any partitioning
of the scan over workers would reproduce the same report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .funcspace import FlFunction, eval_lift
from .skew import SkewProduct, orbit_arrays, step
from .torus import CirclePoint, TorusPoint, circle_dist, reduce, torus_dist, wrap_abs

#: nodes for the fallback quadrature mean of a test function
QUAD_NODES = 1 << 16

_CHUNK = 1 << 17


def space_mean(g):
    """Mean of a periodic part over one period.

    Objects carrying their own mean (Fourier data: the zero mode;
    piecewise linear: exact trapezoid) are trusted; bare callables get a
    uniform composite rule on QUAD_NODES points, which for a 1-periodic
    integrand is the trapezoid rule.
    """
    m = getattr(g, "mean", None)
    if callable(m):
        return float(m())
    vals = np.asarray(g(np.arange(QUAD_NODES) / QUAD_NODES))
    mv = vals.mean()
    return complex(mv) if np.iscomplexobj(vals) else float(mv)


def _eval_periodic(g, t: np.ndarray):
    vals = g.eval(t) if hasattr(g, "eval") else g(np.mod(t, 1.0))
    return np.asarray(vals)


@dataclass(frozen=True)
class CoverageReport:
    """How much of a cells x cells grid an orbit segment visited."""

    cells: int
    horizon: int
    coverage_fraction: float
    first_hit: dict[tuple[int, int], int]


def minimality_probe(T: SkewProduct, start: TorusPoint, cells: int,
                     horizon: int) -> CoverageReport:
    """Mark the grid cell of each of the first `horizon` orbit points.

    first_hit maps (column, row) to the iterate index of the first visit;
    cells never visited are absent. Rerunning with a larger horizon can
    only add cells, never lose one.
    """
    if cells < 2:
        raise PreconditionError(f"need cells >= 2, got {cells}")
    if horizon < 1:
        raise PreconditionError(f"need horizon >= 1, got {horizon}")
    seen = np.full(cells * cells, -1, dtype=np.int64)
    x_cur, y_cur = start.x.value, start.y.value
    done = 0
    while done < horizon:
        m = min(_CHUNK, horizon - done)
        xs, ys = orbit_arrays(T, x_cur, y_cur, m)
        ci = np.minimum((xs * cells).astype(np.int64), cells - 1)
        cj = np.minimum((ys * cells).astype(np.int64), cells - 1)
        flat = ci * cells + cj
        uniq, first = np.unique(flat, return_index=True)
        fresh = seen[uniq] < 0
        seen[uniq[fresh]] = done + first[fresh]
        done += m
        if done < horizon:
            nxt = step(T, TorusPoint.of(xs[-1], ys[-1]))
            x_cur, y_cur = nxt.x.value, nxt.y.value
    hit = np.flatnonzero(seen >= 0)
    first_hit = {(int(c // cells), int(c % cells)): int(seen[c]) for c in hit}
    return CoverageReport(cells=cells, horizon=horizon,
                          coverage_fraction=hit.size / (cells * cells),
                          first_hit=first_hit)


def ergodic_average(g, alpha: float, x, n: int):
    """Deviation of the time average of g along the rotation from its mean.

    Returns (1/n) sum_{i<n} g(x + i alpha) minus the space mean. g is a
    periodic part or a plain callable on [0, 1); a complex-valued callable
    yields a complex deviation. Summation is chunked with an exact
    accumulation of the chunk totals, so the result is reproducible and
    stable out to n around 10^7.
    """
    if n < 1:
        raise PreconditionError(f"need n >= 1, got {n}")
    x = reduce(float(x))
    alpha = float(alpha)
    parts = []
    done = 0
    while done < n:
        m = min(_CHUNK, n - done)
        t = x + alpha * (done + np.arange(m, dtype=float))
        parts.append(complex(np.sum(_eval_periodic(g, np.mod(t, 1.0)))))
        done += m
    total = complex(math.fsum(p.real for p in parts),
                    math.fsum(p.imag for p in parts))
    dev = total / n - space_mean(g)
    return dev if dev.imag != 0.0 else dev.real


@dataclass(frozen=True)
class DeviationReport:
    """Extremes of the centered Birkhoff sums at one starting point."""

    x_star: CirclePoint
    horizon: int
    sup_dev: float
    inf_dev: float
    mean: float


def deviation_search(g: FlFunction, alpha: float, horizon: int,
                     grid: int) -> tuple[DeviationReport, DeviationReport]:
    """Scan uniform starting points for the tamest centered sums.

    For each of `grid` points x the centered sums f_n(x) - n * mean are
    formed for 1 <= n <= horizon. Returned are the point whose supremum
    over n is smallest and the point whose infimum is largest, ties going
    to the smaller x. Degree zero is required: any other degree makes the
    sums drift linearly and the scan meaningless.
    """
    if g.l != 0:
        raise PreconditionError(f"deviation scan needs degree 0, got l={g.l}")
    if horizon < 1:
        raise PreconditionError(f"need horizon >= 1, got {horizon}")
    if grid < 1:
        raise PreconditionError(f"need grid >= 1, got {grid}")
    mean = space_mean(g.periodic_part)
    alpha = float(alpha)
    xs = np.arange(grid) / grid
    center = mean * np.arange(1, horizon + 1, dtype=float)
    sup = np.empty(grid)
    inf = np.empty(grid)
    rows = max(1, (1 << 22) // max(1, horizon))
    for lo in range(0, grid, rows):
        blk = xs[lo:lo + rows, None] + alpha * np.arange(horizon)[None, :]
        dev = np.cumsum(_eval_periodic(g.periodic_part, blk), axis=1) - center
        sup[lo:lo + rows] = dev.max(axis=1)
        inf[lo:lo + rows] = dev.min(axis=1)
    iu = int(np.argmin(sup))
    il = int(np.argmax(inf))
    mk = lambda i: DeviationReport(x_star=CirclePoint(xs[i]), horizon=horizon,
                                   sup_dev=float(sup[i]), inf_dev=float(inf[i]),
                                   mean=float(mean))
    return mk(iu), mk(il)


@dataclass(frozen=True)
class QPairWitness:
    """One verified close encounter of two orbits, or the best near miss."""

    x: CirclePoint
    y1: CirclePoint
    y2: CirclePoint
    eps: float
    x_prime: CirclePoint
    x_zero: CirclePoint
    n_witness: int
    achieved: float


def _verified_distance(T: SkewProduct, x0: float, y1: float, xp: float,
                       y2: float, n: int) -> float:
    """Distance of the two n-th iterates by plain stepping, one map
    application at a time. This is the certificate path; it shares no
    accumulation with the search."""
    p = TorusPoint.of(x0, y1)
    q = TorusPoint.of(xp, y2)
    for _ in range(n):
        p = step(T, p)
        q = step(T, q)
    return torus_dist(p, q)


def qpair_witness(T: SkewProduct, x, y1, y2, eps: float, delta: float,
                  horizon: int, grid: int, x_second=None) -> QPairWitness:
    """Search for a time making two fibre points over x nearly collide.

    Candidate second points x' sit a half-width delta/2 above x; starting
    points x_0 are sampled on `grid` nodes across the delta-neighborhood.
    As n grows the fibre gap between x_0 and x' sweeps the circle, so the
    scan looks for a sign change of the wrapped gap between adjacent
    samples and closes in on the crossing by bisection. The returned
    distance is recomputed independently by stepping both orbits.

    With x_second given the pair is held fixed at ((x, y1), (x_second, y2))
    and only the time scan runs; the base gap then floors every distance.
    A result with achieved >= eps means the horizon was exhausted and
    carries the best time found.
    """
    if eps <= 0:
        raise PreconditionError(f"need eps > 0, got {eps}")
    if horizon < 0:
        raise PreconditionError(f"need horizon >= 0, got {horizon}")
    x = reduce(float(x))
    y1 = reduce(float(y1))
    y2 = reduce(float(y2))
    f, alpha = T.f, T.alpha

    if x_second is not None:
        x2 = reduce(float(x_second))
        bx = circle_dist(x, x2)
        gap = y1 - y2
        s1 = s2 = 0.0
        best, best_n = max(bx, wrap_abs(gap)), 0
        for n in range(1, horizon + 1):
            t = alpha * (n - 1)
            s1 += eval_lift(f, x + t)
            s2 += eval_lift(f, x2 + t)
            d = max(bx, wrap_abs(gap + s1 - s2))
            if d < best:
                best, best_n = d, n
        achieved = _verified_distance(T, x, y1, x2, y2, best_n)
        return QPairWitness(x=CirclePoint(x), y1=CirclePoint(y1),
                            y2=CirclePoint(y2), eps=eps,
                            x_prime=CirclePoint(x2), x_zero=CirclePoint(x),
                            n_witness=best_n, achieved=achieved)

    if not 0 < delta < eps:
        raise PreconditionError(f"need 0 < delta < eps, got delta={delta}")
    if grid < 2:
        raise PreconditionError(f"need grid >= 2, got {grid}")

    d0 = circle_dist(y1, y2)
    if d0 < eps:
        return QPairWitness(x=CirclePoint(x), y1=CirclePoint(y1),
                            y2=CirclePoint(y2), eps=eps,
                            x_prime=CirclePoint(x), x_zero=CirclePoint(x),
                            n_witness=0, achieved=d0)

    xp = x + delta / 2.0
    samp = np.linspace(x - delta / 2.0, xp, grid + 2)
    bx = wrap_abs(samp - xp)
    s_samp = np.zeros(grid + 2)
    s_xp = 0.0

    def lifted_gap(t: float, n: int) -> float:
        tt = t + alpha * np.arange(n, dtype=float)
        uu = xp + alpha * np.arange(n, dtype=float)
        return (y1 + float(np.sum(eval_lift(f, tt)))
                - y2 - float(np.sum(eval_lift(f, uu))))

    best = math.inf
    best_n = best_j = 0
    for n in range(horizon + 1):
        gap = (y1 + s_samp) - (y2 + s_xp)
        w = gap - np.round(gap)
        dists = np.maximum(bx, np.abs(w))
        j = int(np.argmin(dists))
        if dists[j] < best:
            best, best_n, best_j = float(dists[j]), n, j
        if n >= 1:
            # a genuine integer crossing needs the wrapped gap to change
            # sign around one shared nearest integer; a bare sign flip can
            # also come from the nearest integer itself changing
            rk = np.round(gap)
            straddle = np.flatnonzero((w[:-1] * w[1:] < 0)
                                      & (rk[:-1] == rk[1:]))
            hit = None
            if straddle.size:
                k = int(straddle[0])
                ta, tb = float(samp[k]), float(samp[k + 1])
                m_int = float(rk[k])
                ha = float(gap[k]) - m_int
                for _ in range(60):
                    tm = (ta + tb) / 2.0
                    hm = lifted_gap(tm, n) - m_int
                    if hm == 0.0:
                        ta = tb = tm
                        break
                    if (hm < 0) == (ha < 0):
                        ta, ha = tm, hm
                    else:
                        tb = tm
                hit = (ta + tb) / 2.0
            elif dists[j] < eps:
                hit = float(samp[j])
            if hit is not None:
                achieved = _verified_distance(T, reduce(hit), y1,
                                              reduce(xp), y2, n)
                if achieved < eps:
                    return QPairWitness(
                        x=CirclePoint(x), y1=CirclePoint(y1),
                        y2=CirclePoint(y2), eps=eps,
                        x_prime=CirclePoint(xp), x_zero=CirclePoint(hit),
                        n_witness=n, achieved=achieved)
        if n < horizon:
            t = alpha * n
            s_samp += eval_lift(f, samp + t)
            s_xp += float(eval_lift(f, xp + t))

    achieved = _verified_distance(T, reduce(float(samp[best_j])), y1,
                                  reduce(xp), y2, best_n)
    return QPairWitness(x=CirclePoint(x), y1=CirclePoint(y1),
                        y2=CirclePoint(y2), eps=eps,
                        x_prime=CirclePoint(xp),
                        x_zero=CirclePoint(float(samp[best_j])),
                        n_witness=best_n, achieved=achieved)
