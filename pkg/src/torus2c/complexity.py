"""Separated and spanning sets for the skew product, with certified counts.

Machinery for the quantity r(n, eps): the fewest points whose d_n-balls of
radius eps cover the torus, squeezed between greedy separated sets (lower
witnesses) and an explicit partition construction (upper witnesses). The
analytic envelope

    n |l| / (3 (2 eps + eta(2 eps)))  <=  r(n, eps)  <=  20 (V+1) n / eps^2

is evaluated verbatim in ``bound_formulas``; everything else here produces
point sets whose counts land inside it, plus the audits that make those
counts trustworthy.

Coordinates: a lattice point (a, b) on a g x g grid is the torus point
(a/g, b/g). The d_n distance between two orbit starts decomposes as
max(base x-distance, max over k < n of wrap|dy + D_k|) with D_k the
difference of Birkhoff prefix sums; every scan below works through that
decomposition rather than stepping orbits pointwise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .funcspace import FlFunction, eval_lift, jordan, modulus, variation_refined
from .skew import SkewProduct
from .torus import TorusPoint, wrap_abs


def _prefix_rows(f: FlFunction, alpha: float, xs, n: int) -> np.ndarray:
    """S_k(x) for k = 0..n-1, one row per x. S_0 is identically zero."""
    xs = np.asarray(xs, dtype=float)
    out = np.zeros((xs.size, n))
    if n > 1:
        t = xs[:, None] + alpha * np.arange(n - 1)[None, :]
        out[:, 1:] = np.cumsum(eval_lift(f, t), axis=1)
    return out


def _pair_separation_ok(rows: np.ndarray, xs: np.ndarray, ys: np.ndarray,
                        eps: float):
    """Recheck pairwise d_n > eps directly from the prefix rows.

    Pairs further than eps apart in the base coordinate are separated by
    that alone, so only pairs inside an eps-wide x window get checked;
    of those, pairs already y-separated at iterate zero are skipped and
    the rest get the full iterate maximum. Returns (ok, offending index
    pair or None) with the pair in original index order.
    """
    m = len(xs)
    if m <= 1:
        return True, None
    order = np.argsort(xs, kind="stable")
    xo, yo, ro = xs[order], ys[order], rows[order]
    for i in range(m):
        hi = int(np.searchsorted(xo, xo[i] + eps, side="right"))
        # the wrap window holds low-x partners of a high-x point; each
        # seam pair is claimed once, by its high-x member
        lo = int(np.searchsorted(xo, xo[i] + eps - 1.0, side="right"))
        for s0, s1 in ((i + 1, hi), (0, lo)):
            if s1 <= s0:
                continue
            dy = yo[s0:s1] - yo[i]
            keep = np.flatnonzero(wrap_abs(dy) <= eps)
            if keep.size == 0:
                continue
            gaps = wrap_abs(dy[keep][:, None] + ro[s0 + keep] - ro[i])
            bad = np.flatnonzero(gaps.max(axis=1) <= eps)
            if bad.size:
                oi = int(order[i])
                oj = int(order[s0 + keep[bad[0]]])
                return False, (min(oi, oj), max(oi, oj))
    return True, None


def _near_earlier_rows(a: int, grid: int, w: int):
    """Scanned rows c < a within circular index distance w of row a."""
    for c in range(max(0, a - w), a):
        yield c
    # wrap: small c can sit within w of a large a around the seam
    hi = a - grid + w
    for c in range(0, min(hi + 1, max(0, a - w))):
        yield c


def greedy_separated(T: SkewProduct, n: int, eps: float, grid: int,
                     allow_coarse: bool = False):
    """Deterministic greedy (n, eps)-separated set on the grid x grid lattice.

    Scans rows of constant x ascending, then y ascending within the row,
    keeping a point iff its d_n distance to every kept point exceeds eps.
    Blocking against a kept row is the intersection of per-iterate circle
    arcs, computed exactly; a direct pairwise recheck then enforces the
    certificate, so the returned count always witnesses s(n, eps) >= count.
    """
    if n < 1:
        raise PreconditionError(f"need n >= 1, got {n}")
    if not 0 < eps < 1:
        raise PreconditionError(f"need 0 < eps < 1, got {eps}")
    if grid < 8:
        raise PreconditionError(f"need grid >= 8, got {grid}")
    if grid < 4 / eps and not allow_coarse:
        raise PreconditionError(
            f"grid {grid} too coarse for eps {eps}: the lattice cannot "
            "resolve eps-balls (pass allow_coarse to override)")

    f = T.f
    rows = _prefix_rows(f, T.alpha, np.arange(grid) / grid, n)
    w_rows = min(grid // 2, int(math.floor(eps * grid)))
    comp_len = 1.0 - 2.0 * eps
    v_steps = np.arange(grid) / grid

    kept_rows: list[list[int]] = [[] for _ in range(grid)]
    kept_order: list[tuple[int, int]] = []

    for a in range(grid):
        blocked = np.zeros(grid, dtype=bool)
        cs = [c for c in _near_earlier_rows(a, grid, w_rows)
              if kept_rows[c]]
        if cs and comp_len <= 0:
            # eps >= 1/2: no y-offset escapes a kept row this close
            blocked[:] = True
        elif cs:
            # a kept row blocks some y-offset only when its escape arcs
            # leave a circular gap of at least the complement length;
            # that needs the n Birkhoff differences to cluster, which
            # happens for a handful of base-adjacent rows at most
            sa = np.sort((eps - (rows[a][None, :] - rows[cs])) % 1.0,
                         axis=1)
            gaps = np.diff(np.concatenate([sa, sa[:, :1] + 1.0], axis=1),
                           axis=1)
            for i in np.flatnonzero(gaps.max(axis=1) >= comp_len):
                s2 = np.concatenate([sa[i], sa[i] + 1.0])
                cme = np.maximum.accumulate(s2 + comp_len)
                inside = np.zeros(grid, dtype=bool)
                for q in (v_steps, v_steps + 1.0):
                    j = np.searchsorted(s2, q, side="left") - 1
                    inside |= (j >= 0) & (cme[np.maximum(j, 0)] > q)
                bad = np.flatnonzero(~inside)
                if bad.size:
                    for d in kept_rows[cs[i]]:
                        blocked[(d + bad) % grid] = True

        row_kept: list[int] = []
        for b in np.flatnonzero(~blocked):
            b = int(b)
            ok = True
            for d in row_kept:
                dy = ((b - d) / grid) % 1.0
                if min(dy, 1.0 - dy) <= eps:
                    ok = False
                    break
            if ok:
                row_kept.append(b)
        kept_rows[a] = row_kept
        kept_order.extend((a, b) for b in row_kept)

    sel_x = np.array([a / grid for a, _ in kept_order])
    sel_y = np.array([b / grid for _, b in kept_order])
    sel_rows = (rows[[a for a, _ in kept_order]] if kept_order
                else np.zeros((0, n)))
    while kept_order:
        ok, pair = _pair_separation_ok(sel_rows, sel_x, sel_y, eps)
        if ok:
            break
        drop = pair[1]
        kept_order.pop(drop)
        sel_x = np.delete(sel_x, drop)
        sel_y = np.delete(sel_y, drop)
        sel_rows = np.delete(sel_rows, drop, axis=0)
    points = [TorusPoint.of(a / grid, b / grid) for a, b in kept_order]
    return len(points), points


def exhaustive_separated(T: SkewProduct, n: int, eps: float,
                         grid: int) -> int:
    """Exact maximum (n, eps)-separated subset of the lattice.

    Branch and bound over bitsets, exponential in the worst case; limited
    to grid <= 64 and n <= 3 where the instances stay tractable. For
    n = 1 the conflict graph is the strong product of two cycle powers,
    and the Lovasz-theta cap (g / alpha(complement))^2 often certifies
    the greedy witness without any search.
    """
    if grid > 64 or n > 3:
        raise PreconditionError(
            "exhaustive search is limited to grid <= 64 and n <= 3")
    if not 0 < eps < 1:
        raise PreconditionError(f"need 0 < eps < 1, got {eps}")
    rows = _prefix_rows(T.f, T.alpha, np.arange(grid) / grid, n)
    m = grid * grid
    pa, pb = np.divmod(np.arange(m), grid)
    px = pa / grid
    py = pb / grid
    nbytes = (m + 7) // 8 * 8
    compat: list[int] = []
    for i in range(m):
        bx = wrap_abs(px - px[i])
        gaps = wrap_abs((py - py[i])[:, None] + rows[pa] - rows[pa[i]])
        dn = np.maximum(bx, gaps.max(axis=1))
        bits = np.zeros(nbytes, dtype=bool)
        bits[:m] = dn > eps
        compat.append(int.from_bytes(np.packbits(bits[::-1]).tobytes(),
                                     "big"))

    # first-fit greedy seeds the bound; recursion only on the include
    # branch keeps the stack depth at the solution size
    avail = (1 << m) - 1
    best = 0
    while avail:
        v = (avail & -avail).bit_length() - 1
        best += 1
        avail &= compat[v]

    def bnb(candidates: int, size: int):
        nonlocal best
        while candidates:
            if size + candidates.bit_count() <= best:
                return
            v = (candidates & -candidates).bit_length() - 1
            bnb(candidates & compat[v], size + 1)
            candidates &= ~(1 << v)
        best = max(best, size)

    # lattice translations in y are d_n-isometries for every n, and for
    # n = 1 translations in x are too; so some maximum set contains a
    # point with b = 0 (n = 1: contains (0,0) itself), and the search
    # roots there instead of ranging over the whole lattice
    if n == 1:
        # conflict threshold in lattice steps, same comparison the metric
        # makes so no float fudge creeps in
        w = 0
        while w + 1 <= grid // 2 and (w + 1) / grid <= eps:
            w += 1
        # theta(C_g^w) = g / theta(complement) by vertex-transitivity, and
        # the (w+1)-window is independent in the complement, so
        # alpha <= theta^2 <= (g/(w+1))^2; greedy meeting that cap settles
        # the instance without search
        cap = (grid / min(grid, w + 1)) ** 2
        if best >= math.floor(cap + 1e-9):
            return best
        bnb(compat[0], 1)
    else:
        for a in range(grid):
            bnb(compat[a * grid], 1)
    return best


def separated_construct(T: SkewProduct, n: int, eps: float, grid: int):
    """Crossing-point separated set from the lifted Birkhoff sum.

    Walks the half-circle over which S_n climbs at least n|l|/2, emitting
    a point whenever |S_n| has moved eta + eps since the last emission.
    The walk refines the requested grid until quantization overshoot is a
    small fraction of the crossing threshold, keeping the count near
    climb/(eta+eps). Pairwise d_n > eps is verified before returning.
    """
    f = T.f
    if f.l == 0:
        raise PreconditionError("construction needs degree l != 0")
    if n < 1:
        raise PreconditionError(f"need n >= 1, got {n}")
    if not 0 < eps < 0.5:
        raise PreconditionError(f"need 0 < eps < 0.5, got {eps}")
    eta = modulus(f, eps, max(4096, 4 * math.ceil(1.0 / eps))).eta
    if 2 * eps + eta >= 1.0:
        raise PreconditionError("epsilon not small enough")
    thr = eta + eps
    alpha = T.alpha

    def s_n(x: float) -> float:
        return float(np.sum(eval_lift(f, x + alpha * np.arange(n))))

    # the lift moves n*l over a full turn, so one half carries >= n|l|/2
    first_half = abs(s_n(0.5) - s_n(0.0)) >= n * abs(f.l) / 2
    half = (0.0, 0.5) if first_half else (0.5, 1.0)

    walk = max(grid, math.ceil(16 * n * f.derivative_bound / thr))
    xs = half[0] + (half[1] - half[0]) * np.arange(walk + 1) / walk
    t = xs[:, None] + alpha * np.arange(n)[None, :]
    sn = eval_lift(f, t).sum(axis=1)

    # the start of the walk is only a reference; the counted set is the
    # crossing points themselves
    emitted: list[int] = []
    ref = sn[0]
    for i in range(1, walk + 1):
        if abs(sn[i] - ref) >= thr:
            first_crossing = i
            emitted.append(first_crossing)
            ref = sn[first_crossing]
    sel_x = xs[np.array(emitted, dtype=int)]

    rows = _prefix_rows(f, alpha, sel_x, n)
    ys = np.zeros(sel_x.size)
    while sel_x.size:
        ok, pair = _pair_separation_ok(rows, sel_x, ys, eps)
        if ok:
            break
        keep = np.arange(sel_x.size) != pair[1]
        sel_x = sel_x[keep]
        ys = ys[keep]
        rows = rows[keep]
    return int(sel_x.size), [float(v) for v in sel_x]


@dataclass(frozen=True)
class PartitionPlan:
    x_cuts: tuple[float, ...]
    y_cuts: tuple[float, ...]
    m: int  # uniform x-intervals
    r: int  # adaptive cuts added by the Birkhoff-increment rule
    p: int  # total x-intervals after the join
    q: int  # y-intervals


def spanning_construct(T: SkewProduct, n: int, eps: float, grid: int):
    """Partition-based (n, eps)-spanning set with an audited certificate.

    The x-axis gets a uniform partition of gap <= eps/2 joined with
    adaptive cuts placed where the combined Birkhoff growth G_n + H_n of
    the monotone halves g, h of the lift accumulates 4 eps/5. Any two
    points of a cell then drift apart by less than 4 eps/5 + eps/64 in
    every iterate (the slack term covers sampling), and crossing with a
    y-partition of gap < eps/3 leaves max drift + half y-gap < eps, so
    cell centers form a spanning set. ``verified`` reports whether every
    point of the 4x finer audit lattice sits within d_n <= eps of a
    center.
    """
    f = T.f
    if n < 1:
        raise PreconditionError(f"need n >= 1, got {n}")
    if not 0 < eps < 0.5:
        raise PreconditionError(f"need 0 < eps < 0.5, got {eps}")
    alpha = T.alpha

    m = math.ceil(2.0 / eps)
    delta1 = np.arange(m + 1) / m

    # sample G_n + H_n finely enough that the rise between samples is at
    # most eps/64; cutting at 4eps/5 then caps true cell drift under the
    # 5eps/6 the y-margin leaves, even though the walk only sees samples
    k_samples = min(1 << 22,
                    max(grid, math.ceil(64 * n * f.derivative_bound / eps)))
    jd = jordan(f, max(8192, min(k_samples, 1 << 20)))
    g_lift, h_lift = jd.interpolators()
    xs = np.arange(k_samples + 1) / k_samples
    wn = np.zeros(k_samples + 1)
    for j in range(n):
        t = xs + j * alpha  # unreduced: the monotone lift keeps W_n monotone
        wn += g_lift(t)
        wn += h_lift(t)

    thr_cut = 4.0 * eps / 5.0
    cuts = []
    w_ref = wn[0]
    for i in range(1, k_samples + 1):
        if wn[i] - w_ref >= thr_cut:
            cuts.append(xs[i])
            w_ref = wn[i]
    r = len(cuts)
    x_cuts = np.unique(np.concatenate([delta1, np.array(cuts)]))
    if x_cuts[-1] < 1.0:
        x_cuts = np.append(x_cuts, 1.0)
    p = x_cuts.size - 1

    q = math.floor(3.0 / eps) + 1
    y_cuts = np.arange(q + 1) / q

    x_centers = (x_cuts[:-1] + x_cuts[1:]) / 2
    y_centers = (y_cuts[:-1] + y_cuts[1:]) / 2
    plan = PartitionPlan(x_cuts=tuple(float(v) for v in x_cuts),
                         y_cuts=tuple(float(v) for v in y_cuts),
                         m=m, r=r, p=int(p), q=int(q))
    verified = _audit_spanning(f, alpha, n, eps, grid, x_cuts, x_centers,
                               y_centers)
    return int(p * q), plan, verified


def _audit_spanning(f, alpha, n, eps, grid, x_cuts, x_centers,
                    y_centers) -> bool:
    """Certify the 4x finer lattice is covered within d_n <= eps.

    Fast path per audit column: when the column's orbit drift against its
    cell center plus the worst y-offset fits under eps, every lattice
    point in the column is covered by the nearest center in y. Columns
    that miss the margin get the exact per-point check.
    """
    audit = 4 * grid
    ax = np.arange(audit) / audit
    cell = np.clip(np.searchsorted(x_cuts, ax, side="right") - 1, 0,
                   x_centers.size - 1)
    cx = x_centers[cell]
    if np.any(wrap_abs(ax - cx) > eps):
        return False

    y_half = 1.0 / (2 * y_centers.size)
    drift = np.zeros(audit)
    acc = np.zeros(audit)
    for k in range(1, n):
        s = k - 1
        acc += eval_lift(f, ax + s * alpha) - eval_lift(f, cx + s * alpha)
        np.maximum(drift, np.abs(acc - np.round(acc)), out=drift)
    easy = drift + y_half <= eps
    if easy.all():
        return True

    ay = np.arange(audit) / audit
    for i in np.flatnonzero(~easy):
        d_k = np.zeros(n)
        acc_s = 0.0
        for k in range(1, n):
            s = k - 1
            acc_s += float(eval_lift(f, float(ax[i]) + s * alpha)
                           - eval_lift(f, float(cx[i]) + s * alpha))
            d_k[k] = acc_s
        covered = np.zeros(audit, dtype=bool)
        for yc in y_centers:
            gaps = wrap_abs((ay - yc)[:, None] + d_k[None, :])
            covered |= gaps.max(axis=1) <= eps
            if covered.all():
                break
        if not covered.all():
            bad = int(np.flatnonzero(~covered)[0])
            warnings.warn(
                f"spanning audit failed at ({float(ax[i]):.6f}, "
                f"{float(ay[bad]):.6f}); grid too coarse for this eps")
            return False
    return True


def bound_formulas(f: FlFunction, n: int, eps: float, grid: int = 1 << 16):
    """The analytic sandwich constants, evaluated verbatim.

    Returns (bound_lower, bound_upper, c1, c2) with
    bound_lower = n|l|/(3(2eps + eta(2eps))) and
    bound_upper = 20(V+1)n/eps^2. The modulus estimate enters with no
    safety factor: eta sits in a denominator, so overestimating it only
    weakens the reported lower bound, never falsifies it.
    """
    if eps <= 0:
        raise PreconditionError(f"need eps > 0, got {eps}")
    if n < 0:
        raise PreconditionError(f"need n >= 0, got {n}")
    two_eps = min(1.0, 2.0 * eps)
    eta2 = modulus(f, two_eps,
                   max(grid, 4 * math.ceil(1.0 / two_eps))).eta
    v_total, _ = variation_refined(f)
    c1 = abs(f.l) / (3.0 * (2.0 * eps + eta2))
    c2 = 20.0 * (v_total + 1.0) / (eps * eps)
    return n * c1, n * c2, c1, c2


def growth_fit(series):
    """Least-squares line through (n, count) pairs.

    Returns (slope, intercept, r_squared); an exact fit, including the
    all-equal degenerate case, reports r_squared = 1.
    """
    pts = list(series)
    ns = np.array([float(a) for a, _ in pts])
    cs = np.array([float(b) for _, b in pts])
    if np.unique(ns).size < 3:
        raise PreconditionError("growth fit needs at least 3 distinct n")
    slope, intercept = np.polyfit(ns, cs, 1)
    pred = slope * ns + intercept
    ss_res = float(np.sum((cs - pred) ** 2))
    ss_tot = float(np.sum((cs - cs.mean()) ** 2))
    if ss_res < 1e-12 * max(1.0, float(np.sum(cs ** 2))):
        r2 = 1.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


def eps_star(f: FlFunction) -> float:
    """Largest eps <= 1 where the construction count provably fits under
    20(V+1)n/eps^2, from the cut-count arithmetic at n = 1 (the worst
    case: the terms linear in n dominate both sides for larger n)."""
    v_total, _ = variation_refined(f)
    best = 0.0
    for e in np.linspace(0.005, 1.0, 200):
        p_max = 2.0 / e + 5.0 * v_total / (4.0 * e) + 2.0
        q_max = 3.0 / e + 1.0
        if p_max * q_max <= 20.0 * (v_total + 1.0) / (e * e):
            best = float(e)
    return best


@dataclass(frozen=True)
class ComplexityReport:
    n: int
    eps: float
    sep_greedy: int
    sep_construct: int
    span_construct: int
    bound_lower: float  # n|l| / (3 (eps + eta(eps))), the separated-set form
    bound_upper: float
    eta: float
    variation: float


def complexity_report(T: SkewProduct, n: int, eps: float,
                      grid: int = 1024) -> ComplexityReport:
    """Run the three constructions at one (n, eps) and bundle the bounds.

    The report's lower bound uses the separated-set denominator
    eps + eta(eps); ``bound_formulas`` carries the doubled-eps variant
    that brackets r(n, eps) itself.
    """
    sep_g, _ = greedy_separated(T, n, eps, grid)
    sep_c, _ = separated_construct(T, n, eps, grid)
    span_c, _, _ = spanning_construct(T, n, eps, grid)
    f = T.f
    eta = modulus(f, eps, max(4096, 4 * math.ceil(1.0 / eps))).eta
    v_total, _ = variation_refined(f)
    lower = n * abs(f.l) / (3.0 * (eps + eta))
    upper = 20.0 * (v_total + 1.0) * n / (eps * eps)
    return ComplexityReport(n=n, eps=eps, sep_greedy=sep_g,
                            sep_construct=sep_c, span_construct=span_c,
                            bound_lower=lower, bound_upper=upper,
                            eta=eta, variation=v_total)


CSV_HEADER = ("n,eps,sep_greedy,sep_construct,span_construct,"
              "bound_lower,bound_upper,eta_eps,variation")


def write_report_csv(reports, fh) -> None:
    """One CSV row per report; floats carry 6 significant digits."""
    fh.write(CSV_HEADER + "\n")
    for rep in reports:
        row = [str(rep.n), f"{rep.eps:.6g}", str(rep.sep_greedy),
               str(rep.sep_construct), str(rep.span_construct),
               f"{rep.bound_lower:.6g}", f"{rep.bound_upper:.6g}",
               f"{rep.eta:.6g}", f"{rep.variation:.6g}"]
        fh.write(",".join(row) + "\n")
