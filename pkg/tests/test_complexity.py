import io

import numpy as np
import pytest

from torus2c import (
    CSV_HEADER,
    ComplexityReport,
    FlFunction,
    FourierSeries,
    PreconditionError,
    SkewProduct,
    TorusPoint,
    ZERO_PERIODIC,
    bound_formulas,
    complexity_report,
    dn_dist,
    eps_star,
    exhaustive_separated,
    greedy_separated,
    growth_fit,
    separated_construct,
    spanning_construct,
    write_report_csv,
)
from torus2c.complexity import _prefix_rows

LINEAR = FlFunction(l=1, periodic_part=ZERO_PERIODIC)
WAVY = FlFunction(l=1, periodic_part=FourierSeries(((1, 0.05 - 0.02j), (3, 0.01 + 0.03j))))
GOLDEN = 0.6180339887498949
T_LIN = SkewProduct(alpha=GOLDEN, f=LINEAR)
T_WAVY = SkewProduct(alpha=GOLDEN, f=WAVY)


def scan_reference(T, n, eps, grid):
    """First-fit scan in lattice order, separation checked pairwise."""
    kept = []
    for a in range(grid):
        for b in range(grid):
            p = TorusPoint.of(a / grid, b / grid)
            if all(dn_dist(T, p, q, n) > eps for q in kept):
                kept.append(p)
    return len(kept), kept


def test_greedy_single_point_when_eps_huge():
    count, pts = greedy_separated(T_LIN, 1, 0.6, 64)
    assert count == 1
    assert pts[0].as_tuple() == (0.0, 0.0)


def test_greedy_fills_lattice_when_eps_tiny():
    count, _ = greedy_separated(T_LIN, 1, 0.01, 8, allow_coarse=True)
    assert count == 64


@pytest.mark.parametrize("T, n, eps, grid", [
    (T_LIN, 1, 0.3, 16),
    (T_LIN, 3, 0.17, 16),
    (T_WAVY, 2, 0.3, 16),
])
def test_greedy_matches_reference_scan(T, n, eps, grid):
    # the arc-blocking path must reproduce the plain pairwise scan
    # point for point, not just in count
    count, pts = greedy_separated(T, n, eps, grid, allow_coarse=True)
    ref_count, ref_pts = scan_reference(T, n, eps, grid)
    assert count == ref_count
    assert [p.as_tuple() for p in pts] == [p.as_tuple() for p in ref_pts]


@pytest.mark.parametrize("T, n, eps, grid, expect", [
    (T_LIN, 2, 0.3, 16, 9),
    (T_LIN, 2, 0.25, 16, 9),      # blocking arcs touch lattice points exactly
    (T_WAVY, 3, 0.21, 24, 28),
    (T_WAVY, 1, 0.45, 16, 4),
    (T_LIN, 25, 0.1, 1024, 2082),
])
def test_greedy_frozen_counts(T, n, eps, grid, expect):
    count, _ = greedy_separated(T, n, eps, grid, allow_coarse=True)
    assert count == expect


def test_greedy_points_are_separated():
    """Every returned point pair is a genuine witness under dn_dist."""
    count, pts = greedy_separated(T_WAVY, 3, 0.21, 24, allow_coarse=True)
    assert count == len(pts)
    for i in range(count):
        for j in range(i + 1, count):
            assert dn_dist(T_WAVY, pts[i], pts[j], 3) > 0.21


def test_greedy_preconditions():
    with pytest.raises(PreconditionError):
        greedy_separated(T_LIN, 0, 0.3, 64)
    with pytest.raises(PreconditionError):
        greedy_separated(T_LIN, 1, 0.0, 64)
    with pytest.raises(PreconditionError):
        greedy_separated(T_LIN, 1, 1.0, 64)
    with pytest.raises(PreconditionError):
        greedy_separated(T_LIN, 1, 0.3, 4)
    with pytest.raises(PreconditionError, match="too coarse"):
        greedy_separated(T_LIN, 1, 0.01, 8)
    # the override admits the coarse lattice
    greedy_separated(T_LIN, 1, 0.01, 8, allow_coarse=True)


@pytest.mark.parametrize("T, n, eps, grid, expect_exact, expect_greedy", [
    (T_LIN, 2, 0.3, 8, 8, 7),
    (T_LIN, 3, 0.3, 8, 10, 10),
    (T_LIN, 2, 0.35, 12, 7, 4),
    (T_LIN, 3, 0.4, 12, 9, 8),
    (T_LIN, 2, 0.4, 16, 4, 4),
    (T_WAVY, 2, 0.3, 8, 8, 7),
    (T_WAVY, 3, 0.3, 8, 11, 10),
    (T_WAVY, 2, 0.35, 12, 7, 6),
    (T_WAVY, 3, 0.4, 12, 8, 8),
    (T_WAVY, 2, 0.4, 16, 6, 6),
])
def test_exhaustive_frozen_values(T, n, eps, grid, expect_exact, expect_greedy):
    exact = exhaustive_separated(T, n, eps, grid)
    count, _ = greedy_separated(T, n, eps, grid, allow_coarse=True)
    assert exact == expect_exact
    assert count == expect_greedy
    assert count <= exact


def test_exhaustive_at_full_grid():
    assert exhaustive_separated(T_LIN, 1, 0.45, 64) == 4
    assert exhaustive_separated(T_WAVY, 1, 0.45, 64) == 4


def test_exhaustive_can_beat_the_scan():
    # the scan order is not optimal for this instance; the exact search
    # finds a strictly larger configuration
    exact = exhaustive_separated(T_WAVY, 3, 0.49, 64)
    count, _ = greedy_separated(T_WAVY, 3, 0.49, 64)
    assert exact == 6
    assert count == 4


def test_exhaustive_limits():
    with pytest.raises(PreconditionError, match="limited"):
        exhaustive_separated(T_LIN, 4, 0.4, 16)
    with pytest.raises(PreconditionError, match="limited"):
        exhaustive_separated(T_LIN, 1, 0.4, 128)


def test_separated_construct_two_crossings():
    count, xs = separated_construct(T_LIN, 1, 0.1, 1024)
    assert count == 2
    assert xs == pytest.approx([0.2002, 0.40039], abs=1e-3)


def test_separated_construct_meets_linear_lower_bound():
    count, _ = separated_construct(T_LIN, 60, 0.1, 1024)
    assert count == 145
    assert count >= 60 / (6 * 0.1) - 1
    count25, _ = separated_construct(T_LIN, 25, 0.05, 1024)
    assert count25 >= 25 / (6 * 0.05) - 1


def test_separated_construct_points_are_separated():
    n, eps = 60, 0.1
    _, xs = separated_construct(T_LIN, n, eps, 1024)
    pts = [TorusPoint.of(x, 0.0) for x in xs]
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            assert dn_dist(T_LIN, pts[i], pts[j], n) > eps


def test_separated_construct_guards():
    with pytest.raises(PreconditionError, match="epsilon not small enough"):
        separated_construct(T_LIN, 1, 0.45, 256)
    flat = SkewProduct(alpha=GOLDEN, f=FlFunction(l=0, periodic_part=ZERO_PERIODIC))
    with pytest.raises(PreconditionError, match="degree"):
        separated_construct(flat, 5, 0.1, 256)


def test_spanning_small_example():
    count, plan, verified = spanning_construct(T_LIN, 1, 0.4, 64)
    assert count == 64
    assert verified
    assert (plan.p, plan.q) == (8, 8)
    assert count == plan.p * plan.q
    assert len(plan.x_cuts) == plan.p + 1
    assert len(plan.y_cuts) == plan.q + 1
    # cell edges: base cells at most eps/2 wide, fibre cells under eps/3
    assert np.diff(plan.x_cuts).max() <= 0.4 / 2 + 1e-12
    assert np.diff(plan.y_cuts).max() < 0.4 / 3


def test_spanning_cell_budget():
    count, plan, verified = spanning_construct(T_LIN, 1, 0.49, 64)
    assert verified
    assert plan.p == 7
    assert plan.p <= 16


def test_spanning_at_scale():
    count, plan, verified = spanning_construct(T_LIN, 100, 0.1, 1024)
    assert count == 38719
    assert verified
    assert count <= 40000


def test_constructions_sandwich():
    g, _ = greedy_separated(T_LIN, 25, 0.1, 256)
    s, _, verified = spanning_construct(T_LIN, 25, 0.05, 256)
    assert g == 1970
    assert s == 39772
    assert verified
    assert g <= s


def test_bound_formulas_examples():
    lower, upper, c1, c2 = bound_formulas(LINEAR, 100, 0.1)
    assert lower == pytest.approx(83.334, rel=1e-3)
    assert upper == pytest.approx(400000.0, rel=1e-9)
    assert lower == pytest.approx(100 * c1)
    assert upper == pytest.approx(100 * c2)


def test_bound_formulas_degenerate_n():
    lower, upper, _, _ = bound_formulas(LINEAR, 0, 0.1)
    assert lower == 0.0
    assert upper == 0.0


def test_bound_lower_rate_grows_as_eps_shrinks():
    _, _, c1_fine, _ = bound_formulas(LINEAR, 1, 0.01)
    _, _, c1_coarse, _ = bound_formulas(LINEAR, 1, 0.1)
    assert c1_fine > c1_coarse
    assert c1_fine / c1_coarse == pytest.approx(10.002671, rel=1e-4)


def test_growth_fit_exact_line():
    slope, intercept, r2 = growth_fit([(10, 30), (20, 60), (30, 90)])
    assert slope == pytest.approx(3.0)
    assert intercept == pytest.approx(0.0, abs=1e-9)
    assert r2 == 1.0


def test_growth_fit_flat_series():
    slope, intercept, r2 = growth_fit([(10, 5), (20, 5), (30, 5)])
    assert slope == pytest.approx(0.0, abs=1e-12)
    assert intercept == pytest.approx(5.0)
    assert r2 == 1.0


def test_growth_fit_needs_three_points():
    with pytest.raises(PreconditionError, match="3 distinct"):
        growth_fit([(10, 30), (20, 60)])


def test_eps_star_linear_function():
    assert eps_star(LINEAR) == pytest.approx(1.0)


def test_prefix_rows_agree_with_iterated_distance():
    """The decomposed distance equals dn_dist on arbitrary pairs."""
    rng = np.random.default_rng(7)
    n = 9
    for T in (T_LIN, T_WAVY):
        xs = rng.uniform(0, 1, 6)
        ys = rng.uniform(0, 1, 6)
        rows = _prefix_rows(T.f, T.alpha, xs, n)
        for i in range(6):
            for j in range(i + 1, 6):
                bx = abs(xs[i] - xs[j])
                bx = min(bx, 1 - bx)
                dy = ys[i] - ys[j]
                gaps = dy + rows[i] - rows[j]
                gaps = np.abs(gaps - np.round(gaps))
                want = max(bx, gaps.max())
                got = dn_dist(T, TorusPoint.of(xs[i], ys[i]),
                              TorusPoint.of(xs[j], ys[j]), n)
                assert got == pytest.approx(want, abs=1e-12)


def test_report_and_csv_golden():
    rep = complexity_report(T_LIN, 25, 0.1, 256)
    assert rep == ComplexityReport(
        n=25, eps=0.1, sep_greedy=1970, sep_construct=60,
        span_construct=10106, bound_lower=pytest.approx(41.697207, rel=1e-6),
        bound_upper=pytest.approx(1e5, rel=1e-9),
        eta=pytest.approx(0.099853515625, abs=1e-12),
        variation=pytest.approx(1.0),
    )
    buf = io.StringIO()
    write_report_csv([rep], buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[0] == ("n,eps,sep_greedy,sep_construct,span_construct,"
                        "bound_lower,bound_upper,eta_eps,variation")
    assert lines[1] == "25,0.1,1970,60,10106,41.6972,100000,0.0998535,1"
