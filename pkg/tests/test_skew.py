import numpy as np
import pytest

from torus2c import (
    FlFunction,
    FourierSeries,
    PiecewiseLinear,
    PreconditionError,
    SkewProduct,
    TorusPoint,
    ZERO_PERIODIC,
    birkhoff_lift,
    birkhoff_prefix_mod1,
    circle_dist,
    dn_dist,
    eval_lift,
    orbit,
    orbit_arrays,
    reduce,
    step,
    step_inverse,
    torus_dist,
)

LINEAR = FlFunction(l=1, periodic_part=ZERO_PERIODIC)
WAVY = FlFunction(l=1, periodic_part=FourierSeries(((1, 0.05 - 0.02j), (3, 0.02 + 0.01j))))
ZIGZAG2 = FlFunction(l=2, periodic_part=PiecewiseLinear(((0.0, 0.0), (0.5, 0.7))))
GOLDEN = 0.6180339887498949


def test_alpha_stored_reduced():
    T = SkewProduct(alpha=2.3, f=LINEAR)
    assert T.alpha == pytest.approx(0.3, abs=1e-12)


def test_rational_warning():
    assert SkewProduct(alpha=0.5, f=LINEAR).rational_warning
    assert SkewProduct(alpha=2 / 7, f=LINEAR).rational_warning
    assert not SkewProduct(alpha=GOLDEN, f=LINEAR).rational_warning


def test_step_examples():
    T = SkewProduct(alpha=0.3, f=LINEAR)
    p1 = step(T, TorusPoint.of(0, 0))
    assert p1.as_tuple() == pytest.approx((0.3, 0.0), abs=1e-12)
    p2 = step(T, p1)
    assert p2.as_tuple() == pytest.approx((0.6, 0.3), abs=1e-12)


def test_step_then_inverse_identity():
    rng = np.random.default_rng(41)
    for f in (LINEAR, WAVY, ZIGZAG2):
        T = SkewProduct(alpha=GOLDEN, f=f)
        for _ in range(50):
            p = TorusPoint.of(*rng.uniform(0, 1, 2))
            back = step_inverse(T, step(T, p))
            assert torus_dist(p, back) < 1e-12


def test_orbit_edge_cases():
    T = SkewProduct(alpha=GOLDEN, f=LINEAR)
    p = TorusPoint.of(0.2, 0.7)
    assert orbit(T, p, 0) == []
    only = orbit(T, p, 1)
    assert len(only) == 1 and torus_dist(only[0], p) == 0.0
    with pytest.raises(PreconditionError):
        orbit(T, p, -1)


def test_orbit_half_rotation_exact():
    T = SkewProduct(alpha=0.5, f=LINEAR)
    pts = [q.as_tuple() for q in orbit(T, TorusPoint.of(0, 0), 3)]
    assert pts == [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5)]


def test_orbit_matches_repeated_step():
    T = SkewProduct(alpha=GOLDEN, f=WAVY)
    p = TorusPoint.of(0.123, 0.456)
    seq = orbit(T, p, 300)
    q = p
    worst = 0.0
    for k in range(300):
        worst = max(worst, torus_dist(seq[k], q))
        q = step(T, q)
    assert worst < 1e-9


def test_birkhoff_direct_sum_example():
    assert birkhoff_lift(LINEAR, 0.5, 0.0, 3) == pytest.approx(1.5, abs=1e-12)


def test_birkhoff_requires_positive_n():
    with pytest.raises(PreconditionError):
        birkhoff_lift(LINEAR, 0.3, 0.0, 0)


def test_birkhoff_telescoping():
    n = 17
    got = birkhoff_lift(ZIGZAG2, 0.3, 1.3, n) - birkhoff_lift(ZIGZAG2, 0.3, 0.3, n)
    assert got == pytest.approx(n * ZIGZAG2.l, abs=1e-9 * n)
    n = 10_000
    got = birkhoff_lift(WAVY, GOLDEN, 1.0, n) - birkhoff_lift(WAVY, GOLDEN, 0.0, n)
    assert got == pytest.approx(n * WAVY.l, abs=1e-9 * n)


def test_birkhoff_cocycle_identity():
    rng = np.random.default_rng(61)
    for _ in range(1000):
        m = int(rng.integers(1, 51))
        n = int(rng.integers(1, 51))
        x = float(rng.uniform(0, 1))
        whole = birkhoff_lift(WAVY, GOLDEN, x, m + n)
        split = birkhoff_lift(WAVY, GOLDEN, x, n) + birkhoff_lift(WAVY, GOLDEN, x + n * GOLDEN, m)
        assert abs(whole - split) < 1e-9


def test_birkhoff_consistency_with_orbit_is_exact():
    # both paths run the same accumulation, so this is equality of floats
    T = SkewProduct(alpha=0.3, f=WAVY)
    x, y = 0.123, 0.456
    for n in (1, 10, 1234, 10_000):
        last = orbit(T, TorusPoint.of(x, y), n + 1)[-1]
        assert last.y.value == reduce(birkhoff_lift(WAVY, T.alpha, x, n) + y)


def test_prefix_mod1_matches_lift():
    pref = birkhoff_prefix_mod1(WAVY, GOLDEN, 0.37, 200)
    assert pref[0] == 0.0
    for i in (1, 7, 64, 199):
        assert pref[i] == pytest.approx(reduce(birkhoff_lift(WAVY, GOLDEN, 0.37, i)), abs=1e-11)


def test_base_coordinate_isometry():
    rng = np.random.default_rng(97)
    x1 = rng.uniform(0, 1, 1000)
    x2 = rng.uniform(0, 1, 1000)
    i = np.arange(100, dtype=float)
    t1 = x1[:, None] + GOLDEN * i[None, :]
    t2 = x2[:, None] + GOLDEN * i[None, :]
    diff = (t1 - np.floor(t1)) - (t2 - np.floor(t2))
    dist = np.abs(diff - np.round(diff))
    assert np.max(np.abs(dist - dist[:, :1])) < 1e-12


def test_dn_single_iterate_is_torus_dist():
    T = SkewProduct(alpha=GOLDEN, f=WAVY)
    rng = np.random.default_rng(13)
    for _ in range(100):
        p = TorusPoint.of(*rng.uniform(0, 1, 2))
        q = TorusPoint.of(*rng.uniform(0, 1, 2))
        assert dn_dist(T, p, q, 1) == pytest.approx(torus_dist(p, q), abs=1e-12)


def test_dn_identical_points():
    T = SkewProduct(alpha=GOLDEN, f=WAVY)
    p = TorusPoint.of(0.25, 0.8)
    for n in (1, 5, 50):
        assert dn_dist(T, p, p, n) == 0.0


def test_dn_half_apart_base():
    T = SkewProduct(alpha=0.3, f=LINEAR)
    assert dn_dist(T, TorusPoint.of(0, 0), TorusPoint.of(0.5, 0), 2) == pytest.approx(0.5)


def test_dn_nondecreasing_and_matches_bruteforce():
    T = SkewProduct(alpha=GOLDEN, f=WAVY)
    rng = np.random.default_rng(29)
    for _ in range(30):
        p = TorusPoint.of(*rng.uniform(0, 1, 2))
        q = TorusPoint.of(*rng.uniform(0, 1, 2))
        op, oq = orbit(T, p, 40), orbit(T, q, 40)
        prev = 0.0
        for n in (1, 2, 5, 13, 40):
            d = dn_dist(T, p, q, n)
            brute = max(torus_dist(op[i], oq[i]) for i in range(n))
            assert d == pytest.approx(brute, abs=1e-11)
            assert d >= prev - 1e-12
            prev = d


def test_orbit_arrays_stay_in_range():
    T = SkewProduct(alpha=GOLDEN, f=ZIGZAG2)
    xs, ys = orbit_arrays(T, 0.99, 0.01, 50_000)
    assert xs.min() >= 0.0 and xs.max() < 1.0
    assert ys.min() >= 0.0 and ys.max() < 1.0
