"""Lacunary counterexample construction and the coboundary criterion.

The question this module answers: given f(x) = lx + p(x) with p a finite
Fourier sum, is there a transfer function phi with

    f(x) = lx + phi(x + alpha) - phi(x) + c ?

Comparing coefficients forces b_n = a_n / (e^{2 pi i n alpha} - 1), so the
answer hinges on small divisors. ``build_counterexample`` manufactures an f
whose coefficients cancel the divisors to unit size along a resonant
frequency sequence, making sum |b_n|^2 grow without bound; that growth,
detected in ``coboundary_coeffs``, rules out any L^2 transfer function.

Verdicts are asymmetric by design. Divergence of the partial sums is
conclusive. "coboundary-plausible" only says the finite data seen is
consistent with a transfer function; it proves nothing about continuity
or about frequencies never examined.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath

from .diophantine import dist_to_integers, find_nk, signed_frac
from .errors import PreconditionError, ResonanceExhausted
from .funcspace import FlFunction, FourierSeries

#: partial sums at or past this level, with a persistent unit-size term,
#: are treated as divergent
DIVERGENCE_THRESHOLD = 4.0

#: a tail whose last squared increment is below this counts as Cauchy
CAUCHY_TOL = 0.25

#: divisors below this are reported as infinite coefficients outright
DIVISOR_FLOOR = 1e-300

SCOPE_NOTE = ("certifies the L2 obstruction only: divergence is conclusive, "
              "plausibility is consistency of finite data, not a proof")


def _unit_circle_minus_one(alpha, n: int) -> complex:
    """e^{2 pi i n alpha} - 1, with n*alpha reduced before any rounding."""
    theta = 2.0 * math.pi * signed_frac(alpha, n)
    return complex(math.cos(theta) - 1.0, math.sin(theta))


def build_counterexample(l: int, alpha, k_max: int,
                         n_cap: int = 10**45) -> FlFunction:
    """Degree-l function with unit-size coboundary coefficients.

    Frequencies come from the resonant sequence of alpha; the coefficient
    at n_k is e^{2 pi i n_k alpha} - 1, which the coboundary division
    restores to modulus one. Raises ResonanceExhausted when alpha does not
    admit k_max resonant frequencies (badly approximable alpha dies at
    k=1: every candidate witness stays above 2pi/sqrt(5) > 1).
    """
    if l == 0:
        raise PreconditionError("degree l must be nonzero")
    if k_max < 1:
        raise PreconditionError(f"k_max must be >= 1, got {k_max}")
    rs = find_nk(alpha, k_max, n_cap=n_cap)
    if rs.exhausted:
        raise ResonanceExhausted(
            f"only {len(rs.n_k)} resonant frequencies below cap, "
            f"needed {k_max}")
    terms = tuple((n, _unit_circle_minus_one(alpha, n)) for n in rs.n_k)
    return FlFunction(l=l, periodic_part=FourierSeries(terms))


@dataclass(frozen=True)
class CoboundaryReport:
    b_terms: tuple[tuple[int, float], ...]  # (frequency, |b_n|)
    partial_sums: tuple[tuple[int, float], ...]  # (N, sum over 0<|n|<=N)
    verdict: str  # "coboundary-plausible" | "diverges" | "inconclusive"
    c: float


def coboundary_coeffs(f: FlFunction, alpha, n_max: int,
                      divergence_threshold: float = DIVERGENCE_THRESHOLD,
                      cauchy_tol: float = CAUCHY_TOL) -> CoboundaryReport:
    """Divide the stored coefficients by their small divisors.

    Only frequencies up to n_max participate. Each |b_n| enters the running
    sum twice, once for n and once for -n. The divisor magnitude
    |e^{2 pi i n alpha} - 1| = 2 sin(pi ||n alpha||) is evaluated in 106-bit
    arithmetic so the division never injects noise of its own; the stored
    float64 coefficient is the accuracy bottleneck.
    """
    series = f.periodic_part
    if not isinstance(series, FourierSeries):
        raise PreconditionError(
            "coboundary analysis needs finite Fourier data; "
            f"got {type(series).__name__}")
    hit_floor = False
    b_terms: list[tuple[int, float]] = []
    sums: list[tuple[int, float]] = []
    running = 0.0
    for n, coef in series.terms:
        if n > n_max:
            break
        dist = dist_to_integers(alpha, n)
        with mpmath.workprec(106):
            divisor = 2 * mpmath.sin(mpmath.pi * dist)
            if divisor < DIVISOR_FLOOR:
                b_abs = math.inf
                hit_floor = True
            else:
                b_abs = float(abs(coef) / divisor)
        b_terms.append((n, b_abs))
        running += 2.0 * b_abs * b_abs
        sums.append((n, running))

    if hit_floor:
        verdict = "diverges"
    elif (sums and sums[-1][1] >= divergence_threshold
            and b_terms[-1][1] >= 0.5):
        verdict = "diverges"
    elif len(sums) <= 1:
        verdict = "coboundary-plausible"
    elif sums[-1][1] - sums[-2][1] <= cauchy_tol:
        verdict = "coboundary-plausible"
    else:
        verdict = "inconclusive"

    # the zero mode of the periodic part; identically zero in this storage
    return CoboundaryReport(b_terms=tuple(b_terms), partial_sums=tuple(sums),
                            verdict=verdict, c=float(series.mean()))


def transfer_function(f: FlFunction, alpha, n_max: int) -> FourierSeries:
    """The phi solving p(x) = phi(x+alpha) - phi(x), termwise.

    Meaningful only when every divisor is comfortably invertible; a divisor
    below sqrt(DIVISOR_FLOOR) raises instead of returning garbage.
    """
    series = f.periodic_part
    if not isinstance(series, FourierSeries):
        raise PreconditionError("transfer function needs finite Fourier data")
    out = []
    for n, coef in series.terms:
        if n > n_max:
            break
        div = cmath.exp(2j * math.pi * signed_frac(alpha, n)) - 1.0
        if abs(div) < math.sqrt(DIVISOR_FLOOR):
            raise PreconditionError(
                f"divisor at frequency {n} is {abs(div):.3e}, too small "
                "to invert")
        out.append((n, coef / div))
    return FourierSeries(tuple(out))


def order2_verdict(report: CoboundaryReport) -> str:
    if report.verdict == "diverges":
        return "not order 2 (no continuous or L2 transfer function)"
    if report.verdict == "coboundary-plausible":
        return "order-2 criterion satisfied at tested resolution"
    return "undetermined"
