"""Continued fractions, convergents, and small-divisor diagnostics.

Three input regimes for alpha, with different arithmetic behind each:

  * exact ``fractions.Fraction`` (or int): Euclidean expansion, everything
    exact until the expansion terminates;
  * ``mpmath.mpf``: expansion on the exact dyadic rational the mpf holds,
    cut off once convergent denominators outrun the mantissa (past that
    point the quotients describe the binary representation, not the number);
  * plain float: same as mpf with a 53-bit mantissa; denominators are capped
    at 2^26, half the available resolution.

Everything downstream (v estimates, the resonant sequence) consumes the
convergent denominators, which carry the best-approximation structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import PreconditionError, ResonanceExhausted

FLOAT_Q_CAP = 1 << 26

#: (sqrt(5)-1)/2 at 256-bit precision, the standard badly approximable point
def golden_alpha(prec: int = 256) -> mpmath.mpf:
    with mpmath.workprec(prec):
        return (mpmath.sqrt(5) - 1) / 2


def liouville_alpha(jmax: int) -> Fraction:
    """Partial sum of sum_j 2^(-j!) through j = jmax, as an exact rational."""
    if jmax < 1:
        raise PreconditionError(f"liouville_alpha needs jmax >= 1, got {jmax}")
    total = Fraction(0)
    for j in range(1, jmax + 1):
        total += Fraction(1, 2 ** math.factorial(j))
    return total


def _as_fraction(alpha) -> tuple[Fraction, int | None]:
    """(exact value, denominator cap); cap None means expand exactly."""
    if isinstance(alpha, Fraction):
        return alpha, None
    if isinstance(alpha, int):
        return Fraction(alpha), None
    if isinstance(alpha, mpmath.mpf):
        # alpha._mpf_ reads the stored mantissa; reconstructing via the
        # mpf() constructor would re-round to the ambient context precision.
        sign, man, exp, _ = alpha._mpf_
        frac = Fraction(man, 1) * (Fraction(2) ** exp)
        if sign:
            frac = -frac
        # Cap at the square root of the stored dyadic denominator. The
        # global context precision is irrelevant here; the operand alone
        # knows how many of its bits are meaningful.
        res_bits = frac.denominator.bit_length() - 1
        return frac, 1 << max(res_bits // 2, 26)
    if isinstance(alpha, float):
        if not math.isfinite(alpha):
            raise PreconditionError(f"cannot expand non-finite alpha {alpha!r}")
        return Fraction(alpha), FLOAT_Q_CAP
    raise PreconditionError(f"unsupported alpha type {type(alpha).__name__}")


@dataclass(frozen=True)
class ContinuedFraction:
    a0: int
    partial_quotients: tuple[int, ...]
    exact_input: Fraction | None
    truncated: bool

    def as_list(self) -> list[int]:
        return [self.a0, *self.partial_quotients]


@dataclass(frozen=True)
class Convergent:
    p: int
    q: int


def cf_expand(alpha, depth: int) -> ContinuedFraction:
    """Partial quotients a_0; a_1 ... a_K with K <= depth.

    ``truncated`` is set when the expansion stopped before exhausting the
    input: depth ran out, or (for float/mpf input) the convergent
    denominators crossed the resolution cap.
    """
    if depth < 1:
        raise PreconditionError(f"cf_expand needs depth >= 1, got {depth}")
    value, cap = _as_fraction(alpha)
    if value < 0:
        raise PreconditionError("alpha must be nonnegative")
    exact_input = value if cap is None else None

    num, den = value.numerator, value.denominator
    a0 = num // den
    num -= a0 * den
    quotients: list[int] = []
    truncated = False
    q_prev, q_cur = 0, 1  # denominators q_{-1}, q_0
    while num != 0:
        if len(quotients) == depth:
            truncated = True
            break
        num, den = den, num
        a = num // den
        num -= a * den
        q_next = a * q_cur + q_prev
        if cap is not None and q_next > cap:
            truncated = True
            break
        quotients.append(int(a))
        q_prev, q_cur = q_cur, q_next
    return ContinuedFraction(a0=int(a0), partial_quotients=tuple(quotients),
                             exact_input=exact_input, truncated=truncated)


def convergents(cf: ContinuedFraction) -> list[Convergent]:
    """p_k/q_k for k = 0..K via the standard two-term recurrence."""
    p_prev, p_cur = 1, cf.a0
    q_prev, q_cur = 0, 1
    out = [Convergent(p=p_cur, q=q_cur)]
    for a in cf.partial_quotients:
        p_cur, p_prev = a * p_cur + p_prev, p_cur
        q_cur, q_prev = a * q_cur + q_prev, q_cur
        out.append(Convergent(p=int(p_cur), q=int(q_cur)))
    return out


# === small divisors ===

def signed_frac(alpha, n: int) -> float:
    """n*alpha minus its nearest integer, in [-1/2, 1/2].

    Exact rational arithmetic for Fraction/float input; for mpf the working
    precision is scaled with bit_length(n) so the answer keeps ~transparent
    accuracy even when n*alpha is astronomically large.
    """
    if isinstance(alpha, mpmath.mpf):
        with mpmath.workprec(mpmath.mp.prec + 2 * max(int(n).bit_length(), 1) + 80):
            t = mpmath.mpf(alpha) * n
            return float(t - mpmath.nint(t))
    value, _ = _as_fraction(alpha)
    t = value * n
    s = t - round(t)
    return float(s)


def dist_to_integers(alpha, n: int) -> float:
    """||n*alpha||, the distance from n*alpha to the nearest integer."""
    return abs(signed_frac(alpha, n))


def resonance_witness(alpha, n: int) -> float:
    """n * |e^(2 pi i n alpha) - 1| = n * 2 sin(pi ||n alpha||)."""
    return float(n) * 2.0 * math.sin(math.pi * dist_to_integers(alpha, n))


@dataclass(frozen=True)
class DiophantineReport:
    v_estimate: float
    badly_approximable: str  # "yes" | "no-evidence" | "undecided"
    depth: int
    quotient_bound: int | None = None
    running_min: float = math.inf


def v_estimate(alpha, depth: int) -> DiophantineReport:
    """Estimate of v(alpha) = liminf n * ||n alpha|| from the convergent ladder.

    The convergent denominators realize the liminf pattern of n * ||n alpha||.
    Because v is a tail quantity, ``v_estimate`` takes the minimum of
    q_k * ||q_k alpha|| over the second half of the expanded ladder only;
    the first few convergents of a badly approximable number sit well below
    the limit (for the golden ratio, q=1 alone gives 0.3820 against the true
    0.4472) and would poison the estimate forever. ``running_min`` keeps the
    minimum over the whole ladder; it is the quantity that is monotone in
    depth.

    The ternary badly-approximable call:

      yes          all requested quotients seen, none exceeded 50
      no-evidence  a large quotient (or exact termination) showed up,
                   which is evidence toward v = 0, not a proof
      undecided    expansion hit the input's resolution cap early
    """
    if depth < 2:
        raise PreconditionError(f"v_estimate needs depth >= 2, got {depth}")
    cf = cf_expand(alpha, depth)
    convs = convergents(cf)
    values = []
    for c in convs:
        nrm = dist_to_integers(alpha, c.q)
        values.append(0.0 if nrm == 0.0 else c.q * nrm)
        if nrm == 0.0:
            break
    tail_start = len(values) // 2 if values[-1] != 0.0 else 0
    best = min(values[tail_start:])
    terminated = cf.exact_input is not None and not cf.truncated
    hit_cap = cf.truncated and len(cf.partial_quotients) < depth
    m_bound = max(cf.partial_quotients) if cf.partial_quotients else None
    if terminated:
        verdict = "no-evidence"
    elif hit_cap:
        verdict = "undecided"
    elif m_bound is not None and m_bound <= 50:
        verdict = "yes"
    else:
        verdict = "no-evidence"
    return DiophantineReport(v_estimate=float(best), badly_approximable=verdict,
                             depth=len(cf.partial_quotients),
                             quotient_bound=m_bound,
                             running_min=float(min(values)))


@dataclass(frozen=True)
class ResonantSequence:
    n_k: tuple[int, ...]
    witnesses: tuple[float, ...]
    exhausted: bool


def find_nk(alpha, k_max: int, n_cap: int = 10**45) -> ResonantSequence:
    """Increasing frequencies n_k with n_k * |e^(2 pi i n_k alpha) - 1| < 1/k^2.

    Candidates are convergent denominators only: for n between q_k and
    q_{k+1} the distance ||n alpha|| is at least ||q_k alpha||, so nothing
    off the convergent ladder can beat it. Denominators whose distance is
    exactly zero (rational alpha at its own denominator) are skipped: they
    correspond to a vanishing Fourier coefficient, not a resonance.

    Returns a short sequence with ``exhausted=True`` when the candidates run
    out before k_max terms; badly approximable alpha always ends up there.
    """
    if k_max < 1:
        raise PreconditionError(f"find_nk needs k_max >= 1, got {k_max}")
    depth = 64
    while True:
        cf = cf_expand(alpha, depth)
        convs = convergents(cf)
        if (cf.truncated is False or len(cf.partial_quotients) < depth
                or convs[-1].q > n_cap):
            break
        depth *= 2
        if depth > 1 << 15:
            break

    accepted: list[int] = []
    witnesses: list[float] = []
    last = 0
    for c in convs:
        if len(accepted) == k_max:
            break
        q = c.q
        if q <= last or q > n_cap:
            continue
        if dist_to_integers(alpha, q) == 0.0:
            continue
        k = len(accepted) + 1
        w = resonance_witness(alpha, q)
        if w < 1.0 / k**2:
            accepted.append(q)
            witnesses.append(w)
            last = q
    return ResonantSequence(n_k=tuple(accepted), witnesses=tuple(witnesses),
                            exhausted=len(accepted) < k_max)
