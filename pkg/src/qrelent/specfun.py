"""Digamma evaluation, Bernoulli numbers, and small-argument limit helpers.

The exact ensemble averages in :mod:`qrelent.formulas` are assembled from
digamma values at integer, half-integer, and shifted real arguments,
together with two ``alpha * psi0(alpha)``-type products that stay finite
as ``alpha -> 0``.  Everything in this module is a pure function; the
Bernoulli table is immutable after import.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DomainError

#: Euler-Mascheroni constant, gamma = lim (H_n - ln n).
EULER_GAMMA = 0.57721566490153286060651209008240243

#: B_2, B_4, ..., B_20 as exact rationals.  The defining recurrence
#: sum_{j=0}^{n} C(n+1, j) B_j = 0 is re-validated by the selftest command
#: (see :func:`bernoulli_recurrence_residuals`).
BERNOULLI_EVEN = (
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
    Fraction(-3617, 510),
    Fraction(43867, 798),
    Fraction(-174611, 330),
)

# Shift arguments above this cut before applying the asymptotic series.
# With the series truncated at B_10 the first omitted term at x = 16 is
# about 8e-17, below the double-precision floor.
_ASYMPTOTIC_CUT = 16.0
_ASYMPTOTIC_ORDER = 5


def bernoulli_even(k: int) -> Fraction:
    """Return B_{2k} from the precomputed table (1 <= k <= 10)."""
    if not 1 <= k <= len(BERNOULLI_EVEN):
        raise DomainError(
            f"Bernoulli table holds B_2..B_{2 * len(BERNOULLI_EVEN)}; got k={k}"
        )
    return BERNOULLI_EVEN[k - 1]


def bernoulli_recurrence_residuals(table=None):
    """Residuals of ``sum_{j=0}^{n} C(n+1, j) B_j`` for n = 1 .. 2K.

    Every residual is exactly zero (as a rational) when the even-index
    table is correct.  ``table`` overrides the module table so fault
    injection can be exercised in tests.
    """
    evens = BERNOULLI_EVEN if table is None else tuple(table)
    full = {0: Fraction(1), 1: Fraction(-1, 2)}
    for i, value in enumerate(evens):
        full[2 * i + 2] = Fraction(value)
    residuals = []
    for n in range(1, 2 * len(evens) + 1):
        acc = Fraction(0)
        for j in range(n + 1):
            coefficient = math.comb(n + 1, j)
            acc += coefficient * full.get(j, Fraction(0))
        residuals.append(acc)
    return residuals


def digamma(x: float) -> float:
    """psi0(x) for real x > 0.

    The argument is shifted above 16 with psi0(x+1) = psi0(x) + 1/x and
    the asymptotic series ln x - 1/(2x) - sum_k B_{2k}/(2k x^{2k}) is then
    applied, truncated at B_10.  Relative accuracy is ~1e-15 away from the
    positive root of psi0 (x ~ 1.4616), where cancellation caps *absolute*
    accuracy near 1e-15 instead.
    """
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"digamma requires x > 0, got {x!r}")
    shift = 0.0
    while x < _ASYMPTOTIC_CUT:
        shift -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = 0.0
    power = inv2
    for k in range(1, _ASYMPTOTIC_ORDER + 1):
        tail += float(BERNOULLI_EVEN[k - 1]) / (2 * k) * power
        power *= inv2
    return math.log(x) - 0.5 / x - tail + shift


def digamma_int(l: int) -> float:
    """psi0(l) for integer l >= 1 via the exact harmonic sum -gamma + H_{l-1}.

    Serves as an independent oracle for :func:`digamma`.  ``math.fsum``
    keeps the harmonic sum correctly rounded even for thousands of terms.
    """
    if l < 1:
        raise DomainError(f"digamma_int requires l >= 1, got {l}")
    return math.fsum(1.0 / k for k in range(1, l)) - EULER_GAMMA


def digamma_half(l: int) -> float:
    """psi0(l + 1/2) for integer l >= 0 via the exact odd-harmonic sum."""
    if l < 0:
        raise DomainError(f"digamma_half requires l >= 0, got {l}")
    odd_sum = math.fsum(1.0 / (2 * k + 1) for k in range(l))
    return -EULER_GAMMA - 2.0 * math.log(2.0) + 2.0 * odd_sum


def weighted_digamma(alpha: float) -> float:
    """alpha * psi0(alpha) for alpha >= 0, with the value -1 at alpha = 0.

    The product is 0 * (-inf) at the endpoint; its alpha -> 0+ limit is -1
    (psi0(alpha) = -1/alpha - gamma + O(alpha)).  That limit is the unique
    choice under which the mean log-determinant of a 1x1 ensemble comes
    out as 0, so it is adopted as the defining value.
    """
    alpha = float(alpha)
    if alpha < 0.0:
        raise DomainError(f"weighted_digamma requires alpha >= 0, got {alpha}")
    if alpha == 0.0:
        return -1.0
    return alpha * digamma(alpha)


def weighted_digamma_triple(alpha: float) -> float:
    """alpha * (psi0(alpha) + 2 psi0(alpha + 1/2)) with the value -1 at 0.

    Only the alpha * psi0(alpha) part survives the alpha -> 0+ limit; the
    2 alpha psi0(alpha + 1/2) part vanishes.
    """
    alpha = float(alpha)
    if alpha < 0.0:
        raise DomainError(
            f"weighted_digamma_triple requires alpha >= 0, got {alpha}"
        )
    if alpha == 0.0:
        return -1.0
    return alpha * (digamma(alpha) + 2.0 * digamma(alpha + 0.5))


def xlog(a: float, b: float) -> float:
    """a * ln(b), defined as exactly 0 when a == 0.

    Centralizes the continuity convention used by the large-dimension
    limits, whose prefactors (c - 1) vanish at the edge of the c >= 1
    domain while the attached logarithm diverges.
    """
    a = float(a)
    if a == 0.0:
        return 0.0
    return a * math.log(b)
