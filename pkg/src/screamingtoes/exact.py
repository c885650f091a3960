"""Exact integer and rational primitives shared by all distribution laws.

Rational values are carried by ``fractions.Fraction`` (arbitrary precision,
always in lowest terms, positive denominator, exact arithmetic).  Quantities
of the form (rational) * e**k are carried by :class:`ScaledExp`, which keeps
the power of e symbolic so that expressions whose e-powers cancel can be
reduced to a plain Fraction with zero rounding.  Decimal output happens only
at the very end, either through exact fixed-point rounding
(:func:`format_fixed`) or through a high-precision float conversion
(:func:`to_mpf`, default 128 bits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath
from mpmath import libmp

#: Working precision, in bits, for conversions of exact values to floats.
DEFAULT_PRECISION = 128

RationalLike = Union[int, Fraction]


def falling_factorial(n: int, r: int) -> int:
    """n_[r] = n(n-1)...(n-r+1); 1 when r = 0, and 0 as soon as a factor is 0."""
    if r < 0:
        raise ValueError("order r must be nonnegative")
    out = 1
    for i in range(r):
        out *= n - i
        if out == 0:
            return 0
    return out


def rising_factorial(x: RationalLike, r: int) -> RationalLike:
    """x(x+1)...(x+r-1); accepts integers or Fractions (e.g. x = 1/2)."""
    if r < 0:
        raise ValueError("order r must be nonnegative")
    out: RationalLike = x**0
    for i in range(r):
        out = out * (x + i)
    return out


def binomial(n: int, k: int) -> int:
    """Binomial coefficient; 0 for out-of-range arguments instead of an error."""
    if k < 0 or k > n or n < 0:
        return 0
    return math.comb(n, k)


def multinomial(n: int, *groups: int) -> int:
    """n! / (g_1! ... g_k! (n - sum g_i)!); 0 when the groups do not fit in n."""
    if n < 0 or any(g < 0 for g in groups):
        return 0
    rest = n - sum(groups)
    if rest < 0:
        return 0
    out = 1
    for g in groups:
        out *= math.comb(n, g)
        n -= g
    return out


_DERANGEMENTS = [1, 0]  # D_0, D_1; extended on demand


def derangement_number(n: int) -> int:
    """Number D_n of permutations of n objects with no fixed point.

    Computed by the integer recurrence D_n = (n-1)(D_{n-1} + D_{n-2}) with
    D_0 = 1, D_1 = 0, which avoids the cancellation of the alternating-sum
    definition and never leaves the integers.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    while len(_DERANGEMENTS) <= n:
        m = len(_DERANGEMENTS)
        _DERANGEMENTS.append((m - 1) * (_DERANGEMENTS[m - 1] + _DERANGEMENTS[m - 2]))
    return _DERANGEMENTS[n]


def derangement_numbers(n: int) -> list[int]:
    """The prefix [D_0, D_1, ..., D_n]."""
    derangement_number(n)
    return _DERANGEMENTS[: n + 1]


def poisson_partial_sum(rate: int, k: int) -> Fraction:
    """Exact sum_{i=0}^{k} rate**i / i! as a Fraction; 0 for k < 0.

    Scaled by e**(-rate) this is P(Po(rate) <= k).  Accumulated as a single
    integer over the common denominator k! so no per-term gcd is needed.
    """
    if rate < 1:
        raise ValueError("rate must be a positive integer")
    if k < 0:
        return Fraction(0)
    acc = 1  # sum_{i<=l} rate**i * l!/i!, built up over l = 0..k
    power = 1
    for i in range(1, k + 1):
        power *= rate
        acc = acc * i + power
    return Fraction(acc, math.factorial(k))


def poisson_cdf(rate: float, k: int) -> float:
    """P(Po(rate) <= k) in floating point by scaled term accumulation.

    Terms are built iteratively from t_0 = e**(-rate) via
    t_{l+1} = t_l * rate/(l+1), which never forms rate**l or l! directly.
    For rate > 700 the accumulation runs in log space (streaming
    log-sum-exp), exponentiating only the final result, since e**(-rate)
    underflows double precision.
    """
    if rate <= 0:
        raise ValueError("rate must be positive")
    if k < 0:
        return 0.0
    if rate <= 700:
        term = math.exp(-rate)
        total = term
        for i in range(1, k + 1):
            term *= rate / i
            total += term
        return min(total, 1.0)
    log_rate = math.log(rate)
    log_term = -rate
    best = log_term
    scaled = 1.0
    for i in range(1, k + 1):
        log_term += log_rate - math.log(i)
        if log_term > best:
            scaled = scaled * math.exp(best - log_term) + 1.0
            best = log_term
        else:
            scaled += math.exp(log_term - best)
    return min(math.exp(best + math.log(scaled)), 1.0)


@dataclass(frozen=True)
class ScaledExp:
    """Exact value coeff * e**epow.

    Multiplication and integer powers combine exactly.  Addition is exact
    only between values with equal e-powers; adding mixed powers raises,
    because the result would no longer have this form (convert to a float
    first if an approximate sum is wanted).  A zero coefficient is
    normalised to e-power 0 so that zero compares equal regardless of how
    it arose.
    """

    coeff: Fraction
    epow: int = 0

    def __post_init__(self) -> None:
        coeff = Fraction(self.coeff)
        object.__setattr__(self, "coeff", coeff)
        if coeff == 0:
            object.__setattr__(self, "epow", 0)

    def __mul__(self, other: ScaledExp | RationalLike) -> ScaledExp:
        if isinstance(other, ScaledExp):
            return ScaledExp(self.coeff * other.coeff, self.epow + other.epow)
        return ScaledExp(self.coeff * other, self.epow)

    __rmul__ = __mul__

    def __truediv__(self, other: ScaledExp | RationalLike) -> ScaledExp:
        if isinstance(other, ScaledExp):
            return ScaledExp(self.coeff / other.coeff, self.epow - other.epow)
        return ScaledExp(self.coeff / other, self.epow)

    def __pow__(self, k: int) -> ScaledExp:
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers are exact")
        return ScaledExp(self.coeff**k, self.epow * k)

    def __add__(self, other: ScaledExp | RationalLike) -> ScaledExp:
        if not isinstance(other, ScaledExp):
            other = ScaledExp(Fraction(other), 0)
        if self.coeff == 0:
            return other
        if other.coeff == 0:
            return self
        if self.epow != other.epow:
            raise ValueError(
                "cannot add ScaledExp values with different e-powers exactly; "
                "convert to float first"
            )
        return ScaledExp(self.coeff + other.coeff, self.epow)

    __radd__ = __add__

    def __sub__(self, other: ScaledExp | RationalLike) -> ScaledExp:
        if not isinstance(other, ScaledExp):
            other = ScaledExp(Fraction(other), 0)
        return self + ScaledExp(-other.coeff, other.epow)

    def __neg__(self) -> ScaledExp:
        return ScaledExp(-self.coeff, self.epow)

    def as_fraction(self) -> Fraction:
        """The exact rational value; requires the e-power to have cancelled."""
        if self.epow != 0:
            raise ValueError(f"e-power {self.epow} has not cancelled; value is not rational")
        return self.coeff

    def to_mpf(self, prec: int = DEFAULT_PRECISION) -> mpmath.mpf:
        return to_mpf(self, prec)

    def __float__(self) -> float:
        return float(self.to_mpf())


def _rational_to_mpf(num: int, den: int, prec: int) -> mpmath.mpf:
    # exact integer operands, one correctly rounded division; avoids
    # mpmath.fraction, which stringifies its arguments (slow and capped for
    # the tens-of-thousands-digit integers that arise here)
    raw = libmp.mpf_div(libmp.from_int(num), libmp.from_int(den), prec, libmp.round_nearest)
    return mpmath.mp.make_mpf(raw)


def to_mpf(value: ScaledExp | RationalLike, prec: int = DEFAULT_PRECISION) -> mpmath.mpf:
    """Correctly rounded conversion of an exact value to an mpf of `prec` bits."""
    with mpmath.workprec(prec):
        if isinstance(value, ScaledExp):
            coeff = _rational_to_mpf(value.coeff.numerator, value.coeff.denominator, prec)
            if value.epow == 0:
                return coeff
            return coeff * mpmath.exp(value.epow)
        value = Fraction(value)
        return _rational_to_mpf(value.numerator, value.denominator, prec)


def format_fixed(value: RationalLike, places: int = 4) -> str:
    """Exact fixed-point decimal string, rounding half to even.

    Rounding happens in integer arithmetic on the exact rational, so the
    printed digits are the true rounded digits (no binary float detour).
    """
    if places < 0:
        raise ValueError("places must be nonnegative")
    scale = 10**places
    scaled = round(Fraction(value) * scale)  # Fraction.__round__ is exact half-even
    sign = "-" if scaled < 0 else ""
    mag = abs(scaled)
    if places == 0:
        return f"{sign}{mag}"
    return f"{sign}{mag // scale}.{mag % scale:0{places}d}"
