"""Exact SU(2) recoupling coefficients.

Spins and projections are passed as doubled integers (``two_j = 2 * j``) so
half-integer values never pass through floating point.  Coefficients are
returned as :class:`SignedSqrtRational`, i.e. ``sign * sqrt(radicand)`` with
a rational radicand, using the Condon-Shortley phase convention.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import math

__all__ = [
    "CapacityError",
    "FactorialTable",
    "SignedSqrtRational",
    "clebsch_gordan",
    "cg",
    "log_factorial_table",
    "sixj",
    "to_twice",
    "triangle_ok",
    "wigner6j",
]

MAX_FACTORIAL = 20000


class CapacityError(ValueError):
    """Requested factorial beyond the table capacity."""


def to_twice(value):
    """Convert a spin given as int, Fraction or string like ``"5/2"`` to 2*j.

    Floats are rejected on purpose.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError("spins must be given exactly, not as floats")
    doubled = Fraction(value) * 2
    if doubled.denominator != 1:
        raise ValueError(f"{value!r} is not a multiple of 1/2")
    return int(doubled)


@dataclass(frozen=True)
class SignedSqrtRational:
    """The number ``sign * sqrt(radicand)`` with ``radicand >= 0``."""

    sign: int
    radicand: Fraction

    def __post_init__(self):
        if self.radicand < 0:
            raise ValueError("radicand must be non-negative")
        if self.radicand == 0 and self.sign != 0:
            object.__setattr__(self, "sign", 0)

    @classmethod
    def zero(cls):
        return cls(0, Fraction(0))

    def __float__(self):
        if self.sign == 0:
            return 0.0
        r = self.radicand
        # numerator and denominator can be huge; go through logs if needed
        try:
            return self.sign * math.sqrt(r.numerator / r.denominator)
        except OverflowError:
            logv = 0.5 * (math.log(r.numerator) - math.log(r.denominator))
            return self.sign * math.exp(logv)

    def __mul__(self, other):
        if isinstance(other, SignedSqrtRational):
            return SignedSqrtRational(self.sign * other.sign,
                                      self.radicand * other.radicand)
        return NotImplemented

    def squared(self):
        """Signed square ``sign * radicand``."""
        return self.sign * self.radicand

    def __bool__(self):
        return self.sign != 0


class FactorialTable:
    """Exact factorials and their logarithms up to ``n_max``."""

    def __init__(self, n_max):
        if n_max < 0:
            raise ValueError("n_max must be non-negative")
        if n_max > MAX_FACTORIAL:
            raise CapacityError(f"n_max={n_max} exceeds capacity {MAX_FACTORIAL}")
        self.n_max = n_max
        exact = [1] * (n_max + 1)
        for n in range(1, n_max + 1):
            exact[n] = exact[n - 1] * n
        self._exact = exact
        self._log = [math.lgamma(n + 1) for n in range(n_max + 1)]

    def _check(self, n):
        if n < 0:
            raise ValueError("factorial of a negative number")
        if n > self.n_max:
            raise CapacityError(f"{n}! exceeds table size {self.n_max}")

    def exact(self, n):
        self._check(n)
        return self._exact[n]

    def log(self, n):
        self._check(n)
        return self._log[n]


def log_factorial_table(n_max):
    return FactorialTable(n_max)


@lru_cache(maxsize=None)
def _table(size):
    return FactorialTable(size)


def _fact(n):
    size = 64
    while size < n:
        size *= 2
    return _table(min(size, MAX_FACTORIAL)).exact(n)


def triangle_ok(ta, tb, tc):
    """Triangle rule and integer perimeter for doubled spins."""
    return (tc <= ta + tb and tc >= abs(ta - tb) and (ta + tb + tc) % 2 == 0)


def clebsch_gordan(tj1, tm1, tj2, tm2, tj3, tm3):
    """<j1 m1; j2 m2 | j3 m3> with all arguments doubled.

    Returns a :class:`SignedSqrtRational`; zero outside the selection rules.
    """
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tj3, tm3)):
        if tj < 0:
            raise ValueError("negative spin")
        if abs(tm) > tj or (tj - tm) % 2:
            return SignedSqrtRational.zero()
    if tm1 + tm2 != tm3 or not triangle_ok(tj1, tj2, tj3):
        return SignedSqrtRational.zero()

    # everything below is an ordinary (integer) factorial argument
    a = (tj1 + tj2 - tj3) // 2
    b = (tj1 - tm1) // 2
    c = (tj2 + tm2) // 2
    d = (tj3 - tj2 + tm1) // 2
    e = (tj3 - tj1 - tm2) // 2
    kmin = max(0, -d, -e)
    kmax = min(a, b, c)
    total = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = (_fact(k) * _fact(a - k) * _fact(b - k) * _fact(c - k)
               * _fact(d + k) * _fact(e + k))
        total += Fraction(-1 if k % 2 else 1, den)
    if total == 0:
        return SignedSqrtRational.zero()

    pref = Fraction(
        (tj3 + 1) * _fact((tj3 + tj1 - tj2) // 2) * _fact((tj3 - tj1 + tj2) // 2)
        * _fact(a),
        _fact((tj1 + tj2 + tj3) // 2 + 1))
    pref *= (_fact((tj3 + tm3) // 2) * _fact((tj3 - tm3) // 2)
             * _fact((tj1 - tm1) // 2) * _fact((tj1 + tm1) // 2)
             * _fact((tj2 - tm2) // 2) * _fact((tj2 + tm2) // 2))
    sign = 1 if total > 0 else -1
    return SignedSqrtRational(sign, pref * total * total)


def _delta(ta, tb, tc):
    return Fraction(
        _fact((ta + tb - tc) // 2) * _fact((ta - tb + tc) // 2)
        * _fact((-ta + tb + tc) // 2),
        _fact((ta + tb + tc) // 2 + 1))


def wigner6j(ta, tb, tc, td, te, tf):
    """Wigner 6j symbol {a b c; d e f} with doubled arguments (Racah formula)."""
    triads = ((ta, tb, tc), (ta, te, tf), (td, tb, tf), (td, te, tc))
    if any(x < 0 for x in (ta, tb, tc, td, te, tf)):
        raise ValueError("negative spin")
    if not all(triangle_ok(*t) for t in triads):
        return SignedSqrtRational.zero()
    sums = [sum(t) // 2 for t in triads]
    quads = ((ta + tb + td + te) // 2, (ta + tc + td + tf) // 2,
             (tb + tc + te + tf) // 2)
    total = Fraction(0)
    for t in range(max(sums), min(quads) + 1):
        den = 1
        for s in sums:
            den *= _fact(t - s)
        for q in quads:
            den *= _fact(q - t)
        total += Fraction((-1) ** t * _fact(t + 1), den)
    if total == 0:
        return SignedSqrtRational.zero()
    rad = total * total
    for tri in triads:
        rad *= _delta(*tri)
    return SignedSqrtRational(1 if total > 0 else -1, rad)


@lru_cache(maxsize=1 << 16)
def cg(tj1, tm1, tj2, tm2, tj3, tm3):
    """Float value of :func:`clebsch_gordan`."""
    return float(clebsch_gordan(tj1, tm1, tj2, tm2, tj3, tm3))


@lru_cache(maxsize=1 << 16)
def sixj(ta, tb, tc, td, te, tf):
    """Float value of :func:`wigner6j`."""
    return float(wigner6j(ta, tb, tc, td, te, tf))
