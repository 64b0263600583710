"""Exact lengths of the form ``a + b*pi`` with rational ``a`` and ``b``.

Metric graphs built from presets carry edge lengths such as ``2*pi*(1+1/j)``.
Sums of such lengths stay in Q + Q*pi, where equality is decidable (pi is
irrational) and ordering only needs a rational enclosure of pi.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering
from numbers import Rational

import mpmath

# rational enclosure of pi, good to ~1e-40
_PI_DIGITS = "3.14159265358979323846264338327950288419716939937510"
_PI_LO = Fraction(_PI_DIGITS[:44])
_PI_HI = _PI_LO + Fraction(1, 10**42)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"not a rational: {x!r}")


@total_ordering
class PiRational:
    """The number ``rational + pi_coeff * pi`` held exactly."""

    __slots__ = ("rational", "pi_coeff")

    def __init__(self, rational=0, pi_coeff=0):
        self.rational = _as_fraction(rational)
        self.pi_coeff = _as_fraction(pi_coeff)

    @classmethod
    def pi(cls, coeff=1) -> "PiRational":
        return cls(0, coeff)

    @staticmethod
    def coerce(x) -> "PiRational":
        if isinstance(x, PiRational):
            return x
        return PiRational(_as_fraction(x), 0)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        try:
            o = PiRational.coerce(other)
        except TypeError:
            return NotImplemented
        return PiRational(self.rational + o.rational, self.pi_coeff + o.pi_coeff)

    __radd__ = __add__

    def __neg__(self):
        return PiRational(-self.rational, -self.pi_coeff)

    def __sub__(self, other):
        try:
            o = PiRational.coerce(other)
        except TypeError:
            return NotImplemented
        return PiRational(self.rational - o.rational, self.pi_coeff - o.pi_coeff)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, PiRational):
            if other.pi_coeff == 0:
                other = other.rational
            elif self.pi_coeff == 0:
                return other * self.rational
            else:
                return NotImplemented
        try:
            q = _as_fraction(other)
        except TypeError:
            return NotImplemented
        return PiRational(self.rational * q, self.pi_coeff * q)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PiRational):
            if other.pi_coeff == 0:
                other = other.rational
            elif self.rational == 0 and other.rational == 0:
                return PiRational(self.pi_coeff / other.pi_coeff, 0)
            else:
                return NotImplemented
        try:
            q = _as_fraction(other)
        except TypeError:
            return NotImplemented
        return PiRational(self.rational / q, self.pi_coeff / q)

    # comparison -----------------------------------------------------------
    def sign(self) -> int:
        a, b = self.rational, self.pi_coeff
        if b == 0:
            return (a > 0) - (a < 0)
        lo = a + b * (_PI_LO if b > 0 else _PI_HI)
        hi = a + b * (_PI_HI if b > 0 else _PI_LO)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        # |a + b*pi| below 1e-40 * |b|: resolve with more digits
        with mpmath.workdps(200):
            v = mpmath.mpf(a.numerator) / a.denominator + mpmath.mpf(b.numerator) / b.denominator * mpmath.pi
            return 1 if v > 0 else -1

    def __eq__(self, other):
        try:
            o = PiRational.coerce(other)
        except TypeError:
            if isinstance(other, float):
                return float(self) == other
            return NotImplemented
        return self.rational == o.rational and self.pi_coeff == o.pi_coeff

    def __lt__(self, other):
        try:
            o = PiRational.coerce(other)
        except TypeError:
            if isinstance(other, float):
                return float(self) < other
            return NotImplemented
        return (self - o).sign() < 0

    def __hash__(self):
        if self.pi_coeff == 0:
            return hash(self.rational)
        return hash((self.rational, self.pi_coeff))

    def __float__(self):
        return float(self.rational) + float(self.pi_coeff) * math.pi

    def __bool__(self):
        return bool(self.rational) or bool(self.pi_coeff)

    def is_rational(self) -> bool:
        return self.pi_coeff == 0

    def to_sympy(self):
        import sympy

        return sympy.Rational(self.rational.numerator, self.rational.denominator) + sympy.Rational(
            self.pi_coeff.numerator, self.pi_coeff.denominator
        ) * sympy.pi

    def __repr__(self):
        return f"PiRational({self.rational}, {self.pi_coeff})"

    def __str__(self):
        return format_exact(self)


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_exact(x) -> str:
    """Symbolic rendering, e.g. ``4*pi/3``, ``1 + pi``, ``2``."""
    if isinstance(x, Fraction) or isinstance(x, int):
        return _frac_str(Fraction(x))
    if not isinstance(x, PiRational):
        return str(x)
    a, b = x.rational, x.pi_coeff
    parts = []
    if a != 0 or b == 0:
        parts.append(_frac_str(a))
    if b != 0:
        num, den = abs(b.numerator), b.denominator
        term = "pi" if num == 1 else f"{num}*pi"
        if den != 1:
            term += f"/{den}"
        if parts:
            parts.append(("- " if b < 0 else "+ ") + term)
        else:
            parts.append(("-" if b < 0 else "") + term)
    return " ".join(parts)


def exact_or_float(x):
    """Collapse a rational-only PiRational to a Fraction; pass others through."""
    if isinstance(x, PiRational) and x.pi_coeff == 0:
        return x.rational
    return x


def is_exact(x) -> bool:
    return isinstance(x, (PiRational, Fraction, int))
