"""Exact scalar arithmetic: rationals, a positive infinity, and affine functions.

Every quantity in this package (edge cost, penalty, dual value, potential) is
an exact rational; there is no floating point anywhere in the core.  Rationals
are stdlib ``fractions.Fraction`` values in canonical form.  ``INF`` is the
single positive-infinite value used for the root penalty, and ``AffineFn``
represents an exact affine function of the potential.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError, ValidationError

Rational = Fraction


class _PosInfinity:
    """Positive infinity; compares above every Fraction and absorbs addition."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("kpcst-positive-infinity")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        if other is self:
            raise ValidationError("INF - INF is undefined")
        return self


INF = _PosInfinity()


def is_finite(x) -> bool:
    return x is not INF


def rational_normalize(numerator: int, denominator: int) -> Fraction:
    """Build a canonical rational; the sign is carried by the numerator."""
    if denominator == 0:
        raise ValidationError("zero denominator")
    return Fraction(numerator, denominator)


def parse_scalar(text: str):
    """Parse ``"n"``, ``"n/d"`` or ``"inf"`` into a Fraction or INF."""
    text = text.strip()
    if text == "inf":
        return INF
    if "/" in text:
        num, _, den = text.partition("/")
        try:
            n, d = int(num), int(den)
        except ValueError:
            raise ParseError("bad rational %r" % text) from None
        if d == 0:
            raise ParseError("zero denominator in %r" % text)
        return Fraction(n, d)
    try:
        return Fraction(int(text))
    except ValueError:
        raise ParseError("bad rational %r" % text) from None


def format_scalar(x) -> str:
    """Canonical text form: ``n`` or ``n/d`` with d > 0, or ``inf``."""
    if x is INF:
        return "inf"
    f = Fraction(x)
    if f.denominator == 1:
        return str(f.numerator)
    return "%d/%d" % (f.numerator, f.denominator)


@dataclass(frozen=True)
class AffineFn:
    """The exact function lam -> intercept + slope * lam."""

    intercept: Fraction
    slope: Fraction

    def __call__(self, lam) -> Fraction:
        return self.intercept + self.slope * Fraction(lam)

    def __add__(self, other):
        if other is INFINITE_FN:
            return INFINITE_FN
        if isinstance(other, AffineFn):
            return AffineFn(self.intercept + other.intercept, self.slope + other.slope)
        return AffineFn(self.intercept + Fraction(other), self.slope)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, AffineFn):
            return AffineFn(self.intercept - other.intercept, self.slope - other.slope)
        return AffineFn(self.intercept - Fraction(other), self.slope)

    def __rsub__(self, other):
        return AffineFn(Fraction(other) - self.intercept, -self.slope)

    def __mul__(self, k):
        k = Fraction(k)
        return AffineFn(self.intercept * k, self.slope * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        k = Fraction(k)
        if k == 0:
            raise ValidationError("division of AffineFn by zero")
        return AffineFn(self.intercept / k, self.slope / k)

    def is_zero(self) -> bool:
        return self.intercept == 0 and self.slope == 0

    def __repr__(self):
        return "AffineFn(%s + %s*lam)" % (format_scalar(self.intercept),
                                          format_scalar(self.slope))


class _InfiniteFn:
    """Affine variant for constraints involving the infinite root penalty."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __call__(self, lam):
        return INF

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        if other is self:
            raise ValidationError("infinite - infinite is undefined")
        return self

    def __repr__(self):
        return "AffineFn(inf)"


INFINITE_FN = _InfiniteFn()

ZERO_FN = AffineFn(Fraction(0), Fraction(0))


def constant_fn(value) -> AffineFn:
    return AffineFn(Fraction(value), Fraction(0))


def affine_eval(f, lam):
    """Evaluate ``f`` at ``lam`` exactly; the infinite variant yields INF."""
    return f(Fraction(lam))


def affine_intersect(f: AffineFn, g: AffineFn):
    """Unique lam with f(lam) = g(lam), or None for parallel or identical f, g."""
    if f is INFINITE_FN or g is INFINITE_FN:
        raise ValidationError("affine_intersect requires finite functions")
    if f.slope == g.slope:
        return None
    return (g.intercept - f.intercept) / (f.slope - g.slope)
