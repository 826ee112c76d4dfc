"""Exact Gaussian-rational scalars.

Real values are kept as ``int`` or ``fractions.Fraction`` for speed; a value
with a nonzero imaginary part is a :class:`GaussianRational`.  All helpers in
this module accept any of the three and return the simplest representation.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union


class GaussianRational:
    """An element ``re + im*i`` of Q(i) with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Rational | int = 0, im: Rational | int = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return simplify(GaussianRational(self.re + o.re, self.im + o.im))

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return simplify(GaussianRational(self.re - o.re, self.im - o.im))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return simplify(GaussianRational(self.re * other, self.im * other))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return simplify(GaussianRational(self.re * o.re - self.im * o.im,
                                         self.re * o.im + self.im * o.re))

    __rmul__ = __mul__

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        re = self.re * o.re + self.im * o.im
        im = self.im * o.re - self.re * o.im
        return simplify(GaussianRational(re / n, im / n))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return render(self)


Scalar = Union[int, Fraction, GaussianRational]

I = GaussianRational(0, 1)


def simplify(x: Scalar) -> Scalar:
    """Collapse a Gaussian rational with zero imaginary part to a real value."""
    if isinstance(x, GaussianRational) and x.im == 0:
        r = x.re
        return r.numerator if r.denominator == 1 else r
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def real_part(x: Scalar) -> Fraction:
    return x.re if isinstance(x, GaussianRational) else Fraction(x)


def imag_part(x: Scalar) -> Fraction:
    return x.im if isinstance(x, GaussianRational) else Fraction(0)


def div(a: Scalar, b: Scalar) -> Scalar:
    """Exact division keeping integers integral when possible."""
    if type(a) is int and type(b) is int:
        if a % b == 0:
            return a // b
        return Fraction(a, b)
    if isinstance(a, GaussianRational) or isinstance(b, GaussianRational):
        return simplify(GaussianRational._coerce(a) / b)
    return simplify(Fraction(a) / Fraction(b))


def parse_scalar(obj) -> Scalar:
    """Parse ``"p/q"``, ``["p/q", "r/s"]``, ints, or ``"a/b+c/d i"`` strings."""
    if isinstance(obj, GaussianRational):
        return simplify(obj)
    if isinstance(obj, (int, Fraction)):
        return simplify(Fraction(obj))
    if isinstance(obj, (list, tuple)):
        if len(obj) != 2:
            raise ValueError(f"complex coefficient needs two parts: {obj!r}")
        return simplify(GaussianRational(Fraction(str(obj[0])), Fraction(str(obj[1]))))
    if isinstance(obj, str):
        s = obj.replace(" ", "")
        if s.endswith("i"):
            body = s[:-1]
            # split at the last sign that is not the leading one
            cut = max(body.rfind("+", 1), body.rfind("-", 1))
            if cut <= 0:
                return simplify(GaussianRational(0, Fraction(body or "1")))
            re_s, im_s = body[:cut], body[cut:]
            if im_s in ("+", "-"):
                im_s += "1"
            return simplify(GaussianRational(Fraction(re_s), Fraction(im_s)))
        return simplify(Fraction(s))
    raise ValueError(f"cannot parse scalar {obj!r}")


def render(x: Scalar) -> str:
    """Render as ``"a/b"`` for reals and ``"a/b+c/d i"`` otherwise."""
    x = simplify(x)
    if not isinstance(x, GaussianRational):
        return str(Fraction(x))
    im = x.im
    sign = "-" if im < 0 else "+"
    return f"{x.re}{sign}{abs(im)} i"


def to_pair(x: Scalar) -> list[str]:
    return [str(real_part(x)), str(imag_part(x))]


def to_complex(x: Scalar) -> complex:
    return complex(float(real_part(x)), float(imag_part(x)))
