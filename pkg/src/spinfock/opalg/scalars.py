"""Exact Gaussian-rational scalars (a + b*i with a, b rational)."""
from fractions import Fraction
from numbers import Rational

__all__ = ["GaussianRational", "I", "as_scalar"]


class GaussianRational:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def _raw(cls, re, im):
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            other = as_scalar(other)
        return GaussianRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            other = as_scalar(other)
        return GaussianRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return as_scalar(other) - self

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            if isinstance(other, Rational):
                return GaussianRational._raw(self.re * other, self.im * other)
            other = as_scalar(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b:
            return GaussianRational._raw(a * c, a * d)
        if not d:
            return GaussianRational._raw(a * c, b * c)
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_scalar(other)
        den = other.re * other.re + other.im * other.im
        if not den:
            raise ZeroDivisionError("division by zero scalar")
        return self * GaussianRational._raw(other.re / den, -other.im / den)

    def __rtruediv__(self, other):
        return as_scalar(other) / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (GaussianRational._raw(Fraction(1), Fraction(0)) / self) ** (-n)
        out = GaussianRational._raw(Fraction(1), Fraction(0))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self):
        return GaussianRational._raw(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            other = as_scalar(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self):
        return not self.im

    def __repr__(self):
        return f"GaussianRational({self.re!s}, {self.im!s})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re} {sign} {abs(self.im)}*i)"


def as_scalar(value):
    """Coerce ints, Fractions and exact-valued complex numbers to GaussianRational."""
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, Rational):
        return GaussianRational._raw(Fraction(value), Fraction(0))
    if isinstance(value, complex):
        re, im = Fraction(value.real), Fraction(value.imag)
        return GaussianRational._raw(re, im)
    if isinstance(value, str):
        return GaussianRational(Fraction(value))
    raise TypeError(f"cannot use {type(value).__name__} as an exact scalar")


I = GaussianRational(0, 1)
