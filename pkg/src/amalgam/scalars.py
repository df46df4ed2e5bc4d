"""Exact Gaussian rationals: complex numbers p + q*i with p, q rational."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

__all__ = ["GaussQ", "ZERO", "ONE", "I", "as_scalar", "parse_scalar", "format_fraction"]


class GaussQ:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    # construction helpers

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> GaussQ:
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    # arithmetic

    def __add__(self, other):
        if type(other) is not GaussQ:
            other = as_scalar(other)
        return GaussQ._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is not GaussQ:
            other = as_scalar(other)
        return GaussQ._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return as_scalar(other) - self

    def __neg__(self):
        return GaussQ._raw(-self.re, -self.im)

    def __mul__(self, other):
        if type(other) is not GaussQ:
            other = as_scalar(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussQ._raw(a * c, b)
        return GaussQ._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if type(other) is not GaussQ:
            other = as_scalar(other)
        c, d = other.re, other.im
        if not d:
            if not c:
                raise ZeroDivisionError("division by zero Gaussian rational")
            return GaussQ._raw(self.re / c, self.im / c)
        n = c * c + d * d
        a, b = self.re, self.im
        return GaussQ._raw((a * c + b * d) / n, (b * c - a * d) / n)

    def __rtruediv__(self, other):
        return as_scalar(other) / self

    def conj(self) -> GaussQ:
        if not self.im:
            return self
        return GaussQ._raw(self.re, -self.im)

    def norm2(self) -> Fraction:
        """|z|^2 as a rational."""
        return self.re * self.re + self.im * self.im

    # comparisons

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if type(other) is not GaussQ:
            try:
                other = as_scalar(other)
            except TypeError:
                return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"GaussQ({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


ZERO = GaussQ(0)
ONE = GaussQ(1)
I = GaussQ(0, 1)


def as_scalar(x) -> GaussQ:
    if type(x) is GaussQ:
        return x
    if isinstance(x, (int, Rational)):
        return GaussQ._raw(Fraction(x), Fraction(0))
    if isinstance(x, complex):
        raise TypeError("floating complex values are not exact; use GaussQ")
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"cannot interpret {x!r} as a Gaussian rational")


def format_fraction(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_scalar(z: GaussQ) -> str:
    """Canonical text: "p/q", "p/q*i" or "p/q+r/s*i"."""
    if not z.im:
        return format_fraction(z.re)
    mag = abs(z.im)
    im = "i" if mag == 1 else format_fraction(mag) + "*i"
    if not z.re:
        return ("-" if z.im < 0 else "") + im
    return format_fraction(z.re) + ("-" if z.im < 0 else "+") + im


def _parse_rational(text: str) -> Fraction:
    if text in ("", "+"):
        return Fraction(1)
    if text == "-":
        return Fraction(-1)
    return Fraction(text)


def parse_scalar(text) -> GaussQ:
    """Parse "3", "-1/2", "i", "1/2-3/4*i" (and ints / [re, im] pairs)."""
    if isinstance(text, GaussQ):
        return text
    if isinstance(text, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(text, int):
        return GaussQ(text)
    if isinstance(text, float):
        raise TypeError("floats are not exact; write rationals as 'p/q'")
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return GaussQ(parse_scalar(text[0]).re, parse_scalar(text[1]).re)
    if not isinstance(text, str):
        raise TypeError(f"cannot parse scalar from {text!r}")
    body = text.replace(" ", "")
    try:
        if not body.endswith("i"):
            return GaussQ(Fraction(body))
        body = body[:-1].rstrip("*")
        cut = max(body.rfind("+"), body.rfind("-"))
        if cut > 0:
            return GaussQ(Fraction(body[:cut]), _parse_rational(body[cut:]))
        return GaussQ(0, _parse_rational(body))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a Gaussian rational: {text!r}") from None
