"""Scalar fields used for every coefficient in the library.

Three kinds of scalars are supported:

* exact rationals (``int`` / ``fractions.Fraction``),
* exact Gaussian rationals (:class:`GaussianRational`),
* complex doubles (``float`` / ``complex``).

The first two are "exact" and never round.  Python will happily add a
``Fraction`` to a ``complex``; the containers built on top of these scalars
refuse to do so and raise :class:`ScalarMixError` instead.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from numbers import Rational
from typing import Union


class ScalarMixError(TypeError):
    """Exact and floating point scalars were combined in one expression."""


class GaussianRational:
    """Exact complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, Rational):
            return GaussianRational(other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return gauss(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return gauss(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return gauss(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return gauss(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        return gauss((self.re * o.re + self.im * o.im) / den,
                     (self.im * o.re - self.re * o.im) / den)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __abs__(self):
        return abs(complex(self))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self):
        return gauss(self.re, -self.im)

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
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


Scalar = Union[int, Fraction, GaussianRational, float, complex]


def gauss(re, im=0):
    """Exact complex constructor; collapses to ``Fraction`` when ``im == 0``."""
    re, im = Fraction(re), Fraction(im)
    if im == 0:
        return re
    return GaussianRational(re, im)


def is_exact(x) -> bool:
    if isinstance(x, (Rational, GaussianRational)):
        return True
    if isinstance(x, (float, complex)):
        return False
    raise TypeError(f"not a supported scalar: {x!r}")


def check_kind(x, exact: bool):
    """Raise :class:`ScalarMixError` unless ``x`` lives in the requested field."""
    if is_exact(x) != exact:
        raise ScalarMixError(
            f"cannot combine {'float' if exact else 'exact'} scalar {x!r} "
            f"with {'exact' if exact else 'float'} data")
    return x


def to_exact(x):
    """Parse a user supplied number (``"1/3"``, ``0.5``, ``2``) as a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(str(x))


def imag_unit(exact: bool):
    return GaussianRational(0, 1) if exact else 1j


def one(exact: bool):
    return Fraction(1) if exact else 1.0


def zero(exact: bool):
    return Fraction(0) if exact else 0.0


def exp_i(k: int, t, exact: bool):
    """Value of ``exp(i k t)``.

    In exact mode only the trivially rational cases ``k == 0`` or ``t == 0``
    are representable.
    """
    if k == 0:
        return one(exact)
    if exact:
        if t == 0:
            return Fraction(1)
        raise ValueError(f"exp({k}i*{t}) is not an exact Gaussian rational")
    return cmath.exp(1j * k * float(t))


def magnitude(x) -> float:
    return abs(complex(x))


def to_json(x) -> dict:
    if isinstance(x, GaussianRational):
        return {"gauss": [str(x.re), str(x.im)]}
    if isinstance(x, Rational):
        return {"rat": str(Fraction(x))}
    z = complex(x)
    return {"f64re": z.real, "f64im": z.imag}


def from_json(d: dict):
    if "rat" in d:
        return Fraction(d["rat"])
    if "gauss" in d:
        re, im = d["gauss"]
        return gauss(Fraction(re), Fraction(im))
    if "f64re" in d:
        return complex(d["f64re"], d.get("f64im", 0.0))
    raise ValueError(f"unrecognised scalar payload: {d!r}")


def fmt(x) -> str:
    """Short human readable rendering used in reports."""
    if isinstance(x, (Fraction, int, GaussianRational)):
        return str(x)
    z = complex(x)
    if z.imag == 0:
        return f"{z.real:.12g}"
    return f"{z.real:.12g}{z.imag:+.12g}j"
