"""Exact scalar arithmetic for the operator lab.

Banded operator coefficients are ordinary Python numbers: int, Fraction,
QComplex (complex with Fraction parts), float or complex.  Arithmetic among
the first three stays exact; the moment a float or complex enters, results
degrade to machine complex.  That is the whole contract: rationals are
preserved until arithmetic demands floats.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

__all__ = ["QComplex", "parse_rational", "format_rational", "conj", "abs2",
           "one_over", "to_complex"]

_RAT = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or "p" into a Fraction.  Raises ValueError otherwise."""
    text = text.strip()
    if not _RAT.match(text):
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(text)


def format_rational(x) -> str:
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


class QComplex:
    """Complex number with exact rational real and imaginary parts.

    Supports +, -, * with int/Fraction/QComplex exactly and with float/complex
    by degrading to machine complex.  Hashable and immutable.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("QComplex is immutable")

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, QComplex):
            return other
        if isinstance(other, (int, Fraction)):
            return QComplex(other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) + other
        return QComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) - other
        return QComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return other - complex(self)
        return QComplex(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) * other
        return QComplex(self.re * o.re - self.im * o.im,
                        self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self):
        return QComplex(-self.re, -self.im)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) / other
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero QComplex")
        return QComplex((self.re * o.re + self.im * o.im) / d,
                        (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return other / complex(self)
        return o / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return complex(self) ** n
        if n < 0:
            return (QComplex(1, 0) / self) ** (-n)
        out = QComplex(1, 0)
        base = self
        k = n
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparisons and conversions -------------------------------------

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) == other
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return math.sqrt(float(self.re * self.re + self.im * self.im))

    def conjugate(self):
        return QComplex(self.re, -self.im)

    def __repr__(self):
        return f"QComplex({self.re!r}, {self.im!r})"


def conj(x):
    """Exact conjugate for any supported coefficient type."""
    if isinstance(x, (int, Fraction)):
        return x
    if isinstance(x, QComplex):
        return x.conjugate()
    return x.conjugate() if hasattr(x, "conjugate") else complex(x).conjugate()


def abs2(x):
    """|x|^2, exact (int/Fraction result) for exact inputs."""
    if isinstance(x, (int, Fraction)):
        return x * x
    if isinstance(x, QComplex):
        return x.re * x.re + x.im * x.im
    z = complex(x)
    return z.real * z.real + z.imag * z.imag


def one_over(x):
    """Exact reciprocal for exact inputs, complex otherwise."""
    if isinstance(x, int):
        return Fraction(1, x)
    if isinstance(x, Fraction):
        return 1 / x
    if isinstance(x, QComplex):
        return QComplex(1, 0) / x
    return 1.0 / complex(x)


def to_complex(x) -> complex:
    if isinstance(x, QComplex):
        return complex(x)
    return complex(x)
