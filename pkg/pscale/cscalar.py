"""Exact Gaussian rationals.

A ComplexScalar is a pair of Fractions. Arithmetic with ints and Fractions
stays exact; mixing with a float or complex operand degrades the result to a
plain Python complex (binary64), which is how numeric stages enter the
otherwise exact polynomial algebra.
"""
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Union

Coefficient = Union["ComplexScalar", complex]


def _iroot(n: int, k: int) -> int:
    "floor(n ** (1/k)) for n >= 0"
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def exact_root(q, k: int) -> Optional[Fraction]:
    """Exact k-th root of a nonnegative rational, or None when irrational."""
    q = Fraction(q)
    if q < 0 or k < 1:
        return None
    num = _iroot(q.numerator, k)
    den = _iroot(q.denominator, k)
    if num**k == q.numerator and den**k == q.denominator:
        return Fraction(num, den)
    return None


def exact_sqrt(q) -> Optional[Fraction]:
    return exact_root(q, 2)


def _fraction(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("ComplexScalar parts must be exact; got a float")
    return Fraction(x)


@dataclass(frozen=True, slots=True)
class ComplexScalar:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", _fraction(self.re))
        object.__setattr__(self, "im", _fraction(self.im))

    @staticmethod
    def coerce(x) -> Coefficient:
        """Exact inputs become a ComplexScalar, binary64 inputs a complex."""
        if isinstance(x, ComplexScalar):
            return x
        if isinstance(x, Rational):
            return ComplexScalar(x)
        if isinstance(x, (float, complex)):
            return complex(x)
        raise TypeError(f"unsupported coefficient type {type(x).__name__}")

    def conjugate(self) -> "ComplexScalar":
        return ComplexScalar(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def exact_abs(self) -> Optional[Fraction]:
        return exact_sqrt(self.abs2())

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __neg__(self) -> "ComplexScalar":
        return ComplexScalar(-self.re, -self.im)

    def __pos__(self) -> "ComplexScalar":
        return self

    def __add__(self, other):
        if isinstance(other, ComplexScalar):
            return ComplexScalar(self.re + other.re, self.im + other.im)
        if isinstance(other, Rational):
            return ComplexScalar(self.re + other, self.im)
        if isinstance(other, (float, complex)):
            return complex(self) + other
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (ComplexScalar, Rational, float, complex)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ComplexScalar):
            return ComplexScalar(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, Rational):
            return ComplexScalar(self.re * other, self.im * other)
        if isinstance(other, (float, complex)):
            return complex(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Rational):
            other = ComplexScalar(other)
        if isinstance(other, ComplexScalar):
            d = other.abs2()
            if d == 0:
                raise ZeroDivisionError("ComplexScalar division by zero")
            return self * ComplexScalar(other.re / d, -other.im / d)
        if isinstance(other, (float, complex)):
            return complex(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Rational):
            return ComplexScalar(other) / self
        if isinstance(other, (float, complex)):
            return other / complex(self)
        return NotImplemented

    def __pow__(self, exponent: int) -> "ComplexScalar":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return ONE / (self ** (-exponent))
        result, base = ONE, self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, ComplexScalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, Rational):
            return self.im == 0 and self.re == other
        if isinstance(other, (float, complex)):
            other = complex(other)
            if not (math.isfinite(other.real) and math.isfinite(other.imag)):
                return False
            return self.re == Fraction(other.real) and self.im == Fraction(other.imag)
        return NotImplemented

    def __hash__(self) -> int:
        # agree with hash(complex) / hash(Fraction) for equal values
        width = 2**sys.hash_info.width
        h = (hash(self.re) + sys.hash_info.imag * hash(self.im)) % width
        if h >= width // 2:
            h -= width
        return -2 if h == -1 else h

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        im = "i" if abs(self.im) == 1 else f"{abs(self.im)}i"
        if self.re == 0:
            return ("-" if self.im < 0 else "") + im
        return f"{self.re}{'-' if self.im < 0 else '+'}{im}"

    def __repr__(self) -> str:
        return f"ComplexScalar({self})"


ZERO = ComplexScalar(0)
ONE = ComplexScalar(1)
I = ComplexScalar(0, 1)


def is_exact(c) -> bool:
    return isinstance(c, (ComplexScalar, Rational))
