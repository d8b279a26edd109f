"""Exact arithmetic in a real quadratic field Q(sqrt(d)).

A :class:`Scalar` is ``a + b*sqrt(d)`` with rational ``a`` and ``b``.  ``d = 0``
denotes the plain rationals.  Rational scalars (``b == 0``) mix freely with any
field; combining two genuinely irrational scalars from different fields raises
:class:`FieldMismatchError`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Union

Rational = Union[int, Fraction]


class FieldMismatchError(ValueError):
    pass


def _is_squarefree(d: int) -> bool:
    if d < 0:
        return False
    if d in (0, 1):
        return d == 0
    p = 2
    while p * p <= d:
        if d % (p * p) == 0:
            return False
        p += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Radicand of the field; ``d = 0`` means Q."""

    d: int = 0

    def __post_init__(self):
        if not _is_squarefree(self.d):
            raise ValueError(f"radicand must be 0 or a square-free integer > 1, got {self.d}")

    def sqrt(self) -> "Scalar":
        if self.d == 0:
            raise ValueError("Q has no sqrt generator")
        return Scalar(0, 1, self.d)

    def __call__(self, a: Rational = 0, b: Rational = 0) -> "Scalar":
        return Scalar(a, b, self.d)


@total_ordering
class Scalar:
    __slots__ = ("a", "b", "d")

    def __init__(self, a: Rational = 0, b: Rational = 0, d: int = 0):
        a = Fraction(a)
        b = Fraction(b)
        if d == 0 and b != 0:
            raise ValueError("irrational part given for the rational field")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # -- coercion -------------------------------------------------------
    @staticmethod
    def coerce(x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, (int, Fraction)):
            return Scalar(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Scalar")

    def _field_with(self, other: "Scalar") -> int:
        if self.d == other.d:
            return self.d
        if other.b == 0:
            return self.d
        if self.b == 0:
            return other.d
        raise FieldMismatchError(f"Q(sqrt({self.d})) vs Q(sqrt({other.d}))")

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        d = self._field_with(other)
        return Scalar(self.a + other.a, self.b + other.b, d)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        d = self._field_with(other)
        return Scalar(
            self.a * other.a + self.b * other.b * d,
            self.a * other.b + self.b * other.a,
            d,
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """Field norm ``a^2 - d b^2``; zero only for zero."""
        return self.a * self.a - self.d * self.b * self.b

    def conjugate(self) -> "Scalar":
        return Scalar(self.a, -self.b, self.d)

    def inv(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero Scalar")
        n = self.norm()
        return Scalar(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inv()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inv() ** (-k)
        result = Scalar(1, 0, self.d)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- predicates / ordering -----------------------------------------
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        """Exact sign of ``a + b sqrt(d)``."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with d b^2
        lhs = self.a * self.a
        rhs = self.d * self.b * self.b
        if lhs == rhs:
            return 0
        return sa if lhs > rhs else sb

    def __eq__(self, other):
        try:
            other = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        if self.a != other.a or self.b != other.b:
            return False
        return self.b == 0 or self.d == other.d

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __hash__(self):
        return hash((self.a, self.b, self.d if self.b else 0))

    def __bool__(self):
        return not self.is_zero()

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- conversion -----------------------------------------------------
    def rational_coordinates(self) -> tuple[Fraction, Fraction]:
        return self.a, self.b

    def __float__(self) -> float:
        return embed(self)

    def __repr__(self):
        return f"Scalar({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


def embed(x: Scalar) -> float:
    """Float value of ``x``, avoiding cancellation between the two parts."""
    x = Scalar.coerce(x)
    if x.b == 0:
        return float(x.a)
    if x.a == 0:
        return float(x.b) * math.sqrt(x.d)
    if (x.a > 0) == (x.b > 0):
        return float(x.a) + float(x.b) * math.sqrt(x.d)
    # a + b r = (a^2 - d b^2) / (a - b r); the denominator has no cancellation
    num = float(x.norm())
    den = float(x.a) - float(x.b) * math.sqrt(x.d)
    return num / den


def rational_coordinates(x: Scalar) -> tuple[Fraction, Fraction]:
    return Scalar.coerce(x).rational_coordinates()


# -- string form -----------------------------------------------------------

_RAT = r"[+-]?\s*(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:\s*/\s*\d+)?"
_SCALAR_RE = re.compile(
    rf"^\s*(?P<a>{_RAT})?\s*(?:(?P<op>[+-])?\s*(?:(?P<b>{_RAT})\s*\*\s*)?sqrt\(\s*(?P<d>\d+)\s*\))?\s*$"
)


def _parse_rational(s: str) -> Fraction:
    s = s.replace(" ", "")
    if "/" in s:
        p, q = s.split("/")
        return Fraction(p) / Fraction(q)
    return Fraction(s)


def parse_scalar(text: str, d: int | None = None) -> Scalar:
    """Parse ``R`` or ``R + R*sqrt(d)`` (``R`` a decimal or ``p/q``).

    Also accepts ``sqrt(d)``, ``-sqrt(d)``, ``R - R*sqrt(d)``.  When ``d`` is
    given, a radicand in the text must agree with it.
    """
    if not isinstance(text, str):
        if isinstance(text, (int, Fraction)):
            return Scalar(text, 0, d or 0)
        raise TypeError(f"expected a Scalar string, got {type(text).__name__}")
    m = _SCALAR_RE.match(text)
    if not m or (m.group("a") is None and m.group("d") is None):
        raise ValueError(f"malformed scalar {text!r}")
    a = _parse_rational(m.group("a")) if m.group("a") else Fraction(0)
    if m.group("d") is None:
        return Scalar(a, 0, d or 0)
    rad = int(m.group("d"))
    if d is not None and d != rad:
        raise FieldMismatchError(f"{text!r} uses sqrt({rad}) in a Q(sqrt({d})) model")
    FieldSpec(rad)
    b = _parse_rational(m.group("b")) if m.group("b") else Fraction(1)
    if m.group("op") == "-":
        b = -b
    elif m.group("op") is None and m.group("a") is not None:
        # "3 sqrt(2)" without an operator is ambiguous
        raise ValueError(f"malformed scalar {text!r}")
    return Scalar(a, b, rad)


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x: Scalar) -> str:
    if x.b == 0:
        return _fmt_rational(x.a)
    return f"{_fmt_rational(x.a)} + {_fmt_rational(x.b)}*sqrt({x.d})"


def sqrt_of(d: int) -> Scalar:
    return FieldSpec(d).sqrt()
