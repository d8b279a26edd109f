from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
import hypothesis.strategies as st

from cylred.scalars import (FieldMismatchError, FieldSpec, Scalar, embed, format_scalar, parse_scalar,
                            sqrt_of)

from strategies import nonzero, scalars


@given(scalars(), scalars(), scalars())
def test_ring_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert x - x == Scalar(0, 0, 2)


@given(nonzero)
def test_inverse(x):
    assert x * x.inv() == Scalar(1, 0, 2)
    assert (1 / x) * x == 1


@given(scalars())
def test_format_parse_round_trip(x):
    assert parse_scalar(format_scalar(x), 2) == x


@given(scalars())
def test_embedding_agrees_with_high_precision(x):
    mpmath.mp.dps = 50
    ref = mpmath.mpf(x.a.numerator) / x.a.denominator + mpmath.mpf(x.b.numerator) / x.b.denominator * mpmath.sqrt(2)
    assert abs(embed(x) - float(ref)) <= 1e-15 * max(1.0, abs(float(ref)))


@given(scalars(), scalars())
def test_order_is_exact_and_total(x, y):
    assert (x < y) + (y < x) + (x == y) == 1
    if x < y:
        assert embed(x) <= embed(y)


def test_sign_of_near_cancellation():
    # 99/70 is a convergent of sqrt 2; sign must be exact, not float-based
    x = sqrt_of(2) - Fraction(99, 70)
    assert x.sign() == -1
    y = sqrt_of(2) - Fraction(140, 99)
    assert y.sign() == 1


@pytest.mark.parametrize("text,value", [
    ("-1", Scalar(-1)),
    ("0 + 1*sqrt(2)", Scalar(0, 1, 2)),
    ("3/4 - 2*sqrt(2)", Scalar(Fraction(3, 4), -2, 2)),
    ("sqrt(2)", Scalar(0, 1, 2)),
    ("1.25", Scalar(Fraction(5, 4))),
])
def test_parse_examples(text, value):
    assert parse_scalar(text) == value


@pytest.mark.parametrize("bad", ["", "1/", "sqrt", "3 sqrt(2)", "1 + x*sqrt(2)", "abc"])
def test_parse_rejects_malformed(bad):
    with pytest.raises(ValueError):
        parse_scalar(bad)


def test_field_mismatch():
    with pytest.raises(FieldMismatchError):
        Scalar(0, 1, 2) + Scalar(0, 1, 3)
    with pytest.raises(FieldMismatchError):
        parse_scalar("1 + 1*sqrt(3)", 2)


def test_non_squarefree_field_rejected():
    with pytest.raises(ValueError):
        FieldSpec(4)


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_norm_multiplicative(a, b):
    x = Scalar(a, b, 2)
    y = Scalar(b - 1, a + 2, 2)
    assert (x * y).norm() == x.norm() * y.norm()
