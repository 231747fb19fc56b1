from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankbs.coeffs import I, ONE, ZERO, Coefficient, half_power, split_square
from rankbs.parsing import parse_expression
from rankbs.selfsim import make_odometer

RADICALS = (1, 2, 3, 6, 5)
fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def coefficients(draw):
    terms = draw(st.dictionaries(st.sampled_from(RADICALS), st.tuples(fractions, fractions), max_size=3))
    return Coefficient(terms)


def test_split_square():
    assert split_square(1) == (1, 1)
    assert split_square(12) == (2, 3)
    assert split_square(72) == (6, 2)


def test_sqrt_examples():
    assert Coefficient.sqrt(4) == 2
    assert Coefficient.sqrt(8) == Coefficient({2: (2, 0)})
    assert Coefficient.sqrt(Fraction(1, 2)) == Coefficient({2: (Fraction(1, 2), 0)})
    assert Coefficient.sqrt(-1) == I
    assert Coefficient.sqrt(0) == ZERO


def test_half_power():
    assert half_power((2, 3), (2, 0)) == 2
    assert half_power((2, 3), (1, 1)) == Coefficient.sqrt(6)
    assert half_power((2, 3), (-1, 0)) == Coefficient.sqrt(Fraction(1, 2))
    assert half_power((4,), (-3,)) == Coefficient.rational(Fraction(1, 8))


def test_coerce_rejects_floats():
    with pytest.raises(TypeError):
        Coefficient.coerce(0.5)
    with pytest.raises(TypeError):
        Coefficient.coerce(1j)
    assert Coefficient.coerce(Fraction(1, 3)) == Coefficient.rational(Fraction(1, 3))


@given(coefficients(), coefficients(), coefficients())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a + ZERO == a and a * ONE == a
    assert (a - a).is_zero()


@given(coefficients())
def test_inverse(a):
    if a.is_zero():
        with pytest.raises(ZeroDivisionError):
            a.inverse()
    else:
        assert a * a.inverse() == ONE
        assert a / a == ONE


@given(coefficients(), coefficients())
def test_conjugation_is_a_field_automorphism(a, b):
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    assert (a + b).conjugate() == a.conjugate() + b.conjugate()
    assert a.conjugate().conjugate() == a
    assert (a * a.conjugate()).conjugate() == a * a.conjugate()


@given(st.fractions(min_value=0, max_value=50, max_denominator=20))
def test_sqrt_squares_back(x):
    r = Coefficient.sqrt(x)
    assert r * r == Coefficient.rational(x)


@given(coefficients())
def test_string_round_trip_through_the_parser(a):
    ss = make_odometer(2, 3)
    A = parse_expression(ss, str(a))
    if a.is_zero():
        assert A.is_zero()
    else:
        assert len(A) == 1
        (_, c), = A
        assert c == a


def test_printing():
    assert str(ZERO) == "0"
    assert str(Coefficient.gaussian(1, -2)) == "1 - 2i"
    assert str(Coefficient.sqrt(2)) == "√2"
    assert Coefficient.rational(Fraction(3, 4)).as_fraction() == Fraction(3, 4)
    with pytest.raises(ValueError):
        I.as_fraction()
