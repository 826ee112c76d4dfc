from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rhocalc.scalars import GaussianRational, I, div, parse_scalar, render, simplify, to_complex

fracs = st.builds(Fraction, st.integers(-60, 60), st.integers(1, 12))
gauss = st.builds(lambda a, b: simplify(GaussianRational(a, b)), fracs, fracs)


def test_render_formats():
    assert render(Fraction(3, 4)) == "3/4"
    assert render(2) == "2"
    assert render(GaussianRational(Fraction(1, 2), Fraction(-3, 4))) == "1/2-3/4 i"
    assert render(GaussianRational(0, 1)) == "0+1 i"


def test_real_results_collapse():
    assert I * I == -1
    assert isinstance(I * I, int)
    assert div(4, 2) == 2 and isinstance(div(4, 2), int)
    assert div(1, 3) == Fraction(1, 3)


@pytest.mark.parametrize("text,value", [
    ("1/2", Fraction(1, 2)),
    ("-3", -3),
    ("1/2+3/4 i", GaussianRational(Fraction(1, 2), Fraction(3, 4))),
    ("-1/2-1 i", GaussianRational(Fraction(-1, 2), -1)),
    ("2i", GaussianRational(0, 2)),
])
def test_parse(text, value):
    assert parse_scalar(text) == value


def test_parse_pair_and_reject():
    assert parse_scalar(["1/3", "-2"]) == GaussianRational(Fraction(1, 3), -2)
    with pytest.raises(ValueError):
        parse_scalar([1, 2, 3])
    with pytest.raises(ZeroDivisionError):
        GaussianRational(1, 1) / 0


@given(gauss)
def test_render_parse_roundtrip(z):
    assert parse_scalar(render(z)) == z


@given(gauss, gauss, gauss)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    if b:
        q = GaussianRational._coerce(a) / b
        assert q * b == a


@given(gauss)
def test_complex_conversion(z):
    w = to_complex(z)
    assert w.real == float(GaussianRational._coerce(z).re)
