from fractions import Fraction

import pytest
from hypothesis import given

from jetvar.jetcore import (
    DiffPoly,
    JetContext,
    OrderCapError,
    ParseError,
    format_expr,
    parse_expr,
)

from strategies import big_coeffs, polys

TX = JetContext(("t", "x"))
TXY = JetContext(("t", "x", "y"))


def p(text, ctx=TX):
    return parse_expr(text, ctx)


# -- parsing ----------------------------------------------------------------

def test_parse_pmkdv_rhs():
    f = p("4*u_x^3 + u_xxx")
    assert f.terms == {((TX.jet_id((0, 1)), 3),): 4, ((TX.jet_id((0, 3)), 1),): 1}


def test_parse_zero_is_empty():
    assert p("0").terms == {}
    assert not p("0")


def test_bracket_and_suffix_forms_cancel():
    assert p("u[0,1]^2 - u_x*u_x") == p("0")


def test_parse_rationals_and_parentheses():
    assert p("(1/2)*u_x*(2*u_xx)") == p("u_x*u_xx")
    assert p("-(u - t)^2") == p("-u^2 + 2*u*t - t^2")


def test_mixed_partials_commute_in_names():
    assert p("u_xt", TXY) == p("u_tx", TXY) == p("u[1,1,0]", TXY)


@pytest.mark.parametrize("text", ["u_x +", "u_x^(2)", "u_x^-1", "u_x^1.5", "3 3", "(u", "u_q", "v"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        p(text)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as err:
        p("u_x + * u")
    assert err.value.pos == 6


def test_order_cap():
    ctx = JetContext(("t", "x"), max_order=3)
    parse_expr("u_xxx", ctx)
    with pytest.raises(OrderCapError):
        parse_expr("u_xxxx", ctx)


# -- formatting -------------------------------------------------------------

def test_format_zero():
    assert format_expr(p("0")) == "0"


def test_format_single_term():
    assert format_expr(p("u_x*u_xx")) == "u_x*u_xx"


def test_format_is_canonical():
    assert format_expr(p("u_xx*u_x")) == format_expr(p("u_x*u_xx"))


def test_format_rationals():
    assert format_expr(p("u_xx^2/2 - 3/4*t")) == "1/2*u_xx^2 - 3/4*t"


@given(polys(TXY))
def test_format_parse_round_trip(f):
    assert parse_expr(format_expr(f), TXY) == f


@given(polys(TX, coeffs=big_coeffs))
def test_round_trip_with_big_rationals(f):
    assert parse_expr(format_expr(f), TX) == f


# -- ring structure ---------------------------------------------------------

def test_add_inverse():
    assert p("u_x") + (-p("u_x")) == p("0")


def test_mul_square():
    assert p("u_x") * p("u_x") == p("u_x^2")


def test_binomial():
    assert p("u_x + u_xx") ** 2 == p("u_x^2 + 2*u_x*u_xx + u_xx^2")


@given(polys(TX), polys(TX), polys(TX))
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == DiffPoly(TX)
    assert a * 1 == a


@given(polys(TX, coeffs=big_coeffs, max_terms=3), polys(TX, coeffs=big_coeffs, max_terms=3))
def test_big_rational_arithmetic_is_exact(a, b):
    assert (a + b) - b == a
    assert (a * b) - a * b == DiffPoly(TX)
    for c in a.terms.values():
        assert isinstance(c, (int, Fraction))


def test_scalar_division():
    assert p("u_x") / 3 == p("1/3*u_x")
    with pytest.raises(ZeroDivisionError):
        p("u_x") / 0


def test_equal_polys_hash_equal():
    assert hash(p("u_x*u_xx + t")) == hash(p("t + u_xx*u_x"))


def test_partial_derivative_and_subs():
    ux = TX.jet_id((0, 1))
    f = p("u_x^3*t + u_x")
    assert f.diff(ux) == p("3*u_x^2*t + 1")
    assert f.subs({ux: p("x")}) == p("x^3*t + x")
    assert f.degree_in(ux) == 3
    assert f.coefficient_of(ux, 3) == p("t")


def test_division_binds_like_multiplication():
    assert p("u_x^2/2") == p("1/2*u_x^2")
    assert p("3/4*t") == p("t*3/4")


@pytest.mark.parametrize("text", ["u/0", "u/u_x", "u/(1 - 1)"])
def test_division_by_non_constant_or_zero(text):
    with pytest.raises(ParseError):
        p(text)
