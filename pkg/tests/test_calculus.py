from fractions import Fraction

import pytest
from hypothesis import given

from jetvar import calculus as calc
from jetvar.calculus import PMKDV_WEIGHTS, NotOnShellError
from jetvar.jetcore import JetContext, format_expr, parse_expr
from jetvar.systems import builtin_system

from strategies import onshell_polys, polys

TX = JetContext(("t", "x"))
TXY = JetContext(("t", "x", "y"))
X = JetContext(("x",))
PM = builtin_system("pmkdv")
PMY = builtin_system("pmkdv-y")

LAGRANGIAN = "1/2*u_t*u_x - u_x^4 + 1/2*u_xx^2"


def p(text, ctx=TX):
    return parse_expr(text, ctx)


# -- off-shell total derivatives --------------------------------------------

def test_total_derivative_examples():
    assert calc.total_derivative(p("u_x^2"), "x") == p("2*u_x*u_xx")
    assert calc.total_derivative(p("u_x", TXY), "y") == p("u_xy", TXY)
    assert calc.total_derivative(p("x*u"), "x") == p("u + x*u_x")


@given(polys(TXY, max_order=2))
def test_total_derivatives_commute(f):
    d = calc.total_derivative
    assert d(d(f, "x"), "y") == d(d(f, "y"), "x")
    assert d(d(f, "t"), "x") == d(d(f, "x"), "t")


@given(polys(TX, max_order=2), polys(TX, max_order=2))
def test_total_derivative_is_a_derivation(f, g):
    d = calc.total_derivative
    assert d(f * g, "x") == d(f, "x") * g + f * d(g, "x")


# -- on-shell reduction and D-bar -------------------------------------------

def test_reduce_examples():
    assert PM.reduce(p("u_t")) == p("4*u_x^3 + u_xxx")
    assert PMY.reduce(PMY.parse("u_xy")) == PMY.parse("0")
    assert PM.reduce(p("u_tx")) == p("12*u_x^2*u_xx + u_xxxx")


def test_dbar_examples():
    assert PM.dbar_t(p("u_x")) == p("12*u_x^2*u_xx + u_xxxx")
    assert PM.dbar(p("u_x*u_xx/2"), "x") == p("u_xx^2/2 + u_x*u_xxx/2")
    assert PM.dbar_t(p("u")) == p("4*u_x^3 + u_xxx")


def test_reduced_form_is_onshell():
    f = PM.reduce(p("u_ttx*u_t + t*u_tt"))
    assert PM.is_onshell(f)


def test_dbar_rejects_offshell_input():
    with pytest.raises(NotOnShellError):
        calc.dbar(p("u_t"), "x", PM)


@given(polys(TX, max_order=3, max_terms=3))
def test_reduce_commutes_with_total_derivative(f):
    for v in ("t", "x"):
        assert PM.reduce(calc.total_derivative(f, v)) == PM.dbar(PM.reduce(f), v)


@given(onshell_polys(PM))
def test_dbar_t_and_dbar_x_commute(f):
    assert PM.dbar_t(PM.dbar(f, "x")) == PM.dbar(PM.dbar_t(f), "x")


# -- Euler operator ---------------------------------------------------------

def test_euler_one_variable():
    assert calc.euler(p("u_x^2", X)) == p("-2*u_xx", X)


def test_euler_lagrangian():
    lam = p(LAGRANGIAN)
    assert calc.euler(lam) == p("-u_tx + 12*u_x^2*u_xx + u_xxxx")
    assert calc.euler(lam) == -calc.total_derivative(p("u_t - 4*u_x^3 - u_xxx"), "x")


def test_euler_three_variable_lagrangian():
    lam3 = p(LAGRANGIAN + " + 1/2*u_xy*u_yy", TXY)
    expected = -calc.total_derivative(p("u_t - 4*u_x^3 - u_xxx - u_yyy", TXY), "x")
    assert calc.euler(lam3) == expected


@given(polys(TXY, max_order=2, max_terms=3), polys(TXY, max_order=2, max_terms=3))
def test_euler_kills_divergences(f, g):
    div = calc.total_derivative(f, "x") + calc.total_derivative(g, "y")
    assert not calc.euler(div)


# -- single-variable exactness ----------------------------------------------

def test_exactness_witness():
    g, e = calc.exactness_x(p("u_x*u_xx"), PM)
    assert e is None and g == p("u_x^2/2")


def test_exactness_non_exact():
    g, e = calc.exactness_x(p("u_x^2"), PM)
    assert g is None and e == p("-2*u_xx")


def test_exactness_needs_onshell():
    with pytest.raises(NotOnShellError):
        calc.exactness_x(p("u_t"), PM)


@given(onshell_polys(PM, max_order=3))
def test_exactness_complete_on_derivatives(g):
    f = PM.dbar(g, "x")
    h, e = calc.exactness_x(f, PM)
    assert e is None
    assert PM.dbar(h, "x") == f
    # witnesses are unique up to a function of t alone
    assert not (h - g).jet_ids()
    assert (h - g).degree_in(TX.index("x")) == 0


@given(onshell_polys(PM, max_order=3))
def test_exactness_sound(f):
    g, e = calc.exactness_x(f, PM)
    if e is None:
        assert PM.dbar(g, "x") == f
    else:
        assert e == calc.euler_x(f, PM) and e


# -- order and weight -------------------------------------------------------

def test_order_examples():
    assert calc.order_of(p("4*u_x^3 + u_xxx"), PM) == 3
    assert calc.order_of(p("t^2 + x"), PM) == calc.NEG_INF
    psi = p("-3*t*(12*u_x^2*u_xx + u_xxxx) - u_x - x*u_xx")
    assert calc.order_of(psi, PM) == 4


def test_weight_examples():
    assert calc.weight_of(p("4*u_x^3 + u_xxx"), PMKDV_WEIGHTS) == 3
    assert calc.weight_of(PM.reduce(p(LAGRANGIAN)), PMKDV_WEIGHTS) == 4
    assert calc.weight_of(p("u_x + u_xx"), PMKDV_WEIGHTS) is None


@given(onshell_polys(PM, max_order=3))
def test_dbar_x_raises_weight_by_one(f):
    w = calc.weight_of(f, PMKDV_WEIGHTS)
    if w is None:
        return
    df = PM.dbar(f, "x")
    assert not df or calc.weight_of(df, PMKDV_WEIGHTS) == w + 1
    dt = PM.dbar_t(f)
    assert not dt or calc.weight_of(dt, PMKDV_WEIGHTS) == w + 3


def test_scaling_field_on_characteristic():
    # X = 3t d_t + x d_x - sum j u_j d_{u_j} scales a weight-w monomial by -w
    assert calc.scaling_apply(p("t*u_xxx"), PM) == 0 * p("t")
    assert calc.scaling_apply(p("u_x"), PM) == p("-u_x")
    assert calc.scaling_apply(p("x*t"), PM) == p("4*x*t")


def test_jet_helper_and_formatting():
    assert format_expr(calc.jet(TX, x=2)) == "u_xx"
    assert calc.total_derivative_alpha(p("u"), (1, 2)) == p("u_txx")


def test_fraction_coefficients_survive_reduction():
    f = PM.reduce(p("1/3*u_t"))
    assert f == p("4/3*u_x^3 + 1/3*u_xxx")
    assert all(isinstance(c, (int, Fraction)) for c in f.terms.values())
