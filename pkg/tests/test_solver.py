from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetvar import operators as ops
from jetvar.calculus import PMKDV_WEIGHTS, weight_of
from jetvar.operators import CDiffOp, parse_op
from jetvar.solver import (
    AnsatzSpec,
    LinearIdentity,
    gen_ansatz,
    linear_kernel,
    solve_cosymmetries,
    solve_divergence_repr,
    solve_linear,
    solve_presymp_potential,
)
from jetvar.systems import builtin_system, parse_system

PM = builtin_system("pmkdv")
LINEAR = parse_system("indep: t, x\nrhs: u_xxx\nweights: t=-3, x=-1\n", "linear")


def p(text, s=PM):
    return s.parse(text)


def as_set(polys):
    return {str(q) for q in polys}


# -- ansatz enumeration -----------------------------------------------------

def test_ansatz_plain():
    assert as_set(gen_ansatz(PM, AnsatzSpec(2, 1))) == {"1", "u", "u_x", "u_xx"}


def test_ansatz_weight_two():
    got = as_set(gen_ansatz(PM, AnsatzSpec(2, 2, weight=2)))
    assert got == {"u_xx", "u_x^2", "u*u_xx"}


def test_ansatz_weight_one():
    assert as_set(gen_ansatz(PM, AnsatzSpec(1, 1, weight=1))) == {"u_x"}


def test_ansatz_respects_weight_and_is_sorted():
    monos = gen_ansatz(PM, AnsatzSpec(4, 3, 1, 1, weight=3))
    assert monos and all(weight_of(m, PMKDV_WEIGHTS) == 3 for m in monos)
    assert monos == gen_ansatz(PM, AnsatzSpec(4, 3, 1, 1, weight=3))


def test_ansatz_bounds_validated():
    with pytest.raises(ValueError):
        AnsatzSpec(-1, 2)


@given(st.integers(0, 3), st.integers(0, 2), st.integers(0, 1), st.integers(0, 1))
@settings(max_examples=20)
def test_ansatz_monotone_in_bounds(k, d, a, b):
    small = as_set(gen_ansatz(PM, AnsatzSpec(k, d, a, b)))
    assert small <= as_set(gen_ansatz(PM, AnsatzSpec(k + 1, d, a, b)))
    assert small <= as_set(gen_ansatz(PM, AnsatzSpec(k, d + 1, a, b)))
    assert small <= as_set(gen_ansatz(PM, AnsatzSpec(k, d, a + 1, b + 1)))


# -- exact linear algebra ---------------------------------------------------

def test_kernel_one_vector():
    ux = p("u_x")
    kb = linear_kernel([LinearIdentity([ux, ux])], [p("t"), p("x")])
    assert len(kb.basis) == 1
    (v,) = kb.basis
    assert v.terms[((0, 1),)] == -v.terms[((1, 1),)]


def test_kernel_trivial():
    kb = linear_kernel([LinearIdentity([p("u_x"), p("u_xx")])], [p("t"), p("x")])
    assert kb.basis == [] and kb.rank == 2


def test_solve_linear_inhomogeneous():
    # c0*u_x + c1*(u_x + u_xx) = 3*u_xx  ->  c1 = 3, c0 = -3
    sol = solve_linear([LinearIdentity([p("u_x"), p("u_x + u_xx")], p("-3*u_xx"))], 2)
    assert sol.consistent and sol.particular == [-3, 3] and sol.kernel == []


def test_solve_linear_inconsistent():
    sol = solve_linear([LinearIdentity([p("u_x")], p("u_xx"))], 1)
    assert not sol.consistent


def test_solver_handles_big_rationals():
    big = Fraction(10**30 + 7, 3**40)
    sol = solve_linear([LinearIdentity([p("u_x").scale(big)], p("u_x"))], 1)
    assert sol.particular == [-1 / big]


@given(st.lists(st.lists(st.integers(-4, 4), min_size=4, max_size=4), min_size=1, max_size=5))
@settings(max_examples=60)
def test_kernel_vectors_solve_the_system(rows):
    # row i becomes the coefficient of monomial t^i in each column polynomial
    cols = []
    for j in range(4):
        col = p("0")
        for i, row in enumerate(rows):
            col = col + p(f"t^{i}").scale(row[j])
        cols.append(col)
    sol = solve_linear([LinearIdentity(cols)], 4)
    assert sol.rank + len(sol.kernel) == 4
    for v in sol.kernel:
        for row in rows:
            assert sum(Fraction(a) * b for a, b in zip(row, v)) == 0


def test_solver_is_deterministic():
    spec = AnsatzSpec(4, 3, 1, 1)
    a = solve_cosymmetries(builtin_system("pmkdv"), spec)
    b = solve_cosymmetries(builtin_system("pmkdv"), spec)
    assert [str(q) for q in a.basis] == [str(q) for q in b.basis]
    assert a.metadata() == b.metadata()


# -- cosymmetries ------------------------------------------------------------

def test_cosymmetries_order_two():
    kb = solve_cosymmetries(PM, AnsatzSpec(2, 3))
    assert kb.contains(p("u_xx"))
    assert as_set(kb.basis) == {"u_xx"}


def test_cosymmetries_order_zero_empty():
    kb = solve_cosymmetries(PM, AnsatzSpec(0, 2))
    assert kb.basis == []


def test_cosymmetries_contain_scaling_cosymmetry():
    psi = PM.dbar(p("-3*t*(4*u_x^3 + u_xxx) - x*u_x"), "x")
    assert psi == p("-3*t*(12*u_x^2*u_xx + u_xxxx) - u_x - x*u_xx")
    kb = solve_cosymmetries(PM, AnsatzSpec(4, 3, 1, 1))
    assert kb.contains(psi)
    for q in kb.basis:
        assert not ops.adjoint_linearization_apply(PM, q)


def test_cosymmetry_space_grows_with_bounds():
    dims = [len(solve_cosymmetries(PM, AnsatzSpec(k, 3))) for k in range(0, 5)]
    assert dims == sorted(dims)


# -- presymplectic potentials ------------------------------------------------

def test_potential_zero_target():
    kb = solve_presymp_potential(PM, CDiffOp.zero(PM.ctx), AnsatzSpec(2, 3))
    assert kb.consistent and kb.contains(p("u_xx"))


def test_potential_two_dx_order_one_empty():
    kb = solve_presymp_potential(PM, parse_op("2*Dx", PM.ctx), AnsatzSpec(1, 1))
    assert kb.empty


def test_potential_inhomogeneous_path_on_linear_equation():
    kb = solve_presymp_potential(LINEAR, parse_op("2*Dx", LINEAR.ctx), AnsatzSpec(1, 1))
    assert kb.consistent
    assert kb.particular == p("u_x", LINEAR)
    assert ops.presymp_op(kb.particular, LINEAR) == parse_op("2*Dx", LINEAR.ctx)


# -- divergence representations ----------------------------------------------

def test_divrep_constructed_instance():
    spec = AnsatzSpec(2, 1)
    res = solve_divergence_repr(PM, p("4*u_x^3"), spec, spec)
    assert res.found
    assert PM.dbar_t(res.g2) - PM.dbar(res.g1, "x") == p("4*u_x^3")
    assert (res.g1, res.g2) == (p("u_xx"), p("u"))


def test_divrep_lagrangian_density_is_not_a_divergence():
    density = PM.reduce(p("1/2*u_t*u_x - u_x^4 + 1/2*u_xx^2"))
    assert density == p("u_x^4 + 1/2*u_x*u_xxx + 1/2*u_xx^2")
    res = solve_divergence_repr(PM, density, AnsatzSpec(3, 4, weight=3), AnsatzSpec(3, 4, weight=1))
    assert not res.found


def test_divrep_zero_density():
    spec = AnsatzSpec(1, 1)
    res = solve_divergence_repr(PM, p("0"), spec, spec)
    assert res.found and not res.g1 and not res.g2
