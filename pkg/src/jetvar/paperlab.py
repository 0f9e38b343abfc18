"""Named, exact verifications of the potential mKdV computations.

Each check builds its own systems, so checks are independent and can run in
any order.  A check returns ``(ok, details, counterexample)``; ``run_check``
adds timing and packages a :class:`CheckResult`.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Dict, List, Optional, Sequence

from . import calculus as calc
from . import operators as ops
from . import solver
from .jetcore import DiffPoly, JetContext, parse_expr, zero
from .sampling import random_offshell, random_onshell, random_op
from .systems import builtin_system

SEED = 20240601
N_CASES = 100

LAGRANGIAN = "1/2*u_t*u_x - u_x^4 + 1/2*u_xx^2"
SCALING_CHARACTERISTIC = "-3*t*(4*u_x^3 + u_xxx) - x*u_x"


@dataclass
class CheckResult:
    check_id: str
    status: str
    details: str
    elapsed_ms: float
    counterexample: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def as_dict(self) -> dict:
        d = {"check_id": self.check_id, "status": self.status,
             "elapsed_ms": round(self.elapsed_ms, 3), "details": self.details}
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        return d


CATALOGUE: Dict[str, Callable] = {}


def check(check_id: str):
    def register(fn):
        CATALOGUE[check_id] = fn
        return fn
    return register


def _identity(name: str, residual) -> tuple:
    """Pass iff ``residual`` is zero; the residual is the counterexample."""
    if not residual:
        return True, f"{name}: residual is exactly 0", None
    return False, f"{name}: nonzero residual", str(residual)


def _all(results: Sequence[tuple]) -> tuple:
    for ok, details, cex in results:
        if not ok:
            return ok, details, cex
    return True, "; ".join(d for _, d, _ in results), None


def _property(name: str, case: Callable[[random.Random], Optional[str]],
              n: int = N_CASES, seed: int = SEED) -> tuple:
    rng = random.Random(f"{seed}:{name}")
    for i in range(n):
        cex = case(rng)
        if cex is not None:
            return False, f"{name}: failed at case {i} of {n}", cex
    return True, f"{name}: {n} random cases exact (seed {seed})", None


def _pmkdv():
    return builtin_system("pmkdv")


def _dot(p: DiffPoly, sys) -> DiffPoly:
    """Derivative of a function of t alone."""
    return p.diff(sys.ctx.index(sys.time_var))


def _dx(f, sys, i=1):
    return sys.dx_power(f, i)


# -- variational identities -------------------------------------------------

@check("euler-lagrangian-2var")
def _euler_2var():
    s = _pmkdv()
    lam = s.parse(LAGRANGIAN)
    eq = s.parse("u_t - 4*u_x^3 - u_xxx")
    return _identity("E(lambda) + D_x(u_t - 4u_x^3 - u_xxx)",
                     calc.euler(lam) + calc.total_derivative(eq, "x"))


@check("euler-lagrangian-3var")
def _euler_3var():
    s = builtin_system("pmkdv-3d")
    lam3 = s.parse(LAGRANGIAN + " + 1/2*u_xy*u_yy")
    eq = s.parse("u_t - 4*u_x^3 - u_xxx - u_yyy")
    return _identity("E(lambda + u_xy u_yy/2) + D_x(u_t - 4u_x^3 - u_xxx - u_yyy)",
                     calc.euler(lam3) + calc.total_derivative(eq, "x"))


# -- structural properties of the on-shell calculus --------------------------

@check("prop1")
def _prop1():
    s = _pmkdv()

    def case(rng):
        i = rng.randint(1, 5)
        j = rng.randint(0, 6)
        f = random_onshell(rng, s, rng.randint(0, 6), 3, 3)
        lhs = calc.partial_u(_dx(f, s, i), s, j)
        rhs = sum((_dx(calc.partial_u(f, s, j - r), s, i - r).scale(comb(i, r))
                   for r in range(min(i, j) + 1)), zero(s.ctx))
        if lhs != rhs:
            return f"i={i} j={j} f={f}"
        return None

    return _property("d_{u_j} Dx^i = sum_r C(i,r) Dx^(i-r) d_{u_(j-r)}", case)


@check("prop2")
def _prop2():
    s = _pmkdv()

    def case(rng):
        sv = rng.randint(1, 5)
        psi = random_onshell(rng, s, sv, 3, 3)
        lhs = calc.partial_u(ops.adjoint_linearization_apply(s, psi), s, sv + 2)
        rhs = _dx(calc.partial_u(psi, s, sv), s).scale(3)
        if lhs != rhs:
            return f"s={sv} psi={psi} lhs={lhs} rhs={rhs}"
        return None

    return _property("d_{u_(s+2)} l_E^*(psi) = 3 Dx(d_{u_s} psi)", case)


@check("commutator-dt")
def _commutator():
    s = _pmkdv()
    # Dx^i(4u_1^3) + u_(i+3), built without the system's cache
    flows = [s.parse("4*u_x^3")]
    for _ in range(12):
        flows.append(calc.total_derivative(flows[-1], "x"))

    def case(rng):
        j = rng.randint(0, 7)
        f = random_onshell(rng, s, rng.randint(0, 5), 3, 3)
        lhs = (calc.partial_u(s.dbar_t(f), s, j) - s.dbar_t(calc.partial_u(f, s, j)))
        k = calc.order_of(f, s)
        rhs = zero(s.ctx)
        if k != calc.NEG_INF:
            for i in range(k + 1):
                rhs = rhs + calc.partial_u(flows[i] + s.u(i + 3), s, j) * calc.partial_u(f, s, i)
        if lhs != rhs:
            return f"j={j} f={f}"
        return None

    return _property("[d_{u_j}, D_t] = d_{u_j}(Dx^i(4u_1^3) + u_(i+3)) d_{u_i}", case)


# -- lemma spot checks ------------------------------------------------------

A_SAMPLES = ("t", "t^2")


def _lemma_b(s, a: DiffPoly, b: DiffPoly, k: int) -> DiffPoly:
    x = s.parse("x")
    return _dot(a, s) * x / 3 + a * s.u(1) ** 2 * (4 * (k - 1)) + b


@check("eq-firstterm")
def _firstterm():
    s = _pmkdv()
    out = []
    for k in (7, 8):
        for a_text in A_SAMPLES:
            a = s.parse(a_text)
            u1 = s.u(1)
            lhs = -ops.adjoint_linearization_apply(s, a * s.u(k))
            rhs = (_dot(a, s) * s.u(k) + a * _dx(4 * u1 ** 3, s, k)
                   - 12 * a * u1 ** 2 * s.u(k + 1) - 12 * a * _dx(u1 ** 2, s) * s.u(k))
            out.append(_identity(f"k={k}, a={a_text}", lhs - rhs))
    return _all(out)


@check("lemma2-relation")
def _lemma2():
    s = _pmkdv()
    out = []
    k = 8
    for a_text in A_SAMPLES:
        a = s.parse(a_text)
        lhs = -calc.partial_u(ops.adjoint_linearization_apply(s, a * s.u(k)), s, k)
        rhs = _dot(a, s) + 12 * (k - 1) * a * _dx(s.u(1) ** 2, s)
        out.append(_identity(f"k={k}, a={a_text}", lhs - rhs))
    return _all(out)


@check("lemma3-cancellation")
def _lemma3():
    s = _pmkdv()
    out = []
    k = 8
    for a_text in A_SAMPLES:
        a = s.parse(a_text)
        big_b = _lemma_b(s, a, zero(s.ctx), k)
        big_c = _dx(big_b, s) * Fraction(k - 2, 2)
        psi0 = a * s.u(k) + big_b * s.u(k - 2) + big_c * s.u(k - 3)
        op = ops.presymp_op(psi0, s)
        for power in (k, k - 1, k - 3):
            out.append(_identity(f"a={a_text}: coefficient of Dx^{power}", op.coeff(power)))
    return _all(out)


def xtotalder_display(s, a: DiffPoly, b: DiffPoly, k: int) -> DiffPoly:
    """The explicit form of D_t(B) - 12(k-2) u_1^2 Dx(B) with B = a'x/3 + 4(k-1)a u_1^2 + b."""
    u1 = s.u(1)
    x = s.parse("x")
    ad = _dot(a, s)
    return (_dot(ad, s) * x / 3 + 12 * (k - 1) * ad / 3 * u1 ** 2
            + 8 * (k - 1) * a * u1 * _dx(s.rhs, s) + _dot(b, s)
            - 12 * (k - 2) * u1 ** 2 * (ad / 3 + 4 * (k - 1) * a * _dx(u1 ** 2, s)))


@check("lemma4-exactness")
def _lemma4():
    s = _pmkdv()
    out = []
    k = 8
    for a_text in A_SAMPLES:
        a = s.parse(a_text)
        b = zero(s.ctx)
        big_b = _lemma_b(s, a, b, k)
        lhs = -calc.partial_u(ops.adjoint_linearization_apply(s, big_b * s.u(k - 2)), s, k - 2)
        u1 = s.u(1)
        f1 = -_dx(big_b, s, 2) + 12 * (k - 3) * u1 ** 2 * big_b
        out.append(_identity(f"a={a_text}: display", lhs - _dx(f1, s) - xtotalder_display(s, a, b, k)))
        target = lhs - 4 * _dot(a, s) * u1 ** 2
        witness, euler_res = calc.exactness_x(target, s)
        if witness is None:
            out.append((False, f"a={a_text}: not in the image of Dx", str(euler_res)))
        else:
            out.append((True, f"a={a_text}: witness f = {witness}", None))
    return _all(out)


# -- cosymmetries, presymplectic operators and the bounded search -------------

@check("scaling-cosym")
def _scaling_cosym():
    s = _pmkdv()
    phi = s.parse(SCALING_CHARACTERISTIC)
    psi = calc.total_derivative(phi, "x")
    op = ops.presymp_op(psi, s)
    return _all([
        _identity("l_E^*(Dx(phi))", ops.adjoint_linearization_apply(s, psi)),
        (op.is_zero(), "l_psi - l_psi^* = 0" if op.is_zero() else "presymplectic operator nonzero",
         None if op.is_zero() else str(op)),
        _identity("l_E^*(u_2)", ops.adjoint_linearization_apply(s, s.u(2))),
    ])


@check("scaling-covariance")
def _scaling_covariance():
    s = _pmkdv()
    phi = s.parse(SCALING_CHARACTERISTIC)
    lphi_adj = ops.op_adjoint(ops.linearize(phi, s))
    kb = solver.solve_cosymmetries(s, solver.AnsatzSpec(4, 3, 1, 1))
    out = [(len(kb.basis) > 0, f"{len(kb.basis)} cosymmetries in the ansatz", None)]
    for psi in kb.basis:
        lie = ops.evolutionary_apply(phi, psi, s) + ops.op_apply(lphi_adj, psi)
        out.append(_identity(f"(E_phi + l_phi^*)psi - (X+1)psi for psi={psi}",
                             lie - calc.scaling_apply(psi, s) - psi))
        out.append(_identity(f"l_E^* of the Lie derivative of {psi}",
                             ops.adjoint_linearization_apply(s, lie)))
    return _all(out)


ORDER6_SPEC = solver.AnsatzSpec(max_order=6, u_deg=5, t_deg=2, x_deg=2)


@check("order6-nonexistence")
def _order6():
    s = _pmkdv()
    kb = solver.solve_presymp_potential(s, ops.CDiffOp.dx(s.ctx), ORDER6_SPEC)
    meta = kb.metadata()
    details = (f"bounded polynomial ansatz {ORDER6_SPEC.as_dict()}: "
               f"{meta['n_unknowns']} unknowns, {meta['n_equations']} equations, "
               f"rank {meta['rank']}, {meta['blocks']} blocks; no cosymmetry psi with "
               f"l_psi - l_psi^* = Dx" if kb.empty else "")
    if kb.empty:
        return True, details, None
    return False, f"solution found; metadata {meta}", str(kb.particular)


# -- conservation laws with trivial characteristics -----------------------------

@check("example-decomposition")
def _decomposition():
    ctx = JetContext(("t", "x", "y"))
    p = lambda text: parse_expr(text, ctx)
    lam = p(LAGRANGIAN)
    res = (calc.total_derivative(lam, "y") - p("u_xy") * p("u_t - 4*u_x^3 - u_xxx")
           - calc.total_derivative(p("1/2*u_x*u_y"), "t")
           - calc.total_derivative(p("u_xx*u_xy - 1/2*u_t*u_y"), "x"))
    return _identity("D_y(lambda) - u_xy F - D_t(u_x u_y/2) - D_x(u_xx u_xy - u_t u_y/2)", res)


@check("trivial-characteristic")
def _trivial_char():
    s = builtin_system("pmkdv-y")
    return _identity("u_xy on u_t = 4u_x^3 + u_xxx, u_y = 0", s.reduce(s.parse("u_xy")))


@check("remark-density")
def _remark_density():
    out = []
    for name in ("pmkdv", "pmkdv-y"):
        s = builtin_system(name)
        res = (s.reduce(s.parse(LAGRANGIAN)) - s.dbar(s.parse("1/2*u_x*u_xx"), "x")
               - s.parse("u_x^4"))
        out.append(_identity(f"{name}: lambda| - Dx(u_x u_xx/2) - u_x^4", res))
    return _all(out)


def nontrivial_cl_specs():
    g1 = solver.AnsatzSpec(max_order=4, u_deg=4, t_deg=1, x_deg=1, weight=3)
    g2 = solver.AnsatzSpec(max_order=4, u_deg=4, t_deg=1, x_deg=1, weight=1)
    return g1, g2


@check("nontrivial-cl-bounded")
def _nontrivial_cl():
    s = _pmkdv()
    density = s.reduce(s.parse(LAGRANGIAN))
    g1, g2 = nontrivial_cl_specs()
    res = solver.solve_divergence_repr(s, density, g1, g2)
    if res.found:
        return False, "density is a divergence within the ansatz", f"g1={res.g1}; g2={res.g2}"
    return True, (f"bounded scope only: no g1 in {g1.as_dict()}, g2 in {g2.as_dict()} with "
                  f"lambda| = D_t(g2) - D_x(g1); {res.n_unknowns} unknowns, rank {res.rank}"), None


@check("xi-onshell-closed")
def _xi_closed():
    s = builtin_system("pmkdv-3d")
    p = s.parse
    lam = p(LAGRANGIAN)
    xi_t = p("-1/2*u_x*u_y")
    xi_x = p("1/2*u_t*u_y + 1/2*u_yy^2 - u_xx*u_xy")
    xi_y = lam - p("u_xy*u_yy")
    div = (calc.total_derivative(xi_t, "t") + calc.total_derivative(xi_x, "x")
           + calc.total_derivative(xi_y, "y"))
    return _identity("D_t(xi_t) + D_x(xi_x) + D_y(xi_y) on u_t = 4u_x^3 + u_xxx + u_yyy",
                     s.reduce(div))


# -- randomized algebraic properties ------------------------------------------

@check("prop-euler-divergence")
def _euler_divergence():
    ctxs = [JetContext(("t", "x")), JetContext(("t", "x", "y"))]

    def case(rng):
        ctx = rng.choice(ctxs)
        gs = [random_offshell(rng, ctx, 2, 3, 3) for _ in ctx.indep_vars]
        div = sum((calc.total_derivative(g, v) for g, v in zip(gs, ctx.indep_vars)),
                  zero(ctx))
        if calc.euler(div):
            return f"g={[str(g) for g in gs]}"
        return None

    return _property("E(sum_v D_v g_v) = 0", case)


@check("prop-exactness")
def _exactness():
    s = _pmkdv()

    def case(rng):
        g = random_onshell(rng, s, rng.randint(0, 4), 3, 3)
        f = _dx(g, s)
        w, e = calc.exactness_x(f, s)
        if w is None or _dx(w, s) != f:
            return f"completeness failed for D_x({g})"
        h = random_onshell(rng, s, rng.randint(0, 4), 3, 3)
        w, e = calc.exactness_x(h, s)
        if (w is None) != bool(calc.euler_x(h, s)):
            return f"witness/Euler mismatch for {h}"
        if w is not None and _dx(w, s) != h:
            return f"unsound witness for {h}"
        return None

    return _property("exactness_x sound and complete", case)


@check("prop-adjoint")
def _adjoint():
    s = _pmkdv()

    def case(rng):
        a = random_op(rng, s, 4)
        b = random_op(rng, s, 3)
        if ops.op_adjoint(ops.op_adjoint(a)) != a:
            return f"involution fails for {a}"
        if ops.op_adjoint(ops.op_compose(a, b)) != ops.op_compose(ops.op_adjoint(b), ops.op_adjoint(a)):
            return f"anti-homomorphism fails for a={a}, b={b}"
        f = random_onshell(rng, s, 2, 2, 2)
        if ops.op_apply(ops.op_compose(a, b), f) != ops.op_apply(a, ops.op_apply(b, f)):
            return f"composition fails for a={a}, b={b}, f={f}"
        return None

    return _property("adjoint involution and anti-homomorphism", case)


@check("prop-concomitant")
def _concomitant():
    s = _pmkdv()

    def case(rng):
        a = random_op(rng, s, 4)
        psi = random_onshell(rng, s, 2, 2, 2)
        phi = random_onshell(rng, s, 2, 2, 2)
        pairing = psi * ops.op_apply(a, phi) - ops.op_apply(ops.op_adjoint(a), psi) * phi
        w, _ = calc.exactness_x(pairing, s)
        if w is None:
            return f"pairing not exact for a={a}"
        big_b = ops.concomitant(a, psi, phi)
        if _dx(big_b, s) != pairing:
            return f"bad concomitant for a={a}, psi={psi}, phi={phi}"
        return None

    return _property("Green formula witness", case)


@check("prop-linearize-leibniz")
def _leibniz():
    s = _pmkdv()

    def case(rng):
        f = random_onshell(rng, s, 3, 3, 2)
        g = random_onshell(rng, s, 3, 3, 2)
        lhs = ops.linearize(f * g, s)
        rhs = ops.linearize(g, s).scale(f) + ops.linearize(f, s).scale(g)
        if lhs != rhs:
            return f"f={f}, g={g}"
        return None

    return _property("l_(fg) = f l_g + g l_f", case)


@check("prop-presymp-skew")
def _skew():
    s = _pmkdv()

    def case(rng):
        psi = random_onshell(rng, s, rng.randint(0, 5), 3, 3)
        op = ops.presymp_op(psi, s)
        if ops.op_adjoint(op) != -op:
            return f"psi={psi}"
        return None

    return _property("presymplectic operators are skew-adjoint", case)


# -- driver ------------------------------------------------------------------

def run_check(check_id: str) -> CheckResult:
    if check_id not in CATALOGUE:
        raise KeyError(f"unknown check {check_id!r}")
    t0 = time.perf_counter()
    try:
        ok, details, cex = CATALOGUE[check_id]()
    except Exception as exc:  # a crashing check is a failing check
        ok, details, cex = False, f"raised {type(exc).__name__}", str(exc)
    elapsed = (time.perf_counter() - t0) * 1000
    if not ok and cex is None:
        cex = "(no payload)"
    return CheckResult(check_id, "pass" if ok else "fail", details, elapsed, cex if not ok else None)


@dataclass
class Report:
    suite: str
    results: List[CheckResult]

    @property
    def n_pass(self) -> int:
        return sum(r.passed for r in self.results)

    @property
    def n_fail(self) -> int:
        return len(self.results) - self.n_pass

    @property
    def ok(self) -> bool:
        return self.n_fail == 0

    def as_dict(self) -> dict:
        return {"suite": self.suite, "results": [r.as_dict() for r in self.results],
                "summary": {"pass": self.n_pass, "fail": self.n_fail}}


def run_suite(check_ids: Optional[Sequence[str]] = None, suite: str = "paper") -> Report:
    ids = list(CATALOGUE) if check_ids is None else list(check_ids)
    for cid in ids:
        if cid not in CATALOGUE:
            raise KeyError(f"unknown check {cid!r}")
    return Report(suite, [run_check(cid) for cid in ids])
