"""Total derivatives, on-shell reduction, Euler operators and gradings.

An :class:`EvolutionSystem` ``u_t = Phi`` (plus optional killed variables,
whose jets vanish) fixes the on-shell coordinates: independent variables
and the jets with zero time count and zero killed count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .jetcore import (
    DiffPoly,
    JetContext,
    JetError,
    Monomial,
    Rational,
    _add_into,
    parse_expr,
    zero,
)

NEG_INF = -math.inf


class NotOnShellError(JetError):
    pass


# -- off-shell calculus -----------------------------------------------------

def total_derivative(f: DiffPoly, v: str) -> DiffPoly:
    """Free total derivative D_v f = d_v f + sum_alpha u_{alpha+v} d_{u_alpha} f."""
    ctx = f.ctx
    i = ctx.index(v)
    acc: Dict[Monomial, Rational] = {}
    for m, c in f.terms.items():
        for k, (vid, e) in enumerate(m):
            if vid < ctx.n:
                if vid != i:
                    continue
                rest = m[:k] + m[k + 1:] if e == 1 else m[:k] + ((vid, e - 1),) + m[k + 1:]
                _add_into(acc, rest, c * e)
                continue
            new = ctx.shift(vid, i)
            d = dict(m)
            if e == 1:
                del d[vid]
            else:
                d[vid] = e - 1
            d[new] = d.get(new, 0) + 1
            _add_into(acc, tuple(sorted(d.items())), c * e)
    return DiffPoly._raw(ctx, acc)


def total_derivative_alpha(f: DiffPoly, alpha) -> DiffPoly:
    for name, count in zip(f.ctx.indep_vars, alpha):
        for _ in range(count):
            f = total_derivative(f, name)
    return f


def jet(ctx: JetContext, **counts: int) -> DiffPoly:
    """Jet coordinate by keyword counts, e.g. ``jet(ctx, x=2)`` is u_xx."""
    alpha = [0] * ctx.n
    for name, c in counts.items():
        alpha[ctx.index(name)] = c
    return DiffPoly.jet(ctx, alpha)


def euler(f: DiffPoly, ctx: Optional[JetContext] = None) -> DiffPoly:
    """Variational derivative sum_alpha (-1)^|alpha| D_alpha(d f / d u_alpha)."""
    ctx = ctx or f.ctx
    out = zero(ctx)
    for vid in sorted(f.jet_ids()):
        alpha = ctx.alpha(vid)
        term = total_derivative_alpha(f.diff(vid), alpha)
        out = out + term if sum(alpha) % 2 == 0 else out - term
    return out


# -- systems and on-shell calculus -----------------------------------------

@dataclass(frozen=True)
class WeightSpec:
    """Scaling grading: integer weight per independent variable; the jet
    ``u_alpha`` weighs ``base - sum alpha_i * weight(x^i)``."""

    var_weights: Tuple[Tuple[str, int], ...]
    base: int = 0

    @classmethod
    def of(cls, base: int = 0, **weights: int) -> "WeightSpec":
        return cls(tuple(weights.items()), base)

    def weight(self, name: str) -> int:
        return dict(self.var_weights).get(name, 0)

    def var_weight(self, ctx: JetContext, vid: int) -> int:
        alpha = ctx.alpha(vid)
        if alpha is None:
            return self.weight(ctx.indep_vars[vid])
        return self.base - sum(a * self.weight(n) for a, n in zip(alpha, ctx.indep_vars))


# the grading of the scaling symmetry 3t d_t + x d_x - sum j u_j d_{u_j}
PMKDV_WEIGHTS = WeightSpec.of(t=-3, x=-1, y=-1)


def monomial_weight(ctx: JetContext, m: Monomial, w: WeightSpec) -> int:
    return sum(e * w.var_weight(ctx, v) for v, e in m)


def weight_of(f: DiffPoly, w: WeightSpec) -> Optional[int]:
    """Common weight of all monomials of f, or None if f is not homogeneous.

    The zero polynomial is homogeneous of every weight; None is returned for it.
    """
    weights = {monomial_weight(f.ctx, m, w) for m in f.terms}
    if len(weights) == 1:
        return weights.pop()
    return None


@dataclass
class EvolutionSystem:
    """u_t = rhs over ``ctx``; jets with a nonzero count in a killed variable vanish."""

    ctx: JetContext
    rhs: DiffPoly
    time_var: str = "t"
    killed: Tuple[str, ...] = ()
    weights: Optional[WeightSpec] = None
    name: str = ""
    _cache: Dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.killed = tuple(self.killed)
        ctx = self.ctx
        if self.rhs.ctx != ctx:
            raise JetError("rhs lives in a different jet context")
        if self.time_var in self.killed:
            raise JetError("the time variable cannot be killed")
        for v in (self.time_var,) + self.killed:
            ctx.index(v)
        for vid in self.rhs.jet_ids():
            if not self.is_onshell_var(vid):
                raise JetError(
                    f"rhs contains the non-coordinate jet {ctx.var_name(vid)}")

    @property
    def spatial_vars(self) -> Tuple[str, ...]:
        return tuple(v for v in self.ctx.indep_vars
                     if v != self.time_var and v not in self.killed)

    @property
    def x(self) -> str:
        """The single spatial variable (1-spatial-variable operations)."""
        sv = self.spatial_vars
        if len(sv) != 1:
            raise JetError(f"expected one spatial variable, system has {sv}")
        return sv[0]

    def _counts(self, vid):
        alpha = self.ctx.alpha(vid)
        it = self.ctx.index(self.time_var)
        kill = sum(alpha[self.ctx.index(k)] for k in self.killed)
        return alpha, alpha[it], kill

    def is_onshell_var(self, vid: int) -> bool:
        if vid < self.ctx.n:
            return True
        _, tc, kc = self._counts(vid)
        return tc == 0 and kc == 0

    def is_onshell(self, f: DiffPoly) -> bool:
        return all(self.is_onshell_var(v) for v in f.jet_ids())

    def u(self, j: int = 0) -> DiffPoly:
        """The on-shell coordinate u_j = u_{x...x} in the spatial variable."""
        return jet(self.ctx, **{self.x: j}) if j else jet(self.ctx)

    def u_id(self, j: int) -> int:
        alpha = [0] * self.ctx.n
        alpha[self.ctx.index(self.x)] = j
        return self.ctx.jet_id(alpha)

    def parse(self, text: str) -> DiffPoly:
        return parse_expr(text, self.ctx)

    # -- on-shell derivatives --

    def _rhs_derivative(self, alpha) -> DiffPoly:
        """D_alpha(Phi) for a spatial multi-index alpha, with killed jets set to 0."""
        key = ("rhs", alpha)
        if key not in self._cache:
            if not any(alpha):
                val = self.rhs
            else:
                i = next(k for k, a in enumerate(alpha) if a)
                lower = list(alpha)
                lower[i] -= 1
                prev = self._rhs_derivative(tuple(lower))
                val = self.kill(total_derivative(prev, self.ctx.indep_vars[i]))
            self._cache[key] = val
        return self._cache[key]

    def kill(self, f: DiffPoly) -> DiffPoly:
        """Drop every monomial containing a killed-variable jet."""
        if not self.killed:
            return f
        bad = {v for v in f.jet_ids() if self._counts(v)[2] > 0}
        if not bad:
            return f
        return DiffPoly._raw(f.ctx, {m: c for m, c in f.terms.items()
                                     if not any(v in bad for v, _ in m)})

    def _replacement(self, vid: int) -> Optional[DiffPoly]:
        """On-shell value of a jet, or None if it already is a coordinate."""
        if self.is_onshell_var(vid):
            return None
        key = ("rep", vid)
        if key not in self._cache:
            alpha, tc, kc = self._counts(vid)
            ctx = self.ctx
            if kc:
                val = zero(ctx)
            else:
                it = ctx.index(self.time_var)
                lower = list(alpha)
                lower[it] -= 1
                if tc == 1:
                    val = self._rhs_derivative(tuple(lower))
                else:
                    prev = self._replacement(ctx.jet_id(lower))
                    val = self.dbar_t(prev)
            self._cache[key] = val
        return self._cache[key]

    def reduce(self, f: DiffPoly) -> DiffPoly:
        mapping = {}
        for vid in f.jet_ids():
            rep = self._replacement(vid)
            if rep is not None:
                mapping[vid] = rep
        return f.subs(mapping)

    def dbar(self, f: DiffPoly, v: str) -> DiffPoly:
        if not self.is_onshell(f):
            raise NotOnShellError("dbar needs an on-shell function")
        if v == self.time_var:
            return self.dbar_t(f)
        if v in self.killed:
            return DiffPoly.diff(f, self.ctx.index(v))
        return total_derivative(f, v)

    def dbar_t(self, f: DiffPoly) -> DiffPoly:
        """D_t restricted on-shell: d_t f + sum_alpha D_alpha(Phi) d_{u_alpha} f."""
        ctx = self.ctx
        out = f.diff(ctx.index(self.time_var))
        for vid in sorted(f.jet_ids()):
            alpha = ctx.alpha(vid)
            out = out + f.diff(vid) * self._rhs_derivative(alpha)
        return out

    def dx_power(self, f: DiffPoly, i: int) -> DiffPoly:
        x = self.x
        for _ in range(i):
            f = total_derivative(f, x)
        return f


def reduce_onshell(f: DiffPoly, sys: EvolutionSystem) -> DiffPoly:
    """Eliminate t-jets via u_{t+alpha} -> D_alpha(Phi) and set killed jets to 0."""
    return sys.reduce(f)


def dbar(f: DiffPoly, v: str, sys: EvolutionSystem) -> DiffPoly:
    return sys.dbar(f, v)


# -- one spatial variable ---------------------------------------------------

def order_of(f: DiffPoly, sys: EvolutionSystem):
    """Largest k with d f / d u_k != 0, or -inf if f has no jet dependence."""
    ks = [sys.ctx.alpha(v)[sys.ctx.index(sys.x)] for v in f.jet_ids()]
    return max(ks) if ks else NEG_INF


def partial_u(f: DiffPoly, sys: EvolutionSystem, j: int) -> DiffPoly:
    """d f / d u_j on-shell (zero for j < 0)."""
    if j < 0:
        return zero(f.ctx)
    return f.diff(sys.u_id(j))


def euler_x(f: DiffPoly, sys: EvolutionSystem) -> DiffPoly:
    """Single-variable Euler operator sum_i (-1)^i D_x^i(d f / d u_i)."""
    k = order_of(f, sys)
    out = zero(f.ctx)
    if k == NEG_INF:
        return out
    for i in range(k + 1):
        term = sys.dx_power(partial_u(f, sys, i), i)
        out = out + term if i % 2 == 0 else out - term
    return out


def _integrate_in(p: DiffPoly, vid: int) -> DiffPoly:
    acc = {}
    for m, c in p.terms.items():
        d = dict(m)
        e = d.get(vid, 0) + 1
        d[vid] = e
        acc[tuple(sorted(d.items()))] = Fraction(c) / e
    return DiffPoly(p.ctx, acc)


def exactness_x(f: DiffPoly, sys: EvolutionSystem):
    """Decide whether f = D_x(g) and construct g.

    Returns ``(g, None)`` with a witness, or ``(None, E)`` where ``E`` is the
    nonzero single-variable Euler derivative certifying non-exactness.
    """
    if not sys.is_onshell(f):
        raise NotOnShellError("exactness_x needs an on-shell function")
    e = euler_x(f, sys)
    if e:
        return None, e
    ctx = f.ctx
    xid = ctx.index(sys.x)
    g = zero(ctx)
    rest = f
    while rest:
        k = order_of(rest, sys)
        if k == NEG_INF:
            g = g + _integrate_in(rest, xid)
            break
        top = sys.u_id(k)
        if k == 0 or rest.degree_in(top) != 1:
            # cannot happen when the Euler derivative vanishes
            raise JetError("integration by parts failed on an Euler-closed input")
        step = _integrate_in(rest.coefficient_of(top, 1), sys.u_id(k - 1))
        g = g + step
        rest = rest - total_derivative(step, sys.x)
    if total_derivative(g, sys.x) != f:
        raise JetError("constructed witness does not reproduce the input")
    return g, None


def scaling_apply(psi: DiffPoly, sys: EvolutionSystem, w: Optional[WeightSpec] = None) -> DiffPoly:
    """Apply the scaling field sum_v (-weight(v)) v d_v - sum_j weight(u_j) u_j d_{u_j}.

    With the potential mKdV weights this is X = 3t d_t + x d_x - sum j u_j d_{u_j}.
    """
    w = w or sys.weights
    ctx = psi.ctx
    acc = {}
    for m, c in psi.terms.items():
        s = -monomial_weight(ctx, m, w)
        if s:
            acc[m] = c * s
    return DiffPoly(ctx, acc)
