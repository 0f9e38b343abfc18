"""C-differential operators sum_i a_i Dx^i in one spatial variable.

Operators are kept in normal form (coefficients to the left of powers of
the on-shell spatial total derivative), so equality is coefficient-map
equality.  The time derivative never lives inside a ``CDiffOp``; the
adjoint linearization applies it separately.
"""

from __future__ import annotations

from math import comb
from typing import Dict, Mapping, Optional

from .calculus import (
    NEG_INF,
    EvolutionSystem,
    NotOnShellError,
    order_of,
    partial_u,
    total_derivative,
)
from .jetcore import DiffPoly, JetContext, JetError, format_expr, parse_with_symbols, zero


class CDiffOp:
    __slots__ = ("ctx", "x", "coeffs")

    def __init__(self, ctx: JetContext, coeffs: Optional[Mapping[int, DiffPoly]] = None, x: str = "x"):
        self.ctx = ctx
        self.x = x
        ctx.index(x)
        self.coeffs: Dict[int, DiffPoly] = {}
        for i, a in (coeffs or {}).items():
            if i < 0:
                raise JetError("negative power of Dx")
            if a.ctx != ctx:
                raise JetError("coefficient lives in a different jet context")
            if a:
                self.coeffs[i] = a

    @classmethod
    def dx(cls, ctx, power: int = 1, x: str = "x") -> "CDiffOp":
        return cls(ctx, {power: DiffPoly.const(ctx, 1)}, x)

    @classmethod
    def mult(cls, a: DiffPoly, x: str = "x") -> "CDiffOp":
        return cls(a.ctx, {0: a}, x)

    @classmethod
    def zero(cls, ctx, x: str = "x") -> "CDiffOp":
        return cls(ctx, {}, x)

    def order(self) -> int:
        return max(self.coeffs, default=-1)

    def coeff(self, i: int) -> DiffPoly:
        return self.coeffs.get(i, zero(self.ctx))

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: "CDiffOp"):
        if other.ctx != self.ctx or other.x != self.x:
            raise JetError("operators act on different jet spaces")

    def __add__(self, other: "CDiffOp") -> "CDiffOp":
        self._check(other)
        keys = set(self.coeffs) | set(other.coeffs)
        return CDiffOp(self.ctx, {i: self.coeff(i) + other.coeff(i) for i in keys}, self.x)

    def __neg__(self):
        return CDiffOp(self.ctx, {i: -a for i, a in self.coeffs.items()}, self.x)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "CDiffOp":
        if isinstance(c, DiffPoly):
            return CDiffOp(self.ctx, {i: c * a for i, a in self.coeffs.items()}, self.x)
        return CDiffOp(self.ctx, {i: a.scale(c) for i, a in self.coeffs.items()}, self.x)

    def __eq__(self, other):
        if not isinstance(other, CDiffOp):
            return NotImplemented
        return self.ctx == other.ctx and self.x == other.x and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx, self.x, frozenset(self.coeffs.items())))

    def __repr__(self):
        return f"CDiffOp({format_op(self)!r})"

    def __str__(self):
        return format_op(self)


def _dx_powers(f: DiffPoly, x: str, n: int):
    """[f, D f, ..., D^n f]."""
    out = [f]
    for _ in range(n):
        out.append(total_derivative(out[-1], x))
    return out


def op_apply(op: CDiffOp, f: DiffPoly) -> DiffPoly:
    """sum_i a_i Dx^i(f)."""
    if not op.coeffs:
        return zero(op.ctx)
    ders = _dx_powers(f, op.x, op.order())
    out = zero(op.ctx)
    for i, a in sorted(op.coeffs.items()):
        out = out + a * ders[i]
    return out


def op_compose(a: CDiffOp, b: CDiffOp) -> CDiffOp:
    """Normal form of a o b via Dx^i o g = sum_r C(i,r) Dx^r(g) Dx^(i-r)."""
    a._check(b)
    acc: Dict[int, DiffPoly] = {}
    top = a.order()
    for j, bj in b.coeffs.items():
        ders = _dx_powers(bj, a.x, max(top, 0))
        for i, ai in a.coeffs.items():
            for r in range(i + 1):
                if not ders[r]:
                    continue
                k = i - r + j
                term = (ai * ders[r]).scale(comb(i, r))
                acc[k] = acc[k] + term if k in acc else term
    return CDiffOp(a.ctx, acc, a.x)


def op_adjoint(a: CDiffOp) -> CDiffOp:
    """Formal adjoint sum_i (-1)^i Dx^i o a_i, expanded to normal form."""
    acc: Dict[int, DiffPoly] = {}
    for i, ai in a.coeffs.items():
        ders = _dx_powers(ai, a.x, i)
        sign = -1 if i % 2 else 1
        for r in range(i + 1):
            # Dx^i o a_i = sum_r C(i,r) Dx^(i-r)(a_i) Dx^r
            d = ders[i - r]
            if not d:
                continue
            term = d.scale(sign * comb(i, r))
            acc[r] = acc[r] + term if r in acc else term
    return CDiffOp(a.ctx, acc, a.x)


def linearize(f: DiffPoly, sys: EvolutionSystem) -> CDiffOp:
    """l_f = sum_i (d f / d u_i) Dx^i."""
    if not sys.is_onshell(f):
        raise NotOnShellError("linearize needs an on-shell function")
    k = order_of(f, sys)
    coeffs = {}
    if k != NEG_INF:
        for i in range(k + 1):
            coeffs[i] = partial_u(f, sys, i)
    return CDiffOp(f.ctx, coeffs, sys.x)


def spatial_part_of_linearization(sys: EvolutionSystem) -> CDiffOp:
    """The Dx-part of l_E, i.e. -l_Phi (l_E = D_t - l_Phi)."""
    key = ("lin_rhs",)
    if key not in sys._cache:
        sys._cache[key] = -linearize(sys.rhs, sys)
    return sys._cache[key]


def adjoint_linearization_apply(sys: EvolutionSystem, psi: DiffPoly) -> DiffPoly:
    """l_E^*(psi) = -D_t(psi) + (-l_Phi)^*(psi); zero iff psi is a cosymmetry."""
    if not sys.is_onshell(psi):
        raise NotOnShellError("psi must be on-shell")
    key = ("adj_lin_rhs",)
    if key not in sys._cache:
        sys._cache[key] = op_adjoint(spatial_part_of_linearization(sys))
    return op_apply(sys._cache[key], psi) - sys.dbar_t(psi)


def presymp_op(psi: DiffPoly, sys: EvolutionSystem) -> CDiffOp:
    """l_psi - l_psi^*."""
    lin = linearize(psi, sys)
    return lin - op_adjoint(lin)


def concomitant(op: CDiffOp, psi: DiffPoly, phi: DiffPoly) -> DiffPoly:
    """B with Dx(B) = psi * op(phi) - op^*(psi) * phi.

    For a term a Dx^i the witness is sum_{r<i} (-1)^r Dx^r(a psi) Dx^(i-1-r)(phi).
    """
    x = op.x
    out = zero(op.ctx)
    top = op.order()
    phis = _dx_powers(phi, x, max(top - 1, 0))
    for i, a in sorted(op.coeffs.items()):
        if i == 0:
            continue
        aps = _dx_powers(a * psi, x, i - 1)
        for r in range(i):
            term = aps[r] * phis[i - 1 - r]
            out = out + term if r % 2 == 0 else out - term
    lhs = psi * op_apply(op, phi) - op_apply(op_adjoint(op), psi) * phi
    if total_derivative(out, x) != lhs:
        raise JetError("concomitant witness failed verification")
    return out


def evolutionary_apply(phi: DiffPoly, psi: DiffPoly, sys: EvolutionSystem) -> DiffPoly:
    """E_phi(psi) = sum_i Dx^i(phi) d psi / d u_i (on-shell, one spatial variable)."""
    k = order_of(psi, sys)
    out = zero(psi.ctx)
    if k == NEG_INF:
        return out
    ders = _dx_powers(phi, sys.x, k)
    for i in range(k + 1):
        out = out + ders[i] * partial_u(psi, sys, i)
    return out


# -- text format ------------------------------------------------------------

def format_op(op: CDiffOp) -> str:
    if not op.coeffs:
        return "0"
    d = "D" + op.x
    parts = []
    for i in sorted(op.coeffs):
        a = op.coeffs[i]
        text = format_expr(a)
        dpart = "" if i == 0 else (d if i == 1 else f"{d}^{i}")
        if not dpart:
            body = text
        elif a == 1:
            body = dpart
        elif a == -1:
            body = "-" + dpart
        elif len(a) == 1:
            body = f"{text}*{dpart}"
        else:
            body = f"({text})*{dpart}"
        if parts and body.startswith("-") and len(a) == 1:
            parts.append(" - " + body[1:])
        elif parts:
            parts.append(" + " + body)
        else:
            parts.append(body)
    return "".join(parts)


def parse_op(text: str, ctx: JetContext, x: str = "x") -> CDiffOp:
    """Parse ``sum of <coeff>*Dx^i`` (coefficients written to the left)."""
    sym = "D" + x
    p = parse_with_symbols(text, ctx, (sym,))
    coeffs: Dict[int, Dict] = {}
    for m, c in p.terms.items():
        power = 0
        rest = []
        for v, e in m:
            if v == -1:
                power = e
            else:
                rest.append((v, e))
        coeffs.setdefault(power, {})[tuple(rest)] = c
    if not coeffs and not p.terms:
        return CDiffOp.zero(ctx, x)
    return CDiffOp(ctx, {i: DiffPoly(ctx, t) for i, t in coeffs.items()}, x)
