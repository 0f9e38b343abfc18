"""Bounded-ansatz exact linear solving.

Every search here has the same shape: pick a finite list of monomials, apply
a linear map (an adjoint linearization, a presymplectic operator, a pair of
total derivatives) to each one, and read one rational equation off every
monomial of the images.  The resulting sparse system is split into
independent blocks and row-reduced over the integers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .calculus import EvolutionSystem, monomial_weight, total_derivative
from .jetcore import DiffPoly, JetError, mono_sort_key, zero
from .operators import CDiffOp, adjoint_linearization_apply, presymp_op


@dataclass(frozen=True)
class AnsatzSpec:
    max_order: int
    u_deg: int
    t_deg: int = 0
    x_deg: int = 0
    weight: Optional[int] = None

    def __post_init__(self):
        if min(self.max_order, self.u_deg, self.t_deg, self.x_deg) < 0:
            raise ValueError("ansatz bounds must be non-negative")

    def as_dict(self):
        return {"max_order": self.max_order, "u_deg": self.u_deg, "t_deg": self.t_deg,
                "x_deg": self.x_deg, "weight": self.weight}


def gen_ansatz(sys: EvolutionSystem, spec: AnsatzSpec) -> List[DiffPoly]:
    """Monomials t^a x^b prod u_j^e_j with j <= max_order and jet degree <= u_deg.

    With ``spec.weight`` set, only monomials of that weight under the
    system's WeightSpec are kept.  The list is sorted in canonical term order.
    """
    ctx = sys.ctx
    tid = ctx.index(sys.time_var)
    xid = ctx.index(sys.x)
    jets = [sys.u_id(j) for j in range(spec.max_order + 1)]
    monos = set()
    for deg in range(spec.u_deg + 1):
        for combo in itertools.combinations_with_replacement(jets, deg):
            jm = {}
            for v in combo:
                jm[v] = jm.get(v, 0) + 1
            for a in range(spec.t_deg + 1):
                for b in range(spec.x_deg + 1):
                    d = dict(jm)
                    if a:
                        d[tid] = a
                    if b:
                        d[xid] = b
                    monos.add(tuple(sorted(d.items())))
    if spec.weight is not None:
        if sys.weights is None:
            raise JetError("weight-restricted ansatz needs a system with a WeightSpec")
        monos = {m for m in monos if monomial_weight(ctx, m, sys.weights) == spec.weight}
    ordered = sorted(monos, key=lambda m: mono_sort_key(ctx, m))
    return [DiffPoly.monomial(ctx, m) for m in ordered]


# -- exact linear algebra ---------------------------------------------------

@dataclass
class LinearIdentity:
    """sum_j c_j * columns[j] + constant = 0 for unknowns c_j."""

    columns: Sequence
    constant: Optional[object] = None


def _row_keys(item):
    """Monomial -> coefficient items of a polynomial or an operator."""
    if isinstance(item, DiffPoly):
        for m, c in item.terms.items():
            yield m, c
    elif isinstance(item, CDiffOp):
        for i, a in item.coeffs.items():
            for m, c in a.terms.items():
                yield (i, m), c
    elif item is None:
        return
    else:
        raise TypeError(f"cannot extract equations from {type(item).__name__}")


def _primitive(row: Dict[int, int]) -> Dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g != 1:
        row = {k: v // g for k, v in row.items()}
    return row


def _integer_row(row: Dict[int, object]) -> Dict[int, int]:
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = den * v.denominator // gcd(den, v.denominator)
    out = {k: int(v * den) for k, v in row.items()}
    return _primitive(out)


def _eliminate(row, piv, col):
    """row <- piv[col]*row - row[col]*piv (fraction-free), then make primitive."""
    a = piv[col]
    b = row[col]
    g = gcd(a, b)
    a //= g
    b //= g
    out = {k: v * a for k, v in row.items()} if a != 1 else dict(row)
    for k, v in piv.items():
        s = out.get(k, 0) - b * v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return _primitive(out) if out else out


def _reduce_block(rows: List[Dict[int, int]], const_col: int):
    """Echelon then back-substitute; returns ({pivot_col: row}, consistent)."""
    pivots: Dict[int, Dict[int, int]] = {}
    for row in rows:
        while row:
            c = min(row)
            if c == const_col:
                return pivots, False
            piv = pivots.get(c)
            if piv is None:
                pivots[c] = row
                break
            row = _eliminate(row, piv, c)
    # back substitution, highest pivot first
    for c in sorted(pivots, reverse=True):
        row = pivots[c]
        for k in sorted(k for k in row if k != c and k in pivots):
            if k in row:
                row = _eliminate(row, pivots[k], k)
        pivots[c] = row
    return pivots, True


class _DSU:
    def __init__(self):
        self.parent = {}

    def find(self, a):
        p = self.parent.setdefault(a, a)
        while p != self.parent[p]:
            self.parent[p] = self.parent[self.parent[p]]
            p = self.parent[p]
        self.parent[a] = p
        return p

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


@dataclass
class LinearSolution:
    n_unknowns: int
    n_equations: int
    rank: int
    consistent: bool
    particular: Optional[List[Fraction]]
    kernel: List[List[Fraction]]
    blocks: int


def solve_linear(identities: Sequence[LinearIdentity], n_unknowns: int) -> LinearSolution:
    """Solve the affine system; the kernel basis has one vector per free column."""
    const_col = n_unknowns
    rows: Dict[Tuple, Dict[int, object]] = {}
    for idx, ident in enumerate(identities):
        if len(ident.columns) != n_unknowns:
            raise ValueError("identity column count does not match the unknowns")
        for j, col in enumerate(ident.columns):
            for key, c in _row_keys(col):
                rows.setdefault((idx, key), {})[j] = c
        for key, c in _row_keys(ident.constant):
            rows.setdefault((idx, key), {})[const_col] = c
    # cancellations inside a row cannot happen: each (column, key) pair is
    # visited once, so every stored entry is nonzero
    int_rows = [_integer_row(r) for r in rows.values() if r]

    dsu = _DSU()
    for r in int_rows:
        cols = [k for k in r if k != const_col]
        if not cols:
            return LinearSolution(n_unknowns, len(int_rows), 0, False, None, [], 0)
        for k in cols[1:]:
            dsu.union(cols[0], k)
    blocks: Dict[int, List[Dict[int, int]]] = {}
    for r in int_rows:
        root = dsu.find(next(k for k in r if k != const_col))
        blocks.setdefault(root, []).append(r)

    pivots: Dict[int, Dict[int, int]] = {}
    consistent = True
    for root in sorted(blocks):
        block_rows = sorted(blocks[root], key=lambda r: (min(r), len(r), sorted(r.items())))
        piv, ok = _reduce_block(block_rows, const_col)
        consistent &= ok
        pivots.update(piv)

    rank = len(pivots)
    free = [j for j in range(n_unknowns) if j not in pivots]
    kernel = []
    for f in free:
        vec = [Fraction(0)] * n_unknowns
        vec[f] = Fraction(1)
        for c, row in pivots.items():
            if f in row:
                vec[c] = Fraction(-row[f], row[c])
        kernel.append(vec)
    particular = None
    if consistent:
        particular = [Fraction(0)] * n_unknowns
        for c, row in pivots.items():
            if const_col in row:
                particular[c] = Fraction(-row[const_col], row[c])
    return LinearSolution(n_unknowns, len(int_rows), rank, consistent, particular, kernel,
                          len(blocks))


@dataclass
class KernelBasis:
    """Solutions of a bounded search: ``particular + span(basis)``.

    For homogeneous problems ``particular`` is the zero element; when the
    affine system is inconsistent ``particular`` is None and the basis empty.
    """

    basis: List[DiffPoly]
    n_unknowns: int
    n_equations: int
    rank: int
    particular: Optional[DiffPoly] = None
    consistent: bool = True
    blocks: int = 0
    ansatz: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.basis)

    @property
    def empty(self) -> bool:
        return not self.consistent

    def contains(self, p: DiffPoly) -> bool:
        """Whether ``p - particular`` lies in the span of the basis."""
        target = p - self.particular if self.particular is not None else p
        if not self.consistent:
            return False
        if not self.basis:
            return target.is_zero()
        ident = LinearIdentity(self.basis, -target)
        return solve_linear([ident], len(self.basis)).consistent

    def metadata(self) -> dict:
        return {"n_unknowns": self.n_unknowns, "n_equations": self.n_equations,
                "rank": self.rank, "blocks": self.blocks, "consistent": self.consistent,
                "dimension": len(self.basis), "ansatz": self.ansatz}



def linear_kernel(identities: Sequence[LinearIdentity], unknowns: Sequence[DiffPoly]) -> KernelBasis:
    """Null space of homogeneous identities, mapped back onto the ``unknowns`` polynomials.

    Inhomogeneous identities give an affine solution set instead.
    """
    sol = solve_linear(identities, len(unknowns))
    ctx = unknowns[0].ctx if unknowns else None

    def build(vec):
        acc = None
        for c, p in zip(vec, unknowns):
            if c:
                acc = p.scale(c) if acc is None else acc + p.scale(c)
        return acc if acc is not None else (zero(ctx) if ctx else None)

    if not sol.consistent:
        return KernelBasis([], sol.n_unknowns, sol.n_equations, sol.rank, None, False, sol.blocks)
    basis = [build(v) for v in sol.kernel]
    return KernelBasis(basis, sol.n_unknowns, sol.n_equations, sol.rank,
                       build(sol.particular) if unknowns else None, True, sol.blocks)


# -- searches ---------------------------------------------------------------

def solve_cosymmetries(sys: EvolutionSystem, spec: AnsatzSpec) -> KernelBasis:
    """All psi in the ansatz span with l_E^*(psi) = 0 (re-verified)."""
    monos = gen_ansatz(sys, spec)
    images = [adjoint_linearization_apply(sys, m) for m in monos]
    kb = linear_kernel([LinearIdentity(images)], monos)
    kb.ansatz = spec.as_dict()
    for psi in kb.basis:
        if adjoint_linearization_apply(sys, psi):
            raise JetError("solver returned a non-cosymmetry")
    return kb


def solve_presymp_potential(sys: EvolutionSystem, target: CDiffOp, spec: AnsatzSpec) -> KernelBasis:
    """psi in the ansatz with l_E^*(psi) = 0 and l_psi - l_psi^* = target."""
    monos = gen_ansatz(sys, spec)
    cosym_images = []
    presymp_images = []
    for m in monos:
        cosym_images.append(adjoint_linearization_apply(sys, m))
        presymp_images.append(presymp_op(m, sys))
    idents = [LinearIdentity(cosym_images), LinearIdentity(presymp_images, -target)]
    kb = linear_kernel(idents, monos)
    kb.ansatz = spec.as_dict()
    if kb.consistent:
        for psi in kb.basis + ([kb.particular] if kb.particular is not None else []):
            if adjoint_linearization_apply(sys, psi):
                raise JetError("solver returned a non-cosymmetry")
        if kb.particular is not None and presymp_op(kb.particular, sys) != target:
            raise JetError("solver returned a wrong presymplectic potential")
    return kb


@dataclass
class DivergenceResult:
    g1: Optional[DiffPoly]
    g2: Optional[DiffPoly]
    n_unknowns: int
    n_equations: int
    rank: int

    @property
    def found(self) -> bool:
        return self.g1 is not None


def solve_divergence_repr(sys: EvolutionSystem, density: DiffPoly,
                          spec_g1: AnsatzSpec, spec_g2: AnsatzSpec) -> DivergenceResult:
    """Find g1, g2 in the ansätze with density = D_t(g2) - D_x(g1) on-shell."""
    m1 = gen_ansatz(sys, spec_g1)
    m2 = gen_ansatz(sys, spec_g2)
    cols = [-total_derivative(m, sys.x) for m in m1] + [sys.dbar_t(m) for m in m2]
    sol = solve_linear([LinearIdentity(cols, -density)], len(cols))
    if not sol.consistent:
        return DivergenceResult(None, None, sol.n_unknowns, sol.n_equations, sol.rank)
    ctx = sys.ctx
    g1 = zero(ctx)
    g2 = zero(ctx)
    for c, m in zip(sol.particular[:len(m1)], m1):
        if c:
            g1 = g1 + m.scale(c)
    for c, m in zip(sol.particular[len(m1):], m2):
        if c:
            g2 = g2 + m.scale(c)
    if sys.dbar_t(g2) - total_derivative(g1, sys.x) != density:
        raise JetError("divergence representation failed verification")
    return DivergenceResult(g1, g2, sol.n_unknowns, sol.n_equations, sol.rank)
