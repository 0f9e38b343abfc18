"""Seeded random differential polynomials for property checks."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from .calculus import EvolutionSystem
from .jetcore import DiffPoly, zero
from .operators import CDiffOp


def random_coeff(rng: random.Random, big: bool = False):
    if big:
        num = rng.randint(-10**30, 10**30) or 1
        return Fraction(num, rng.randint(1, 10**20))
    num = rng.choice([-3, -2, -1, 1, 2, 3, 5])
    return num if rng.random() < 0.75 else Fraction(num, rng.choice([2, 3, 4]))


def random_onshell(rng: random.Random, sys: EvolutionSystem, max_order: int = 3,
                   n_terms: int = 3, max_deg: int = 3, explicit: bool = True,
                   exact_order: Optional[int] = None) -> DiffPoly:
    """Random polynomial in u_0..u_max_order (and t, x when ``explicit``).

    With ``exact_order`` the result is forced to depend on u_exact_order.
    """
    ctx = sys.ctx
    pool = [sys.u_id(j) for j in range(max_order + 1)]
    if explicit:
        pool += [ctx.index(sys.time_var), ctx.index(sys.x)]
    out = zero(ctx)
    for _ in range(n_terms):
        deg = rng.randint(0, max_deg)
        d = {}
        for _ in range(deg):
            v = rng.choice(pool)
            d[v] = d.get(v, 0) + 1
        out = out + DiffPoly.monomial(ctx, tuple(sorted(d.items())), random_coeff(rng))
    if exact_order is not None:
        top = sys.u_id(exact_order)
        if out.degree_in(top) == 0:
            extra = random_onshell(rng, sys, exact_order, 1, max(max_deg - 1, 0), explicit)
            out = out + DiffPoly.from_var_id(ctx, top) * (extra + random_coeff(rng))
    return out


def random_offshell(rng: random.Random, ctx, max_order: int = 3, n_terms: int = 3,
                    max_deg: int = 3) -> DiffPoly:
    """Random polynomial in all jets of order <= max_order and all independent variables."""
    alphas = []

    def rec(prefix, left):
        if len(prefix) == ctx.n:
            alphas.append(tuple(prefix))
            return
        for a in range(left + 1):
            rec(prefix + [a], left - a)

    rec([], max_order)
    pool = [ctx.jet_id(a) for a in alphas] + list(range(ctx.n))
    out = zero(ctx)
    for _ in range(n_terms):
        d = {}
        for _ in range(rng.randint(0, max_deg)):
            v = rng.choice(pool)
            d[v] = d.get(v, 0) + 1
        out = out + DiffPoly.monomial(ctx, tuple(sorted(d.items())), random_coeff(rng))
    return out


def random_op(rng: random.Random, sys: EvolutionSystem, max_power: int = 4,
              coeff_order: int = 2, n_terms: int = 2, max_deg: int = 2) -> CDiffOp:
    coeffs = {}
    for i in range(max_power + 1):
        if rng.random() < 0.6:
            coeffs[i] = random_onshell(rng, sys, coeff_order, n_terms, max_deg)
    return CDiffOp(sys.ctx, coeffs, sys.x)
