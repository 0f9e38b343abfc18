"""Hypothesis strategies for differential polynomials."""

from fractions import Fraction

from hypothesis import strategies as st

from jetvar.jetcore import DiffPoly

small_coeffs = st.one_of(
    st.integers(-5, 5),
    st.builds(Fraction, st.integers(-7, 7), st.integers(1, 6)),
)
big_coeffs = st.builds(Fraction, st.integers(-10**40, 10**40), st.integers(1, 10**25))


def polys(ctx, max_order=3, max_terms=4, max_deg=3, coeffs=small_coeffs, indep=True):
    """Random polynomials in jets of total order <= max_order (plus t, x, ...)."""

    def alphas():
        out = []

        def rec(prefix, left):
            if len(prefix) == ctx.n:
                out.append(tuple(prefix))
                return
            for a in range(left + 1):
                rec(prefix + [a], left - a)

        rec([], max_order)
        return out

    pool = [ctx.jet_id(a) for a in alphas()]
    if indep:
        pool += list(range(ctx.n))
    mono = st.lists(st.sampled_from(pool), max_size=max_deg)

    def build(items):
        p = DiffPoly(ctx)
        for vids, c in items:
            d = {}
            for v in vids:
                d[v] = d.get(v, 0) + 1
            p = p + DiffPoly.monomial(ctx, tuple(sorted(d.items())), c)
        return p

    return st.lists(st.tuples(mono, coeffs), max_size=max_terms).map(build)


def onshell_polys(sys, max_order=3, max_terms=4, max_deg=3, coeffs=small_coeffs, explicit=True):
    """Random functions of t, x and u_0..u_max_order, which are on-shell for sys."""
    ctx = sys.ctx
    pool = [sys.u_id(j) for j in range(max_order + 1)]
    if explicit:
        pool += [ctx.index(sys.time_var), ctx.index(sys.x)]
    mono = st.lists(st.sampled_from(pool), max_size=max_deg)

    def build(items):
        p = DiffPoly(ctx)
        for vids, c in items:
            d = {}
            for v in vids:
                d[v] = d.get(v, 0) + 1
            p = p + DiffPoly.monomial(ctx, tuple(sorted(d.items())), c)
        return p

    return st.lists(st.tuples(mono, coeffs), max_size=max_terms).map(build)
