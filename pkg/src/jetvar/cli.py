"""Command-line front end: ``jetvar <command> ...``.

Exit codes: 0 on success, 1 when a verification fails, 2 on usage, parse or
order-cap errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import calculus as calc
from . import operators as ops
from . import paperlab, solver
from .jetcore import JetError, format_expr, parse_expr
from .systems import load_system

EVAL_OPS = ("dx", "dy", "dt", "euler", "eulerx", "integrate", "order", "weight", "reduce")


class UsageError(Exception):
    pass


def _onshell(s, text):
    return s.reduce(parse_expr(text, s.ctx))


def _bounds(p: argparse.ArgumentParser, order_required=True):
    p.add_argument("--max-order", type=int, required=order_required, default=None,
                   help="largest jet order u_k in the ansatz")
    p.add_argument("--t-deg", type=int, default=0)
    p.add_argument("--x-deg", type=int, default=0)
    p.add_argument("--u-deg", type=int, default=3, help="total degree in jet variables")
    p.add_argument("--weight", type=int, default=None,
                   help="keep only monomials of this scaling weight")


def _spec(args, weight=None) -> solver.AnsatzSpec:
    return solver.AnsatzSpec(args.max_order, args.u_deg, args.t_deg, args.x_deg,
                             args.weight if weight is None else weight)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jetvar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="apply a calculus operation to an expression")
    p.add_argument("--system", default="pmkdv")
    p.add_argument("--op", required=True, choices=EVAL_OPS)
    p.add_argument("--expr", required=True)

    for name, arg in (("linearize", "--expr"), ("presymp", "--cosym")):
        p = sub.add_parser(name)
        p.add_argument("--system", default="pmkdv")
        p.add_argument(arg, required=True)

    p = sub.add_parser("adjoint")
    p.add_argument("--system", default="pmkdv")
    p.add_argument("--op", required=True)

    p = sub.add_parser("concomitant")
    p.add_argument("--system", default="pmkdv")
    p.add_argument("--op", required=True)
    p.add_argument("--psi", required=True)
    p.add_argument("--phi", required=True)

    p = sub.add_parser("cosym", help="enumerate cosymmetries in a bounded ansatz")
    p.add_argument("--system", default="pmkdv")
    _bounds(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("potential", help="search psi with l_psi - l_psi^* = target")
    p.add_argument("--system", default="pmkdv")
    p.add_argument("--target", required=True)
    _bounds(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("divrep", help="search density = D_t(g2) - D_x(g1)")
    p.add_argument("--system", default="pmkdv")
    p.add_argument("--density", required=True)
    _bounds(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", default="paper", choices=["paper"])
    p.add_argument("--check", action="append", default=None,
                   help="check id(s), comma separated; repeatable")
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.add_argument("--json", action="store_true")
    p.add_argument("--list", action="store_true", help="list check ids and exit")
    return parser


def _cmd_eval(args, out):
    s = load_system(args.system)
    op = args.op
    if op == "euler":
        out(format_expr(calc.euler(parse_expr(args.expr, s.ctx))))
        return 0
    f = _onshell(s, args.expr)
    if op in ("dx", "dy", "dt"):
        var = s.time_var if op == "dt" else op[1]
        if var not in s.ctx.indep_vars:
            raise UsageError(f"system {args.system!r} has no variable {var!r}")
        out(format_expr(s.dbar(f, var)))
    elif op == "reduce":
        out(format_expr(f))
    elif op == "eulerx":
        out(format_expr(calc.euler_x(f, s)))
    elif op == "integrate":
        g, e = calc.exactness_x(f, s)
        if g is None:
            out(f"not exact: E_x = {format_expr(e)}")
            return 1
        out(format_expr(g))
    elif op == "order":
        k = calc.order_of(f, s)
        out("-oo" if k == calc.NEG_INF else str(k))
    elif op == "weight":
        if s.weights is None:
            raise UsageError(f"system {args.system!r} declares no weights")
        w = calc.weight_of(f, s.weights)
        out("none" if w is None else str(w))
    return 0


def _kernel_json(kind, s, kb: solver.KernelBasis):
    return {"suite": kind, "system": s.name,
            "solutions": {"particular": None if kb.particular is None else format_expr(kb.particular),
                          "basis": [format_expr(b) for b in kb.basis]},
            "metadata": kb.metadata()}


def _cmd_cosym(args, out):
    s = load_system(args.system)
    kb = solver.solve_cosymmetries(s, _spec(args))
    if args.json:
        out(json.dumps(_kernel_json("cosym", s, kb), indent=2))
        return 0
    out(f"# dimension {len(kb.basis)}; {kb.n_unknowns} unknowns, rank {kb.rank}")
    for b in kb.basis:
        out(format_expr(b))
    return 0


def _cmd_potential(args, out):
    s = load_system(args.system)
    target = ops.parse_op(args.target, s.ctx, s.x)
    kb = solver.solve_presymp_potential(s, target, _spec(args))
    if args.json:
        out(json.dumps(_kernel_json("potential", s, kb), indent=2))
        return 0
    meta = kb.metadata()
    if kb.empty:
        out(f"# no solution: {meta['n_unknowns']} unknowns, {meta['n_equations']} equations, "
            f"rank {meta['rank']}")
        return 0
    out(f"# particular solution, plus {len(kb.basis)} homogeneous directions")
    out(format_expr(kb.particular))
    for b in kb.basis:
        out("+ " + format_expr(b))
    return 0


def _cmd_divrep(args, out):
    s = load_system(args.system)
    density = _onshell(s, args.density)
    if args.weight is not None:
        w = s.weights
        g1 = _spec(args, args.weight + w.weight(s.x))
        g2 = _spec(args, args.weight + w.weight(s.time_var))
    else:
        g1 = g2 = _spec(args)
    res = solver.solve_divergence_repr(s, density, g1, g2)
    if args.json:
        out(json.dumps({"suite": "divrep", "system": s.name, "found": res.found,
                        "g1": None if res.g1 is None else format_expr(res.g1),
                        "g2": None if res.g2 is None else format_expr(res.g2),
                        "metadata": {"n_unknowns": res.n_unknowns,
                                     "n_equations": res.n_equations, "rank": res.rank,
                                     "g1_ansatz": g1.as_dict(), "g2_ansatz": g2.as_dict()}},
                       indent=2))
        return 0
    if not res.found:
        out(f"# none within the ansatz ({res.n_unknowns} unknowns, rank {res.rank})")
        return 0
    out(f"g1 = {format_expr(res.g1)}")
    out(f"g2 = {format_expr(res.g2)}")
    return 0


def _cmd_verify(args, out):
    if args.list:
        for cid in paperlab.CATALOGUE:
            out(cid)
        return 0
    ids = None
    if args.check is not None:
        ids = [c.strip() for item in args.check for c in item.split(",") if c.strip()]
        unknown = [c for c in ids if c not in paperlab.CATALOGUE]
        if unknown:
            raise UsageError(f"unknown check(s): {', '.join(unknown)}")
    report = paperlab.run_suite(ids, args.suite)
    payload = json.dumps(report.as_dict(), indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload + "\n")
    if args.json:
        out(payload)
    else:
        for r in report.results:
            line = f"{r.status.upper():4}  {r.check_id:24} {r.elapsed_ms:10.1f} ms  {r.details}"
            out(line)
            if r.counterexample:
                out(f"      counterexample: {r.counterexample}")
        out(f"summary: {report.n_pass} pass, {report.n_fail} fail")
    return 0 if report.ok else 1


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    def out(line):
        print(line)

    try:
        if args.command == "eval":
            return _cmd_eval(args, out)
        if args.command == "linearize":
            s = load_system(args.system)
            out(ops.format_op(ops.linearize(_onshell(s, args.expr), s)))
        elif args.command == "adjoint":
            s = load_system(args.system)
            out(ops.format_op(ops.op_adjoint(ops.parse_op(args.op, s.ctx, s.x))))
        elif args.command == "presymp":
            s = load_system(args.system)
            psi = _onshell(s, args.cosym)
            if ops.adjoint_linearization_apply(s, psi):
                print("warning: input is not a cosymmetry of the system", file=sys.stderr)
            out(ops.format_op(ops.presymp_op(psi, s)))
        elif args.command == "concomitant":
            s = load_system(args.system)
            op = ops.parse_op(args.op, s.ctx, s.x)
            out(format_expr(ops.concomitant(op, _onshell(s, args.psi), _onshell(s, args.phi))))
        elif args.command == "cosym":
            return _cmd_cosym(args, out)
        elif args.command == "potential":
            return _cmd_potential(args, out)
        elif args.command == "divrep":
            return _cmd_divrep(args, out)
        elif args.command == "verify":
            return _cmd_verify(args, out)
        return 0
    except (JetError, UsageError, ValueError, OSError) as exc:
        print(f"jetvar: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
