"""Sweep the presymplectic-potential search for the target Dx over jet orders.

For each order k the script solves l_E^*(psi) = 0, l_psi - l_psi^* = Dx inside
the polynomial ansatz with the given degree bounds and prints the size of the
linear system, its rank, the number of independent blocks and the outcome.

    python3 scripts/order_sweep.py --max-order 6 --u-deg 5 --t-deg 2 --x-deg 2
"""

import argparse
import csv
import sys
import time

from jetvar.operators import CDiffOp
from jetvar.solver import AnsatzSpec, solve_cosymmetries, solve_presymp_potential
from jetvar.systems import load_system


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--system", default="pmkdv")
    ap.add_argument("--max-order", type=int, default=6)
    ap.add_argument("--u-deg", type=int, default=5)
    ap.add_argument("--t-deg", type=int, default=2)
    ap.add_argument("--x-deg", type=int, default=2)
    ap.add_argument("--csv", default=None, help="also write the table as CSV")
    args = ap.parse_args()

    s = load_system(args.system)
    rows = []
    print(f"{'k':>2} {'unknowns':>9} {'equations':>10} {'rank':>6} {'blocks':>6} "
          f"{'cosym dim':>9} {'potential':>9} {'secs':>7}")
    for k in range(args.max_order + 1):
        spec = AnsatzSpec(k, args.u_deg, args.t_deg, args.x_deg)
        t0 = time.perf_counter()
        cos = solve_cosymmetries(s, spec)
        kb = solve_presymp_potential(s, CDiffOp.dx(s.ctx, x=s.x), spec)
        secs = time.perf_counter() - t0
        row = dict(k=k, unknowns=kb.n_unknowns, equations=kb.n_equations, rank=kb.rank,
                   blocks=kb.blocks, cosym_dim=len(cos.basis),
                   potential="none" if kb.empty else "found", secs=round(secs, 2))
        rows.append(row)
        print(f"{k:>2} {row['unknowns']:>9} {row['equations']:>10} {row['rank']:>6} "
              f"{row['blocks']:>6} {row['cosym_dim']:>9} {row['potential']:>9} {secs:>7.2f}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
