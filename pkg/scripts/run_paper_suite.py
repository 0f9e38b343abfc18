"""Run the full verification catalogue and write a JSON report.

    python3 scripts/run_paper_suite.py [--out results/paper_report.json]
"""

import argparse
import json
import os
import sys

from jetvar.paperlab import run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/paper_report.json")
    args = ap.parse_args()
    report = run_suite()
    for r in report.results:
        print(f"{r.status:4}  {r.check_id:24} {r.elapsed_ms / 1000:7.2f}s")
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    with open(args.out, "w") as fh:
        json.dump(report.as_dict(), fh, indent=2)
    print(f"{report.n_pass} pass, {report.n_fail} fail -> {args.out}")
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
