"""Index of the tame image in the equivariant group, with per-stratum factors."""
import argparse
import json

from ptame.equivariance import BudgetExceeded, index_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("params", nargs="*", default=["2,1,2", "3,1,2", "4,1,2", "2,2,2", "2,2,3", "3,2,3"],
                    help="q,m,n triples")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    for spec in args.params:
        q, m, n = map(int, spec.split(","))
        try:
            R = index_report(q, m, n)
        except BudgetExceeded as e:
            print(f"({q},{m},{n}) skipped: {e}")
            continue
        if args.json:
            print(json.dumps(R.to_json(), default=str))
            continue
        print(f"({q},{m},{n}) index={R.index} bound={R.bound} certified={R.certified}")
        for d, f in sorted(R.factors.items()):
            print(f"    d={d}: |Q|={f.Q} |N|={f.N} |R|={f.R}")
        for msg in R.findings:
            print(f"    finding: {msg}")


if __name__ == "__main__":
    main()
