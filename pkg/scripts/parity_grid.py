"""Print predicted vs directly computed orbit-action parity over a (q, m) grid."""
import argparse

from ptame.equivariance import direct_parity, parity_generator, predicted_parity, shear_family
from ptame.ffield import ctx_for
from ptame.orbits import build_orbit_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--qs", default="2,3,4,5,7")
    ap.add_argument("--ms", default="2,3")
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--max-points", type=int, default=10**6)
    ap.add_argument("--shears", action="store_true", help="also list the X_0 += X_1 X_2^k family")
    args = ap.parse_args()
    n = args.n
    print(f"{'q':>3} {'m':>2} {'kind':>6} {'pred':>5} {'direct':>6}  case")
    for q in map(int, args.qs.split(",")):
        for m in map(int, args.ms.split(",")):
            if q ** (m * n) > args.max_points:
                continue
            ctx = ctx_for(q, m)
            table = build_orbit_table(ctx, n)
            for kind in ("swap", "scale", "shear"):
                pred = predicted_parity(kind, q, m, n)
                got = direct_parity(parity_generator(kind, ctx, n), table)
                flag = "" if pred.parity == got else "  MISMATCH"
                note = " (outside the proved cases)" if pred.outside_proof_cases else ""
                print(f"{q:>3} {m:>2} {kind:>6} {pred.parity:>5} {got:>6}  {pred.case}{note}{flag}")
            if args.shears:
                par = [direct_parity(w, table) for w in shear_family(ctx, n)]
                print(f"{q:>3} {m:>2} shears {par}")


if __name__ == "__main__":
    main()
