"""Run the two-transitive mover on every ordered triple of distinct orbits of one stratum."""
import argparse
import collections
import itertools
import time

from ptame.constructions.movers import two_transitive_mover
from ptame.ffield import ctx_for
from ptame.orbits import build_orbit_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--limit", type=int, default=0, help="stop after this many triples (0 = all)")
    args = ap.parse_args()
    ctx = ctx_for(args.q, args.m)
    table = build_orbit_table(ctx, args.n)
    reps = [tuple(table.rep_coords(args.m, i)) for i in range(table.r(args.m))]
    cases = collections.Counter()
    lengths = []
    fails = 0
    t0 = time.perf_counter()
    for k, (r, s, u) in enumerate(itertools.permutations(reps, 3)):
        if args.limit and k >= args.limit:
            break
        try:
            tr = two_transitive_mover(ctx, r, s, u)
        except Exception as e:
            fails += 1
            print(f"FAIL r={r} s={s} u={u}: {e}")
            continue
        cases.update(set(tr.cases))
        lengths.append(len(tr.word))
    print(f"{len(lengths) + fails} triples, {fails} failures, {time.perf_counter() - t0:.1f}s")
    if lengths:
        print(f"word length: min {min(lengths)} max {max(lengths)} mean {sum(lengths) / len(lengths):.1f}")
    for name, c in sorted(cases.items()):
        print(f"  {name:>14}: {c}")


if __name__ == "__main__":
    main()
