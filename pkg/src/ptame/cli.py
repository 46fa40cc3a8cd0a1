"""Command-line front end.

Exit status: 0 ok, 1 usage error, 2 budget exceeded, 3 mathematical finding.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import io
from .equivariance import (BudgetExceeded, POINT_BUDGET, check_budget, direct_parity, index_report,
                           mma_order, orbit_action_group, parity_generator, predicted_parity,
                           profinite_check, stratum_counts, tame_group, wreath_decompose)
from .ffield import FieldError, ctx_for, prime_power
from .orbits import build_orbit_table, orbit_action
from .permgroup import alt_sym_verdict
from .polymap import induced_perm

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_FINDING = 0, 1, 2, 3
THREADS_ENV = "PTAME_THREADS"


class UsageError(ValueError):
    pass


class Finding(Exception):
    def __init__(self, report: dict):
        super().__init__(report.get("finding", "finding"))
        self.report = report


@dataclass
class JobConfig:
    subcommand: str
    q: int | None = None
    m: int | None = None
    n: int | None = None
    inputs: list = field(default_factory=list)
    output: str | None = None
    verification: str = "full"
    threads: int = 1
    fmt: str = "json"
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.q is not None and prime_power(self.q) is None:
            raise UsageError(f"q={self.q} is not a prime power")
        for name in ("m", "n"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise UsageError(f"{name} must be >= 1")
        if self.verification not in ("full", "sampled"):
            raise UsageError("verification must be 'full' or 'sampled'")
        if self.threads < 1:
            raise UsageError("thread count must be positive")


# -- subcommand bodies ---------------------------------------------------------------

def _orbits(cfg: JobConfig) -> dict:
    check_budget(cfg.q, cfg.m, cfg.n, cfg.extra.get("budget", POINT_BUDGET) * 100)
    ctx = ctx_for(cfg.q, cfg.m)
    t = build_orbit_table(ctx, cfg.n)
    return {"q": cfg.q, "m": cfg.m, "n": cfg.n, "r": {str(d): r for d, r in t.counts().items()},
            "checksum": t.checksum()}


def _perm(cfg: JobConfig) -> dict:
    ctx = ctx_for(cfg.q, cfg.m)
    level = cfg.extra.get("level") or cfg.m
    check_budget(cfg.q, level, cfg.n, cfg.extra.get("budget", POINT_BUDGET))
    table = build_orbit_table(ctx, cfg.n, level)
    out = []
    for w in io.read_words(cfg.inputs[0], ctx, cfg.n):
        p = induced_perm(w, level)
        act = orbit_action(p, table)
        out.append({"point_sign": p.perm.sign(), "point_cycle_type": {str(k): v for k, v in p.perm.cycle_type().items()},
                    "orbit_sign": act.sign(), "orbit_cycle_type": {str(k): v for k, v in act.cycle_type().items()},
                    "images": [int(x) for x in p.perm.images]})
    return {"q": cfg.q, "m": cfg.m, "n": cfg.n, "level": level, "perms": out}


def _group(cfg: JobConfig) -> dict:
    G = tame_group(cfg.q, cfg.m, cfg.n, budget=cfg.extra.get("budget", POINT_BUDGET))
    B, table = orbit_action_group(cfg.q, cfg.m, cfg.n)
    return {"q": cfg.q, "m": cfg.m, "n": cfg.n, "order": str(G.order), "certified": G.bsgs.certified,
            "orbit_action_order": str(B.order()), "orbit_action_degree": table.r(cfg.m),
            "orbit_action_verdict": alt_sym_verdict(B)}


def _mma(cfg: JobConfig) -> dict:
    counts = stratum_counts(cfg.q, cfg.m, cfg.n)
    return {"q": cfg.q, "m": cfg.m, "n": cfg.n, "r": {str(d): r for d, r in counts.items()},
            "mma_order": str(mma_order(cfg.q, cfg.m, cfg.n))}


def _index(cfg: JobConfig) -> dict:
    R = index_report(cfg.q, cfg.m, cfg.n, budget=cfg.extra.get("budget", POINT_BUDGET))
    rep = R.to_json()
    if R.findings:
        raise Finding({**rep, "finding": R.findings})
    return rep


def _sign_table(cfg: JobConfig) -> dict:
    rows, bad = [], []
    n = cfg.n or 3
    for q in cfg.extra["qs"]:
        for m in cfg.extra["ms"]:
            if q ** (m * n) > cfg.extra.get("max_points", 10**6):
                continue
            ctx = ctx_for(q, m)
            table = build_orbit_table(ctx, n)
            for kind in ("swap", "scale", "shear"):
                pred = predicted_parity(kind, q, m, n)
                got = direct_parity(parity_generator(kind, ctx, n), table)
                row = {"q": q, "m": m, "kind": kind, "predicted": pred.parity, "direct": got,
                       "case": pred.case, "outside_proof_cases": pred.outside_proof_cases,
                       "stated": pred.stated_parity}
                rows.append(row)
                if pred.parity != got:
                    bad.append(row)
    rep = {"n": n, "rows": rows}
    if bad:
        raise Finding({**rep, "finding": bad})
    return rep


def _three_cycle(cfg: JobConfig) -> dict:
    from .constructions.three_cycle import cycle_report, three_cycle_word
    ctx = ctx_for(cfg.q, cfg.m)
    check_budget(cfg.q, cfg.m, cfg.n, cfg.extra.get("budget", POINT_BUDGET) * 100)
    rep = cycle_report(ctx, cfg.n)
    rep["cycle_type"] = {str(k): v for k, v in rep["cycle_type"].items()}
    rep["moved"] = [int(x) for x in rep["moved"]]
    rep["word"] = io.word_to_json(three_cycle_word(ctx, cfg.n))
    return rep


def _mover(cfg: JobConfig) -> dict:
    from .constructions.movers import MoverPrecondition, two_transitive_mover
    ctx = ctx_for(cfg.q, cfg.m)
    r, s, u = (io.parse_point(cfg.extra[k]) for k in ("r", "s", "u"))
    for p in (r, s, u):
        if len(p) != cfg.n or any(not 0 <= x < ctx.size for x in p):
            raise UsageError(f"point {list(p)} is not in F_{{q^m}}^{cfg.n}")
    try:
        tr = two_transitive_mover(ctx, r, s, u)
    except MoverPrecondition as e:
        raise UsageError(str(e))
    return tr.to_json()


def _zeta(cfg: JobConfig) -> dict:
    from .constructions.three_cycle import zeta_word
    ctx = ctx_for(cfg.q, cfg.m)
    check_budget(cfg.q, cfg.m, cfg.n, cfg.extra.get("budget", POINT_BUDGET) * 100)
    d, i, j = cfg.extra["d"], cfg.extra["i"], cfg.extra["j"]
    table = build_orbit_table(ctx, cfg.n)
    if cfg.m % d or d < 2:
        raise UsageError("d must divide m and be at least 2")
    if not (0 <= i < table.r(d) and 0 <= j < table.r(d)) or i == j:
        raise UsageError("orbit ids must be distinct and in range")
    w = zeta_word(ctx, cfg.n, d, i, j)
    wr = wreath_decompose(induced_perm(w), table, d)
    ok = wr.sigma.is_identity() and wr.twist[i] == (-1) % d and wr.twist[j] == 1 % d and \
        sum(1 for k, a in enumerate(wr.twist) if a and k not in (i, j)) == 0
    rep = {"d": d, "i": i, "j": j, "twist": list(wr.twist), "sigma_identity": wr.sigma.is_identity(),
           "verified": bool(ok), "length": len(w)}
    if not ok:
        raise Finding({**rep, "finding": "twist word does not meet its contract"})
    return rep


def _nagata(cfg: JobConfig) -> dict:
    from .constructions.mimick import nagata_level_word
    from .polymap import nagata
    check_budget(cfg.q, cfg.m, 3, cfg.extra.get("budget", POINT_BUDGET))
    ctx = ctx_for(cfg.q, cfg.m)
    w = nagata_level_word(cfg.q, cfg.m)
    pn = induced_perm(nagata(ctx), cfg.m, check=False)
    rep = {"q": cfg.q, "m": cfg.m, "length": len(w), "equal": induced_perm(w, cfg.m, check=False) == pn,
           "word": io.word_to_json(w)}
    if cfg.extra.get("bsgs"):
        rep["in_tame_image"] = tame_group(cfg.q, cfg.m, 3).bsgs.contains(pn.perm)
    return rep


def _mimick(cfg: JobConfig) -> dict:
    from .constructions.mimick import mimick_open, specialized_agrees
    ctx = ctx_for(cfg.q, cfg.m or 1) if cfg.q else None
    try:
        words = io.read_words(cfg.inputs[0], ctx, cfg.n)
    except ValueError as e:
        raise UsageError(str(e))
    if len(words) != 1:
        raise UsageError("mimick expects exactly one word")
    w = words[0]
    ctx = w.ctx
    g = io.parse_univariate(ctx, cfg.extra["g"])
    out = mimick_open(w)
    good = [c for c in range(ctx.size) if g.eval([c]) != 0]
    ok = all(specialized_agrees(out, w, c) for c in good)
    rep = {"checked_values": len(good), "agrees": ok, "word": io.word_to_json(out)}
    if not ok:
        raise Finding({**rep, "finding": "open-set transform disagrees"})
    return rep


def _interp(cfg: JobConfig) -> dict:
    from .constructions.interp import interp_indicator, interp_value
    ctx = ctx_for(cfg.q, cfg.m)
    alpha = io.parse_point(cfg.extra["alpha"])
    if any(not 0 <= x < ctx.size for x in alpha):
        raise UsageError("alpha has codes outside the field")
    b = cfg.extra.get("b")
    f = interp_indicator(ctx, alpha) if b is None else interp_value(ctx, alpha, int(b))
    return {"alpha": list(alpha), "b": b, "poly": f.to_literal()}


def _profinite(cfg: JobConfig) -> dict:
    from .acceptance import random_word
    levels = cfg.extra["levels"]
    top = math.lcm(*levels)
    ctx = ctx_for(cfg.q, top)
    if cfg.inputs:
        words = io.read_words(cfg.inputs[0], ctx, cfg.n)
    else:
        rng = np.random.default_rng(cfg.extra.get("seed", 0))
        words = [random_word(ctx, cfg.n, rng) for _ in range(cfg.extra.get("count", 20))]
    res = [profinite_check(w, levels) for w in words]
    rep = {"levels": levels, "words": len(words), "compatible": sum(r.compatible for r in res)}
    if rep["compatible"] != len(words):
        raise Finding({**rep, "finding": [r.failures for r in res if not r.compatible]})
    return rep


def _accept(cfg: JobConfig) -> dict:
    from .acceptance import run_suite
    only = cfg.extra.get("only")
    crits = run_suite(only, echo=lambda s: print(s, file=sys.stderr), workers=cfg.threads)
    lines = [{"criterion": c.key, "check": ln.label, "passed": ln.passed, "detail": ln.detail,
              "seconds": round(ln.seconds, 3)} for c in crits for ln in c.lines]
    rep = {"results": lines, "all_passed": all(x["passed"] for x in lines)}
    if not rep["all_passed"]:
        raise Finding({**rep, "finding": [x for x in lines if not x["passed"]]})
    return rep


DISPATCH = {
    "orbits": _orbits, "perm": _perm, "group": _group, "mma": _mma, "index": _index,
    "sign-table": _sign_table, "three-cycle": _three_cycle, "mover": _mover, "zeta": _zeta,
    "nagata": _nagata, "mimick": _mimick, "interp": _interp, "profinite": _profinite, "accept": _accept,
}
NEEDS_QMN = {"orbits", "perm", "group", "mma", "index", "three-cycle", "mover", "zeta"}


def run(cfg: JobConfig) -> tuple[int, dict]:
    try:
        cfg.validate()
        if cfg.subcommand in NEEDS_QMN and None in (cfg.q, cfg.m, cfg.n):
            raise UsageError(f"{cfg.subcommand} needs --q, --m and --n")
        report = DISPATCH[cfg.subcommand](cfg)
        status = EXIT_OK
    except (UsageError, FieldError) as e:
        report, status = {"error": "usage", "message": str(e)}, EXIT_USAGE
    except BudgetExceeded as e:
        report, status = {"error": "budget", "message": str(e)}, EXIT_BUDGET
    except Finding as f:
        report, status = f.report, EXIT_FINDING
    report = {"subcommand": cfg.subcommand, "status": status, **report}
    if cfg.output:
        io.write_report(cfg.output, report)
    return status, report


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ptame", description="Tame automorphisms acting on Galois orbits of F_{q^m}^n.")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(sp, qmn=True):
        if qmn:
            sp.add_argument("--q", type=int)
            sp.add_argument("--m", type=int)
            sp.add_argument("--n", type=int)
        sp.add_argument("--out", help="write the JSON report here")
        fmt = sp.add_mutually_exclusive_group()
        fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
        fmt.add_argument("--table", dest="fmt", action="store_const", const="table")
        sp.add_argument("--verification", default="full", choices=["full", "sampled"])
        sp.add_argument("--budget", type=int, default=POINT_BUDGET)
        sp.set_defaults(fmt="json")
        return sp

    common(sub.add_parser("orbits", help="orbit counts per stratum"))
    sp = common(sub.add_parser("perm", help="induced permutations of words from a JSONL file"))
    sp.add_argument("--word", required=True)
    sp.add_argument("--level", type=int)
    common(sub.add_parser("group", help="order of the tame image"))
    common(sub.add_parser("mma", help="order of the equivariant permutation group"))
    common(sub.add_parser("index", help="index of the tame image with stratified factors"))
    sp = common(sub.add_parser("sign-table", help="predicted vs direct parities"), qmn=False)
    sp.add_argument("--qs", type=_ints, default=[2, 3, 4, 5, 7])
    sp.add_argument("--ms", type=_ints, default=[2, 3])
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--max-points", type=int, default=10**6)
    common(sub.add_parser("three-cycle", help="the commutator 3-cycle word"))
    sp = common(sub.add_parser("mover", help="word moving [r] to [s] fixing [u]"))
    for k in ("r", "s", "u"):
        sp.add_argument(f"--{k}", required=True, help="comma-separated field codes")
    sp = common(sub.add_parser("zeta", help="Frobenius twist on two orbits"))
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--j", type=int, required=True)
    sp = common(sub.add_parser("nagata", help="level word for the Nagata map"), qmn=False)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--bsgs", action="store_true", help="also test membership in the tame image")
    sp = common(sub.add_parser("mimick", help="clear g-power denominators of a parameterized word"), qmn=False)
    sp.add_argument("--word", required=True)
    sp.add_argument("--g", required=True)
    sp.add_argument("--q", type=int, help="needed for generator-per-line files")
    sp.add_argument("--m", type=int)
    sp.add_argument("--n", type=int)
    sp = common(sub.add_parser("interp", help="indicator/value interpolation polynomial"), qmn=False)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--b", type=int)
    sp = common(sub.add_parser("profinite", help="restriction squares across levels"), qmn=False)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--levels", type=_ints, default=[1, 2, 4])
    sp.add_argument("--words")
    sp.add_argument("--count", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp = common(sub.add_parser("accept", help="run the acceptance suite"), qmn=False)
    sp.add_argument("--only", type=lambda s: s.split(","), default=None)
    return p


def config_from_args(args: argparse.Namespace) -> JobConfig:
    extra = {k: v for k, v in vars(args).items()
             if k not in ("subcommand", "q", "m", "n", "out", "fmt", "verification", "word", "words")}
    inputs = [x for x in (getattr(args, "word", None), getattr(args, "words", None)) if x]
    threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    return JobConfig(args.subcommand, getattr(args, "q", None), getattr(args, "m", None),
                     getattr(args, "n", None), inputs, args.out, args.verification, threads,
                     args.fmt, extra)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ValueError as e:
        print(f"ptame: {e}", file=sys.stderr)
        return EXIT_USAGE
    status, report = run(cfg)
    if cfg.fmt == "table":
        print("\n".join(io.table_lines(report)))
    else:
        print(io.dumps_report(report))
    return status


if __name__ == "__main__":
    sys.exit(main())
