"""Acceptance checks: each returns a list of (label, passed, detail) lines."""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .constructions.mimick import nagata_level_word
from .constructions.movers import two_transitive_mover
from .constructions.three_cycle import cycle_report
from .equivariance import (brute_force_mma_count, brute_force_stratum_group, direct_parity,
                           index_bound, index_report, mma_order, orbit_action_group,
                           parity_generator, predicted_parity, profinite_check, tame_group,
                           tame_image_order, wreath_decompose)
from .ffield import FieldCtx, ctx_for
from .mpoly import MPoly
from .orbits import build_orbit_table
from .permgroup import Perm, alt_sym_verdict
from .polymap import (Affine, Elementary, LevelPerm, Swap, TameWord, induced_perm, nagata)


WORKERS = 1


@dataclass
class Line:
    label: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0


@dataclass
class Criterion:
    key: str
    title: str
    run: Callable[[], list]
    lines: list = field(default_factory=list)


def _timed(label, fn, limit=None) -> Line:
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    if limit is not None and dt > limit:
        ok, detail = False, f"{detail}; took {dt:.1f}s > {limit}s"
    return Line(label, bool(ok), detail, dt)


def maurer() -> list[Line]:
    cases = [(3, 1, 2, math.factorial(9), "Sym"), (4, 1, 2, math.factorial(16) // 2, "Alt"),
             (2, 1, 2, math.factorial(4), "Sym")]
    out = []
    for q, m, n, want, verdict in cases:
        def fn(q=q, m=m, n=n, want=want, verdict=verdict):
            order, B = tame_image_order(q, m, n)
            v = alt_sym_verdict(B)
            return order == want and v == verdict and B.certified, f"order={order} verdict={v}"
        out.append(_timed(f"({q},{m},{n})", fn, limit=5))
    return out


def three_cycle() -> list[Line]:
    out = []
    for q in (2, 3):
        def fn(q=q):
            ctx = ctx_for(q, 2)
            rep = cycle_report(ctx, 3)
            r = build_orbit_table(ctx, 3).r(2)
            ok = rep["cycle_type"] == {3: 1, 1: r - 3} and [int(x) for x in rep["moved"]] == rep["expected"]
            return ok, f"cycle type {rep['cycle_type']}"
        out.append(_timed(f"({q},2,3)", fn, limit=5))
    return out


def alt_sym() -> list[Line]:
    out = []
    for q, want, name in ((2, math.factorial(28) // 2, "Alt(28)"), (3, math.factorial(351), "Sym(351)")):
        def fn(q=q, want=want, name=name):
            B, _ = orbit_action_group(q, 2, 3)
            return B.order() == want and B.certified, f"order {'=' if B.order() == want else '!='} {name}"
        out.append(_timed(f"({q},2,3)", fn, limit=120))
    return out


def parity_grid() -> list[Line]:
    def fn():
        bad, count = [], 0
        for q in (2, 3, 4, 5, 7):
            for m in (2, 3):
                if q ** (3 * m) > 10**6:
                    continue
                ctx = ctx_for(q, m)
                table = build_orbit_table(ctx, 3)
                for kind in ("swap", "scale", "shear"):
                    pred = predicted_parity(kind, q, m, 3).parity
                    got = direct_parity(parity_generator(kind, ctx, 3), table)
                    count += 1
                    if pred != got:
                        bad.append(f"{kind}@({q},{m})")
        return not bad, f"{count} cells, mismatches: {bad or 'none'}"
    return [_timed("grid", fn, limit=120)]


def _embed(table, pts, img) -> LevelPerm:
    full = np.arange(len(table.size), dtype=np.int64)
    full[pts] = pts[img]
    return LevelPerm(table.ctx, table.n, table.level, Perm(full))


def wreath() -> list[Line]:
    def fn():
        ctx = ctx_for(2, 2)
        table = build_orbit_table(ctx, 2)
        pts = table.stratum_positions(2)
        maps = brute_force_stratum_group(table, 2)
        perms = [_embed(table, pts, img) for img in maps]
        keys = {wreath_decompose(p, table, 2).key() for p in perms}
        want = 2**6 * math.factorial(6)
        rng = np.random.default_rng(0)
        mult = True
        for _ in range(1000):
            a, b = (perms[i] for i in rng.integers(len(perms), size=2))
            if wreath_decompose(a * b, table, 2) != wreath_decompose(a, table, 2) * wreath_decompose(b, table, 2):
                mult = False
                break
        ok = len(maps) == want and len(keys) == want and mult
        return ok, f"|G_2|={len(maps)}, distinct wreath images={len(keys)}, multiplicative={mult}"
    return [_timed("(2,2,2)", fn, limit=30)]


def mma() -> list[Line]:
    def fn():
        c = brute_force_mma_count(ctx_for(2, 2), 1)
        return c == 4 == mma_order(2, 2, 1), f"brute force {c}, formula {mma_order(2, 2, 1)}"
    return [_timed("(2,2,1)", fn, limit=1)]


def index() -> list[Line]:
    reports = {}

    def run(q):
        if q not in reports:
            reports[q] = index_report(q, 2, 3)
        return reports[q]

    def a():
        R = run(2)
        return (R.certified and R.mma_order % R.tame_image_order == 0 and R.index <= index_bound(2),
                f"index={R.index} bound={index_bound(2)}")

    def b():
        R = run(3)
        return R.certified and R.index <= 2, f"index={R.index} (claimed <= 2)"

    def c():
        ok = True
        for q in (2, 3):
            R = run(q)
            ok &= math.prod(f.Q for f in R.factors.values()) == R.tame_image_order
        return ok, "product of per-stratum factors equals |G|"
    return [_timed("(2,2,3) index <= 8", a, limit=300), _timed("(3,2,3) index <= 2", b, limit=300),
            _timed("stratified factorization", c)]


def _mover_rows(args) -> tuple[int, int]:
    """(triples, failures) for all triples with first orbit ``i``."""
    q, m, n, i = args
    ctx = ctx_for(q, m)
    table = build_orbit_table(ctx, n)
    reps = [tuple(table.rep_coords(m, k)) for k in range(table.r(m))]
    r = reps[i]
    count = fails = 0
    for s, u in itertools.permutations([x for x in reps if x != r], 2):
        count += 1
        try:
            two_transitive_mover(ctx, r, s, u)
        except Exception:
            fails += 1
    return count, fails


def mover_totality() -> list[Line]:
    def fn():
        jobs = [(2, 2, 3, i) for i in range(build_orbit_table(ctx_for(2, 2), 3).r(2))]
        if WORKERS > 1:
            from concurrent.futures import ProcessPoolExecutor
            with ProcessPoolExecutor(WORKERS) as ex:
                res = list(ex.map(_mover_rows, jobs))
        else:
            res = [_mover_rows(j) for j in jobs]
        count, fails = (sum(x) for x in zip(*res))
        return fails == 0, f"{count} triples, {fails} failures"
    return [_timed("(2,2,3) exhaustive", fn, limit=300)]


def nagata_tame() -> list[Line]:
    out = []
    for m in (1, 2):
        def fn(m=m):
            ctx = ctx_for(3, m)
            w = nagata_level_word(3, m)
            pw = induced_perm(w, m, check=False)
            pn = induced_perm(nagata(ctx), m, check=False)
            G = tame_group(3, m, 3)
            member = G.bsgs.contains(pn.perm)
            return pw == pn and member, f"equal on {len(pn.domain)} points, in tame image: {member}"
        out.append(_timed(f"q=3 m={m}", fn, limit=600))
    return out


def random_word(ctx: FieldCtx, n: int, rng, length: int = 6) -> TameWord:
    gens = []
    base = ctx.elements(1)
    for _ in range(length):
        kind = rng.integers(3)
        if kind == 0:
            i = int(rng.integers(n))
            terms = {}
            for _ in range(3):
                e = [int(x) for x in rng.integers(0, 4, size=n)]
                e[i] = 0
                terms[tuple(e)] = int(rng.choice(base))
            gens.append(Elementary(i, MPoly(ctx, n, terms)))
        elif kind == 1:
            gens.append(Swap(int(rng.integers(1, n))))
        else:
            while True:
                M = tuple(tuple(int(rng.choice(base)) for _ in range(n)) for _ in range(n))
                b = tuple(int(rng.choice(base)) for _ in range(n))
                try:
                    gens.append(Affine(M, b, ctx))
                    break
                except ValueError:
                    continue
    return TameWord(ctx, n, gens)


def profinite() -> list[Line]:
    def fn():
        ctx = ctx_for(2, 4)
        rng = np.random.default_rng(7)
        bad = 0
        for _ in range(20):
            w = random_word(ctx, 2, rng)
            if not profinite_check(w, [1, 2, 4]).compatible:
                bad += 1
        return bad == 0, f"20 words, {bad} incompatible"
    return [_timed("q=2 n=2 levels 1,2,4", fn, limit=30)]


def fault_injection() -> list[Line]:
    def fn():
        broken = FieldCtx(2, 1, 2, (1, 0, 1))
        problems = broken.check_invariants()
        healthy = ctx_for(2, 2).check_invariants()
        return bool(problems) and not healthy, f"corrupted field reports: {problems}"
    return [_timed("x^2+1 over F_2", fn)]


CRITERIA = [
    Criterion("maurer", "Maurer baseline", maurer),
    Criterion("three-cycle", "3-cycle", three_cycle),
    Criterion("alt-sym", "Alt/Sym orbit action", alt_sym),
    Criterion("parity", "parity grid", parity_grid),
    Criterion("wreath", "wreath model", wreath),
    Criterion("mma", "MMA brute force", mma),
    Criterion("index", "index bound", index),
    Criterion("mover", "mover totality", mover_totality),
    Criterion("nagata", "Nagata level words", nagata_tame),
    Criterion("profinite", "profinite compatibility", profinite),
    Criterion("fault", "negative control: corrupted field", fault_injection),
]


def run_suite(only: list[str] | None = None, echo: Callable[[str], None] | None = None,
              workers: int = 1) -> list[Criterion]:
    global WORKERS
    WORKERS = max(1, workers)
    done = []
    for c in CRITERIA:
        if only and c.key not in only:
            continue
        c.lines = c.run()
        for ln in c.lines:
            if echo:
                echo(f"{'PASS' if ln.passed else 'FAIL'}  {c.title} [{ln.label}] {ln.detail} ({ln.seconds:.2f}s)")
        done.append(c)
    return done
