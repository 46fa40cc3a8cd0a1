"""Tame words moving one Galois orbit onto another while fixing a third.

All points are tuples of field codes; slots are 0-based.  Every public mover
verifies its output before returning it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..ffield import FieldCtx
from ..mpoly import MPoly, grlex_key
from ..orbits import build_orbit_table, lex_greater, ordered_type, point_degree
from ..polymap import (Elementary, NotBijectiveAtLevel, Swap, TameWord, VarPerm,
                       induced_perm, level_domain)
from .interp import galois_orbit, interp_value, same_orbit

FULL_CHECK_LIMIT = 4096


class MoverError(RuntimeError):
    """A construction step found its hypotheses violated (a bug, not bad input)."""


class MoverPrecondition(ValueError):
    pass


@dataclass
class MoverTrace:
    r: tuple
    s: tuple
    u: tuple
    cases: list = field(default_factory=list)
    word: TameWord | None = None
    level: int = 0
    verified: bool = False

    def to_json(self) -> dict:
        from ..io import word_to_json
        return {"r": list(self.r), "s": list(self.s), "u": list(self.u), "level": self.level,
                "cases": list(self.cases), "length": len(self.word), "verified": self.verified,
                "word": word_to_json(self.word)}


def _drop(x: Sequence[int], k: int) -> tuple:
    return tuple(x[:k]) + tuple(x[k + 1:])


def _others(n: int, k: int) -> list[int]:
    return [i for i in range(n) if i != k]


def _elementary(ctx: FieldCtx, n: int, k: int, f: MPoly) -> Elementary:
    return Elementary(k, f.extend_vars(n, _others(n, k)))


def _identity(ctx: FieldCtx, n: int) -> TameWord:
    return TameWord(ctx, n, [])


def _conj(t: TameWord, inner: TameWord) -> TameWord:
    """t^{-1} o inner o t."""
    return t.inverse() * inner * t


class _Builder:
    """Accumulates elementary steps while tracking named points exactly."""

    def __init__(self, ctx: FieldCtx, n: int, level: int, **pts):
        self.ctx, self.n, self.level = ctx, n, level
        self.pts = {k: tuple(int(x) for x in v) for k, v in pts.items()}
        self.word = _identity(ctx, n)

    def move(self, who: str, k: int, v: int):
        ctx = self.ctx
        c = self.pts[who]
        diff = ctx.sub(v, c[k])
        if diff == 0:
            return
        a = _drop(c, k)
        for name, p in self.pts.items():
            if name != who and same_orbit(ctx, a, _drop(p, k)):
                raise MoverError(f"step on slot {k} would disturb point {name}")
        if point_degree(ctx, a) % ctx.degree(diff):
            raise MoverError(f"value {diff} is outside F_q of the remaining slots")
        g = _elementary(ctx, self.n, k, interp_value(ctx, a, diff))
        self.apply(TameWord(ctx, self.n, [g]))
        want = c[:k] + (int(v),) + c[k + 1:]
        if self.pts[who] != want:
            raise MoverError("elementary step missed its target")

    def apply(self, w: TameWord):
        before = dict(self.pts)
        self.word = w * self.word
        self.pts = {k: tuple(w.apply_point(p)) for k, p in self.pts.items()}
        return before


def coordinate_replace(ctx: FieldCtx, r, u, i: int, j: int, k: int, v: int) -> TameWord:
    """Single elementary map sending [r] to [r with slot k set to v] and fixing [u]."""
    r, u = tuple(r), tuple(u)
    if ctx.degree(r[i]) != ctx.m:
        raise MoverPrecondition(f"slot {i} of r does not generate the field")
    if same_orbit(ctx, (r[j],), (u[j],)):
        raise MoverPrecondition(f"slot {j} of r and u lie in the same orbit")
    if k in (i, j):
        raise MoverPrecondition("k must differ from i and j")
    diff = ctx.sub(v, r[k])
    if diff == 0:
        return _identity(ctx, len(r))
    return TameWord(ctx, len(r), [_elementary(ctx, len(r), k, interp_value(ctx, _drop(r, k), diff))])


# -- distinct-orbit mover ----------------------------------------------------------

def _coord_differs(ctx, x, y, i) -> bool:
    return not same_orbit(ctx, (x[i],), (y[i],))


def _case2_word(ctx, n, level, r, s, u, cases) -> TameWord:
    i = min(l for l in range(1, n) if _coord_differs(ctx, s, u, l))
    k = min(l for l in range(1, n) if l != i)
    B = _Builder(ctx, n, level, r=r, u=u)
    for l in range(1, n):
        B.move("r", l, s[i] if l == i else (s[0] if l == k else s[l]))
    B.move("r", 0, s[0])
    B.move("r", k, s[k])
    return B.word


def _distinct_cases(ctx, n, level, r, s, u, cases: list) -> TameWord:
    dr = [i for i in range(n) if _coord_differs(ctx, r, u, i)]
    ds = [i for i in range(n) if _coord_differs(ctx, s, u, i)]
    hi_r = [i for i in dr if i >= 1]
    hi_s = [i for i in ds if i >= 1]
    B = _Builder(ctx, n, level, r=r, u=u)
    if 0 in dr and 0 in ds:
        cases.append("1")
        for k in range(1, n):
            B.move("r", k, s[0] if k == 1 else s[k])
        c = B.pts["r"]
        if not same_orbit(ctx, c[1:], u[1:]):
            cases.append("1.1")
            B.move("r", 0, s[0])
            B.move("r", 1, s[1])
        else:
            cases.append("1.2")
            B.move("u", 2, u[0])
            B.move("r", 2, s[0])
            B.move("r", 0, s[0])
            B.move("r", 1, s[1])
            B.move("r", 2, s[2])
            B.move("u", 2, u[2])
        return B.word
    if 0 in dr and hi_s:
        cases.append("2")
        return _case2_word(ctx, n, level, r, s, u, cases)
    if 0 in ds and hi_r:
        cases.append("3")
        return _case2_word(ctx, n, level, s, r, u, cases).inverse()
    if not (hi_r and hi_s):
        raise MoverError("no case of the distinct-orbit construction applies")
    pairs = [(i, j) for i in hi_r for j in hi_s if i != j]
    if pairs:
        i, j = min(pairs)
        cases.append("4.1")
        for l in range(1, n):
            if l != i:
                B.move("r", l, s[l])
        B.move("r", i, s[0])
        B.move("r", 0, s[0])
        B.move("r", i, s[i])
        return B.word
    i = hi_r[0]
    k = min(l for l in range(1, n) if l != i)
    cases.append("4.2")
    for l in range(1, n):
        if l != i:
            B.move("r", l, s[0] if l == k else s[l])
    B.move("r", 0, s[0])
    B.move("r", k, s[k])
    c = B.pts["r"]
    if not same_orbit(ctx, _drop(c, i), _drop(u, i)):
        cases.append("4.2.1")
        B.move("r", i, s[i])
    else:
        cases.append("4.2.2")
        B.move("u", k, u[i])
        B.move("r", k, s[i])
        B.move("r", i, s[i])
        B.move("r", k, s[k])
        B.move("u", k, u[k])
    return B.word


def _weak_normalizer(ctx, n, u) -> TameWord:
    """Product of X_k += f_k(X_0) with f_k(u_0) = -u_k; sends u to (u_0, 0, ..., 0)."""
    gens = []
    for k in range(1, n):
        if u[k]:
            f = interp_value(ctx, (u[0],), ctx.neg(u[k]))
            gens.append(Elementary(k, f.extend_vars(n, [0])))
    return TameWord(ctx, n, gens)


def weakly_conjugate_points(ctx, x, y) -> bool:
    return all(same_orbit(ctx, (a,), (b,)) for a, b in zip(x, y))


def _distinct_core(ctx, n, level, r, s, u, cases) -> TameWord:
    rw = weakly_conjugate_points(ctx, r, u)
    sw = weakly_conjugate_points(ctx, s, u)
    if not (rw or sw):
        return _distinct_cases(ctx, n, level, r, s, u, cases)
    if rw and sw:
        cases.append("reduce:r~u,s~u")
    else:
        cases.append("reduce:r~u" if rw else "reduce:s~u")
    F = _weak_normalizer(ctx, n, u)
    r2, s2, u2 = (tuple(F.apply_point(p)) for p in (r, s, u))
    if weakly_conjugate_points(ctx, r2, u2) or weakly_conjugate_points(ctx, s2, u2):
        raise MoverError("weak-conjugacy reduction did not separate the points")
    return _conj(F, _distinct_cases(ctx, n, level, r2, s2, u2, cases))


def _check_triple(ctx, r, s, u, level):
    if not (len(r) == len(s) == len(u)):
        raise MoverPrecondition("points of different dimension")
    if len(r) < 3:
        raise MoverPrecondition("movers need n >= 3")
    for name, p in (("r", r), ("s", s), ("u", u)):
        if point_degree(ctx, p) != level:
            raise MoverPrecondition(f"{name} = {list(p)} is not in the stratum of size {level}")
    if same_orbit(ctx, r, s) or same_orbit(ctx, r, u) or same_orbit(ctx, s, u):
        raise MoverPrecondition("the three orbits must be pairwise distinct")


def verify_mover(ctx: FieldCtx, word: TameWord, r, s, u, level: int, rng_seed: int = 0) -> bool:
    """word maps [r] into [s] and [u] into [u]; checks bijectivity on the level domain too."""
    n = len(r)
    orbit_s = set(galois_orbit(ctx, s))
    orbit_u = set(galois_orbit(ctx, u))
    for x in galois_orbit(ctx, r):
        if tuple(word.apply_point(x)) not in orbit_s:
            return False
    for x in galois_orbit(ctx, u):
        if tuple(word.apply_point(x)) not in orbit_u:
            return False
    if ctx.q ** (level * n) <= FULL_CHECK_LIMIT:
        try:
            induced_perm(word, level)
        except NotBijectiveAtLevel:
            return False
    else:
        coords = level_domain(ctx, n, level)[1]
        rng = np.random.default_rng(rng_seed)
        sample = coords[:, rng.choice(coords.shape[1], size=1000, replace=False)]
        img = word.apply(sample)
        allowed = set(ctx.elements(level))
        if not set(np.unique(img).tolist()) <= allowed:
            return False
    return True


def _finish(ctx, trace: MoverTrace, word: TameWord) -> MoverTrace:
    trace.word = word
    if not verify_mover(ctx, word, trace.r, trace.s, trace.u, trace.level):
        raise MoverError(f"mover output failed verification (cases {trace.cases})")
    trace.verified = True
    return trace


def distinct_orbit_mover(ctx: FieldCtx, r, s, u, level: int | None = None) -> MoverTrace:
    """Move [r] to [s] fixing [u], when slot 0 of r and of s generates F_{q^level}."""
    level = ctx.m if level is None else level
    r, s, u = (tuple(int(x) for x in p) for p in (r, s, u))
    _check_triple(ctx, r, s, u, level)
    if ctx.degree(r[0]) != level or ctx.degree(s[0]) != level:
        raise MoverPrecondition("slot 0 of r and s must generate the field")
    trace = MoverTrace(r, s, u, level=level)
    word = _distinct_core(ctx, len(r), level, r, s, u, trace.cases)
    return _finish(ctx, trace, word)


# -- two-transitive mover ------------------------------------------------------------

def _shear_search(ctx, n, level, r) -> tuple[MPoly, bool]:
    """f in F_q[X_0..X_{n-2}] raising the degree of r_{n-1} + f(r_0..r_{n-2}).

    Single terms c*X^e are tried in graded-lex order, then an interpolating
    polynomial with the smallest admissible value.  Returns (f, used_fallback).
    """
    prefix = r[:n - 1]
    last = r[n - 1]
    m_last = ctx.degree(last)
    Q = ctx.size
    base = [c for c in ctx.elements(1) if c]
    exps = sorted(itertools.product(range(Q), repeat=n - 1), key=grlex_key)
    for e in exps:
        mono = 1
        for x, k in zip(prefix, e):
            mono = ctx.mul(mono, ctx.pow(x, k)) if k else mono
        for c in base:
            if ctx.degree(ctx.add(last, ctx.mul(c, mono))) > m_last:
                return MPoly.monomial(ctx, n - 1, e, c), False
    w = point_degree(ctx, prefix)
    for c in ctx.elements(w):
        if ctx.degree(ctx.add(last, c)) > m_last:
            return interp_value(ctx, prefix, c), True
    raise MoverError("degree-raising search exhausted")


def _raise_type(ctx, n, level, r, u, cases) -> tuple[TameWord, tuple]:
    """Word fixing u exactly and sending r to a point of strictly larger ordered type."""
    B = _Builder(ctx, n, level, r=r, u=u)
    if same_orbit(ctx, r[:n - 1], u[:n - 1]):
        cases.append("shift")
        B.move("r", 0, ctx.add(r[0], 1))
    r = B.pts["r"]
    f, fallback = _shear_search(ctx, n, level, r)
    cases.append("raise-interp" if fallback else "raise")
    G = TameWord(ctx, n, [Elementary(n - 1, f.extend_vars(n, range(n - 1)))])
    B.apply(G)
    # undo the shear on [u]
    uu = B.pts["u"]
    corr = interp_value(ctx, uu[:n - 1], ctx.sub(u[n - 1], uu[n - 1]))
    B.apply(TameWord(ctx, n, [Elementary(n - 1, corr.extend_vars(n, range(n - 1)))]))
    if B.pts["u"] != tuple(u):
        raise MoverError("type-raising step moved u")
    if not lex_greater(_sorted_type(ctx, B.pts["r"]), _sorted_type(ctx, r)):
        raise MoverError("type-raising step did not raise the ordered type")
    return B.word, B.pts["r"]


def _sorted_type(ctx, p) -> tuple:
    return tuple(sorted((ctx.degree(x) for x in p), reverse=True))


def _solve(ctx, n, level, r, s, u, cases, depth=0) -> TameWord:
    """Move [r] to [s] fixing [u]; s has some generating slot."""
    if depth > 4 * n:
        raise MoverError("ordered-type induction did not terminate")
    if same_orbit(ctx, r, s):
        return _identity(ctx, n)
    _, perm = ordered_type(ctx, r, level)
    if list(perm) != list(range(n)):
        cases.append("sort")
        P = TameWord(ctx, n, [VarPerm(tuple(perm))])
        r1, s1, u1 = (tuple(P.apply_point(p)) for p in (r, s, u))
        return _conj(P, _solve(ctx, n, level, r1, s1, u1, cases, depth + 1))
    if ctx.degree(s[0]) != level:
        i = next(k for k in range(n) if ctx.degree(s[k]) == level)
        if same_orbit(ctx, r[1:], s[1:]):
            cases.append("T:swap")
            T = TameWord(ctx, n, [Swap(i)])
        else:
            cases.append("T:shear")
            f = interp_value(ctx, s[1:], ctx.sub(s[i], s[0]))
            T = TameWord(ctx, n, [_elementary(ctx, n, 0, f)])
        r1, s1, u1 = (tuple(T.apply_point(p)) for p in (r, s, u))
        if ordered_type(ctx, r1, level)[0] != ordered_type(ctx, r, level)[0] or ctx.degree(s1[0]) != level:
            raise MoverError("generator transfer broke its guarantees")
        return _conj(T, _solve(ctx, n, level, r1, s1, u1, cases, depth + 1))
    if ctx.degree(r[0]) == level:
        cases.append("base")
        return _distinct_core(ctx, n, level, r, s, u, cases)
    G, r1 = _raise_type(ctx, n, level, r, u, cases)
    return _solve(ctx, n, level, r1, s, u, cases, depth + 1) * G


def pivot_point(ctx: FieldCtx, n: int, level: int, avoid: Sequence[tuple]) -> tuple[tuple, bool]:
    """(v_0, 0, ..., 0) with v_0 the smallest generator; else the first admissible point."""
    v0 = min(a for a in ctx.elements(level) if ctx.degree(a) == level)
    v = (v0,) + (0,) * (n - 1)
    if not any(same_orbit(ctx, v, a) for a in avoid):
        return v, False
    coords = level_domain(ctx, n, level)[1]
    for col in range(coords.shape[1]):
        p = tuple(int(x) for x in coords[:, col])
        if ctx.degree(p[0]) == level and not any(same_orbit(ctx, p, a) for a in avoid):
            return p, True
    raise MoverError("no pivot point available")


def two_transitive_mover(ctx: FieldCtx, r, s, u, level: int | None = None) -> MoverTrace:
    """Move [r] to [s] fixing [u], for any three distinct orbits of exact size ``level``."""
    level = ctx.m if level is None else level
    r, s, u = (tuple(int(x) for x in p) for p in (r, s, u))
    _check_triple(ctx, r, s, u, level)
    n = len(r)
    trace = MoverTrace(r, s, u, level=level)
    v, fallback = pivot_point(ctx, n, level, (r, s, u))
    trace.cases.append("pivot-fallback" if fallback else "pivot")
    trace.cases.append("r->v")
    F2 = _solve(ctx, n, level, r, v, u, trace.cases)
    trace.cases.append("s->v")
    F1 = _solve(ctx, n, level, s, v, u, trace.cases)
    return _finish(ctx, trace, F1.inverse() * F2)


def two_point_mover(ctx: FieldCtx, a, c, x, y, level: int | None = None) -> TameWord:
    """Word sending [a] to [x] and [c] to [y]; all orbits of exact size ``level``."""
    level = ctx.m if level is None else level
    n = len(a)
    a, c, x, y = (tuple(p) for p in (a, c, x, y))
    if same_orbit(ctx, a, c) or same_orbit(ctx, x, y):
        raise MoverPrecondition("source and target pairs must be distinct orbits")

    def mv(src, dst, fix):
        if same_orbit(ctx, src, dst):
            return _identity(ctx, n)
        return two_transitive_mover(ctx, src, dst, fix, level).word

    if same_orbit(ctx, c, x):
        table = build_orbit_table(ctx, n, level)
        spare = next(tuple(table.rep_coords(level, i)) for i in range(table.r(level))
                     if not any(same_orbit(ctx, table.rep_coords(level, i), p) for p in (a, c, y)))
        w1 = mv(c, spare, a)
        w2 = mv(a, x, spare)
        return mv(spare, y, x) * w2 * w1
    w1 = mv(a, x, c)
    return mv(c, y, x) * w1
