"""Equivariant permutations, the wreath decomposition and group measurements.

The order of the group generated by the canonical tame generators is obtained
from a random Schreier-Sims run that is certified by an abelianization bound:
every equivariant permutation has, per stratum d, a sign (of its action on the
orbits of size d) and a twist sum in Z/d.  These characters are jointly onto
their target A, so any subgroup G satisfies |G| <= |MMA| * |chi(G)| / |A|.
Once the chain reaches this bound the order is exact.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .ffield import FieldCtx, ctx_for, divisors, find_generator, is_prime, prime_power
from .mpoly import MPoly
from .orbits import OrbitTable, build_orbit_table, orbit_action, expected_orbit_count
from .permgroup import Bsgs, Perm, bsgs_build, generic_order_bound
from .polymap import (Elementary, LevelPerm, Scale, Swap, TameWord, induced_perm,
                      level_domain, restriction, frobenius_positions)

POINT_BUDGET = 10_000
EXACT_FALLBACK_DEGREE = 1024


class BudgetExceeded(RuntimeError):
    pass


# -- wreath products --------------------------------------------------------

@dataclass(frozen=True)
class WreathElt:
    """(a_1..a_r; sigma) acting by alpha_i -> phi^{a_i} alpha_{sigma(i)}."""

    d: int
    twist: tuple
    sigma: Perm

    def __mul__(self, other: "WreathElt") -> "WreathElt":
        """self first, then other: (a + b o sigma; sigma rho)."""
        s = self.sigma.images
        tw = tuple((a + other.twist[int(s[i])]) % self.d for i, a in enumerate(self.twist))
        return WreathElt(self.d, tw, self.sigma * other.sigma)

    def __eq__(self, other):
        return (isinstance(other, WreathElt) and self.d == other.d and self.twist == other.twist
                and self.sigma == other.sigma)

    def __hash__(self):
        return hash((self.d, self.twist, self.sigma))

    def twist_sum(self) -> int:
        return sum(self.twist) % self.d

    def key(self) -> tuple:
        return self.twist + tuple(self.sigma.images.tolist())


def wreath_decompose(p: LevelPerm, table: OrbitTable, d: int) -> WreathElt:
    reps = table.strata[d]
    img = p.perm.images[reps].astype(np.int64)
    if np.any(table.size[img] != d):
        raise ValueError(f"stratum {d} is not preserved")
    sigma = Perm(table.local_id[img])
    twist = tuple(int(x) % d for x in table.offset[img])
    return WreathElt(d, twist, sigma)


@lru_cache(maxsize=32)
def _frob_iterates(ctx, n, level):
    f = frobenius_positions(ctx, n, level)
    its = [np.arange(len(f))]
    for _ in range(level):
        its.append(f[its[-1]])
    return its


def wreath_recompose(w: WreathElt, table: OrbitTable) -> dict[int, int]:
    """Position map on the stratum realized by w (for verification)."""
    its = _frob_iterates(table.ctx, table.n, table.level)
    reps = table.strata[w.d]
    out = {}
    for i, r in enumerate(reps):
        j = int(w.sigma.images[i])
        target = reps[j]
        for k in range(w.d):
            out[int(its[k][r])] = int(its[(k + w.twist[i]) % w.d][target])
    return out


# -- orders ------------------------------------------------------------------

def stratum_counts(q: int, m: int, n: int) -> dict[int, int]:
    return {d: expected_orbit_count(q, n, d) for d in divisors(m)}


def mma_order(q: int, m: int, n: int) -> int:
    out = 1
    for d, r in stratum_counts(q, m, n).items():
        out *= d**r * math.factorial(r)
    return out


def stratum_group_order(d: int, r: int) -> int:
    return d**r * math.factorial(r)


def index_bound(m: int) -> int:
    ds = divisors(m)
    return 2 ** len(ds) * math.prod(ds)


# -- characters and the certificate -----------------------------------------

def character(p: LevelPerm, table: OrbitTable) -> tuple:
    """Per stratum: (sign bit if r_d >= 2, twist sum mod d if d >= 2)."""
    out = []
    for d in divisors(table.level):
        r = table.r(d)
        if r >= 2:
            out.append(0 if orbit_action(p, table, d).sign() == 1 else 1)
        if d >= 2:
            out.append(wreath_decompose(p, table, d).twist_sum())
    return tuple(out)


def character_moduli(table: OrbitTable) -> tuple:
    mods = []
    for d in divisors(table.level):
        if table.r(d) >= 2:
            mods.append(2)
        if d >= 2:
            mods.append(d)
    return tuple(mods)


def character_image_size(chars: list[tuple], mods: tuple) -> int:
    zero = tuple(0 for _ in mods)
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for x in frontier:
            for c in chars:
                y = tuple((a + b) % m for a, b, m in zip(x, c, mods))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(seen)


def certified_bound(gens: list[LevelPerm], table: OrbitTable) -> int:
    ctx = table.ctx
    mods = character_moduli(table)
    size_a = math.prod(mods)
    img = character_image_size([character(g, table) for g in gens], mods)
    total = mma_order(ctx.q, table.level, table.n)
    assert total % size_a == 0
    return total // size_a * img


# -- canonical generators ------------------------------------------------------

def canonical_generators(ctx: FieldCtx, n: int, level: int | None = None) -> list[tuple[str, TameWord]]:
    """Elementary c*X^e (other variables, exponents < q^level), swaps, scalings."""
    level = ctx.m if level is None else level
    Q = ctx.q**level
    base = [a for a in range(1, ctx.size) if ctx.degree(a) == 1]
    out = []
    for i in range(n):
        others = [j for j in range(n) if j != i]
        for exps in itertools.product(range(Q), repeat=n - 1):
            e = [0] * n
            for j, k in zip(others, exps):
                e[j] = k
            for c in base:
                f = MPoly.monomial(ctx, n, e, c)
                out.append((f"elem[{i}]{c}*x^{tuple(e)}", TameWord(ctx, n, [Elementary(i, f)])))
    for i in range(1, n):
        out.append((f"swap[{i}]", TameWord(ctx, n, [Swap(i)])))
    for i in range(n):
        for a in base:
            if a != 1:
                out.append((f"scale[{i}]{a}", TameWord(ctx, n, [Scale(i, a, ctx)])))
    return out


def generator_images(ctx: FieldCtx, n: int, level: int | None = None) -> list[LevelPerm]:
    return [induced_perm(w, level) for _, w in canonical_generators(ctx, n, level)]


def check_budget(q: int, m: int, n: int, budget: int = POINT_BUDGET):
    if q ** (m * n) > budget:
        raise BudgetExceeded(f"{q}^{m * n} points exceed the budget of {budget}")


@dataclass
class TameGroup:
    ctx: FieldCtx
    n: int
    table: OrbitTable
    gens: list
    bsgs: Bsgs
    bound: int

    @property
    def order(self) -> int:
        return self.bsgs.order()


def tame_group(q: int, m: int, n: int, *, stratified_base: bool = False, seed: int = 0,
               budget: int = POINT_BUDGET) -> TameGroup:
    check_budget(q, m, n, budget)
    ctx = ctx_for(q, m)
    table = build_orbit_table(ctx, n)
    gens = generator_images(ctx, n)
    bound = certified_bound(gens, table)
    prefix = ()
    if stratified_base:
        prefix = np.concatenate([table.stratum_positions(d) for d in divisors(m)]).tolist()
    B = bsgs_build([g.perm for g in gens], len(table.size), base_prefix=prefix,
                   order_bound=bound, method="random", seed=seed)
    if not B.certified and len(table.size) <= EXACT_FALLBACK_DEGREE:
        # the character bound is not attained, so settle the order exactly
        B = bsgs_build([g.perm for g in gens], len(table.size), base_prefix=prefix,
                       method="deterministic")
    return TameGroup(ctx, n, table, gens, B, bound)


def tame_image_order(q: int, m: int, n: int, **kw) -> tuple[int, Bsgs]:
    G = tame_group(q, m, n, **kw)
    return G.order, G.bsgs


def orbit_action_group(q: int, m: int, n: int, seed: int = 0) -> tuple[Bsgs, OrbitTable]:
    """BSGS of the action of the canonical generators on the orbits of size m."""
    ctx = ctx_for(q, m)
    table = build_orbit_table(ctx, n)
    acts = [orbit_action(g, table) for g in generator_images(ctx, n)]
    N = table.r(m)
    B = bsgs_build(acts, N, order_bound=generic_order_bound(acts, N), seed=seed)
    return B, table


# -- stratified factorization ------------------------------------------------

@dataclass
class StratumFactors:
    d: int
    r: int
    G: int
    Q: int
    N: int
    R: int
    twist_sums_zero: bool | None = None


@dataclass
class Stratification:
    factors: dict
    findings: list = field(default_factory=list)
    certified: bool = True


def _restrict_to(perm_arr: np.ndarray, positions: np.ndarray) -> np.ndarray:
    where = np.full(len(perm_arr), -1, dtype=np.int64)
    where[positions] = np.arange(len(positions))
    out = where[perm_arr[positions].astype(np.int64)]
    if np.any(out < 0):
        raise ValueError("stratum not preserved")
    return out


def stratified_orders(G: TameGroup, twist_cap: int = 400, seed: int = 0) -> Stratification:
    """|Q_d|, |N_d|, |R_d| per stratum from one chain based on the strata in order."""
    table = G.table
    m = table.level
    B = G.bsgs
    prefix_needed = np.concatenate([table.stratum_positions(d) for d in divisors(m)]).tolist()
    if B.base[: len(prefix_needed)] != prefix_needed:
        B = bsgs_build([g.perm for g in G.gens], B.degree, base_prefix=prefix_needed,
                       order_bound=B.order() if B.certified else G.bound, method="random", seed=seed)
    result = Stratification({}, [], B.certified)
    start = 0
    for d in divisors(m):
        pts = table.stratum_positions(d)
        r = table.r(d)
        levels = B.levels[start:start + len(pts)]
        Qd = math.prod(len(lev.orbit) for lev in levels)
        gens_here = [Perm(g) for g, _ in levels[0].gens] if levels else []
        # orbit-label action of the pointwise stabilizer of the lower strata
        label_gens = []
        for g in gens_here:
            lp = LevelPerm(table.ctx, table.n, m, g)
            label_gens.append(orbit_action(lp, table, d))
        if label_gens and r >= 2:
            RB = bsgs_build(label_gens, r, order_bound=generic_order_bound(label_gens, r), seed=seed)
            Rd = RB.order()
            if not RB.certified:
                result.certified = False
        else:
            Rd = 1
        Nd = Qd // Rd
        fac = StratumFactors(d, r, stratum_group_order(d, r), Qd, Nd, Rd)
        if Qd % Rd:
            result.findings.append(f"d={d}: |R_d| does not divide |Q_d|")
        if r >= 2 and Rd * 2 < math.factorial(r):
            result.findings.append(f"d={d}: R_d does not contain Alt({r})")
        if (d**r) % Nd:
            result.findings.append(f"d={d}: |N_d| = {Nd} does not divide {d}^{r}")
        elif d**r // Nd > d:
            result.findings.append(f"d={d}: [(Z/d)^r : N_d] = {d**r // Nd} exceeds {d}")
        if d >= 2 and r <= twist_cap and gens_here:
            ok = _check_kernel_twists(gens_here, table, d, pts, Qd, seed)
            fac.twist_sums_zero = ok
            if ok is False:
                result.findings.append(f"d={d}: an element of N_d has nonzero twist sum")
        result.factors[d] = fac
        start += len(pts)
    total = math.prod(f.Q for f in result.factors.values())
    if total != B.order():
        result.findings.append(f"product of stratum factors {total} differs from |G| = {B.order()}")
    return result


def _check_kernel_twists(gens: list[Perm], table: OrbitTable, d: int, pts: np.ndarray,
                         Qd: int, seed: int) -> bool | None:
    """Combined action on (labels of X_d) + (points of X_d); the label stabilizer is N_d."""
    r = table.r(d)
    deg = r + len(pts)
    combined = []
    for g in gens:
        lp = LevelPerm(table.ctx, table.n, table.level, g)
        lab = orbit_action(lp, table, d).images.astype(np.int64)
        pnt = _restrict_to(g.images, pts) + r
        combined.append(Perm(np.concatenate([lab, pnt])))
    C = bsgs_build(combined, deg, base_prefix=list(range(r)), order_bound=Qd, method="random", seed=seed)
    if not C.certified:
        return None
    kernel_gens = [g for g, _ in C.levels[r].gens] if len(C.levels) > r else []
    pos_of = np.full(len(table.size), -1, dtype=np.int64)
    pos_of[pts] = np.arange(len(pts))
    reps = table.strata[d]
    for g in kernel_gens:
        img_local = g[pos_of[reps] + r].astype(np.int64) - r
        img = pts[img_local]
        if np.any(table.local_id[img] != np.arange(r)):
            return False
        if int(table.offset[img].sum()) % d:
            return False
    return True


# -- parity predictions ------------------------------------------------------

@dataclass(frozen=True)
class ParityPrediction:
    parity: str
    case: str
    outside_proof_cases: bool = False
    stated_parity: str | None = None  # what the general statement asserts, when it differs in origin


def scale_parity_by_counting(q: int, m: int, n: int) -> str:
    """Sign of X_0 -> a X_0 (a of order q-1) on the orbits of size m, m prime.

    Burnside over <F>: F^j fixes [r] iff a^j r_0 = phi^e(r_0) with the other
    coordinates fixed by phi^e.  For e = 0 this forces r_0 = 0; for e != 0
    the other coordinates lie in F_q and r_0^{q^e - 1} = a^j, which has q - 1
    solutions exactly when (q - 1) | j m.
    """
    top = q ** (m * n) - q**n
    rest = q ** (m * (n - 1)) - q ** (n - 1)
    fixed_total = top // m
    for j in range(1, q - 1):
        pts = rest
        if (j * m) % (q - 1) == 0:
            pts += (m - 1) * (q - 1) * q ** (n - 1)
        fixed_total += pts // m
    cycles = fixed_total // (q - 1)
    return "odd" if (top // m - cycles) % 2 else "even"


def predicted_parity(kind: str, q: int, m: int, n: int) -> ParityPrediction:
    if not is_prime(m):
        raise ValueError(f"parity formulas are proved only for prime m (got m={m})")
    if n < 3:
        raise ValueError("parity formulas assume n >= 3")
    pl = prime_power(q)
    if pl is None:
        raise ValueError(f"{q} is not a prime power")
    p, _ = pl
    odd_case = "odd" if (m == 2 and q % 8 in (3, 7)) else "even"
    if kind == "shear":
        return ParityPrediction("even", "shear: generator of order p", stated_parity="even")
    if kind == "swap":
        return ParityPrediction(odd_case, "swap: fixed-orbit count", stated_parity=odd_case)
    if kind == "scale":
        if p == 2:
            return ParityPrediction("even", "scale: q even, sign of F^(q-1)", stated_parity=odd_case)
        if ((q - 1) // 2) % 2 == 1:
            return ParityPrediction(odd_case, "scale: (q-1)/2 odd, reduce to -X", stated_parity=odd_case)
        return ParityPrediction(scale_parity_by_counting(q, m, n), "scale: (q-1)/2 even, Burnside count",
                                True, stated_parity=odd_case)
    raise ValueError(f"unknown generator kind {kind!r}")


def parity_generator(kind: str, ctx: FieldCtx, n: int) -> TameWord:
    """The swap X_0 <-> X_1, scaling of X_0 by a generator of F_q^*, or a shear."""
    if kind == "swap":
        return TameWord(ctx, n, [Swap(1)])
    if kind == "scale":
        a = find_generator(ctx, 1)
        return TameWord(ctx, n, [Scale(0, a, ctx)])
    if kind == "shear":
        return TameWord(ctx, n, [Elementary(0, MPoly.var(ctx, n, 1))])
    raise ValueError(kind)


def shear_family(ctx: FieldCtx, n: int) -> list[TameWord]:
    """A few shears X_0 += f(X_1..) used to test the parity claim beyond one instance."""
    X = [MPoly.var(ctx, n, i) for i in range(n)]
    polys = [X[1], X[1] * X[2] * X[2], MPoly.const(ctx, n, 1)]
    return [TameWord(ctx, n, [Elementary(0, f)]) for f in polys]


def direct_parity(w: TameWord, table: OrbitTable) -> str:
    s = orbit_action(induced_perm(w), table).sign()
    return "even" if s == 1 else "odd"


# -- index report --------------------------------------------------------------

@dataclass
class IndexReport:
    q: int
    m: int
    n: int
    mma_order: int
    tame_image_order: int
    factors: dict
    index: int
    bound: int
    certified: bool
    findings: list
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "q": self.q, "m": self.m, "n": self.n,
            "mma_order": str(self.mma_order),
            "tame_image_order": str(self.tame_image_order),
            "index": self.index, "bound": self.bound, "certified": self.certified,
            "factors": {str(d): {"r_d": f.r, "G_d": str(f.G), "Q_d": str(f.Q), "N_d": str(f.N),
                                 "R_d": str(f.R), "twist_sums_zero": f.twist_sums_zero}
                        for d, f in self.factors.items()},
            "findings": self.findings,
            "notes": self.notes,
        }


def index_report(q: int, m: int, n: int, seed: int = 0, budget: int = POINT_BUDGET) -> IndexReport:
    G = tame_group(q, m, n, stratified_base=True, seed=seed, budget=budget)
    strat = stratified_orders(G, seed=seed)
    total = mma_order(q, m, n)
    order = G.order
    findings = list(strat.findings)
    if total % order:
        findings.append("tame image order does not divide |MMA|")
    index = total // order
    bound = index_bound(m)
    if index > bound:
        findings.append(f"index {index} exceeds the bound {bound}")
    if m == 2 and q % 8 in (3, 7) and index > 2:
        findings.append(f"index {index} exceeds the sharper bound 2")
    notes = []
    if n < 3:
        # the bounds and the stratum structure are only claimed for n >= 3
        notes, findings = findings, [f for f in findings if "divide" in f]
    return IndexReport(q, m, n, total, order, strat.factors, index, bound,
                       G.bsgs.certified and strat.certified, findings, notes)


# -- profinite compatibility -----------------------------------------------------

@dataclass
class ProfiniteReport:
    levels: list
    compatible: bool
    failures: list


def profinite_check(word: TameWord, levels) -> ProfiniteReport:
    """Induce the word at every level and check all restriction squares."""
    levels = sorted(set(levels))
    ctx = word.ctx
    for d in levels:
        if ctx.m % d:
            raise ValueError(f"level {d} does not divide the ambient degree {ctx.m}")
    perms = {d: induced_perm(word, d) for d in levels}
    failures = []
    for e in levels:
        for d in levels:
            if d < e and e % d == 0:
                if restriction(perms[e], d) != perms[d]:
                    failures.append((e, d))
    return ProfiniteReport(levels, not failures, failures)


def stabilization_index(words: list[TameWord], level: int | None = None) -> int | None:
    """Smallest k (1-based) from which all words induce the same permutation."""
    if not words:
        return None
    perms = [induced_perm(w, level) for w in words]
    k = len(perms)
    while k > 1 and perms[k - 2] == perms[-1]:
        k -= 1
    return k


# -- brute-force oracles ---------------------------------------------------------

def brute_force_mma_count(ctx: FieldCtx, n: int = 1) -> int:
    """Count equivariant bijections among all self-maps of F_{q^m}^n (tiny cases)."""
    idx, coords = level_domain(ctx, n)
    N = len(idx)
    if N**N > 10**7:
        raise BudgetExceeded("too many self-maps")
    f = frobenius_positions(ctx, n)
    count = 0
    for images in itertools.product(range(N), repeat=N):
        if len(set(images)) != N:
            continue
        img = np.asarray(images)
        if np.array_equal(img[f], f[img]):
            count += 1
    return count


def brute_force_stratum_group(table: OrbitTable, d: int) -> list[np.ndarray]:
    """All equivariant bijections of X_d, as position maps on the stratum (tiny cases).

    Each representative may go to any point of X_d; the rest of its orbit
    follows by equivariance.  Choices that are not bijective are discarded.
    """
    pts = table.stratum_positions(d)
    reps = table.strata[d]
    r = len(reps)
    its = _frob_iterates(table.ctx, table.n, table.level)
    where = np.full(len(table.size), -1, dtype=np.int64)
    where[pts] = np.arange(len(pts))
    choices = np.array(list(itertools.product(range(len(pts)), repeat=r)), dtype=np.int64)
    labels = table.local_id[pts[choices]]
    ok = np.ones(len(choices), dtype=bool)
    srt = np.sort(labels, axis=1)
    ok &= np.all(srt == np.arange(r), axis=1)
    out = []
    for ch in choices[ok]:
        img = np.empty(len(pts), dtype=np.int64)
        for i, rp in enumerate(reps):
            target = pts[ch[i]]
            for k in range(d):
                img[where[its[k][rp]]] = where[its[k][target]]
        out.append(img)
    return out
