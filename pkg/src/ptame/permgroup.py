"""Permutations and a Schreier-Sims kernel.

Composition convention: ``p * q`` applies ``p`` first, then ``q``, so
``(p * q)[x] == q[p[x]]``.

Two construction strategies share one data structure:

* deterministic Schreier-Sims (Schreier generators sifted level by level),
  used for small degrees and when no order certificate is available;
* random Schreier-Sims driven by product replacement, which stops as soon as
  the order lower bound meets a supplied certified upper bound.  Without a
  certificate it stops after a streak of trivial sifts and marks the result
  as not certified.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DETERMINISTIC_DEGREE = 48


def _dtype(n: int):
    return np.int16 if n < 2**15 else np.int32


class Perm:
    __slots__ = ("images",)

    def __init__(self, images):
        arr = np.asarray(images)
        self.images = arr.astype(_dtype(len(arr)), copy=False)

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls(np.arange(n))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Perm":
        img = np.arange(n)
        for c in cycles:
            for a, b in zip(c, list(c[1:]) + [c[0]]):
                img[a] = b
        return cls(img)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return int(self.images[x])

    def __mul__(self, other: "Perm") -> "Perm":
        return Perm(other.images[self.images])

    def inverse(self) -> "Perm":
        inv = np.empty_like(self.images)
        inv[self.images] = np.arange(len(self.images), dtype=self.images.dtype)
        return Perm(inv)

    def __pow__(self, k: int) -> "Perm":
        if k < 0:
            return self.inverse() ** (-k)
        result = Perm.identity(self.degree)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        return isinstance(other, Perm) and np.array_equal(self.images, other.images)

    def __hash__(self):
        return hash(self.images.tobytes())

    def __repr__(self):
        cyc = [c for c in self.cycles() if len(c) > 1]
        return f"Perm({self.degree}: {cyc})"

    def is_identity(self) -> bool:
        return bool(np.all(self.images == np.arange(self.degree)))

    def support(self) -> np.ndarray:
        return np.nonzero(self.images != np.arange(self.degree))[0]

    def cycles(self) -> list[list[int]]:
        seen = np.zeros(self.degree, dtype=bool)
        img = self.images.tolist()
        out = []
        for s in range(self.degree):
            if seen[s]:
                continue
            c = [s]
            seen[s] = True
            x = img[s]
            while x != s:
                c.append(x)
                seen[x] = True
                x = img[x]
            out.append(c)
        return out

    def cycle_type(self) -> dict[int, int]:
        ct: dict[int, int] = {}
        for c in self.cycles():
            ct[len(c)] = ct.get(len(c), 0) + 1
        return dict(sorted(ct.items(), reverse=True))

    def num_cycles(self) -> int:
        img = self.images.tolist()
        seen = bytearray(len(img))
        count = 0
        for s in range(len(img)):
            if seen[s]:
                continue
            count += 1
            x = s
            while not seen[x]:
                seen[x] = 1
                x = img[x]
        return count

    def sign(self) -> int:
        return -1 if (self.degree - self.num_cycles()) % 2 else 1

    def order(self) -> int:
        o = 1
        for c in self.cycles():
            o = o * len(c) // math.gcd(o, len(c))
        return o


def sign(p: Perm) -> int:
    return p.sign()


# ---------------------------------------------------------------------------

@dataclass
class _Level:
    base_point: int
    gens: list  # (images, inverse images)
    pos: np.ndarray  # point -> row in reps, or -1
    orbit: list
    reps: list  # inverse coset representatives: reps[pos[x]][x] == base_point


def _identity_row(n):
    return np.arange(n, dtype=_dtype(n))


class Bsgs:
    """Base and strong generating set with explicit transversals."""

    def __init__(self, degree: int, base_prefix: Sequence[int] = ()):
        self.degree = degree
        self.levels: list[_Level] = []
        self.certified = True
        self.method = "deterministic"
        for b in base_prefix:
            self._push_level(int(b))

    # -- structure helpers
    def _push_level(self, b: int) -> _Level:
        n = self.degree
        pos = np.full(n, -1, dtype=np.int64)
        pos[b] = 0
        lev = _Level(b, [], pos, [b], [_identity_row(n)])
        self.levels.append(lev)
        return lev

    @property
    def base(self) -> list[int]:
        return [lev.base_point for lev in self.levels]

    @property
    def strong_generators(self) -> list[Perm]:
        if not self.levels:
            return []
        return [Perm(g) for g, _ in self.levels[0].gens]

    def orbit_lengths(self) -> list[int]:
        return [len(lev.orbit) for lev in self.levels]

    def order(self) -> int:
        o = 1
        for lev in self.levels:
            o *= len(lev.orbit)
        return o

    def _extend_orbit(self, lev: _Level, new_gens: list):
        """Close the orbit of ``lev`` under all of its generators.

        Only the new generators need to be applied to old orbit points.
        """
        frontier_old = np.asarray(lev.orbit)
        pending = []
        for g, ginv in new_gens:
            img = g[frontier_old]
            mask = lev.pos[img] < 0
            if mask.any():
                for src, dst in zip(frontier_old[mask].tolist(), img[mask].tolist()):
                    if lev.pos[dst] < 0:
                        lev.pos[dst] = len(lev.reps)
                        lev.reps.append(lev.reps[lev.pos[src]][ginv])
                        lev.orbit.append(dst)
                        pending.append(dst)
        while pending:
            frontier = np.asarray(pending)
            pending = []
            for g, ginv in lev.gens:
                img = g[frontier]
                mask = lev.pos[img] < 0
                if mask.any():
                    for src, dst in zip(frontier[mask].tolist(), img[mask].tolist()):
                        if lev.pos[dst] < 0:
                            lev.pos[dst] = len(lev.reps)
                            lev.reps.append(lev.reps[lev.pos[src]][ginv])
                            lev.orbit.append(dst)
                            pending.append(dst)

    def _add_strong(self, g: np.ndarray, upto: int):
        """Add ``g`` (fixing base points before ``upto``) to levels 0..upto."""
        ginv = np.empty_like(g)
        ginv[g] = np.arange(len(g), dtype=g.dtype)
        pair = (g, ginv)
        if upto == len(self.levels):
            moved = np.nonzero(g != np.arange(len(g)))[0]
            self._push_level(int(moved[0]))
        for lev in self.levels[: upto + 1]:
            lev.gens.append(pair)
            self._extend_orbit(lev, [pair])

    def sift(self, g: np.ndarray, start: int = 0) -> tuple[np.ndarray, int]:
        """Strip ``g`` through the chain; return (residue, level reached)."""
        for i in range(start, len(self.levels)):
            lev = self.levels[i]
            beta = g[lev.base_point]
            row = lev.pos[beta]
            if row < 0:
                return g, i
            if row:
                g = lev.reps[row][g]
        return g, len(self.levels)

    def contains(self, p: Perm) -> bool:
        if p.degree != self.degree:
            raise ValueError("degree mismatch")
        res, _ = self.sift(p.images)
        return bool(np.all(res == np.arange(self.degree)))

    def coset_rep(self, i: int, point: int) -> Perm:
        """u with u[base_point_i] == point, or raise if point is not in the orbit."""
        lev = self.levels[i]
        row = lev.pos[point]
        if row < 0:
            raise KeyError(point)
        return Perm(lev.reps[row]).inverse()

    def verify_orbit_stabilizer(self) -> bool:
        """Every strong generator at level i fixes base points before i, and reps map correctly."""
        for i, lev in enumerate(self.levels):
            for g, _ in lev.gens:
                for b in self.base[:i]:
                    if g[b] != b:
                        return False
            for x in lev.orbit:
                if lev.reps[lev.pos[x]][x] != lev.base_point:
                    return False
        return True

    def stabilizer_chain_part(self, start: int) -> "Bsgs":
        """The subgroup fixing base points before ``start`` (shares arrays)."""
        sub = Bsgs(self.degree)
        sub.levels = self.levels[start:]
        sub.certified = self.certified
        sub.method = self.method
        return sub


def _gen_arrays(gens: Iterable[Perm], degree: int) -> list[np.ndarray]:
    ident = np.arange(degree)
    out = []
    for g in gens:
        if g.degree != degree:
            raise ValueError("generators of different degrees")
        if not np.array_equal(g.images, ident):
            out.append(g.images.astype(_dtype(degree)))
    return out


def _build_deterministic(B: Bsgs, gens: list[np.ndarray]):
    ident = np.arange(B.degree)
    for g in gens:
        res, lvl = B.sift(g)
        if not np.array_equal(res, ident):
            B._add_strong(res, lvl)
    i = len(B.levels) - 1
    done: set = set()
    while i >= 0:
        lev = B.levels[i]
        restart = False
        for beta in list(lev.orbit):
            u_inv = lev.reps[lev.pos[beta]]
            u = np.empty_like(u_inv)
            u[u_inv] = np.arange(len(u_inv), dtype=u_inv.dtype)
            for gi, (g, _) in enumerate(lev.gens):
                key = (i, beta, id(g))
                if key in done:
                    continue
                gamma = g[beta]
                h = lev.reps[lev.pos[gamma]][g[u]]
                res, lvl = B.sift(h, i + 1)
                if np.array_equal(res, ident):
                    done.add(key)
                    continue
                # reps never change and the chain below only grows, so earlier
                # verdicts in ``done`` stay valid
                B._add_strong(res, lvl)
                i = min(lvl, len(B.levels) - 1)
                restart = True
                break
            if restart:
                break
        if not restart:
            i -= 1


class _ProductReplacement:
    def __init__(self, gens: list[np.ndarray], rng: random.Random, slots: int = 10, warmup: int = 50):
        self.rng = rng
        self.state = [gens[i % len(gens)].copy() for i in range(max(slots, len(gens)))]
        self.acc = np.arange(len(gens[0]), dtype=gens[0].dtype)
        for _ in range(warmup):
            self.next()

    def next(self) -> np.ndarray:
        s = self.state
        i, j = self.rng.sample(range(len(s)), 2)
        if self.rng.random() < 0.5:
            s[i] = s[j][s[i]]
        else:
            s[i] = s[i][s[j]]
        self.acc = s[i][self.acc]
        return self.acc


def bsgs_build(gens: Sequence[Perm], degree: int | None = None, *, base_prefix: Sequence[int] = (),
               order_bound: int | None = None, method: str = "auto", seed: int = 0,
               streak: int = 50) -> Bsgs:
    """Build a BSGS for <gens>.

    ``order_bound`` is a certified upper bound on the group order (a multiple
    of it is fine as long as it is also a bound).  The random method stops
    when the computed order reaches it and marks the result certified.
    """
    if degree is None:
        if not gens:
            raise ValueError("degree needed for an empty generator list")
        degree = gens[0].degree
    B = Bsgs(degree, base_prefix)
    arrs = _gen_arrays(gens, degree)
    if not arrs:
        return B
    if method == "auto":
        method = "deterministic" if degree <= DETERMINISTIC_DEGREE else "random"
    if method == "deterministic":
        _build_deterministic(B, arrs)
        B.method = "deterministic"
        B.certified = True
        return B
    B.method = "random"
    ident = np.arange(degree)
    for g in arrs:
        res, lvl = B.sift(g)
        if not np.array_equal(res, ident):
            B._add_strong(res, lvl)
    rng = random.Random(seed)
    pr = _ProductReplacement(arrs, rng)
    fails = 0
    while True:
        if order_bound is not None:
            o = B.order()
            if o == order_bound:
                B.certified = True
                return B
            if o > order_bound:
                raise ValueError("group order exceeds the supplied certified bound")
        if fails >= streak:
            B.certified = False
            return B
        res, lvl = B.sift(pr.next())
        if np.array_equal(res, ident):
            fails += 1
        else:
            fails = 0
            B._add_strong(res.copy(), lvl)


def generic_order_bound(gens: Sequence[Perm], degree: int) -> int:
    """N!/2 when every generator is even, N! otherwise."""
    f = math.factorial(degree)
    if all(g.sign() == 1 for g in gens):
        return f // 2 if degree >= 2 else f
    return f


def contains(B: Bsgs, p: Perm) -> bool:
    return B.contains(p)


def alt_sym_verdict(B: Bsgs) -> str:
    n = B.degree
    o = B.order()
    f = math.factorial(n)
    if o == f:
        return "Sym"
    if n >= 2 and o * 2 == f:
        return "Alt"
    return "Other"


def pointwise_stabilizer(B: Bsgs, gens: Sequence[Perm], S: Sequence[int], seed: int = 0) -> Bsgs:
    """Pointwise stabilizer of S, read off a chain whose base starts with S.

    The group order is already known from ``B``, so the rebuild is certified
    whenever ``B`` was.
    """
    S = [int(s) for s in S]
    C = bsgs_build(gens, B.degree, base_prefix=S, order_bound=B.order() if B.certified else None,
                   method="random" if B.degree > DETERMINISTIC_DEGREE else "deterministic", seed=seed)
    if C.order() != B.order():
        raise RuntimeError("rebuilt chain disagrees with the original order")
    sub = C.stabilizer_chain_part(len(S))
    sub.certified = C.certified
    return sub


def closure(gens: Sequence[Perm], degree: int, limit: int = 10**5) -> set[bytes]:
    """Brute-force group closure (test oracle)."""
    ident = np.arange(degree, dtype=_dtype(degree))
    seen = {ident.tobytes()}
    frontier = [ident]
    arrs = [g.images for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for g in arrs:
                y = g[x]
                key = y.tobytes()
                if key not in seen:
                    seen.add(key)
                    nxt.append(y)
                    if len(seen) > limit:
                        raise OverflowError("closure exceeds limit")
        frontier = nxt
    return seen
