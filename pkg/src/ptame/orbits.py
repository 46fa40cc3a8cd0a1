"""Galois orbits on F_{q^m}^n: strata, representatives and induced actions."""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .ffield import FieldCtx, divisors, mobius
from .permgroup import Perm
from .polymap import LevelPerm, frobenius_positions, level_domain


def expected_orbit_count(q: int, n: int, d: int) -> int:
    return sum(mobius(d // e) * q ** (e * n) for e in divisors(d)) // d


class StratumError(AssertionError):
    pass


@dataclass
class OrbitTable:
    ctx: FieldCtx
    n: int
    level: int
    rep_pos: np.ndarray  # position of the orbit representative of each point
    offset: np.ndarray  # point = phi^offset(rep)
    size: np.ndarray  # exact orbit size of each point
    local_id: np.ndarray  # index of the orbit inside its stratum
    strata: dict = field(default_factory=dict)  # d -> array of representative positions

    @property
    def indices(self) -> np.ndarray:
        return level_domain(self.ctx, self.n, self.level)[0]

    @property
    def coords(self) -> np.ndarray:
        return level_domain(self.ctx, self.n, self.level)[1]

    def r(self, d: int) -> int:
        return len(self.strata.get(d, ()))

    def counts(self) -> dict[int, int]:
        return {d: len(v) for d, v in self.strata.items()}

    def stratum_positions(self, d: int) -> np.ndarray:
        return np.nonzero(self.size == d)[0]

    def orbit_of(self, pos: int) -> np.ndarray:
        return np.nonzero(self.rep_pos == self.rep_pos[pos])[0]

    def position(self, coords: Sequence[int]) -> int:
        from .polymap import point_index
        idx = point_index(self.ctx, np.asarray(coords, dtype=np.int64)[:, None])[0]
        i = int(np.searchsorted(self.indices, idx))
        if i >= len(self.indices) or self.indices[i] != idx:
            raise KeyError(f"{list(coords)} is not a point of level {self.level}")
        return i

    def label(self, coords: Sequence[int]) -> tuple[int, int]:
        """(stratum d, orbit id inside the stratum)."""
        p = self.position(coords)
        return int(self.size[p]), int(self.local_id[p])

    def rep_coords(self, d: int, i: int) -> list[int]:
        return [int(x) for x in self.coords[:, self.strata[d][i]]]

    def checksum(self) -> str:
        h = hashlib.sha256()
        for d in sorted(self.strata):
            h.update(f"{d}:".encode())
            h.update(np.asarray(self.indices[self.strata[d]], dtype=np.int64).tobytes())
        return h.hexdigest()[:16]

    def check(self) -> list[str]:
        problems = []
        q, n = self.ctx.q, self.n
        total = sum(d * len(v) for d, v in self.strata.items())
        if total != q ** (self.level * n):
            problems.append(f"strata cover {total} points, expected {q ** (self.level * n)}")
        for d in divisors(self.level):
            if self.r(d) != expected_orbit_count(q, n, d):
                problems.append(f"r_{d} = {self.r(d)} disagrees with the Moebius count")
        if np.any(self.offset[self.rep_pos] != 0):
            problems.append("a representative has nonzero offset")
        return problems


def build_orbit_table(ctx: FieldCtx, n: int, level: int | None = None) -> OrbitTable:
    level = ctx.m if level is None else level
    idx, coords = level_domain(ctx, n, level)
    f = frobenius_positions(ctx, n, level)
    N = len(idx)
    cur = np.arange(N)
    best = cur.copy()
    best_k = np.zeros(N, dtype=np.int64)
    size = np.zeros(N, dtype=np.int64)
    for k in range(1, level + 1):
        cur = f[cur]
        back = (cur == np.arange(N)) & (size == 0)
        size[back] = k
        better = (cur < best) & (size == 0)
        best[better] = cur[better]
        best_k[better] = k
    # point = phi^{-k}(rep) = phi^{size-k}(rep)
    offset = (-best_k) % size
    strata = {}
    local = np.full(N, -1, dtype=np.int64)
    for d in divisors(level):
        reps = np.nonzero((size == d) & (best == np.arange(N)))[0]
        strata[d] = reps
        local_rep = np.full(N, -1, dtype=np.int64)
        local_rep[reps] = np.arange(len(reps))
        mask = size == d
        local[mask] = local_rep[best[mask]]
    t = OrbitTable(ctx, n, level, best, offset, size, local, strata)
    problems = t.check()
    if problems:
        raise AssertionError("; ".join(problems))
    return t


def orbit_action(p: LevelPerm, table: OrbitTable, d: int | None = None) -> Perm:
    """Permutation of the stratum-d orbit ids induced by an equivariant p."""
    d = table.level if d is None else d
    reps = table.strata[d]
    img = p.perm.images[reps].astype(np.int64)
    if np.any(table.size[img] != d):
        raise StratumError(f"an orbit of size {d} is mapped to an orbit of another size")
    labels = table.local_id[img]
    if len(np.unique(labels)) != len(labels):
        raise StratumError("orbit action is not injective")
    return Perm(labels)


def weakly_conjugate(ctx: FieldCtx, u: Sequence[int], v: Sequence[int]) -> bool:
    if len(u) != len(v):
        raise ValueError("points of different dimension")
    for a, b in zip(u, v):
        x = a
        for _ in range(ctx.m):
            if x == b:
                break
            x = ctx.frobenius(x)
        else:
            return False
    return True


def point_degree(ctx: FieldCtx, point: Sequence[int]) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), (ctx.degree(x) for x in point), 1)


def ordered_type(ctx: FieldCtx, point: Sequence[int], level: int | None = None) -> tuple[tuple, list[int]]:
    """(decreasing degree vector, slots in the order used to sort).

    ``type[i] == degree(point[perm[i]])``; ties keep their original order.
    """
    level = ctx.m if level is None else level
    degs = [ctx.degree(x) for x in point]
    if point_degree(ctx, point) != level:
        raise StratumError(f"point {list(point)} does not lie in the top stratum")
    perm = sorted(range(len(degs)), key=lambda i: -degs[i])
    return tuple(degs[i] for i in perm), perm


def lex_greater(u: Sequence[int], v: Sequence[int]) -> bool:
    """Head-weighted comparison: the first differing entry decides."""
    for a, b in zip(u, v):
        if a != b:
            return a > b
    return False


def lex_greater_tail_rule(u: Sequence[int], v: Sequence[int]) -> bool:
    """Strict version of: some u_k > v_k with all later entries equal."""
    for a, b in zip(reversed(u), reversed(v)):
        if a != b:
            return a > b
    return False
