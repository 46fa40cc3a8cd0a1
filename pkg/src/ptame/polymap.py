"""Polynomial maps, tame generators and words, and the induced level permutations."""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .ffield import FieldCtx, divisors
from .mpoly import LocalizedPoly, MPoly
from .permgroup import Perm


class NotBijectiveAtLevel(ValueError):
    def __init__(self, level: int, msg: str = ""):
        super().__init__(f"map is not bijective at level {level}" + (f": {msg}" if msg else ""))
        self.level = level


class EquivarianceError(AssertionError):
    pass


# -- point indexing -----------------------------------------------------------

def point_index(ctx: FieldCtx, coords) -> np.ndarray:
    """sum_j code_j * S^j with S the ambient field size; works on (n, N) arrays."""
    coords = np.asarray(coords, dtype=np.int64)
    S = ctx.size
    idx = np.zeros(coords.shape[1:], dtype=np.int64)
    for j in reversed(range(coords.shape[0])):
        idx = idx * S + coords[j]
    return idx


def index_to_coords(ctx: FieldCtx, n: int, idx) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.int64)
    out = np.empty((n,) + idx.shape, dtype=np.int64)
    S = ctx.size
    for j in range(n):
        out[j] = idx % S
        idx = idx // S
    return out


@functools.lru_cache(maxsize=64)
def _level_domain_cached(ctx: FieldCtx, n: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    if ctx.m % d:
        raise ValueError(f"level {d} does not divide m={ctx.m}")
    elems = np.array(ctx.elements(d), dtype=np.int64)
    grids = np.meshgrid(*([elems] * n), indexing="ij") if n else []
    coords = np.stack([g.ravel() for g in grids]) if n else np.zeros((0, 1), dtype=np.int64)
    idx = point_index(ctx, coords)
    order = np.argsort(idx)
    idx = idx[order]
    coords = coords[:, order]
    idx.setflags(write=False)
    coords.setflags(write=False)
    return idx, coords


def level_domain(ctx: FieldCtx, n: int, d: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(sorted point indices, coordinate array (n, N)) of F_{q^d}^n."""
    return _level_domain_cached(ctx, n, ctx.m if d is None else d)


def frobenius_positions(ctx: FieldCtx, n: int, d: int | None = None) -> np.ndarray:
    """Position permutation of the coordinatewise Frobenius on the level-d domain."""
    idx, coords = level_domain(ctx, n, d)
    img = point_index(ctx, ctx.vfrob(coords))
    return np.searchsorted(idx, img)


# -- tame generators ---------------------------------------------------------

Coeff = Union[MPoly, LocalizedPoly]


def _eval_coeff(f: Coeff, pts: np.ndarray) -> np.ndarray:
    return f.veval(pts)


def _eval_coeff_point(f: Coeff, pt: Sequence[int]) -> int:
    return f.eval(list(pt))


@dataclass(frozen=True)
class Elementary:
    """X_target <- X_target + f, where f does not involve X_target."""

    target: int
    f: Coeff

    def __post_init__(self):
        num = self.f.numerator if isinstance(self.f, LocalizedPoly) else self.f
        if num.involves(self.target):
            raise ValueError("elementary polynomial involves its own target variable")

    kind = "elementary"

    def apply(self, pts: np.ndarray) -> np.ndarray:
        ctx = self.f.ctx
        out = pts.copy()
        out[self.target] = ctx.vadd(pts[self.target], _eval_coeff(self.f, pts))
        return out

    def apply_point(self, pt: list) -> list:
        ctx = self.f.ctx
        out = list(pt)
        out[self.target] = ctx.add(pt[self.target], _eval_coeff_point(self.f, pt))
        return out

    def inverse(self) -> "Elementary":
        f = self.f
        if isinstance(f, LocalizedPoly):
            return Elementary(self.target, LocalizedPoly(-f.numerator, f.denom_power, f.g))
        return Elementary(self.target, -f)


@dataclass(frozen=True)
class VarPerm:
    """Output coordinate i is input coordinate sigma[i]: (X_{sigma(0)}, ..., X_{sigma(n-1)})."""

    sigma: tuple

    kind = "varperm"

    def apply(self, pts):
        out = pts.copy()
        k = len(self.sigma)
        out[:k] = pts[list(self.sigma)]
        return out

    def apply_point(self, pt):
        out = list(pt)
        for i, s in enumerate(self.sigma):
            out[i] = pt[s]
        return out

    def inverse(self) -> "VarPerm":
        inv = [0] * len(self.sigma)
        for i, s in enumerate(self.sigma):
            inv[s] = i
        return VarPerm(tuple(inv))


@dataclass(frozen=True)
class Swap:
    """Interchange X_0 and X_i."""

    i: int

    kind = "swap"

    def apply(self, pts):
        out = pts.copy()
        out[[0, self.i]] = pts[[self.i, 0]]
        return out

    def apply_point(self, pt):
        out = list(pt)
        out[0], out[self.i] = pt[self.i], pt[0]
        return out

    def inverse(self) -> "Swap":
        return self


@dataclass(frozen=True)
class Scale:
    """X_i <- a X_i with a in F_q^*."""

    i: int
    a: int
    ctx: FieldCtx

    kind = "scale"

    def __post_init__(self):
        if self.a == 0:
            raise ValueError("scale factor must be nonzero")

    def apply(self, pts):
        out = pts.copy()
        out[self.i] = self.ctx.vscale(self.a, pts[self.i])
        return out

    def apply_point(self, pt):
        out = list(pt)
        out[self.i] = self.ctx.mul(self.a, pt[self.i])
        return out

    def inverse(self) -> "Scale":
        return Scale(self.i, self.ctx.inv(self.a), self.ctx)


def _mat_inverse(ctx: FieldCtx, M: list[list[int]]) -> list[list[int]]:
    n = len(M)
    A = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col]), None)
        if piv is None:
            raise ValueError("matrix is singular")
        A[col], A[piv] = A[piv], A[col]
        inv = ctx.inv(A[col][col])
        A[col] = [ctx.mul(inv, x) for x in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                c = A[r][col]
                A[r] = [ctx.sub(x, ctx.mul(c, y)) for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


@dataclass(frozen=True)
class Affine:
    """x -> M x + b."""

    matrix: tuple
    shift: tuple
    ctx: FieldCtx

    kind = "affine"

    def __post_init__(self):
        _mat_inverse(self.ctx, [list(r) for r in self.matrix])
        for row in self.matrix:
            for c in row:
                if self.ctx.degree(c) != 1:
                    raise ValueError("affine coefficients must lie in F_q")

    def apply(self, pts):
        ctx = self.ctx
        n = len(self.matrix)
        out = pts.copy()
        for i in range(n):
            acc = np.full(pts.shape[1], self.shift[i], dtype=np.int64)
            for j in range(n):
                c = self.matrix[i][j]
                if c:
                    acc = ctx.vadd(acc, ctx.vscale(c, pts[j]))
            out[i] = acc
        return out

    def apply_point(self, pt):
        ctx = self.ctx
        n = len(self.matrix)
        out = list(pt)
        for i in range(n):
            acc = self.shift[i]
            for j in range(n):
                acc = ctx.add(acc, ctx.mul(self.matrix[i][j], pt[j]))
            out[i] = acc
        return out

    def inverse(self) -> "Affine":
        ctx = self.ctx
        inv = _mat_inverse(ctx, [list(r) for r in self.matrix])
        n = len(inv)
        shift = []
        for i in range(n):
            acc = 0
            for j in range(n):
                acc = ctx.add(acc, ctx.mul(inv[i][j], self.shift[j]))
            shift.append(ctx.neg(acc))
        return Affine(tuple(tuple(r) for r in inv), tuple(shift), ctx)


TameGen = Union[Elementary, VarPerm, Swap, Scale, Affine]


class TameWord:
    """A product f_1 f_2 ... f_k of tame generators, realizing f_1 o ... o f_k.

    f_k acts first.  With ``param=True`` points carry an extra last coordinate
    Z that no generator modifies; elementary polynomials may then involve Z
    and have g(Z)-power denominators.
    """

    def __init__(self, ctx: FieldCtx, n: int, gens: Sequence[TameGen] = (), param: bool = False):
        self.ctx = ctx
        self.n = n
        self.gens = list(gens)
        self.param = param
        for g in self.gens:
            if isinstance(g, Elementary) and g.f.nvars != self.width:
                raise ValueError("elementary polynomial arity does not match the word")

    @property
    def width(self) -> int:
        return self.n + (1 if self.param else 0)

    def __len__(self):
        return len(self.gens)

    def __mul__(self, other: "TameWord") -> "TameWord":
        """Composition self o other (other acts first)."""
        if other.n != self.n or other.param != self.param:
            raise ValueError("incompatible words")
        return TameWord(self.ctx, self.n, self.gens + other.gens, self.param)

    def inverse(self) -> "TameWord":
        return TameWord(self.ctx, self.n, [g.inverse() for g in reversed(self.gens)], self.param)

    def apply(self, pts: np.ndarray) -> np.ndarray:
        pts = np.array(pts, dtype=np.int64)
        for g in reversed(self.gens):
            pts = g.apply(pts)
        return pts

    def apply_point(self, pt: Sequence[int]) -> list[int]:
        pt = [int(x) for x in pt]
        if len(pt) != self.width:
            raise ValueError("point length does not match the word")
        for g in reversed(self.gens):
            pt = g.apply_point(pt)
        return pt

    def specialize(self, c: int) -> "TameWord":
        """Plug Z = c into a parameterized word, producing a word over F_q(c)."""
        if not self.param:
            return self
        n = self.n
        out = []
        for g in self.gens:
            if isinstance(g, Elementary):
                f = g.f
                if isinstance(f, LocalizedPoly):
                    gc = f.g.eval([c])
                    if f.denom_power and gc == 0:
                        from .mpoly import PoleError
                        raise PoleError(f"pole at Z={c}")
                    scale = self.ctx.pow(self.ctx.inv(gc), f.denom_power) if f.denom_power else 1
                    num = f.numerator
                else:
                    scale, num = 1, f
                terms: dict = {}
                for e, v in num.terms.items():
                    v = self.ctx.mul(v, self.ctx.mul(scale, self.ctx.pow(c, e[-1]) if e[-1] else 1))
                    key = e[:-1]
                    terms[key] = self.ctx.add(terms.get(key, 0), v)
                out.append(Elementary(g.target, MPoly(self.ctx, n, terms, base_coeff=False)))
            else:
                out.append(g)
        return TameWord(self.ctx, n, out, False)


def word_apply_point(w: TameWord, point) -> list[int]:
    return w.apply_point(point)


def word_inverse(w: TameWord) -> TameWord:
    return w.inverse()


@dataclass
class PolyMap:
    ctx: FieldCtx
    components: list

    @property
    def n(self) -> int:
        return len(self.components)

    def __post_init__(self):
        for c in self.components:
            if c.nvars != len(self.components):
                raise ValueError("component arity must equal the dimension")

    def apply(self, pts):
        pts = np.asarray(pts)
        return np.stack([c.veval(pts) for c in self.components])

    def apply_point(self, pt):
        return [c.eval(list(pt)) for c in self.components]

    def compose(self, other: "PolyMap") -> "PolyMap":
        """self o other, symbolically (fixtures only)."""
        return PolyMap(self.ctx, [c.substitute(other.components) for c in self.components])

    @classmethod
    def identity(cls, ctx, n):
        return cls(ctx, [MPoly.var(ctx, n, i) for i in range(n)])

    @classmethod
    def from_word(cls, w: TameWord) -> "PolyMap":
        """Symbolic expansion of a non-parameterized word (small words only)."""
        ctx, n = w.ctx, w.n
        cur = cls.identity(ctx, n)
        for g in reversed(w.gens):
            cur = _gen_as_polymap(ctx, n, g).compose(cur)
        return cur


def _gen_as_polymap(ctx, n, g) -> PolyMap:
    X = [MPoly.var(ctx, n, i) for i in range(n)]
    if isinstance(g, Elementary):
        comps = list(X)
        comps[g.target] = X[g.target] + g.f
    elif isinstance(g, Swap):
        comps = list(X)
        comps[0], comps[g.i] = X[g.i], X[0]
    elif isinstance(g, VarPerm):
        comps = [X[s] for s in g.sigma]
    elif isinstance(g, Scale):
        comps = list(X)
        comps[g.i] = X[g.i].scale(g.a)
    elif isinstance(g, Affine):
        comps = []
        for i in range(n):
            acc = MPoly.const(ctx, n, g.shift[i])
            for j in range(n):
                if g.matrix[i][j]:
                    acc = acc + X[j].scale(g.matrix[i][j])
            comps.append(acc)
    else:  # pragma: no cover
        raise TypeError(g)
    return PolyMap(ctx, comps)


def nagata(ctx: FieldCtx) -> PolyMap:
    """(X - 2 Y D - Z D^2, Y + Z D, Z) with D = X Z + Y^2; variables (X, Y, Z)."""
    X, Y, Z = (MPoly.var(ctx, 3, i) for i in range(3))
    D = X * Z + Y * Y
    two = ctx.from_int(2)
    first = X - (Y * D).scale(two) - Z * D * D
    return PolyMap(ctx, [first, Y + Z * D, Z])


# -- level permutations ------------------------------------------------------

@dataclass
class LevelPerm:
    """Permutation of F_{q^level}^n as positions in the sorted level domain."""

    ctx: FieldCtx
    n: int
    level: int
    perm: Perm

    @property
    def domain(self) -> np.ndarray:
        return level_domain(self.ctx, self.n, self.level)[0]

    def __mul__(self, other: "LevelPerm") -> "LevelPerm":
        """self applied first, then other."""
        if (self.n, self.level) != (other.n, other.level):
            raise ValueError("level permutations on different domains")
        return LevelPerm(self.ctx, self.n, self.level, self.perm * other.perm)

    def after(self, other: "LevelPerm") -> "LevelPerm":
        """self o other."""
        return other * self

    def inverse(self) -> "LevelPerm":
        return LevelPerm(self.ctx, self.n, self.level, self.perm.inverse())

    def __eq__(self, other):
        return (isinstance(other, LevelPerm) and self.n == other.n and self.level == other.level
                and self.perm == other.perm)

    def image_of_point(self, coords: Sequence[int]) -> list[int]:
        idx = self.domain
        i = int(np.searchsorted(idx, point_index(self.ctx, np.asarray(coords)[:, None])[0]))
        j = int(self.perm.images[i])
        return index_to_coords(self.ctx, self.n, idx[j]).tolist()

    @classmethod
    def frobenius(cls, ctx, n, level=None) -> "LevelPerm":
        level = ctx.m if level is None else level
        return cls(ctx, n, level, Perm(frobenius_positions(ctx, n, level)))

    @classmethod
    def identity(cls, ctx, n, level=None) -> "LevelPerm":
        level = ctx.m if level is None else level
        N = len(level_domain(ctx, n, level)[0])
        return cls(ctx, n, level, Perm.identity(N))


def is_equivariant(p: LevelPerm) -> bool:
    f = frobenius_positions(p.ctx, p.n, p.level)
    img = p.perm.images
    return bool(np.array_equal(img[f], f[img]))


def induced_perm(F: Union[PolyMap, TameWord], level: int | None = None, check: bool = True) -> LevelPerm:
    ctx = F.ctx
    n = F.n
    level = ctx.m if level is None else level
    idx, coords = level_domain(ctx, n, level)
    if isinstance(F, TameWord) and F.param:
        raise ValueError("specialize a parameterized word before inducing a permutation")
    img = point_index(ctx, F.apply(coords))
    pos = np.searchsorted(idx, img)
    pos = np.minimum(pos, len(idx) - 1)
    if not np.array_equal(idx[pos], img):
        raise NotBijectiveAtLevel(level, "image leaves the level domain")
    seen = np.zeros(len(idx), dtype=bool)
    seen[pos] = True
    if not seen.all():
        raise NotBijectiveAtLevel(level, "two points share an image")
    out = LevelPerm(ctx, n, level, Perm(pos))
    if check and not is_equivariant(out):
        raise EquivarianceError("induced permutation does not commute with Frobenius")
    return out


def restriction(p: LevelPerm, d: int) -> LevelPerm:
    """Restrict a level permutation to the points of F_{q^d}^n."""
    if p.level % d:
        raise ValueError(f"{d} does not divide level {p.level}")
    big = p.domain
    small = level_domain(p.ctx, p.n, d)[0]
    where = np.searchsorted(big, small)
    img = big[p.perm.images[where]]
    pos = np.searchsorted(small, img)
    pos = np.minimum(pos, len(small) - 1)
    if not np.array_equal(small[pos], img):
        raise EquivarianceError("restriction does not preserve the subfield points")
    return LevelPerm(p.ctx, p.n, d, Perm(pos))


def levels_of(ctx: FieldCtx) -> list[int]:
    return divisors(ctx.m)
