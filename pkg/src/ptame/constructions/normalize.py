"""Rewrite tame words as origin-fixing triangular factors and variable permutations.

Translations and diagonal maps are pushed to the left end of the word; the
diagonal that remains is removed with two 2x2 identities:

    diag(f^-1, f) = E[f^-1] P E[1-f] P E[-1] P E[1-f^-1] P
    diag(1, -1)   = E[1] P E[-1] P E[1] P

where E[a] is X_i += a X_j and P swaps X_i and X_j.
"""
from __future__ import annotations

from typing import Sequence

from ..ffield import FieldCtx
from ..mpoly import LocalizedPoly, MPoly
from ..polymap import Affine, Elementary, PolyMap, Scale, Swap, TameWord, VarPerm


class AffinePartError(ValueError):
    pass


def _transposition(n: int, i: int, j: int) -> VarPerm:
    s = list(range(n))
    s[i], s[j] = j, i
    return VarPerm(tuple(s))


def _e(ctx: FieldCtx, width: int, i: int, j: int, a: int) -> Elementary:
    return Elementary(i, MPoly.monomial(ctx, width, tuple(1 if k == j else 0 for k in range(width)), a))


def block_identity(ctx: FieldCtx, f: int) -> list[tuple]:
    """Factor list [('E', a) | ('P',)] for diag(f^-1, f)."""
    fi = ctx.inv(f)
    return [("E", fi), ("P",), ("E", ctx.sub(1, f)), ("P",), ("E", ctx.neg(1)), ("P",),
            ("E", ctx.sub(1, fi)), ("P",)]


def sign_identity(ctx: FieldCtx) -> list[tuple]:
    """Factor list for diag(1, -1)."""
    return [("E", 1), ("P",), ("E", ctx.neg(1)), ("P",), ("E", 1), ("P",)]


def factors_matrix(ctx: FieldCtx, factors: Sequence[tuple]) -> list[list[int]]:
    """2x2 matrix of a factor list (leftmost factor outermost)."""
    M = [[1, 0], [0, 1]]
    for fac in factors:
        F = [[0, 1], [1, 0]] if fac[0] == "P" else [[1, fac[1]], [0, 1]]
        M = [[ctx.add(ctx.mul(M[i][0], F[0][j]), ctx.mul(M[i][1], F[1][j])) for j in range(2)]
             for i in range(2)]
    return M


def _block_gens(ctx, width, i, j, factors) -> list:
    out = []
    for fac in factors:
        if fac[0] == "P":
            out.append(_transposition(width, i, j) if i and j else Swap(i or j))
        elif fac[1]:
            out.append(_e(ctx, width, i, j, fac[1]))
    return out


def diagonal_as_word(ctx: FieldCtx, n: int, diag: Sequence[int], width: int | None = None) -> list:
    """Generators (leftmost first) realizing x -> diag * x, for det(diag) = +-1."""
    width = n if width is None else width
    gens: list = []
    carry = 1
    for i in range(n - 1):
        d = ctx.mul(carry, diag[i])
        # diag(d, 1/d) on (i, i+1), then the remainder carries 1/d into slot i+1
        if d != 1:
            gens += _block_gens(ctx, width, i, i + 1, block_identity(ctx, ctx.inv(d)))
        carry = d
    last = ctx.mul(carry, diag[n - 1])
    if last == ctx.neg(1) and last != 1:
        gens += _block_gens(ctx, width, n - 2, n - 1, sign_identity(ctx))
    elif last != 1:
        raise AffinePartError("diagonal part does not have determinant +-1")
    return gens


def _linear_factors(ctx: FieldCtx, n: int, M) -> list:
    """Gaussian elimination: M as a composition (leftmost first) of swaps, scales, elementary maps."""
    A = [list(r) for r in M]
    ops = []  # row operations L with L applied after A
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col]), None)
        if piv is None:
            raise ValueError("singular linear part")
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            ops.append(_transposition(n, col, piv))
        inv = ctx.inv(A[col][col])
        if inv != 1:
            A[col] = [ctx.mul(inv, x) for x in A[col]]
            ops.append(Scale(col, inv, ctx))
        for r in range(n):
            if r != col and A[r][col]:
                c = A[r][col]
                A[r] = [ctx.sub(x, ctx.mul(c, y)) for x, y in zip(A[r], A[col])]
                ops.append(_e(ctx, n, r, col, ctx.neg(c)))
    return [op.inverse() for op in ops]


class _Pending:
    """x -> a * x + t, kept at the left end while scanning the word right to left."""

    def __init__(self, ctx, n, param):
        self.ctx, self.n, self.param = ctx, n, param
        self.a = [1] * n
        self.t = [0] * n

    def scale(self, i, c):
        self.a[i] = self.ctx.mul(self.a[i], c)
        self.t[i] = self.ctx.mul(self.t[i], c)

    def translate(self, b):
        self.t = [self.ctx.add(x, y) for x, y in zip(self.t, b)]

    def permute(self, sigma):
        k = len(sigma)
        self.a = [self.a[sigma[i]] for i in range(k)] + self.a[k:]
        self.t = [self.t[sigma[i]] for i in range(k)] + self.t[k:]

    def conjugate(self, g: Elementary) -> Elementary | None:
        """Return E'' with E o D = (D o T) o E'' and fold T into self."""
        ctx, n = self.ctx, self.n
        k = g.target
        f = g.f
        width = n + (1 if self.param else 0)
        maps = []
        for j in range(n):
            v = MPoly.var(ctx, width, j).scale(self.a[j])
            maps.append(v + MPoly.const(ctx, width, self.t[j]) if self.t[j] else v)
        if self.param:
            maps.append(MPoly.var(ctx, width, n))
        num = f.numerator if isinstance(f, LocalizedPoly) else f
        sub = num.substitute(maps)
        if self.param:
            pure_z = {e: c for e, c in sub.terms.items() if not any(e[:n])}
            if pure_z:
                raise AffinePartError("translations with Z-dependent entries are not supported")
            c0 = 0
        else:
            c0 = sub.constant_term()
            sub = sub - MPoly.const(ctx, width, c0)
        sub = sub.scale(ctx.inv(self.a[k]))
        self.t[k] = ctx.add(self.t[k], c0)
        if sub.is_zero():
            return None
        if isinstance(f, LocalizedPoly):
            return Elementary(k, LocalizedPoly(sub, f.denom_power, f.g))
        return Elementary(k, sub)


def _check_affine_identity(w: TameWord):
    if w.param:
        return
    pm = PolyMap.from_word(w)
    n = w.n
    for i, comp in enumerate(pm.components):
        for e, c in comp.terms.items():
            deg = sum(e)
            if deg == 0 or (deg == 1 and (e[i] != 1 or c != 1)):
                raise AffinePartError(f"component {i} has a nonidentity affine part")
        lin = tuple(1 if j == i else 0 for j in range(n))
        if comp.terms.get(lin) != 1:
            raise AffinePartError(f"component {i} has a nonidentity affine part")


def normalize_tame_word(w: TameWord, check: bool = True) -> TameWord:
    """Equivalent word using only origin-fixing elementary maps and variable permutations."""
    ctx, n = w.ctx, w.n
    if check:
        _check_affine_identity(w)
    D = _Pending(ctx, n, w.param)
    out: list = []
    stack = list(w.gens)
    while stack:
        g = stack.pop()
        if isinstance(g, Affine):
            # x -> M x + b: M acts first, then the translation
            stack.append(("translate", g.shift))
            stack.extend(_linear_factors(ctx, n, g.matrix))
            continue
        if isinstance(g, tuple):
            D.translate(g[1])
        elif isinstance(g, Scale):
            D.scale(g.i, g.a)
        elif isinstance(g, (VarPerm, Swap)):
            sigma = g.sigma if isinstance(g, VarPerm) else _swap_sigma(n, g.i)
            D.permute(sigma)
            out.append(g)
        elif isinstance(g, Elementary):
            e = D.conjugate(g)
            if e is not None:
                out.append(e)
        else:  # pragma: no cover
            raise TypeError(g)
    if any(D.t):
        raise AffinePartError("the word does not fix the origin")
    width = w.width
    head = diagonal_as_word(ctx, n, D.a, width)
    return TameWord(ctx, n, head + list(reversed(out)), w.param)


def _swap_sigma(n: int, i: int) -> tuple:
    s = list(range(n))
    s[0], s[i] = i, 0
    return tuple(s)


def is_normalized(w: TameWord) -> bool:
    for g in w.gens:
        if isinstance(g, (VarPerm, Swap)):
            continue
        if not isinstance(g, Elementary):
            return False
        num = g.f.numerator if isinstance(g.f, LocalizedPoly) else g.f
        if any(not any(e[:w.n]) for e in num.terms):
            return False
    return True
