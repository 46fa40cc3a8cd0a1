"""Z-polynomial tame words that agree with a given map on closed or open sets of Z values."""
from __future__ import annotations

from typing import Mapping

import numpy as np

from ..ffield import FieldCtx, ctx_for
from ..mpoly import LocalizedPoly, MPoly
from ..polymap import (Elementary, PolyMap, Swap, TameWord, VarPerm, induced_perm,
                       level_domain, nagata)
from .interp import galois_orbit, interp_value


class MimickError(ValueError):
    pass


def _univariate_roots(ctx: FieldCtx, g: MPoly) -> list[int]:
    return [c for c in range(ctx.size) if g.eval([c]) == 0]


def min_poly(ctx: FieldCtx, alpha: int) -> MPoly:
    """Minimal polynomial of alpha over F_q, as a univariate MPoly."""
    acc = MPoly.const(ctx, 1, 1, base_coeff=False)
    for a in galois_orbit(ctx, (alpha,)):
        lin = MPoly(ctx, 1, {(1,): 1, (0,): ctx.neg(a[0])}, base_coeff=False)
        acc = acc * lin
    return acc.with_base_flag()


def _splits(ctx: FieldCtx, g: MPoly) -> bool:
    roots = _univariate_roots(ctx, g)
    deg = g.total_degree()
    # count roots with multiplicity by repeated division
    rem = MPoly(ctx, 1, g.terms, base_coeff=False)
    count = 0
    for r in roots:
        while True:
            q, ok = _divide_linear(ctx, rem, r)
            if not ok:
                break
            rem, count = q, count + 1
    return count == deg


def _divide_linear(ctx, f: MPoly, r: int):
    coeffs = [f.terms.get((k,), 0) for k in range(f.total_degree() + 1)]
    if not coeffs:
        return f, False
    out = [0] * (len(coeffs) - 1)
    carry = 0
    for k in range(len(coeffs) - 1, 0, -1):
        carry = ctx.add(coeffs[k], ctx.mul(carry, r))
        out[k - 1] = carry
    if ctx.add(coeffs[0], ctx.mul(carry, r)) != 0:
        return f, False
    return MPoly(ctx, 1, {(k,): c for k, c in enumerate(out)}, base_coeff=False), True


def _lift(ctx: FieldCtx, f: MPoly, alpha: int, n: int) -> MPoly:
    """F_q(alpha)-coefficient polynomial in X -> F_q[Z, X] polynomial agreeing at Z = alpha."""
    out = MPoly(ctx, n + 1, {})
    for e, c in f.terms.items():
        zc = interp_value(ctx, (alpha,), c)
        out = out + zc.extend_vars(n + 1, [n]) * MPoly.monomial(ctx, n + 1, tuple(e) + (0,))
    return out


def mimick_closed(ctx: FieldCtx, n: int, factors: Mapping[int, TameWord], g: MPoly) -> TameWord:
    """Word G over F_q[Z] with G_c = identity when g(c) != 0 and G_c = F_c at the roots.

    ``factors`` maps one root alpha per root orbit to a word over F_q(alpha)
    made of origin-fixing elementary maps and permutations.
    """
    Q = ctx.size
    if not _splits(ctx, g):
        raise MimickError("g does not split over the ambient field")
    roots = _univariate_roots(ctx, g)
    orbits = {min(a[0] for a in galois_orbit(ctx, (r,))) for r in roots}
    given = {min(a[0] for a in galois_orbit(ctx, (a,))): a for a in factors}
    if set(given) != orbits:
        raise MimickError("need exactly one factor word per root orbit of g")
    gens: list = []
    for key in sorted(orbits):
        alpha = given[key]
        # rho = 1 - g_alpha^(Q-1): 1 exactly on the orbit of alpha
        ga = min_poly(ctx, alpha)
        rho = (MPoly.const(ctx, 1, 1) - ga ** (Q - 1)).reduce_as_function(Q)
        rho_z = rho.extend_vars(n + 1, [n])
        block = []
        for gen in _without_permutations(factors[alpha]).gens:
            if isinstance(gen, Elementary):
                f = gen.f
                if isinstance(f, LocalizedPoly) or f.constant_term():
                    raise MimickError("factor words must fix the origin and be polynomial")
                lifted = (_lift(ctx, f, alpha, n) * rho_z).reduce_as_function(Q)
                if not lifted.is_zero():
                    block.append(Elementary(gen.target, lifted))
            else:
                raise MimickError(f"unsupported factor {gen!r}")
        gens += block
    return TameWord(ctx, n, gens, param=True)


def _perm_sigma(n, gen) -> list[int]:
    if isinstance(gen, Swap):
        s = list(range(n))
        s[0], s[gen.i] = gen.i, 0
        return s
    return list(gen.sigma) + list(range(len(gen.sigma), n))


def _without_permutations(w: TameWord) -> TameWord:
    """Move every permutation to the right end by conjugation; the net permutation must be trivial.

    Permutations cannot be multiplied by rho, so they would act at every Z value.
    """
    ctx, n = w.ctx, w.n
    sigma = list(range(n))  # accumulated permutation P, word = out o P o rest
    out = []
    for gen in w.gens:
        if isinstance(gen, (VarPerm, Swap)):
            s = _perm_sigma(n, gen)
            sigma = [sigma[s[i]] for i in range(n)]
        elif isinstance(gen, Elementary):
            inv = [0] * n
            for i, j in enumerate(sigma):
                inv[j] = i
            maps = [MPoly.var(ctx, n, inv[j]) for j in range(n)]
            out.append(Elementary(inv[gen.target], gen.f.substitute(maps)))
        else:
            raise MimickError(f"unsupported factor {gen!r}")
    if sigma != list(range(n)):
        raise MimickError("factor word has a nontrivial net variable permutation")
    return TameWord(ctx, n, out)


def mimick_open(w: TameWord, Q: int | None = None) -> TameWord:
    """Replace every g^-t by g^(t(Q-2)); agrees with w wherever g(c) != 0 on F_Q."""
    if not w.param:
        return w
    Q = Q or w.ctx.size
    gens = []
    for gen in w.gens:
        if isinstance(gen, Elementary) and isinstance(gen.f, LocalizedPoly):
            f = gen.f.clear_denominator(Q).reduce_as_function(Q)
            gens.append(Elementary(gen.target, f))
        else:
            gens.append(gen)
    return TameWord(w.ctx, w.n, gens, True)


def specialized_agrees(a: TameWord, b, c: int) -> bool:
    """Compare a_c with b_c on all of F_Q^n; b is a param word or a callable(point array, c)."""
    ctx, n = a.ctx, a.n
    pts = level_domain(ctx, n)[1]
    lhs = a.specialize(c).apply(pts)
    rhs = b.specialize(c).apply(pts) if isinstance(b, TameWord) else b(pts, c)
    return bool(np.array_equal(lhs, rhs))


def nagata_factorization(ctx: FieldCtx) -> TameWord:
    """N = c^-1 o h o c over F_q[Z, Z^-1]: c = (X + Y^2/Z, Y), h = (X, Y + Z^2 X)."""
    n = 2
    Z = MPoly.monomial(ctx, 1, (1,))
    Y2 = MPoly.monomial(ctx, 3, (0, 2, 0))
    c = Elementary(0, LocalizedPoly(Y2, 1, Z))
    h = Elementary(1, MPoly.monomial(ctx, 3, (1, 0, 2)))
    return TameWord(ctx, n, [c.inverse(), h, c], param=True)


def _nagata_slice(ctx: FieldCtx):
    N = nagata(ctx)

    def at(pts, c):
        full = np.vstack([pts, np.full((1, pts.shape[1]), c, dtype=np.int64)])
        return N.apply(full)[:2]
    return at


def nagata_level_word(q: int, m: int, verify: bool = True) -> TameWord:
    """Tame word in (X, Y, Z) over F_q whose permutation of F_{q^m}^3 equals the Nagata map's."""
    ctx = ctx_for(q, m)
    Q = ctx.size
    Nz = nagata_factorization(ctx)
    # open part: agrees with N wherever Z != 0
    Gt = mimick_open(Nz, Q)
    # closed part: at Z = 0 the residual Gt_0^-1 o N_0 is X -> X - 2 Y^3
    N0 = PolyMap(ctx, [c.substitute([MPoly.var(ctx, 2, 0), MPoly.var(ctx, 2, 1), MPoly.zero(ctx, 2)])
                       for c in nagata(ctx).components[:2]])
    G0 = Gt.specialize(0)
    if not _is_identity_word(G0):
        raise MimickError("open-set word is not the identity at Z = 0")
    residual = N0.components[0] - MPoly.var(ctx, 2, 0)
    if N0.components[1] != MPoly.var(ctx, 2, 1) or residual.involves(0):
        raise MimickError("unexpected residual at Z = 0")
    factor = TameWord(ctx, 2, [Elementary(0, residual)] if not residual.is_zero() else [])
    G = mimick_closed(ctx, 2, {0: factor}, MPoly.monomial(ctx, 1, (1,)))
    W = Gt * G
    word = TameWord(ctx, 3, W.gens, param=False)
    if verify:
        lhs = induced_perm(word, m, check=False)
        rhs = induced_perm(nagata(ctx), m, check=False)
        if lhs != rhs:
            raise MimickError("level word disagrees with the Nagata map")
    return word


def _is_identity_word(w: TameWord) -> bool:
    pts = level_domain(w.ctx, w.n)[1]
    return bool(np.array_equal(w.apply(pts), pts))
