"""Galois-equivariant interpolation: indicator and value polynomials over F_q."""
from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Sequence

import numpy as np

from ..ffield import FieldCtx
from ..mpoly import MPoly
from ..orbits import point_degree
from ..polymap import PolyMap


def galois_orbit(ctx: FieldCtx, alpha: Sequence[int]) -> list[tuple]:
    """Distinct conjugates phi^k(alpha), k = 0, 1, ..."""
    out = [tuple(int(a) for a in alpha)]
    while True:
        nxt = tuple(ctx.frobenius(a) for a in out[-1])
        if nxt == out[0]:
            return out
        out.append(nxt)


def same_orbit(ctx: FieldCtx, x: Sequence[int], y: Sequence[int]) -> bool:
    return tuple(y) in galois_orbit(ctx, x)


def _point_basis(ctx: FieldCtx, beta: int, Q: int) -> np.ndarray:
    """Coefficients of 1 - (Y - beta)^(Q-1), lowest degree first."""
    c = np.array([ctx.neg(ctx.pow(beta, Q - 1 - k)) for k in range(Q)], dtype=np.int64)
    c[0] = ctx.add(1, c[0])
    return c


def _dense_interpolate(ctx: FieldCtx, table: Sequence[tuple[tuple, int]], e: int, Q: int) -> MPoly:
    """Reduced polynomial with the given values at the listed points and 0 elsewhere on F_Q^e."""
    acc = np.zeros((Q,) * e, dtype=np.int64)
    for pt, val in table:
        if not val:
            continue
        t = np.array(val, dtype=np.int64).reshape(())
        for i, b in enumerate(pt):
            basis = _point_basis(ctx, b, Q)
            t = ctx.vmul(t[..., None], basis.reshape((1,) * i + (Q,)))
        acc = ctx.vadd(acc, t)
    terms = {tuple(int(k) for k in ix): int(acc[ix]) for ix in zip(*np.nonzero(acc))}
    # equivariant data forces F_q coefficients; MPoly raises if that fails
    return MPoly(ctx, e, terms, base_coeff=True)


@lru_cache(maxsize=1 << 16)
def _interp_cached(ctx: FieldCtx, alpha: tuple, b: int, Q: int) -> MPoly:
    orbit = galois_orbit(ctx, alpha)
    table = []
    val = b
    for pt in orbit:
        table.append((pt, val))
        val = ctx.frobenius(val)
    if val != b:
        raise ValueError(f"value {b} does not lie in F_q(alpha)")
    return _dense_interpolate(ctx, table, len(alpha), Q)


def interp_indicator(ctx: FieldCtx, alpha: Sequence[int], Q: int | None = None) -> MPoly:
    """Polynomial over F_q equal to 1 on the orbit [alpha] and 0 elsewhere on F_Q^e."""
    return _interp_cached(ctx, tuple(int(a) for a in alpha), 1, Q or ctx.size)


def interp_value(ctx: FieldCtx, alpha: Sequence[int], b: int, Q: int | None = None,
                 require_generator: bool = False) -> MPoly:
    """Polynomial over F_q with f(phi^k alpha) = phi^k(b), zero off [alpha].

    Needs b in F_q(alpha).  With ``require_generator`` some coordinate of alpha
    must generate the whole ambient field.
    """
    alpha = tuple(int(a) for a in alpha)
    if require_generator and not any(ctx.degree(a) == ctx.m for a in alpha):
        raise ValueError("no coordinate of alpha generates F_{q^m}")
    if ctx.degree(b) and point_degree(ctx, alpha) % ctx.degree(b):
        raise ValueError(f"value {b} does not lie in F_q(alpha)")
    return _interp_cached(ctx, alpha, int(b), Q or ctx.size)


def value_via_generator(ctx: FieldCtx, alpha: Sequence[int], b: int, Q: int | None = None) -> MPoly:
    """h * indicator, with h univariate in the first generating coordinate.

    Slow route used as a cross-check of ``interp_value``.
    """
    Q = Q or ctx.size
    e = len(alpha)
    gi = next(i for i, a in enumerate(alpha) if ctx.degree(a) == point_degree(ctx, alpha))
    deg = ctx.degree(alpha[gi])
    # solve b = sum c_k alpha_gi^k with c_k in F_q by search over the q^deg candidates
    base = ctx.elements(1)
    powers = [ctx.pow(alpha[gi], k) for k in range(deg)]
    for cs in itertools.product(base, repeat=deg):
        v = 0
        for c, pw in zip(cs, powers):
            v = ctx.add(v, ctx.mul(c, pw))
        if v == b:
            break
    else:
        raise ValueError("b is not a polynomial in the generating coordinate")
    h = MPoly(ctx, e, {tuple(k if j == gi else 0 for j in range(e)): c for k, c in enumerate(cs)})
    return (h * interp_indicator(ctx, alpha, Q)).reduce_as_function(Q)


def realizer_sigma(ctx: FieldCtx, alpha: Sequence[int], beta: Sequence[int], Q: int | None = None) -> PolyMap:
    """Map sending phi^k(alpha) to phi^k(beta) and every point off [alpha] to 0."""
    if len(alpha) != len(beta):
        raise ValueError("alpha and beta must have the same length")
    w = point_degree(ctx, alpha)
    for b in beta:
        if w % ctx.degree(b):
            raise ValueError(f"{b} does not lie in F_q(alpha)")
    return PolyMap(ctx, [interp_value(ctx, alpha, b, Q) for b in beta])
