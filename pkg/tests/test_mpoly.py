import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ptame.ffield import ctx_for
from ptame.mpoly import LocalizedPoly, MPoly, PoleError, localized_eval
from ptame.polymap import nagata

F4 = ctx_for(2, 2)
T = 2  # generator of F_4 over F_2


def Y(ctx, n=1, i=0):
    return MPoly.var(ctx, n, i)


def test_eval_examples():
    y = Y(F4)
    assert (y * y + y).eval([T]) == 1
    assert MPoly.zero(F4, 3).eval([1, 2, 3]) == 0
    x1, x2 = Y(F4, 2, 0), Y(F4, 2, 1)
    assert (x1 * x2).eval([T, F4.mul(T, T)]) == 1


def test_eval_arity():
    with pytest.raises(ValueError):
        Y(F4, 2).eval([1])


def test_reduce_as_function_examples():
    y = Y(F4)
    assert (y ** 4).reduce_as_function(4) == y
    assert (y ** 3).reduce_as_function(4) == y ** 3
    r = (y ** 6).reduce_as_function(4)
    assert r == y ** 3
    for a in range(4):
        assert r.eval([a]) == (y ** 6).eval([a])


def test_substitute_examples():
    f2 = ctx_for(2, 1)
    x1, x2 = Y(f2, 2, 0), Y(f2, 2, 1)
    assert (x1 + x2).substitute([x1, x1]).is_zero()
    f3 = ctx_for(3, 1)
    a, b = Y(f3, 2, 0), Y(f3, 2, 1)
    got = (a * a).substitute([a + b, b])
    assert got == a * a + (a * b).scale(2) + b * b


def _cancel_zw(f: MPoly) -> MPoly:
    """Variables (X, Y, Z, W) with W = 1/Z: cancel Z*W pairs."""
    out = {}
    for e, c in f.terms.items():
        k = min(e[2], e[3])
        ne = (e[0], e[1], e[2] - k, e[3] - k)
        out[ne] = f.ctx.add(out.get(ne, 0), c)
    return MPoly(f.ctx, 4, out)


@pytest.mark.parametrize("q", [3, 5, 2])
def test_nagata_via_laurent_factorization(q):
    ctx = ctx_for(q, 1)
    X, Yv, Z, W = (MPoly.var(ctx, 4, i) for i in range(4))
    c = [X + Yv * Yv * W, Yv, Z, W]
    c_inv = [X - Yv * Yv * W, Yv, Z, W]
    h = [X, Yv + Z * Z * X, Z, W]
    hc = [_cancel_zw(f.substitute(c)) for f in h]
    N = [_cancel_zw(f.substitute(hc)) for f in c_inv]
    want = nagata(ctx).components
    for got, w in zip(N[:3], want):
        assert not any(e[3] for e in got.terms)
        assert got == w.extend_vars(4, [0, 1, 2])


def test_localized_eval_examples():
    y2 = MPoly.monomial(F4, 2, (2, 0))
    g = MPoly.var(F4, 1, 0)
    f = LocalizedPoly(y2, 1, g)
    assert localized_eval(f, 1, [T]) == 3  # t^2 = t + 1
    plain = LocalizedPoly(y2, 0, g)
    assert localized_eval(plain, 0, [T]) == y2.eval([T, 0])
    with pytest.raises(PoleError):
        localized_eval(f, 0, [T])


def test_clear_denominator_agrees_off_poles():
    ctx = ctx_for(3, 2)
    num = MPoly.monomial(ctx, 2, (2, 0)) + MPoly.monomial(ctx, 2, (1, 1))
    g = MPoly.from_literal(ctx, 1, [[1, [2]], [1, [0]]])  # Z^2 + 1
    f = LocalizedPoly(num, 2, g)
    cleared = f.clear_denominator(ctx.size)
    for y, z in itertools.product(range(ctx.size), repeat=2):
        if g.eval([z]):
            assert cleared.eval([y, z]) == f.eval([y, z])


def test_base_flag_rejects_top_field_coefficients():
    with pytest.raises(ValueError):
        MPoly.const(F4, 1, T)
    assert MPoly.const(F4, 1, T, base_coeff=False).eval([0]) == T


# -- properties

CTXS = [ctx_for(2, 2), ctx_for(3, 1), ctx_for(3, 2), ctx_for(4, 1), ctx_for(2, 3)]


@st.composite
def polys(draw, ctx, n, max_terms=4, max_exp=5):
    base = ctx.elements(1)
    k = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(k):
        e = tuple(draw(st.integers(0, max_exp)) for _ in range(n))
        terms[e] = draw(st.sampled_from(base))
    return MPoly(ctx, n, terms)


@given(st.data())
def test_ring_axioms(data):
    ctx = data.draw(st.sampled_from(CTXS))
    f, g, h = (data.draw(polys(ctx, 2)) for _ in range(3))
    assert f + g == g + f
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert (f - f).is_zero()


@given(st.data())
def test_eval_is_ring_hom(data):
    ctx = data.draw(st.sampled_from(CTXS))
    f, g = data.draw(polys(ctx, 2)), data.draw(polys(ctx, 2))
    pt = [data.draw(st.integers(0, ctx.size - 1)) for _ in range(2)]
    assert (f * g).eval(pt) == ctx.mul(f.eval(pt), g.eval(pt))
    assert (f + g).eval(pt) == ctx.add(f.eval(pt), g.eval(pt))


@given(st.data())
def test_substitute_commutes_with_eval(data):
    ctx = data.draw(st.sampled_from(CTXS))
    f = data.draw(polys(ctx, 2, max_exp=3))
    maps = [data.draw(polys(ctx, 2, max_terms=3, max_exp=2)) for _ in range(2)]
    sub = f.substitute(maps)
    pts = list(itertools.product(range(ctx.size), repeat=2))
    for pt in pts:
        inner = [m.eval(pt) for m in maps]
        assert sub.eval(pt) == f.eval(inner)


@given(st.data())
def test_reduce_preserves_function(data):
    ctx = data.draw(st.sampled_from(CTXS))
    f = data.draw(polys(ctx, 2, max_exp=20))
    r = f.reduce_as_function(ctx.size)
    assert all(k < ctx.size for e in r.terms for k in e)
    for pt in itertools.product(range(ctx.size), repeat=2):
        assert r.eval(pt) == f.eval(pt)


@given(st.data())
def test_veval_matches_eval(data):
    ctx = data.draw(st.sampled_from(CTXS))
    f = data.draw(polys(ctx, 3, max_exp=9))
    pts = np.array(list(itertools.product(range(ctx.size), repeat=3))).T
    fast = f.veval(pts)
    assert [int(x) for x in fast] == [f.eval(list(p)) for p in pts.T]


@given(st.data())
def test_literal_round_trip(data):
    ctx = data.draw(st.sampled_from(CTXS))
    f = data.draw(polys(ctx, 3))
    lit = f.to_literal()
    assert MPoly.from_literal(ctx, 3, lit) == f
    assert MPoly.from_literal(ctx, 3, list(reversed(lit))) == f
