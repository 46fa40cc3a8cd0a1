import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ptame.constructions.interp import (galois_orbit, interp_indicator, interp_value,
                                        realizer_sigma, value_via_generator)
from ptame.constructions.mimick import (MimickError, mimick_closed, mimick_open,
                                        nagata_factorization, nagata_level_word,
                                        specialized_agrees, _nagata_slice)
from ptame.constructions.movers import (MoverPrecondition, coordinate_replace,
                                        distinct_orbit_mover, two_point_mover,
                                        two_transitive_mover, verify_mover)
from ptame.constructions.normalize import (AffinePartError, block_identity, diagonal_as_word,
                                           factors_matrix, is_normalized, normalize_tame_word,
                                           sign_identity)
from ptame.constructions.three_cycle import (cycle_points, cycle_report, eta_word,
                                             three_cycle_word, zeta_word)
from ptame.equivariance import wreath_decompose
from ptame.ffield import ctx_for
from ptame.mpoly import MPoly
from ptame.orbits import build_orbit_table, orbit_action
from ptame.polymap import (Affine, Elementary, Scale, Swap, TameWord, VarPerm, induced_perm,
                           level_domain, nagata)

F4 = ctx_for(2, 2)
T = 2


def all_points(ctx, e):
    return list(itertools.product(range(ctx.size), repeat=e))


# -- interpolation

@pytest.mark.parametrize("q,m,e", [(2, 2, 1), (2, 2, 2), (3, 2, 1), (2, 3, 2), (4, 1, 2)])
def test_indicator_is_orbit_indicator(q, m, e):
    ctx = ctx_for(q, m)
    for alpha in all_points(ctx, e)[:: max(1, ctx.size ** e // 12)]:
        f = interp_indicator(ctx, alpha)
        orb = set(galois_orbit(ctx, alpha))
        for pt in all_points(ctx, e):
            assert f.eval(list(pt)) == (1 if pt in orb else 0)
        assert all(c in ctx.elements(1) for c in f.terms.values())


def test_indicator_examples():
    assert [interp_indicator(F4, (T,)).eval([x]) for x in range(4)] == [0, 0, 1, 1]
    assert [interp_indicator(F4, (0,)).eval([x]) for x in range(4)] == [1, 0, 0, 0]


@pytest.mark.parametrize("q,m", [(2, 2), (3, 2), (2, 3), (2, 4)])
def test_interp_value_two_routes(q, m):
    ctx = ctx_for(q, m)
    rng = np.random.default_rng(q * m)
    for _ in range(6):
        alpha = tuple(int(x) for x in rng.integers(0, ctx.size, size=2))
        deg = max(ctx.degree(a) for a in alpha)
        if ctx.degree(alpha[0]) != deg and ctx.degree(alpha[1]) != deg:
            continue
        for b in ctx.elements(deg)[:5]:
            f = interp_value(ctx, alpha, b)
            g = value_via_generator(ctx, alpha, b)
            for pt in all_points(ctx, 2):
                assert f.eval(list(pt)) == g.eval(list(pt))
            orbit = galois_orbit(ctx, alpha)
            v = b
            for pt in orbit:
                assert f.eval(list(pt)) == v
                v = ctx.frobenius(v)


def test_interp_value_rejects_bad_value():
    with pytest.raises(ValueError):
        interp_value(F4, (1,), T)  # t not in F_2
    with pytest.raises(ValueError):
        interp_value(F4, (1, 1), 1, require_generator=True)


def test_realizer_brute_force():
    """Every map sending [alpha] to [beta] and the rest to 0 exists among small polynomials."""
    ctx = F4
    alpha, beta = (T,), (ctx.frobenius(T),)
    sig = realizer_sigma(ctx, alpha, beta)
    want = [0] * 4
    for k, pt in enumerate(galois_orbit(ctx, alpha)):
        want[pt[0]] = galois_orbit(ctx, beta)[k % len(galois_orbit(ctx, beta))][0]
    got = [sig.apply_point([x])[0] for x in range(4)]
    assert got == want
    # independent search over F_2 polynomials of degree <= 3
    hits = [cs for cs in itertools.product(range(2), repeat=4)
            if [MPoly(ctx, 1, {(k,): c for k, c in enumerate(cs)}).eval([x]) for x in range(4)] == want]
    assert len(hits) == 1
    assert sig.components[0] == MPoly(ctx, 1, {(k,): c for k, c in enumerate(hits[0])})


# -- movers

def test_coordinate_replace_example():
    r, u = (T, 1, 0), (T, 0, 0)
    w = coordinate_replace(F4, r, u, 0, 1, 2, T)
    assert len(w) == 1
    assert w.apply_point(list(r)) == [T, 1, T]
    assert w.apply_point(list(u)) == list(u)
    assert w.apply_point([F4.frobenius(T), 1, 0]) == [F4.frobenius(T), 1, F4.frobenius(T)]
    with pytest.raises(MoverPrecondition):
        coordinate_replace(F4, (1, 1, 0), u, 0, 1, 2, T)
    with pytest.raises(MoverPrecondition):
        coordinate_replace(F4, (T, 0, 0), u, 0, 1, 2, T)


def test_distinct_orbit_mover_cases():
    tr = distinct_orbit_mover(F4, (T, 0, 0), (T, 1, 0), (1, T, 0))
    assert tr.verified and tr.cases[0] == "1"
    tr = distinct_orbit_mover(F4, (T, 1, 1), (T, 0, 1), (T, 0, 0))
    assert tr.verified and tr.cases == ["4.1"]
    tr = distinct_orbit_mover(F4, (T, 0, 0), (T, 1, 0), (3, 1, 1))
    assert tr.verified and tr.cases[0] == "4.1"
    # r weakly conjugate to u is reduced first
    tr = distinct_orbit_mover(F4, (T, T, 0), (T, 1, 0), (3, T, 0))
    assert tr.verified and tr.cases[0].startswith("reduce")
    with pytest.raises(MoverPrecondition):
        distinct_orbit_mover(F4, (T, 0, 0), (3, 0, 0), (T, 1, 0))
    with pytest.raises(MoverPrecondition):
        distinct_orbit_mover(F4, (1, T, 0), (T, 0, 0), (T, 1, 0))


def _random_triple(table, d, rng):
    i, j, k = rng.choice(table.r(d), size=3, replace=False)
    return [tuple(table.rep_coords(d, int(x))) for x in (i, j, k)]


@pytest.mark.parametrize("q,m,n", [(2, 2, 3), (3, 2, 3), (2, 3, 3), (2, 2, 4)])
def test_two_transitive_random_triples(q, m, n):
    ctx = ctx_for(q, m)
    table = build_orbit_table(ctx, n)
    rng = np.random.default_rng(7 * q + m + n)
    count = 200 if (q, m, n) == (3, 2, 3) else 40
    for _ in range(count):
        r, s, u = _random_triple(table, m, rng)
        tr = two_transitive_mover(ctx, r, s, u)
        assert tr.verified
        assert tuple(tr.word.apply_point(list(r))) in set(galois_orbit(ctx, s))
        assert tuple(tr.word.apply_point(list(u))) in set(galois_orbit(ctx, u))


def test_mover_on_proper_substratum():
    ctx = ctx_for(2, 4)
    table = build_orbit_table(ctx, 3, 2)
    rng = np.random.default_rng(3)
    for _ in range(5):
        r, s, u = _random_triple(table, 2, rng)
        tr = two_transitive_mover(ctx, r, s, u, level=2)
        assert tr.verified and verify_mover(ctx, tr.word, r, s, u, 2)


def test_verify_mover_rejects_wrong_word():
    r, s, u = (T, 0, 0), (T, 1, 0), (3, 1, 1)
    assert not verify_mover(F4, TameWord(F4, 3), r, s, u, 2)


def test_two_point_mover():
    table = build_orbit_table(F4, 3)
    rng = np.random.default_rng(12)
    for _ in range(10):
        a, c, x = _random_triple(table, 2, rng)
        y = c
        w = two_point_mover(F4, a, c, x, y)
        assert tuple(w.apply_point(list(a))) in set(galois_orbit(F4, x))
        assert tuple(w.apply_point(list(c))) in set(galois_orbit(F4, y))
    a, c, x = _random_triple(table, 2, rng)
    w = two_point_mover(F4, a, c, c, x)  # c -> x while a -> c
    assert tuple(w.apply_point(list(a))) in set(galois_orbit(F4, c))
    assert tuple(w.apply_point(list(c))) in set(galois_orbit(F4, x))


# -- 3-cycle and twists

@pytest.mark.parametrize("q,m,n", [(2, 2, 3), (3, 2, 3), (2, 3, 3), (2, 2, 4)])
def test_three_cycle(q, m, n):
    ctx = ctx_for(q, m)
    rep = cycle_report(ctx, n)
    assert rep["cycle_type"] == {3: 1, 1: build_orbit_table(ctx, n).r(m) - 3}
    assert rep["moved"] == rep["expected"]
    assert rep["length"] == 8


def test_three_cycle_needs_three_variables():
    with pytest.raises(ValueError):
        three_cycle_word(F4, 2)


def _pointwise_twists(ctx, n, w, d):
    table = build_orbit_table(ctx, n)
    return wreath_decompose(induced_perm(w), table, d), table


@pytest.mark.parametrize("q,m,n,d", [(2, 2, 3, 2), (3, 2, 3, 2), (2, 3, 3, 3)])
def test_eta_twists_two_orbits(q, m, n, d):
    ctx = ctx_for(q, m)
    w = eta_word(ctx, n, d)
    W, table = _pointwise_twists(ctx, n, w, d)
    A, _, Fp = cycle_points(ctx, n, d)
    ia, iF = table.label(A)[1], table.label(Fp)[1]
    assert W.sigma.is_identity()
    assert W.twist[ia] == d - 1 and W.twist[iF] == 1
    assert sum(1 for a in W.twist if a) == 2
    p = induced_perm(w)
    moved = [int(i) for i in np.nonzero(p.perm.images != np.arange(len(p.perm.images)))[0]]
    orbit_pos = {table.position(x) for x in galois_orbit(ctx, A) + galois_orbit(ctx, Fp)}
    assert set(moved) <= orbit_pos


@pytest.mark.parametrize("i,j", [(0, 1), (3, 5), (5, 2)])
def test_zeta(i, j):
    w = zeta_word(F4, 3, 2, i, j)
    W, _ = _pointwise_twists(F4, 3, w, 2)
    expected = [0] * len(W.twist)
    expected[i], expected[j] = 1, 1  # -1 = +1 mod 2
    assert list(W.twist) == expected and W.sigma.is_identity()
    assert (induced_perm(w) * induced_perm(w)).perm.is_identity()


def test_zeta_odd_degree():
    ctx = ctx_for(2, 3)
    w = zeta_word(ctx, 3, 3, 0, 4)
    W, _ = _pointwise_twists(ctx, 3, w, 3)
    assert W.twist[0] == 2 and W.twist[4] == 1 and sum(W.twist) % 3 == 0
    p = induced_perm(w)
    assert (p * p * p).perm.is_identity()
    with pytest.raises(ValueError):
        zeta_word(ctx, 3, 3, 1, 1)
    with pytest.raises(ValueError):
        zeta_word(ctx, 3, 2, 0, 1)


# -- normalization

def _mat_mul(ctx, A, B):
    return [[ctx.add(ctx.mul(A[i][0], B[0][j]), ctx.mul(A[i][1], B[1][j])) for j in range(2)] for i in range(2)]


@pytest.mark.parametrize("q", [3, 4, 5, 7, 9])
def test_block_identities_matrix_oracle(q):
    ctx = ctx_for(q, 1) if q in (3, 5, 7) else ctx_for(int(q ** 0.5), 2)
    for f in range(1, ctx.size):
        M = [[1, 0], [0, 1]]
        for fac in block_identity(ctx, f):
            F = [[0, 1], [1, 0]] if fac[0] == "P" else [[1, fac[1]], [0, 1]]
            M = _mat_mul(ctx, M, F)
        assert M == [[ctx.inv(f), 0], [0, f]] == factors_matrix(ctx, block_identity(ctx, f))
    assert factors_matrix(ctx, sign_identity(ctx)) == [[1, 0], [0, ctx.neg(1)]]


def test_diagonal_as_word():
    ctx = ctx_for(5, 1)
    diag = [2, 3, 4, 3]  # det = 72 = 2 mod 5 -> rejected
    with pytest.raises(AffinePartError):
        diagonal_as_word(ctx, 4, diag)
    diag = [2, 3, 1, 1]  # det 1
    w = TameWord(ctx, 4, diagonal_as_word(ctx, 4, diag))
    for pt in ([1, 1, 1, 1], [0, 2, 3, 4]):
        assert w.apply_point(pt) == [ctx.mul(a, b) for a, b in zip(diag, pt)]
    w = TameWord(ctx, 3, diagonal_as_word(ctx, 3, [1, 1, 4]))
    assert w.apply_point([1, 2, 3]) == [1, 2, 2]


def _same_function(a, b):
    pts = level_domain(a.ctx, a.n)[1]
    return np.array_equal(a.apply(pts), b.apply(pts))


def test_normalize_examples():
    ctx = ctx_for(3, 1)
    X1 = MPoly.var(ctx, 3, 1)
    shear = Elementary(0, X1 * X1)
    w = TameWord(ctx, 3, [Swap(2), Scale(0, 2, ctx), shear, Scale(0, 2, ctx), Swap(2)])
    nw = normalize_tame_word(w)
    assert is_normalized(nw) and _same_function(w, nw)
    # translations conjugated out
    tr = Affine(((1, 0, 0), (0, 1, 0), (0, 0, 1)), (1, 0, 2), ctx)
    w = TameWord(ctx, 3, [tr.inverse(), shear, tr])
    nw = normalize_tame_word(w)
    assert is_normalized(nw) and _same_function(w, nw)
    with pytest.raises(AffinePartError):
        normalize_tame_word(TameWord(ctx, 3, [Scale(0, 2, ctx)]))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25)
def test_normalize_random_affine_conjugates(seed):
    rng = np.random.default_rng(seed)
    ctx = ctx_for(3, 1)
    n = 3
    while True:
        M = rng.integers(0, 3, size=(n, n))
        if round(np.linalg.det(M)) % 3:
            break
    # P moves slot 1 to slot 0, which the core does not read; the affine part stays trivial
    b = (0, int(rng.integers(0, 3)), 0)
    A = Affine(tuple(tuple(int(x) for x in row) for row in M), b, ctx)
    e = [0] + [int(x) for x in rng.integers(1, 3, size=n - 1)]
    core = Elementary(0, MPoly.monomial(ctx, n, e, 1) + MPoly.monomial(ctx, n, (0, 1, 1), 2))
    P = VarPerm((1, 2, 0))
    w = TameWord(ctx, n, [A.inverse(), P.inverse(), core, P, A])
    nw = normalize_tame_word(w)
    assert is_normalized(nw) and _same_function(w, nw)


# -- mimicking

def test_mimick_closed_galois_consistency():
    f9 = ctx_for(3, 2)
    alpha = next(x for x in range(9) if f9.mul(x, x) == f9.neg(1))
    f = MPoly(f9, 2, {(0, 1): alpha}, base_coeff=False)
    g = MPoly.from_literal(f9, 1, [[1, [2]], [1, [0]]])  # Z^2 + 1
    G = mimick_closed(f9, 2, {alpha: TameWord(f9, 2, [Elementary(0, f)])}, g)
    for c in range(9):
        got = [G.specialize(c).apply_point([x, y]) for x in range(9) for y in range(9)]
        if c in (alpha, f9.frobenius(alpha)):
            want = [[f9.add(x, f9.mul(c, y)), y] for x in range(9) for y in range(9)]
        else:
            want = [[x, y] for x in range(9) for y in range(9)]
        assert got == want


def test_mimick_closed_errors():
    f9 = ctx_for(3, 2)
    with pytest.raises(MimickError):
        mimick_closed(ctx_for(3, 1), 2, {}, MPoly.from_literal(ctx_for(3, 1), 1, [[1, [2]], [1, [0]]]))
    w = TameWord(f9, 2, [Swap(1)])
    with pytest.raises(MimickError):
        mimick_closed(f9, 2, {0: w}, MPoly.monomial(f9, 1, (1,)))


@pytest.mark.parametrize("q,m", [(3, 1), (3, 2), (2, 2), (5, 1)])
def test_mimick_open_agrees_off_zero(q, m):
    ctx = ctx_for(q, m)
    Nz = nagata_factorization(ctx)
    Gt = mimick_open(Nz)
    at = _nagata_slice(ctx)
    for c in range(1, ctx.size):
        assert specialized_agrees(Gt, at, c)
        assert specialized_agrees(Nz, at, c)


@pytest.mark.parametrize("q,m", [(3, 1), (3, 2), (2, 2), (2, 3), (5, 1)])
def test_nagata_level_word(q, m):
    w = nagata_level_word(q, m)
    ctx = ctx_for(q, m)
    assert induced_perm(w, m, check=False) == induced_perm(nagata(ctx), m, check=False)
    assert all(isinstance(g, (Elementary, Swap, VarPerm)) for g in w.gens)
