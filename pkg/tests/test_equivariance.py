import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ptame.acceptance import random_word
from ptame.equivariance import (BudgetExceeded, WreathElt, brute_force_mma_count,
                                brute_force_stratum_group, character, character_image_size,
                                character_moduli, check_budget, direct_parity, generator_images,
                                index_bound, index_report, mma_order, parity_generator,
                                predicted_parity, profinite_check, shear_family,
                                stabilization_index, tame_image_order, wreath_decompose,
                                wreath_recompose)
from ptame.ffield import ctx_for
from ptame.orbits import build_orbit_table, orbit_action
from ptame.permgroup import Perm, alt_sym_verdict
from ptame.polymap import LevelPerm, TameWord, induced_perm, is_equivariant, nagata, restriction

F4 = ctx_for(2, 2)


# -- wreath decomposition

def test_wreath_identity_and_frobenius():
    t = build_orbit_table(F4, 2)
    ident = wreath_decompose(LevelPerm.identity(F4, 2), t, 2)
    assert ident.twist == (0,) * 6 and ident.sigma.is_identity()
    fr = wreath_decompose(LevelPerm.frobenius(F4, 2), t, 2)
    assert fr.twist == (1,) * 6 and fr.sigma.is_identity()


def _recompose_oracle(w: WreathElt, table, d):
    """rep_i -> phi^{a_i}(rep_sigma(i)), extended by equivariance, as coordinate tuples."""
    ctx = table.ctx
    out = {}
    for i, rep in enumerate(table.strata[d]):
        src = [int(x) for x in table.coords[:, rep]]
        dst = table.rep_coords(d, int(w.sigma.images[i]))
        for _ in range(w.twist[i]):
            dst = [ctx.frobenius(x) for x in dst]
        for _ in range(d):
            out[tuple(src)] = tuple(dst)
            src = [ctx.frobenius(x) for x in src]
            dst = [ctx.frobenius(x) for x in dst]
    return out


@pytest.mark.parametrize("q,m,n,d", [(2, 2, 2, 2), (2, 3, 2, 3), (3, 2, 2, 2), (2, 4, 2, 4), (2, 4, 2, 2)])
def test_wreath_recomposition_reproduces_points(q, m, n, d):
    ctx = ctx_for(q, m)
    t = build_orbit_table(ctx, n)
    rng = np.random.default_rng(q + 10 * m + d)
    for _ in range(4):
        p = induced_perm(random_word(ctx, n, rng, 5))
        w = wreath_decompose(p, t, d)
        oracle = _recompose_oracle(w, t, d)
        for src, dst in oracle.items():
            assert tuple(p.image_of_point(src)) == dst
        rec = wreath_recompose(w, t)
        for pos, img in rec.items():
            assert int(p.perm.images[pos]) == img


@given(st.integers(0, 2**32 - 1))
def test_wreath_multiplicative(seed):
    rng = np.random.default_rng(seed)
    t = build_orbit_table(F4, 2)
    a = induced_perm(random_word(F4, 2, rng, 4))
    b = induced_perm(random_word(F4, 2, rng, 4))
    assert wreath_decompose(a * b, t, 2) == wreath_decompose(a, t, 2) * wreath_decompose(b, t, 2)


def test_wreath_injective_on_small_stratum():
    ctx = ctx_for(3, 2)
    t = build_orbit_table(ctx, 1)  # r_2 = 3
    pts = t.stratum_positions(2)
    maps = brute_force_stratum_group(t, 2)
    assert len(maps) == 2**3 * math.factorial(3)
    keys = set()
    for img in maps:
        full = np.arange(len(t.size))
        full[pts] = pts[img]
        keys.add(wreath_decompose(LevelPerm(ctx, 1, 2, Perm(full)), t, 2).key())
    assert len(keys) == len(maps)


# -- MMA order

def test_mma_examples():
    assert mma_order(2, 2, 1) == 4 == brute_force_mma_count(F4, 1)
    assert mma_order(3, 1, 2) == math.factorial(9)
    assert mma_order(2, 2, 2) == 24 * 46080


def test_mma_brute_force_other_fields():
    # F_8: strata d=1 (2 points) and d=3 (2 orbits)
    assert mma_order(2, 3, 1) == 2 * 3**2 * 2
    with pytest.raises(BudgetExceeded):
        brute_force_mma_count(ctx_for(2, 3), 1)
    assert brute_force_mma_count(ctx_for(3, 1), 1) == 6 == mma_order(3, 1, 1)
    assert brute_force_mma_count(ctx_for(2, 1), 2) == 24 == mma_order(2, 1, 2)


def test_stratum_group_formula_bruteforce():
    t = build_orbit_table(ctx_for(3, 2), 1)
    assert len(brute_force_stratum_group(t, 2)) == 2**3 * 6


# -- tame image order and index

def test_maurer_small():
    order, B = tame_image_order(2, 1, 2)
    assert order == 24 and alt_sym_verdict(B) == "Sym"
    order, B = tame_image_order(3, 1, 2)
    assert order == math.factorial(9) and B.certified


def test_budget():
    with pytest.raises(BudgetExceeded):
        check_budget(5, 2, 3)


@pytest.fixture(scope="module")
def report_223():
    return index_report(2, 2, 3)


def test_index_report_223(report_223):
    R = report_223
    assert R.certified and not R.findings
    assert R.bound == 8 == index_bound(2)
    assert R.mma_order % R.tame_image_order == 0
    assert R.index == R.mma_order // R.tame_image_order == 4
    assert math.prod(f.Q for f in R.factors.values()) == R.tame_image_order
    f2 = R.factors[2]
    assert f2.R * 2 == math.factorial(28)  # Alt(28)
    assert f2.N * 2 == 2**28 and f2.twist_sums_zero


def test_index_prime_field():
    assert index_report(3, 1, 2).index == 1
    assert index_report(4, 1, 2).index == 2


def test_index_bound_values():
    assert index_bound(1) == 2
    assert index_bound(2) == 8
    assert index_bound(6) == 2**4 * 1 * 2 * 3 * 6


def test_index_lower_bound_from_characters_323():
    """Every canonical generator has character (0,0,0) or (1,1,1) at (3,2,3).

    Characters are homomorphisms, so the image of the group has size 2 in a
    target of size 8 and the index is at least 4, whatever the group order.
    """
    ctx = ctx_for(3, 2)
    t = build_orbit_table(ctx, 3)
    chars = {character(g, t) for g in generator_images(ctx, 3)}
    assert chars == {(0, 0, 0), (1, 1, 1)}
    mods = character_moduli(t)
    assert math.prod(mods) // character_image_size(list(chars), mods) == 4


# -- parity

def test_predicted_parity_examples():
    assert predicted_parity("swap", 3, 2, 3).parity == "odd"
    assert predicted_parity("swap", 5, 2, 3).parity == "even"
    for q, m in [(2, 2), (3, 3), (7, 2), (4, 3)]:
        assert predicted_parity("shear", q, m, 3).parity == "even"
    with pytest.raises(ValueError):
        predicted_parity("swap", 2, 4, 3)
    with pytest.raises(ValueError):
        predicted_parity("swap", 2, 2, 2)


@pytest.mark.parametrize("q,m", [(2, 2), (3, 2), (4, 2), (2, 3), (5, 2), (7, 2), (3, 3)])
def test_parity_prediction_matches_direct(q, m):
    ctx = ctx_for(q, m)
    t = build_orbit_table(ctx, 3)
    for kind in ("swap", "scale", "shear"):
        assert predicted_parity(kind, q, m, 3).parity == direct_parity(parity_generator(kind, ctx, 3), t)


def test_finding_scale_parity_q5():
    """q = 5, m = 2: the scaling generator acts oddly on orbits, though q = 5 mod 8."""
    ctx = ctx_for(5, 2)
    t = build_orbit_table(ctx, 3)
    pred = predicted_parity("scale", 5, 2, 3)
    assert direct_parity(parity_generator("scale", ctx, 3), t) == "odd" == pred.parity
    assert pred.outside_proof_cases and pred.stated_parity == "even"


def test_finding_shear_parity_char2():
    """X_0 += X_1 X_2^2 is an odd permutation of the orbits at (2, 3, 3)."""
    ctx = ctx_for(2, 3)
    t = build_orbit_table(ctx, 3)
    parities = [direct_parity(w, t) for w in shear_family(ctx, 3)]
    assert parities == ["even", "odd", "even"]
    ctx = ctx_for(2, 2)
    t = build_orbit_table(ctx, 3)
    assert [direct_parity(w, t) for w in shear_family(ctx, 3)] == ["even"] * 3


def _f8_mul(a, b):
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & 8:
            a ^= 0b1011
    return r


def test_shear_parity_char2_standalone_oracle():
    """Bit-vector F_8 = F_2[x]/(x^3+x+1), no package code: sign of X_0 += X_1 X_2^2 on size-3 orbits."""
    pts = list(itertools.product(range(8), repeat=3))
    rep = {}
    for p in pts:
        if p in rep:
            continue
        orbit, c = [p], tuple(_f8_mul(a, a) for a in p)
        while c != p:
            orbit.append(c)
            c = tuple(_f8_mul(a, a) for a in c)
        for x in orbit:
            rep[x] = (min(orbit), len(orbit))
    reps = sorted({r for r, size in rep.values() if size == 3})
    img = {o: rep[(o[0] ^ _f8_mul(o[1], _f8_mul(o[2], o[2])), o[1], o[2])][0] for o in reps}
    seen, cycles = set(), 0
    for o in reps:
        if o not in seen:
            cycles += 1
            while o not in seen:
                seen.add(o)
                o = img[o]
    assert len(reps) == 168 and (len(reps) - cycles) % 2 == 1


# -- restriction and profinite checks

def test_restriction_examples():
    rng = np.random.default_rng(1)
    ctx = ctx_for(2, 4)
    w = random_word(ctx, 2, rng)
    p = induced_perm(w)
    assert restriction(p, 4) == p
    assert restriction(p, 2) == induced_perm(w, 2)
    assert restriction(LevelPerm.identity(ctx, 2), 1).perm.is_identity()


def test_profinite_examples():
    rng = np.random.default_rng(8)
    ctx = ctx_for(2, 2)
    for _ in range(5):
        assert profinite_check(random_word(ctx, 2, rng), [1, 2]).compatible
    f9 = ctx_for(3, 2)
    N = nagata(f9)
    p2, p1 = induced_perm(N, 2), induced_perm(N, 1)
    assert restriction(p2, 1) == p1
    w = random_word(ctx, 2, rng)
    assert stabilization_index([w, w, w]) == 1
    other = random_word(ctx, 2, rng)
    assert stabilization_index([other, w, w]) in (1, 2)


def test_profinite_rejects_bad_level():
    with pytest.raises(ValueError):
        profinite_check(TameWord(F4, 2), [3])


def test_induced_perms_are_equivariant():
    rng = np.random.default_rng(9)
    for g in generator_images(ctx_for(2, 2), 2):
        assert is_equivariant(g)
    assert is_equivariant(induced_perm(random_word(ctx_for(3, 2), 2, rng)))


def test_uncertified_random_run_falls_back_to_exact_order():
    """At (2,2,2) the character bound is not attained; the order must still be exact."""
    from ptame.permgroup import closure
    gens = [g.perm for g in generator_images(F4, 2)]
    order, B = tame_image_order(2, 2, 2)
    assert B.certified and order == len(closure(gens, 16)) == 18432


def test_small_n_bound_exceedance_is_a_note():
    R = index_report(2, 2, 2)
    assert R.index == 60 and not R.findings
    assert any("exceeds the bound 8" in s for s in R.notes)
