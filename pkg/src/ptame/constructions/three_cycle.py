"""The commutator 3-cycle on orbits and the Frobenius-twist word built from it."""
from __future__ import annotations

from ..ffield import FieldCtx, ctx_for, find_generator
from ..orbits import build_orbit_table, orbit_action
from ..polymap import Elementary, Swap, TameWord, induced_perm
from .interp import interp_indicator, interp_value
from .movers import two_point_mover


def _generator(ctx: FieldCtx, d: int) -> int:
    """Smallest-code element generating F_{q^d}^* (hence F_{q^d} over F_q)."""
    return find_generator(ctx, d)


def cycle_points(ctx: FieldCtx, n: int, d: int | None = None) -> tuple[tuple, tuple, tuple]:
    """D = (-1, 0, ..., t), E = (0, -1, 0, ..., t), F = (0, ..., 0, t)."""
    t = _generator(ctx, ctx.m if d is None else d)
    m1 = ctx.neg(1)
    D = (m1,) + (0,) * (n - 2) + (t,)
    E = (0, m1) + (0,) * (n - 3) + (t,)
    F = (0,) * (n - 1) + (t,)
    return D, E, F


def three_cycle_word(ctx: FieldCtx, n: int, d: int | None = None) -> TameWord:
    """s^-1 d^-1 s d with s: X_0 += [indicator of (0,..,0,t)](X_1..), d = swap s swap."""
    if n < 3:
        raise ValueError("the 3-cycle needs n >= 3")
    t = _generator(ctx, ctx.m if d is None else d)
    a = (0,) * (n - 2) + (t,)
    f = interp_indicator(ctx, a).extend_vars(n, range(1, n))
    s = TameWord(ctx, n, [Elementary(0, f)])
    sw = TameWord(ctx, n, [Swap(1)])
    dd = sw * s * sw
    return s.inverse() * dd.inverse() * s * dd


def three_cycle(q: int, m: int, n: int) -> TameWord:
    return three_cycle_word(ctx_for(q, m), n)


def _twist_sandwich(ctx: FieldCtx, n: int, d: int) -> TameWord:
    """Word sending A = (-1, 0, ..., t) to phi(A) and fixing E, F pointwise.

    Slot 1 carries a copy of t while slot n-1 is advanced by phi(t) - t.
    """
    t = _generator(ctx, d)
    m1 = ctx.neg(1)
    phit = ctx.frobenius(t)
    rest = list(range(2, n - 1))
    zeros = (0,) * len(rest)

    def elem(target, key_slots, key, value):
        f = interp_value(ctx, key, value).extend_vars(n, key_slots)
        return Elementary(target, f)

    slots_a = [0] + rest + [n - 1]
    slots_b = [0, 1] + rest
    s_a = elem(1, slots_a, (m1,) + zeros + (t,), t)
    s_b = elem(n - 1, slots_b, (m1, t) + zeros, ctx.sub(phit, t))
    s_c = elem(1, slots_a, (m1,) + zeros + (phit,), ctx.neg(t))
    return TameWord(ctx, n, [s_c, s_b, s_a])


def eta_word(ctx: FieldCtx, n: int, d: int) -> TameWord:
    """w~^-1 w: twists [A] by phi^-1, [F] by phi, fixes every other point."""
    w = three_cycle_word(ctx, n, d)
    st = _twist_sandwich(ctx, n, d)
    wt = st.inverse() * w * st
    return wt.inverse() * w


def zeta_word(ctx: FieldCtx, n: int, d: int, i: int, j: int) -> TameWord:
    """Twist orbit i of the size-d stratum by phi^-1 and orbit j by phi."""
    if d < 2 or ctx.m % d:
        raise ValueError("d must be a divisor of m with d >= 2")
    if i == j:
        raise ValueError("orbit ids must differ")
    table = build_orbit_table(ctx, n, ctx.m)
    ai, aj = (tuple(table.rep_coords(d, k)) for k in (i, j))
    A, _, C = cycle_points(ctx, n, d)
    xi = two_point_mover(ctx, A, C, ai, aj, d)
    return xi * eta_word(ctx, n, d) * xi.inverse()


def cycle_report(ctx: FieldCtx, n: int) -> dict:
    w = three_cycle_word(ctx, n)
    table = build_orbit_table(ctx, n)
    act = orbit_action(induced_perm(w), table)
    labels = [table.label(p)[1] for p in cycle_points(ctx, n)]
    return {"cycle_type": act.cycle_type(), "moved": sorted(act.support()), "expected": sorted(labels),
            "sign": act.sign(), "length": len(w)}
