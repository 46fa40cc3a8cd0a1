"""Sparse multivariate polynomials with coefficients in the ambient field."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .ffield import FieldCtx


class PoleError(ZeroDivisionError):
    pass


def grlex_key(exp: tuple) -> tuple:
    return (sum(exp), exp)


class MPoly:
    """Immutable sparse polynomial: {exponent tuple: coefficient code}.

    ``base_coeff`` asserts on construction that every coefficient lies in F_q.
    Polynomials with top-field coefficients exist only as intermediates.
    """

    __slots__ = ("ctx", "nvars", "terms", "base_coeff")

    def __init__(self, ctx: FieldCtx, nvars: int, terms=None, base_coeff: bool = True):
        self.ctx = ctx
        self.nvars = nvars
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise ValueError(f"exponent {e} has wrong arity for {nvars} variables")
            if min(e, default=0) < 0:
                raise ValueError("negative exponent")
            if c:
                clean[e] = int(c)
        self.terms = dict(sorted(clean.items(), key=lambda kv: grlex_key(kv[0]), reverse=True))
        self.base_coeff = base_coeff
        if base_coeff:
            for c in self.terms.values():
                if ctx.degree(c) != 1:
                    raise ValueError(f"coefficient {c} is not in the base field F_{ctx.q}")

    # constructors
    @classmethod
    def zero(cls, ctx, nvars):
        return cls(ctx, nvars, {})

    @classmethod
    def const(cls, ctx, nvars, c: int, base_coeff: bool = True):
        return cls(ctx, nvars, {(0,) * nvars: c}, base_coeff)

    @classmethod
    def var(cls, ctx, nvars, i: int):
        e = [0] * nvars
        e[i] = 1
        return cls(ctx, nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, ctx, nvars, exp, c: int = 1, base_coeff: bool = True):
        return cls(ctx, nvars, {tuple(exp): c}, base_coeff)

    @classmethod
    def from_literal(cls, ctx, nvars, lit, base_coeff: bool = True):
        terms: dict = {}
        for c, e in lit:
            e = tuple(e)
            if len(e) != nvars:
                raise ValueError(f"term {e} does not have {nvars} exponents")
            terms[e] = ctx.add(terms.get(e, 0), int(c))
        return cls(ctx, nvars, terms, base_coeff)

    def to_literal(self) -> list:
        return [[c, list(e)] for e, c in self.terms.items()]

    # basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def involves(self, i: int) -> bool:
        return any(e[i] for e in self.terms)

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.nvars, 0)

    def __eq__(self, other):
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.ctx is other.ctx and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, tuple(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "MPoly(0)"
        parts = []
        for e, c in self.terms.items():
            mono = "*".join(f"x{i}^{k}" if k > 1 else f"x{i}" for i, k in enumerate(e) if k)
            parts.append(f"{c}*{mono}" if mono else str(c))
        return "MPoly(" + " + ".join(parts) + ")"

    # arithmetic
    def _new(self, terms, base=None):
        return MPoly(self.ctx, self.nvars, terms, self.base_coeff if base is None else base)

    def _check(self, other: "MPoly"):
        if other.ctx is not self.ctx or other.nvars != self.nvars:
            raise ValueError("polynomials over different rings")

    def __add__(self, other: "MPoly") -> "MPoly":
        self._check(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = self.ctx.add(t.get(e, 0), c)
        return self._new(t, self.base_coeff and other.base_coeff)

    def __neg__(self) -> "MPoly":
        return self._new({e: self.ctx.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other: "MPoly") -> "MPoly":
        return self + (-other)

    def __mul__(self, other) -> "MPoly":
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        t: dict = {}
        ctx = self.ctx
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = ctx.add(t.get(e, 0), ctx.mul(c1, c2))
        return self._new(t, self.base_coeff and other.base_coeff)

    def scale(self, c: int, base_coeff: bool | None = None) -> "MPoly":
        base = (self.base_coeff and self.ctx.degree(c) == 1) if base_coeff is None else base_coeff
        return self._new({e: self.ctx.mul(v, c) for e, v in self.terms.items()}, base)

    def __pow__(self, k: int) -> "MPoly":
        result = MPoly.const(self.ctx, self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def with_base_flag(self) -> "MPoly":
        """Re-assert that all coefficients lie in F_q (raises otherwise)."""
        return MPoly(self.ctx, self.nvars, self.terms, True)

    # evaluation
    def eval(self, point: Sequence[int]) -> int:
        if len(point) != self.nvars:
            raise ValueError(f"point of length {len(point)} for {self.nvars} variables")
        ctx = self.ctx
        acc = 0
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = ctx.mul(v, ctx.pow(x, k))
            acc = ctx.add(acc, v)
        return acc

    def veval(self, pts: np.ndarray) -> np.ndarray:
        """Evaluate at many points; ``pts`` has shape (nvars, N) of codes."""
        ctx = self.ctx
        pts = np.asarray(pts)
        if pts.shape[0] != self.nvars:
            raise ValueError("point array arity mismatch")
        N = pts.shape[1]
        if not self.terms:
            return np.zeros(N, dtype=np.int64)
        log = ctx._table("log")
        exp = ctx._tables["exp"]
        order = ctx.size - 1
        logs = [log[pts[j]] for j in range(self.nvars)]
        zeros = [pts[j] == 0 for j in range(self.nvars)]
        if ctx.p == 2:
            acc = np.zeros(N, dtype=np.int64)
        else:
            acc = np.zeros((N, ctx.k), dtype=np.int64)
            digits = ctx._tables["digits"]
        for e, c in self.terms.items():
            L = np.full(N, int(log[c]), dtype=np.int64)
            zm = np.zeros(N, dtype=bool)
            for j, k in enumerate(e):
                if k:
                    L += k * logs[j]
                    zm |= zeros[j]
            val = np.where(zm, 0, exp[L % order])
            if ctx.p == 2:
                acc ^= val
            else:
                acc += digits[val]
        if ctx.p == 2:
            return acc
        return (acc % ctx.p) @ ctx._tables["weights"]

    # symbolic operations
    def substitute(self, maps: Sequence["MPoly"]) -> "MPoly":
        if len(maps) != self.nvars:
            raise ValueError("substitution arity mismatch")
        if not maps:
            return self
        target = maps[0]
        cache: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = maps[i] ** k
            return cache[key]

        base = self.base_coeff and all(m.base_coeff for m in maps)
        acc = MPoly(self.ctx, target.nvars, {}, base)
        for e, c in self.terms.items():
            term = MPoly.const(self.ctx, target.nvars, c, base_coeff=False)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            acc = acc + term
        return MPoly(self.ctx, target.nvars, acc.terms, base)

    def reduce_as_function(self, Q: int) -> "MPoly":
        """Lower exponents using a^Q = a; the induced function on F_Q^n is unchanged."""
        t: dict = {}
        for e, c in self.terms.items():
            r = tuple(((k - 1) % (Q - 1)) + 1 if k >= Q else k for k in e)
            t[r] = self.ctx.add(t.get(r, 0), c)
        return self._new(t)

    def extend_vars(self, nvars: int, positions: Sequence[int]) -> "MPoly":
        """Rename variable i to variable positions[i] in a ring with ``nvars`` variables."""
        t = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for i, k in enumerate(e):
                ne[positions[i]] += k
            t[tuple(ne)] = c
        return MPoly(self.ctx, nvars, t, self.base_coeff)


def poly_sum(polys: Iterable[MPoly], ctx, nvars) -> MPoly:
    acc = MPoly.zero(ctx, nvars)
    for p in polys:
        acc = acc + p
    return acc


@dataclass(frozen=True)
class LocalizedPoly:
    """numerator / g(Z)^denom_power, with Z the last variable of the numerator.

    ``g`` is a univariate polynomial in Z.  No cancellation is ever attempted.
    """

    numerator: MPoly
    denom_power: int
    g: MPoly

    def __post_init__(self):
        if self.g.nvars != 1:
            raise ValueError("g must be univariate in Z")
        if self.denom_power < 0:
            raise ValueError("negative denominator power")

    @property
    def nvars(self) -> int:
        return self.numerator.nvars

    @property
    def ctx(self):
        return self.numerator.ctx

    def eval(self, point: Sequence[int]) -> int:
        """Evaluate with Z = point[-1]."""
        ctx = self.ctx
        num = self.numerator.eval(point)
        if self.denom_power == 0:
            return num
        gc = self.g.eval([point[-1]])
        if gc == 0:
            raise PoleError(f"g vanishes at Z={point[-1]}")
        return ctx.mul(num, ctx.pow(ctx.inv(gc), self.denom_power))

    def veval(self, pts: np.ndarray) -> np.ndarray:
        ctx = self.ctx
        num = self.numerator.veval(pts)
        if self.denom_power == 0:
            return num
        gz = self.g.veval(np.asarray(pts)[-1:])
        if np.any(gz == 0):
            raise PoleError("g vanishes at some Z value")
        return ctx.vmul(num, ctx.vpow(gz, (ctx.size - 1 - 1) * self.denom_power))

    def clear_denominator(self, Q: int) -> MPoly:
        """Replace g^{-t} by g^{t(Q-2)}; agrees with self wherever g(Z) != 0 on F_Q."""
        if self.denom_power == 0:
            return self.numerator
        n = self.nvars
        gz = self.g.extend_vars(n, [n - 1])
        return self.numerator * gz ** (self.denom_power * (Q - 2))


def localized_eval(f: LocalizedPoly, c: int, point: Sequence[int]) -> int:
    return f.eval(list(point) + [c])


def as_localized(f: MPoly, g: MPoly | None = None) -> LocalizedPoly:
    if g is None:
        g = MPoly.const(f.ctx, 1, 1)
    return LocalizedPoly(f, 0, g)
