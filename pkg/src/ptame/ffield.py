"""Finite field towers F_p <= F_q <= F_{q^m} inside one ambient field.

Every field element is identified with its integer *code*: the polynomial-basis
coordinates (c_0, ..., c_{k-1}) read as base-p digits, k = l*m.  The whole
package passes codes around; :class:`Fe` is a thin wrapper for readable scalar
arithmetic.

Small fields (at most ``TABLE_LIMIT`` elements) additionally carry log/antilog,
Frobenius and degree tables so that numpy arrays of codes can be combined
elementwise.  The table-free polynomial arithmetic is the reference; the tables
are derived from it and never change observable results.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

SIZE_CAP = 2**31
TABLE_LIMIT = 2**16


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def mobius(n: int) -> int:
    if n == 1:
        return 1
    res = 1
    for f in prime_factors(n):
        if (n // f) % f == 0:
            return 0
        res = -res
    return res


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, l) with q = p**l, or None if q is not a prime power."""
    if q < 2:
        return None
    fs = prime_factors(q)
    if len(fs) != 1:
        return None
    p = fs[0]
    l = round(math.log(q, p))
    while p**l < q:
        l += 1
    while p**l > q:
        l -= 1
    return (p, l) if p**l == q else None


# -- polynomial arithmetic over F_p, coefficient lists low -> high ----------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_rem(a: list[int], b: list[int], p: int) -> list[int]:
    a = _trim(list(a))
    db = len(b) - 1
    inv_lead = pow(b[-1], p - 2, p) if p > 2 else 1
    while len(a) - 1 >= db and a:
        c = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - db
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        _trim(a)
    return a


def _monic_polys(p: int, deg: int):
    """Monic polynomials of the given degree, constant term varying fastest."""
    for code in range(p**deg):
        coeffs = []
        for _ in range(deg):
            coeffs.append(code % p)
            code //= p
        yield coeffs + [1]


def is_irreducible(poly: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for g in _monic_polys(p, d):
            if not _poly_rem(poly, g, p):
                return False
    return True


def first_irreducible(p: int, deg: int) -> tuple[int, ...]:
    for f in _monic_polys(p, deg):
        if is_irreducible(f, p):
            return tuple(f)
    raise FieldError(f"no irreducible polynomial of degree {deg} over F_{p}")  # pragma: no cover


# -- the field context ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FieldCtx:
    """The ambient field F_{q^m}, q = p^l, with its subfield structure.

    Use :func:`ctx_create`; instances are cached and shared.
    """

    p: int
    l: int
    m: int
    defining_poly: tuple[int, ...]
    subfield_gens: dict = field(default_factory=dict, repr=False)
    _tables: dict = field(default_factory=dict, repr=False)

    # basic sizes
    @property
    def k(self) -> int:
        return self.l * self.m

    @property
    def q(self) -> int:
        return self.p**self.l

    @property
    def size(self) -> int:
        return self.p**self.k

    def level_size(self, e: int) -> int:
        return self.q**e

    def __repr__(self):
        return f"FieldCtx(p={self.p}, l={self.l}, m={self.m})"

    # -- code <-> coefficient vectors
    def decode(self, code: int) -> list[int]:
        out = []
        for _ in range(self.k):
            out.append(code % self.p)
            code //= self.p
        return out

    def encode(self, coeffs) -> int:
        code = 0
        for c in reversed(list(coeffs)):
            code = code * self.p + (int(c) % self.p)
        return code

    # -- table-free reference arithmetic
    def _add_ref(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        return self.encode(x + y for x, y in zip(self.decode(a), self.decode(b)))

    def _mul_ref(self, a: int, b: int) -> int:
        p, k = self.p, self.k
        da, db = self.decode(a), self.decode(b)
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    if y:
                        prod[i + j] = (prod[i + j] + x * y) % p
        rem = _poly_rem(prod, list(self.defining_poly), p)
        return self.encode(rem + [0] * (k - len(rem)))

    def _pow_ref(self, a: int, e: int) -> int:
        result, base = 1, a
        if e < 0:
            raise FieldError("negative exponent in reference power")
        while e:
            if e & 1:
                result = self._mul_ref(result, base)
            base = self._mul_ref(base, base)
            e >>= 1
        return result

    # -- tables
    @property
    def has_tables(self) -> bool:
        return self.size <= TABLE_LIMIT

    def _table(self, name: str):
        t = self._tables.get(name)
        if t is None:
            if not self.has_tables:
                raise FieldError(f"field of size {self.size} has no lookup tables")
            self._build_tables()
            t = self._tables[name]
        return t

    def _build_tables(self):
        n = self.size - 1
        g = self._primitive_ref()
        exp = np.zeros(2 * n + 1, dtype=np.int64)
        x = 1
        for i in range(n):
            exp[i] = x
            x = self._mul_ref(x, g)
        exp[n:2 * n] = exp[:n]
        exp[2 * n] = exp[0]
        log = np.full(self.size, -1, dtype=np.int64)
        log[exp[:n]] = np.arange(n)
        digits = np.zeros((self.size, self.k), dtype=np.int64)
        codes = np.arange(self.size)
        for i in range(self.k):
            digits[:, i] = (codes // self.p**i) % self.p
        weights = self.p ** np.arange(self.k, dtype=np.int64)
        neg = ((-digits) % self.p) @ weights
        frob = np.zeros(self.size, dtype=np.int64)
        nz = codes != 0
        frob[nz] = exp[(log[nz] * self.q) % n]
        # degree over F_q: a = g^L lies in F_{q^e} iff (size-1)/(q^e-1) divides L
        deg = np.full(self.size, self.m, dtype=np.int64)
        for e in reversed(divisors(self.m)):
            deg[(log >= 0) & (log % (n // (self.q**e - 1)) == 0)] = e
        deg[0] = 1
        self._tables.update(exp=exp, log=log, digits=digits, weights=weights,
                            neg=neg, frob=frob, deg=deg, gen=g)

    # -- scalar arithmetic on codes
    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.has_tables:
            d = self._table("digits")
            return int(((d[a] + d[b]) % self.p) @ self._tables["weights"])
        return self._add_ref(a, b)

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.has_tables:
            return int(self._table("neg")[a])
        return self.encode(-c for c in self.decode(a))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.has_tables:
            log, exp = self._table("log"), self._tables["exp"]
            return int(exp[log[a] + log[b]])
        return self._mul_ref(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in finite field")
        if self.has_tables:
            log, exp = self._table("log"), self._tables["exp"]
            return int(exp[(-log[a]) % (self.size - 1)])
        return self._pow_ref(a, self.size - 2)

    def pow(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return 0
        if self.has_tables:
            log, exp = self._table("log"), self._tables["exp"]
            return int(exp[(int(log[a]) * e) % (self.size - 1)])
        if e < 0:
            return self._pow_ref(self.inv(a), -e)
        return self._pow_ref(a, e)

    def frobenius(self, a: int, times: int = 1) -> int:
        """a ** (q ** times); negative ``times`` apply the inverse automorphism."""
        times %= self.m
        if self.has_tables and times == 1:
            return int(self._table("frob")[a])
        return self.pow(a, self.q**times) if a else 0

    def degree(self, a: int) -> int:
        """[F_q(a) : F_q]."""
        if self.has_tables:
            return int(self._table("deg")[a])
        for e in divisors(self.m):
            if self._pow_ref(a, self.q**e) == a:
                return e
        raise FieldError("element outside the ambient field")  # pragma: no cover

    def in_base(self, a: int) -> bool:
        return self.degree(a) == 1

    def from_int(self, n: int) -> int:
        """Image of the integer n in the prime field."""
        return n % self.p

    # -- vectorized arithmetic on numpy code arrays (table fields only)
    def vadd(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        if self.p == 2:
            return a ^ b
        d = self._table("digits")
        return ((d[a] + d[b]) % self.p) @ self._tables["weights"]

    def vneg(self, a):
        a = np.asarray(a)
        return a if self.p == 2 else self._table("neg")[a]

    def vsub(self, a, b):
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        log, exp = self._table("log"), self._tables["exp"]
        out = exp[log[a] + log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def vscale(self, c: int, a):
        """Multiply every code in ``a`` by the scalar code ``c``."""
        a = np.asarray(a)
        if c == 0:
            return np.zeros_like(a)
        if c == 1:
            return a
        log, exp = self._table("log"), self._tables["exp"]
        return np.where(a == 0, 0, exp[log[a] + log[c]])

    def vpow(self, a, e: int):
        a = np.asarray(a)
        if e == 0:
            return np.ones_like(a)
        log, exp = self._table("log"), self._tables["exp"]
        out = exp[(log[a] * e) % (self.size - 1)]
        return np.where(a == 0, 0, out)

    def vfrob(self, a, times: int = 1):
        a = np.asarray(a)
        f = self._table("frob")
        for _ in range(times % self.m):
            a = f[a]
        return a

    def vdegree(self, a):
        return self._table("deg")[np.asarray(a)]

    # -- distinguished elements
    def _element_order_ref(self, a: int) -> int:
        n = self.size - 1
        order = n
        for r in prime_factors(n):
            while order % r == 0 and self._pow_ref(a, order // r) == 1:
                order //= r
        return order

    def _primitive_ref(self) -> int:
        for a in range(1, self.size):
            if self._element_order_ref(a) == self.size - 1:
                return a
        raise FieldError("no primitive element")  # pragma: no cover

    def element_order(self, a: int) -> int:
        if a == 0:
            raise FieldError("zero has no multiplicative order")
        if self.has_tables:
            L = int(self._table("log")[a])
            return (self.size - 1) // math.gcd(L, self.size - 1)
        return self._element_order_ref(a)

    def elements(self, e: int | None = None) -> list[int]:
        """Codes of F_{q^e} (default: the whole ambient field)."""
        if e is None or e == self.m:
            return list(range(self.size))
        return [a for a in range(self.size) if e % self.degree(a) == 0]

    def check_invariants(self) -> list[str]:
        """Return a list of violated structural invariants (empty when healthy)."""
        problems = []
        if not is_irreducible(list(self.defining_poly), self.p):
            problems.append("defining polynomial is reducible")
        for e, g in self.subfield_gens.items():
            try:
                order = self._element_order_ref(g)
            except Exception:  # pragma: no cover
                order = -1
            if order != self.q**e - 1:
                problems.append(f"subfield generator for e={e} has order {order}")
        if self.size <= 4096:
            fixed = sum(1 for a in range(self.size) if self._pow_ref(a, self.q) == a)
            if fixed != self.q:
                problems.append(f"Frobenius fixes {fixed} elements, expected {self.q}")
        return problems


def _find_generator_ref(ctx: FieldCtx, e: int) -> int:
    target = ctx.q**e - 1
    for a in range(1, ctx.size):
        if ctx._element_order_ref(a) == target:
            return a
    raise FieldError(f"no element of order {target}")  # pragma: no cover


@functools.lru_cache(maxsize=None)
def ctx_create(p: int, l: int = 1, m: int = 1) -> FieldCtx:
    """Build (or fetch the cached) ambient field F_{(p^l)^m}."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if l < 1 or m < 1:
        raise FieldError("l and m must be positive")
    if p ** (l * m) > SIZE_CAP:
        raise FieldError(f"field of size {p}^{l * m} exceeds the cap {SIZE_CAP}")
    ctx = FieldCtx(p, l, m, first_irreducible(p, l * m))
    for e in divisors(m):
        ctx.subfield_gens[e] = _find_generator_ref(ctx, e)
    return ctx


def ctx_for(q: int, m: int = 1) -> FieldCtx:
    pl = prime_power(q)
    if pl is None:
        raise FieldError(f"{q} is not a prime power")
    return ctx_create(pl[0], pl[1], m)


def find_generator(ctx: FieldCtx, e: int) -> int:
    """Minimal-code element of multiplicative order q^e - 1."""
    if ctx.m % e:
        raise FieldError(f"{e} does not divide m={ctx.m}")
    return ctx.subfield_gens[e]


def frobenius(ctx: FieldCtx, a: int, times: int = 1) -> int:
    return ctx.frobenius(a, times)


def degree_over_base(ctx: FieldCtx, a: int) -> int:
    return ctx.degree(a)


def embedding(small: FieldCtx, big: FieldCtx) -> np.ndarray:
    """Code map of a field embedding F_{small} -> F_{big} (same p and l).

    The image of x is a root of small's defining polynomial; the smallest-code
    root is used.  Both contexts must share q so that F_q maps onto F_q.
    """
    if small.p != big.p or small.l != big.l or big.m % small.m:
        raise FieldError("incompatible field contexts for embedding")
    poly = small.defining_poly
    root = None
    for x in range(big.size):
        acc = 0
        for c in reversed(poly):
            acc = big.add(big.mul(acc, x), c)
        if acc == 0 and big.degree(x) == small.m:
            root = x
            break
    if root is None:  # pragma: no cover
        raise FieldError("no root of the defining polynomial")
    out = np.zeros(small.size, dtype=np.int64)
    for code in range(small.size):
        acc = 0
        for c in reversed(small.decode(code)):
            acc = big.add(big.mul(acc, root), c)
        out[code] = acc
    return out


class Fe:
    """A field element bound to its context; arithmetic via operators."""

    __slots__ = ("ctx", "code")

    def __init__(self, ctx: FieldCtx, code: int):
        if not 0 <= code < ctx.size:
            raise FieldError(f"code {code} out of range for {ctx}")
        self.ctx = ctx
        self.code = int(code)

    @property
    def coeffs(self) -> list[int]:
        return self.ctx.decode(self.code)

    def _c(self, other) -> int:
        if isinstance(other, Fe):
            if other.ctx is not self.ctx:
                raise FieldError("elements from different fields")
            return other.code
        return self.ctx.from_int(int(other))

    def __add__(self, other):
        return Fe(self.ctx, self.ctx.add(self.code, self._c(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Fe(self.ctx, self.ctx.sub(self.code, self._c(other)))

    def __rsub__(self, other):
        return Fe(self.ctx, self.ctx.sub(self._c(other), self.code))

    def __neg__(self):
        return Fe(self.ctx, self.ctx.neg(self.code))

    def __mul__(self, other):
        return Fe(self.ctx, self.ctx.mul(self.code, self._c(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Fe(self.ctx, self.ctx.mul(self.code, self.ctx.inv(self._c(other))))

    def __pow__(self, e: int):
        return Fe(self.ctx, self.ctx.pow(self.code, e))

    def __eq__(self, other):
        if isinstance(other, Fe):
            return self.ctx is other.ctx and self.code == other.code
        if isinstance(other, int):
            return self.code == self.ctx.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((id(self.ctx), self.code))

    def __repr__(self):
        return f"Fe({self.code})"

    def frobenius(self, times: int = 1) -> "Fe":
        return Fe(self.ctx, self.ctx.frobenius(self.code, times))

    def degree(self) -> int:
        return self.ctx.degree(self.code)
