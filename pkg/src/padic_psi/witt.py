"""Finite-length Witt vectors and the addition polynomials phi_i.

Ghost components are w_k(x) = sum_{i<=k} p^i x_i^(p^(k-i)).  The sum
polynomials phi_0, phi_1, ... are the unique integer polynomials with
w_k(phi) = w_k(X) + w_k(Y) for every k.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .padic import FieldContext, is_prime

Var = tuple[str, int]  # ("X", 2) is X_2
Monomial = tuple[tuple[Var, int], ...]  # sorted (variable, exponent) pairs


class NonIntegral(ArithmeticError):
    pass


class RingMismatch(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class UnsupportedRing(ValueError):
    pass


# -- sparse integer polynomials ----------------------------------------------


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _var_text(v: Var) -> str:
    return f"{v[0]}{v[1]}"


@dataclass(frozen=True)
class SymPoly:
    """Multivariate polynomial over Z; ``terms`` never stores a zero coefficient."""

    terms: Mapping[Monomial, int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {m: c for m, c in self.terms.items() if c}
        object.__setattr__(self, "terms", clean)

    @classmethod
    def var(cls, name: str, index: int) -> "SymPoly":
        return cls({(((name, index), 1),): 1})

    @classmethod
    def const(cls, c: int) -> "SymPoly":
        return cls({(): c})

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = SymPoly.const(other)
        return isinstance(other, SymPoly) and dict(self.terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __add__(self, other) -> "SymPoly":
        if isinstance(other, int):
            other = SymPoly.const(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return SymPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "SymPoly":
        return SymPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "SymPoly":
        if isinstance(other, int):
            other = SymPoly.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "SymPoly":
        return (-self) + other

    def __mul__(self, other) -> "SymPoly":
        if isinstance(other, int):
            return SymPoly({m: c * other for m, c in self.terms.items()})
        out: dict[Monomial, int] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mono_mul(ma, mb)
                out[m] = out.get(m, 0) + ca * cb
        return SymPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "SymPoly":
        if e < 0:
            raise ValueError("negative exponent")
        result = SymPoly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def exact_div(self, d: int) -> "SymPoly":
        out = {}
        for m, c in self.terms.items():
            q, r = divmod(c, d)
            if r:
                raise NonIntegral(f"coefficient {c} of {self._mono_text(m)} not divisible by {d}")
            out[m] = q
        return SymPoly(out)

    def rename(self, fn: Callable[[Var], Var]) -> "SymPoly":
        out: dict[Monomial, int] = {}
        for m, c in self.terms.items():
            nm = tuple(sorted((fn(v), e) for v, e in m))
            out[nm] = out.get(nm, 0) + c
        return SymPoly(out)

    def variables(self) -> set[Var]:
        return {v for m in self.terms for v, _ in m}

    def evaluate(self, values: Mapping[Var, object], ring: "Ring"):
        total = ring.zero()
        for m, c in self.terms.items():
            t = ring.from_int(c)
            for v, e in m:
                t = ring.mul(t, ring.pow(values[v], e))
            total = ring.add(total, t)
        return total

    @staticmethod
    def _mono_text(m: Monomial) -> str:
        if not m:
            return "1"
        return "*".join(_var_text(v) if e == 1 else f"{_var_text(v)}^{e}" for v, e in m)

    @staticmethod
    def _sort_key(m: Monomial):
        return (sum(e for _, e in m), [(v[0], v[1], -e) for v, e in m])

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=self._sort_key):
            c = self.terms[m]
            mono = self._mono_text(m)
            mag = abs(c)
            body = str(mag) if not m else (mono if mag == 1 else f"{mag}*{mono}")
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return head + "".join(f" {s} {b}" for s, b in parts[1:])

    def __repr__(self) -> str:
        return f"SymPoly({self})"


def ghost_polynomial(letter: str, p: int, k: int) -> SymPoly:
    """w_k in the variables letter_0..letter_k."""
    total = SymPoly()
    for i in range(k + 1):
        total = total + SymPoly.var(letter, i) ** (p ** (k - i)) * (p ** i)
    return total


# -- addition polynomials -----------------------------------------------------

_PHI_CACHE: dict[int, list[SymPoly]] = {}
_PHI_LOCK = threading.Lock()


def phi_polynomials(p: int, n: int) -> list[SymPoly]:
    """phi_0..phi_n, generated by the integral ghost recursion and cached per p."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if n < 0:
        raise ValueError("n must be >= 0")
    with _PHI_LOCK:
        phis = _PHI_CACHE.setdefault(p, [])
        while len(phis) <= n:
            k = len(phis)
            num = ghost_polynomial("X", p, k) + ghost_polynomial("Y", p, k)
            for i, s in enumerate(phis):
                num = num - s ** (p ** (k - i)) * (p ** i)
            phis.append(num.exact_div(p ** k))
        return list(phis[: n + 1])


def _weight(v: Var, p: int) -> int:
    return p ** v[1]


def isobaric_check(phis: Sequence[SymPoly], p: int) -> bool:
    """Every monomial of phi_i has weight p^i, where X_j and Y_j weigh p^j."""
    for i, phi in enumerate(phis):
        for m in phi.terms:
            if sum(e * _weight(v, p) for v, e in m) != p ** i:
                return False
    return True


def shift_indices(poly: SymPoly, by: int = 1) -> SymPoly:
    return poly.rename(lambda v: (v[0], v[1] + by))


def shift_congruence_check(phis: Sequence[SymPoly], p: int) -> bool:
    """phi_i - phi_{i-1}(X_1..X_i; Y_1..Y_i) is divisible by X_0*Y_0 for all i >= 1."""
    if len(phis) < 2:
        raise ValueError("need at least phi_0 and phi_1")
    x0, y0 = ("X", 0), ("Y", 0)
    for i in range(1, len(phis)):
        diff = phis[i] - shift_indices(phis[i - 1])
        for m in diff.terms:
            d = dict(m)
            if d.get(x0, 0) < 1 or d.get(y0, 0) < 1:
                return False
    return True


# -- coefficient rings ----------------------------------------------------------

FQ = "Fq"
ZMOD = "Zmod"
INTEGERS = "Z"
SYMBOLIC = "symbolic"


@dataclass(frozen=True)
class Ring:
    """One of F_q (elements are residue codes), Z/p^e, Z, or symbolic polynomials."""

    kind: str
    p: int
    f: int = 1
    exponent: int = 1

    def __post_init__(self):
        if self.kind not in (FQ, ZMOD, INTEGERS, SYMBOLIC):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.kind == ZMOD and self.exponent < 1:
            raise ValueError("Z/p^e needs e >= 1")

    @classmethod
    def fq(cls, p: int, f: int = 1) -> "Ring":
        return cls(FQ, p, f)

    @classmethod
    def zmod(cls, p: int, exponent: int) -> "Ring":
        return cls(ZMOD, p, 1, exponent)

    @classmethod
    def integers(cls, p: int) -> "Ring":
        return cls(INTEGERS, p)

    @classmethod
    def symbolic(cls, p: int) -> "Ring":
        return cls(SYMBOLIC, p)

    @property
    def ctx(self) -> FieldContext:
        return _context(self.p, self.f)

    @property
    def characteristic_p(self) -> bool:
        return self.kind == FQ or (self.kind == ZMOD and self.exponent == 1)

    @property
    def torsion_free(self) -> bool:
        return self.kind in (INTEGERS, SYMBOLIC)

    def __str__(self) -> str:
        if self.kind == FQ:
            return f"F_{self.p ** self.f}"
        if self.kind == ZMOD:
            return f"Z/{self.p ** self.exponent}"
        return "Z" if self.kind == INTEGERS else "Z[X,Y]"

    def elements(self) -> range:
        if self.kind == FQ:
            return range(self.p ** self.f)
        if self.kind == ZMOD:
            return range(self.p ** self.exponent)
        raise UnsupportedRing(f"{self} is infinite")

    def zero(self):
        return SymPoly() if self.kind == SYMBOLIC else 0

    def one(self):
        return self.from_int(1)

    def from_int(self, c: int):
        if self.kind == FQ:
            return self.ctx.code((c,) + (0,) * (self.f - 1))
        if self.kind == ZMOD:
            return c % self.p ** self.exponent
        if self.kind == SYMBOLIC:
            return SymPoly.const(c)
        return c

    def contains(self, x) -> bool:
        if self.kind == SYMBOLIC:
            return isinstance(x, SymPoly)
        if not isinstance(x, int):
            return False
        return self.kind == INTEGERS or x in self.elements()

    def add(self, a, b):
        if self.kind == FQ:
            return self.ctx.fq_add(a, b)
        if self.kind == ZMOD:
            return (a + b) % self.p ** self.exponent
        return a + b

    def neg(self, a):
        if self.kind == FQ:
            ctx = self.ctx
            return ctx.code(tuple(-c for c in ctx.decode(a)))
        if self.kind == ZMOD:
            return (-a) % self.p ** self.exponent
        return -a

    def mul(self, a, b):
        if self.kind == FQ:
            return self.ctx.fq_mul(a, b)
        if self.kind == ZMOD:
            return a * b % self.p ** self.exponent
        return a * b

    def pow(self, a, e: int):
        if self.kind == FQ:
            return self.ctx.fq_pow(a, e)
        if self.kind == ZMOD:
            return pow(a, e, self.p ** self.exponent)
        return a ** e

    # integer lifts used by the ghost-lift path
    def lift(self, a) -> tuple[int, ...]:
        if self.kind == FQ:
            return self.ctx.decode(a)
        return (a,)

    def reduce(self, vec: Sequence[int]):
        if self.kind == FQ:
            return self.ctx.code(vec)
        if self.kind == ZMOD:
            return vec[0] % self.p ** self.exponent
        return vec[0]


_CTX_CACHE: dict[tuple[int, int], FieldContext] = {}


def _context(p: int, f: int) -> FieldContext:
    key = (p, f)
    if key not in _CTX_CACHE:
        _CTX_CACHE[key] = FieldContext(p, f)
    return _CTX_CACHE[key]


# -- Witt vectors ---------------------------------------------------------------


@dataclass(frozen=True)
class WittVector:
    ring: Ring
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise LengthMismatch("a Witt vector needs at least one component")
        for x in self.components:
            if not self.ring.contains(x):
                raise RingMismatch(f"component {x!r} is not in {self.ring}")

    @property
    def length(self) -> int:
        return len(self.components)

    def __add__(self, other: "WittVector") -> "WittVector":
        return witt_add(self, other)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components) + ")"


def witt_zero(ring: Ring, length: int) -> WittVector:
    return WittVector(ring, (ring.zero(),) * length)


def _check_pair(a: WittVector, b: WittVector):
    if a.ring != b.ring:
        raise RingMismatch(f"{a.ring} vs {b.ring}")
    if a.length != b.length:
        raise LengthMismatch(f"lengths {a.length} and {b.length}")


def _symbolic_ok(p: int, n: int) -> bool:
    return (p == 2 and n <= 3) or (p == 3 and n <= 2) or n <= 1


def witt_add(a: WittVector, b: WittVector, method: str = "auto") -> WittVector:
    """Sum of two Witt vectors of the same length over the same ring.

    ``method`` is "symbolic" (evaluate phi_0..phi_n), "ghost" (lift to a
    torsion-free ring, add ghost components, re-truncate) or "auto", which
    uses the symbolic route only where the phi are small.
    """
    _check_pair(a, b)
    ring = a.ring
    n = a.length - 1
    if method == "auto":
        method = "symbolic" if ring.kind == SYMBOLIC or _symbolic_ok(ring.p, n) else "ghost"
    if method == "symbolic":
        phis = phi_polynomials(ring.p, n)
        values = {("X", i): x for i, x in enumerate(a.components)}
        values.update({("Y", i): y for i, y in enumerate(b.components)})
        return WittVector(ring, tuple(phi.evaluate(values, ring) for phi in phis))
    if method == "ghost":
        if ring.kind == SYMBOLIC:
            raise UnsupportedRing("the ghost-lift route needs concrete components")
        comps = ghost_lift_add(
            [ring.lift(x) for x in a.components],
            [ring.lift(y) for y in b.components],
            ring.ctx if ring.kind == FQ else _context(ring.p, 1),
            None if ring.kind == INTEGERS else ring.exponent,
        )
        return WittVector(ring, tuple(ring.reduce(c) for c in comps))
    raise ValueError(f"unknown method {method!r}")


def ghost_lift_add(xs: Sequence[Sequence[int]], ys: Sequence[Sequence[int]],
                   ctx: FieldContext, exponent: int | None) -> list[tuple[int, ...]]:
    """phi_0..phi_n evaluated at integer lifts in Z[t]/(modulus).

    With ``exponent = e`` the results are only needed modulo p^e; then it is
    enough to work modulo p^(n+e), since changing S_i by a multiple of p^e
    moves p^i S_i^(p^(k-i)) by a multiple of p^(k+e).  ``exponent=None``
    computes exactly over the integers.
    """
    p = ctx.p
    n = len(xs) - 1
    if len(ys) != n + 1:
        raise LengthMismatch("lifts of different lengths")
    outmod = None if exponent is None else p ** exponent
    m = None if exponent is None else p ** (n + exponent)

    def red(v):
        return tuple(c % m for c in v) if m else tuple(v)

    xs = [red(x) for x in xs]
    ys = [red(y) for y in ys]
    sums: list[tuple[int, ...]] = []
    for k in range(n + 1):
        num = [0] * ctx.f
        for i in range(k + 1):
            e = p ** (k - i)
            for src in (xs[i], ys[i]):
                t = ctx.vec_pow(src, e, m)
                num = [u + p ** i * w for u, w in zip(num, t)]
        for i, s in enumerate(sums):
            t = ctx.vec_pow(s, p ** (k - i), m)
            num = [u - p ** i * w for u, w in zip(num, t)]
        if m:
            num = [u % m for u in num]
        pk = p ** k
        if any(u % pk for u in num):
            raise NonIntegral(f"ghost numerator at level {k} not divisible by p^{k}")
        s = tuple(u // pk for u in num)
        sums.append(tuple(c % outmod for c in s) if outmod else s)
    return sums


def verschiebung(a: WittVector) -> WittVector:
    """(x_0, ..., x_n) -> (0, x_0, ..., x_n)."""
    return WittVector(a.ring, (a.ring.zero(),) + a.components)


def frobenius(a: WittVector) -> WittVector:
    """Componentwise p-th power; only a ring endomorphism in characteristic p."""
    if not a.ring.characteristic_p:
        raise UnsupportedRing(f"Frobenius as a p-th power map needs characteristic p, not {a.ring}")
    return WittVector(a.ring, tuple(a.ring.pow(x, a.ring.p) for x in a.components))


def teichmuller_vector(ring: Ring, t, length: int) -> WittVector:
    return WittVector(ring, (t,) + (ring.zero(),) * (length - 1))


def witt_structure_maps(a, which: str, length: int | None = None, ring: Ring | None = None) -> WittVector:
    """Dispatch to verschiebung, frobenius or the Teichmuller embedding.

    For "teichmuller", ``a`` is a ring element and ``ring``/``length`` are required.
    """
    if which == "verschiebung":
        return verschiebung(a)
    if which == "frobenius":
        return frobenius(a)
    if which == "teichmuller":
        if ring is None or length is None:
            raise ValueError("the Teichmuller embedding needs a ring and a length")
        return teichmuller_vector(ring, a, length)
    raise ValueError(f"unknown structure map {which!r}")


def truncate(a: WittVector, length: int) -> WittVector:
    return WittVector(a.ring, a.components[:length])


def witt_multiple(a: WittVector, k: int) -> WittVector:
    """a + a + ... + a (k times)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    total = witt_zero(a.ring, a.length)
    for _ in range(k):
        total = witt_add(total, a)
    return total


def ghost_transform(values: Sequence, ring: Ring, direction: str = "to-ghost") -> list:
    """Ghost components of a Witt vector over Z or symbolic polynomials, or the inverse.

    "to-ghost" maps (x_0..x_n) to (w_0..w_n); "from-ghost" solves the
    triangular system and raises NonIntegral if a division is not exact.
    """
    if not ring.torsion_free:
        raise UnsupportedRing(f"ghost components are not injective over {ring}")
    p = ring.p
    vals = list(values.components if isinstance(values, WittVector) else values)
    if direction == "to-ghost":
        return [
            _sum_ring(ring, (ring.pow(vals[i], p ** (k - i)) * (p ** i) for i in range(k + 1)))
            for k in range(len(vals))
        ]
    if direction == "from-ghost":
        xs: list = []
        for k, w in enumerate(vals):
            num = w - _sum_ring(ring, (ring.pow(xs[i], p ** (k - i)) * (p ** i) for i in range(k)))
            xs.append(_exact_div(num, p ** k))
        return xs
    raise ValueError(f"unknown direction {direction!r}")


def _sum_ring(ring: Ring, items: Iterable):
    total = ring.zero()
    for t in items:
        total = total + t
    return total


def _exact_div(x, d: int):
    if isinstance(x, SymPoly):
        return x.exact_div(d)
    q, r = divmod(x, d)
    if r:
        raise NonIntegral(f"{x} is not divisible by {d}")
    return q


def symbolic_vector(letter: str, length: int, p: int = 2) -> WittVector:
    return WittVector(Ring.symbolic(p), tuple(SymPoly.var(letter, i) for i in range(length)))
