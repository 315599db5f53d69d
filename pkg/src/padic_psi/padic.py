"""Finite-precision arithmetic in the unramified extension Q_q of Q_p.

Z_q is modelled as Z[X]/(modulus) with the modulus a monic lift of an
irreducible polynomial over F_p.  A nonzero :class:`PadicScalar` is
``p**valuation * unit`` where ``unit`` is a coefficient vector known modulo
``p**precision``.  Zero is a separate state: exact, or known only modulo
``p**absprec``.

Residues in F_q are encoded as integers ``sum(c_i * p**i)`` built from the
reduced coefficient vector, so for f = 1 a residue is just 0..p-1.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

DEFAULT_PRECISION = 64

# Conway polynomials, coefficients from X^0 up to the leading 1.
_MODULUS_TABLE: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (5, 4): (2, 4, 4, 0, 1),
    (7, 2): (3, 6, 1),
    (7, 3): (4, 0, 6, 1),
    (7, 4): (3, 4, 5, 0, 1),
}


class PadicError(ArithmeticError):
    pass


class InsufficientPrecision(PadicError):
    pass


class PadicZeroDivision(PadicError, ZeroDivisionError):
    pass


class NonUnit(PadicError):
    pass


class NotIntegral(PadicError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    r = math.isqrt(n)
    return all(n % d for d in range(3, r + 1, 2))


def vp(n: int, p: int) -> int | float:
    """p-adic valuation of an integer (``inf`` for 0)."""
    if n == 0:
        return math.inf
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# -- polynomials over Z / Z/m, coefficient lists low to high ---------------

def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_divmod_p(a: Sequence[int], b: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    a = [x % p for x in a]
    b = _poly_trim([x % p for x in b])
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 1)
    a = _poly_trim(a)
    while len(a) >= len(b):
        c = a[-1] * inv % p
        k = len(a) - len(b)
        q[k] = c
        for i, bi in enumerate(b):
            a[i + k] = (a[i + k] - c * bi) % p
        _poly_trim(a)
    return q, a


def is_irreducible_mod_p(modulus: Sequence[int], p: int) -> bool:
    """Brute-force factor search over monic polynomials of degree <= f/2."""
    f = len(modulus) - 1
    if f <= 1:
        return True
    for d in range(1, f // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            _, r = _poly_divmod_p(modulus, list(low) + [1], p)
            if not r:
                return False
    return True


def default_modulus(p: int, f: int) -> tuple[int, ...]:
    if f == 1:
        return (0, 1)
    if (p, f) in _MODULUS_TABLE:
        return _MODULUS_TABLE[(p, f)]
    for low in itertools.product(range(p), repeat=f):
        cand = tuple(reversed(low)) + (1,)
        if cand[0] and is_irreducible_mod_p(cand, p):
            return cand
    raise ValueError(f"no irreducible polynomial of degree {f} mod {p}")


@dataclass(frozen=True)
class FieldContext:
    """The field Q_q, q = p**f, with a fixed monic modulus defining Z_q."""

    p: int
    f: int = 1
    modulus: tuple[int, ...] | None = None
    precision: int = DEFAULT_PRECISION
    q: int = field(init=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.f < 1:
            raise ValueError("degree f must be positive")
        mod = default_modulus(self.p, self.f) if self.modulus is None else tuple(self.modulus)
        if len(mod) != self.f + 1 or mod[-1] != 1:
            raise ValueError(f"modulus must be monic of degree {self.f}")
        if not is_irreducible_mod_p(mod, self.p):
            raise ValueError(f"modulus {mod} is reducible mod {self.p}")
        object.__setattr__(self, "modulus", mod)
        object.__setattr__(self, "q", self.p ** self.f)

    # -- Z[X]/(modulus) arithmetic on coefficient vectors --------------------

    def vec_mul(self, a: Sequence[int], b: Sequence[int], m: int | None = None) -> tuple[int, ...]:
        f = self.f
        if f == 1:
            c = a[0] * b[0]
            return (c % m,) if m else (c,)
        prod = [0] * (2 * f - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        mod = self.modulus
        for k in range(2 * f - 2, f - 1, -1):
            c = prod[k]
            if c:
                prod[k] = 0
                for i in range(f):
                    prod[k - f + i] -= c * mod[i]
        out = prod[:f]
        if m:
            out = [x % m for x in out]
        return tuple(out)

    def vec_pow(self, a: Sequence[int], e: int, m: int | None = None) -> tuple[int, ...]:
        result = self.vec_one()
        base = tuple(a)
        while e:
            if e & 1:
                result = self.vec_mul(result, base, m)
            e >>= 1
            if e:
                base = self.vec_mul(base, base, m)
        return result

    def vec_one(self) -> tuple[int, ...]:
        return (1,) + (0,) * (self.f - 1)

    def vec_zero(self) -> tuple[int, ...]:
        return (0,) * self.f

    # -- residue field F_q ---------------------------------------------------

    def code(self, vec: Sequence[int]) -> int:
        """Residue code of a coefficient vector reduced mod p."""
        p = self.p
        return sum((c % p) * p ** i for i, c in enumerate(vec))

    def decode(self, code: int) -> tuple[int, ...]:
        if not 0 <= code < self.q:
            raise ValueError(f"residue code {code} outside 0..{self.q - 1}")
        out = []
        for _ in range(self.f):
            code, r = divmod(code, self.p)
            out.append(r)
        return tuple(out)

    def fq_mul(self, a: int, b: int) -> int:
        return self.code(self.vec_mul(self.decode(a), self.decode(b), self.p))

    def fq_add(self, a: int, b: int) -> int:
        return self.code(tuple(x + y for x, y in zip(self.decode(a), self.decode(b))))

    def fq_pow(self, a: int, e: int) -> int:
        return self.code(self.vec_pow(self.decode(a), e, self.p))

    def vec_inverse(self, vec: Sequence[int], m_exp: int) -> tuple[int, ...]:
        """Inverse of a unit vector modulo p**m_exp (Fermat mod p, then Newton)."""
        p = self.p
        if self.code(vec) == 0:
            raise NonUnit("vector is not a unit mod p")
        y = self.vec_pow(vec, self.q - 2, p)
        k = 1
        while k < m_exp:
            k = min(2 * k, m_exp)
            mod = p ** k
            ay = self.vec_mul(vec, y, mod)
            two_minus = tuple(((2 if i == 0 else 0) - c) % mod for i, c in enumerate(ay))
            y = self.vec_mul(y, two_minus, mod)
        return tuple(c % p ** m_exp for c in y)

    # -- constructors ----------------------------------------------------------

    def zero(self, absprec: int | None = None) -> "PadicScalar":
        return PadicScalar(self, None, self.vec_zero(), absprec)

    def one(self, precision: int | None = None) -> "PadicScalar":
        return self.from_int(1, precision)

    def from_int(self, n: int, precision: int | None = None) -> "PadicScalar":
        return from_rational(self, n, 1, precision)

    def from_vector(self, vec: Sequence[int], absprec: int) -> "PadicScalar":
        """Element of Z_q given by an integral coefficient vector modulo p**absprec."""
        return _normalize(self, 0, tuple(vec), absprec)

    def units_mod_p(self) -> list[int]:
        return list(range(1, self.q))

    def __str__(self) -> str:
        return f"Q_{self.q}" if self.f == 1 else f"Q_{self.q} (p={self.p}, f={self.f}, modulus={self.modulus})"


def _vec_valuation(vec: Sequence[int], p: int) -> int | float:
    return min(vp(c, p) for c in vec)


def _normalize(ctx: FieldContext, v0: int, vec: tuple[int, ...], absprec: int | float) -> "PadicScalar":
    """Build ``p**v0 * vec`` known modulo ``p**absprec``."""
    p = ctx.p
    if absprec == math.inf:
        raise ValueError("nonzero elements need finite precision")
    rel = absprec - v0
    if rel <= 0:
        return PadicScalar(ctx, None, ctx.vec_zero(), absprec)
    m = p ** rel
    vec = tuple(c % m for c in vec)
    k = _vec_valuation(vec, p)
    if k == math.inf or k >= rel:
        return PadicScalar(ctx, None, ctx.vec_zero(), absprec)
    pk = p ** k
    unit = tuple((c // pk) % p ** (rel - k) for c in vec)
    return PadicScalar(ctx, v0 + k, unit, rel - k)


@dataclass(frozen=True)
class PadicScalar:
    """An element of Q_q at finite precision.

    Nonzero: ``p**valuation * unit`` with ``unit`` known modulo
    ``p**precision``.  Zero: ``valuation`` is None and ``precision`` is the
    absolute precision, or None for an exact zero.
    """

    ctx: FieldContext
    valuation: int | None
    unit: tuple[int, ...]
    precision: int | None

    @property
    def is_zero(self) -> bool:
        return self.valuation is None

    @property
    def is_exact_zero(self) -> bool:
        return self.valuation is None and self.precision is None

    @property
    def absprec(self) -> int | float:
        if self.valuation is None:
            return math.inf if self.precision is None else self.precision
        return self.valuation + self.precision

    def val(self) -> int | float:
        """Valuation; for a zero, the valuation lower bound it is known to."""
        return self.absprec if self.valuation is None else self.valuation

    def _check(self, other: "PadicScalar"):
        if self.ctx != other.ctx:
            raise ValueError("operands live in different fields")

    def _coerce(self, other) -> "PadicScalar":
        if isinstance(other, PadicScalar):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if other == 0:
                return self.ctx.zero()
            v = vp(other.numerator, self.ctx.p) - vp(other.denominator, self.ctx.p)
            need = self.absprec - v if self.absprec != math.inf else self.ctx.precision
            return from_rational(self.ctx, other.numerator, other.denominator, max(int(need), 1))
        return NotImplemented

    # -- ring operations -------------------------------------------------------

    def __add__(self, other) -> "PadicScalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_exact_zero:
            return other
        if other.is_exact_zero:
            return self
        absprec = min(self.absprec, other.absprec)
        if self.is_zero and other.is_zero:
            return self.ctx.zero(absprec)
        if self.is_zero or other.is_zero:
            nz = other if self.is_zero else self
            return nz.with_absprec(absprec)
        # a term that vanishes modulo p^absprec contributes nothing
        if other.valuation >= absprec:
            return self.with_absprec(absprec)
        if self.valuation >= absprec:
            return other.with_absprec(absprec)
        p = self.ctx.p
        v0 = min(self.valuation, other.valuation)
        sa = p ** (self.valuation - v0)
        sb = p ** (other.valuation - v0)
        vec = tuple(a * sa + b * sb for a, b in zip(self.unit, other.unit))
        return _normalize(self.ctx, v0, vec, absprec)

    __radd__ = __add__

    def __neg__(self) -> "PadicScalar":
        if self.is_zero:
            return self
        m = self.ctx.p ** self.precision
        return PadicScalar(self.ctx, self.valuation, tuple((-c) % m for c in self.unit), self.precision)

    def __sub__(self, other) -> "PadicScalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "PadicScalar":
        return (-self) + other

    def __mul__(self, other) -> "PadicScalar":
        if isinstance(other, int):
            return self.mul_int(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_exact_zero or other.is_exact_zero:
            return self.ctx.zero()
        if self.is_zero or other.is_zero:
            return self.ctx.zero(self.val() + other.val())
        n = min(self.precision, other.precision)
        unit = self.ctx.vec_mul(self.unit, other.unit, self.ctx.p ** n)
        return PadicScalar(self.ctx, self.valuation + other.valuation, unit, n)

    __rmul__ = __mul__

    def mul_int(self, c: int) -> "PadicScalar":
        """Multiply by an exact integer (no precision is lost)."""
        if c == 0 or self.is_exact_zero:
            return self.ctx.zero()
        p = self.ctx.p
        k = vp(c, p)
        if self.is_zero:
            return self.ctx.zero(self.precision + k)
        u = c // p ** k
        m = p ** self.precision
        return PadicScalar(self.ctx, self.valuation + k, tuple(x * u % m for x in self.unit), self.precision)

    def shift(self, k: int) -> "PadicScalar":
        """Multiply by ``p**k``."""
        if self.is_exact_zero:
            return self
        if self.is_zero:
            return self.ctx.zero(self.precision + k)
        return PadicScalar(self.ctx, self.valuation + k, self.unit, self.precision)

    def inverse(self) -> "PadicScalar":
        if self.is_exact_zero:
            raise PadicZeroDivision("inverse of exact zero")
        if self.is_zero:
            raise InsufficientPrecision(f"cannot invert: zero modulo p^{self.precision}")
        unit = self.ctx.vec_inverse(self.unit, self.precision)
        return PadicScalar(self.ctx, -self.valuation, unit, self.precision)

    def __truediv__(self, other) -> "PadicScalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "PadicScalar":
        return self.inverse() * other

    def __pow__(self, e: int) -> "PadicScalar":
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return self.ctx.one(self.precision if not self.is_zero and self.precision else self.ctx.precision)
        if self.is_zero:
            return self if self.is_exact_zero else self.ctx.zero(self.precision * e)
        # (u + O(p^r))^e = u^e (1 + O(p^(r + v_p(e)))) for r >= 1
        rel = self.precision + vp(e, self.ctx.p)
        unit = self.ctx.vec_pow(self.unit, e, self.ctx.p ** rel)
        return PadicScalar(self.ctx, self.valuation * e, unit, rel)

    # -- precision and projections ---------------------------------------------

    def with_absprec(self, absprec: int | float) -> "PadicScalar":
        """Forget digits at and beyond ``p**absprec`` (never gains precision)."""
        if absprec >= self.absprec:
            return self
        if self.is_zero:
            return self.ctx.zero(absprec)
        if absprec <= self.valuation:
            return self.ctx.zero(absprec)
        rel = absprec - self.valuation
        m = self.ctx.p ** rel
        return PadicScalar(self.ctx, self.valuation, tuple(c % m for c in self.unit), rel)

    def with_precision(self, rel: int) -> "PadicScalar":
        if self.is_zero:
            return self
        return self.with_absprec(self.valuation + rel)

    def lift_vector(self, absprec: int | None = None) -> tuple[int, ...]:
        """Integer coefficient vector of an integral element modulo p**absprec."""
        A = self.absprec if absprec is None else min(absprec, self.absprec)
        if A == math.inf:
            raise InsufficientPrecision("exact zero needs an explicit absprec to lift")
        A = int(A)
        if self.is_zero:
            return self.ctx.vec_zero()
        if self.valuation < 0:
            raise NotIntegral(f"valuation {self.valuation} < 0")
        m = self.ctx.p ** A
        s = self.ctx.p ** self.valuation
        return tuple(c * s % m for c in self.unit)

    def residue(self) -> int:
        """Image in F_q (as a residue code) of an integral element."""
        if self.is_zero:
            if self.absprec < 1:
                raise InsufficientPrecision("residue unknown: zero modulo p^0")
            return 0
        if self.valuation < 0:
            raise NotIntegral(f"valuation {self.valuation} < 0 has no residue")
        if self.valuation > 0:
            return 0
        return self.ctx.code(self.unit)

    def to_fraction(self) -> Fraction:
        """A rational representative (only meaningful for f = 1)."""
        if self.ctx.f != 1:
            raise ValueError("rational representative only for f = 1")
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.unit[0]) * Fraction(self.ctx.p) ** self.valuation

    def congruent(self, other, k: int) -> bool:
        """True when ``self - other`` is known to lie in ``p**k Z_q``."""
        return (self - other).val() >= k

    def __repr__(self) -> str:
        if self.is_exact_zero:
            return "0"
        if self.is_zero:
            return f"O({self.ctx.p}^{self.precision})"
        u = self.unit[0] if self.ctx.f == 1 else self.unit
        return f"{self.ctx.p}^{self.valuation}*{u} + O({self.ctx.p}^{self.absprec})"


def from_rational(ctx: FieldContext, num: int, den: int = 1, N: int | None = None) -> PadicScalar:
    """The image of num/den in Q_p inside Q_q, with relative precision N."""
    if den == 0:
        raise PadicZeroDivision("zero denominator")
    if num == 0:
        return ctx.zero()
    N = ctx.precision if N is None else N
    if N < 1:
        raise ValueError("precision must be positive")
    p = ctx.p
    vn, vd = vp(num, p), vp(den, p)
    un, ud = num // p ** vn, den // p ** vd
    m = p ** N
    u = un * pow(ud, -1, m) % m
    return PadicScalar(ctx, vn - vd, (u,) + (0,) * (ctx.f - 1), N)


def field_arith(op: str, a: PadicScalar, b: PadicScalar | None = None) -> PadicScalar:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "inv":
        return a.inverse()
    raise ValueError(f"unknown operation {op!r}")


def teichmuller(ctx: FieldContext, code: int, N: int | None = None) -> PadicScalar:
    """Teichmuller lift of a residue code, to relative precision N."""
    if code == 0:
        return ctx.zero()
    N = ctx.precision if N is None else N
    m = ctx.p ** N
    x = tuple(c % m for c in ctx.decode(code))
    while True:
        y = ctx.vec_pow(x, ctx.q, m)
        if y == x:
            return PadicScalar(ctx, 0, x, N)
        x = y


def teichmuller_lift(a: PadicScalar, N: int | None = None) -> PadicScalar:
    """The root of unity (or 0) congruent to the unit ``a`` mod p."""
    if a.is_zero or a.valuation != 0:
        raise NonUnit(f"Teichmuller lift needs a unit, got valuation {a.val()}")
    return teichmuller(a.ctx, a.residue(), a.precision if N is None else N)


class DigitString(NamedTuple):
    """Digits ``digits[k]`` sitting at position ``start + k``."""

    start: int
    digits: list[int]

    def at(self, i: int) -> int:
        k = i - self.start
        if k < 0:
            return 0
        return self.digits[k]


def digit_expansion(a: PadicScalar, count: int) -> DigitString:
    """Teichmuller digits of ``a``: ``a = sum [d_i] p**i`` from i = v(a) on."""
    if a.is_exact_zero:
        return DigitString(0, [])
    if a.is_zero:
        raise InsufficientPrecision("valuation of an inexact zero is unknown")
    ctx = a.ctx
    start = a.valuation
    if start + count > a.absprec:
        raise InsufficientPrecision(
            f"{count} digits requested but only {a.precision} are known")
    digits = []
    r = a
    for i in range(start, start + count):
        d = r.shift(-i).residue()
        digits.append(d)
        if d:
            r = r - teichmuller(ctx, d, a.absprec - i).shift(i)
    return DigitString(start, digits)


def from_digits(ctx: FieldContext, ds: DigitString, N: int | None = None) -> PadicScalar:
    """Reassemble ``sum [d] p**i``; known modulo ``p**(start + len)`` unless N says less."""
    A = ds.start + len(ds.digits) if N is None else N
    total = ctx.zero(A)
    for k, d in enumerate(ds.digits):
        if d:
            i = ds.start + k
            total = total + teichmuller(ctx, d, max(A - i, 1)).shift(i)
    return total.with_absprec(A)


def parse_scalar(ctx: FieldContext, text: str, N: int | None = None) -> PadicScalar:
    """Parse ``"num/den"``, an integer, or a digit string ``"v:d0,d1,..."``."""
    text = text.strip()
    if ":" in text:
        head, tail = text.split(":", 1)
        digits = [int(t) for t in tail.split(",") if t.strip()]
        ds = DigitString(int(head), digits)
        A = ds.start + (len(digits) if N is None else N)
        return from_digits(ctx, ds, A)
    fr = Fraction(text)
    return from_rational(ctx, fr.numerator, fr.denominator, N)
