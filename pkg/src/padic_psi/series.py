"""Truncated power series with exact integer coefficients.

A :class:`ZSeries` is known modulo ``T**(trunc + 1)``.  Every operation
carries the truncation forward explicitly; mixing truncations takes the
minimum that is still justified by the orders of vanishing.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class NonDivisible(ArithmeticError):
    """A coefficient was not divisible by the requested scalar."""

    def __init__(self, index: int, coefficient: int, divisor: int):
        super().__init__(f"coefficient {index} ({coefficient}) not divisible by {divisor}")
        self.index = index
        self.coefficient = coefficient
        self.divisor = divisor


@dataclass(frozen=True)
class ZSeries:
    coeffs: tuple[int, ...]
    trunc: int

    def __post_init__(self):
        if self.trunc < 0:
            raise ValueError("trunc must be non-negative")
        if len(self.coeffs) != self.trunc + 1:
            raise ValueError(
                f"expected {self.trunc + 1} coefficients, got {len(self.coeffs)}")

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[int], trunc: int | None = None) -> "ZSeries":
        """Build from a coefficient list, padding with zeros or cutting to ``trunc``."""
        cs = [int(c) for c in coeffs]
        if trunc is None:
            trunc = max(len(cs) - 1, 0)
        cs = (cs + [0] * (trunc + 1 - len(cs)))[: trunc + 1]
        return cls(tuple(cs), trunc)

    @classmethod
    def zero(cls, trunc: int) -> "ZSeries":
        return cls((0,) * (trunc + 1), trunc)

    @classmethod
    def one(cls, trunc: int) -> "ZSeries":
        return cls.from_coeffs([1], trunc)

    @classmethod
    def monomial(cls, n: int, trunc: int, c: int = 1) -> "ZSeries":
        cs = [0] * (trunc + 1)
        if n <= trunc:
            cs[n] = c
        return cls(tuple(cs), trunc)

    def __getitem__(self, n: int) -> int:
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    @property
    def order(self) -> int:
        """Index of the first nonzero coefficient (``trunc + 1`` if none is known)."""
        for n, c in enumerate(self.coeffs):
            if c:
                return n
        return self.trunc + 1

    def truncate(self, trunc: int) -> "ZSeries":
        if trunc > self.trunc:
            raise ValueError(f"cannot extend truncation {self.trunc} to {trunc}")
        return ZSeries(self.coeffs[: trunc + 1], trunc)

    def support(self) -> list[int]:
        return [n for n, c in enumerate(self.coeffs) if c]

    def __add__(self, other: "ZSeries") -> "ZSeries":
        return series_add(self, other)

    def __sub__(self, other: "ZSeries") -> "ZSeries":
        return series_add(self, -other)

    def __neg__(self) -> "ZSeries":
        return ZSeries(tuple(-c for c in self.coeffs), self.trunc)

    def __str__(self) -> str:
        terms = []
        for n, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if n == 0 else f"{c}*T^{n}")
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(T^{self.trunc + 1})"


def series_add(a: ZSeries, b: ZSeries) -> ZSeries:
    n = min(a.trunc, b.trunc)
    return ZSeries(tuple(a.coeffs[i] + b.coeffs[i] for i in range(n + 1)), n)


def _convolve(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    out = [0] * (n + 1)
    bnz = [(j, c) for j, c in enumerate(b[: n + 1]) if c]
    for i, ai in enumerate(a[: n + 1]):
        if not ai:
            continue
        lim = n - i
        for j, bj in bnz:
            if j > lim:
                break
            out[i + j] += ai * bj
    return out


def series_mul_trunc(a: ZSeries, b: ZSeries, N: int) -> ZSeries:
    """Product modulo ``T**(N+1)``, capped at the degree the operands determine."""
    n = min(N, a.trunc + b.order, b.trunc + a.order)
    return ZSeries(tuple(_convolve(a.coeffs, b.coeffs, n)), n)


def series_pow_trunc(a: ZSeries, e: int, N: int) -> ZSeries:
    """``a**e`` modulo ``T**(N+1)`` by binary exponentiation.

    The factor ``T**(ord*e)`` is pulled out first so the unit part only has
    to be expanded to degree ``N - ord*e``.
    """
    if e < 0:
        raise ValueError("exponent must be non-negative")
    if e == 0:
        return ZSeries.one(N)
    o = a.order
    if o > a.trunc:
        # a is zero to its known precision, so a**e vanishes below degree o*e
        return ZSeries.zero(min(N, o * e - 1))
    cap = min(N, a.trunc + (e - 1) * o)
    shift = o * e
    if shift > cap:
        return ZSeries.zero(cap)
    m = cap - shift
    unit = ZSeries(a.coeffs[o:o + m + 1], m)
    result = ZSeries.one(m)
    base = unit
    k = e
    while True:
        if k & 1:
            result = series_mul_trunc(result, base, m)
        k >>= 1
        if not k:
            break
        base = series_mul_trunc(base, base, m)
    return ZSeries(((0,) * shift) + result.coeffs, cap)


def substitute_scaled(a: ZSeries, c: int) -> ZSeries:
    """The series ``a(c*T)``."""
    out = []
    power = 1
    for coeff in a.coeffs:
        out.append(coeff * power)
        power *= c
    return ZSeries(tuple(out), a.trunc)


def exact_div_scalar(a: ZSeries, d: int) -> ZSeries:
    if d == 0:
        raise ZeroDivisionError("division of a series by zero")
    out = []
    for n, c in enumerate(a.coeffs):
        q, r = divmod(c, d)
        if r:
            raise NonDivisible(n, c, d)
        out.append(q)
    return ZSeries(tuple(out), a.trunc)


def scale(a: ZSeries, c: int) -> ZSeries:
    return ZSeries(tuple(c * x for x in a.coeffs), a.trunc)


def shift_up(a: ZSeries, k: int, trunc: int | None = None) -> ZSeries:
    """Multiply by ``T**k``; the result is known to ``a.trunc + k`` unless capped."""
    new_trunc = a.trunc + k if trunc is None else min(trunc, a.trunc + k)
    return ZSeries.from_coeffs(((0,) * k + a.coeffs)[: new_trunc + 1], new_trunc)


def derivative(a: ZSeries) -> ZSeries:
    if a.trunc == 0:
        return ZSeries.zero(0)
    return ZSeries(tuple(n * a.coeffs[n] for n in range(1, a.trunc + 1)), a.trunc - 1)


def compose(a: ZSeries, b: ZSeries, N: int) -> ZSeries:
    """``a(b(T))`` modulo ``T**(N+1)``; ``b`` must have zero constant term.

    Known to degree ``min(N, b.trunc, (a.trunc + 1) * ord(b) - 1)``.
    """
    if b.coeffs[0] != 0:
        raise ValueError("inner series must have zero constant term")
    o = b.order
    n = min(N, b.trunc) if o > b.trunc else min(N, b.trunc, (a.trunc + 1) * o - 1)
    acc = [0] * (n + 1)
    for k in range(a.trunc, -1, -1):
        acc = _convolve(acc, b.coeffs, n)
        acc[0] += a.coeffs[k]
    return ZSeries(tuple(acc), n)


def reciprocal(a: ZSeries) -> ZSeries:
    """``1/a`` for a series whose constant term is a unit (+-1)."""
    c0 = a.coeffs[0]
    if c0 not in (1, -1):
        raise NonDivisible(0, c0, 1)
    out = [c0]
    for n in range(1, a.trunc + 1):
        s = sum(a.coeffs[k] * out[n - k] for k in range(1, n + 1))
        out.append(-s * c0)
    return ZSeries(tuple(out), a.trunc)
