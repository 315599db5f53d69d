"""The series Psi_q, its reduced form u_q and the compositional inverse beta_q.

Psi_q is the unique series in T + T^2 Z[[T]] with

    sum_{j >= 0} p^-j * Psi(p^j T)^(q^j) = T,

obtained as the fixed point of phi -> T - sum_{j>=1} p^-j phi(p^j T)^(q^j).
"""
from __future__ import annotations

from dataclasses import dataclass

from .padic import is_prime, vp
from .series import (
    NonDivisible,
    ZSeries,
    compose,
    derivative,
    exact_div_scalar,
    reciprocal,
    series_add,
    series_mul_trunc,
    series_pow_trunc,
    shift_up,
    substitute_scaled,
)


class NoConvergence(RuntimeError):
    def __init__(self, max_iter: int):
        super().__init__(f"no fixed point after {max_iter} iterations")
        self.max_iter = max_iter


class TruncationMismatch(ValueError):
    pass


class NonIntegralInverse(ArithmeticError):
    pass


@dataclass(frozen=True)
class PsiTable:
    p: int
    f: int
    series: ZSeries
    iterations_used: int = 0

    @property
    def q(self) -> int:
        return self.p ** self.f

    @property
    def N(self) -> int:
        return self.series.trunc

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.series.coeffs

    def b(self, n: int) -> int:
        return self.series.coeffs[n]

    def valuations(self) -> list[tuple[int, int | float]]:
        """``(n, v_p(b_n))`` for 1 <= n <= N; ``inf`` marks a zero coefficient."""
        return [(n, vp(c, self.p)) for n, c in enumerate(self.series.coeffs) if n >= 1]

    def with_series(self, series: ZSeries) -> "PsiTable":
        return PsiTable(self.p, self.f, series, self.iterations_used)


def _validate(p: int, f: int):
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if f < 1:
        raise ValueError("f must be >= 1")


def _contraction_step(phi: ZSeries, p: int, q: int, N: int) -> ZSeries:
    out = list(ZSeries.monomial(1, N).coeffs)
    j = 1
    while q ** j <= N:
        pj = p ** j
        term = series_pow_trunc(substitute_scaled(phi, pj), q ** j, N)
        term = exact_div_scalar(term, pj)
        for n in range(term.trunc + 1):
            out[n] -= term.coeffs[n]
        j += 1
    return ZSeries(tuple(out), N)


def solve_psi(p: int, f: int, N: int, max_iter: int | None = None) -> PsiTable:
    """Psi_q modulo T^(N+1) by fixed-point iteration from phi_0 = T."""
    _validate(p, f)
    if N < 1:
        raise ValueError("truncation degree must be >= 1")
    q = p ** f
    max_iter = N + 2 if max_iter is None else max_iter
    phi = ZSeries.monomial(1, N)
    for it in range(1, max_iter + 1):
        nxt = _contraction_step(phi, p, q, N)
        if nxt == phi:
            return PsiTable(p, f, phi, it)
        phi = nxt
    raise NoConvergence(max_iter)


def solve_u(p: int, f: int, N: int, max_iter: int | None = None) -> ZSeries:
    """The series u_q in 1 + T Z[[T]] modulo T^(N+1), with Psi_q(T) = T u_q(T^(q-1))."""
    _validate(p, f)
    if N < 0:
        raise ValueError("truncation degree must be >= 0")
    q = p ** f
    max_iter = N + 2 if max_iter is None else max_iter
    phi = ZSeries.one(N)
    for it in range(1, max_iter + 1):
        out = list(ZSeries.one(N).coeffs)
        j = 1
        while (q ** j - 1) // (q - 1) <= N:
            shift = (q ** j - 1) // (q - 1)
            inner = series_pow_trunc(substitute_scaled(phi, p ** (j * (q - 1))), q ** j, N - shift)
            c = p ** (j * (q ** j - 1))
            for n in range(inner.trunc + 1):
                out[n + shift] -= c * inner.coeffs[n]
            j += 1
        nxt = ZSeries(tuple(out), N)
        if nxt == phi:
            return phi
        phi = nxt
    raise NoConvergence(max_iter)


def check_candilera(psi: PsiTable, u: ZSeries) -> bool:
    """Psi(T) == T * u(T^(q-1)) coefficientwise, up to the common truncation."""
    q = psi.q
    N = psi.N
    if u.trunc * (q - 1) + 1 < N:
        raise TruncationMismatch(
            f"u known to degree {u.trunc} covers Psi only to {u.trunc * (q - 1) + 1} < {N}")
    expected = [0] * (N + 1)
    for k, c in enumerate(u.coeffs):
        n = 1 + k * (q - 1)
        if n <= N:
            expected[n] = c
    return tuple(expected) == psi.series.coeffs


def functional_residual(psi: PsiTable) -> int | None:
    """First degree where sum_j p^-j Psi(p^j T)^(q^j) - T is nonzero; None if clean.

    Recomputed independently of the solver: plain repeated multiplication and
    a single common denominator p^J instead of per-term exact division.
    """
    p, q, N = psi.p, psi.q, psi.N
    coeffs = psi.series.coeffs
    J = 0
    while q ** (J + 1) <= N:
        J += 1
    # total[n] = p^J * (coefficient of T^n in the left side)
    total = [p ** J * c for c in coeffs]
    for j in range(1, J + 1):
        scaled = [c * p ** (j * n) for n, c in enumerate(coeffs)]
        power = scaled[:]
        for _ in range(q ** j - 1):
            nxt = [0] * (N + 1)
            for a, ca in enumerate(power):
                if ca:
                    for b in range(1, N + 1 - a):
                        if scaled[b]:
                            nxt[a + b] += ca * scaled[b]
            power = nxt
        w = p ** (J - j)
        for n in range(N + 1):
            total[n] += w * power[n]
    total[1] -= p ** J
    for n, c in enumerate(total):
        if c:
            return n
    return None


def inverse_series(psi: PsiTable) -> ZSeries:
    """Compositional inverse beta of Psi modulo T^(N+1) by Newton iteration.

    Each step beta <- beta - (Psi(beta) - T) / Psi'(beta) doubles the number
    of correct coefficients; all arithmetic stays in Z because Psi'(0) = 1.
    """
    N = psi.N
    series = psi.series
    if series.coeffs[:2] != (0, 1):
        raise NonIntegralInverse("Psi must lie in T + T^2 Z[[T]]")
    dpsi = derivative(series)
    beta = ZSeries.monomial(1, min(N, 1))
    k = 1
    while k < N:
        k = min(2 * k, N)
        b = ZSeries.from_coeffs(beta.coeffs, k)
        resid = series_add(compose(series, b, k), -ZSeries.monomial(1, k))
        dval = compose(dpsi, b, k)
        try:
            corr = series_mul_trunc(resid, reciprocal(dval), k)
        except NonDivisible as exc:
            raise NonIntegralInverse(str(exc)) from exc
        beta = series_add(b, -corr)
    return ZSeries.from_coeffs(beta.coeffs, N)


def t_times(u: ZSeries, q: int, N: int) -> ZSeries:
    """The series T * u(T^(q-1)) modulo T^(N+1)."""
    out = [0] * (N + 1)
    for k, c in enumerate(u.coeffs):
        n = 1 + k * (q - 1)
        if n <= N:
            out[n] = c
    return ZSeries(tuple(out), N)


__all__ = [
    "PsiTable",
    "NoConvergence",
    "TruncationMismatch",
    "NonIntegralInverse",
    "solve_psi",
    "solve_u",
    "check_candilera",
    "functional_residual",
    "inverse_series",
    "t_times",
    "shift_up",
]
