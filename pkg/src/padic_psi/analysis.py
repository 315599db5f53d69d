"""Evaluating Psi on Q_q, digit decompositions, zeros, and numerical checks.

Every truncation decision comes from the closed-form Newton polygon
(``polygons.newton_lower_bound``), never from the computed coefficients, so
the bounds hold independently of how many coefficients a table carries.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .padic import (
    DigitString,
    FieldContext,
    InsufficientPrecision,
    PadicScalar,
    digit_expansion,
    from_rational,
    teichmuller,
    vp,
)
from .polygons import geometric_sum, newton_lower_bound
from .psi import PsiTable
from .witt import ghost_lift_add


class InsufficientSeriesTruncation(ValueError):
    def __init__(self, needed: int, available: int):
        super().__init__(f"need the series to degree {needed}, table stops at {available}")
        self.needed = needed
        self.available = available


class InsufficientInputPrecision(InsufficientPrecision):
    pass


class NewtonStall(RuntimeError):
    pass


class DerivativeNotUnit(RuntimeError):
    pass


class CountMismatch(ValueError):
    pass


class ZeroDigit(ValueError):
    pass


# -- truncation and evaluation ---------------------------------------------------


def truncation_bound(q: int, n: int, t: int) -> int:
    """Smallest M >= 1 with LB(m) - n*m >= t for every m > M.

    LB is the closed-form Newton polygon, so when v(x) >= -n every term
    b_m x^m with m > M has valuation >= t.  On the side q^(i-1) < m <= q^i
    the bound is the affine function (i - n) m - (q^i - 1)/(q - 1), so each
    side is settled in closed form.
    """
    worst = 0
    i = 0
    while True:
        lo = 1 if i == 0 else q ** (i - 1) + 1
        hi = q ** i
        g = geometric_sum(q, i)
        s = i - n
        if s <= 0:
            if s * hi - g < t:
                worst = hi
        else:
            if s * lo - g >= t:
                return max(1, worst)
            last_bad = -((-(t + g)) // s) - 1  # largest m with s*m - g < t
            worst = max(worst, min(hi, last_bad))
        i += 1


def _eval_direct(coeffs: Sequence[int], x: PadicScalar, t: int, M: int) -> PadicScalar:
    """sum_{m <= M} c_m x^m, truncated to absolute precision t (never raises on precision)."""
    ctx = x.ctx
    total = ctx.zero(t)
    pw = None
    for m in range(1, M + 1):
        pw = x if pw is None else pw * x
        c = coeffs[m]
        if c:
            total = total + pw.mul_int(c)
    if coeffs[0]:
        total = total + ctx.from_int(coeffs[0], max(t, 1))
    return total.with_absprec(t)


def _psi_direct(psi: PsiTable, x: PadicScalar, t: int) -> PadicScalar:
    M = truncation_bound(psi.q, -x.valuation, t)
    if M > psi.N:
        raise InsufficientSeriesTruncation(M, psi.N)
    return _eval_direct(psi.coeffs, x, t, M)


def _psi_recursive(psi: PsiTable, x: PadicScalar, t: int) -> PadicScalar:
    """Psi(x) for v(x) = -n < 0 through the functional equation.

    With y_k = Psi(p^k x): for k >= n the argument is integral and is
    evaluated directly; below that, y_k = p^k x - sum_j p^-j y_(k+j)^(q^j),
    where terms with k + j > n have valuation -j + q^j (k + j - n) and are
    dropped once that reaches the working bound.
    """
    q = psi.q
    n = -x.valuation
    bound = t + n + 1
    memo: dict[int, PadicScalar] = {}

    def y(k: int) -> PadicScalar:
        if k in memo:
            return memo[k]
        arg = x.shift(k)
        if k >= n:
            val = _psi_direct(psi, arg, bound)
        else:
            total = arg.with_absprec(bound)
            j = 1
            while True:
                kk = k + j
                if kk > n and -j + q ** j * (kk - n) >= bound:
                    break
                total = total - (y(kk) ** (q ** j)).shift(-j)
                j += 1
            val = total.with_absprec(bound)
        memo[k] = val
        return val

    for k in range(n, -1, -1):  # fill bottom-up to keep recursion shallow
        y(k)
    return memo[0].with_absprec(t)


def eval_psi(psi: PsiTable, x: PadicScalar, t: int, method: str = "auto") -> PadicScalar:
    """Psi_q(x) modulo p^t.

    ``method`` is "direct" (sum the series up to ``truncation_bound``),
    "recursive" (functional equation, for large negative valuations) or
    "auto" (direct whenever the table is long enough).
    """
    ctx = x.ctx
    if ctx.p != psi.p or ctx.f != psi.f:
        raise ValueError("x and the series live over different fields")
    if x.is_exact_zero:
        return ctx.zero()
    if x.is_zero:
        if x.absprec < max(t, 0):
            raise InsufficientInputPrecision(f"x is only known modulo p^{x.absprec}")
        # |Psi(x)| = |x| on v(x) > -1
        return ctx.zero(t)
    if method == "auto":
        direct = x.valuation >= 0 or truncation_bound(psi.q, -x.valuation, t) <= psi.N
        method = "direct" if direct else "recursive"
    if method == "direct":
        out = _psi_direct(psi, x, t)
    elif method == "recursive":
        out = _psi_direct(psi, x, t) if x.valuation >= 0 else _psi_recursive(psi, x, t)
    else:
        raise ValueError(f"unknown method {method!r}")
    if out.absprec < t:
        raise InsufficientInputPrecision(f"result only known modulo p^{out.absprec}, wanted p^{t}")
    return out


def eval_psi_derivative(psi: PsiTable, x: PadicScalar, t: int) -> PadicScalar:
    """Psi'(x) mod p^t; the term m b_m x^(m-1) is bounded by LB(m) - n m + n."""
    n = -x.valuation if not x.is_zero else 0
    M = truncation_bound(psi.q, n, t - n)
    if M > psi.N:
        raise InsufficientSeriesTruncation(M, psi.N)
    dcoeffs = [m * psi.coeffs[m] for m in range(1, psi.N + 1)] + [0]
    out = _eval_direct(dcoeffs, x, t, max(M - 1, 0))
    if out.absprec < t:
        raise InsufficientInputPrecision(f"derivative only known modulo p^{out.absprec}")
    return out


# -- digits -------------------------------------------------------------------


def psi_digit(psi: PsiTable, a: PadicScalar, i: int) -> int:
    """Psi_q(p^-i a) mod p, as a residue code in F_q."""
    if a.is_exact_zero:
        return 0
    return eval_psi(psi, a.shift(-i), 1).residue()


def witt_bivector_decompose(psi: PsiTable, a: PadicScalar, count: int) -> DigitString:
    """Digits a_(v(a)), ..., a_(v(a)+count-1) with a = sum [a_i] p^i, read off Psi."""
    if a.is_exact_zero:
        return DigitString(0, [])
    if a.is_zero:
        raise InsufficientPrecision("valuation of an inexact zero is unknown")
    start = a.valuation
    if start + count > a.absprec:
        raise InsufficientPrecision(f"{count} digits requested, {a.precision} known")
    return DigitString(start, [psi_digit(psi, a, i) for i in range(start, start + count)])


def digits_to_scalar(ctx: FieldContext, ds: DigitString, absprec: int | None = None) -> PadicScalar:
    """sum [d_i] p^i, known modulo p^absprec (default: the digits given)."""
    A = ds.start + len(ds.digits) if absprec is None else absprec
    total = ctx.zero(A)
    for k, d in enumerate(ds.digits):
        if d:
            i = ds.start + k
            total = total + teichmuller(ctx, d, A - i).shift(i)
    return total


def a_sequence_oracle(ctx: FieldContext, a: PadicScalar, i_max: int) -> list[int]:
    """a_0 = a, a_i = sum_{j<i} p^(j-i) (a_j^(q^(i-j-1)) - a_j^(q^(i-j))), reduced mod p.

    Uses no series at all: it is the Psi-free side of the digit identity.
    """
    if not a.is_exact_zero and a.val() < 0:
        raise ValueError("the sequence is defined for a in Z_q")
    q = ctx.q
    seq = [a]
    for i in range(1, i_max + 1):
        total = ctx.zero()
        for j, aj in enumerate(seq):
            e = q ** (i - j - 1)
            total = total + (aj ** e - aj ** (e * q)).shift(j - i)
        seq.append(total)
    return [s.residue() for s in seq]


def bivector_partial_sum(psi: PsiTable, a: PadicScalar, i: int) -> PadicScalar:
    """sum_{l=0}^{-v(a)+i} p^-l Psi(p^l a)^(q^l), modulo p^(i+1)."""
    q = psi.q
    ctx = a.ctx
    if a.is_exact_zero:
        return ctx.zero()
    top = -a.valuation + i
    total = ctx.zero(i + 1)
    for l in range(0, top + 1):
        y = eval_psi(psi, a.shift(l), i + 1 + l)
        total = total + (y ** (q ** l)).shift(-l)
    return total.with_absprec(i + 1)


def bivector_congruence_check(psi: PsiTable, a: PadicScalar, i: int, lhs: PadicScalar | None = None) -> bool:
    """a (or ``lhs``) agrees with the Psi-power sum modulo p^(i+1)."""
    left = a if lhs is None else lhs
    s = bivector_partial_sum(psi, a, i)
    diff = left - s
    if diff.absprec < i + 1:
        raise InsufficientInputPrecision(f"difference known only modulo p^{diff.absprec}")
    return diff.val() >= i + 1


# -- zeros and Schnirelmann factors --------------------------------------------------


@dataclass(frozen=True)
class ZeroRecord:
    p: int
    f: int
    n: int
    residue_class: tuple[int, ...]  # Teichmuller digits d_0..d_(n-1) of a, z_0 = a p^-n
    zero: PadicScalar
    residual_valuation: int | float
    derivative_valuation: int
    iterations: int = 0

    @property
    def valuation(self) -> int:
        return -self.n

    def zero_digits(self, count: int | None = None) -> DigitString:
        count = self.zero.precision if count is None else min(count, self.zero.precision)
        return digit_expansion(self.zero, count)

    def to_dict(self, digits: int = 24) -> dict:
        ds = self.zero_digits(digits)
        return {
            "p": self.p,
            "f": self.f,
            "n": self.n,
            "valuation": self.valuation,
            "residue_class": list(self.residue_class),
            "zero_digits": {"start": ds.start, "digits": ds.digits},
            "residual_valuation": _json_val(self.residual_valuation),
            "derivative_valuation": self.derivative_valuation,
            "iterations": self.iterations,
        }


def _json_val(v):
    return "inf" if v == math.inf else int(v)


def residue_representatives(ctx: FieldContext, n: int) -> list[tuple[int, ...]]:
    """Teichmuller digit strings (d_0, ..., d_(n-1)) with d_0 != 0, lexicographically."""
    out: list[tuple[int, ...]] = [()]
    for pos in range(n):
        lo = 1 if pos == 0 else 0
        out = [s + (d,) for s in out for d in range(lo, ctx.q)]
    return out


def find_zeros(psi: PsiTable, n: int, t: int, max_iter: int = 64, ctx: FieldContext | None = None) -> list[ZeroRecord]:
    """The q^n - q^(n-1) zeros of valuation -n, one per disc a p^-n + p^(1-n) Z_q."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ctx = ctx or FieldContext(psi.p, psi.f)
    work = t + 2 * n + 8
    # terms b_m z^m can reach valuation -(q^n - 1)/(q - 1), so keep that many extra digits
    rel = work + n + geometric_sum(psi.q, n) + 1
    records = []
    for digits in residue_representatives(ctx, n):
        center = digits_to_scalar(ctx, DigitString(0, list(digits)), rel).shift(-n)
        z = center
        pos = 1 - n  # z agrees with the zero at least up to p^pos
        best = -math.inf
        stall = 0
        for it in range(1, max_iter + 1):
            r = eval_psi(psi, z, work)
            rv = r.val()
            if rv >= t:
                break
            d = eval_psi_derivative(psi, z, work)
            if d.is_zero:
                raise DerivativeNotUnit(f"Psi' vanishes to precision {d.absprec} near {z!r}")
            if rv > 2 * d.valuation:
                # Hensel regime: Newton converges quadratically and stays in the disc
                z = _pad(z - r / d, rel)
                if rv <= best:
                    stall += 1
                    if stall >= 3:
                        raise NewtonStall(f"residual stuck at {rv} for class {digits}")
                else:
                    best, stall = rv, 0
            else:
                # one zero in the disc, so v(Psi(z)) = v(z - zero) + const: pick the best digit
                z = max(
                    (_pad(z + teichmuller(ctx, dig, rel).shift(pos), rel) for dig in range(ctx.q)),
                    key=lambda c: eval_psi(psi, c, work).val(),
                )
                pos += 1
        else:
            raise NewtonStall(f"no convergence in {max_iter} steps for class {digits}")
        if z.valuation != -n:
            raise NewtonStall(f"Newton left the valuation -{n} shell for class {digits}")
        if (z - center).val() < 1 - n:
            raise NewtonStall(f"Newton left the residue disc of class {digits}")
        d = eval_psi_derivative(psi, z, work)
        records.append(ZeroRecord(psi.p, psi.f, n, digits, z, r.val(), d.val(), it))
    expected = ctx.q ** n - ctx.q ** (n - 1)
    if len(records) != expected:
        raise CountMismatch(f"found {len(records)} zeros, expected {expected}")
    return records


def _pad(z: PadicScalar, rel: int) -> PadicScalar:
    """Treat the known digits of z as an exact point with relative precision ``rel``."""
    if z.is_zero:
        raise NewtonStall("Newton iterate collapsed to zero")
    return PadicScalar(z.ctx, z.valuation, z.unit, rel)


def schnirelmann_factor(zeros: Sequence[ZeroRecord], q: int | None = None) -> list[PadicScalar]:
    """Coefficients c_0..c_d of prod (1 - x/z) over the zeros of one valuation shell."""
    if not zeros:
        raise CountMismatch("no zeros given")
    n = zeros[0].n
    q = q or zeros[0].p ** zeros[0].f
    if any(z.n != n for z in zeros):
        raise CountMismatch("zeros from different valuation shells")
    if len(zeros) != q ** n - q ** (n - 1):
        raise CountMismatch(f"{len(zeros)} zeros, expected {q ** n - q ** (n - 1)}")
    ctx = zeros[0].zero.ctx
    coeffs = [ctx.one()]
    for rec in zeros:
        w = -rec.zero.inverse()  # factor 1 + w x
        nxt = coeffs + [ctx.zero()]
        for k in range(len(coeffs)):
            nxt[k + 1] = nxt[k + 1] + coeffs[k] * w
        coeffs = nxt
    return coeffs


def schnirelmann_check(coeffs: Sequence[PadicScalar], n: int) -> bool:
    """Constant term 1 and v(c_k) >= n for k >= 1 (within working precision)."""
    if not (coeffs[0] - 1).is_zero:
        return False
    return all(c.val() >= n for c in coeffs[1:])


def poly_mul(a: Sequence[PadicScalar], b: Sequence[PadicScalar], max_degree: int | None = None) -> list[PadicScalar]:
    ctx = a[0].ctx
    deg = len(a) + len(b) - 2
    if max_degree is not None:
        deg = min(deg, max_degree)
    out = [ctx.zero() for _ in range(deg + 1)]
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j <= deg:
                out[i + j] = out[i + j] + x * y
    return out


def partial_product(factors: Sequence[Sequence[PadicScalar]], max_degree: int) -> list[PadicScalar]:
    """Coefficients of x * psi_1(x) * ... * psi_k(x) up to ``max_degree``."""
    ctx = factors[0][0].ctx
    prod = [ctx.zero(), ctx.one()]
    for fac in factors:
        prod = poly_mul(prod, fac, max_degree)
    return prod + [ctx.zero()] * (max_degree + 1 - len(prod))


def partial_product_defect_bound(q: int, k: int, m: int) -> int:
    """Lower bound for v(b_m - c_m), c = x psi_1 ... psi_k, when m <= q^k.

    Psi = c * R with R = prod_{j>k} psi_j, whose x^r coefficient has valuation
    >= r(k+1), and the coefficients of c obey the closed-form polygon.
    """
    if m <= 1:
        return math.inf
    return min(newton_lower_bound(q, m - r) + r * (k + 1) for r in range(1, m))


def partial_product_check(psi: PsiTable, factors: Sequence[Sequence[PadicScalar]]) -> list[tuple[int, int | float, int | float]]:
    """Rows (m, v(b_m - c_m), required bound) for m <= q^k; empty list of failures means pass."""
    k = len(factors)
    q = psi.q
    top = min(q ** k, psi.N)
    prod = partial_product(factors, top)
    rows = []
    for m in range(1, top + 1):
        diff = prod[m] - psi.b(m)
        need = partial_product_defect_bound(q, k, m)
        # compare only as far as the product coefficient is actually known
        rows.append((m, diff.val(), min(need, prod[m].absprec)))
    return rows


# -- addition law, continuity, Teichmuller limit -------------------------------------


def _require_f1(psi: PsiTable):
    if psi.f != 1:
        raise ValueError("the covector addition law is only checked for q = p")


def addition_law_residuals(psi: PsiTable, x: PadicScalar, y: PadicScalar, n_max: int,
                           width: int = 40) -> list[int | float]:
    """r_n = v(Psi(x+y) - phi_n(Psi(p^n x), ..., Psi(x); Psi(p^n y), ..., Psi(y))).

    phi_n runs on integer lifts modulo p^width through the ghost recursion;
    a residual equal to ``width`` means "at least width".  Exact-zero
    inputs give exact zeros, so the residual is reported as infinity.
    """
    _require_f1(psi)
    ctx = x.ctx
    p = psi.p
    exact = x.is_exact_zero or y.is_exact_zero
    target = eval_psi(psi, x + y, width)
    tv = target.lift_vector(width)[0] if not target.is_exact_zero else 0
    out = []
    for n in range(n_max + 1):
        xs = [eval_psi(psi, x.shift(n - i), width) for i in range(n + 1)]
        ys = [eval_psi(psi, y.shift(n - i), width) for i in range(n + 1)]
        lx = [(0,) if s.is_exact_zero else s.lift_vector(width) for s in xs]
        ly = [(0,) if s.is_exact_zero else s.lift_vector(width) for s in ys]
        s = ghost_lift_add(lx, ly, ctx, width)[-1][0]
        diff = (tv - s) % p ** width
        if diff == 0:
            out.append(math.inf if exact else width)
        else:
            out.append(min(vp(diff, p), width))
    return out


def addition_law_check(psi: PsiTable, x: PadicScalar, y: PadicScalar, n_max: int,
                       width: int = 40) -> list[int | float]:
    return addition_law_residuals(psi, x, y, n_max, width)


def uniform_continuity_samples(psi: PsiTable, samples: int, j_max: int, seed: int,
                               max_den_exp: int = 3) -> list[tuple[Fraction, Fraction, int, int | float]]:
    """Rows (x, delta, j, v(Psi(x+delta) - Psi(x))) for seeded random x, delta."""
    _require_f1(psi)
    p = psi.p
    ctx = FieldContext(p)
    rng = random.Random(seed)
    rows = []
    for _ in range(samples):
        x = random_rational(rng, p, max_den_exp)
        j = rng.randint(0, j_max)
        u = rng.randint(-50, 50)
        delta = Fraction(u * p ** j) if rng.random() < 0.5 else Fraction(p ** j * u, rng.choice([1, 1 + p, 2 * p + 1]))
        t = j + 3
        a = _from_fraction(ctx, x)
        b = _from_fraction(ctx, x + delta)
        diff = eval_psi(psi, b, t) - eval_psi(psi, a, t)
        rows.append((x, delta, j, diff.val()))
    return rows


def uniform_continuity_check(psi: PsiTable, samples: int, j_max: int, seed: int) -> bool:
    return all(v >= j for _, _, j, v in uniform_continuity_samples(psi, samples, j_max, seed))


def teichmuller_limit_check(psi: PsiTable, x: PadicScalar, i: int, k_max: int) -> bool:
    """v(Psi(p^i x)^(p^k) - [x_(-i)]) >= k + 1 for 0 <= k <= k_max."""
    return all(v >= k + 1 for k, v in enumerate(teichmuller_limit_valuations(psi, x, i, k_max)))


def teichmuller_limit_valuations(psi: PsiTable, x: PadicScalar, i: int, k_max: int) -> list[int | float]:
    _require_f1(psi)
    ctx = x.ctx
    arg = x.shift(i)
    if arg.is_zero or arg.valuation < 0:
        raise ValueError("need v(p^i x) >= 0")
    if arg.valuation > 0:
        raise ZeroDigit(f"digit of x at position {-i} is 0")
    digit = digit_expansion(x, i + x.valuation + 1 if x.valuation <= -i else 1).at(-i)
    if digit == 0:
        raise ZeroDigit(f"digit of x at position {-i} is 0")
    t = k_max + 2
    u = eval_psi(psi, arg, t)
    tau = teichmuller(ctx, digit, t + 1)
    return [min((u ** (psi.p ** k) - tau).val(), t) for k in range(k_max + 1)]


# -- sampling and serialization --------------------------------------------------------


def random_rational(rng: random.Random, p: int, max_den_exp: int, num_bound: int = 10 ** 6) -> Fraction:
    """Random rational with denominator p^e (e <= max_den_exp) times a small unit."""
    num = rng.randint(-num_bound, num_bound)
    while num == 0:
        num = rng.randint(-num_bound, num_bound)
    den = p ** rng.randint(0, max_den_exp)
    return Fraction(num, den)


def random_integral(rng: random.Random, ctx: FieldContext, absprec: int, unit: bool = False) -> PadicScalar:
    """Random element of Z_q known modulo p^absprec (a unit when ``unit``)."""
    m = ctx.p ** absprec
    while True:
        vec = tuple(rng.randrange(m) for _ in range(ctx.f))
        s = ctx.from_vector(vec, absprec)
        if not unit or (not s.is_zero and s.valuation == 0):
            return s


def _from_fraction(ctx: FieldContext, x: Fraction, N: int | None = None) -> PadicScalar:
    return from_rational(ctx, x.numerator, x.denominator, N)


def zeros_report(records: Sequence[ZeroRecord]) -> str:
    return json.dumps([r.to_dict() for r in records], indent=2)


def isometry_holds(psi: PsiTable, x: PadicScalar, t: int = 30) -> bool:
    """v(Psi(x)) = v(x) when v(x) > -1."""
    return eval_psi(psi, x, t).val() == x.val()


def valuation_floor(q: int, i: int) -> int:
    """-(q^i - 1)/(q - 1): a lower bound for v(Psi(x)) on v(x) >= -i."""
    return -((q ** i - 1) // (q - 1))
