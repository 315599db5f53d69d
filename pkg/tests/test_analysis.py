import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padic_psi import analysis
from padic_psi.analysis import (
    CountMismatch, InsufficientSeriesTruncation, ZeroDigit, a_sequence_oracle, addition_law_check,
    bivector_congruence_check, eval_psi, find_zeros, partial_product_check, psi_digit,
    schnirelmann_check, schnirelmann_factor, teichmuller_limit_check, truncation_bound,
    uniform_continuity_check, uniform_continuity_samples, witt_bivector_decompose,
)
from padic_psi.cli import zeros_degree
from padic_psi.padic import DigitString, FieldContext, digit_expansion, from_rational, vp
from padic_psi.polygons import newton_lower_bound
from padic_psi.witt import Ring, phi_polynomials

Q2, Q3 = FieldContext(2), FieldContext(3)


def R(ctx, x, N=40):
    x = Fraction(x)
    return from_rational(ctx, x.numerator, x.denominator, N)


def scan_bound(q, n, t, horizon=5000):
    """Brute-force version of truncation_bound over a finite horizon."""
    bad = [m for m in range(1, horizon) if newton_lower_bound(q, m) - n * m < t]
    return max(bad + [1])


@pytest.mark.parametrize("q,n,t", [(2, 0, 0), (2, 0, 10), (2, 1, 20), (2, 1, -1), (2, 3, 20),
                                   (3, 2, 40), (4, 1, 15), (5, 2, 12), (9, 1, 30)])
def test_truncation_bound_matches_scan(q, n, t):
    assert truncation_bound(q, n, t) == scan_bound(q, n, t)


def test_truncation_bound_examples():
    assert truncation_bound(2, 0, 0) == 1
    assert truncation_bound(2, 0, 10) == 5
    assert truncation_bound(2, 1, 20) == 11


def test_eval_basics(table):
    psi = table(2, 1, 64)
    assert eval_psi(psi, Q2.zero(), 10).is_exact_zero
    half = eval_psi(psi, R(Q2, Fraction(1, 2)), 20)
    assert half.val() >= 0 and half.absprec >= 20


def test_eval_needs_long_enough_table(table):
    with pytest.raises(InsufficientSeriesTruncation):
        eval_psi(table(2, 1, 8), R(Q2, Fraction(1, 8)), 30, method="direct")


@pytest.mark.parametrize("p", [2, 3])
def test_direct_and_recursive_agree(table, p):
    psi = table(p, 1, 64)
    ctx = FieldContext(p)
    rng = random.Random(5)
    for _ in range(40):
        x = analysis.random_rational(rng, p, 2)
        a = R(ctx, x)
        t = 12
        if truncation_bound(p, max(-a.val(), 0), t) > psi.N:
            continue
        assert eval_psi(psi, a, t, "direct").congruent(eval_psi(psi, a, t, "recursive"), t)


@pytest.mark.parametrize("p,f", [(2, 1), (3, 1), (2, 2), (5, 1), (3, 2)])
def test_values_on_the_field_are_integral(table, p, f):
    psi = table(p, f, 64)
    ctx = FieldContext(p, f)
    rng = random.Random(17)
    for _ in range(25):
        # near valuation -n the series magnifies input error by about p^G(n)
        a = analysis.random_integral(rng, ctx, 60)
        x = a.shift(-rng.randint(0, 4)) if not a.is_zero else a
        assert eval_psi(psi, x, 8).val() >= 0


@pytest.mark.parametrize("p", [2, 3, 5])
def test_isometry_and_lower_bound(table, p):
    psi = table(p, 1, 64)
    ctx = FieldContext(p)
    rng = random.Random(23)
    for _ in range(40):
        a = analysis.random_integral(rng, ctx, 30)
        if not a.is_zero:
            assert analysis.isometry_holds(psi, a)
        i = rng.randint(0, 3)
        x = R(ctx, analysis.random_rational(rng, p, i))
        assert eval_psi(psi, x, 10).val() >= analysis.valuation_floor(p, i)


def test_psi_digit_examples(table):
    for p, f in ((2, 1), (3, 1), (2, 2)):
        ctx = FieldContext(p, f)
        assert psi_digit(table(p, f, 64), ctx.one(), 0) == 1
        assert psi_digit(table(p, f, 64), ctx.zero(), 3) == 0
    psi = table(2, 1, 64)
    half = R(Q2, Fraction(1, 2))
    assert psi_digit(psi, half, -1) == 1 and psi_digit(psi, half, 0) == 0


def test_decompose_examples(table):
    psi3 = table(3, 1, 64)
    seven = R(Q3, 7)
    assert witt_bivector_decompose(psi3, seven, 3) == digit_expansion(seven, 3)
    assert witt_bivector_decompose(table(2, 1, 64), R(Q2, Fraction(1, 2)), 4) == DigitString(-1, [1, 0, 0, 0])
    assert witt_bivector_decompose(table(2, 1, 64), R(Q2, Fraction(7, 8)), 8).start == -3


@pytest.mark.parametrize("p", [2, 3])
@settings(max_examples=60, deadline=None)
@given(num=st.integers(-10 ** 6, 10 ** 6).filter(bool), den_exp=st.integers(0, 4),
       cof=st.sampled_from([1, 5, 7, 11]), count=st.integers(1, 12))
def test_decompose_agrees_with_digit_expansion(table, p, num, den_exp, cof, count):
    if cof % p == 0:
        cof += 1
    a = R(FieldContext(p), Fraction(num, cof * p ** den_exp), 40)
    assert witt_bivector_decompose(table(p, 1, 64), a, count) == digit_expansion(a, count)


def test_a_sequence_examples(table):
    assert a_sequence_oracle(Q2, Q2.one(), 1) == [1, 0]
    psi = table(2, 1, 64)
    three = R(Q2, 3)
    assert a_sequence_oracle(Q2, three, 4) == [psi_digit(psi, three, i) for i in range(5)]


@pytest.mark.parametrize("p,f", [(2, 1), (3, 1), (2, 2)])
def test_a_sequence_matches_psi(table, p, f):
    ctx = FieldContext(p, f)
    psi = table(p, f, 64)
    rng = random.Random(31)
    for _ in range(30):
        a = analysis.random_integral(rng, ctx, 24)
        if not a.is_zero:
            assert a_sequence_oracle(ctx, a, 4) == [psi_digit(psi, a, i) for i in range(5)]


def test_bivector_congruence(table):
    psi = table(2, 1, 64)
    assert bivector_congruence_check(psi, R(Q2, 5), 0)
    q34 = R(Q2, Fraction(3, 4))
    assert all(bivector_congruence_check(psi, q34, i) for i in range(3))
    # sensitivity: shifting the left side by p^i is caught modulo p^(i+1)
    for i in range(3):
        assert not bivector_congruence_check(psi, q34, i, lhs=q34 + Q2.one().shift(i))


# zeros of Psi_2 and Psi_3 modulo p^20, frozen after an exact check:
# with z = unit/p^n and M = truncation_bound(p, n, 20), the rational
# sum_{k<=M} b_k z^k has p-adic valuation >= 20.
FROZEN_ZEROS = {
    (2, 1): {(1,): 1180857},
    (2, 2): {(1, 0): 1955937, (1, 1): 1829747},
    (3, 1): {(1,): 10212063715, (2,): 248289488},
}


@pytest.mark.parametrize("p,n", list(FROZEN_ZEROS))
def test_zeros_frozen(table, p, n):
    t = 20
    psi = table(p, 1, max(64, zeros_degree(p, n, t)))
    recs = find_zeros(psi, n, t)
    got = {r.residue_class: r.zero.unit[0] % p ** (t + n) for r in recs}
    assert got == FROZEN_ZEROS[(p, n)]
    for r in recs:
        assert r.zero.valuation == -n and r.residual_valuation >= t and r.derivative_valuation == 0


def test_zeros_exact_residual_independent(table):
    p, n, t = 2, 2, 20
    b = table(p, 1, 64).coeffs
    M = truncation_bound(p, n, t)
    for unit in FROZEN_ZEROS[(p, n)].values():
        z = Fraction(unit, p ** n)
        s = sum(Fraction(b[k]) * z ** k for k in range(1, M + 1))
        assert vp(s.numerator, p) - vp(s.denominator, p) >= t


def test_zeros_p3_lower_target(table):
    recs = find_zeros(table(3, 1, 64), 1, 15)
    assert len(recs) == 2 and all(r.zero.valuation == -1 for r in recs)
    assert len({r.residue_class for r in recs}) == 2


def test_zeros_in_unramified_extension(table):
    q, n, t = 4, 1, 12
    psi = table(2, 2, max(64, zeros_degree(q, n, t)))
    recs = find_zeros(psi, n, t)
    assert len(recs) == 3 and all(r.residual_valuation >= t for r in recs)


def test_schnirelmann_factors(table):
    psi2 = table(2, 1, 64)
    z = find_zeros(psi2, 1, 20)
    fac = schnirelmann_factor(z)
    assert len(fac) == 2 and fac[1].val() == 1 and schnirelmann_check(fac, 1)
    psi3 = table(3, 1, 64)
    fac3 = schnirelmann_factor(find_zeros(psi3, 1, 20))
    assert len(fac3) == 3 and all(c.val() >= 1 for c in fac3[1:])
    with pytest.raises(CountMismatch):
        schnirelmann_factor(z[:0])


def test_partial_products(table):
    psi = table(2, 1, 64)
    factors = [schnirelmann_factor(find_zeros(psi, n, 20)) for n in (1, 2, 3)]
    rows = partial_product_check(psi, factors)
    assert rows and all(v >= need for _, v, need in rows)


def test_addition_law_degenerate(table):
    psi = table(2, 1, 64)
    assert addition_law_check(psi, Q2.zero(), Q2.zero(), 3) == [math.inf] * 4
    assert addition_law_check(psi, R(Q2, 5), Q2.zero(), 3) == [math.inf] * 4


def test_addition_law_rates(table):
    assert addition_law_check(table(2, 1, 64), Q2.one(), Q2.one(), 4) == [2, 6, 11, 17, 24]
    assert addition_law_check(table(3, 1, 64), Q3.one(), Q3.one(), 4) == [3, 8, 15, 24, 35]


@pytest.mark.parametrize("p,n", [(2, 3), (3, 2)])
def test_addition_law_against_symbolic_phi(table, p, n):
    """Recompute the residuals with the symbolic addition polynomials."""
    psi = table(p, 1, 64)
    ctx = FieldContext(p)
    width = 40
    rng = random.Random(3)
    phis = phi_polynomials(p, n)
    Z = Ring.integers(p)
    for _ in range(4):
        x, y = (analysis.random_integral(rng, ctx, width) for _ in range(2))
        target = eval_psi(psi, x + y, width).lift_vector(width)[0]
        want = []
        for k in range(n + 1):
            lift = lambda a, i: eval_psi(psi, a.shift(k - i), width).lift_vector(width)[0]  # noqa: E731
            vals = {("X", i): lift(x, i) for i in range(k + 1)}
            vals.update({("Y", i): lift(y, i) for i in range(k + 1)})
            d = (target - phis[k].evaluate(vals, Z)) % p ** width
            want.append(width if d == 0 else vp(d, p))
        assert addition_law_check(psi, x, y, n, width) == want


def test_uniform_continuity(table):
    psi = table(2, 1, 64)
    a = eval_psi(psi, R(Q2, 1), 20)
    assert (eval_psi(psi, R(Q2, 5), 20) - a).val() >= 2
    assert (eval_psi(psi, R(Q2, 1), 20) - a).val() >= 20
    rows = uniform_continuity_samples(psi, 30, 6, seed=1)
    assert all(v >= j for _, _, j, v in rows)


def test_teichmuller_limits(table):
    psi2, psi3 = table(2, 1, 64), table(3, 1, 64)
    assert teichmuller_limit_check(psi2, Q2.one(), 0, 8)
    assert teichmuller_limit_check(psi3, R(Q3, Fraction(1, 3)).shift(1), 0, 8)
    assert teichmuller_limit_check(psi2, R(Q2, Fraction(1, 2)), 1, 8)
    with pytest.raises(ZeroDigit):
        teichmuller_limit_check(psi2, R(Q2, 2), 0, 4)
