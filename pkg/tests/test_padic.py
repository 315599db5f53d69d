from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padic_psi.padic import (
    DigitString, FieldContext, InsufficientPrecision, NonUnit, PadicZeroDivision, digit_expansion,
    field_arith, from_digits, from_rational, parse_scalar, teichmuller, teichmuller_lift, vp,
)

Q2, Q3, Q5 = FieldContext(2), FieldContext(3), FieldContext(5)


def test_from_rational_examples():
    half = from_rational(Q2, 1, 2, 8)
    assert (half.valuation, half.unit[0]) == (-1, 1)
    seven = from_rational(Q3, 7, 1, 4)
    assert seven.valuation == 0
    u = seven.unit[0]
    assert [u // 3 ** k % 3 for k in range(4)] == [1, 2, 0, 0]
    assert from_rational(Q2, 0, 5, 8).is_exact_zero


def test_zero_denominator():
    with pytest.raises(PadicZeroDivision):
        from_rational(Q2, 1, 0)


def test_arith_examples():
    half = from_rational(Q2, 1, 2, 8)
    s = field_arith("add", half, half)
    assert s.valuation == 0 and s.unit[0] % 2 ** s.precision == 1
    a = from_rational(Q3, 5, 3, 10)
    b = from_rational(Q3, 3 * 7, 1, 10)
    assert field_arith("mul", a, b).valuation == 0
    inv2 = field_arith("inv", from_rational(Q3, 2, 1, 3))
    assert inv2.lift_vector(3)[0] == 14


def test_precision_is_tracked():
    a = from_rational(Q2, 1, 1, 5)
    b = from_rational(Q2, 1, 1, 10)
    assert (a + b).absprec == 5
    # 1 - 1 at precision 5 is an inexact zero
    d = a - a
    assert d.is_zero and d.absprec == 5 and not d.is_exact_zero


def test_power_gains_precision_from_p_power_exponent():
    x = from_rational(Q2, 3, 1, 4)
    assert (x ** 8).precision == 4 + 3


def test_teichmuller_examples():
    assert teichmuller(Q5, 1, 10).lift_vector(10)[0] == 1
    assert teichmuller(Q5, 2, 2).lift_vector(2)[0] == 7
    for k in range(8):
        t = teichmuller_lift(from_rational(Q2, 1 + 2 * k, 1, 12))
        assert t.lift_vector(12)[0] == 1


def test_teichmuller_lift_needs_unit():
    with pytest.raises(NonUnit):
        teichmuller_lift(from_rational(Q3, 3, 1))


def test_teichmuller_is_root_of_unity_in_unramified_extension():
    F9 = FieldContext(3, 2)
    for code in range(1, 9):
        t = teichmuller(F9, code, 12)
        assert (t ** 8 - F9.one(12)).val() >= 12
        assert t.residue() == code


def test_digit_expansion_examples():
    half = digit_expansion(from_rational(Q2, 1, 2, 10), 6)
    assert half.start == -1 and half.digits == [1, 0, 0, 0, 0, 0]
    # 7 = 1 + 3*(-1) + 9*1 with [2] = -1 in Z_3
    assert digit_expansion(from_rational(Q3, 7, 1, 10), 5) == DigitString(0, [1, 2, 1, 0, 0])
    assert digit_expansion(Q3.zero(), 4).digits == []


def test_digit_expansion_rejects_excess_digits():
    with pytest.raises(InsufficientPrecision):
        digit_expansion(from_rational(Q2, 3, 1, 4), 5)


def test_parse_scalar_forms():
    assert parse_scalar(Q2, "7/8", 10).valuation == -3
    assert parse_scalar(Q3, "-4", 10) == from_rational(Q3, -4, 1, 10)
    x = parse_scalar(Q3, "-1:1,2,1", 10)
    assert digit_expansion(x, 3) == DigitString(-1, [1, 2, 1])


def test_vp():
    assert vp(20711204716544, 2) == 26
    assert vp(-4960116, 3) == 11


fractions = st.builds(Fraction, st.integers(-10 ** 6, 10 ** 6).filter(bool),
                      st.integers(1, 10 ** 6))


@given(fractions, fractions)
def test_arith_is_a_homomorphism(x, y):
    for p in (2, 3, 5):
        ctx = FieldContext(p)
        a = from_rational(ctx, x.numerator, x.denominator, 30)
        b = from_rational(ctx, y.numerator, y.denominator, 30)
        for op, exact in (("add", x + y), ("mul", x * y)):
            got = field_arith(op, a, b)
            want = from_rational(ctx, exact.numerator, exact.denominator, 30)
            if exact == 0:
                assert got.is_zero
            else:
                assert got.congruent(want, got.absprec)


@given(fractions, st.sampled_from([2, 3, 5, 7]))
def test_digits_reassemble(x, p):
    ctx = FieldContext(p)
    a = from_rational(ctx, x.numerator, x.denominator, 20)
    ds = digit_expansion(a, 15)
    assert from_digits(ctx, ds).congruent(a, ds.start + 15)


@given(st.integers(0, 15), st.sampled_from([(2, 2), (3, 2), (2, 3)]))
def test_digits_reassemble_in_extensions(seed, pf):
    import random
    from padic_psi.analysis import random_integral
    ctx = FieldContext(*pf)
    a = random_integral(random.Random(seed), ctx, 12)
    if a.is_zero:
        return
    ds = digit_expansion(a, 12 - a.valuation)
    assert from_digits(ctx, ds).congruent(a, 12)
