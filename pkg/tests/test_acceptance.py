"""Acceptance criteria 1-12, one test each; every test prints a PASS/FAIL line."""
import math
import random
import time
from fractions import Fraction

import pytest

from padic_psi import analysis, polygons, witt
from padic_psi.cli import addition_pairs, addition_ok, psi_table, zeros_degree
from padic_psi.padic import FieldContext, digit_expansion, from_rational, vp
from padic_psi.psi import check_candilera, functional_residual, solve_psi, solve_u

SEED = 20240601


@pytest.fixture
def report(capsys):
    def emit(number: int, title: str, ok: bool, detail: str = ""):
        with capsys.disabled():
            line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}"
            print("\n" + line + (f"  [{detail}]" if detail else ""))
        assert ok, detail
    return emit


def test_criterion_01_exact_coefficients(report, fixtures):
    rows = fixtures("psi2_coefficients.json")["coefficients"]
    start = time.perf_counter()
    psi = solve_psi(2, 1, 24)
    elapsed = time.perf_counter() - start
    bad = [r["n"] for r in rows if psi.b(r["n"]) != int(r["value"])]
    report(1, "exact b_1..b_24 of Psi_2", len(rows) == 24 and not bad and elapsed < 10,
           f"{24 - len(bad)}/24 rows, {elapsed:.3f}s")


def test_criterion_02_valuation_tables(report, fixtures):
    v2 = fixtures("psi2_valuations.json")["valuations"]
    v3 = fixtures("psi3_valuations.json")["valuations"]
    psi2, psi3 = psi_table(2, 1, 32), psi_table(3, 1, 81)
    ok2 = sum(vp(psi2.b(r["n"]), 2) == r["valuation"] for r in v2)
    ok3 = sum(vp(psi3.b(r["n"]), 3) == r["valuation"] for r in v3)
    report(2, "2-adic and 3-adic valuation tables", (ok2, len(v2), ok3, len(v3)) == (32, 32, 40, 40),
           f"{ok2}/{len(v2)}, {ok3}/{len(v3)}")


def test_criterion_03_small_primes(report, fixtures):
    psi5, psi7 = psi_table(5, 1, 13), psi_table(7, 1, 13)
    expected = [
        (psi5, 5, -5 ** 4), (psi5, 9, 5 ** 13), (psi5, 13, -53 * 59 * 5 ** 21),
        (psi7, 7, -7 ** 6), (psi7, 13, 7 ** 19),
    ]
    bad = [(psi.p, n) for psi, n, value in expected if psi.b(n) != value]
    for series in fixtures("leading_terms.json")["series"]:
        psi = psi_table(series["p"], 1, max(t["n"] for t in series["terms"]))
        for t in series["terms"]:
            b = psi.b(t["n"])
            ok = (vp(b, psi.p) == t["valuation"] if "valuation" in t
                  else b == t["sign"] * math.prod(t["cofactor"]) * psi.p ** t["p_power"])
            if not ok:
                bad.append((psi.p, t["n"]))
    report(3, "Psi_5 and Psi_7 leading coefficients", not bad, f"mismatches {bad}" if bad else "")


def test_criterion_04_functional_identity(report):
    grid = [(2, 1, 64), (3, 1, 81), (2, 2, 32), (5, 1, 30)]
    bad = []
    for p, f, N in grid:
        psi = psi_table(p, f, N)
        if functional_residual(psi) is not None:
            bad.append(("residual", p, f, N))
        if not check_candilera(psi, solve_u(p, f, -(-(N - 1) // (psi.q - 1)))):
            bad.append(("reduced form", p, f, N))
    report(4, "fixed-point identity and Psi = T u(T^(q-1))", not bad, str(bad) if bad else "4 grid points")


def test_criterion_05_polygons(report):
    bad = []
    for p, f, N in ((2, 1, 64), (3, 1, 81), (2, 2, 64), (5, 1, 125)):
        q = p ** f
        vals = psi_table(p, f, N).valuations()
        nw, va = polygons.newton_polygon(vals), polygons.valuation_polygon(vals)
        if not polygons.compare_with_closed_form(nw, q, N):
            bad.append((q, "vertices"))
        if polygons.dual_polygon(nw) != va:
            bad.append((q, "duality"))
        # sides of the computed polygon next to the origin, up to X = -N
        counts = polygons.zero_counts(nw)
        k = 0
        while q ** (k + 1) <= N:
            if counts[k] != (-(k + 1), q ** (k + 1) - q ** k):
                bad.append((q, "count", k + 1))
            k += 1
    report(5, "Newton polygon = closed form, duality, zero counts", not bad, str(bad) if bad else "q = 2, 3, 4, 5")


def test_criterion_06_zeros(report):
    start = time.perf_counter()
    bad, counts = [], {}
    for p, top in ((2, 3), (3, 2)):
        t = 20
        psi = psi_table(p, 1, max(64, zeros_degree(p, top, t)))
        factors = []
        for n in range(1, top + 1):
            recs = analysis.find_zeros(psi, n, t)
            counts[(p, n)] = len(recs)
            if len(recs) != p ** n - p ** (n - 1):
                bad.append((p, n, "count"))
            if any(r.zero.valuation != -n or r.residual_valuation < t for r in recs):
                bad.append((p, n, "zero"))
            fac = analysis.schnirelmann_factor(recs)
            if not analysis.schnirelmann_check(fac, n):
                bad.append((p, n, "factor"))
            factors.append(fac)
            rows = analysis.partial_product_check(psi, factors)
            if any(v < need for _, v, need in rows):
                bad.append((p, n, "product"))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 60 and [counts[k] for k in sorted(counts)] == [1, 2, 4, 2, 6]
    report(6, "zeros, Schnirelmann factors, partial products", ok, f"counts {counts}, {elapsed:.2f}s {bad}")


def test_criterion_07_digit_oracles(report):
    rng = random.Random(SEED)
    seq_bad = 0
    for p, f in ((2, 1), (3, 1), (2, 2)):
        ctx, psi = FieldContext(p, f), psi_table(p, f, 64)
        done = 0
        while done < 100:
            a = analysis.random_integral(rng, ctx, 24)
            if a.is_zero:
                continue
            done += 1
            seq_bad += analysis.a_sequence_oracle(ctx, a, 4) != [analysis.psi_digit(psi, a, i) for i in range(5)]
    dec_bad = 0
    for p in (2, 3):
        ctx, psi = FieldContext(p), psi_table(p, 1, 64)
        for _ in range(100):
            x = analysis.random_rational(rng, p, 4)
            count = rng.randint(1, 12)
            a = from_rational(ctx, x.numerator, x.denominator, 40)
            dec_bad += analysis.witt_bivector_decompose(psi, a, count) != digit_expansion(a, count)
    report(7, "psi_digit = a-sequence; decomposition = digit expansion", seq_bad == dec_bad == 0,
           f"{300 - seq_bad}/300 and {200 - dec_bad}/200 agree")


def test_criterion_08_congruences(report):
    rng = random.Random(SEED + 8)
    bad = []
    for p in (2, 3):
        ctx, psi = FieldContext(p), psi_table(p, 1, 64)
        for _ in range(50):
            x = analysis.random_rational(rng, p, 3)
            i = rng.randint(0, 3)
            if not analysis.bivector_congruence_check(psi, from_rational(ctx, x.numerator, x.denominator), i):
                bad.append((p, str(x), i))
        for _ in range(100):
            a = analysis.random_integral(rng, ctx, 20, unit=True)
            if (analysis.eval_psi(psi, a, 1) - a).val() < 1:
                bad.append((p, repr(a)))
    report(8, "Psi-power congruences and Psi(a) = a mod p", not bad, str(bad[:3]) if bad else "300 checks")


def test_criterion_09_witt(report):
    bad = []
    for p, n in ((2, 3), (3, 2)):
        phis = witt.phi_polynomials(p, n)
        if not (witt.isobaric_check(phis, p) and witt.shift_congruence_check(phis, p)):
            bad.append(("phi", p))
    rng = random.Random(SEED + 9)
    for p in (2, 3):
        Z = witt.Ring.integers(p)
        for _ in range(50):
            v = [rng.randint(-10 ** 6, 10 ** 6) for _ in range(rng.randint(1, 5))]
            if witt.ghost_transform(witt.ghost_transform(v, Z), Z, "from-ghost") != v:
                bad.append(("ghost", p, v))
    for ring in (witt.Ring.fq(2), witt.Ring.fq(3), witt.Ring.zmod(2, 2), witt.Ring.zmod(3, 2)):
        elems = list(ring.elements())
        for _ in range(200):
            L = rng.randint(1, 4)
            a, b, c = (witt.WittVector(ring, [rng.choice(elems) for _ in range(L)]) for _ in range(3))
            if witt.witt_add(a, b) != witt.witt_add(b, a):
                bad.append(("commutative", str(ring), str(a), str(b)))
            if witt.witt_add(witt.witt_add(a, b), c) != witt.witt_add(a, witt.witt_add(b, c)):
                bad.append(("associative", str(ring), str(a), str(b), str(c)))
    report(9, "Witt polynomials, ghost round trip, group laws", not bad, str(bad[:2]) if bad else "800 triples")


def test_criterion_10_addition_law(report):
    bad = []
    for p in (2, 3):
        psi = psi_table(p, 1, 64)
        for x, y in addition_pairs(p, 20, SEED + p):
            res = analysis.addition_law_check(psi, x, y, 4)
            if not addition_ok(res):
                bad.append((p, res))
        ctx = FieldContext(p)
        degen = analysis.addition_law_check(psi, from_rational(ctx, 7, 1, 40), ctx.zero(), 4)
        if any(r != math.inf for r in degen):
            bad.append((p, "y=0", degen))
    report(10, "covector addition law residuals", not bad, str(bad[:2]) if bad else "40 pairs")


def test_criterion_11_uniform_continuity(report):
    ok = {p: analysis.uniform_continuity_check(psi_table(p, 1, 64), 200, 6, SEED + p) for p in (2, 3)}
    report(11, "uniform continuity on 200 samples", all(ok.values()), str(ok))


def test_criterion_12_teichmuller_limit(report):
    bad, done = [], 0
    rng = random.Random(SEED + 12)
    for p in (2, 3):
        ctx, psi = FieldContext(p), psi_table(p, 1, 64)
        count = 0
        while count < 20:
            x = analysis.random_rational(rng, p, 3)
            xs = from_rational(ctx, x.numerator, x.denominator)
            # p^i x must be a unit, so i is pinned to -v(x)
            i = max(-xs.valuation, 0)
            try:
                ok = analysis.teichmuller_limit_check(psi, xs, i, 8)
            except analysis.ZeroDigit:
                continue
            count += 1
            if not ok:
                bad.append((p, str(x), i))
        done += count
    report(12, "Psi(p^i x)^(p^k) -> Teichmuller digit at rate k+1", not bad, f"{done - len(bad)}/{done}")
