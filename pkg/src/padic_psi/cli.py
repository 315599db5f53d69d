"""Command-line front end: coefficients, polygons, zeros, digits, evaluation, checks."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable

from . import analysis, polygons, witt
from .padic import FieldContext, digit_expansion, from_rational, is_prime, parse_scalar, vp
from .psi import PsiTable, check_candilera, functional_residual, solve_psi, solve_u

OUTPUT_DIR_ENV = "PADIC_PSI_OUTPUT_DIR"
DEFAULT_SEED = 20240601
SUITES = ("functional", "candilera", "polygon", "digits", "addition",
          "uniform", "witt", "zeros", "appendix")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    p: int = 2
    f: int = 1
    degree: int | None = None
    precision: int = 64
    seed: int = DEFAULT_SEED
    fmt: str = "text"
    output: str | None = None
    modulus: tuple[int, ...] | None = None
    max_q: int = 16

    def __post_init__(self):
        if not is_prime(self.p):
            raise ConfigError(f"p={self.p} is not prime")
        if self.f < 1:
            raise ConfigError("f must be >= 1")
        if self.p ** self.f > self.max_q:
            raise ConfigError(f"q = {self.p ** self.f} exceeds the size guard {self.max_q}")
        if self.degree is not None and self.degree < 1:
            raise ConfigError("degree must be >= 1")
        if self.fmt not in ("json", "csv", "text"):
            raise ConfigError(f"unknown format {self.fmt!r}")

    @property
    def q(self) -> int:
        return self.p ** self.f

    def context(self) -> FieldContext:
        try:
            return FieldContext(self.p, self.f, self.modulus, self.precision)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def default_degree(self) -> int:
        return self.degree if self.degree is not None else 64


_TABLES: dict[tuple[int, int, int], PsiTable] = {}


def psi_table(p: int, f: int, N: int) -> PsiTable:
    key = (p, f, N)
    if key not in _TABLES:
        _TABLES[key] = solve_psi(p, f, N)
    return _TABLES[key]


# -- output helpers -------------------------------------------------------------


def _resolve_output(path: str | None) -> Path | None:
    if path is None:
        return None
    out = Path(path)
    if not out.is_absolute():
        out = Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / out
    return out


def emit(cfg: RunConfig, text: str):
    out = _resolve_output(cfg.output)
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text if text.endswith("\n") else text + "\n")


def _csv(rows: list[list], header: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _text_table(rows: list[list], header: list[str]) -> str:
    cols = [header] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cols) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cols]
    return "\n".join(lines) + "\n"


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _valtext(v) -> str | int:
    return "inf" if v == math.inf else int(v)


# -- coeffs --------------------------------------------------------------------------


def factor_text(value: int, p: int) -> str:
    if value == 0:
        return "0"
    k = vp(value, p)
    cof = value // p ** k
    sign = "-" if cof < 0 else ""
    return f"{sign}{p}^{k}*{abs(cof)}"


def cmd_coeffs(cfg: RunConfig) -> int:
    N = cfg.default_degree()
    psi = psi_table(cfg.p, cfg.f, N)
    rows = []
    for n in range(1, N + 1):
        b = psi.b(n)
        if b:
            rows.append([n, str(b), vp(b, cfg.p), factor_text(b, cfg.p)])
    header = ["n", "b_n", "valuation", "factored"]
    if cfg.fmt == "json":
        emit(cfg, _json({
            "p": cfg.p, "f": cfg.f, "q": cfg.q, "degree": N,
            "iterations": psi.iterations_used,
            "rows": [{"n": r[0], "value": r[1], "valuation": r[2], "factored": r[3]} for r in rows],
        }))
    elif cfg.fmt == "csv":
        emit(cfg, _csv(rows, header))
    else:
        emit(cfg, _text_table(rows, header))
    return 0


# -- polygon ----------------------------------------------------------------------


def _i_max(q: int, N: int) -> int:
    i = 0
    while q ** (i + 1) <= N:
        i += 1
    return i


def cmd_polygon(cfg: RunConfig, kind: str, emit_closed_form: bool) -> int:
    N = cfg.default_degree()
    psi = psi_table(cfg.p, cfg.f, N)
    vals = psi.valuations()
    newton = polygons.newton_polygon(vals)
    computed = newton if kind == "newton" else polygons.valuation_polygon(vals)
    doc: dict = {"p": cfg.p, "f": cfg.f, "q": cfg.q, "degree": N, "kind": kind,
                 "computed": computed.to_dict()}
    verdict = None
    if emit_closed_form:
        i_max = _i_max(cfg.q, N)
        if kind == "newton":
            closed = polygons.closed_form_newton(cfg.q, i_max)
            ok = polygons.compare_with_closed_form(newton, cfg.q, N)
        else:
            closed = polygons.closed_form_valuation(cfg.q, i_max)
            ok = (polygons.compare_with_closed_form(newton, cfg.q, N)
                  and polygons.dual_polygon(newton) == computed)
        verdict = "match" if ok else "mismatch"
        doc["closed_form"] = closed.to_dict()
        doc["verdict"] = verdict
    if cfg.fmt == "json":
        emit(cfg, _json(doc))
    elif cfg.fmt == "csv":
        rows = [["computed", x, y] for x, y in computed.to_rows()]
        if emit_closed_form:
            rows += [["closed_form", x, y] for x, y in polygons.Polygon.from_dict(doc["closed_form"]).to_rows()]
        emit(cfg, _csv(rows, ["source", "x", "y"]))
        if verdict:
            print(f"verdict: {verdict}", file=sys.stderr)
    else:
        lines = [f"{kind} polygon of Psi_{cfg.q} to degree {N}"]
        lines += [f"  ({x}, {y})" for x, y in computed.to_rows()]
        if verdict:
            lines.append(f"closed form: {verdict}")
        emit(cfg, "\n".join(lines))
    return 0 if verdict in (None, "match") else 1


# -- zeros / decompose / eval ------------------------------------------------------


def zeros_degree(q: int, n: int, t: int) -> int:
    """Series length that find_zeros(n, t) needs, per its working precision."""
    work = t + 2 * n + 8
    return max(analysis.truncation_bound(q, n, work), analysis.truncation_bound(q, n, work - n) + 1)


def cmd_zeros(cfg: RunConfig, n: int, target: int) -> int:
    N = max(cfg.default_degree(), zeros_degree(cfg.q, n, target))
    psi = psi_table(cfg.p, cfg.f, N)
    recs = analysis.find_zeros(psi, n, target, ctx=cfg.context())
    factor = analysis.schnirelmann_factor(recs)
    doc = {
        "p": cfg.p, "f": cfg.f, "q": cfg.q, "n": n, "target": target, "degree": N,
        "count": len(recs),
        "expected_count": cfg.q ** n - cfg.q ** (n - 1),
        "zeros": [r.to_dict(digits=target + n) for r in recs],
        "factor_valuations": [_valtext(c.val()) for c in factor],
        "factor_ok": analysis.schnirelmann_check(factor, n),
    }
    if cfg.fmt == "json":
        emit(cfg, _json(doc))
    elif cfg.fmt == "csv":
        rows = [[r["n"], " ".join(map(str, r["residue_class"])), r["zero_digits"]["start"],
                 " ".join(map(str, r["zero_digits"]["digits"])), r["residual_valuation"]] for r in doc["zeros"]]
        emit(cfg, _csv(rows, ["n", "residue_class", "start", "zero_digits", "residual_valuation"]))
    else:
        lines = [f"{len(recs)} zeros of Psi_{cfg.q} of valuation -{n} (expected {doc['expected_count']})"]
        for r in doc["zeros"]:
            lines.append(f"  class {r['residue_class']}: digits from {r['zero_digits']['start']}: "
                         f"{r['zero_digits']['digits']}  residual v >= {r['residual_valuation']}")
        emit(cfg, "\n".join(lines))
    return 0


def cmd_decompose(cfg: RunConfig, value: str, count: int) -> int:
    ctx = cfg.context()
    psi = psi_table(cfg.p, cfg.f, cfg.default_degree())
    a = parse_scalar(ctx, value, max(cfg.precision, count))
    ds = analysis.witt_bivector_decompose(psi, a, count)
    oracle = digit_expansion(a, count)
    doc = {"p": cfg.p, "f": cfg.f, "value": value, "start": ds.start, "digits": ds.digits,
           "oracle_digits": oracle.digits, "agree": ds == oracle}
    if cfg.fmt == "json":
        emit(cfg, _json(doc))
    elif cfg.fmt == "csv":
        rows = [[ds.start + k, d, oracle.digits[k]] for k, d in enumerate(ds.digits)]
        emit(cfg, _csv(rows, ["position", "digit", "oracle_digit"]))
    else:
        emit(cfg, f"{value}: digits from position {ds.start}: {ds.digits} "
                  f"({'agrees' if doc['agree'] else 'DISAGREES'} with the digit expansion)")
    return 0 if doc["agree"] else 1


def cmd_eval(cfg: RunConfig, x: str, target: int) -> int:
    ctx = cfg.context()
    psi = psi_table(cfg.p, cfg.f, cfg.default_degree())
    xs = parse_scalar(ctx, x, cfg.precision)
    y = analysis.eval_psi(psi, xs, target)
    rep = [0] * cfg.f if y.is_zero else list(y.lift_vector(target))
    doc = {"p": cfg.p, "f": cfg.f, "x": x, "target": target,
           "valuation": _valtext(y.val()) if not y.is_zero else f">={target}",
           "representative": [str(c) for c in rep], "modulus": str(cfg.p ** target)}
    if cfg.fmt == "json":
        emit(cfg, _json(doc))
    elif cfg.fmt == "csv":
        emit(cfg, _csv([[x, target, " ".join(doc["representative"])]], ["x", "target", "representative"]))
    else:
        r = doc["representative"][0] if cfg.f == 1 else doc["representative"]
        emit(cfg, f"Psi_{cfg.q}({x}) = {r} mod {doc['modulus']}")
    return 0


# -- verify -----------------------------------------------------------------------


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerifyOptions:
    fixtures: Path | None = None
    samples: int | None = None
    extra: dict = field(default_factory=dict)


def _fixture_path(opts: VerifyOptions, name: str):
    if opts.fixtures is not None:
        return Path(opts.fixtures) / name
    return resources.files("padic_psi").joinpath("data", name)


def _load_fixture(opts: VerifyOptions, name: str) -> dict:
    return json.loads(_fixture_path(opts, name).read_text())


def suite_functional(cfg: RunConfig, opts: VerifyOptions) -> list[CheckResult]:
    N = cfg.default_degree()
    res = functional_residual(psi_table(cfg.p, cfg.f, N))
    return [CheckResult("functional", f"residual q={cfg.q} N={N}", res is None,
                        "clean" if res is None else f"first nonzero degree {res}")]


def suite_candilera(cfg: RunConfig, opts: VerifyOptions) -> list[CheckResult]:
    N = cfg.default_degree()
    psi = psi_table(cfg.p, cfg.f, N)
    u = solve_u(cfg.p, cfg.f, -(-(N - 1) // (cfg.q - 1)))
    ok = check_candilera(psi, u)
    sparse = all(psi.b(n) == 0 for n in range(N + 1) if (n - 1) % (cfg.q - 1))
    return [CheckResult("candilera", f"Psi = T u(T^(q-1)) q={cfg.q} N={N}", ok),
            CheckResult("candilera", "only exponents 1 mod (q-1)", sparse)]


def suite_polygon(cfg: RunConfig, opts: VerifyOptions) -> list[CheckResult]:
    N = cfg.default_degree()
    vals = psi_table(cfg.p, cfg.f, N).valuations()
    nw = polygons.newton_polygon(vals)
    va = polygons.valuation_polygon(vals)
    i_max = _i_max(cfg.q, N)
    counts = polygons.zero_counts(polygons.closed_form_newton(cfg.q, i_max))
    counts_ok = all(c == (-(k + 1), cfg.q ** (k + 1) - cfg.q ** k) for k, c in enumerate(counts))
    bound_ok = all(v >= polygons.newton_lower_bound(cfg.q, n) for n, v in vals)
    return [
        CheckResult("polygon", "Newton vertices equal closed form", polygons.compare_with_closed_form(nw, cfg.q, N)),
        CheckResult("polygon", "valuation polygon = dual of Newton polygon", polygons.dual_polygon(nw) == va),
        CheckResult("polygon", "Newton polygon = dual of valuation polygon", polygons.dual_polygon(va) == nw),
        CheckResult("polygon", "zero counts q^n - q^(n-1)", counts_ok, str([(str(s), str(l)) for s, l in counts])),
        CheckResult("polygon", "v(b_n) above closed-form bound", bound_ok),
    ]


def suite_digits(cfg: RunConfig, opts: VerifyOptions) -> list[CheckResult]:
    ctx = cfg.context()
    psi = psi_table(cfg.p, cfg.f, cfg.default_degree())
    rng = random.Random(cfg.seed)
    samples = opts.samples or 100
    bad_seq, bad_dec = [], []
    for _ in range(samples):
        a = analysis.random_integral(rng, ctx, 24)
        if a.is_zero:
            continue
        seq = analysis.a_sequence_oracle(ctx, a, 4)
        if seq != [analysis.psi_digit(psi, a, i) for i in range(5)]:
            bad_seq.append(repr(a))
    out = [CheckResult("digits", f"Psi digits = a-sequence on {samples} samples", not bad_seq, "; ".join(bad_seq[:3]))]
    if cfg.f == 1:
        for _ in range(samples):
            x = analysis.random_rational(rng, cfg.p, 4)
            count = rng.randint(1, 12)
            a = from_rational(ctx, x.numerator, x.denominator, 40)
            if analysis.witt_bivector_decompose(psi, a, count) != digit_expansion(a, count):
                bad_dec.append(str(x))
        out.append(CheckResult("digits", f"Psi decomposition = digit expansion on {samples} samples",
                               not bad_dec, "; ".join(bad_dec[:3])))
        bad_cong = []
        for _ in range(50):
            x = analysis.random_rational(rng, cfg.p, 3)
            i = rng.randint(0, 3)
            if not analysis.bivector_congruence_check(psi, from_rational(ctx, x.numerator, x.denominator), i):
                bad_cong.append(f"{x}, i={i}")
        out.append(CheckResult("digits", "Psi-power sums reproduce a mod p^(i+1)", not bad_cong, "; ".join(bad_cong[:3])))
    bad_unit = 0
    for _ in range(samples):
        a = analysis.random_integral(rng, ctx, 20, unit=True)
        if (analysis.eval_psi(psi, a, 1) - a).val() < 1:
            bad_unit += 1
    out.append(CheckResult("digits", f"Psi(a) = a mod p on {samples} units", bad_unit == 0, f"{bad_unit} failures"))
    return out


def addition_pairs(p: int, count: int, seed: int, absprec: int = 40):
    ctx = FieldContext(p)
    rng = random.Random(seed)
    return [(analysis.random_integral(rng, ctx, absprec), analysis.random_integral(rng, ctx, absprec))
            for _ in range(count)]


def addition_ok(res: list) -> bool:
    """Finite, nondecreasing from n=1 on, and above 10 by n=4."""
    tail = res[1:]
    return (all(r != math.inf for r in res)
            and all(a <= b for a, b in zip(tail, tail[1:]))
            and (len(res) < 5 or res[4] > 10))


def suite_addition(cfg: RunConfig, opts: VerifyOptions) -> list[CheckResult]:
    if cfg.f != 1:
        return [CheckResult("addition", "skipped: covector law checked for q = p only", True)]
    psi = psi_table(cfg.p, 1, cfg.default_degree())
    ctx = FieldContext(cfg.p)
    bad = []
    for x, y in addition_pairs(cfg.p, opts.samples or 20, cfg.seed):
        res = analysis.addition_law_check(psi, x, y, 4)
        if not addition_ok(res):
            bad.append(f"{x!r}, {y!r}: {res}")
    degen = analysis.addition_law_check(psi, ctx.one(), ctx.zero(), 4)
    return [CheckResult("addition", "residuals finite, nondecreasing, > 10 by n=4", not bad, "; ".join(bad[:2])),
            CheckResult("addition", "y = 0 gives exact zero residuals", all(r == math.inf for r in degen), str(degen))]


def suite_uniform(cfg: RunConfig, opts: VerifyOptions) -> list[CheckResult]:
    if cfg.f != 1:
        return [CheckResult("uniform", "skipped: checked for q = p only", True)]
    psi = psi_table(cfg.p, 1, cfg.default_degree())
    samples = opts.samples or 200
    rows = analysis.uniform_continuity_samples(psi, samples, 6, cfg.seed)
    bad = [r for r in rows if r[3] < r[2]]
    out = [CheckResult("uniform", f"v(Psi(x+d) - Psi(x)) >= v(d) on {samples} samples", not bad,
                       "; ".join(f"x={r[0]} d={r[1]}" for r in bad[:3]))]
    ctx = FieldContext(cfg.p)
    rng = random.Random(cfg.seed + 1)
    bad_t = []
    checked = 0
    while checked < 20:
        x = analysis.random_rational(rng, cfg.p, 3)
        xs = from_rational(ctx, x.numerator, x.denominator)
        i = -xs.valuation
        try:
            ok = analysis.teichmuller_limit_check(psi, xs, i, 8)
        except analysis.ZeroDigit:
            continue
        checked += 1
        if not ok:
            bad_t.append(str(x))
    out.append(CheckResult("uniform", "Psi(p^i x)^(p^k) -> [x_-i] at rate k+1", not bad_t, "; ".join(bad_t[:3])))
    return out


def suite_witt(cfg: RunConfig, opts: VerifyOptions) -> list[CheckResult]:
    p = cfg.p
    n = 3 if p == 2 else 2 if p == 3 else 1
    phis = witt.phi_polynomials(p, n)
    out = [CheckResult("witt", f"phi_0..phi_{n} isobaric", witt.isobaric_check(phis, p)),
           CheckResult("witt", f"phi_0..phi_{n} shift congruence", witt.shift_congruence_check(phis, p))]
    rng = random.Random(cfg.seed)
    Z = witt.Ring.integers(p)
    trip = all(
        witt.ghost_transform(witt.ghost_transform(v, Z), Z, "from-ghost") == v
        for v in ([rng.randint(-10 ** 6, 10 ** 6) for _ in range(4)] for _ in range(20))
    )
    out.append(CheckResult("witt", "ghost round trip over Z", trip))
    bad = []
    for ring in (witt.Ring.fq(p), witt.Ring.zmod(p, 2), witt.Ring.fq(p, 2)):
        for _ in range(opts.samples or 50):
            L = rng.randint(1, 4)
            a, b, c = (witt.WittVector(ring, [rng.choice(ring.elements()) for _ in range(L)]) for _ in range(3))
            if witt.witt_add(a, b) != witt.witt_add(b, a) or \
                    witt.witt_add(witt.witt_add(a, b), c) != witt.witt_add(a, witt.witt_add(b, c)):
                bad.append(f"{ring}: {a}, {b}, {c}")
            if ring.characteristic_p and \
                    witt.truncate(witt.frobenius(witt.verschiebung(a)), L) != witt.witt_multiple(a, p):
                bad.append(f"FV != p on {a}")
    out.append(CheckResult("witt", "Witt addition commutative, associative; FV = p", not bad, "; ".join(bad[:2])))
    return out


def suite_zeros(cfg: RunConfig, opts: VerifyOptions) -> list[CheckResult]:
    q = cfg.q
    top = 3 if q == 2 else 2 if q <= 4 else 1
    t = 20
    N = max(cfg.default_degree(), zeros_degree(q, top, t))
    psi = psi_table(cfg.p, cfg.f, N)
    out = []
    factors = []
    for n in range(1, top + 1):
        recs = analysis.find_zeros(psi, n, t, ctx=cfg.context())
        ok = (len(recs) == q ** n - q ** (n - 1)
              and all(r.zero.valuation == -n and r.residual_valuation >= t for r in recs))
        out.append(CheckResult("zeros", f"{len(recs)} zeros of valuation -{n}", ok))
        fac = analysis.schnirelmann_factor(recs)
        factors.append(fac)
        out.append(CheckResult("zeros", f"Schnirelmann factor psi_{n} in 1 + p^{n} x Z_q[x]",
                               analysis.schnirelmann_check(fac, n)))
        rows = analysis.partial_product_check(psi, factors)
        bad = [r for r in rows if r[1] < r[2]]
        out.append(CheckResult("zeros", f"x psi_1..psi_{n} matches Psi to degree {q ** n}", not bad, str(bad[:3])))
    return out


def suite_appendix(cfg: RunConfig, opts: VerifyOptions) -> list[CheckResult]:
    out = []
    p = cfg.p
    if cfg.f != 1:
        return [CheckResult("appendix", "no tables for f > 1", True)]
    if p == 2:
        rows = _load_fixture(opts, "psi2_coefficients.json")["coefficients"]
        psi = psi_table(2, 1, max(r["n"] for r in rows))
        bad = [r["n"] for r in rows if int(r["value"]) != psi.b(r["n"])]
        out.append(CheckResult("appendix", f"Psi_2 exact coefficients ({len(rows)} rows)", not bad,
                               f"mismatch at n={bad}" if bad else ""))
    for name in (f"psi{p}_valuations.json",):
        try:
            rows = _load_fixture(opts, name)["valuations"]
        except FileNotFoundError:
            continue
        psi = psi_table(p, 1, max(r["n"] for r in rows))
        bad = [r["n"] for r in rows if vp(psi.b(r["n"]), p) != r["valuation"]]
        out.append(CheckResult("appendix", f"v_{p}(b_n) table ({len(rows)} rows)", not bad,
                               f"mismatch at n={bad}" if bad else ""))
    for series in _load_fixture(opts, "leading_terms.json")["series"]:
        if series["p"] != p:
            continue
        psi = psi_table(p, 1, max(t["n"] for t in series["terms"]))
        bad = []
        for t in series["terms"]:
            b = psi.b(t["n"])
            if "valuation" in t:
                ok = vp(b, p) == t["valuation"]
            else:
                ok = b == t["sign"] * math.prod(t["cofactor"]) * p ** t["p_power"]
            if not ok:
                bad.append(t["n"])
        out.append(CheckResult("appendix", f"Psi_{p} leading terms ({len(series['terms'])} rows)", not bad,
                               f"mismatch at n={bad}" if bad else ""))
    if not out:
        out.append(CheckResult("appendix", f"no tables for p={p}", True))
    return out


SUITE_FUNCS: dict[str, Callable[[RunConfig, VerifyOptions], list[CheckResult]]] = {
    "functional": suite_functional,
    "candilera": suite_candilera,
    "polygon": suite_polygon,
    "digits": suite_digits,
    "addition": suite_addition,
    "uniform": suite_uniform,
    "witt": suite_witt,
    "zeros": suite_zeros,
    "appendix": suite_appendix,
}


def run_suites(cfg: RunConfig, suite: str, opts: VerifyOptions | None = None) -> list[CheckResult]:
    opts = opts or VerifyOptions()
    names = SUITES if suite == "all" else (suite,)
    results = []
    for name in names:
        try:
            results.extend(SUITE_FUNCS[name](cfg, opts))
        except Exception as exc:  # a crashing suite is a failing suite
            results.append(CheckResult(name, "suite raised", False, f"{type(exc).__name__}: {exc}"))
    return results


def cmd_verify(cfg: RunConfig, suite: str, opts: VerifyOptions) -> int:
    results = run_suites(cfg, suite, opts)
    passed = all(r.passed for r in results)
    if cfg.fmt == "json":
        emit(cfg, _json({"p": cfg.p, "f": cfg.f, "suite": suite, "seed": cfg.seed, "passed": passed,
                         "checks": [r.__dict__ for r in results]}))
    elif cfg.fmt == "csv":
        emit(cfg, _csv([[r.suite, r.name, "pass" if r.passed else "FAIL", r.detail] for r in results],
                       ["suite", "check", "result", "detail"]))
    else:
        lines = [f"{'PASS' if r.passed else 'FAIL'}  [{r.suite}] {r.name}" + (f"  ({r.detail})" if r.detail else "")
                 for r in results]
        lines.append(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
        emit(cfg, "\n".join(lines))
    if not passed:
        first = next(r for r in results if not r.passed)
        print(f"first failure: [{first.suite}] {first.name} {first.detail}", file=sys.stderr)
    return 0 if passed else 1


# -- argument parsing ------------------------------------------------------------


def _modulus(text: str) -> tuple[int, ...]:
    return tuple(int(c) for c in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=2, help="the prime p")
    common.add_argument("--f", type=int, default=1, help="residue degree, q = p^f")
    common.add_argument("--modulus", type=_modulus, default=None,
                        help="monic modulus coefficients, low to high, e.g. 1,1,1")
    common.add_argument("--degree", type=int, default=None, help="series truncation degree (default 64)")
    common.add_argument("--precision", type=int, default=64, help="p-adic working precision")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "text"), default="text")
    common.add_argument("--output", default=None,
                        help=f"output file (relative paths resolve under ${OUTPUT_DIR_ENV})")
    common.add_argument("--max-q", type=int, default=16, help="refuse q above this")

    parser = argparse.ArgumentParser(prog="padic-psi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("coeffs", parents=[common], help="exact coefficients b_n")
    pp = sub.add_parser("polygon", parents=[common], help="Newton or valuation polygon")
    pp.add_argument("--kind", choices=("newton", "valuation"), default="newton")
    pp.add_argument("--emit-closed-form", action="store_true")
    pz = sub.add_parser("zeros", parents=[common], help="zeros of valuation -n")
    pz.add_argument("--n", type=int, required=True)
    pz.add_argument("--target", type=int, default=20)
    pd = sub.add_parser("decompose", parents=[common], help="Teichmuller digits via Psi")
    pd.add_argument("--value", required=True, help='"num/den", an integer, or "v:d0,d1,..."')
    pd.add_argument("--digits", type=int, default=8)
    pe = sub.add_parser("eval", parents=[common], help="Psi(x) modulo p^target")
    pe.add_argument("--x", required=True)
    pe.add_argument("--target", type=int, default=10)
    pv = sub.add_parser("verify", parents=[common], help="run check suites")
    pv.add_argument("--suite", choices=SUITES + ("all",), default="all")
    pv.add_argument("--fixtures", type=Path, default=None, help="directory with table fixtures")
    pv.add_argument("--samples", type=int, default=None, help="override sample counts")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(p=args.p, f=args.f, degree=args.degree, precision=args.precision, seed=args.seed,
                        fmt=args.fmt, output=args.output, modulus=args.modulus, max_q=args.max_q)
        cfg.context()
        if args.command == "coeffs":
            return cmd_coeffs(cfg)
        if args.command == "polygon":
            return cmd_polygon(cfg, args.kind, args.emit_closed_form)
        if args.command == "zeros":
            return cmd_zeros(cfg, args.n, args.target)
        if args.command == "decompose":
            return cmd_decompose(cfg, args.value, args.digits)
        if args.command == "eval":
            return cmd_eval(cfg, args.x, args.target)
        return cmd_verify(cfg, args.suite, VerifyOptions(args.fixtures, args.samples))
    except (ConfigError, ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
