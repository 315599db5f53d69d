import csv
import io
import json
from pathlib import Path

import jsonschema
import pytest

from padic_psi.cli import OUTPUT_DIR_ENV, ConfigError, RunConfig, main, run_suites

SCHEMAS = Path(__file__).resolve().parent.parent / "docs" / "schemas"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv, schema=None):
    code, out, _ = run(capsys, *argv, "--format", "json")
    doc = json.loads(out)
    if schema:
        jsonschema.validate(doc, json.loads((SCHEMAS / f"{schema}.schema.json").read_text()))
    return code, doc


def test_coeffs_rows(capsys):
    code, doc = run_json(capsys, "coeffs", "--p", "2", "--degree", "9", schema="coeffs")
    assert code == 0
    row = doc["rows"][-1]
    assert row == {"n": 9, "value": "20711204716544", "valuation": 26, "factored": "2^26*308621"}
    _, doc = run_json(capsys, "coeffs", "--p", "3", "--degree", "7", schema="coeffs")
    assert doc["rows"][-1]["value"] == "-4960116" and doc["rows"][-1]["valuation"] == 11
    _, doc = run_json(capsys, "coeffs", "--p", "2", "--degree", "1", schema="coeffs")
    assert [(r["n"], r["value"], r["valuation"]) for r in doc["rows"]] == [(1, "1", 0)]


def test_coeffs_csv_has_header_and_exact_values(capsys):
    code, out, _ = run(capsys, "coeffs", "--p", "2", "--degree", "24", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["n", "b_n", "valuation", "factored"]
    assert rows[-1][1].startswith("-1227258187586069935")


def test_polygon_closed_form_verdict(capsys):
    code, doc = run_json(capsys, "polygon", "--p", "2", "--degree", "32", "--kind", "newton",
                         "--emit-closed-form", schema="polygon")
    assert code == 0 and doc["verdict"] == "match"
    assert doc["computed"]["vertices"][0] == {"x": "-32", "y": "129"}


def test_polygon_valuation_psi3(capsys):
    _, doc = run_json(capsys, "polygon", "--p", "3", "--degree", "81", "--kind", "valuation", schema="polygon")
    xy = [(v["x"], v["y"]) for v in doc["computed"]["vertices"]]
    assert xy == [("-4", "-40"), ("-3", "-13"), ("-2", "-4"), ("-1", "-1")]


def test_polygon_degenerate(capsys):
    code, doc = run_json(capsys, "polygon", "--degree", "2", schema="polygon")
    assert code == 0 and len(doc["computed"]["lines"]) == 1


def test_polygon_csv(capsys):
    _, out, _ = run(capsys, "polygon", "--p", "2", "--degree", "8", "--format", "csv", "--emit-closed-form")
    lines = out.splitlines()
    assert lines[0] == "source,x,y" and "computed,-8,17" in lines and "closed_form,-8,17" in lines


def test_zeros_command(capsys):
    code, doc = run_json(capsys, "zeros", "--p", "2", "--n", "1", "--target", "20", schema="zeros")
    assert code == 0 and doc["count"] == 1 == len(doc["zeros"])
    z = doc["zeros"][0]
    assert z["valuation"] == -1 and z["residual_valuation"] >= 20 and z["zero_digits"]["start"] == -1


def test_decompose_command(capsys):
    code, doc = run_json(capsys, "decompose", "--p", "2", "--value", "7/8", "--digits", "8", schema="decompose")
    assert code == 0 and doc["start"] == -3 and doc["agree"]
    assert doc["digits"] == [1, 1, 1, 0, 0, 0, 0, 0]
    _, doc = run_json(capsys, "decompose", "--p", "3", "--value=-1:1,2,1", "--digits", "3")
    assert (doc["start"], doc["digits"]) == (-1, [1, 2, 1])


def test_eval_command(capsys):
    code, doc = run_json(capsys, "eval", "--p", "3", "--x", "5", "--target", "1", schema="eval")
    assert code == 0 and doc["representative"] == ["2"] and doc["modulus"] == "3"
    _, out, _ = run(capsys, "eval", "--p", "3", "--x", "5", "--target", "1")
    assert out.strip() == "Psi_3(5) = 2 mod 3"


def test_verify_appendix(capsys):
    code, doc = run_json(capsys, "verify", "--suite", "appendix", "--p", "2", schema="verify")
    assert code == 0 and doc["passed"] and len(doc["checks"]) == 2


def test_verify_corrupted_fixture(capsys, tmp_path, fixtures):
    for name in ("psi2_coefficients.json", "psi2_valuations.json", "psi3_valuations.json", "leading_terms.json"):
        (tmp_path / name).write_text(json.dumps(fixtures(name)))
    doc = fixtures("psi2_coefficients.json")
    doc["coefficients"][16]["value"] = str(int(doc["coefficients"][16]["value"]) + 1)
    (tmp_path / "psi2_coefficients.json").write_text(json.dumps(doc))
    code, out, err = run(capsys, "verify", "--suite", "appendix", "--p", "2", "--fixtures", str(tmp_path))
    assert code == 1
    assert "mismatch at n=[17]" in out and "n=[17]" in err


def test_verify_all_p3(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "all", "--p", "3", "--seed", "42")
    assert code == 0, out
    assert "FAIL" not in out


def test_repeated_runs_are_byte_identical(capsys):
    args = ("verify", "--suite", "digits", "--p", "2", "--samples", "10", "--format", "json")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_output_dir_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
    code, out, _ = run(capsys, "coeffs", "--degree", "4", "--output", "sub/c.csv", "--format", "csv")
    assert code == 0 and out == ""
    assert (tmp_path / "sub" / "c.csv").read_text().splitlines()[-1] == "4,-352,5,-2^5*11"


@pytest.mark.parametrize("argv", [
    ["coeffs", "--p", "4"],
    ["coeffs", "--p", "17"],
    ["coeffs", "--p", "2", "--f", "5"],
    ["eval", "--p", "2", "--x", "1/0"],
    ["coeffs", "--p", "2", "--f", "2", "--modulus", "1,0,1"],
])
def test_errors_exit_nonzero(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_size_guard_is_configurable():
    with pytest.raises(ConfigError):
        RunConfig(p=5, f=2)
    assert RunConfig(p=5, f=2, max_q=25).q == 25


def test_run_suites_reports_every_check():
    results = run_suites(RunConfig(p=2), "witt")
    assert results and all(r.passed for r in results)
