import csv
import io
import json
import math
import subprocess
import sys

import pytest

from ramc.cli import CSV_COLUMNS, run_cli
from ramc.verify import alpha_star_closed_forms


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def strip_elapsed(text):
    doc = json.loads(text)
    doc.pop("elapsed_ms")
    return doc


# -- exit codes ---------------------------------------------------------------


def test_verify_all_passes():
    code, out, _ = run("verify", "--suite", "all", "--a", "0.5", "--b", "0.5", "--p", "R",
                       "--n", "2000", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["command"] == "verify"
    assert doc["results"] and all(r["status"] == "pass" for r in doc["results"])


def test_eval_domain_error_exit_2():
    code, out, err = run("eval", "--a", "0.5", "--b", "0.5", "--x", "1.5")
    assert code == 2 and out == "" and "x must lie" in err


@pytest.mark.parametrize("argv", [
    ("frobnicate",),
    ("eval", "--a", "zero"),
    ("coeffs", "--a", "0.5", "--b", "0.5", "--p", "Rx"),
    ("coeffs", "--a", "0.5", "--b", "0.5", "--n", "0"),
    ("sweep", "--grid", "a:0.1:0.5"),
    ("verify", "--suite", "everything"),
    ("coeffs", "--a", "0.5"),
    ("sweep", "--a", "0.5", "--b", "0.5"),
    ("verify", "--suite", "special", "--c", "-1"),
])
def test_usage_and_domain_errors_exit_2(argv):
    assert run(*argv)[0] == 2


def test_size_cap_exit_2(monkeypatch):
    monkeypatch.setenv("RAMC_MAX_N", "50")
    code, _, err = run("coeffs", "--a", "0.5", "--b", "0.5", "--n", "51")
    assert code == 2 and "cap" in err


def test_failed_check_exit_1():
    # outside the proven range the first coefficient is negative: alpha_1 = -S(pi)/pi^2
    code, out, _ = run("sweep", "--grid", "p:3.1:3.3:2:linear", "--a", "0.5", "--b", "0.5",
                       "--n", "50")
    assert code == 1
    results = json.loads(out)["results"]
    assert results[-1]["check_name"] == "sweep_summary"
    assert results[-1]["status"] == "fail"


def test_exploratory_suite_does_not_fail():
    code, out, _ = run("verify", "--suite", "explore", "--n", "50")
    doc = json.loads(out)
    assert doc["results"][0]["exploratory"]
    assert doc["results"][0]["status"] == "inconclusive"
    assert code == 0


# -- output formats --------------------------------------------------------------


def test_coeffs_match_closed_forms_and_csv_format():
    code, out, _ = run("coeffs", "--a", "0.5", "--b", "0.5", "--p", "R", "--n", "3", "--csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 5
    alphas = [float(r[4]) for r in rows[1:]]
    for got, want in zip(alphas, alpha_star_closed_forms()):
        assert abs(got - want) <= 1e-12 * abs(want)
    for row in rows[1:]:
        for cell in row[1:]:
            # 17 significant digits round-trip every double exactly
            assert float(format(float(cell), ".17g")) == float(cell)
            digits = cell.lstrip("-").split("e")[0].replace(".", "").lstrip("0")
            assert len(digits) <= 17
    assert rows[2][1] == format(0.25, ".17g")


def test_csv_values_round_trip_exactly():
    code, out, _ = run("coeffs", "--a", "0.3", "--b", "0.4", "--p", "2.5", "--n", "20", "--csv")
    _, js, _ = run("coeffs", "--a", "0.3", "--b", "0.4", "--p", "2.5", "--n", "20", "--json")
    rows = list(csv.DictReader(io.StringIO(out)))
    ref = json.loads(js)["results"]
    for row, jrow in zip(rows, ref):
        for col in CSV_COLUMNS[1:]:
            assert float(row[col]) == jrow[col]


def test_json_schema_round_trip():
    _, out, _ = run("verify", "--suite", "bounds", "--json")
    doc = json.loads(out)
    assert set(doc) == {"command", "config", "results", "elapsed_ms"}
    assert json.loads(json.dumps(doc)) == doc
    rep = doc["results"][0]
    assert set(rep) >= {"check_name", "status", "grid", "worst_margin", "witness", "details",
                        "tolerance", "exploratory", "subchecks", "values"}
    assert rep["check_name"] == "k_bounds"
    assert doc["config"]["command"] == "verify" and doc["config"]["suite"] == "bounds"


def test_json_is_deterministic_apart_from_timing():
    argv = ("verify", "--suite", "special", "--c", "1.0", "--json")
    first, second = run(*argv)[1], run(*argv)[1]
    assert strip_elapsed(first) == strip_elapsed(second)
    lines1 = [ln for ln in first.splitlines() if '"elapsed_ms"' not in ln]
    lines2 = [ln for ln in second.splitlines() if '"elapsed_ms"' not in ln]
    assert lines1 == lines2


def test_parallel_output_matches_serial():
    base = ("verify", "--suite", "all", "--a", "0.3", "--b", "0.6", "--p", "2", "--n", "500")
    serial = strip_elapsed(run(*base)[1])
    parallel = strip_elapsed(run(*base, "--parallelism", "3")[1])
    serial["config"].pop("parallelism")
    parallel["config"].pop("parallelism")
    assert serial == parallel


def test_eval_values():
    code, out, _ = run("eval", "--a", "0.5", "--b", "0.5", "--x", "0.5", "--p", "R")
    assert code == 0
    vals = {r["quantity"]: r["value"] for r in json.loads(out)["results"]}
    assert abs(vals["beta"] - math.pi) <= 1e-15
    assert abs(vals["ramanujan_r"] - 4 * math.log(2)) <= 1e-14
    assert vals["theorem_scope"] is True
    code, out, _ = run("eval", "--r", "0.5", "--csv")
    assert code == 0 and out.startswith("quantity,value\nagm_complete_k,")
    code, out, _ = run("eval", "--c", "1", "--x", "0.5")
    vals = {r["quantity"]: r["value"] for r in json.loads(out)["results"]}
    assert abs(vals["delta_c"] - vals["delta_c_integral"]) <= 1e-12


def test_sweep_reports_each_cell_and_summary():
    code, out, _ = run("sweep", "--grid", "a:0.1:0.5:3:linear", "--grid", "b:0.2:0.4:2:linear",
                       "--constraint", "a+b<=1", "--n", "100", "--json")
    assert code == 0
    results = json.loads(out)["results"]
    assert len(results) == 3 * 2 + 1
    summary = results[-1]
    assert summary["check_name"] == "sweep_summary"
    assert summary["values"]["pass"] == 6.0
    cells = [(r["witness"]["a"], r["witness"]["b"]) for r in results[:-1]]
    assert cells == sorted(cells)


def test_sweep_continues_past_failures():
    code, out, _ = run("sweep", "--grid", "p:2:3.5:4:linear", "--a", "0.5", "--b", "0.5",
                       "--n", "100", "--csv")
    assert code == 1
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 5
    statuses = [r["status"] for r in rows[:-1]]
    assert statuses[0] == "pass" and statuses[-1] == "fail"


def test_bounds_grid():
    code, out, _ = run("bounds", "--grid", "r:0.1:0.9:9:linear")
    assert code == 0
    assert json.loads(out)["results"][0]["grid"]["dims"][0]["count"] == 9
    assert run("bounds", "--grid", "x:0.1:0.9:9:linear")[0] == 2


def test_out_file_utf8_lf(tmp_path):
    target = tmp_path / "table.csv"
    code, out, _ = run("coeffs", "--a", "0.5", "--b", "0.5", "--n", "5", "--csv",
                       "--out", str(target))
    assert code == 0 and out == ""
    raw = target.read_bytes()
    assert b"\r\n" not in raw and raw.endswith(b"\n")
    raw.decode("utf-8")
    assert raw.splitlines()[0].decode() == ",".join(CSV_COLUMNS)


def test_unwritable_out_path(tmp_path):
    code, _, err = run("eval", "--r", "0.5", "--out", str(tmp_path / "missing" / "x.json"))
    assert code == 2 and "cannot write" in err


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ramc", "eval", "--a", "0.5", "--b", "0.5",
                           "--x", "1.5"], capture_output=True, text=True)
    assert proc.returncode == 2
    proc = subprocess.run([sys.executable, "-m", "ramc", "--help"], capture_output=True,
                          text=True)
    assert proc.returncode == 0 and "verify" in proc.stdout
