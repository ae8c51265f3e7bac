import csv
import json
import subprocess
import sys

import pytest

from qdeform.cli import (Config, SuiteReport, eigen_table_rows, export_table, load_config, main, parse_q0,
                         parse_window, run_suite)
from qdeform.qarith import LAM, eval_at
from qdeform.qspecial import trig_lattice


def test_parse_helpers():
    assert parse_q0("11/10") == pytest.approx(1.1)
    assert parse_q0("1.5") == 1.5
    assert parse_window("-60:60") == (-60, 60)
    for bad in ("0", "-2", "x"):
        with pytest.raises(Exception):
            parse_q0(bad)
    for bad in ("5:1", "1-2", "a:b"):
        with pytest.raises(Exception):
            parse_window(bad)


def test_config_file_and_overrides(tmp_path):
    cfg_path = tmp_path / "c.json"
    cfg_path.write_text(json.dumps({"q0": "3/2", "window": [-10, 10], "tol": 1e-7}))
    cfg = load_config(str(cfg_path))
    assert cfg.q0 == 1.5 and cfg.window == (-10, 10) and cfg.tol == 1e-7
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nonsense": 1}))
    with pytest.raises(ValueError):
        load_config(str(bad))
    out = tmp_path / "r.json"
    assert main(["run", "--suite", "calculus", "--config", str(cfg_path), "--q0", "1.2",
                 "--format", "json", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["config"]["q0"] == pytest.approx(1.2)


def test_malformed_config_exit_code(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("[1, 2]")
    assert main(["run", "--suite", "calculus", "--config", str(p)]) == 2


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("bogus")
    with pytest.raises(SystemExit):
        main(["run", "--suite", "bogus"])


def test_report_ids_unique_and_failures_carry_witness():
    rep = SuiteReport("x")
    rep.add("a", True, 0.0)
    rep.add("b", False, 1.0)
    with pytest.raises(ValueError):
        rep.add("a", True)
    assert not rep.ok()
    assert [c.witness for c in rep.checks] == ["", "1"]


def test_rmatrix_suite_passes_except_half_normalized_p():
    rep = run_suite("rmatrix")
    failed = [c.id for c in rep.checks if c.status == "fail"]
    assert failed == ["rmatrix.heisenberg.heisenberg_p"]
    assert all(c.witness for c in rep.checks if c.status == "fail")
    assert len({c.id for c in rep.checks}) == len(rep.checks)


@pytest.mark.parametrize("suite", ["calculus", "special", "groups", "euclid", "representation"])
def test_green_suites(suite):
    rep = run_suite(suite)
    assert rep.ok(), [c for c in rep.checks if c.status == "fail"]


def test_fourier_suite_records_gram():
    rep = run_suite("fourier")
    ids = {c.id: c for c in rep.checks}
    assert ids["fourier.gram.sin"].status == "pass"
    assert ids["fourier.gram_wide.cos"].status == "pass"
    assert float(ids["fourier.gram.cos"].residual) > 1e-6


def test_exit_code_follows_failures(tmp_path):
    assert main(["run", "--suite", "groups"]) == 0
    assert main(["run", "--suite", "rmatrix", "--out", str(tmp_path / "r.txt")]) == 1


def test_json_report_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        main(["run", "--suite", "euclid", "--format", "json", "--out", str(p)])
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(a.read_text())
    ids = [c["id"] for c in data["checks"]]
    assert ids == sorted(ids) and "wall_time" not in data


@pytest.mark.parametrize("kind", ["fig12", "spectrum", "transform", "eigen_table"])
def test_exports_are_deterministic(kind, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for p in (a, b):
        assert main(["export", kind, "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_fig12_rows(tmp_path):
    p = tmp_path / "f.csv"
    assert export_table("fig12", Config(window=(-20, 20)), str(p)) == 41
    rows = list(csv.DictReader(open(p)))
    assert rows[20]["n"] == "0" and float(rows[20]["cos_q"]) == trig_lattice("cos", 0, 1.1)
    assert len(rows[0]["x"].replace(".", "").lstrip("0")) <= 17


def test_spectrum_has_both_families(tmp_path):
    p = tmp_path / "s.json"
    export_table("spectrum", Config(), str(p))
    rows = json.loads(p.read_text())
    assert {r["family"] for r in rows} == {"I", "II"}
    assert max(float(r["residual"]) for r in rows) < 1e-6
    assert max(float(r["h_residual"]) for r in rows) < 1e-6


def test_eigen_table_rows():
    rows = eigen_table_rows(1.1, ks=[0, 1])
    first = rows[0]
    assert first["subspace"] == "H_{sigma=+1}^{even}" and first["function"] == "cos_q(x q^1)"
    assert first["eigenvalue"] == "-q/lambda^2"
    lam = eval_at(LAM, 1.1)
    expo = {"-q^(4k+1)/lambda^2": 1, "-q^(4k+3)/lambda^2": 3, "-q^(4k-1)/lambda^2": -1}
    for r in rows:
        want = -(1.1 ** (4 * r["k"] + expo[r["formula"]])) / lam ** 2
        assert float(r["value"]) == pytest.approx(want, rel=1e-14)
    assert len(eigen_table_rows(1.1)) == 40


def test_export_needs_out():
    assert main(["export", "fig12"]) == 2


def test_export_io_error(tmp_path):
    assert main(["export", "fig12", "--out", str(tmp_path / "missing" / "f.csv")]) == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "qdeform", "run", "--suite", "euclid"], capture_output=True, text=True)
    assert r.returncode == 0 and "0 failed" in r.stdout


def test_negative_window_flag(tmp_path):
    p = tmp_path / "f.csv"
    assert main(["export", "fig12", "--window", "-5:5", "--out", str(p)]) == 0
    assert len(p.read_text().splitlines()) == 12
