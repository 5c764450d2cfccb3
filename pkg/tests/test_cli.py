"""Command-line interface: exit codes, artifacts, precedence, determinism."""

from __future__ import annotations

import csv
import json
import os

import pytest

from beltrami.cli import (EXIT_CASE, EXIT_CONFIG, EXIT_OK, EXIT_SURFACE,
                          SCHEMA_VERSION, load_report, main, merge_reports)
from beltrami.errors import ConfigParse

FAST = ["--surface", "plane", "--cases", "structure_eq_gauss", "--mode", "analytic"]


def _verify(tmp_path, *extra, sub="verify"):
    out = str(tmp_path)
    code = main([sub, "--out", out, *extra])
    return code, out


def _read_json(out):
    with open(os.path.join(out, "report.json"), encoding="utf-8") as fh:
        return json.load(fh)


def _read_csv(out, name="summary.csv"):
    with open(os.path.join(out, name), encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_verify_writes_artifacts_and_succeeds(tmp_path, capsys):
    code, out = _verify(tmp_path, *FAST)
    assert code == EXIT_OK
    doc = _read_json(out)
    assert doc["schema_version"] == SCHEMA_VERSION
    assert doc["config_echo"]["mode"] == "analytic"
    assert len(doc["reports"]) == 1
    assert doc["reports"][0]["verdict"] == "CONFIRMED"
    rows = _read_csv(out)
    assert rows[0] == ["id", "surface", "mode", "max_residual", "order", "verdict"]
    assert rows[1][0] == "structure_eq_gauss" and rows[1][-1] == "CONFIRMED"
    assert rows[1][4] == "n/a"  # no order column in analytic mode
    assert "CONFIRMED" in capsys.readouterr().out


def test_verify_is_byte_deterministic(tmp_path):
    code1, out = _verify(tmp_path, *FAST)
    with open(os.path.join(out, "report.json"), "rb") as fh:
        first = fh.read()
    code2, _ = _verify(tmp_path, *FAST)
    with open(os.path.join(out, "report.json"), "rb") as fh:
        second = fh.read()
    assert code1 == code2 == EXIT_OK
    assert first == second


def test_summary_rows_match_json_reports(tmp_path):
    _, out = _verify(tmp_path, "--surface", "sphere", "--cases", "gauss_bonnet*",
                     "--mode", "analytic")
    doc = _read_json(out)
    rows = _read_csv(out)[1:]
    assert len(rows) == len(doc["reports"])
    for row, rep in zip(rows, doc["reports"]):
        assert row[0] == rep["case_id"]
        assert row[5] == rep["verdict"]


def test_exit_codes_for_unknowns(tmp_path):
    assert _verify(tmp_path, "--cases", "no_such_case*")[0] == EXIT_CASE
    assert _verify(tmp_path, "--surface", "mobius")[0] == EXIT_SURFACE
    assert _verify(tmp_path, "--grid", "3")[0] == EXIT_CONFIG
    assert _verify(tmp_path, "--surface", "sphere:R=x")[0] == EXIT_CONFIG


def test_report_only_discrepancies_do_not_fail(tmp_path):
    code, out = _verify(tmp_path, "--surface", "sphere",
                        "--cases", "theorem_13_1_eq85", "--mode", "analytic")
    assert code == EXIT_OK
    rep = _read_json(out)["reports"][0]
    assert rep["verdict"] == "DISCREPANT"
    assert rep["expected"] == "report-only"


def test_empty_case_selection_is_ok(tmp_path):
    code, out = _verify(tmp_path, "--cases", "")
    assert code == EXIT_OK
    assert _read_json(out)["reports"] == []


def test_requested_surface_gets_skip_rows(tmp_path):
    code, out = _verify(tmp_path, "--surface", "plane",
                        "--cases", "image_gradient", "--mode", "analytic")
    assert code == EXIT_OK
    rep = _read_json(out)["reports"][0]
    assert rep["verdict"] == "SKIPPED"
    assert rep["reason"] == "nonflat-required"


def test_config_file_env_flag_precedence(tmp_path, monkeypatch):
    cfgfile = tmp_path / "run.json"
    cfgfile.write_text(json.dumps({"mode": "analytic", "surfaces": ["torus"],
                                   "cases": ["structure_eq_gauss"]}))
    out = str(tmp_path / "a")
    code = main(["verify", "--config", str(cfgfile), "--out", out])
    assert code == EXIT_OK
    assert _read_json(out)["config_echo"]["surfaces"] == ["torus"]

    # env overrides the file
    monkeypatch.setenv("BELTRAMI_SURFACE", "plane;cylinder")
    out2 = str(tmp_path / "b")
    code = main(["verify", "--config", str(cfgfile), "--out", out2])
    assert code == EXIT_OK
    assert _read_json(out2)["config_echo"]["surfaces"] == ["plane", "cylinder"]

    # flags override env
    out3 = str(tmp_path / "c")
    code = main(["verify", "--config", str(cfgfile), "--out", out3,
                 "--surface", "sphere"])
    assert code == EXIT_OK
    assert _read_json(out3)["config_echo"]["surfaces"] == ["sphere"]


def test_config_file_rejects_unknown_keys(tmp_path):
    cfgfile = tmp_path / "bad.json"
    cfgfile.write_text(json.dumps({"mode": "analytic", "speed": 9}))
    assert main(["verify", "--config", str(cfgfile), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_convergence_study_fd(tmp_path, capsys):
    out = str(tmp_path)
    code = main(["convergence", "--out", out, "--surface", "sphere",
                 "--cases", "beltrami_routes", "--mode", "fd",
                 "--grid", "8x6,16x12,32x24"])
    assert code == EXIT_OK
    rows = _read_csv(out, "convergence.csv")
    assert rows[0] == ["h", "max_residual", "local_order"]
    assert len(rows) == 4
    assert rows[1][2] == "n/a"  # no previous rung
    orders = [float(r[2]) for r in rows[2:]]
    assert all(o > 1.5 for o in orders)
    res = [float(r[1]) for r in rows[1:]]
    assert res == sorted(res, reverse=True)
    assert "local_order" in capsys.readouterr().out


def test_convergence_analytic_has_no_order(tmp_path):
    code = main(["convergence", "--out", str(tmp_path), "--surface", "torus",
                 "--cases", "K_three_routes", "--mode", "analytic",
                 "--grid", "6x4,12x8,24x16"])
    assert code == EXIT_OK
    rows = _read_csv(str(tmp_path), "convergence.csv")
    assert all(r[2] == "n/a" for r in rows[1:])


def test_convergence_input_guards(tmp_path):
    base = ["convergence", "--out", str(tmp_path), "--mode", "fd"]
    # short ladder
    assert main([*base, "--surface", "sphere", "--cases", "beltrami_routes",
                 "--grid", "8x6,16x12"]) == EXIT_CONFIG
    # non-increasing ladder
    assert main([*base, "--surface", "sphere", "--cases", "beltrami_routes",
                 "--grid", "16x12,8x6,32x24"]) == EXIT_CONFIG
    # multiple cases
    assert main([*base, "--surface", "sphere", "--cases", "gauss_bonnet*",
                 "--grid", "8x6,16x12,32x24"]) == EXIT_CONFIG
    # integral case
    assert main([*base, "--surface", "sphere", "--cases", "green_identity",
                 "--grid", "8x6,16x12,32x24"]) == EXIT_CONFIG
    # case/surface mismatch
    assert main([*base, "--surface", "plane", "--cases", "image_gradient",
                 "--grid", "8x6,16x12,32x24"]) == EXIT_CONFIG
    # exact-only case in fd mode
    assert main([*base, "--surface", "sphere", "--cases", "corollary2_geodesic",
                 "--grid", "8x6,16x12,32x24"]) == EXIT_CONFIG


def test_list_commands(capsys):
    assert main(["list-cases"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "beltrami_routes" in out and "report-only" in out
    assert main(["list-surfaces"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "sphere" in out and "chart domain" in out


def test_merge_reports_refuses_other_schemas(tmp_path):
    _, out = _verify(tmp_path, *FAST)
    doc = load_report(os.path.join(out, "report.json"))
    merged = merge_reports(doc, doc)
    assert len(merged["reports"]) == 2 * len(doc["reports"])
    alien = dict(doc, schema_version="beltrami-report/999")
    with pytest.raises(ConfigParse):
        merge_reports(doc, alien)
