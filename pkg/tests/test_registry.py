"""Registry semantics: selection, verdicts, ladders, and the gauge audit."""

from __future__ import annotations

import dataclasses
import json
import re

import numpy as np
import pytest

from beltrami.errors import RequirementUnmet, UnknownCase
from beltrami.registry import (CASES, CASE_INDEX, FD_LADDER, IdentityCase,
                               ORDER_FLOOR, RunEnv, Tol, anchor_coverage,
                               gauge_rotation_audit, manifest, run_case,
                               run_suite, select_cases)

ENV = RunEnv()


def test_case_ids_are_unique_snake_case():
    ids = [c.id for c in CASES]
    assert len(ids) == len(set(ids))
    for cid in ids:
        assert re.fullmatch(r"[A-Za-z0-9_]+", cid), cid
    assert len(CASE_INDEX) == len(CASES)


def test_every_required_anchor_is_covered():
    cov = anchor_coverage()
    assert cov["missing"] == set()


def test_manifest_shape():
    man = manifest()
    assert len(man["cases"]) == len(CASES)
    entry = next(e for e in man["cases"] if e["id"] == "beltrami_routes")
    assert entry["kind"] == "pointwise"
    json.dumps(man)  # serializable as-is


def test_select_cases_semantics():
    assert select_cases(None) == list(CASES)
    assert select_cases([]) == []
    picked = select_cases(["gauss_bonnet*"])
    assert picked and all(c.id.startswith("gauss_bonnet") for c in picked)
    with pytest.raises(UnknownCase):
        select_cases(["no_such_case*"])
    with pytest.raises(UnknownCase):
        select_cases(["beltrami_routes", "bogus_id"])


def test_run_case_is_deterministic(patches):
    case = CASE_INDEX["beltrami_routes"]
    a = run_case(case, patches["torus"], "analytic", ENV)
    b = run_case(case, patches["torus"], "analytic", ENV)
    assert a.to_dict() == b.to_dict()
    assert a.verdict == "CONFIRMED"


def test_seed_changes_fields_not_verdict(patches):
    case = CASE_INDEX["beltrami_routes"]
    a = run_case(case, patches["sphere"], "analytic", RunEnv(seed=1))
    b = run_case(case, patches["sphere"], "analytic", RunEnv(seed=2))
    assert a.verdict == b.verdict == "CONFIRMED"
    assert a.rungs[-1].residuals != b.rungs[-1].residuals


def test_mode_gate_skips_exact_only_cases(patches):
    case = CASE_INDEX["corollary2_geodesic"]
    rep = run_case(case, patches["sphere"], "fd", ENV)
    assert rep.verdict == "SKIPPED"
    assert "mode" in rep.reason


def test_flat_chart_image_case_skips_with_reason(patches):
    case = CASE_INDEX["image_qtilde_routes"]
    rep = run_case(case, patches["plane"], "analytic", ENV)
    assert rep.verdict == "SKIPPED"
    assert "FlatPointForImage" in rep.reason


def test_report_only_cases_do_not_fail_the_suite(patches):
    reports, failed = run_suite([patches["sphere"]], modes=("analytic",),
                                patterns=["theorem_13_1_eq85"], env=ENV)
    assert [r.verdict for r in reports] == ["DISCREPANT"]
    assert reports[0].expected == "report-only"
    assert failed is False


def test_unexpected_discrepancy_fails_the_suite(patches):
    """Tightening a passing case's tolerance to zero must trip the suite flag."""
    case = CASE_INDEX["beltrami_routes"]
    strict = dataclasses.replace(case, tol=Tol(1e-30, 1e-30))
    rep = run_case(strict, patches["torus"], "analytic", ENV)
    assert rep.verdict == "DISCREPANT"
    assert rep.expected == "CONFIRMED"


def _artificial(runner, **kw):
    base = dict(id="artificial_case", anchors=("x",), kind="pointwise",
                surfaces=("plane",), runner=runner, summary="test fixture",
                tol=Tol(1e-7, 1e-5))
    base.update(kw)
    return IdentityCase(**base)


def test_convention_flip_retry(patches):
    case = _artificial(
        lambda patch, env: {"sign": 0.0 if patch.normal_sign == -1 else 1.0},
        convention_sensitive=True, modes=("analytic",))
    rep = run_case(case, patches["plane"], "analytic", ENV)
    assert rep.verdict == "CONFIRMED-WITH-CONVENTION"
    assert "opposite normal orientation" in rep.reason

    rigid = dataclasses.replace(case, convention_sensitive=False)
    assert run_case(rigid, patches["plane"], "analytic", ENV).verdict == "DISCREPANT"


def test_fd_order_gate_and_roundoff_floor(patches):
    # constant residual below the floor: order gate waived, case confirmed
    quiet = _artificial(lambda patch, env: {"c": 0.5 * ORDER_FLOOR},
                        modes=("fd",))
    rep = run_case(quiet, patches["plane"], "fd", ENV)
    assert rep.verdict == "CONFIRMED"
    assert len(rep.rungs) == len(FD_LADDER)

    # constant residual above the floor but inside tolerance: no convergence,
    # so the order gate must flag it
    loud = _artificial(lambda patch, env: {"c": 100.0 * ORDER_FLOOR},
                       modes=("fd",))
    rep = run_case(loud, patches["plane"], "fd", ENV)
    assert rep.verdict == "DISCREPANT"
    assert "order" in rep.reason


def test_nonfinite_residual_is_discrepant(patches):
    case = _artificial(lambda patch, env: {"c": float("nan")},
                       modes=("analytic",))
    rep = run_case(case, patches["plane"], "analytic", ENV)
    assert rep.verdict == "DISCREPANT"
    d = rep.to_dict()
    json.dumps(d, allow_nan=False)  # NaN must have been sanitized


def test_requires_hint_classifies_the_gap():
    assert CASE_INDEX["image_gradient"].requires_hint("plane") == "nonflat-required"
    assert CASE_INDEX["theorem_13_1_fields"].requires_hint("graph") == "rotational-chart-required"
    # a chart that already has the class property is not told to change class
    assert CASE_INDEX["corollary2_geodesic"].requires_hint("torus") == "chart-specific"
    # one that lacks it is pointed at the class first
    assert CASE_INDEX["corollary2_geodesic"].requires_hint("disk") == "nonflat-required"


def test_explicit_surfaces_emit_skip_rows(patches):
    reports, failed = run_suite([patches["plane"]], modes=("analytic",),
                                patterns=["image_gradient"], env=ENV,
                                explicit_surfaces=True)
    assert [r.verdict for r in reports] == ["SKIPPED"]
    assert reports[0].reason == "nonflat-required"
    assert failed is False

    silent, _ = run_suite([patches["plane"]], modes=("analytic",),
                          patterns=["image_gradient"], env=ENV)
    assert silent == []


def test_report_dict_shape(patches):
    rep = run_case(CASE_INDEX["structure_eq_gauss"], patches["sphere"], "analytic", ENV)
    d = rep.to_dict()
    assert d["case_id"] == "structure_eq_gauss"
    assert d["verdict"] == "CONFIRMED"
    assert set(d) >= {"case_id", "surface", "mode", "verdict", "expected",
                      "reason", "order", "tolerances", "ladder", "rungs"}
    assert d["rungs"][0]["channels"]
    json.dumps(d, allow_nan=False)


def test_gauge_audit_zero_angle_is_identity(patches):
    out = gauge_rotation_audit("K_three_routes", patches["sphere"], 0.0, ENV)
    assert out["base"] == out["rotated"]
    assert all(v < 1e-12 for v in out["invariants"].values())


def test_gauge_audit_rotation_invariance(patches):
    out = gauge_rotation_audit("K_three_routes", patches["torus"], 0.7, ENV)
    assert all(v < 1e-7 for v in out["invariants"].values())
    out2 = gauge_rotation_audit("beltrami_routes", patches["sphere"], 1.1, ENV)
    assert all(v < 1e-7 for v in out2["invariants"].values())


def test_gauge_audit_guards(patches):
    with pytest.raises(UnknownCase):
        gauge_rotation_audit("nope", patches["sphere"], 0.3, ENV)
    with pytest.raises(RequirementUnmet):
        gauge_rotation_audit("gauss_bonnet", patches["sphere"], 0.3, ENV)


def test_fd_ladder_shrinks_residuals(patches):
    rep = run_case(CASE_INDEX["beltrami_routes"], patches["sphere"], "fd", ENV)
    assert rep.verdict == "CONFIRMED"
    maxes = [r.max_residual for r in rep.rungs]
    assert maxes == sorted(maxes, reverse=True)
    assert rep.order is not None and rep.order > 1.5


def test_expected_defaults_and_report_only_inventory():
    report_only = {c.id for c in CASES if c.expected == "report-only"}
    assert report_only == {"theorem_13_1_eq85", "theorem_13_1_eq86",
                           "theorem_13_1_eq87", "theorem_13_1_eq88",
                           "theorem_13_1_eq89"}
    for c in CASES:
        assert c.expected in ("CONFIRMED", "report-only")
        if c.expected == "report-only":
            assert c.report_keys, c.id
