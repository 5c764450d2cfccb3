"""Integral identities with frozen closed-form targets.

Frozen values used below, each worked out by hand on the chart:
  * circle length on the unit sphere at polar distance u0:  2 pi sin(u0)
  * cap area under u0:                                      2 pi (1 - cos u0)
  * rim total geodesic curvature:                           2 pi cos(u0)
  * hemisphere area:                                        2 pi
  * x dy around a circle of radius rho in the flat disk:    pi rho^2
  * moment factor of the angular level: cos(u) on the unit sphere,
    -sin(u) on the torus tube angle
"""

from __future__ import annotations

import numpy as np
import pytest

import beltrami.mathfns as m
from beltrami.curves import (band_region, cap_region, chart_circle,
                             coordinate_circle, rect_region)
from beltrami.errors import (ConstraintUnsatisfiable, DegenerateTheta,
                             FlatPointForImage, QuadratureNonConvergence,
                             RequirementUnmet)
from beltrami.frames import make_ctx
from beltrami.integrals import (QuadSpec, area_integral, closed_loop_total_kg,
                                corollary2_residual, corollary3_residual,
                                corollary4_residuals, gauss_bonnet_residual,
                                green_residual, harmonic_variant_residual,
                                ig_ds, ig_f_dg, lambda_mu_claims,
                                lambda_mu_identities, line_integral, mu_field,
                                note_ii_residuals, stokes_residual,
                                theorem2_residual, theorem3_residual,
                                theorem9_residual, theorem10_residuals,
                                theorem14_residuals, turning_number)
from beltrami.operators import const_field, seeded_field
from beltrami.surfaces import Rect

QUAD = QuadSpec(line_nodes=24, line_panels=6, area_nodes=8, area_panels=(12, 12))


# -- quadrature against closed forms ------------------------------------------

def test_circle_length_and_cap_area_on_sphere(patches):
    sphere = patches["sphere"]
    u0 = np.pi / 3
    length = line_integral(sphere, coordinate_circle(sphere, u0), ig_ds(), QUAD)
    assert abs(length - 2 * np.pi * np.sin(u0)) < 1e-10
    area = area_integral(sphere, cap_region(sphere, u0), const_field(1.0), QUAD)
    assert abs(area - 2 * np.pi * (1 - np.cos(u0))) < 1e-10


def test_line_doubling_gate_raises(patches):
    plane = patches["plane"]
    wiggle = lambda cf: np.cos(23.0 * cf.t) * cf.speed
    with pytest.raises(QuadratureNonConvergence):
        line_integral(plane, chart_circle(0.0, 0.0, 0.4), wiggle,
                      QuadSpec(line_nodes=2, line_panels=2), gate=1e-14)


def test_area_doubling_gate_raises(patches):
    torus = patches["torus"]
    region = rect_region(torus, Rect(0.3, 1.1, 0.5, 2.0))
    field = lambda ctx: m.sin(9.0 * ctx.u) * m.sin(9.0 * ctx.v)
    with pytest.raises(QuadratureNonConvergence):
        area_integral(torus, region, field,
                      QuadSpec(area_nodes=2, area_panels=(2, 2)), gate=1e-14)


# -- closed-chain curvature accounting ----------------------------------------

@pytest.mark.parametrize("u0", (np.pi / 6, np.pi / 3, np.pi / 2))
def test_sphere_cap_accounting_frozen(patches, u0):
    sphere = patches["sphere"]
    cap = cap_region(sphere, u0)
    kg = closed_loop_total_kg(sphere, coordinate_circle(sphere, u0), QUAD)
    assert abs(kg - 2 * np.pi * np.cos(u0)) < 1e-10
    tot_k = area_integral(sphere, cap, lambda c: c.frame.K, QUAD)
    assert abs(tot_k - 2 * np.pi * (1 - np.cos(u0))) < 1e-10
    assert gauss_bonnet_residual(sphere, cap, QUAD)["closed-chain"] < 1e-9


def test_closed_chain_accounting_elsewhere(patches):
    disk = patches["disk"]
    assert gauss_bonnet_residual(disk, cap_region(disk, 0.8), QUAD)["closed-chain"] < 1e-9
    graph = patches["graph"]
    region = rect_region(graph, Rect(-0.5, 0.4, -0.45, 0.5))
    assert gauss_bonnet_residual(graph, region, QUAD)["closed-chain"] < 1e-9
    torus = patches["torus"]
    assert gauss_bonnet_residual(torus, band_region(torus, 0.3, 1.1), QUAD)["closed-chain"] < 1e-9


def test_hemisphere_area_from_its_geodesic_rim(patches):
    # cap identities read tangent angles against the frame, so they need the
    # pole-regular gauge that undoes the polar chart's 2 pi frame holonomy
    sphere = patches["sphere"].with_gauge(("field", lambda u, v: -v))
    cap = cap_region(sphere, np.pi / 2)
    out = corollary2_residual(sphere, cap, QUAD)
    assert out["area-from-boundary"] < 1e-8
    assert abs(area_integral(sphere, cap, const_field(1.0), QUAD) - 2 * np.pi) < 1e-10


def test_raw_polar_frame_loses_one_turn_on_caps(patches):
    """Ungauged, the identity misses exactly the 2 pi frame holonomy."""
    sphere = patches["sphere"]
    out = corollary2_residual(sphere, cap_region(sphere, np.pi / 2), QUAD)
    assert abs(out["area-from-boundary"] - 2 * np.pi) < 1e-8


def test_area_from_boundary_requires_geodesic_rim(patches):
    sphere = patches["sphere"]
    with pytest.raises(RequirementUnmet):
        corollary2_residual(sphere, cap_region(sphere, np.pi / 3), QUAD)


# -- weighted boundary identities ----------------------------------------------

def test_weighted_boundary_identities(patches):
    sphere = patches["sphere"].with_gauge(("field", lambda u, v: -v))
    cap = cap_region(sphere, 1.1)
    f = seeded_field(patches["sphere"], 3)
    assert theorem2_residual(sphere, cap, f, QUAD)["boundary-vs-area"] < 1e-8
    assert theorem3_residual(sphere, cap, f, QUAD)["curvature-pairing"] < 1e-8
    # on a band the two circle holonomies cancel, so the raw frame works
    torus = patches["torus"]
    band = band_region(torus, 0.3, 1.1)
    g = seeded_field(torus, 8)
    assert theorem2_residual(torus, band, g, QUAD)["boundary-vs-area"] < 1e-8
    assert theorem3_residual(torus, band, g, QUAD)["curvature-pairing"] < 1e-8


def test_harmonic_boundary_identity(patches):
    disk = patches["disk"]
    region = rect_region(disk, Rect(0.2, 0.8, 0.5, 2.5))
    harmonic = lambda ctx: (ctx.u * ctx.u) * m.cos(2.0 * ctx.v)
    out = harmonic_variant_residual(disk, region, harmonic, QUAD)
    assert out["premise-beltrami"] < 1e-10
    assert out["harmonic-boundary"] < 1e-8


def test_green_pairing_and_frozen_rim_value(patches):
    disk = patches["disk"]
    f = lambda ctx: ctx.u * m.cos(ctx.v)
    g = lambda ctx: ctx.u * m.sin(ctx.v)
    region = rect_region(disk, Rect(0.2, 0.8, 0.4, 2.6))
    assert green_residual(disk, region, f, g, QUAD)["pairing-area"] < 1e-9
    rho = 0.8
    rim = coordinate_circle(disk, rho)
    assert abs(line_integral(disk, rim, ig_f_dg(f, g), QUAD) - np.pi * rho**2) < 1e-10


# -- direction fields and image forms ------------------------------------------

def test_area_reconstruction_from_scaled_form(patches):
    sphere = patches["sphere"]
    band = band_region(sphere, 0.6, 1.4)
    one = const_field(1.0)
    assert theorem9_residual(sphere, band, one, one, QUAD)["area-from-form"] < 1e-8
    assert corollary3_residual(sphere, band, QUAD)["area-from-form"] < 1e-8


def test_scaled_form_refuses_closed_pairs(patches):
    """An exact pair has zero rotation content, so 1/theta is undefined."""
    sphere = patches["sphere"]
    band = band_region(sphere, 0.6, 1.4)
    from beltrami.operators import pfaff_grad
    g = seeded_field(sphere, 2)
    a1 = lambda c: pfaff_grad(g)(c)[0]
    a2 = lambda c: pfaff_grad(g)(c)[1]
    with pytest.raises(DegenerateTheta):
        theorem9_residual(sphere, band, a1, a2, QUAD)


def test_image_form_boundary_identities(patches):
    torus = patches["torus"]
    band = band_region(torus, 0.3, 1.1)
    f = seeded_field(torus, 12)
    out = theorem10_residuals(torus, band, f, QUAD)
    assert out["normal-form-1"] < 1e-7
    assert out["normal-form-2"] < 1e-7


def test_band_direction_field_identities(patches):
    sphere = patches["sphere"]
    band = band_region(sphere, 0.6, 1.4)
    f = seeded_field(sphere, 4)
    out = theorem14_residuals(sphere, band, f, QUAD)
    assert out["angle-form"] < 1e-6
    assert out["curvature-form"] < 1e-6
    assert np.isfinite(out["unit-reading-gap"])
    with pytest.raises(RequirementUnmet):
        theorem14_residuals(sphere, cap_region(sphere, 1.0), f, QUAD)


def test_transport_defect_is_total_curvature(patches):
    sphere = patches["sphere"]
    band = band_region(sphere, 0.6, 1.4)
    out = note_ii_residuals(sphere, band, seeded_field(sphere, 6), QUAD)
    assert out["transport-defect"] < 1e-9
    assert out["weighted-transport"] < 1e-8


def test_stokes_identity_on_seeded_pairs(patches):
    for name, region_of in (("sphere", lambda p: band_region(p, 0.6, 1.4)),
                            ("graph", lambda p: rect_region(p, Rect(-0.5, 0.4, -0.45, 0.5)))):
        patch = patches[name]
        region = region_of(patch)
        for seed in (1, 2, 3):
            f = seeded_field(patch, seed)
            a1 = seeded_field(patch, seed, label="a1")
            a2 = seeded_field(patch, seed, label="a2")
            res = stokes_residual(patch, region, f, a1, a2, QUAD)
            assert res["exterior-derivative"] < 1e-7, (name, seed)


# -- level/moment structure ------------------------------------------------------

def test_moment_factor_frozen_values(patches):
    sphere = patches["sphere"]
    ctx = make_ctx(sphere, *band_region(sphere, 0.6, 1.4).rect.inset(0.1, 0.1).grid(6, 4))
    got = ctx.value(mu_field(sphere)(ctx))
    assert np.max(np.abs(got - np.cos(ctx.value(ctx.u)))) < 1e-11

    torus = patches["torus"]
    ctx = make_ctx(torus, *band_region(torus, 0.3, 1.1).rect.inset(0.1, 0.1).grid(6, 4))
    got = ctx.value(mu_field(torus)(ctx))
    assert np.max(np.abs(got + np.sin(ctx.value(ctx.u)))) < 1e-11


@pytest.mark.parametrize("name,band", [("sphere", (0.6, 1.4)), ("torus", (0.3, 1.1))])
def test_level_moment_identities(patches, name, band):
    patch = patches[name]
    region = band_region(patch, *band)
    out = lambda_mu_identities(patch, region, QUAD)
    for key in ("level-alignment", "factorization-1", "factorization-2",
                "curvature-determinant", "pi2-level", "pi2-level-function"):
        assert out[key] < 1e-10, key
    for key in ("exchange-level-moment", "exchange-antisymmetry", "exchange-transport"):
        assert out[key] < 1e-8, key


@pytest.mark.parametrize("name,band", [("sphere", (0.6, 1.4)), ("torus", (0.3, 1.1))])
def test_moment_claims_expansions_hold_stated_forms_do_not(patches, name, band):
    """The factorization mu grad(level) = q forces specific second-order values;
    the stated coefficients differ from them by O(1) on both test charts."""
    patch = patches[name]
    out = lambda_mu_claims(patch, band_region(patch, *band), QUAD)
    for key in ("moment-transport-expansion", "moment-power-expansion",
                "moment-function-expansion", "pi2-moment-expansion"):
        assert out[key] < 1e-10, key
    for key in ("moment-transport-stated", "moment-power-stated",
                "moment-function-stated", "moment-loop-stated",
                "pi2-moment-stated"):
        assert out[key] > 0.05, key


# -- transport-constrained circulation -------------------------------------------

def test_circulation_of_normal_forms(patches):
    torus = patches["torus"]
    band = band_region(torus, 0.3, 1.1)
    out1 = corollary4_residuals(torus, band, 1, QUAD)
    assert out1["constraint-degeneracy"] < 1e-10
    assert out1["circulation"] < 1e-10

    sphere = patches["sphere"]
    out2 = corollary4_residuals(sphere, band_region(sphere, 0.6, 1.4), 2, QUAD)
    assert out2["constraint-1"] < 1e-10
    assert out2["constraint-2"] < 1e-10
    assert out2["circulation"] < 1e-9


def test_circulation_guards(patches):
    with pytest.raises(FlatPointForImage):
        corollary4_residuals(patches["cylinder"],
                             band_region(patches["cylinder"], -0.5, 0.5), 1, QUAD)
    graph = patches["graph"]
    with pytest.raises(ConstraintUnsatisfiable):
        corollary4_residuals(graph, rect_region(graph, Rect(-0.4, 0.4, -0.4, 0.4)), 2, QUAD)


# -- turning numbers ----------------------------------------------------------------

def test_turning_numbers_frozen(patches):
    plane, disk, sphere = patches["plane"], patches["disk"], patches["sphere"]
    assert abs(turning_number(plane, chart_circle(0.0, 0.0, 0.4), QUAD) - 1.0) < 1e-10
    assert abs(turning_number(plane, rect_region(plane, Rect(-0.3, 0.4, -0.2, 0.5)), QUAD) - 1.0) < 1e-10
    # polar-frame-relative readings: coordinate circles do not rotate against
    # the frame, while a loop clear of the pole turns once
    assert abs(turning_number(disk, coordinate_circle(disk, 0.75), QUAD)) < 1e-10
    assert abs(turning_number(disk, chart_circle(0.55, np.pi, 0.2, 0.5), QUAD) - 1.0) < 1e-9
    assert abs(turning_number(sphere, coordinate_circle(sphere, 0.9), QUAD)) < 1e-10
