"""Frame-decomposed vector transport: tables against the ambient oracle."""

from __future__ import annotations

import pytest

from beltrami.operators import seeded_field
from beltrami.vectorops import (bracket_table_residuals,
                                cross_passage_residuals,
                                direction_field_residuals,
                                flat_reduction_residuals,
                                frame_derivative_residuals,
                                orthogonality_residuals,
                                pairing_product_residuals, pi2_vector,
                                pi2_pairing_product_residuals,
                                pi2_vector_route_residuals,
                                theta_frame_residuals, vector_route_residuals)
from conftest import ALL_NAMES, NONFLAT_NAMES, ctx_on


def _pair(patch, seed):
    return seeded_field(patch, seed, "a1"), seeded_field(patch, seed, "a2")


def _triple(patch, seed):
    return tuple(seeded_field(patch, seed, f"X{k}") for k in range(3))


@pytest.mark.parametrize("name", ALL_NAMES)
def test_rotation_coefficient_table_matches_wedge_reads(patches, name):
    ctx = ctx_on(patches[name])
    a1, a2 = _pair(patches[name], 1)
    for key, r in bracket_table_residuals(ctx, a1, a2).items():
        assert r < 1e-10, key


@pytest.mark.parametrize("name", ALL_NAMES)
def test_vector_transport_table_matches_ambient_oracle(patches, name):
    patch = patches[name]
    ctx = ctx_on(patch, depth=2)
    a1, a2 = _pair(patch, 2)
    res = vector_route_residuals(ctx, a1, a2, _triple(patch, 3))
    for key in ("tangent-1", "tangent-2", "normal"):
        assert res[key] < 1e-8, key


@pytest.mark.parametrize("name", NONFLAT_NAMES)
def test_curvature_transport_routes_agree(patches, name):
    patch = patches[name]
    ctx = ctx_on(patch, depth=2)
    X1, X2 = seeded_field(patch, 4, "X1"), seeded_field(patch, 4, "X2")
    res = pi2_vector_route_residuals(ctx, X1, X2)
    for key, r in res.items():
        assert r < 1e-8, key


def test_pi2_vector_route_guard(patches):
    with pytest.raises(ValueError):
        pi2_vector(lambda c: 1.0, lambda c: 0.0, route="spectral")


@pytest.mark.parametrize("name", ("sphere", "torus", "graph", "plane"))
def test_transport_product_rules(patches, name):
    patch = patches[name]
    ctx = ctx_on(patch, depth=2)
    a1, a2 = _pair(patch, 5)
    H, M = _triple(patch, 6), _triple(patch, 7)
    assert pairing_product_residuals(ctx, a1, a2, H, M)["pairing-product"] < 1e-9
    res = pi2_pairing_product_residuals(ctx, H[:2], M[:2])
    assert res["curvature-pairing-product"] < 1e-9


@pytest.mark.parametrize("name", ("plane", "disk"))
def test_flat_reduction_closes_on_the_tangent_plane(patches, name):
    patch = patches[name]
    ctx = ctx_on(patch, depth=2)
    a1, a2 = _pair(patch, 8)
    X1, X2 = seeded_field(patch, 9, "X1"), seeded_field(patch, 9, "X2")
    res = flat_reduction_residuals(ctx, a1, a2, X1, X2)
    assert res["shape-content"] < 1e-12
    assert res["tangent-1"] < 1e-9
    assert res["tangent-2"] < 1e-9
    assert res["normal-channel"] < 1e-9


@pytest.mark.parametrize("name", ALL_NAMES)
def test_frame_derivatives_rebuild_from_rotation_forms(patches, name):
    ctx = ctx_on(patches[name], depth=2)
    for key, r in frame_derivative_residuals(ctx).items():
        assert r < 1e-9, key


@pytest.mark.parametrize("name", ALL_NAMES)
def test_frame_pair_has_no_rotation_content(patches, name):
    ctx = ctx_on(patches[name], depth=2)
    assert theta_frame_residuals(ctx)["frame-pair-rotation"] < 1e-9


@pytest.mark.parametrize("name", ("sphere", "torus"))
def test_unit_direction_field_closed_form(patches, name):
    patch = patches[name]
    ctx = ctx_on(patch, depth=2)
    res = direction_field_residuals(ctx, seeded_field(patch, 10, "phi"))
    for key, r in res.items():
        assert r < 1e-9, key


def test_cross_passage_tangential_channels(patches):
    patch = patches["torus"]
    ctx = ctx_on(patch, depth=2)
    a1, a2 = _pair(patch, 11)
    X1, X2 = seeded_field(patch, 12, "X1"), seeded_field(patch, 12, "X2")
    res = cross_passage_residuals(ctx, a1, a2, X1, X2)
    assert res["tangent-1"] < 1e-8
    assert res["tangent-2"] < 1e-8
    # the normal channel is a measured gap; on a flat chart it closes
    pctx = ctx_on(patches["plane"], depth=2)
    pres = cross_passage_residuals(pctx, *_pair(patches["plane"], 11),
                                   seeded_field(patches["plane"], 12, "X1"),
                                   seeded_field(patches["plane"], 12, "X2"))
    assert pres["normal-gap-stated"] < 1e-10


def test_quarter_turn_orthogonality(patches):
    patch = patches["graph"]
    ctx = ctx_on(patch)
    X1, X2 = seeded_field(patch, 13, "X1"), seeded_field(patch, 13, "X2")
    assert orthogonality_residuals(ctx, X1, X2)["quarter-turn-pairing"] == 0.0
