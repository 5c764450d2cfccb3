"""Surface catalog: chart frames against closed forms frozen by hand.

The frozen values below come from working the orthonormal-frame construction
through each chart by hand: lengths of the coordinate velocities, the
connection coefficients read from the rotation of e1, and the shape
coefficients read from the normal's derivatives.
"""

from __future__ import annotations

import numpy as np
import pytest

from beltrami.errors import ConfigParse, RegularityViolation, UnknownSurface
from beltrami.frames import make_ctx
from beltrami.surfaces import CATALOG, Rect, parse_surface
from conftest import ctx_on, maxabs, sample_points


def test_catalog_names():
    assert sorted(CATALOG) == ["cylinder", "disk", "graph", "plane", "sphere", "torus"]


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_sample_window_inside_domain(name):
    patch = parse_surface(name)
    s, d = patch.sample_domain, patch.domain
    assert d.u_min <= s.u_min <= s.u_max <= d.u_max
    assert d.v_min <= s.v_min <= s.v_max <= d.v_max


def test_parse_surface_params_and_errors():
    p = parse_surface("sphere:R=2")
    assert dict(p.params)["R"] == 2.0
    p2 = parse_surface("torus:R=3,r=0.25")
    assert dict(p2.params) == {"R": 3.0, "r": 0.25}
    with pytest.raises(UnknownSurface):
        parse_surface("mobius")
    with pytest.raises(ConfigParse):
        parse_surface("sphere:radius")
    with pytest.raises(ConfigParse):
        parse_surface("sphere:bogus_kw=1")


def test_rect_grid_and_inset():
    r = Rect(0.0, 1.0, 0.0, 2.0)
    uu, vv = r.grid(4, 2)
    assert uu.shape == vv.shape
    assert np.all((uu > 0) & (uu < 1) & (vv > 0) & (vv < 2))
    r2 = r.inset(0.1, 0.2)
    assert (r2.u_min, r2.u_max, r2.v_min, r2.v_max) == (0.1, 0.9, 0.2, 1.8)


def test_sphere_frame_closed_forms():
    patch = parse_surface("sphere")  # unit radius
    ctx = ctx_on(patch)
    fr = ctx.frame
    uu = ctx.value(ctx.u)
    assert maxabs(ctx, fr.W - np.sin(uu)) < 1e-12
    assert maxabs(ctx, fr.q1) < 1e-12
    assert maxabs(ctx, fr.q2 - np.cos(uu) / np.sin(uu)) < 1e-12
    assert maxabs(ctx, fr.a + 1.0) < 1e-12
    assert maxabs(ctx, fr.b) < 1e-12
    assert maxabs(ctx, fr.c + 1.0) < 1e-12
    assert maxabs(ctx, fr.K - 1.0) < 1e-12


def test_torus_curvature_closed_form():
    patch = parse_surface("torus")
    R, r = (dict(patch.params)[k] for k in ("R", "r"))
    ctx = ctx_on(patch)
    uu = ctx.value(ctx.u)
    want = np.cos(uu) / (r * (R + r * np.cos(uu)))
    assert maxabs(ctx, ctx.frame.K - want) < 1e-12


def test_cylinder_frame_closed_forms():
    patch = parse_surface("cylinder")
    R = dict(patch.params)["R"]
    ctx = ctx_on(patch)
    fr = ctx.frame
    assert maxabs(ctx, fr.q1) < 1e-13
    assert maxabs(ctx, fr.q2) < 1e-13
    assert maxabs(ctx, fr.K) < 1e-13
    assert maxabs(ctx, fr.a + 1.0 / R) < 1e-13
    assert maxabs(ctx, fr.b) < 1e-13
    assert maxabs(ctx, fr.c) < 1e-13


def test_disk_polar_connection():
    patch = parse_surface("disk")
    ctx = ctx_on(patch)
    fr = ctx.frame
    uu = ctx.value(ctx.u)
    assert maxabs(ctx, fr.q1) < 1e-13
    assert maxabs(ctx, fr.q2 - 1.0 / uu) < 1e-13
    for w in (fr.a, fr.b, fr.c, fr.K):
        assert maxabs(ctx, w) < 1e-13


def test_saddle_is_negatively_curved():
    patch = parse_surface("graph")
    ctx = ctx_on(patch)
    assert float(np.max(ctx.value(ctx.frame.K))) < 0.0


def test_normal_flip_flips_shape_not_metric():
    patch = parse_surface("sphere")
    base = ctx_on(patch)
    flip = ctx_on(patch.with_normal_flip())
    for name in ("a", "b", "c"):
        assert np.allclose(base.value(getattr(base.frame, name)),
                           -flip.value(getattr(flip.frame, name)), atol=1e-13)
    assert np.allclose(base.value(base.frame.W), flip.value(flip.frame.W))
    assert np.allclose(base.value(base.frame.K), flip.value(flip.frame.K), atol=1e-13)


def test_gauge_rotation_preserves_area_and_curvature():
    patch = parse_surface("torus")
    base = ctx_on(patch)
    rot = ctx_on(patch.with_gauge(("const", 0.9)))
    assert np.allclose(base.value(base.frame.W), rot.value(rot.frame.W), atol=1e-12)
    assert np.allclose(base.value(base.frame.K), rot.value(rot.frame.K), atol=1e-12)
    # the connection pair is frame-dependent: a constant rotation shifts
    # nothing here (coefficients rotate), but the coframe itself moves
    assert not np.allclose(base.value(base.frame.A1), rot.value(rot.frame.A1))


def test_regularity_margin_trips_at_the_pole():
    patch = parse_surface("sphere")
    with pytest.raises(RegularityViolation):
        ctx = make_ctx(patch, np.array([1e-12]), np.array([0.1]))
        ctx.frame


def test_fd_mode_frame_matches_analytic():
    for name in sorted(CATALOG):
        patch = parse_surface(name)
        uu, vv = sample_points(patch, 4, 3, inset=0.1)
        a = make_ctx(patch, uu, vv)
        f = make_ctx(patch.with_mode("fd"), uu, vv)
        for field in ("W", "K", "q1", "q2", "a", "b", "c"):
            got = f.value(getattr(f.frame, field))
            want = a.value(getattr(a.frame, field))
            assert np.max(np.abs(got - want)) < 5e-5, (name, field)
