"""Chart 1-forms: algebra, frame reads, and the exterior derivative."""

from __future__ import annotations

import numpy as np
import pytest

from beltrami.forms import (Form1, ext_d, from_frame_components, omega1,
                            omega2, omega12, omega31, omega32, ratio_to_area)
from conftest import NONFLAT_NAMES, ctx_on, maxabs


def test_form_algebra():
    a = Form1(2.0, -1.0)
    b = Form1(0.5, 3.0)
    assert (a + b) == Form1(2.5, 2.0)
    assert (a - b) == Form1(1.5, -4.0)
    assert (-a) == Form1(-2.0, 1.0)
    assert a.scale(2.0) == Form1(4.0, -2.0)
    assert a.wedge(b) == -b.wedge(a)
    assert a.wedge(a) == 0.0
    assert a.pullback(3.0, 2.0) == 2.0 * 3.0 + (-1.0) * 2.0


@pytest.mark.parametrize("name", ("sphere", "torus", "disk"))
def test_frame_components_round_trip(patches, name):
    ctx = ctx_on(patches[name])
    fr = ctx.frame
    form = Form1(np.cos(ctx.value(ctx.u)), np.sin(ctx.value(ctx.v)))
    s1, s2 = form.frame_components(fr)
    back = from_frame_components(s1, s2, fr)
    assert maxabs(ctx, back.du - form.du) < 1e-12
    assert maxabs(ctx, back.dv - form.dv) < 1e-12


def test_coframe_components_are_kronecker(patches):
    ctx = ctx_on(patches["torus"])
    fr = ctx.frame
    for form, want in ((omega1(fr), (1.0, 0.0)), (omega2(fr), (0.0, 1.0))):
        s1, s2 = form.frame_components(fr)
        assert maxabs(ctx, s1 - want[0]) < 1e-12
        assert maxabs(ctx, s2 - want[1]) < 1e-12


@pytest.mark.parametrize("name", ("sphere", "torus", "graph", "disk"))
def test_connection_form_routes_agree(patches, name):
    ctx = ctx_on(patches[name])
    fr = ctx.frame
    byq = omega12(fr, route="components")
    direct = omega12(fr, route="direct")
    assert maxabs(ctx, byq.du - direct.du) < 1e-10
    assert maxabs(ctx, byq.dv - direct.dv) < 1e-10
    with pytest.raises(ValueError):
        omega12(fr, route="sideways")


@pytest.mark.parametrize("name", NONFLAT_NAMES)
def test_normal_forms_match_shape_expansion(patches, name):
    ctx = ctx_on(patches[name])
    fr = ctx.frame
    w1, w2 = omega1(fr), omega2(fr)
    want31 = (-w1.scale(fr.a)) - w2.scale(fr.b)
    want32 = (-w1.scale(fr.b)) - w2.scale(fr.c)
    for got, want in ((omega31(fr), want31), (omega32(fr), want32)):
        assert maxabs(ctx, got.du - want.du) < 1e-10
        assert maxabs(ctx, got.dv - want.dv) < 1e-10


def test_exterior_derivative_of_exact_form_vanishes(patches):
    ctx = ctx_on(patches["sphere"], depth=2)

    def f(c):
        import beltrami.mathfns as m
        return m.sin(c.u) * m.cos(2.0 * c.v)

    df = lambda c: Form1(*c.d(f))
    assert maxabs(ctx, ext_d(df)(ctx)) < 1e-9


@pytest.mark.parametrize("name", ("sphere", "torus", "disk", "graph"))
def test_structure_reads_from_exterior_derivative(patches, name):
    """dw1/area and dw2/area recover the connection coefficients."""
    ctx = ctx_on(patches[name], depth=2)
    fr = ctx.frame
    dw1 = ext_d(lambda c: omega1(c.frame))(ctx)
    dw2 = ext_d(lambda c: omega2(c.frame))(ctx)
    assert maxabs(ctx, ratio_to_area(dw1, fr) - fr.q1) < 1e-9
    assert maxabs(ctx, ratio_to_area(dw2, fr) - fr.q2) < 1e-9


@pytest.mark.parametrize("name", ("sphere", "torus", "graph"))
def test_gauss_equation_via_forms(patches, name):
    """d(w12) = -K w1^w2."""
    ctx = ctx_on(patches[name], depth=2)
    fr = ctx.frame
    dw12 = ext_d(lambda c: omega12(c.frame))(ctx)
    assert maxabs(ctx, ratio_to_area(dw12, fr) + fr.K) < 1e-8
