"""Structure-equation residuals and the independent curvature routes.

Everything here evaluates to a pointwise residual that is identically zero
in exact arithmetic; sizes of the numbers are the audit signal.  Two-form
residuals are divided by the area coefficient W so tolerances mean the same
thing across charts.
"""

from __future__ import annotations

from .forms import ext_d, omega1, omega2, omega12, omega31, omega32
from .operators import theta


def structure_residuals(ctx) -> dict:
    """The six frame structure identities, normalized by W."""
    fr = ctx.frame
    w1, w2 = omega1(fr), omega2(fr)
    w12 = omega12(fr)
    w31, w32 = omega31(fr), omega32(fr)

    d1 = ext_d(lambda c: omega1(c.frame))(ctx)
    d2 = ext_d(lambda c: omega2(c.frame))(ctx)
    d12 = ext_d(lambda c: omega12(c.frame, "direct"))(ctx)
    d31 = ext_d(lambda c: omega31(c.frame))(ctx)
    d32 = ext_d(lambda c: omega32(c.frame))(ctx)

    return {
        "coframe-1": (d1 - w12.wedge(w2)) / fr.W,
        "coframe-2": (d2 + w12.wedge(w1)) / fr.W,
        "shape-symmetry": (w1.wedge(w31) + w2.wedge(w32)) / fr.W,
        "gauss": (d12 + w31.wedge(w32)) / fr.W,
        "codazzi-1": (d31 - w12.wedge(w32)) / fr.W,
        "codazzi-2": (d32 + w12.wedge(w31)) / fr.W,
    }


def connection_route_residual(ctx):
    """omega12 read from <d e1, e2> minus its reconstruction from (q1, q2)."""
    fr = ctx.frame
    direct = omega12(fr, "direct")
    comp = omega12(fr, "components")
    return (direct.du - comp.du, direct.dv - comp.dv)


def shape_symmetry_residual(ctx):
    """b extracted from omega31 minus b extracted from omega32."""
    fr = ctx.frame
    return fr.b - fr.b_alt


def curvature_routes(ctx) -> dict:
    """K three ways: shape determinant, connection 2-form, component formula."""
    fr = ctx.frame
    k_shape = fr.a * fr.c - fr.b * fr.b
    d12 = ext_d(lambda c: omega12(c.frame, "direct"))(ctx)
    k_form = -d12 / fr.W
    k_components = -theta(lambda c: c.frame.q1, lambda c: c.frame.q2)(ctx)
    return {"shape": k_shape, "form": k_form, "components": k_components}


def codazzi_component_residuals(ctx):
    """Division-free component forms of the two Codazzi identities.

    theta(a, b) + (q2 b - q1 c) and theta(b, c) + (q1 b - q2 a); both vanish,
    and stay meaningful at flat points where the image machinery cannot go.
    """
    fr = ctx.frame
    t_ab = theta(lambda c: c.frame.a, lambda c: c.frame.b)(ctx)
    t_bc = theta(lambda c: c.frame.b, lambda c: c.frame.c)(ctx)
    return (
        t_ab + (fr.q2 * fr.b - fr.q1 * fr.c),
        t_bc + (fr.q1 * fr.b - fr.q2 * fr.a),
    )
