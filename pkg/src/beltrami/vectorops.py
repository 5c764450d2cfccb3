"""Transport of frame-decomposed vector fields.

A vector field is a triple of scalar fields: its components on the moving
frame (e1, e2, e3).  The measure-transport operator applies to such a triple
either through the component table (derivatives of the components plus
rotation-coefficient cross terms) or through the ambient oracle: rebuild the
field in ambient coordinates, take the exterior derivative of each ambient
component paired with the reference form, divide by the area form, and project
the result back on the frame.  The two routes agreeing is the content of the
vector-transport identities; everything downstream (normal-channel tables,
product rules, flat reductions) reuses them.
"""

from __future__ import annotations

import numpy as np

from . import mathfns as m
from .forms import Form1, ext_d, from_frame_components, omega12, omega31, omega32
from .frames import dot3
from .operators import d_omega, pfaff_grad, pi2, q_tilde, theta


def gamma_table(a1, a2):
    """Rotation coefficients of the frame against a reference form.

    Each is the du^dv coefficient of (rotation form) ^ (reference form),
    divided by the area form; the table gives them in closed form from the
    connection and shape components.
    """

    def g12(ctx):
        fr = ctx.frame
        return fr.q1 * a2(ctx) - fr.q2 * a1(ctx)

    def g13(ctx):
        fr = ctx.frame
        return fr.a * a2(ctx) - fr.b * a1(ctx)

    def g23(ctx):
        fr = ctx.frame
        return fr.b * a2(ctx) - fr.c * a1(ctx)

    return g12, g13, g23


def gamma_direct(a1, a2):
    """The same coefficients read off wedge products of the actual forms."""

    def ref(ctx):
        return from_frame_components(a1(ctx), a2(ctx), ctx.frame)

    def g12(ctx):
        return omega12(ctx.frame).wedge(ref(ctx)) / ctx.frame.W

    def g13(ctx):
        return (-omega31(ctx.frame)).wedge(ref(ctx)) / ctx.frame.W

    def g23(ctx):
        return (-omega32(ctx.frame)).wedge(ref(ctx)) / ctx.frame.W

    return g12, g13, g23


def d_omega_vector(a1, a2, X):
    """Component-table transport of a frame-decomposed vector field."""
    X1, X2, X3 = X
    g12, g13, g23 = gamma_table(a1, a2)

    def result(ctx):
        d1 = d_omega(a1, a2, X1)(ctx)
        d2 = d_omega(a1, a2, X2)(ctx)
        d3 = d_omega(a1, a2, X3)(ctx)
        c12, c13, c23 = g12(ctx), g13(ctx), g23(ctx)
        x1, x2, x3 = X1(ctx), X2(ctx), X3(ctx)
        return (
            d1 - x2 * c12 - x3 * c13,
            d2 + x1 * c12 - x3 * c23,
            d3 + x1 * c13 + x2 * c23,
        )

    return result


def d_omega_vector_ambient(a1, a2, X):
    """Oracle transport: exterior derivative of the ambient-valued form."""
    X1, X2, X3 = X

    def ambient_form(k):
        def ff(c):
            fr = c.frame
            w = from_frame_components(a1(c), a2(c), fr)
            yk = X1(c) * fr.e1[k] + X2(c) * fr.e2[k] + X3(c) * fr.e3[k]
            return Form1(yk * w.du, yk * w.dv)

        return ff

    def result(ctx):
        fr = ctx.frame
        d = [ext_d(ambient_form(k))(ctx) / fr.W for k in range(3)]
        return (dot3(d, fr.e1), dot3(d, fr.e2), dot3(d, fr.e3))

    return result


def _zero_like(X1):
    return lambda ctx: 0.0 * X1(ctx)


def _q_fields():
    return (lambda ctx: ctx.frame.q1), (lambda ctx: ctx.frame.q2)


def pi2_vector(X1, X2, route: str = "table"):
    """Curvature-pairing transport of a tangential field (A, B, 0).

    The tangential components transport by the scalar operator with the
    connection cross term; the normal channel is division-free in the table
    route and uses the rotated image connection in the image route.
    """
    qa1, qa2 = _q_fields()
    base = d_omega_vector(qa1, qa2, (X1, X2, _zero_like(X1)))
    if route == "table":
        return base
    if route == "image":

        def result(ctx):
            r1, r2, _ = base(ctx)
            qt1, qt2 = q_tilde(ctx)
            fr = ctx.frame
            r3 = -fr.K * (X1(ctx) * qt2 - X2(ctx) * qt1)
            return r1, r2, r3

        return result
    raise ValueError(f"unknown pi2 vector route {route!r}")


def pairing_product_residuals(ctx, a1, a2, H, M):
    """Transport of a pairing vs. the product rule with the rotation defect."""

    def pairing(c):
        return sum(H[k](c) * M[k](c) for k in range(3))

    dh = d_omega_vector(a1, a2, H)(ctx)
    dm = d_omega_vector(a1, a2, M)(ctx)
    th = theta(a1, a2)(ctx)
    lhs = d_omega(a1, a2, pairing)(ctx)
    rhs = sum(dh[k] * M[k](ctx) + H[k](ctx) * dm[k] for k in range(3)) \
        - th * pairing(ctx)
    return {"pairing-product": _maxabs(ctx, lhs - rhs)}


def pi2_pairing_product_residuals(ctx, H, M):
    """Curvature pairing of an inner product of tangential fields."""

    def pairing(c):
        return H[0](c) * M[0](c) + H[1](c) * M[1](c)

    dh = pi2_vector(H[0], H[1])(ctx)
    dm = pi2_vector(M[0], M[1])(ctx)
    lhs = pi2(pairing)(ctx)
    K = ctx.frame.K
    rhs = sum(dh[k] * M[k](ctx) + H[k](ctx) * dm[k] for k in range(2)) \
        + K * pairing(ctx)
    return {"curvature-pairing-product": _maxabs(ctx, lhs - rhs)}


def _maxabs(ctx, w) -> float:
    return float(np.max(np.abs(ctx.value(w))))


def vector_route_residuals(ctx, a1, a2, X) -> dict:
    """Component table against the ambient oracle, channel by channel."""
    table = d_omega_vector(a1, a2, X)(ctx)
    amb = d_omega_vector_ambient(a1, a2, X)(ctx)
    return {
        "tangent-1": _maxabs(ctx, table[0] - amb[0]),
        "tangent-2": _maxabs(ctx, table[1] - amb[1]),
        "normal": _maxabs(ctx, table[2] - amb[2]),
    }


def bracket_table_residuals(ctx, a1, a2) -> dict:
    """Closed-form rotation coefficients against the wedge-product reads."""
    table = gamma_table(a1, a2)
    direct = gamma_direct(a1, a2)
    out = {}
    for name, tf, df in zip(("rot-12", "rot-13", "rot-23"), table, direct):
        out[name] = _maxabs(ctx, tf(ctx) - df(ctx))
    return out


def pi2_vector_route_residuals(ctx, X1, X2) -> dict:
    """Normal-channel table vs. image route vs. the ambient oracle."""
    qa1, qa2 = _q_fields()
    table = pi2_vector(X1, X2, "table")(ctx)
    image = pi2_vector(X1, X2, "image")(ctx)
    amb = d_omega_vector_ambient(qa1, qa2, (X1, X2, _zero_like(X1)))(ctx)
    return {
        "normal-table-vs-image": _maxabs(ctx, table[2] - image[2]),
        "tangent-1-vs-ambient": _maxabs(ctx, table[0] - amb[0]),
        "tangent-2-vs-ambient": _maxabs(ctx, table[1] - amb[1]),
        "normal-vs-ambient": _maxabs(ctx, table[2] - amb[2]),
    }


def orthogonality_residuals(ctx, X1, X2) -> dict:
    """A tangential field against its quarter turn."""
    x1, x2 = X1(ctx), X2(ctx)
    return {"quarter-turn-pairing": _maxabs(ctx, x1 * (-x2) + x2 * x1)}


def cross_passage_residuals(ctx, a1, a2, X1, X2) -> dict:
    """Transport of the quarter-turned field, crossed back with the normal.

    The tangential channels match the direct transport; the normal channel of
    the direct transport is the measured gap of the stated passage.
    """
    qa1t = lambda c: -X2(c)
    qa2t = lambda c: X1(c)
    zero = _zero_like(X1)
    lhs = d_omega_vector_ambient(a1, a2, (X1, X2, zero))(ctx)
    star = d_omega_vector_ambient(a1, a2, (qa1t, qa2t, zero))(ctx)
    # (r1, r2, r3) x e3 in frame components = (r2, -r1, 0)
    return {
        "tangent-1": _maxabs(ctx, lhs[0] - star[1]),
        "tangent-2": _maxabs(ctx, lhs[1] + star[0]),
        "normal-gap-stated": _maxabs(ctx, lhs[2]),
    }


def flat_reduction_residuals(ctx, a1, a2, X1, X2) -> dict:
    """On shape-flat charts the normal channel drops and transport closes
    on the tangent plane."""
    fr = ctx.frame
    shape_size = max(_maxabs(ctx, fr.a), _maxabs(ctx, fr.b), _maxabs(ctx, fr.c))
    zero = _zero_like(X1)
    amb = d_omega_vector_ambient(a1, a2, (X1, X2, zero))(ctx)
    g12 = gamma_table(a1, a2)[0]
    c12 = g12(ctx)
    r1 = d_omega(a1, a2, X1)(ctx) - X2(ctx) * c12
    r2 = d_omega(a1, a2, X2)(ctx) + X1(ctx) * c12
    return {
        "shape-content": shape_size,
        "tangent-1": _maxabs(ctx, r1 - amb[0]),
        "tangent-2": _maxabs(ctx, r2 - amb[1]),
        "normal-channel": _maxabs(ctx, amb[2]),
    }


def frame_derivative_residuals(ctx) -> dict:
    """Chart derivatives of the frame vectors against their reconstructions
    from the rotation forms."""
    fr = ctx.frame
    val = ctx.value
    out = {}
    combos = {
        "e1": (lambda c: c.frame.e1,
               lambda c, k: c.frame.p12 * c.frame.e2[k] - c.frame.P1 * c.frame.e3[k],
               lambda c, k: c.frame.q12 * c.frame.e2[k] - c.frame.Q1 * c.frame.e3[k]),
        "e2": (lambda c: c.frame.e2,
               lambda c, k: -c.frame.p12 * c.frame.e1[k] - c.frame.P2 * c.frame.e3[k],
               lambda c, k: -c.frame.q12 * c.frame.e1[k] - c.frame.Q2 * c.frame.e3[k]),
        "e3": (lambda c: c.frame.e3,
               lambda c, k: c.frame.P1 * c.frame.e1[k] + c.frame.P2 * c.frame.e2[k],
               lambda c, k: c.frame.Q1 * c.frame.e1[k] + c.frame.Q2 * c.frame.e2[k]),
    }
    for name, (vec, ru, rv) in combos.items():
        worst_u = worst_v = 0.0
        for k in range(3):
            du, dv = ctx.d(lambda c, k=k: vec(c)[k])
            worst_u = max(worst_u, _maxabs(ctx, du - ru(ctx, k)))
            worst_v = max(worst_v, _maxabs(ctx, dv - rv(ctx, k)))
        out[f"{name}-du"] = worst_u
        out[f"{name}-dv"] = worst_v
    return out


def theta_frame_residuals(ctx) -> dict:
    """The rotation content of the frame pair itself vanishes."""
    worst = 0.0
    for k in range(3):
        w = theta(lambda c, k=k: c.frame.e1[k], lambda c, k=k: c.frame.e2[k])(ctx)
        worst = max(worst, _maxabs(ctx, w))
    return {"frame-pair-rotation": worst}


def direction_field_residuals(ctx, phi) -> dict:
    """Curvature pairing of a unit direction field, against the closed form."""
    qa1, qa2 = _q_fields()

    def X1(c):
        return m.cos(phi(c))

    def X2(c):
        return m.sin(phi(c))

    fr = ctx.frame
    p1, p2 = pfaff_grad(phi)(ctx)
    J = fr.q2 * p1 - fr.q1 * p2
    K = fr.K
    c1 = pi2(X1)(ctx) - (-J * m.sin(phi(ctx)) - K * m.cos(phi(ctx)))
    c2 = pi2(X2)(ctx) - (J * m.cos(phi(ctx)) - K * m.sin(phi(ctx)))
    table = pi2_vector(X1, X2, "table")(ctx)
    amb = d_omega_vector_ambient(qa1, qa2, (X1, X2, _zero_like(X1)))(ctx)
    return {
        "closed-form-1": _maxabs(ctx, c1),
        "closed-form-2": _maxabs(ctx, c2),
        "normal-vs-ambient": _maxabs(ctx, table[2] - amb[2]),
    }
