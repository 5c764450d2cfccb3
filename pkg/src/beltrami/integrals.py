"""Deterministic quadrature and the boundary-value residuals.

Line and area integrals run on composite Gauss-Legendre panels with a
panel-doubling gate: the reported value comes from the finer level, and a
coarse/fine disagreement beyond the gate raises QuadratureNonConvergence
instead of silently polluting a residual.  Accumulation uses math.fsum in a
fixed traversal order, so repeated runs are bit-identical.

The residual functions each assemble one boundary-value identity and return
absolute defects.  Tangent-angle terms integrate over smooth edges only;
corner turns enter exactly where the closed-chain turning statement needs
them and nowhere else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import mathfns as m
from .curves import (CurveFrameData, Region, SurfaceCurve, band_angle_field,
                     boundary_chain, corner_turns, curve_frame)
from .errors import (AngleFieldUndefined, ConfigParse, ConstraintUnsatisfiable,
                     DegenerateMu, DegenerateTheta, QuadratureNonConvergence,
                     RequirementUnmet)
from .forms import Form1, from_frame_components, omega12, omega31, omega32
from .frames import make_ctx
from .operators import (beltrami, const_field, d_omega, pfaff_grad, pi2,
                        q_tilde, theta)
from .surfaces import SurfacePatch

THETA_FLOOR = 1e-8
MU_FLOOR = 1e-8
R_FLOOR = 1e-3


@dataclass(frozen=True)
class QuadSpec:
    line_nodes: int = 32
    line_panels: int = 8
    area_nodes: int = 8
    area_panels: tuple = (16, 16)

    def halved(self) -> "QuadSpec":
        pu, pv = self.area_panels
        return QuadSpec(self.line_nodes, max(1, self.line_panels // 2),
                        self.area_nodes, (max(1, pu // 2), max(1, pv // 2)))


FD_QUAD = QuadSpec(line_nodes=24, line_panels=8, area_nodes=6, area_panels=(10, 10))

_GL_CACHE: dict = {}


def gl01(n: int):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    hit = _GL_CACHE.get(n)
    if hit is None:
        x, w = np.polynomial.legendre.leggauss(n)
        hit = _GL_CACHE[n] = ((x + 1.0) / 2.0, w / 2.0)
    return hit


def _panel_nodes(t0: float, t1: float, panels: int, nodes: int):
    x, w = gl01(nodes)
    edges = np.linspace(t0, t1, panels + 1)
    widths = np.diff(edges)
    T = (edges[:-1, None] + widths[:, None] * x[None, :]).ravel()
    W = (widths[:, None] * w[None, :]).ravel()
    return T, W


def line_integral(patch: SurfacePatch, curve: SurfaceCurve, integrand: Callable,
                  quad: QuadSpec = QuadSpec(), gate: Optional[float] = None) -> float:
    """Integrate ``integrand(cf) dt`` along the curve with a doubling gate."""

    def value(panels: int) -> float:
        T, W = _panel_nodes(curve.t0, curve.t1, panels, quad.line_nodes)
        cf = curve_frame(patch, curve, T)
        vals = np.asarray(integrand(cf), dtype=float)
        return math.fsum((vals * W).tolist())

    coarse = value(max(1, quad.line_panels // 2))
    fine = value(quad.line_panels)
    if gate is not None and abs(fine - coarse) > gate:
        raise QuadratureNonConvergence(
            f"{curve.label}: panel doubling moved the value by {abs(fine - coarse):.3e}"
        )
    return fine


def area_integral(patch: SurfacePatch, region: Region, field: Callable,
                  quad: QuadSpec = QuadSpec(), gate: Optional[float] = None) -> float:
    """Integrate a scalar field against the area form over the region."""
    r = region.rect

    def value(pu: int, pv: int) -> float:
        xu, wu = gl01(quad.area_nodes)
        ue = np.linspace(r.u_min, r.u_max, pu + 1)
        ve = np.linspace(r.v_min, r.v_max, pv + 1)
        uw = np.diff(ue)
        vw = np.diff(ve)
        U = (ue[:-1, None] + uw[:, None] * xu[None, :]).ravel()
        V = (ve[:-1, None] + vw[:, None] * xu[None, :]).ravel()
        WU = (uw[:, None] * wu[None, :]).ravel()
        WV = (vw[:, None] * wu[None, :]).ravel()
        UU, VV = np.meshgrid(U, V, indexing="ij")
        ctx = make_ctx(patch, UU.ravel(), VV.ravel(), depth=2)
        fr = ctx.frame
        vals = ctx.value(field(ctx)) * ctx.value(fr.W)
        weights = (WU[:, None] * WV[None, :]).ravel()
        return math.fsum((np.broadcast_to(vals, weights.shape) * weights).tolist())

    pu, pv = quad.area_panels
    coarse = value(max(1, pu // 2), max(1, pv // 2))
    fine = value(pu, pv)
    if gate is not None and abs(fine - coarse) > gate:
        raise QuadratureNonConvergence(
            f"{region.label}: area panel doubling moved the value by {abs(fine - coarse):.3e}"
        )
    return fine


# -- standard line integrands ------------------------------------------------

def ig_ds(f=None):
    if f is None:
        return lambda cf: cf.speed
    return lambda cf: cf.values(f) * cf.speed


def ig_kg_ds(f=None):
    if f is None:
        return lambda cf: cf.phi_dot + cf.w12_gamma
    return lambda cf: cf.values(f) * (cf.phi_dot + cf.w12_gamma)


def ig_dphi(f=None):
    """Tangent-angle differential of the edge itself (smooth pieces only)."""
    if f is None:
        return lambda cf: cf.phi_dot
    return lambda cf: cf.values(f) * cf.phi_dot


def ig_form(form_field, f=None):
    def ig(cf):
        w = form_field(cf.ctx)
        vals = cf.ctx.value(w.du) * cf.u1 + cf.ctx.value(w.dv) * cf.v1
        if f is not None:
            vals = cf.values(f) * vals
        return vals

    return ig


def ig_f_dg(f, g):
    return lambda cf: cf.values(f) * cf.deriv(g)


def boundary_integral(patch: SurfacePatch, region: Region, integrand: Callable,
                      quad: QuadSpec = QuadSpec(), gate: Optional[float] = None,
                      reading: str = "natural") -> float:
    edges, _ = boundary_chain(patch, region, reading)
    return math.fsum(line_integral(patch, e, integrand, quad, gate) for e in edges)


def boundary_turns(patch: SurfacePatch, region: Region, reading: str = "natural",
                   weight: Optional[Callable] = None) -> float:
    """Sum of exterior angles of the boundary chain, optionally field-weighted."""
    edges, cornered = boundary_chain(patch, region, reading)
    if not cornered:
        return 0.0
    total = 0.0
    for (u, v, turn) in corner_turns(patch, edges):
        if weight is None:
            total += turn
        else:
            ctx = make_ctx(patch, u, v, depth=0)
            total += float(ctx.value(weight(ctx))) * turn
    return total


def turning_number(patch: SurfacePatch, region_or_curve, quad: QuadSpec = QuadSpec()) -> float:
    """(total tangent rotation + corner turns) / 2 pi for a closed chain."""
    if isinstance(region_or_curve, Region):
        sweep = boundary_integral(patch, region_or_curve, ig_dphi(), quad)
        turns = boundary_turns(patch, region_or_curve)
    else:
        curve = region_or_curve
        if not curve.closed:
            raise ConfigParse("turning number needs a closed curve")
        sweep = line_integral(patch, curve, ig_dphi(), quad)
        turns = 0.0
    return (sweep + turns) / (2.0 * np.pi)


# ---------------------------------------------------------------------------
# identity residuals

def _grad_fields(f):
    def g1(ctx):
        return pfaff_grad(f)(ctx)[0]

    def g2(ctx):
        return pfaff_grad(f)(ctx)[1]

    return g1, g2


def gauss_bonnet_residual(patch: SurfacePatch, region: Region,
                          quad: QuadSpec = QuadSpec(), gate: Optional[float] = None) -> dict:
    """Total geodesic curvature + corner turns + total curvature - 2 pi chi."""
    kg = boundary_integral(patch, region, ig_kg_ds(), quad, gate)
    turns = boundary_turns(patch, region)
    tot_k = area_integral(patch, region, lambda ctx: ctx.frame.K, quad, gate)
    chi = 0.0 if region.kind == "band" else 1.0
    return {"closed-chain": abs(kg + turns + tot_k - 2.0 * np.pi * chi)}


def closed_loop_total_kg(patch: SurfacePatch, curve: SurfaceCurve,
                         quad: QuadSpec = QuadSpec(), gate: Optional[float] = None) -> float:
    return line_integral(patch, curve, ig_kg_ds(), quad, gate)


def theorem2_residual(patch: SurfacePatch, region: Region, f,
                      quad: QuadSpec = QuadSpec(), gate: Optional[float] = None) -> dict:
    g1, g2 = _grad_fields(f)
    lhs = boundary_integral(patch, region, ig_kg_ds(f), quad, gate) \
        + area_integral(patch, region, lambda c: c.frame.K * f(c), quad, gate)
    rhs = area_integral(
        patch, region, lambda c: c.frame.q2 * g1(c) - c.frame.q1 * g2(c), quad, gate
    ) + boundary_integral(patch, region, ig_dphi(f), quad, gate)
    return {"boundary-vs-area": abs(lhs - rhs)}


def theorem3_residual(patch: SurfacePatch, region: Region, f,
                      quad: QuadSpec = QuadSpec(), gate: Optional[float] = None) -> dict:
    lhs = boundary_integral(patch, region, ig_kg_ds(f), quad, gate)
    rhs = area_integral(patch, region, pi2(f), quad, gate) \
        + boundary_integral(patch, region, ig_dphi(f), quad, gate)
    return {"curvature-pairing": abs(lhs - rhs)}


def harmonic_variant_residual(patch: SurfacePatch, region: Region, f,
                              quad: QuadSpec = QuadSpec(), gate: Optional[float] = None) -> dict:
    """Boundary identity specialized to fields with vanishing second Beltrami."""
    g1, g2 = _grad_fields(f)

    def second_sum(ctx):
        g11 = pfaff_grad(g1)(ctx)[0]
        g22 = pfaff_grad(g2)(ctx)[1]
        return g11 + g22 + ctx.frame.K * f(ctx)

    lhs = boundary_integral(patch, region, ig_kg_ds(f), quad, gate) \
        + area_integral(patch, region, second_sum, quad, gate)
    rhs = boundary_integral(patch, region, ig_dphi(f), quad, gate)
    res = abs(lhs - rhs)
    lap = beltrami(f)
    grid = region.rect.inset(*(0.01 * e for e in region.rect.extent)).grid(6, 6)
    ctx = make_ctx(patch, *grid, depth=2)
    premise = float(np.max(np.abs(ctx.value(lap(ctx)))))
    return {"harmonic-boundary": res, "premise-beltrami": premise}


def green_residual(patch: SurfacePatch, region: Region, f, g,
                   quad: QuadSpec = QuadSpec(), gate: Optional[float] = None) -> dict:
    f1, f2 = _grad_fields(f)
    gg1, gg2 = _grad_fields(g)
    lhs = boundary_integral(patch, region, ig_f_dg(f, g), quad, gate)
    rhs = area_integral(patch, region, lambda c: f1(c) * gg2(c) - f2(c) * gg1(c), quad, gate)
    return {"pairing-area": abs(lhs - rhs)}


def corollary2_residual(patch: SurfacePatch, region: Region,
                        quad: QuadSpec = QuadSpec(), gate: Optional[float] = None) -> dict:
    """Enclosed area from boundary data, for a geodesic boundary."""
    edges, _ = boundary_chain(patch, region)
    for e in edges:
        cf = curve_frame(patch, e, _panel_nodes(e.t0, e.t1, 1, 16)[0])
        worst = float(np.max(np.abs(cf.kg)))
        if worst > 1e-6:
            raise RequirementUnmet(f"boundary is not geodesic (|kg| up to {worst:.2e})")

    def inv_k(ctx):
        return 1.0 / ctx.frame.K

    ik1, ik2 = _grad_fields(inv_k)
    lhs = boundary_integral(patch, region, ig_dphi(inv_k), quad, gate) \
        + area_integral(patch, region,
                        lambda c: c.frame.q2 * ik1(c) - c.frame.q1 * ik2(c), quad, gate)
    area = area_integral(patch, region, const_field(1.0), quad, gate)
    return {"area-from-boundary": abs(lhs - area)}


def _theta_guarded(a1, a2, floor: float):
    th = theta(a1, a2)

    def guarded(ctx):
        w = th(ctx)
        vals = ctx.value(w)
        if np.any(np.abs(vals) <= floor):
            raise DegenerateTheta(
                f"rotation content reaches {float(np.min(np.abs(vals))):.3e}"
            )
        return w

    return guarded


def theorem9_residual(patch: SurfacePatch, region: Region, a1, a2,
                      quad: QuadSpec = QuadSpec(), gate: Optional[float] = None,
                      theta_floor: float = THETA_FLOOR) -> dict:
    th = _theta_guarded(a1, a2, theta_floor)

    def inv_theta(ctx):
        return 1.0 / th(ctx)

    def scaled_form(ctx):
        fr = ctx.frame
        w = from_frame_components(a1(ctx), a2(ctx), fr)
        s = inv_theta(ctx)
        return Form1(s * w.du, s * w.dv)

    it1, it2 = _grad_fields(inv_theta)
    lhs = boundary_integral(patch, region, ig_form(scaled_form), quad, gate)
    mid = area_integral(patch, region, lambda c: it1(c) * a2(c) - it2(c) * a1(c), quad, gate)
    area = area_integral(patch, region, const_field(1.0), quad, gate)
    return {"area-from-form": abs(lhs - mid - area)}


def corollary3_residual(patch: SurfacePatch, region: Region,
                        quad: QuadSpec = QuadSpec(), gate: Optional[float] = None) -> dict:
    one = const_field(1.0)
    return {"area-from-form": theorem9_residual(patch, region, one, one, quad, gate)["area-from-form"]}


def theorem10_residuals(patch: SurfacePatch, region: Region, f,
                        quad: QuadSpec = QuadSpec(), gate: Optional[float] = None) -> dict:
    g1, g2 = _grad_fields(f)

    def area1(ctx):
        fr = ctx.frame
        qt1, _ = q_tilde(ctx)
        return -fr.b * g1(ctx) + fr.a * g2(ctx) + qt1 * fr.K * f(ctx)

    def area2(ctx):
        fr = ctx.frame
        _, qt2 = q_tilde(ctx)
        return -fr.c * g1(ctx) + fr.b * g2(ctx) + qt2 * fr.K * f(ctx)

    b1 = boundary_integral(patch, region, ig_form(lambda c: omega31(c.frame), f), quad, gate)
    b2 = boundary_integral(patch, region, ig_form(lambda c: omega32(c.frame), f), quad, gate)
    return {
        "normal-form-1": abs(b1 - area_integral(patch, region, area1, quad, gate)),
        "normal-form-2": abs(b2 - area_integral(patch, region, area2, quad, gate)),
    }


def theorem14_residuals(patch: SurfacePatch, region: Region, f,
                        quad: QuadSpec = QuadSpec(), gate: Optional[float] = None,
                        r_floor: float = R_FLOOR) -> dict:
    if region.kind != "band":
        raise RequirementUnmet("direction-field identities run on bands")
    phi = band_angle_field(region)
    g1, g2 = _grad_fields(f)
    p1, p2 = _grad_fields(phi)

    def P(ctx):
        return p1(ctx) + ctx.frame.q1

    def Q(ctx):
        return p2(ctx) + ctx.frame.q2

    def transport(ctx):
        return -Q(ctx) * g1(ctx) + P(ctx) * g2(ctx)

    lhs_field = boundary_integral(patch, region, ig_f_dg(f, phi), quad, gate)
    a_full = area_integral(
        patch, region, lambda c: transport(c) + pi2(f)(c) + c.frame.K * f(c), quad, gate
    )
    kg_part = boundary_integral(patch, region, ig_kg_ds(f), quad, gate)
    a_kg = area_integral(patch, region, lambda c: transport(c) + c.frame.K * f(c), quad, gate)
    out = {
        "angle-form": abs(lhs_field + a_full),
        "curvature-form": abs(kg_part + a_kg),
    }

    def transport_unit(ctx):
        pp, qq = P(ctx), Q(ctx)
        r = (pp * pp + qq * qq) ** 0.5
        rv = ctx.value(r)
        if np.any(rv < r_floor):
            raise AngleFieldUndefined(
                f"direction field modulus reaches {float(np.min(rv)):.3e}"
            )
        return (-qq * g1(ctx) + pp * g2(ctx)) / r

    try:
        b_full = area_integral(
            patch, region, lambda c: transport_unit(c) + pi2(f)(c) + c.frame.K * f(c), quad, gate
        )
        out["unit-reading-gap"] = abs(lhs_field + b_full)
    except AngleFieldUndefined:
        out["unit-reading-gap"] = float("nan")
    return out


# -- level/moment fields ------------------------------------------------------

def angular_coordinate_field(patch: SurfacePatch):
    """The raw chart coordinate winding around the angular axis."""
    if patch.angular_axis is None:
        raise RequirementUnmet("no angular coordinate on this chart")
    if patch.angular_axis == 1:
        return lambda ctx: ctx.v + 0.0 * ctx.u
    return lambda ctx: ctx.u + 0.0 * ctx.v


def mu_field(patch: SurfacePatch, floor: float = MU_FLOOR):
    """Proportionality factor between the connection pair and the level gradient."""
    lam = angular_coordinate_field(patch)

    def mu(ctx):
        fr = ctx.frame
        g1, g2 = pfaff_grad(lam)(ctx)
        den = g1 * g1 + g2 * g2
        dv = ctx.value(den)
        if np.any(np.abs(dv) <= floor):
            raise DegenerateMu(f"level gradient reaches {float(np.min(np.abs(dv))):.3e}")
        return (fr.q1 * g1 + fr.q2 * g2) / den

    return mu


def lambda_mu_identities(patch: SurfacePatch, region: Region,
                         quad: QuadSpec = QuadSpec(), gate: Optional[float] = None) -> dict:
    lam = angular_coordinate_field(patch)
    mu = mu_field(patch)
    grid = region.rect.inset(*(0.02 * e for e in region.rect.extent)).grid(7, 5)
    ctx = make_ctx(patch, *grid, depth=2)
    fr = ctx.frame
    val = ctx.value
    l1, l2 = (val(w) for w in pfaff_grad(lam)(ctx))
    m1, m2 = (val(w) for w in pfaff_grad(mu)(ctx))
    q1, q2, K = val(fr.q1), val(fr.q2), val(fr.K)
    muv = val(mu(ctx))
    lamv = val(lam(ctx))
    out = {
        "level-alignment": float(np.max(np.abs(l1 * q2 - l2 * q1))),
        "factorization-1": float(np.max(np.abs(q1 - muv * l1))),
        "factorization-2": float(np.max(np.abs(q2 - muv * l2))),
        "curvature-determinant": float(np.max(np.abs(m1 * l2 - l1 * m2 + K))),
        "pi2-level": float(np.max(np.abs(
            val(pi2(lam)(ctx)) + K * lamv))),
        "pi2-level-function": float(np.max(np.abs(
            val(pi2(lambda c: m.sin(lam(c)))(ctx)) + K * np.sin(lamv)))),
    }
    # boundary exchange: level against moment differential, moment against level,
    # total curvature, and the connection defect, all equal up to signs
    lam_raw = (lambda cf: cf.v) if patch.angular_axis == 1 else (lambda cf: cf.u)
    i_lam_dmu = math.fsum(
        line_integral(patch, e,
                      lambda cf: lam_raw(cf) * cf.deriv(mu), quad, gate)
        for e in boundary_chain(patch, region, "rect")[0]
    )
    i_mu_dlam = math.fsum(
        line_integral(patch, e,
                      lambda cf: cf.values(mu) * (cf.v1 if patch.angular_axis == 1 else cf.u1),
                      quad, gate)
        for e in boundary_chain(patch, region, "rect")[0]
    )
    i_k = area_integral(patch, region, lambda c: c.frame.K, quad, gate)
    i_dpsi = -boundary_integral(patch, region, ig_form(lambda c: omega12(c.frame)), quad, gate)
    out["exchange-level-moment"] = abs(i_lam_dmu - i_k)
    out["exchange-antisymmetry"] = abs(i_lam_dmu + i_mu_dlam)
    out["exchange-transport"] = abs(i_dpsi - i_k)
    return out


def lambda_mu_claims(patch: SurfacePatch, region: Region,
                     quad: QuadSpec = QuadSpec(), gate: Optional[float] = None) -> dict:
    """Measured values for the moment-field claims, against both the stated
    forms and the expansion that q = mu grad(level) actually implies."""
    mu = mu_field(patch)
    grid = region.rect.inset(*(0.02 * e for e in region.rect.extent)).grid(7, 5)
    ctx = make_ctx(patch, *grid, depth=2)
    val = ctx.value
    K = val(ctx.frame.K)
    muv = val(mu(ctx))
    d12_mu = val(d_omega(lambda c: c.frame.q1, lambda c: c.frame.q2, mu)(ctx))
    nu = 2
    d12_mu_nu = val(d_omega(lambda c: c.frame.q1, lambda c: c.frame.q2,
                            lambda c: mu(c) ** nu)(ctx))
    pi2_exp = val(pi2(lambda c: m.exp(mu(c)))(ctx))
    i_mu_w12 = boundary_integral(patch, region, ig_form(lambda c: omega12(c.frame), mu),
                                 quad, gate)
    return {
        "moment-transport-stated": float(np.max(np.abs(d12_mu))),
        "moment-transport-expansion": float(np.max(np.abs(d12_mu + 2.0 * K * muv))),
        "moment-power-stated": float(np.max(np.abs(d12_mu_nu - (nu - 1) * K * muv ** nu))),
        "moment-power-expansion": float(np.max(np.abs(d12_mu_nu + (nu + 1) * K * muv ** nu))),
        "moment-function-stated": float(np.max(np.abs(
            pi2_exp - K * (1.0 - np.exp(muv) + muv * np.exp(muv))))),
        "moment-function-expansion": float(np.max(np.abs(
            pi2_exp + K * (np.exp(muv) + muv * np.exp(muv))))),
        "moment-loop-stated": abs(i_mu_w12),
        "pi2-moment-stated": float(np.max(np.abs(val(pi2(mu)(ctx))))),
        "pi2-moment-expansion": float(np.max(np.abs(val(pi2(mu)(ctx)) + 2.0 * K * muv))),
    }


_COROLLARY4_FIELDS = {
    "sphere": lambda ctx: 1.0 / m.sin(ctx.u),
    "torus": lambda ctx: 1.0 / m.cos(ctx.u),
}


def corollary4_residuals(patch: SurfacePatch, region: Region, branch: int,
                         quad: QuadSpec = QuadSpec(), gate: Optional[float] = None) -> dict:
    """Vanishing circulation of the normal forms under the transport constraints."""
    grid = region.rect.inset(*(0.02 * e for e in region.rect.extent)).grid(7, 5)
    ctx = make_ctx(patch, *grid, depth=2)
    val = ctx.value
    fr = ctx.frame
    qt1, qt2 = q_tilde(ctx)
    if branch == 1:
        worst = float(np.max(np.abs(val(qt1))))
        if worst > 1e-8:
            raise ConstraintUnsatisfiable(
                f"first transport constraint is not degenerate here (up to {worst:.2e}); "
                "no closed-form solution is wired for that configuration"
            )
        f = const_field(1.0)
        loop = boundary_integral(patch, region, ig_form(lambda c: omega31(c.frame), f),
                                 quad, gate)
        return {"constraint-degeneracy": worst, "circulation": abs(loop)}
    f = _COROLLARY4_FIELDS.get(patch.name)
    if f is None:
        raise ConstraintUnsatisfiable(
            f"no single-valued transport solution wired for {patch.describe()}"
        )
    g1, g2 = (val(w) for w in pfaff_grad(f)(ctx))
    fv = val(f(ctx))
    c1 = float(np.max(np.abs(g1 - val(fr.a) * val(qt2) * fv)))
    c2 = float(np.max(np.abs(g2 - val(fr.b) * val(qt2) * fv)))
    loop = boundary_integral(patch, region, ig_form(lambda c: omega32(c.frame), f), quad, gate)
    return {"constraint-1": c1, "constraint-2": c2, "circulation": abs(loop)}


def note_ii_residuals(patch: SurfacePatch, region: Region, f,
                      quad: QuadSpec = QuadSpec(), gate: Optional[float] = None) -> dict:
    """Parallel-transport defect equals total curvature, plus its weighted form."""
    i_dpsi = -boundary_integral(patch, region, ig_form(lambda c: omega12(c.frame)), quad, gate)
    i_k = area_integral(patch, region, lambda c: c.frame.K, quad, gate)
    g1, g2 = _grad_fields(f)
    i_fdpsi = -boundary_integral(patch, region, ig_form(lambda c: omega12(c.frame), f),
                                 quad, gate)
    i_area = area_integral(
        patch, region,
        lambda c: c.frame.q2 * g1(c) - c.frame.q1 * g2(c) - c.frame.K * f(c), quad, gate
    )
    return {
        "transport-defect": abs(i_dpsi - i_k),
        "weighted-transport": abs(i_fdpsi + i_area),
    }


def stokes_residual(patch: SurfacePatch, region: Region, f, a1, a2,
                    quad: QuadSpec = QuadSpec(), gate: Optional[float] = None) -> dict:
    def form(ctx):
        return from_frame_components(a1(ctx), a2(ctx), ctx.frame)

    lhs = boundary_integral(patch, region, ig_form(form, f), quad, gate)
    rhs = area_integral(patch, region, d_omega(a1, a2, f), quad, gate)
    return {"exterior-derivative": abs(lhs - rhs)}
