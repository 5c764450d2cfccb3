"""Curves in a chart, frame data along them, and integration regions.

A SurfaceCurve is a parametric path t -> (u(t), v(t)) written against
:mod:`beltrami.mathfns`; its velocity and acceleration come from exact
one-variable Taylor seeds, independent of which backend differentiates the
surface.  ``curve_frame`` combines those parametric derivatives with frame
fields evaluated at the curve points, giving geodesic curvature by three
genuinely different routes:

* ``kg``          Liouville assembly (phi' + connection pullback) / speed
* ``kg_ambient``  <x'', e3 x x'> / speed^3 straight from chart derivatives
* ``kg_theta``    rotation operator applied to the unit tangent field of a
                  coordinate foliation (coordinate curves only)

Region models the integration domains the audits use: chart rectangles
with four corners, bands bounded by two coordinate circles, and caps
bounded by one.  Boundary chains come back positively oriented for the
du^dv orientation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigParse, SingularCurvePoint
from .frames import cross3, dot3, make_ctx
from .jets import Jet
from .operators import theta
from .surfaces import Rect, SurfacePatch

SPEED_FLOOR = 1e-10
TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SurfaceCurve:
    u_fn: Callable
    v_fn: Callable
    t0: float
    t1: float
    closed: bool = False
    coordinate: Optional[str] = None  # "u" / "v": the coordinate that moves
    label: str = "curve"

    def param_jets(self, t, deg: int = 2) -> tuple[Jet, Jet]:
        t = np.asarray(t, dtype=float)
        tj = Jet.variable(t, deg, 0)
        return _as_curve_jet(self.u_fn(tj), t, deg), _as_curve_jet(self.v_fn(tj), t, deg)

    def endpoints(self) -> np.ndarray:
        return np.array([self.t0, self.t1])


def _as_curve_jet(w, t, deg) -> Jet:
    if isinstance(w, Jet):
        return w
    return Jet.constant(np.broadcast_to(np.asarray(w, dtype=float), t.shape), deg)


class CurveFrameData:
    """Everything the line integrals read, at a batch of parameter values."""

    def __init__(self, patch: SurfacePatch, curve: SurfaceCurve, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        U, V = curve.param_jets(t, deg=2)
        self.t = t
        self.u = U.value
        self.v = V.value
        self.u1 = U.partial(1, 0)
        self.v1 = V.partial(1, 0)
        self.u2 = U.partial(2, 0)
        self.v2 = V.partial(2, 0)
        self.patch = patch
        self.curve = curve
        self.ctx = make_ctx(patch, self.u, self.v, depth=2)
        val = self.ctx.value
        fr = self.ctx.frame
        A1, B1 = val(fr.A1), val(fr.B1)
        A2, B2 = val(fr.A2), val(fr.B2)
        self.s1 = A1 * self.u1 + B1 * self.v1
        self.s2 = A2 * self.u1 + B2 * self.v1
        self.speed = np.hypot(self.s1, self.s2)
        if np.any(self.speed < SPEED_FLOOR):
            raise SingularCurvePoint(
                f"{curve.label}: curve speed reaches {float(np.min(self.speed)):.3e}"
            )
        self.q1 = val(fr.q1)
        self.q2 = val(fr.q2)
        # connection form against the curve velocity
        self.w12_gamma = self.q1 * self.s1 + self.q2 * self.s2
        s1d = self.deriv(lambda c: c.frame.A1) * self.u1 + A1 * self.u2 \
            + self.deriv(lambda c: c.frame.B1) * self.v1 + B1 * self.v2
        s2d = self.deriv(lambda c: c.frame.A2) * self.u1 + A2 * self.u2 \
            + self.deriv(lambda c: c.frame.B2) * self.v1 + B2 * self.v2
        self.phi_dot = (self.s1 * s2d - self.s2 * s1d) / (self.speed * self.speed)
        self.kg = (self.phi_dot + self.w12_gamma) / self.speed
        self.phi_raw = np.arctan2(self.s2, self.s1)

    # -- helpers ---------------------------------------------------------

    def deriv(self, field):
        """d/dt of a scalar field along the curve, by the chain rule."""
        fu, fv = self.ctx.d(field)
        return self.ctx.value(fu) * self.u1 + self.ctx.value(fv) * self.v1

    def values(self, field):
        return np.broadcast_to(self.ctx.value(field(self.ctx)), self.t.shape)

    @property
    def kg_ambient(self):
        """Geodesic curvature from chart second derivatives and the normal."""
        ctx, val = self.ctx, self.ctx.value
        fr = ctx.frame
        xu = tuple(val(c) for c in fr.xu)
        xv = tuple(val(c) for c in fr.xv)
        xuu, xuv, xvv = [], [], []
        for k in range(3):
            d2u = ctx.d(lambda c, k=k: c.frame.xu[k])
            d2v = ctx.d(lambda c, k=k: c.frame.xv[k])
            xuu.append(val(d2u[0]))
            xuv.append(0.5 * (val(d2u[1]) + val(d2v[0])))
            xvv.append(val(d2v[1]))
        xp = tuple(xu[k] * self.u1 + xv[k] * self.v1 for k in range(3))
        xpp = tuple(
            xu[k] * self.u2 + xv[k] * self.v2
            + xuu[k] * self.u1 ** 2 + 2.0 * xuv[k] * self.u1 * self.v1
            + xvv[k] * self.v1 ** 2
            for k in range(3)
        )
        e3 = tuple(val(c) for c in fr.e3)
        return dot3(xpp, cross3(e3, xp)) / self.speed ** 3

    @property
    def kg_theta(self):
        """Rotation-operator route; defined for coordinate curves only."""
        if self.curve.coordinate not in ("u", "v"):
            return None
        if self.curve.coordinate == "v":
            sgn = np.sign(self.v1)

            def t1(c):
                fr = c.frame
                h = (fr.B1 * fr.B1 + fr.B2 * fr.B2) ** 0.5
                return fr.B1 / h

            def t2(c):
                fr = c.frame
                h = (fr.B1 * fr.B1 + fr.B2 * fr.B2) ** 0.5
                return fr.B2 / h
        else:
            sgn = np.sign(self.u1)

            def t1(c):
                fr = c.frame
                h = (fr.A1 * fr.A1 + fr.A2 * fr.A2) ** 0.5
                return fr.A1 / h

            def t2(c):
                fr = c.frame
                h = (fr.A1 * fr.A1 + fr.A2 * fr.A2) ** 0.5
                return fr.A2 / h

        return sgn * self.ctx.value(theta(t1, t2)(self.ctx))


def curve_frame(patch: SurfacePatch, curve: SurfaceCurve, t) -> CurveFrameData:
    return CurveFrameData(patch, curve, t)


# ---------------------------------------------------------------------------
# curve factories

def chart_segment(p, q, label: str = "segment") -> SurfaceCurve:
    (ua, va), (ub, vb) = p, q

    def u_fn(t):
        return ua + (ub - ua) * t

    def v_fn(t):
        return va + (vb - va) * t

    coord = None
    if ua == ub:
        coord = "v"
    elif va == vb:
        coord = "u"
    return SurfaceCurve(u_fn, v_fn, 0.0, 1.0, closed=False, coordinate=coord, label=label)


def coordinate_circle(patch: SurfacePatch, value: float, reverse: bool = False,
                      label: str = "circle") -> SurfaceCurve:
    """Closed coordinate curve along the chart's angular axis at a fixed level."""
    if patch.angular_axis is None:
        raise ConfigParse(f"{patch.describe()} has no angular axis")
    dom = patch.domain
    if patch.angular_axis == 1:
        lo, hi = dom.v_min, dom.v_max
        if reverse:
            lo, hi = hi, lo

        def u_fn(t):
            return value + 0.0 * t

        def v_fn(t):
            return lo + (hi - lo) * t

        coord = "v"
    else:
        lo, hi = dom.u_min, dom.u_max
        if reverse:
            lo, hi = hi, lo

        def u_fn(t):
            return lo + (hi - lo) * t

        def v_fn(t):
            return value + 0.0 * t

        coord = "u"
    return SurfaceCurve(u_fn, v_fn, 0.0, 1.0, closed=True, coordinate=coord, label=label)


def chart_circle(cu: float, cv: float, rho_u: float, rho_v: Optional[float] = None,
                 label: str = "loop") -> SurfaceCurve:
    """Closed elliptical loop in chart coordinates (one positive winding)."""
    if rho_v is None:
        rho_v = rho_u
    from . import mathfns as m

    def u_fn(t):
        return cu + rho_u * m.cos(t)

    def v_fn(t):
        return cv + rho_v * m.sin(t)

    return SurfaceCurve(u_fn, v_fn, 0.0, TWO_PI, closed=True, label=label)


def seeded_curve(patch: SurfacePatch, seed: int, closed: bool = False) -> SurfaceCurve:
    """Deterministic smooth test curve inside the sample window."""
    import zlib

    from . import mathfns as m

    h = zlib.crc32(f"curve:{patch.name}:{seed}:{closed}".encode())
    rng = np.random.default_rng(h)
    dom = patch.sample_domain
    eu, ev = dom.extent
    cu = 0.5 * (dom.u_min + dom.u_max) + rng.uniform(-0.05, 0.05) * eu
    cv = 0.5 * (dom.v_min + dom.v_max) + rng.uniform(-0.05, 0.05) * ev
    au = rng.uniform(0.15, 0.3) * eu
    av = rng.uniform(0.15, 0.3) * ev
    if closed:
        pu = rng.uniform(0.0, TWO_PI)

        def u_fn(t):
            return cu + au * m.cos(t + pu)

        def v_fn(t):
            return cv + av * m.sin(t + pu)

        return SurfaceCurve(u_fn, v_fn, 0.0, TWO_PI, closed=True, label=f"loop{seed}")
    wu = rng.uniform(0.8, 1.6)
    wv = rng.uniform(0.8, 1.6)
    pu, pv = rng.uniform(0.0, TWO_PI, 2)

    def u_fn(t):
        return cu + au * m.sin(wu * t + pu)

    def v_fn(t):
        return cv + av * m.cos(wv * t + pv)

    return SurfaceCurve(u_fn, v_fn, 0.0, 2.0, closed=False, label=f"path{seed}")


# ---------------------------------------------------------------------------
# integration regions

@dataclass(frozen=True)
class Region:
    """A parameter rectangle together with how its boundary is read.

    kind "rect": all four edges bound, with corner turns.
    kind "band": the angular coordinate spans its full period; boundary is
                 the two coordinate circles, cut edges cancel.
    kind "cap":  a band whose inner radius sits on a polar chart collapse;
                 boundary is the single outer circle.
    """

    kind: str
    rect: Rect
    angular_axis: Optional[int] = None

    @property
    def label(self) -> str:
        r = self.rect
        return f"{self.kind}[{r.u_min:.3g},{r.u_max:.3g}]x[{r.v_min:.3g},{r.v_max:.3g}]"


def rect_region(patch: SurfacePatch, rect: Optional[Rect] = None) -> Region:
    rect = patch.sample_domain if rect is None else rect
    if not np.all(patch.domain.contains([rect.u_min, rect.u_max], [rect.v_min, rect.v_max])):
        raise ConfigParse(f"region rectangle leaves the chart domain of {patch.describe()}")
    return Region("rect", rect)


def band_region(patch: SurfacePatch, lo: float, hi: float) -> Region:
    """Full angular span, the other coordinate running [lo, hi]."""
    if not patch.rotational or patch.angular_axis is None:
        raise ConfigParse(f"{patch.describe()} supports no band regions")
    dom = patch.domain
    if patch.angular_axis == 1:
        rect = Rect(lo, hi, dom.v_min, dom.v_max)
    else:
        rect = Rect(dom.u_min, dom.u_max, lo, hi)
    if lo >= hi:
        raise ConfigParse("band needs lo < hi")
    return Region("band", rect, angular_axis=patch.angular_axis)


def cap_region(patch: SurfacePatch, hi: float) -> Region:
    if not patch.polar_at_umin:
        raise ConfigParse(f"{patch.describe()} has no polar chart collapse; no caps")
    dom = patch.domain
    if not (dom.u_min < hi <= dom.u_max):
        raise ConfigParse("cap radius outside the chart")
    return Region("cap", Rect(dom.u_min, hi, dom.v_min, dom.v_max), angular_axis=1)


def boundary_chain(patch: SurfacePatch, region: Region, reading: str = "natural"
                   ) -> tuple[list[SurfaceCurve], bool]:
    """Boundary edges, positively oriented; returns (edges, cornered).

    reading "natural" gives the geometric boundary (circles for bands and
    caps); "rect" forces the cut-open four-edge chain, which is what
    integrands that are multivalued around the angular axis need.
    """
    r = region.rect
    corners = [(r.u_min, r.v_min), (r.u_max, r.v_min), (r.u_max, r.v_max), (r.u_min, r.v_max)]

    def rect_chain():
        c0, c1, c2, c3 = corners
        return (
            [
                chart_segment(c0, c1, "bottom"),
                chart_segment(c1, c2, "right"),
                chart_segment(c2, c3, "top"),
                chart_segment(c3, c0, "left"),
            ],
            True,
        )

    if region.kind == "rect" or reading == "rect":
        return rect_chain()
    if region.kind == "band":
        if region.angular_axis == 1:
            outer = coordinate_circle(patch, r.u_max, label="outer")
            inner = coordinate_circle(patch, r.u_min, reverse=True, label="inner")
        else:
            outer = coordinate_circle(patch, r.v_max, reverse=True, label="outer")
            inner = coordinate_circle(patch, r.v_min, label="inner")
        return [outer, inner], False
    if region.kind == "cap":
        return [coordinate_circle(patch, r.u_max, label="rim")], False
    raise ConfigParse(f"unknown region kind {region.kind!r}")


def corner_turns(patch: SurfacePatch, edges: list[SurfaceCurve]) -> list[tuple]:
    """Exterior angles at the joints of a closed cornered chain.

    Returns one (u, v, turn) triple per joint, turn in (-pi, pi].
    """
    outs = []
    ins = []
    for e in edges:
        cf = curve_frame(patch, e, e.endpoints())
        outs.append((cf.s1[0], cf.s2[0], cf.u[0], cf.v[0]))
        ins.append((cf.s1[1], cf.s2[1]))
    turns = []
    n = len(edges)
    for k in range(n):
        s1i, s2i = ins[k]
        s1o, s2o, uo, vo = outs[(k + 1) % n]
        turn = np.arctan2(s1i * s2o - s2i * s1o, s1i * s1o + s2i * s2o)
        turns.append((uo, vo, float(turn)))
    return turns


def band_angle_field(region: Region):
    """Linear angle field across a band: -pi/2 on the inner circle, +pi/2 outer.

    Restricted to either boundary circle its differential vanishes along the
    circle, which is exactly the compatibility the boundary-value identities
    need; across the band it supplies a nondegenerate direction field.
    """
    r = region.rect
    if region.angular_axis == 1:
        lo, hi = r.u_min, r.u_max

        def phi(ctx):
            return -np.pi / 2 + np.pi * (ctx.u - lo) / (hi - lo)
    else:
        lo, hi = r.v_min, r.v_max

        def phi(ctx):
            return -np.pi / 2 + np.pi * (ctx.v - lo) / (hi - lo)

    return phi
