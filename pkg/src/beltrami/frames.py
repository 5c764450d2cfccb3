"""Adapted orthonormal frames and the two evaluation contexts.

``build_frame`` turns chart jets into the full frame package: tangent frame
e1, e2, unit normal e3, the dual coframe coefficients, the connection
coefficients q1, q2, and the shape coefficients a, b, c with K = ac - b^2.
An optional tangent gauge rotates (e1, e2) pointwise before anything dual
is read off, so gauged connection data comes out of the same pipeline.

Operator code never touches jets directly.  It is written against a ctx
object exposing ``u``, ``v``, ``x``, ``frame`` and a derivative request
``ctx.d(field)`` where ``field`` is a function of ctx:

* ``JetCtx``   values are Jets; ``d`` reads exact Taylor coefficients.
* ``FdCtx``    values are plain arrays; ``d`` re-evaluates the field at
  stencil-shifted base points, so derivatives of derived quantities are
  honest nested finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dc_fields
from typing import Optional

import numpy as np

from . import mathfns as m
from .errors import DegenerateCoframe
from .jets import Jet, STENCILS
from .surfaces import SurfacePatch


def dot3(p, q):
    return p[0] * q[0] + p[1] * q[1] + p[2] * q[2]


def cross3(p, q):
    return (
        p[1] * q[2] - p[2] * q[1],
        p[2] * q[0] - p[0] * q[2],
        p[0] * q[1] - p[1] * q[0],
    )


def axpy3(alpha, p, q):
    """alpha * p + q, componentwise."""
    return (alpha * p[0] + q[0], alpha * p[1] + q[1], alpha * p[2] + q[2])


def scale3(alpha, p):
    return (alpha * p[0], alpha * p[1], alpha * p[2])


def _val(w):
    return w.value if isinstance(w, Jet) else np.asarray(w)


@dataclass
class FrameData:
    x: tuple
    xu: tuple
    xv: tuple
    e1: tuple
    e2: tuple
    e3: tuple
    A1: object
    B1: object
    A2: object
    B2: object
    W: object
    q1: object
    q2: object
    p12: object   # omega_12 = p12 du + q12 dv, read from <d e1, e2>
    q12: object
    P1: object    # omega_31 = P1 du + Q1 dv, omega_32 = P2 du + Q2 dv
    Q1: object
    P2: object
    Q2: object
    a: object
    b: object
    b_alt: object
    c: object
    K: object

    def strip(self) -> "FrameData":
        out = {}
        for f in dc_fields(self):
            w = getattr(self, f.name)
            out[f.name] = tuple(_val(c) for c in w) if isinstance(w, tuple) else _val(w)
        return FrameData(**out)


def build_frame(x, psi, normal_sign: int, margin: float, label: str) -> FrameData:
    """Frame package from chart jets; ``psi`` is a gauge angle (Jet/float) or None."""
    xu = tuple(c.d_du() for c in x)
    xv = tuple(c.d_dv() for c in x)
    n1 = m.sqrt(dot3(xu, xu))
    _guard_positive(n1, margin, label, "first chart direction degenerates")
    e1 = tuple(c / n1 for c in xu)
    proj = dot3(xv, e1)
    t2 = axpy3(-proj, e1, xv)
    n2 = m.sqrt(dot3(t2, t2))
    _guard_positive(n2, margin, label, "chart directions are parallel")
    e2 = tuple(c / n2 for c in t2)

    if psi is not None:
        cp, sp = m.cos(psi), m.sin(psi)
        e1, e2 = axpy3(cp, e1, scale3(sp, e2)), axpy3(-sp, e1, scale3(cp, e2))

    e3 = scale3(normal_sign, cross3(e1, e2))

    A1 = dot3(xu, e1)
    B1 = dot3(xv, e1)
    A2 = dot3(xu, e2)
    B2 = dot3(xv, e2)
    W = A1 * B2 - A2 * B1
    _guard_positive(W, margin, label, "coframe area form not positive")

    q1 = (B1.d_du() - A1.d_dv()) / W
    q2 = (B2.d_du() - A2.d_dv()) / W

    de1u = tuple(c.d_du() for c in e1)
    de1v = tuple(c.d_dv() for c in e1)
    p12 = dot3(de1u, e2)
    q12 = dot3(de1v, e2)

    de3u = tuple(c.d_du() for c in e3)
    de3v = tuple(c.d_dv() for c in e3)
    P1 = dot3(de3u, e1)
    Q1 = dot3(de3v, e1)
    P2 = dot3(de3u, e2)
    Q2 = dot3(de3v, e2)

    # omega_3i expanded on the coframe, then matched to the shape convention
    # omega_31 = -a w1 - b w2, omega_32 = -b w1 - c w2
    a = -(P1 * B2 - Q1 * A2) / W
    b = -(Q1 * A1 - P1 * B1) / W
    b_alt = -(P2 * B2 - Q2 * A2) / W
    c = -(Q2 * A1 - P2 * B1) / W
    K = a * c - b * b

    return FrameData(
        x=x, xu=xu, xv=xv, e1=e1, e2=e2, e3=e3,
        A1=A1, B1=B1, A2=A2, B2=B2, W=W, q1=q1, q2=q2,
        p12=p12, q12=q12, P1=P1, Q1=Q1, P2=P2, Q2=Q2,
        a=a, b=b, b_alt=b_alt, c=c, K=K,
    )


def _guard_positive(w, margin, label, what):
    v = _val(w)
    if np.any(~np.isfinite(v)) or np.any(v <= margin):
        worst = float(np.min(np.where(np.isfinite(v), v, -np.inf)))
        raise DegenerateCoframe(f"{label}: {what} (min {worst:.3e} <= {margin:.1e})")


def _gauge_angle(patch: SurfacePatch, u_seed, v_seed):
    g = patch.gauge
    if g is None:
        return None
    kind, val = g
    if kind == "const":
        return float(val)
    return val(u_seed, v_seed)


class JetCtx:
    """Field evaluation with exact Taylor-coefficient derivatives."""

    is_fd = False

    def __init__(self, patch: SurfacePatch, u, v, deg: int = 4):
        self.patch = patch
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        shape = np.broadcast_shapes(u.shape, v.shape)
        self._u0 = np.broadcast_to(u, shape)
        self._v0 = np.broadcast_to(v, shape)
        self.deg = deg
        self.u = Jet.variable(self._u0, deg, 0)
        self.v = Jet.variable(self._v0, deg, 1)
        self._x: Optional[tuple] = None
        self._frame: Optional[FrameData] = None

    @property
    def x(self):
        if self._x is None:
            self._x = self.patch.eval_jet(self._u0, self._v0, self.deg)
        return self._x

    @property
    def frame(self) -> FrameData:
        if self._frame is None:
            psi = _gauge_angle(self.patch, self.u, self.v)
            self._frame = build_frame(
                self.x, psi, self.patch.normal_sign,
                self.patch.regularity_margin, self.patch.describe(),
            )
        return self._frame

    def d(self, field):
        j = field(self)
        if not isinstance(j, Jet):
            z = Jet.constant(np.zeros(self._u0.shape), max(self.deg - 1, 0))
            return z, z
        return j.d_du(), j.d_dv()

    def value(self, w):
        return _val(w)


class FdCtx:
    """Field evaluation where every requested derivative is a stencil."""

    is_fd = True

    def __init__(self, patch: SurfacePatch, u, v, check: bool = True):
        self.patch = patch
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        shape = np.broadcast_shapes(u.shape, v.shape)
        self.u = np.broadcast_to(u, shape)
        self.v = np.broadcast_to(v, shape)
        if check:
            patch.check_inside(u, v)
        self._frame: Optional[FrameData] = None

    @property
    def x(self):
        return self.frame.x

    @property
    def frame(self) -> FrameData:
        if self._frame is None:
            X = self.patch.eval_jet(self.u, self.v, 2, check=False)
            psi = _gauge_angle(
                self.patch, Jet.variable(self.u, 2, 0), Jet.variable(self.v, 2, 1)
            )
            fr = build_frame(
                X, psi, self.patch.normal_sign,
                self.patch.regularity_margin, self.patch.describe(),
            )
            self._frame = fr.strip()
        return self._frame

    def d(self, field):
        w, off = STENCILS[1]
        hu = self.patch.outer_step(0)
        hv = self.patch.outer_step(1)
        fu = fv = 0.0
        for wk, ok in zip(w, off):
            if wk == 0.0:
                continue
            fu = fu + wk * field(FdCtx(self.patch, self.u + ok * hu, self.v, check=False))
            fv = fv + wk * field(FdCtx(self.patch, self.u, self.v + ok * hv, check=False))
        return fu / hu, fv / hv

    def value(self, w):
        return np.asarray(w)


def make_ctx(patch: SurfacePatch, u, v, depth: int = 2):
    """Evaluation context at batched base points.

    ``depth`` bounds how many derivative requests will be stacked on top of
    frame quantities; Taylor backends size their truncation from it.
    """
    if patch.mode == "fd":
        return FdCtx(patch, u, v)
    return JetCtx(patch, u, v, deg=2 + depth)
