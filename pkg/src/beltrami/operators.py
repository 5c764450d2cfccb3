"""First and second order operators on scalar fields.

A scalar field is any function of ctx.  Operators are combinators: they take
fields and return fields, so they compose, and every formula below is written
once and runs on exact-Taylor or nested-stencil backends alike.

Gradient components here are frame components: df = g1 w1 + g2 w2 defines
(g1, g2).  The second Beltrami operator has two genuinely distinct
computational routes (component recursion vs an exterior-derivative ratio
through ambient vectors); keeping both is the point, their agreement is one
of the audited facts.
"""

from __future__ import annotations

import zlib

import numpy as np

from . import mathfns as m
from .errors import FlatPointForImage
from .forms import Form1, ext_d
from .frames import dot3

K_FLOOR = 1e-8


def grad1(f):
    """First frame component of df."""

    def g(ctx):
        fu, fv = ctx.d(f)
        fr = ctx.frame
        return (fu * fr.B2 - fv * fr.A2) / fr.W

    return g


def grad2(f):
    """Second frame component of df."""

    def g(ctx):
        fu, fv = ctx.d(f)
        fr = ctx.frame
        return (fv * fr.A1 - fu * fr.B1) / fr.W

    return g


def pfaff_grad(f):
    def g(ctx):
        fu, fv = ctx.d(f)
        fr = ctx.frame
        return (
            (fu * fr.B2 - fv * fr.A2) / fr.W,
            (fv * fr.A1 - fu * fr.B1) / fr.W,
        )

    return g


def commutation_residual(f):
    """g1(g2 f) - g2(g1 f) + q1 g1 f + q2 g2 f; identically zero for smooth f."""

    def r(ctx):
        fr = ctx.frame
        g1, g2 = pfaff_grad(f)(ctx)
        g12 = grad1(grad2(f))(ctx)
        g21 = grad2(grad1(f))(ctx)
        return g12 - g21 + fr.q1 * g1 + fr.q2 * g2

    return r


def beltrami(f, route: str = "components"):
    if route == "components":
        return _beltrami_components(f)
    if route == "forms":
        return _beltrami_forms(f)
    raise ValueError(f"unknown beltrami route {route!r}")


def _beltrami_components(f):
    def lap(ctx):
        fr = ctx.frame
        g1, g2 = pfaff_grad(f)(ctx)
        g11 = grad1(grad1(f))(ctx)
        g22 = grad2(grad2(f))(ctx)
        return g11 + g22 + fr.q2 * g1 - fr.q1 * g2

    return lap


def _beltrami_forms(f):
    # rotate df ninety degrees as an ambient vector, pull its ambient pairing
    # back to a chart 1-form, and take d of that over the area form
    def gamma(ctx):
        fu, fv = ctx.d(f)
        fr = ctx.frame
        G = tuple((fu * xv_k - fv * xu_k) / fr.W for xu_k, xv_k in zip(fr.xu, fr.xv))
        return Form1(dot3(G, fr.xu), dot3(G, fr.xv))

    d_gamma = ext_d(gamma)

    def lap(ctx):
        return d_gamma(ctx) / ctx.frame.W

    return lap


def pi2(f):
    """Second-order curvature pairing: q2 g1 - q1 g2 - K f."""

    def p(ctx):
        fr = ctx.frame
        g1, g2 = pfaff_grad(f)(ctx)
        return fr.q2 * g1 - fr.q1 * g2 - fr.K * f(ctx)

    return p


def theta(A, B):
    """Rotation content of the coefficient pair (A, B): g1(B) - g2(A) + q1 A + q2 B."""

    def t(ctx):
        fr = ctx.frame
        return grad1(B)(ctx) - grad2(A)(ctx) + fr.q1 * A(ctx) + fr.q2 * B(ctx)

    return t


def d_omega(a1, a2, f):
    """First-order operator attached to the 1-form a1 w1 + a2 w2."""
    th = theta(a1, a2)

    def dw(ctx):
        g1, g2 = pfaff_grad(f)(ctx)
        return a2(ctx) * g1 - a1(ctx) * g2 + th(ctx) * f(ctx)

    return dw


# ---------------------------------------------------------------------------
# spherical-image (third fundamental form) variants; all divide by K

def _guard_K(ctx, k_floor):
    K = ctx.value(ctx.frame.K)
    if np.any(np.abs(K) <= k_floor):
        raise FlatPointForImage(
            f"|K| reaches {float(np.min(np.abs(K))):.3e}; image operators need it bounded away from 0"
        )


def q_tilde(ctx, k_floor: float = K_FLOOR):
    """Connection components against the image coframe (w31, w32)."""
    _guard_K(ctx, k_floor)
    fr = ctx.frame
    qt1 = (fr.q2 * fr.b - fr.q1 * fr.c) / fr.K
    qt2 = (fr.q1 * fr.b - fr.q2 * fr.a) / fr.K
    return qt1, qt2


def grad_tilde(f, k_floor: float = K_FLOOR):
    """Components of df on (w31, w32)."""

    def g(ctx):
        _guard_K(ctx, k_floor)
        fr = ctx.frame
        g1, g2 = pfaff_grad(f)(ctx)
        return (
            -(fr.c * g1 - fr.b * g2) / fr.K,
            (fr.b * g1 - fr.a * g2) / fr.K,
        )

    return g


def theta_tilde(A, B, k_floor: float = K_FLOOR):
    def t(ctx):
        qt1, qt2 = q_tilde(ctx, k_floor)
        gB = grad_tilde(B, k_floor)(ctx)[0]
        gA = grad_tilde(A, k_floor)(ctx)[1]
        return gB - gA + qt1 * A(ctx) + qt2 * B(ctx)

    return t


def d_omega_tilde(a1, a2, f, k_floor: float = K_FLOOR):
    th = theta_tilde(a1, a2, k_floor)

    def dw(ctx):
        gt1, gt2 = grad_tilde(f, k_floor)(ctx)
        return a2(ctx) * gt1 - a1(ctx) * gt2 + th(ctx) * f(ctx)

    return dw


# ---------------------------------------------------------------------------
# reusable scalar fields

def const_field(value):
    return lambda ctx: value


def coord_u(ctx):
    return ctx.u


def coord_v(ctx):
    return ctx.v


def seeded_field(patch, seed: int, label: str = ""):
    """Deterministic smooth test field adapted to the chart topology.

    Angular axes only enter through integer-frequency waves, so the field
    stays single-valued around them.
    """
    h = zlib.crc32(f"{patch.name}:{label}:{seed}".encode())
    rng = np.random.default_rng(h)
    coeff = rng.uniform(-1.0, 1.0, 4)
    freq = rng.integers(1, 3, 2)
    phase = rng.uniform(0.0, 2 * np.pi, 2)
    alpha = rng.uniform(0.6, 1.4, 2)

    def basis(x, axis: int):
        if patch.angular_axis == axis:
            k = int(freq[axis])
            return m.sin(k * x + phase[axis]), m.cos(k * x)
        return m.sin(alpha[axis] * x + phase[axis]), x * alpha[axis]

    def f(ctx):
        bu1, bu2 = basis(ctx.u, 0)
        bv1, bv2 = basis(ctx.v, 1)
        return coeff[0] * bu1 * bv1 + coeff[1] * bu2 * bv2 + coeff[2] * bu1 + coeff[3] * bv2

    return f
