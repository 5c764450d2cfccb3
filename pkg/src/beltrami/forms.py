"""Differential forms on a chart, as coefficient pairs.

A 1-form is stored by its chart coefficients (du, dv); 2-forms reduce to a
single du^dv coefficient, so they stay plain scalars.  Field-level helpers
take functions of ctx and return functions of ctx, which keeps exterior
derivatives backend-agnostic.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Form1:
    du: object
    dv: object

    def __add__(self, other: "Form1") -> "Form1":
        return Form1(self.du + other.du, self.dv + other.dv)

    def __sub__(self, other: "Form1") -> "Form1":
        return Form1(self.du - other.du, self.dv - other.dv)

    def __neg__(self) -> "Form1":
        return Form1(-self.du, -self.dv)

    def scale(self, s) -> "Form1":
        return Form1(s * self.du, s * self.dv)

    def wedge(self, other: "Form1"):
        """du^dv coefficient of self ^ other."""
        return self.du * other.dv - self.dv * other.du

    def frame_components(self, fr):
        """Components on (w1, w2), by Cramer against the coframe."""
        s1 = (self.du * fr.B2 - self.dv * fr.A2) / fr.W
        s2 = (self.dv * fr.A1 - self.du * fr.B1) / fr.W
        return s1, s2

    def pullback(self, du_dt, dv_dt):
        """Pair with a chart velocity: the integrand of a line integral."""
        return self.du * du_dt + self.dv * dv_dt


def from_frame_components(s1, s2, fr) -> Form1:
    return Form1(s1 * fr.A1 + s2 * fr.A2, s1 * fr.B1 + s2 * fr.B2)


# frame coforms read off FrameData

def omega1(fr) -> Form1:
    return Form1(fr.A1, fr.B1)


def omega2(fr) -> Form1:
    return Form1(fr.A2, fr.B2)


def omega12(fr, route: str = "components") -> Form1:
    """Connection form; two independent reads, equal on a valid frame."""
    if route == "components":
        return from_frame_components(fr.q1, fr.q2, fr)
    if route == "direct":
        return Form1(fr.p12, fr.q12)
    raise ValueError(f"unknown omega12 route {route!r}")


def omega31(fr) -> Form1:
    return Form1(fr.P1, fr.Q1)


def omega32(fr) -> Form1:
    return Form1(fr.P2, fr.Q2)


# field-level calculus; a "field" is any function of ctx

def ext_d(form_field):
    """Exterior derivative of a Form1 field, as a du^dv coefficient field."""

    def d_field(ctx):
        dv_u = ctx.d(lambda c: form_field(c).dv)[0]
        du_v = ctx.d(lambda c: form_field(c).du)[1]
        return dv_u - du_v

    return d_field


def ratio_to_area(coefficient, fr):
    """Divide a du^dv coefficient by the area form w1^w2."""
    return coefficient / fr.W
