"""Parametric surface patches and their derivative backends.

A chart is an ordinary Python function (u, v) -> (x, y, z) written against
:mod:`beltrami.mathfns`, so a single definition serves three backends:

* ``analytic``  exact symbolic partials, lambdified and cached
* ``dual``      the chart evaluated directly on truncated Taylor seeds
* ``fd``        4th-order central stencils seeding the Taylor coefficients

``eval_jet`` returns the chart as three Jets at batched base points; all
downstream frame and operator code is backend-agnostic.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import mathfns as m
from .errors import ConfigParse, DifferentiationFailure, PointOutsideDomain, UnknownSurface
from .jets import Jet, fd_partial

EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class Rect:
    u_min: float
    u_max: float
    v_min: float
    v_max: float

    @property
    def extent(self) -> tuple[float, float]:
        return (self.u_max - self.u_min, self.v_max - self.v_min)

    def contains(self, u, v, margin: float = 0.0) -> np.ndarray:
        u = np.asarray(u)
        v = np.asarray(v)
        return (
            (u >= self.u_min - margin)
            & (u <= self.u_max + margin)
            & (v >= self.v_min - margin)
            & (v <= self.v_max + margin)
        )

    def inset(self, du: float, dv: float) -> "Rect":
        return Rect(self.u_min + du, self.u_max - du, self.v_min + dv, self.v_max - dv)

    def grid(self, nu: int, nv: int) -> tuple[np.ndarray, np.ndarray]:
        """Interior tensor grid (cell midpoints), flattened."""
        us = self.u_min + (np.arange(nu) + 0.5) / nu * (self.u_max - self.u_min)
        vs = self.v_min + (np.arange(nv) + 0.5) / nv * (self.v_max - self.v_min)
        U, V = np.meshgrid(us, vs, indexing="ij")
        return U.ravel(), V.ravel()

    def sample(self, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        u = rng.uniform(self.u_min, self.u_max, n)
        v = rng.uniform(self.v_min, self.v_max, n)
        return u, v


@dataclass(frozen=True)
class SurfacePatch:
    name: str
    chart: Callable
    domain: Rect
    sample_domain: Rect
    params: tuple = ()
    mode: str = "analytic"
    flat: bool = False
    rotational: bool = False
    angular_axis: Optional[int] = None   # chart axis that winds around (0=u, 1=v)
    polar_at_umin: bool = False          # chart collapses to a point at u = u_min
    image_window: Optional[Rect] = None  # sub-rect where |K| is bounded away from 0
    gauge: object = None                 # None | ("const", alpha) | ("field", psi)
    normal_sign: int = 1
    regularity_margin: float = 1e-8
    fd_grade: str = "oracle"             # "oracle" | "contract"
    fd_steps: Optional[float] = None     # explicit uniform stencil step (ladder runs)
    fd_scale: float = 1.0

    # -- reconfiguration -------------------------------------------------

    def with_mode(self, mode: str) -> "SurfacePatch":
        if mode not in ("analytic", "dual", "fd"):
            raise ConfigParse(f"unknown derivative mode {mode!r}")
        return dataclasses.replace(self, mode=mode)

    def with_gauge(self, gauge) -> "SurfacePatch":
        return dataclasses.replace(self, gauge=gauge)

    def with_normal_flip(self) -> "SurfacePatch":
        return dataclasses.replace(self, normal_sign=-self.normal_sign)

    def with_fd_steps(self, h: float) -> "SurfacePatch":
        return dataclasses.replace(self, fd_steps=h)

    def with_fd_grade(self, grade: str) -> "SurfacePatch":
        return dataclasses.replace(self, fd_grade=grade)

    @property
    def cache_key(self) -> tuple:
        return (self.name, self.params)

    def describe(self) -> str:
        ps = ", ".join(f"{k}={v}" for k, v in self.params)
        return f"{self.name}({ps})" if ps else self.name

    # -- stencil step policy ----------------------------------------------

    def fd_step(self, order: int, axis: int) -> float:
        """Stencil step for an order-``order`` partial along chart axis ``axis``."""
        if self.fd_steps is not None:
            return self.fd_steps
        if order == 0:
            return 1.0
        expo = 1.0 / (order + 4) if self.fd_grade == "oracle" else 1.0 / (order + 2)
        scale = max(self.domain.extent[axis], 0.5) * self.fd_scale
        h = EPS ** expo * scale
        if h < 1e-13:
            raise DifferentiationFailure(f"stencil step underflow: {h!r}")
        return h

    def outer_step(self, axis: int) -> float:
        """Step for stencils applied on top of already-differenced quantities."""
        if self.fd_steps is not None:
            return self.fd_steps
        return EPS ** 0.125 * max(self.domain.extent[axis], 0.5) * self.fd_scale

    # -- evaluation ---------------------------------------------------------

    def check_inside(self, u, v, margin: Optional[float] = None) -> None:
        mgn = 1e-12 if margin is None else margin
        ok = self.domain.contains(u, v, margin=mgn)
        if not np.all(ok):
            bad_u = np.asarray(u)[~ok] if np.asarray(u).shape else u
            raise PointOutsideDomain(f"{self.describe()}: points outside chart domain, e.g. u={np.ravel(bad_u)[:1]}")

    def eval_chart(self, u, v):
        """Plain positions, any backend-compatible argument type."""
        return self.chart(u, v)

    def eval_jet(self, u, v, deg: int, check: bool = True) -> tuple[Jet, Jet, Jet]:
        """Chart components as degree-``deg`` Jets at batched base points.

        ``check=False`` skips the domain test; stencil shifts use it, since
        every catalog chart is a globally smooth formula.
        """
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if check:
            self.check_inside(u, v)
        if self.mode == "analytic":
            return self._jet_analytic(u, v, deg)
        if self.mode == "dual":
            return self._jet_dual(u, v, deg)
        if self.mode == "fd":
            return self._jet_fd(u, v, deg)
        raise ConfigParse(f"unknown derivative mode {self.mode!r}")

    def _jet_dual(self, u, v, deg):
        shape = np.broadcast_shapes(u.shape, v.shape)
        ju = Jet.variable(np.broadcast_to(u, shape), deg, 0)
        jv = Jet.variable(np.broadcast_to(v, shape), deg, 1)
        return tuple(_as_jet(w, deg, shape) for w in self.chart(ju, jv))

    def _jet_analytic(self, u, v, deg):
        fns = _partial_fns(self, deg)
        shape = np.broadcast_shapes(u.shape, v.shape)
        out = []
        for comp in fns:
            partials = {}
            for (i, j), fn in comp.items():
                val = np.asarray(fn(u, v), dtype=float)
                partials[(i, j)] = np.broadcast_to(val, shape)
            out.append(Jet.from_partials(partials, deg))
        return tuple(out)

    def _jet_fd(self, u, v, deg):
        shape = np.broadcast_shapes(u.shape, v.shape)
        comps = []
        for k in range(3):
            fn = _component_fn(self.chart, k)
            partials = {}
            for i in range(deg + 1):
                for j in range(deg + 1 - i):
                    hu = self.fd_step(i, 0)
                    hv = self.fd_step(j, 1)
                    partials[(i, j)] = np.broadcast_to(fd_partial(fn, u, v, i, j, hu, hv), shape)
            comps.append(Jet.from_partials(partials, deg))
        return tuple(comps)


def _as_jet(w, deg, shape) -> Jet:
    if isinstance(w, Jet):
        return w
    val = np.broadcast_to(np.asarray(w, dtype=float), shape)
    return Jet.constant(val, deg)


def _component_fn(chart, k):
    def fn(U, V):
        val = np.asarray(chart(U, V)[k], dtype=float)
        return np.broadcast_to(val, np.broadcast_shapes(U.shape, V.shape))

    return fn


_PARTIAL_CACHE: dict = {}


def _partial_fns(patch: SurfacePatch, deg: int):
    """Lambdified chart partials, one dict {(i, j): fn} per component."""
    key = (patch.cache_key, deg)
    hit = _PARTIAL_CACHE.get(key)
    if hit is not None:
        return hit
    import sympy as sp

    us, vs = sp.symbols("u v", real=True)
    exprs = patch.chart(us, vs)
    comps = []
    for expr in exprs:
        expr = sp.sympify(expr)
        fns = {}
        for i in range(deg + 1):
            for j in range(deg + 1 - i):
                d = sp.diff(expr, us, i, vs, j)
                fns[(i, j)] = sp.lambdify((us, vs), d, modules="numpy")
        comps.append(fns)
    _PARTIAL_CACHE[key] = comps
    return comps


# ---------------------------------------------------------------------------
# catalog

TWO_PI = 2.0 * np.pi


def make_plane() -> SurfacePatch:
    def chart(u, v):
        return (u, v, 0.0)

    dom = Rect(-1.0, 1.0, -1.0, 1.0)
    return SurfacePatch(
        name="plane", chart=chart, domain=dom, sample_domain=dom.inset(0.1, 0.1),
        flat=True,
    )


def make_disk(R: float = 1.0) -> SurfacePatch:
    def chart(u, v):
        return (u * m.cos(v), u * m.sin(v), 0.0)

    dom = Rect(0.0, R, 0.0, TWO_PI)
    return SurfacePatch(
        name="disk", chart=chart, domain=dom,
        sample_domain=Rect(0.15 * R, 0.95 * R, 0.0, TWO_PI),
        params=(("R", R),), flat=True, rotational=True, angular_axis=1,
        polar_at_umin=True,
    )


def make_cylinder(R: float = 2.0) -> SurfacePatch:
    def chart(u, v):
        return (R * m.cos(u), R * m.sin(u), v)

    dom = Rect(0.0, TWO_PI, -1.0, 1.0)
    return SurfacePatch(
        name="cylinder", chart=chart, domain=dom,
        sample_domain=Rect(0.0, TWO_PI, -0.9, 0.9),
        params=(("R", R),), flat=True, rotational=True, angular_axis=0,
    )


def make_sphere(R: float = 1.0) -> SurfacePatch:
    # geodesic polar chart about the north pole; u is the polar distance
    def chart(u, v):
        return (R * m.sin(u) * m.cos(v), R * m.sin(u) * m.sin(v), R * m.cos(u))

    # sample window keeps nested stencils clear of the polar frame degeneracy
    dom = Rect(0.0, np.pi - 0.05, 0.0, TWO_PI)
    sample = Rect(0.25, np.pi - 0.25, 0.0, TWO_PI)
    return SurfacePatch(
        name="sphere", chart=chart, domain=dom, sample_domain=sample,
        params=(("R", R),), rotational=True, angular_axis=1, image_window=sample,
        polar_at_umin=True,
    )


def make_torus(R: float = 2.0, r: float = 0.5) -> SurfacePatch:
    # u runs around the tube, v around the axis of revolution
    def chart(u, v):
        w = R + r * m.cos(u)
        return (w * m.cos(v), w * m.sin(v), r * m.sin(u))

    dom = Rect(0.0, TWO_PI, 0.0, TWO_PI)
    return SurfacePatch(
        name="torus", chart=chart, domain=dom, sample_domain=dom,
        params=(("R", R), ("r", r)), rotational=True, angular_axis=1,
        image_window=Rect(0.2, 1.2, 0.0, TWO_PI),
    )


def make_graph(preset: str = "saddle", amp: Optional[float] = None) -> SurfacePatch:
    if preset == "saddle":
        a = 0.5 if amp is None else amp

        def chart(u, v):
            return (u, v, a * (u * u - v * v))

        window = Rect(-0.9, 0.9, -0.9, 0.9)
    elif preset == "waves":
        a = 0.3 if amp is None else amp

        def chart(u, v):
            return (u, v, a * m.sin(u) * m.sin(v))

        window = None
    else:
        raise ConfigParse(f"unknown graph preset {preset!r}")

    dom = Rect(-1.0, 1.0, -1.0, 1.0)
    return SurfacePatch(
        name="graph", chart=chart, domain=dom, sample_domain=dom.inset(0.1, 0.1),
        params=(("preset", preset), ("amp", a)), image_window=window,
    )


CATALOG: dict[str, Callable[..., SurfacePatch]] = {
    "plane": make_plane,
    "disk": make_disk,
    "cylinder": make_cylinder,
    "sphere": make_sphere,
    "torus": make_torus,
    "graph": make_graph,
}


def parse_surface(spec: str) -> SurfacePatch:
    """Build a catalog surface from ``name`` or ``name:key=val,key=val``."""
    spec = spec.strip()
    body = ""
    if ":" in spec:
        name, body = spec.split(":", 1)
    elif spec.endswith("}") and "{" in spec:
        name, body = spec[:-1].split("{", 1)
    else:
        name = spec
    name = name.strip()
    if name not in CATALOG:
        raise UnknownSurface(f"unknown surface {name!r}; have {sorted(CATALOG)}")
    kwargs = {}
    if body.strip():
        for item in body.split(","):
            if "=" not in item:
                raise ConfigParse(f"bad surface parameter {item!r} (expected key=value)")
            k, val = item.split("=", 1)
            k = k.strip()
            val = val.strip()
            try:
                kwargs[k] = float(val)
            except ValueError:
                kwargs[k] = val
    try:
        patch = CATALOG[name](**kwargs)
    except TypeError as exc:
        raise ConfigParse(f"bad parameters for {name!r}: {exc}") from None
    # probe the chart once so a malformed parameter value fails at parse time
    try:
        dom = patch.domain
        patch.eval_chart(0.5 * (dom.u_min + dom.u_max), 0.5 * (dom.v_min + dom.v_max))
    except (TypeError, ValueError) as exc:
        raise ConfigParse(f"bad parameters for {name!r}: {exc}") from None
    return patch
