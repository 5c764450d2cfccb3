"""Shared fixtures and grid helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from beltrami.frames import make_ctx
from beltrami.surfaces import CATALOG, parse_surface

ALL_NAMES = tuple(sorted(CATALOG))
NONFLAT_NAMES = ("graph", "sphere", "torus")


@pytest.fixture(scope="session")
def patches():
    return {name: parse_surface(name) for name in CATALOG}


def sample_points(patch, nu: int = 6, nv: int = 4, inset: float = 0.04):
    rect = patch.sample_domain
    rect = rect.inset(*(inset * e for e in rect.extent))
    return rect.grid(nu, nv)


def ctx_on(patch, nu: int = 6, nv: int = 4, depth: int = 2, inset: float = 0.04):
    uu, vv = sample_points(patch, nu, nv, inset)
    return make_ctx(patch, uu, vv, depth=depth)


def maxabs(ctx, w) -> float:
    return float(np.max(np.abs(ctx.value(w))))
