"""Type-dispatched elementary functions.

Chart definitions and scalar fields are written once against this module
and then evaluated on plain floats, numpy arrays, Jets, or sympy symbols,
depending on which derivative backend is driving them.
"""

from __future__ import annotations

import numpy as np

from .jets import Jet

try:
    import sympy as _sp
except ImportError:  # pragma: no cover
    _sp = None


def _dispatch(name, np_fn):
    def fn(x):
        if isinstance(x, Jet):
            return getattr(x, name)()
        if _sp is not None and isinstance(x, _sp.Basic):
            return getattr(_sp, name)(x)
        return np_fn(x)

    fn.__name__ = name
    return fn


sin = _dispatch("sin", np.sin)
cos = _dispatch("cos", np.cos)
tan = _dispatch("tan", np.tan)
exp = _dispatch("exp", np.exp)
log = _dispatch("log", np.log)
sqrt = _dispatch("sqrt", np.sqrt)
atan = _dispatch("atan", np.arctan)


def atan2(y, x):
    if isinstance(y, Jet) or isinstance(x, Jet):
        raise TypeError("atan2 is not smooth as a jet; track the angle via its derivative instead")
    if _sp is not None and (isinstance(y, _sp.Basic) or isinstance(x, _sp.Basic)):
        return _sp.atan2(y, x)
    return np.arctan2(y, x)


def hypot(x, y):
    return sqrt(x * x + y * y)
