"""Twisted tent maps f_c on the complex plane.

    f_c(z) = c z if Im(c z) >= -1, else conj(c z) - 2i

Subpackages by task: :mod:`ttm.core` (the map), :mod:`ttm.perimeter`
(the perimeter set P), :mod:`ttm.regimes` (parameter-plane case analysis),
:mod:`ttm.raster` (renders), :mod:`ttm.orbits`, :mod:`ttm.entropy`.
"""
from .core import (Parameter, apply, apply_n, canonicalize, ell0, escape_radius, gamma0,
                   iterate_until_escape, reflect_fl, reflect_pfl)
from .perimeter import build_perimeter, find_zeta
from .regimes import classify

__version__ = "0.1.0"

__all__ = [
    "Parameter", "apply", "apply_n", "canonicalize", "ell0", "escape_radius", "gamma0",
    "iterate_until_escape", "reflect_fl", "reflect_pfl", "build_perimeter", "find_zeta",
    "classify", "__version__",
]
