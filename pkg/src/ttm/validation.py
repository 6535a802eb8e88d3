"""Input checks shared by the estimator wrappers and the CLI."""
from __future__ import annotations

import numbers

import numpy as np

from .core import Parameter, as_parameter, canonicalize


def check_points(X) -> np.ndarray:
    """Coerce X to a flat complex array.

    Accepts a sequence of complex numbers or an (n, 2) real array of
    (re, im) rows. Non-finite entries are rejected.
    """
    arr = np.asarray(X)
    if arr.dtype.kind == "c":
        z = arr.astype(complex).ravel()
    elif arr.ndim == 2 and arr.shape[1] == 2 and arr.dtype.kind in "iuf":
        z = arr[:, 0].astype(float) + 1j * arr[:, 1].astype(float)
    elif arr.dtype.kind in "iuf":
        z = arr.astype(float).ravel().astype(complex)
    else:
        raise ValueError(f"cannot interpret input of dtype {arr.dtype} and shape {arr.shape} as points")
    if not np.all(np.isfinite(z)):
        raise ValueError("points must be finite")
    return z


def check_parameter(c, canonical: bool = False, expanding: bool = False,
                    nonreal: bool = False) -> Parameter:
    if isinstance(c, Parameter):
        p = c
    else:
        if not isinstance(c, numbers.Number):
            raise ValueError(f"parameter must be a number, got {type(c).__name__}")
        c = complex(c)
        if not (np.isfinite(c.real) and np.isfinite(c.imag)):
            raise ValueError("parameter must be finite")
        p = canonicalize(c) if canonical else as_parameter(c)
    if expanding and not p.r > 1:
        raise ValueError(f"need |c| > 1, got {p.r!r}")
    if nonreal and p.beta == 0:
        raise ValueError("need a non-real parameter")
    return p


def check_int(name: str, value, lo: int = 1, hi=None) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < lo or (hi is not None and value > hi):
        raise ValueError(f"{name} must be in [{lo}, {hi if hi is not None else 'inf'}], got {value}")
    return value


def check_window(window):
    try:
        lo, hi = (int(v) for v in window)
    except (TypeError, ValueError):
        raise ValueError(f"window must be a pair of integers, got {window!r}") from None
    if lo < 1 or hi < lo + 2:
        raise ValueError(f"window needs 1 <= lo and at least 3 points, got {window!r}")
    return lo, hi
