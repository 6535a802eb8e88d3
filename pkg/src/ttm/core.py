"""The twisted tent map f_c with the canonical folding line Im(z) = -1.

    f_c(z) = c z               if Im(c z) >= -1
             conj(c z) - 2i    otherwise

All arithmetic is done on explicit real/imaginary parts so that the scalar
path here and the vectorised numpy kernels in :mod:`ttm.raster` produce
bit-identical results.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

from .exceptions import DegenerateReal, NotExpanding, UnitModulus

#: absolute tolerance (scaled by magnitude) for "lies on a line" style tests
TOL = 1e-10
#: |r - 1| below this counts as unit modulus
UNIT_WINDOW = 1e-12
#: safety factor on the certified divergence radius
ESCAPE_MARGIN = 1.1


@dataclass(frozen=True)
class Parameter:
    """The complex constant c together with its derived quantities."""

    c: complex
    alpha: float
    beta: float
    r: float
    theta: float
    was_conjugated: bool = False

    @classmethod
    def from_complex(cls, c, was_conjugated: bool = False) -> "Parameter":
        """Wrap ``c`` as-is, without canonicalising the sign of Im(c)."""
        c = complex(c)
        theta = math.atan2(c.imag, c.real) % (2 * math.pi)
        return cls(c, c.real, c.imag, abs(c), theta, was_conjugated)

    def __str__(self):
        return format_complex(self.c)


@dataclass(frozen=True)
class FoldResult:
    value: complex
    folded: bool


@dataclass(frozen=True)
class EscapeVerdict:
    """Outcome of :func:`iterate_until_escape`.

    ``iteration`` is set when the orbit escaped, ``final_point`` when it
    survived the whole budget.
    """

    escaped: bool
    radius_used: float
    iteration: Optional[int] = None
    final_point: Optional[complex] = None


def format_complex(z: complex) -> str:
    """Render ``z`` as ``a+bi`` using repr-precision floats."""
    z = complex(z)
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def as_parameter(p) -> Parameter:
    """Accept a :class:`Parameter` or a bare complex (used verbatim)."""
    if isinstance(p, Parameter):
        return p
    return Parameter.from_complex(p)


def canonicalize(c_raw) -> Parameter:
    """Return the parameter with Im(c) >= 0.

    f_c and f_conj(c) are conjugate through z -> -conj(z), so a negative
    imaginary part is flipped and the flip is recorded.
    """
    c = complex(c_raw)
    if c.imag < 0:
        return Parameter.from_complex(c.conjugate(), was_conjugated=True)
    # normalise -0.0 so downstream sign tests are stable
    return Parameter.from_complex(complex(c.real, abs(c.imag)))


def _step(a: float, b: float, x: float, y: float):
    cx = a * x - b * y
    cy = a * y + b * x
    if cy >= -1.0:
        return cx, cy, False
    return cx, -cy - 2.0, True


def apply(p, z) -> FoldResult:
    p = as_parameter(p)
    z = complex(z)
    x, y, folded = _step(p.alpha, p.beta, z.real, z.imag)
    return FoldResult(complex(x, y), folded)


def apply_n(p, z, n: int) -> complex:
    """n-fold composition of :func:`apply`; ``n = 0`` is the identity."""
    if n < 0:
        raise ValueError("n must be non-negative")
    p = as_parameter(p)
    a, b = p.alpha, p.beta
    z = complex(z)
    x, y = z.real, z.imag
    for _ in range(n):
        x, y, _f = _step(a, b, x, y)
    return complex(x, y)


def reflect_fl(z) -> complex:
    """Reflection about the folding line Im(z) = -1."""
    z = complex(z)
    return z.conjugate() - 2j


def reflect_pfl(p, z) -> complex:
    """Reflection about the pre-folding line FL/c.

    Points symmetric about this line share their image under f.
    """
    p = as_parameter(p)
    if p.c == 0:
        raise ValueError("c must be non-zero")
    c = p.c
    return ((c * complex(z)).conjugate() - 2j) / c


def pfl_side(p, z) -> float:
    """Signed offset Im(c z) + 1: >= 0 on the pre-upper half plane."""
    p = as_parameter(p)
    z = complex(z)
    return p.alpha * z.imag + p.beta * z.real + 1.0


def gamma0(p) -> complex:
    """The intersection FL ∩ PFL, (alpha - 1)/beta - i."""
    p = as_parameter(p)
    if p.beta == 0:
        raise DegenerateReal("gamma0 is undefined for real c")
    return complex((p.alpha - 1.0) / p.beta, -1.0)


def gamma_k(p, k: int) -> complex:
    p = as_parameter(p)
    return gamma0(p) / p.c ** k


def ell0(p) -> complex:
    """The non-zero fixed point 2i(1 - conj c)/(|c|^2 - 1)."""
    p = as_parameter(p)
    if abs(p.r - 1.0) < UNIT_WINDOW:
        raise UnitModulus("ell0 is undefined for |c| = 1")
    c = p.c
    return 2j * (1 - c.conjugate()) / (p.r * p.r - 1.0)


def escape_radius(p) -> float:
    """Radius beyond which every orbit grows monotonically in modulus.

    Uses |f(z)| >= |c z| - 2, so |z| > 2/(r - 1) already expands; the other
    terms keep the fixed point and gamma_1 inside, and the margin absorbs
    rounding.
    """
    p = as_parameter(p)
    if p.r <= 1.0:
        raise NotExpanding(f"escape radius needs |c| > 1, got {p.r!r}")
    terms = [2.0 / (p.r - 1.0), abs(ell0(p)), 2.0]
    if p.beta != 0:
        terms.append(abs(gamma0(p) / p.c))
    return ESCAPE_MARGIN * max(terms)


def iterate_until_escape(p, z, max_iter: int, R: Optional[float] = None) -> EscapeVerdict:
    p = as_parameter(p)
    if R is None or R <= 0:
        R = escape_radius(p)
    a, b = p.alpha, p.beta
    z = complex(z)
    x, y = z.real, z.imag
    R2 = R * R
    if x * x + y * y > R2:
        return EscapeVerdict(True, R, iteration=0)
    for n in range(1, max_iter + 1):
        x, y, _f = _step(a, b, x, y)
        if x * x + y * y > R2:
            return EscapeVerdict(True, R, iteration=n)
    return EscapeVerdict(False, R, final_point=complex(x, y))


def power(p, m: int) -> Parameter:
    """The parameter c**m (not canonicalised)."""
    p = as_parameter(p)
    return Parameter.from_complex(p.c ** m)


def unit_root(j: int, k: int) -> complex:
    return cmath.exp(2j * math.pi * j / k)
