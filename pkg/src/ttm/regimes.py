"""Case analysis of f_c over the whole parameter plane.

    r < 1           every orbit is attracted to 0
    r = 1           rotation cases: identity, period-2 strip, rational polygon,
                    irrational (closed unit disk shadowing)
    c real, r > 1   K is a segment on the imaginary axis (|c| <= 2) or a Cantor set
    otherwise       polygon / polygon with holes / ram's head, from the perimeter set
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from . import geometry as geo
from .core import (TOL, UNIT_WINDOW, Parameter, as_parameter, canonicalize, ell0,
                   format_complex, gamma0, reflect_pfl)
from .exceptions import BadRotation, NotExpanding
from .perimeter import (POLYGON, POLYGON_WITH_HOLES, RAMS_HEAD, PerimeterReport,
                        build_perimeter)

GLOBAL_ATTRACTOR = "GlobalAttractorAtOrigin"
UNIT_IDENTITY = "UnitIdentityHalfPlane"
UNIT_PERIOD_TWO = "UnitPeriodTwoStrip"
UNIT_RATIONAL = "UnitRationalPolygon"
UNIT_IRRATIONAL = "UnitIrrationalDisk"
REAL_SEGMENT = "RealSegment"
REAL_CANTOR = "RealCantor"
COMPLEX_POLYGON = "ComplexPolygon"
COMPLEX_HOLES = "ComplexPolygonWithHoles"
COMPLEX_RAMS_HEAD = "ComplexRamsHead"

_COMPLEX_TAGS = {POLYGON: COMPLEX_POLYGON, POLYGON_WITH_HOLES: COMPLEX_HOLES,
                 RAMS_HEAD: COMPLEX_RAMS_HEAD}

#: rotation numbers with larger denominators are treated as irrational
MAX_DENOMINATOR = 64
ROTATION_RESIDUAL = 1e-9
CANTOR_SCAN = 100


@dataclass
class Regime:
    tag: str
    parameter: Parameter
    certificates: List[Tuple[str, object]] = field(default_factory=list)
    k: Optional[int] = None
    j: Optional[int] = None
    vertices: Optional[List[complex]] = None
    endpoints: Optional[Tuple[complex, complex]] = None
    report: Optional[PerimeterReport] = None

    def certificate(self, name):
        for key, val in self.certificates:
            if key == name:
                return val
        raise KeyError(name)

    def has(self, name) -> bool:
        return any(key == name for key, _ in self.certificates)


def rotation_number(theta: float) -> Optional[Tuple[int, int]]:
    """(j, k) with theta = 2 pi j / k, or None if no k <= 64 fits."""
    x = (theta / (2 * math.pi)) % 1.0
    fr = Fraction(x).limit_denominator(MAX_DENOMINATOR)
    if abs(float(fr) - x) > ROTATION_RESIDUAL:
        # also catch values just below 1 (e.g. 0.99999999999)
        if abs(1.0 - x) <= ROTATION_RESIDUAL:
            return 0, 1
        return None
    if fr.numerator == fr.denominator:
        return 0, 1
    return fr.numerator, fr.denominator


def unit_modulus_polygon(p, j: int, k: int) -> List[complex]:
    """The invariant regular k-gon for c = exp(2 pi i j / k).

    It is the intersection of the rotated upper half-planes
    exp(2 pi i m / k) (Im z >= -1): apothem 1, one edge on the folding line.
    For j = 1 or k - 1 the vertices are exactly the orbit of gamma_0; for
    other j the orbit of gamma_0 traces a k-pointed star and this polygon is
    its central cell. Returned counter-clockwise, starting at the vertex
    nearest gamma_0 (or gamma_0 itself).
    """
    p = as_parameter(p)
    if abs(p.r - 1.0) >= UNIT_WINDOW:
        raise BadRotation(f"|c| = {p.r!r} is not 1")
    if k < 3 or math.gcd(j, k) != 1:
        raise BadRotation(f"need k >= 3 and gcd(j, k) = 1, got j={j}, k={k}")
    want = (2 * math.pi * j / k) % (2 * math.pi)
    d = abs(p.theta - want)
    if min(d, 2 * math.pi - d) > ROTATION_RESIDUAL:
        raise BadRotation(f"arg(c) = {p.theta!r} is not 2 pi {j}/{k}")
    if j in (1, k - 1):
        g = gamma0(p)
        orbit = [g * p.c ** m for m in range(k)]
        if geo.signed_area(orbit) < 0:
            orbit = [orbit[0]] + orbit[:0:-1]
        return orbit
    # vertices of the intersection of rotated half-planes
    rho = 1.0 / math.cos(math.pi / k)
    start = -math.pi / 2 - math.pi / k
    return [rho * complex(math.cos(start + 2 * math.pi * m / k),
                          math.sin(start + 2 * math.pi * m / k)) for m in range(k)]


def ell_scan_above_fl(p, span: int = CANTOR_SCAN) -> bool:
    """True when every ell_j, j in [-span, span], has Im > -1 + tol."""
    p = as_parameter(p)
    l0 = ell0(p)
    z = l0
    pos = [l0]
    for _ in range(span + 1):
        z = z / p.c
        pos.append(z)
    for k in range(0, span + 1):
        if pos[k].imag <= -1 + TOL:
            return False
    for k in range(1, span + 1):
        if reflect_pfl(p, pos[k + 1]).imag <= -1 + TOL:
            return False
    return True


def boundedness_certificates(p) -> List[Tuple[str, object]]:
    p = as_parameter(p)
    if p.r <= 1:
        raise NotExpanding("boundedness certificates need |c| > 1")
    out: List[Tuple[str, object]] = []
    if p.r > 3:
        out.append(("UnitDiskBound", True))
    if p.r > 2:
        out.append(("TotallyDisconnected", True))
    if abs(p.r - 1.0) >= UNIT_WINDOW and ell_scan_above_fl(p):
        # the iff behind this flag is only conjectured
        out.append(("CantorHeuristic[CONJECTURE-BASED]", True))
    return out


def real_segment(c: float) -> Optional[Tuple[complex, complex]]:
    """K for real c with 1 < |c| <= 2 as (top, bottom) on the imaginary axis."""
    if 1 < c <= 2:
        return 0j, complex(0, -2 / c)
    if -2 <= c < -1:
        return complex(0, -2 / (1 + c)), complex(0, -2 / (c * (1 + c)))
    return None


def classify(c_raw) -> Regime:
    p = canonicalize(c_raw)
    certs: List[Tuple[str, object]] = [("r", p.r), ("alpha", p.alpha), ("beta", p.beta)]
    if abs(p.r - 1.0) < UNIT_WINDOW:
        rot = rotation_number(p.theta)
        if rot is None:
            certs.append(("theta_over_2pi", p.theta / (2 * math.pi)))
            return Regime(UNIT_IRRATIONAL, p, certs)
        j, k = rot
        certs += [("j", j), ("k", k)]
        if k == 1:
            return Regime(UNIT_IDENTITY, p, certs, k=1, j=0)
        if k == 2:
            return Regime(UNIT_PERIOD_TWO, p, certs, k=2, j=1)
        return Regime(UNIT_RATIONAL, p, certs, k=k, j=j,
                      vertices=unit_modulus_polygon(p, j, k))
    if p.r < 1:
        return Regime(GLOBAL_ATTRACTOR, p, certs)
    certs += boundedness_certificates(p)
    if p.beta == 0:
        seg = real_segment(p.alpha)
        if seg is None:
            return Regime(REAL_CANTOR, p, certs)
        return Regime(REAL_SEGMENT, p, certs, endpoints=seg)
    rep = build_perimeter(p)
    if rep.zeta.exists:
        certs += [("im_zeta", rep.zeta.point.imag), ("side_count", rep.side_count)]
    else:
        certs.append(("zeta", "absent"))
    return Regime(_COMPLEX_TAGS[rep.classification], p, certs,
                  vertices=list(rep.outer_boundary.vertices), report=rep)


def _num(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def text_report(reg: Regime) -> str:
    """``key: value`` lines; the first line is a one-line summary."""
    head = reg.tag
    if reg.tag == REAL_SEGMENT:
        top, bottom = reg.endpoints
        head += f" endpoints=({_num(top.imag)},{_num(bottom.imag)})"
    elif reg.tag == UNIT_RATIONAL:
        head += f" k={reg.k} j={reg.j}"
    lines = [head, f"c: {format_complex(reg.parameter.c)}",
             f"regime: {reg.tag}",
             f"was_conjugated: {str(reg.parameter.was_conjugated).lower()}"]
    for key, val in reg.certificates:
        if isinstance(val, bool):
            val = str(val).lower()
        elif isinstance(val, float):
            val = repr(val)
        lines.append(f"{key}: {val}")
    if reg.endpoints is not None:
        lines.append("segment: [" + ", ".join(format_complex(z) for z in reg.endpoints) + "]")
    if reg.vertices is not None and reg.tag != COMPLEX_RAMS_HEAD:
        lines.append("vertices: " + " ".join(format_complex(z) for z in reg.vertices))
    return "\n".join(lines) + "\n"
