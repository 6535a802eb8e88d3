"""Perimeter set P: the computable compact superset of K.

The construction follows the vertex spiral ell_k (backward images of the
fixed point ell_0 and their mirrors across the pre-folding line), finds the
first segment L_n = [ell_n, ell_{n+1}] that reaches the pre-folding line
(the point zeta), and builds the exterior regions S_k whose interiors are
removed from the plane.

Classification of P:

* zeta exists and Im(zeta) <= -1  -> ``Polygon`` (and then K = P),
* zeta exists and Im(zeta) > -1   -> ``PolygonWithHoles`` (K is a proper subset),
* zeta does not exist             -> ``RamsHead`` (double spiral, K proper subset).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import geometry as geo
from .core import (TOL, Parameter, as_parameter, ell0, escape_radius, format_complex,
                   gamma0, pfl_side, reflect_pfl)
from .exceptions import DegenerateReal, InsufficientChain, NotExpanding

POLYGON = "Polygon"
POLYGON_WITH_HOLES = "PolygonWithHoles"
RAMS_HEAD = "RamsHead"

DEFAULT_MAX_DEPTH = 64
DIAM_TOL = 1e-9
SEGMENT_SLACK = 1e-12
ZETA_SEARCH_CAP = 100_000


def _require_complex_expanding(p: Parameter):
    if p.beta == 0:
        raise DegenerateReal("perimeter geometry needs Im(c) != 0")
    if p.r <= 1:
        raise NotExpanding("perimeter geometry needs |c| > 1")


@dataclass(frozen=True)
class SpiralChain:
    """Ordered vertices (ell_k or gamma_k) and the segments joining them."""

    kind: str
    vertices: Tuple[Tuple[int, complex], ...]

    @property
    def indices(self) -> List[int]:
        return [k for k, _ in self.vertices]

    @property
    def points(self) -> List[complex]:
        return [z for _, z in self.vertices]

    def __getitem__(self, k: int) -> complex:
        lo = self.vertices[0][0]
        i = k - lo
        if i < 0 or i >= len(self.vertices):
            raise InsufficientChain(f"index {k} not in chain [{lo}, {self.vertices[-1][0]}]")
        return self.vertices[i][1]

    def covers(self, lo: int, hi: int) -> bool:
        return self.vertices[0][0] <= lo and self.vertices[-1][0] >= hi

    @property
    def segments(self) -> List[Tuple[int, complex, complex]]:
        v = self.vertices
        return [(v[i][0], v[i][1], v[i + 1][1]) for i in range(len(v) - 1)]


def ell_k(p, k: int) -> complex:
    """Vertex ell_k: ell_0/c^k for k >= 0, the PFL-mirror of ell_{1-k} for k < 0."""
    p = as_parameter(p)
    if k >= 0:
        return ell0(p) / p.c ** k
    return reflect_pfl(p, ell0(p) / p.c ** (1 - k))


def build_ell_chain(p, k_min: int, k_max: int) -> SpiralChain:
    p = as_parameter(p)
    _require_complex_expanding(p)
    if k_max < k_min:
        raise ValueError("k_max must be >= k_min")
    l0 = ell0(p)
    pos: Dict[int, complex] = {}
    z = l0
    for k in range(0, max(k_max, 1 - k_min) + 1):
        pos[k] = z
        z = z / p.c
    verts = []
    for k in range(k_min, k_max + 1):
        verts.append((k, pos[k] if k >= 0 else reflect_pfl(p, pos[1 - k])))
    return SpiralChain("ell", tuple(verts))


def build_gamma_chain(p, k_min: int, k_max: int) -> SpiralChain:
    """gamma_k = gamma_0/c^k; with ``mirror`` use :func:`mirror_chain`."""
    p = as_parameter(p)
    _require_complex_expanding(p)
    g0 = gamma0(p)
    return SpiralChain("gamma", tuple((k, g0 / p.c ** k) for k in range(k_min, k_max + 1)))


def mirror_points(p, pts: Sequence[complex]) -> List[complex]:
    return [reflect_pfl(p, z) for z in pts]


# --------------------------------------------------------------------- zeta

@dataclass(frozen=True)
class ZetaFinding:
    exists: bool
    point: Optional[complex] = None
    n: Optional[int] = None
    via_L_minus1: bool = False
    segments_scanned: int = 0


def _hit_pfl(p: Parameter, a: complex, b: complex) -> Optional[complex]:
    """Closed segment [a, b] against the line Im(c z) = -1."""
    sa = pfl_side(p, a)
    sb = pfl_side(p, b)
    if sa == sb:
        return a if sa == 0 else None
    t = sa / (sa - sb)
    if -SEGMENT_SLACK <= t <= 1 + SEGMENT_SLACK:
        t = min(max(t, 0.0), 1.0)
        return a + t * (b - a)
    return None


def find_zeta(p) -> ZetaFinding:
    """First intersection of the spiral L = L_1 ∪ L_2 ∪ ... with the PFL.

    The PFL sits at distance exactly 1/|c| from the origin, so once a vertex
    ell_k lies strictly inside that disk every later segment does too and
    the search stops.
    """
    p = as_parameter(p)
    _require_complex_expanding(p)
    inner = 1.0 / p.r
    a = ell0(p) / p.c
    n = 1
    while n < ZETA_SEARCH_CAP:
        if abs(a) < inner - TOL:
            return ZetaFinding(False, segments_scanned=n - 1)
        b = a / p.c
        hit = _hit_pfl(p, a, b)
        if hit is not None:
            lm1 = (reflect_pfl(p, ell0(p) / p.c ** 2), ell0(p))
            via = _hit_pfl(p, *lm1) is not None
            return ZetaFinding(True, hit, n, via, segments_scanned=n)
        a = b
        n += 1
    return ZetaFinding(False, segments_scanned=n - 1)


# ----------------------------------------------------------- outer boundary

@dataclass(frozen=True)
class Boundary:
    """A closed polygon (``closed``) or an open polyline."""

    vertices: Tuple[complex, ...]
    closed: bool
    kind: str = "outer"

    @property
    def side_count(self) -> int:
        n = len(self.vertices)
        return n if self.closed else n - 1

    def to_csv(self) -> str:
        return geo.ring_csv(self.vertices, closed=self.closed)


def outer_boundary(p, zeta: ZetaFinding, chain: SpiralChain, depth: Optional[int] = None) -> Boundary:
    """Outer-most boundary of P.

    With zeta on L_n this is the closed (2n+1)-gon
    [ell_n, zeta] ∪ L_{n-1} ∪ ... ∪ L_{-(n-1)} ∪ [ell_{-(n-1)}, zeta];
    otherwise the open double spiral L' ∪ L_0 ∪ L truncated to the chain.
    """
    p = as_parameter(p)
    if zeta.exists:
        n = zeta.n
        if not chain.covers(-n, n + 1):
            raise InsufficientChain(f"outer boundary needs ell_k for k in [{-n}, {n + 1}]")
        verts = [zeta.point] + [chain[k] for k in range(n, -n, -1)]
        if geo.signed_area(verts) < 0:
            verts = [verts[0]] + verts[:0:-1]
        return Boundary(tuple(verts), True)
    lo, hi = chain.indices[0], chain.indices[-1]
    if depth is not None:
        lo, hi = max(lo, -depth), min(hi, depth + 1)
    if lo > -1 or hi < 2:
        raise InsufficientChain("open outer boundary needs at least ell_{-1}..ell_2")
    return Boundary(tuple(chain[k] for k in range(lo, hi + 1)), False)


# ---------------------------------------------------------------- S regions

@dataclass(frozen=True)
class Region:
    """One convex piece of S_k (k > 0), its mirror S_{-k} (k < 0) or S_0."""

    k: int
    polygon: Tuple[complex, ...]

    @property
    def diameter(self) -> float:
        return geo.diameter(self.polygon)


def _line_through(a: complex, b: complex):
    return a, b - a


def _keep_side(poly, p0, d, ref: complex, keep_ref_side: bool):
    """Clip to the closed side of line (p0, d) that does / does not contain ref."""
    s = geo.side(p0, d, ref)
    if s == 0:
        s = 1.0
    if (s > 0) != keep_ref_side:
        d = -d
    return geo.clip_halfplane(poly, p0, d)


def _pfl_line(p: Parameter, scale: complex = 1.0):
    # the line {z : Im(c * scale * z) = -1}, i.e. FL / (c * scale)
    w = p.c * scale
    return -1j / w, 1.0 / w


def _s1_pieces(p: Parameter, clip_radius: float) -> List[List[complex]]:
    l0 = ell0(p)
    l1, l2 = l0 / p.c, l0 / p.c ** 2
    disk = geo.regular_polygon(clip_radius, 64)
    pfl0, pfld = _pfl_line(p)
    pfl1, pfl1d = _pfl_line(p, p.c)
    # sector W between PFL and PFL/c that contains ell_1
    w = _keep_side(disk, pfl0, pfld, l1, True)
    w = _keep_side(w, pfl1, pfl1d, l1, True)
    pieces = []
    for a, b in ((l0, l1), (l1, l2)):
        q0, qd = _line_through(a, b)
        piece = _keep_side(w, q0, qd, 0j, False)
        if len(piece) >= 3:
            pieces.append(piece)
    return pieces


def _ccw(poly: List[complex]) -> List[complex]:
    return poly if geo.signed_area(poly) >= 0 else poly[::-1]


def build_S_regions(p, clip_radius: Optional[float] = None,
                    max_depth: int = DEFAULT_MAX_DEPTH) -> Tuple[List[Region], bool]:
    """Exterior regions S_k, their PFL mirrors S_{-k}, and S_0 = c S_1.

    S_1 is the unbounded region cut off by the PFL, [m_0, ell_1], [ell_1, m_1]
    and PFL/c, clipped to a disk; S_k = S_{k-1}/c ∩ PH^+. Each S_k is kept
    as at most two convex pieces. Returns ``(regions, truncated)`` where
    ``truncated`` is set when the depth cap or the diameter floor stopped a
    spiral that had not yet died out.
    """
    p = as_parameter(p)
    _require_complex_expanding(p)
    if clip_radius is None:
        clip_radius = escape_radius(p)
    pfl0, pfld = _pfl_line(p)
    level = [_ccw(q) for q in _s1_pieces(p, clip_radius)]
    regions: List[Region] = [Region(0, tuple(p.c * z for z in q)) for q in level]
    truncated = False
    k = 1
    while level:
        for q in level:
            regions.append(Region(k, tuple(q)))
            regions.append(Region(-k, tuple(_ccw(mirror_points(p, q)))))
        if max(geo.diameter(q) for q in level) < DIAM_TOL or k >= max_depth:
            # the spiral has not died out on its own; we cut it here
            truncated = True
            break
        nxt = []
        for q in level:
            piece = geo.clip_halfplane([z / p.c for z in q], pfl0, pfld)
            if len(piece) >= 3 and abs(geo.signed_area(piece)) > 0:
                nxt.append(_ccw(piece))
        level = nxt
        k += 1
    return regions, truncated


# ------------------------------------------------------------------- report

@dataclass
class PerimeterReport:
    parameter: Parameter
    classification: str
    zeta: ZetaFinding
    outer_boundary: Boundary
    s_regions: List[Region]
    side_count: Optional[int]
    inner_boundary: Optional[Boundary] = None
    holes: List[Region] = field(default_factory=list)
    truncated: bool = False
    clip_radius: float = 0.0

    @property
    def gamma0_in_K(self) -> bool:
        return self.classification == POLYGON

    @property
    def K_equals_P(self) -> bool:
        return self.classification == POLYGON

    def contains(self, z, tol: float = 0.0):
        """Membership in P: not strictly inside any S_k (k != 0) or mirror."""
        z = np.asarray(z, dtype=complex)
        ok = np.abs(z) <= self.clip_radius + tol
        if self.outer_boundary.closed:
            ok &= geo.contains(list(self.outer_boundary.vertices), z, tol=tol)
        for reg in self.s_regions:
            if reg.k == 0:
                continue
            ok &= ~geo.strictly_inside_convex(reg.polygon, z, tol)
        return ok

    def summary(self) -> Dict[str, str]:
        out = {
            "c": str(self.parameter),
            "classification": self.classification,
            "zeta_exists": str(self.zeta.exists).lower(),
        }
        if self.zeta.exists:
            out["zeta"] = format_complex(self.zeta.point)
            out["zeta_n"] = str(self.zeta.n)
            out["zeta_via_L_minus1"] = str(self.zeta.via_L_minus1).lower()
            out["side_count"] = str(self.side_count)
        out["gamma0_in_K"] = str(self.gamma0_in_K).lower()
        out["K_equals_P"] = str(self.K_equals_P).lower()
        out["s_regions"] = str(len(self.s_regions))
        out["holes"] = str(len(self.holes))
        out["truncated"] = str(self.truncated).lower()
        return out


def classify_zeta(zeta: ZetaFinding) -> str:
    if not zeta.exists:
        return RAMS_HEAD
    if zeta.point.imag <= -1 + TOL:
        return POLYGON
    return POLYGON_WITH_HOLES


def build_perimeter(p, max_depth: int = DEFAULT_MAX_DEPTH, with_regions: bool = True) -> PerimeterReport:
    p = as_parameter(p)
    _require_complex_expanding(p)
    zeta = find_zeta(p)
    cls = classify_zeta(zeta)
    R = escape_radius(p)
    if zeta.exists:
        chain = build_ell_chain(p, -zeta.n, zeta.n + 1)
        outer = outer_boundary(p, zeta, chain)
        sides = outer.side_count
    else:
        chain = build_ell_chain(p, -max_depth, max_depth + 1)
        outer = outer_boundary(p, zeta, chain)
        sides = None
    regions, truncated = (build_S_regions(p, R, max_depth) if with_regions else ([], False))
    report = PerimeterReport(p, cls, zeta, outer, regions, sides, truncated=truncated, clip_radius=R)
    if cls == RAMS_HEAD:
        g = build_gamma_chain(p, 1, max_depth)
        pts = g.points
        inner = mirror_points(p, pts)[::-1] + pts
        report.inner_boundary = Boundary(tuple(inner), False, kind="inner")
    elif cls == POLYGON_WITH_HOLES and with_regions:
        ring = list(outer.vertices)
        for reg in regions:
            if reg.k == 0:
                continue
            if _overlaps(ring, reg.polygon):
                report.holes.append(reg)
    return report


def _overlaps(ring: Sequence[complex], poly: Sequence[complex]) -> bool:
    """True when a convex piece has interior points inside the ring."""
    clipped = list(poly)
    # test centroid-ish samples of the piece against the ring
    pts = np.asarray(clipped)
    cen = pts.mean()
    probes = np.concatenate([[cen], cen + 0.9 * (pts - cen)])
    return bool(np.any(geo.contains(list(ring), probes) & geo.strictly_inside_convex(poly, probes)))


# --------------------------------------------------------------- predicates

def predicate_alpha_vs_gamma(p) -> bool:
    """Right-hand side of Re(gamma_0) < Re(ell_0)  <=>  alpha < -1."""
    return as_parameter(p).alpha < -1


def predicate_ell_minus1(p) -> bool:
    """Right-hand side of Im(ell_{-1}) > -1  <=>  |c| > sqrt 2."""
    return as_parameter(p).r > math.sqrt(2)


def predicate_L0_in_K(p) -> bool:
    """Right-hand side of L_0 ⊂ K  <=>  alpha >= -1 and |c| <= sqrt 2."""
    p = as_parameter(p)
    return p.alpha >= -1 and p.r <= math.sqrt(2)
