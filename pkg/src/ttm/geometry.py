"""Small planar geometry toolkit on complex numbers.

Lines are given as ``(point, direction)`` pairs; half planes as a line plus
the side that is kept, expressed through :func:`side` (positive = kept).
Polygons are plain lists of complex vertices, not closed (the first vertex
is not repeated).
"""
from __future__ import annotations

import math
from typing import Iterable, List, Optional, Sequence

import numpy as np


def cross(u: complex, v: complex) -> float:
    return u.real * v.imag - u.imag * v.real


def side(p0: complex, d: complex, z: complex) -> float:
    """Signed area test: > 0 when z is left of the directed line p0 + t d."""
    return cross(d, z - p0)


def segment_line_intersection(a: complex, b: complex, p0: complex, d: complex,
                              slack: float = 1e-12) -> Optional[tuple]:
    """Where the closed segment [a, b] meets the line p0 + t d.

    Returns ``(t, point)`` with ``t`` the parameter along the segment, or
    None. Contacts with ``t`` in ``[-slack, 1 + slack]`` count, so a segment
    grazing the line at an endpoint is a hit.
    """
    sa = side(p0, d, a)
    sb = side(p0, d, b)
    denom = sa - sb
    if denom == 0:
        if sa == 0:
            return 0.0, a
        return None
    t = sa / denom
    if -slack <= t <= 1 + slack:
        t = min(max(t, 0.0), 1.0)
        return t, a + t * (b - a)
    return None


def clip_halfplane(poly: Sequence[complex], p0: complex, d: complex) -> List[complex]:
    """Keep the part of a convex polygon left of the line p0 + t d."""
    out: List[complex] = []
    n = len(poly)
    if n == 0:
        return out
    prev = poly[-1]
    sp = side(p0, d, prev)
    for cur in poly:
        sc = side(p0, d, cur)
        if sc >= 0:
            if sp < 0:
                out.append(prev + (cur - prev) * (sp / (sp - sc)))
            out.append(cur)
        elif sp >= 0:
            if sp > 0:
                out.append(prev + (cur - prev) * (sp / (sp - sc)))
        prev, sp = cur, sc
    return _dedupe(out)


def _dedupe(poly: List[complex], eps: float = 1e-15) -> List[complex]:
    out: List[complex] = []
    for z in poly:
        if not out or abs(z - out[-1]) > eps * max(1.0, abs(z)):
            out.append(z)
    if len(out) > 1 and abs(out[0] - out[-1]) <= eps * max(1.0, abs(out[0])):
        out.pop()
    return out


def regular_polygon(radius: float, n: int = 64, center: complex = 0j) -> List[complex]:
    """Counter-clockwise regular n-gon circumscribing the given circle."""
    R = radius / math.cos(math.pi / n)
    return [center + R * complex(math.cos(2 * math.pi * (k + 0.5) / n),
                                 math.sin(2 * math.pi * (k + 0.5) / n)) for k in range(n)]


def signed_area(poly: Sequence[complex]) -> float:
    n = len(poly)
    return 0.5 * sum(cross(poly[i], poly[(i + 1) % n]) for i in range(n))


def diameter(poly: Sequence[complex]) -> float:
    if len(poly) < 2:
        return 0.0
    pts = np.asarray(poly, dtype=complex)
    return float(np.max(np.abs(pts[:, None] - pts[None, :])))


def point_segment_distance(z, a: complex, b: complex):
    """Distance from point(s) ``z`` to the closed segment [a, b]."""
    z = np.asarray(z, dtype=complex)
    d = b - a
    dd = abs(d) ** 2
    if dd == 0:
        return np.abs(z - a)
    t = ((z - a) * np.conj(d)).real / dd
    t = np.clip(t, 0.0, 1.0)
    return np.abs(z - (a + t * d))


def distance_to_boundary(z, poly: Sequence[complex]):
    z = np.asarray(z, dtype=complex)
    n = len(poly)
    best = np.full(z.shape, np.inf)
    for i in range(n):
        best = np.minimum(best, point_segment_distance(z, poly[i], poly[(i + 1) % n]))
    return best


def contains(poly: Sequence[complex], z, tol: float = 0.0):
    """Even-odd point-in-polygon; points within ``tol`` of an edge count."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    inside = np.zeros(z.shape, dtype=bool)
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        cond = (a.imag > y) != (b.imag > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xs = a.real + (y - a.imag) * (b.real - a.real) / (b.imag - a.imag)
        inside ^= cond & (x < xs)
    if tol > 0:
        inside |= distance_to_boundary(z, poly) <= tol
    return inside


def strictly_inside_convex(poly: Sequence[complex], z, tol: float = 0.0):
    """Interior test for a counter-clockwise convex polygon, shrunk by tol."""
    z = np.asarray(z, dtype=complex)
    ok = np.ones(z.shape, dtype=bool)
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        d = b - a
        L = abs(d)
        if L == 0:
            continue
        s = (d.real * (z.imag - a.imag) - d.imag * (z.real - a.real)) / L
        ok &= s > tol
    return ok


def segments_intersect(a: complex, b: complex, c: complex, d: complex, eps: float = 1e-12) -> bool:
    """Closed-segment intersection test."""
    d1 = cross(b - a, c - a)
    d2 = cross(b - a, d - a)
    d3 = cross(d - c, a - c)
    d4 = cross(d - c, b - c)
    scale = max(abs(b - a), abs(d - c), 1e-300) ** 2
    e = eps * scale
    if ((d1 > e and d2 < -e) or (d1 < -e and d2 > e)) and \
            ((d3 > e and d4 < -e) or (d3 < -e and d4 > e)):
        return True

    def on_seg(p, q, r):
        return (min(p.real, q.real) - eps <= r.real <= max(p.real, q.real) + eps and
                min(p.imag, q.imag) - eps <= r.imag <= max(p.imag, q.imag) + eps)

    if abs(d1) <= e and on_seg(a, b, c):
        return True
    if abs(d2) <= e and on_seg(a, b, d):
        return True
    if abs(d3) <= e and on_seg(c, d, a):
        return True
    if abs(d4) <= e and on_seg(c, d, b):
        return True
    return False


def sample_boundary(poly: Sequence[complex], n: int, closed: bool = True) -> np.ndarray:
    """``n`` points spread over the edges of a polyline, by arc length."""
    pts = list(poly) + ([poly[0]] if closed else [])
    seg = np.array([abs(pts[i + 1] - pts[i]) for i in range(len(pts) - 1)])
    total = seg.sum()
    s = (np.arange(n) + 0.5) / n * total
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg) - 1)
    t = (s - cum[idx]) / np.where(seg[idx] > 0, seg[idx], 1.0)
    a = np.array(pts[:-1])[idx]
    b = np.array(pts[1:])[idx]
    return a + t * (b - a)


def ring_csv(poly: Iterable[complex], closed: bool = True) -> str:
    """CSV vertex list, one ``x,y`` per line; closed rings repeat vertex 0."""
    pts = list(poly)
    if closed and pts:
        pts.append(pts[0])
    return "".join(f"{z.real!r},{z.imag!r}\n" for z in pts)
