"""Topological entropy from itinerary counts on the partition {PH^+, PH^-}.

For samples x of K, the length-n itinerary records for j < n whether
f^j(x) lies in PH^+ (bit 1) or PH^-. The number of distinct itineraries
lower-bounds the size of the n-th refinement of the partition, and its
exponential growth rate estimates h(f|K).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import as_parameter, escape_radius
from .exceptions import DegenerateWindow, NoSurvivors

DEFAULT_WINDOW = (6, 14)
DEFAULT_GRID = 1024
SATURATION = 0.5


def itinerary_counts(p, domain_samples, n_max: int) -> List[int]:
    """counts[n-1] = number of distinct length-n itineraries, n = 1..n_max.

    Samples that leave the escape disk within n_max steps are dropped first.
    """
    p = as_parameter(p)
    if not 1 <= n_max <= 62:
        raise ValueError("n_max must be in [1, 62]")
    z = np.asarray(domain_samples, dtype=complex).ravel()
    x, y = z.real.copy(), z.imag.copy()
    a, b = p.alpha, p.beta
    R2 = escape_radius(p) ** 2 if p.r > 1 else np.inf
    alive = np.ones(z.size, dtype=bool)
    bits = np.zeros((n_max, z.size), dtype=np.int64)
    for j in range(n_max):
        cx = a * x - b * y
        cy = a * y + b * x
        lin = cy >= -1.0
        bits[j] = lin
        x, y = cx, np.where(lin, cy, -cy - 2.0)
        alive &= ~(x * x + y * y > R2)
    if not alive.any():
        raise NoSurvivors(f"no sample survives {n_max} iterations")
    bits = bits[:, alive]
    codes = np.zeros(bits.shape[1], dtype=np.int64)
    counts = []
    for j in range(n_max):
        codes = codes * 2 + bits[j]
        counts.append(int(np.unique(codes).size))
    return counts


@dataclass
class EntropyEstimate:
    n_values: List[int]
    log_counts: List[float]
    slope: float
    bound: Optional[float]
    theoretical: Optional[float] = None
    intercept: float = 0.0
    n_samples: Optional[int] = None

    def summary(self) -> str:
        lines = [f"slope: {self.slope!r}",
                 f"window: {self.n_values[0]}..{self.n_values[-1]}",
                 f"theoretical: {self.theoretical!r}" if self.theoretical is not None else "theoretical: none",
                 f"bound: {self.bound!r}" if self.bound is not None else "bound: none"]
        if self.n_samples is not None:
            lines.append(f"samples: {self.n_samples}")
        return "\n".join(lines) + "\n"


def entropy_bound(r: float) -> float:
    return math.log(min(2.0, r * r))


def estimate_entropy(counts: Sequence[int], window: Tuple[int, int] = DEFAULT_WINDOW,
                     n_samples: Optional[int] = None, r: Optional[float] = None,
                     theoretical: Optional[float] = None) -> EntropyEstimate:
    """Least-squares slope of log(count) against n over the window.

    ``counts[n-1]`` is the count for itineraries of length n. With
    ``n_samples`` given the window is cut before the counts reach half the
    sample count, where they stop measuring growth.
    """
    lo, hi = window
    if lo < 1 or hi < lo:
        raise DegenerateWindow(f"bad window {window}")
    ns = [n for n in range(lo, min(hi, len(counts)) + 1)]
    if n_samples is not None:
        cut = []
        for n in ns:
            if counts[n - 1] >= SATURATION * n_samples:
                break
            cut.append(n)
        ns = cut
    if len(ns) < 3:
        raise DegenerateWindow(f"only {len(ns)} usable points in window {window}")
    logs = [math.log(counts[n - 1]) for n in ns]
    slope, intercept = np.polyfit(np.asarray(ns, float), np.asarray(logs), 1)
    return EntropyEstimate(ns, logs, float(slope), entropy_bound(r) if r is not None else None,
                           theoretical, float(intercept), n_samples)


def theoretical_entropy(p) -> Optional[float]:
    """log c for real 1 < c <= 2, log |c|^2 when K is a polygon, else None."""
    from .regimes import COMPLEX_POLYGON, classify
    p = as_parameter(p)
    if p.beta == 0 and 1 < p.alpha <= 2:
        return math.log(p.alpha)
    if p.beta != 0 and p.r > 1 and classify(p.c).tag == COMPLEX_POLYGON:
        return 2 * math.log(p.r)
    return None


def segment_samples(a: complex, b: complex, n: int) -> np.ndarray:
    t = (np.arange(n) + 0.5) / n
    return a + t * (b - a)


def grid_samples(p, resolution: int = DEFAULT_GRID) -> np.ndarray:
    """Pixel centres over the bounding box of the perimeter set."""
    from .perimeter import build_perimeter
    p = as_parameter(p)
    pts = None
    if p.beta != 0:
        rep = build_perimeter(p, with_regions=False)
        if rep.outer_boundary.closed:
            pts = np.asarray(rep.outer_boundary.vertices)
    if pts is None:
        R = escape_radius(p)
        pts = np.array([-R - R * 1j, R + R * 1j])
    x0, x1 = pts.real.min(), pts.real.max()
    y0, y1 = pts.imag.min(), pts.imag.max()
    xs = x0 + (np.arange(resolution) + 0.5) / resolution * (x1 - x0)
    ys = y0 + (np.arange(resolution) + 0.5) / resolution * (y1 - y0)
    X, Y = np.meshgrid(xs, ys)
    return (X + 1j * Y).ravel()


def counts_csv(counts: Sequence[int]) -> str:
    out = ["n,count,log_count"]
    for n, k in enumerate(counts, start=1):
        out.append(f"{n},{k},{math.log(k)!r}")
    return "\n".join(out) + "\n"
