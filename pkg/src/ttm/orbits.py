"""Orbit sampling, occupancy grids and the embedding identities.

Occupancy grids are a visual proxy for omega-limit sets: we rasterise the
tail of an orbit and count 4-connected components. This is a heuristic for
spotting hungry sets, never a certificate.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from .core import _step, apply, apply_n, as_parameter, ell0, escape_radius, power
from .exceptions import EmptySample, IoFailure
from .raster import Raster, ShaderConfig, Viewport, render_julia

DEFAULT_BURN_IN = 1000
DEFAULT_RESOLUTION = 512
CONJUGACY_C = -0.65 + 0.88j

_FOUR = ndimage.generate_binary_structure(2, 1)


@dataclass
class OrbitSample:
    start: complex
    burn_in: int
    points: np.ndarray
    fold_flags: np.ndarray
    escaped: bool = False
    escape_index: Optional[int] = None

    @property
    def tail(self) -> np.ndarray:
        return self.points[self.burn_in:]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "re", "im", "folded"])
        for k, (z, f) in enumerate(zip(self.points, self.fold_flags)):
            w.writerow([k, repr(float(z.real)), repr(float(z.imag)), int(f)])
        return buf.getvalue()


def sample_orbit(p, z0, n: int, burn_in: int = 0) -> OrbitSample:
    """``n`` steps of the orbit of z0.

    ``fold_flags[k]`` records whether the step producing ``points[k]``
    folded (``fold_flags[0]`` is False). For |c| > 1 iteration stops as soon
    as the modulus passes the escape radius and the sample is tagged escaped;
    for |c| <= 1 there is no escape test.
    """
    p = as_parameter(p)
    if n < burn_in:
        raise ValueError("n must be >= burn_in")
    R2 = escape_radius(p) ** 2 if p.r > 1 else None
    z0 = complex(z0)
    x, y = z0.real, z0.imag
    pts = [z0]
    flags = [False]
    escaped, where = False, None
    for k in range(1, n + 1):
        x, y, folded = _step(p.alpha, p.beta, x, y)
        pts.append(complex(x, y))
        flags.append(folded)
        if R2 is not None and x * x + y * y > R2:
            escaped, where = True, k
            break
    return OrbitSample(z0, burn_in, np.asarray(pts), np.asarray(flags, dtype=bool), escaped, where)


@dataclass
class OccupancyGrid:
    grid: np.ndarray
    component_count: int
    labels: np.ndarray
    viewport: Viewport
    connectivity: int = 4

    def to_raster(self) -> Raster:
        layer = np.where(self.grid, -1, 0).astype(np.int32)
        return Raster(layer, layer.copy(), {"kind": "occupancy", "viewport": self.viewport.describe(),
                                            "components": self.component_count, "mode": "EscapeTime"})


def count_components(grid: np.ndarray):
    labels, count = ndimage.label(np.asarray(grid, dtype=bool), structure=_FOUR)
    return labels, int(count)


def occupancy(sample: OrbitSample, vp: Viewport, resolution: Optional[int] = None) -> OccupancyGrid:
    """Rasterise the post-burn-in points and count their 4-connected components."""
    if sample.escaped:
        raise EmptySample("orbit escaped; occupancy is only defined for bounded samples")
    if resolution is not None:
        vp = Viewport(vp.center, vp.width_units, resolution, resolution, vp.height_units)
    pts = sample.tail
    if len(pts) == 0:
        raise EmptySample("no points after burn-in")
    fi, fj = vp.to_pixel(pts)
    i = np.floor(fi + 0.5).astype(np.int64)
    j = np.floor(fj + 0.5).astype(np.int64)
    inside = (i >= 0) & (i < vp.px_w) & (j >= 0) & (j < vp.px_h)
    if not inside.any():
        raise EmptySample("no post-burn-in point falls inside the viewport")
    grid = np.zeros((vp.px_h, vp.px_w), dtype=bool)
    grid[j[inside], i[inside]] = True
    labels, count = count_components(grid)
    return OccupancyGrid(grid, count, labels, vp)


# --------------------------------------------------------- embeddings

@dataclass
class IdentityReport:
    name: str
    n_samples: int
    max_deviation: float
    pass_fraction: float
    tol: float
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.n_samples > 0 and self.pass_fraction == 1.0


def check_power_embedding(p, m: int, region_samples: Sequence[complex], tol: float = 1e-9) -> IdentityReport:
    """Compare m steps of f_c with one step of f_{c^m} on each sample."""
    p = as_parameter(p)
    if m < 1:
        raise ValueError("m must be >= 1")
    q = power(p, m)
    dev = np.array([abs(apply_n(p, z, m) - apply(q, z).value) for z in region_samples])
    if dev.size == 0:
        return IdentityReport(f"power{m}", 0, 0.0, 0.0, tol)
    return IdentityReport(f"power{m}", dev.size, float(dev.max()), float(np.mean(dev <= tol)), tol,
                          {"c_m": q.c})


def conjugacy_map(c: complex = CONJUGACY_C):
    """(z0, s, c') for phi(z) = s z + z0 conjugating f_{c'} to f_c^3, c' = |c|^2 c."""
    c = complex(c)
    cp = abs(c) ** 2 * c
    z0 = 2j * (1 - c.conjugate()) / (cp - 1)
    return z0, z0.imag + 1.0, cp


def check_affine_conjugacy(samples: Sequence[complex], tol: float = 1e-8,
                           c: complex = CONJUGACY_C) -> IdentityReport:
    """phi(f_{c'}(z)) = f_c^3(phi(z)) on samples of K(c'), plus f_c^3(z0) = z0."""
    z0, s, cp = conjugacy_map(c)
    fixed = abs(apply_n(c, z0, 3) - z0)
    dev = np.array([abs((s * apply(cp, z).value + z0) - apply_n(c, s * z + z0, 3)) for z in samples])
    extra = {"z0": z0, "scale": s, "c_prime": cp, "fixed_residual": fixed}
    if dev.size == 0:
        return IdentityReport("affine-conjugacy", 0, 0.0, 0.0, tol, extra)
    return IdentityReport("affine-conjugacy", dev.size, float(dev.max()), float(np.mean(dev <= tol)), tol, extra)


def survived_samples(p, vp: Viewport, n: int, cfg: ShaderConfig = ShaderConfig(mode="EscapeTime"),
                     seed: int = 0, workers: Optional[int] = None) -> np.ndarray:
    """Up to n pixel centres of a render that survived the full budget."""
    ras = render_julia(p, vp, cfg, workers)
    jj, ii = np.nonzero(ras.survived)
    if len(ii) == 0:
        raise EmptySample("no pixel survived")
    pts = vp.xs()[ii] + 1j * vp.ys()[jj]
    rng = np.random.default_rng(seed)
    if len(pts) > n:
        pts = pts[np.sort(rng.choice(len(pts), size=n, replace=False))]
    return pts


def backward_samples(p, n: int, seed: int = 0, depth: int = 40, start: Optional[complex] = None) -> np.ndarray:
    """Points of K from the tree of inverse images of a point of K.

    A point z with Im z >= -1 has the two preimages z/c and its mirror
    across the PFL, both again in K. K may reach below the folding line,
    where points have no preimages; those nodes are kept as leaves. The tree
    is grown level by level (each level randomly thinned to at most n
    nodes) and n samples are drawn from all levels. Useful for thin sets
    (segments, Cantor sets, spirals) that no pixel centre survives in.
    """
    p = as_parameter(p)
    if start is None:
        start = ell0(p)
    rng = np.random.default_rng(seed)
    c = p.c
    level = np.array([complex(start)])
    pool = [level]
    for _ in range(depth):
        live = level[level.imag >= -1]
        if live.size == 0:
            break
        level = np.concatenate([live / c, (np.conj(live) - 2j) / c])
        if level.size > n:
            level = level[np.sort(rng.choice(level.size, size=n, replace=False))]
        pool.append(level)
    pts = np.concatenate(pool)
    idx = rng.choice(pts.size, size=n, replace=pts.size < n)
    return pts[np.sort(idx)]


# -------------------------------------------------------------- overlay

def _stroke(mask: np.ndarray, vp: Viewport, verts: Sequence[complex], closed: bool) -> None:
    pts = list(verts) + ([verts[0]] if closed and len(verts) > 1 else [])
    step = 0.5 * min(vp.dx, vp.dy)
    for a, b in zip(pts[:-1], pts[1:]):
        k = max(2, int(np.ceil(abs(b - a) / step)) + 1)
        seg = a + (b - a) * np.linspace(0.0, 1.0, k)
        fi, fj = vp.to_pixel(seg)
        i = np.floor(fi + 0.5).astype(np.int64)
        j = np.floor(fj + 0.5).astype(np.int64)
        ok = (i >= 0) & (i < vp.px_w) & (j >= 0) & (j < vp.px_h)
        mask[j[ok], i[ok]] = True
    if len(pts) == 1:
        _stroke(mask, vp, [pts[0], pts[0]], False)


def export_overlay(base: Raster, vp: Viewport, layers: Sequence) -> Raster:
    """Paint layers over ``base``: vertex chains/polygons as 1-px strokes,
    boolean arrays as masks. Layer k gets overlay id k+1 (later wins)."""
    if not layers:
        return base
    over = np.zeros(base.escape.shape, dtype=np.uint8) if base.overlay is None else base.overlay.copy()
    for k, layer in enumerate(layers, start=1):
        if isinstance(layer, np.ndarray) and layer.ndim == 2:
            mask = layer.astype(bool)
        else:
            verts = getattr(layer, "vertices", layer)
            closed = bool(getattr(layer, "closed", False))
            mask = np.zeros(base.escape.shape, dtype=bool)
            _stroke(mask, vp, list(verts), closed)
        over[mask] = k
    meta = dict(base.meta)
    meta["overlay_layers"] = len(layers)
    return Raster(base.escape, base.code, meta, over)


def write_orbit_csv(sample: OrbitSample, path) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(sample.to_csv())
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
