"""Per-pixel rasterization of dynamical and parameter planes.

Every pixel is shaded by the same vectorised kernel, which performs exactly
the floating-point operations of :func:`ttm.core._step` in the same order.
Pixels never interact, so the grid can be cut into chunks and spread over a
thread pool in any way without changing a single cell.

Cell values are iteration counts, with two sentinels:

* ``SURVIVED`` (-1): the event did not happen within the iteration budget,
* ``MASKED``   (-2): the pixel's parameter is outside the render's domain
  (real c where gamma_0 is needed, |c| <= 1 where an escape radius is needed).
"""
from __future__ import annotations

import hashlib
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .core import _step, as_parameter, escape_radius, format_complex
from .exceptions import IoFailure

SURVIVED = -1
MASKED = -2

ESCAPE_TIME = "EscapeTime"
CODED = "Coded"
FASTEST = "Fastest"
MODES = (ESCAPE_TIME, CODED, FASTEST)

DEFAULT_MAX_ITER = 1000
DEFAULT_N = 120
DEFAULT_SIZE = 800
BUBBLE_CAP = 31

# layer bits of the layered partition
BIT_UNIT_DISK = 1 << 0
BIT_SQRT2 = 1 << 1
BIT_LOCUS = 1 << 2
BUBBLE_SHIFT = 3


@dataclass(frozen=True)
class Viewport:
    """Axis-aligned window; ``height_units`` defaults to square pixels."""

    center: complex
    width_units: float
    px_w: int = DEFAULT_SIZE
    px_h: int = DEFAULT_SIZE
    height_units: Optional[float] = None

    def __post_init__(self):
        if not self.width_units > 0:
            raise ValueError("width_units must be positive")
        if self.px_w < 1 or self.px_h < 1:
            raise ValueError("pixel dimensions must be >= 1")
        if self.height_units is not None and not self.height_units > 0:
            raise ValueError("height_units must be positive")

    @classmethod
    def from_bounds(cls, re_min, re_max, im_min, im_max, px_w=DEFAULT_SIZE, px_h=DEFAULT_SIZE):
        center = complex((re_min + re_max) / 2, (im_min + im_max) / 2)
        return cls(center, re_max - re_min, px_w, px_h, im_max - im_min)

    @property
    def height(self) -> float:
        if self.height_units is not None:
            return self.height_units
        return self.width_units * self.px_h / self.px_w

    @property
    def dx(self) -> float:
        return self.width_units / self.px_w

    @property
    def dy(self) -> float:
        return self.height / self.px_h

    def xs(self) -> np.ndarray:
        i = np.arange(self.px_w, dtype=float)
        return self.center.real + ((i + 0.5) / self.px_w - 0.5) * self.width_units

    def ys(self) -> np.ndarray:
        j = np.arange(self.px_h, dtype=float)
        return self.center.imag + (0.5 - (j + 0.5) / self.px_h) * self.height

    def pixel_center(self, i: int, j: int) -> complex:
        x = self.center.real + ((i + 0.5) / self.px_w - 0.5) * self.width_units
        y = self.center.imag + (0.5 - (j + 0.5) / self.px_h) * self.height
        return complex(x, y)

    def to_pixel(self, z):
        """Fractional (column, row) of a point; pixel centers map to integers."""
        z = np.asarray(z, dtype=complex)
        i = ((z.real - self.center.real) / self.width_units + 0.5) * self.px_w - 0.5
        j = (0.5 - (z.imag - self.center.imag) / self.height) * self.px_h - 0.5
        return i, j

    def describe(self) -> str:
        return (f"center={format_complex(self.center)} width={self.width_units!r} "
                f"height={self.height!r} px={self.px_w}x{self.px_h}")


@dataclass(frozen=True)
class ShaderConfig:
    max_iter: int = DEFAULT_MAX_ITER
    escape_R: float = 0.0
    N: int = DEFAULT_N
    mode: str = FASTEST

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 1 <= self.N <= 10 ** 6:
            raise ValueError("coded bailout N must be in [1, 1e6]")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.escape_R < 0:
            raise ValueError("escape_R must be >= 0 (0 = automatic)")


@dataclass
class Raster:
    escape: np.ndarray
    code: np.ndarray
    meta: Dict[str, object] = field(default_factory=dict)
    overlay: Optional[np.ndarray] = None

    @property
    def px_h(self) -> int:
        return self.escape.shape[0]

    @property
    def px_w(self) -> int:
        return self.escape.shape[1]

    def values(self, mode: Optional[str] = None) -> np.ndarray:
        """The channel a palette colours, selected by shader mode."""
        mode = mode or self.meta.get("mode", ESCAPE_TIME)
        if mode == ESCAPE_TIME:
            return self.escape
        if mode == CODED:
            return self.code
        e, c = self.escape, self.code
        both = np.where((e >= 0) & (c >= 0), np.minimum(e, c), np.maximum(e, c))
        return np.where((e == MASKED) | (c == MASKED), MASKED, both)

    @property
    def survived(self) -> np.ndarray:
        return self.escape == SURVIVED

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.escape, dtype="<i4").tobytes())
        h.update(np.ascontiguousarray(self.code, dtype="<i4").tobytes())
        return h.hexdigest()

    def meta_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.meta.items())


# ---------------------------------------------------------------- workers

def resolve_workers(workers: Optional[int] = None) -> int:
    if workers is None:
        env = os.environ.get("TTM_THREADS")
        if env:
            workers = int(env)
        else:
            workers = min(os.cpu_count() or 1, 16)
    return max(1, int(workers))


def _run_rows(fn: Callable[[slice], None], n_rows: int, workers: int) -> None:
    """Call fn on disjoint row slices, serially or on a thread pool."""
    chunk = max(1, math.ceil(n_rows / (workers * 4)))
    slices = [slice(s, min(s + chunk, n_rows)) for s in range(0, n_rows, chunk)]
    if workers == 1 or len(slices) == 1:
        for s in slices:
            fn(s)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for fut in [pool.submit(fn, s) for s in slices]:
            fut.result()


# ----------------------------------------------------------------- kernel

def _kernel(a, b, x, y, R2, max_iter: int, N: int):
    """Escape and coded events for flat arrays of starting points.

    ``a``, ``b`` and ``R2`` are scalars (dynamical plane) or arrays aligned
    with ``x`` (parameter plane). Orbits that escape are dropped; their code
    event stays SURVIVED if it had not happened yet.
    """
    n = x.size
    esc = np.full(n, SURVIVED, dtype=np.int32)
    code = np.full(n, SURVIVED, dtype=np.int32)
    per_pixel = np.ndim(a) > 0
    idx = np.arange(n)
    cnt = np.zeros(n, dtype=np.int64)
    gone = x * x + y * y > R2
    if gone.any():
        esc[gone] = 0
        keep = ~gone
        idx, x, y, cnt = idx[keep], x[keep], y[keep], cnt[keep]
        if per_pixel:
            a, b, R2 = a[keep], b[keep], R2[keep]
    for it in range(1, max_iter + 1):
        if idx.size == 0:
            break
        cx = a * x - b * y
        cy = a * y + b * x
        lin = cy >= -1.0
        y = np.where(lin, cy, -cy - 2.0)
        x = cx
        cnt += lin
        hit = lin & (cnt == N)
        if hit.any():
            code[idx[hit]] = it
        gone = x * x + y * y > R2
        if gone.any():
            esc[idx[gone]] = it
            keep = ~gone
            idx, x, y, cnt = idx[keep], x[keep], y[keep], cnt[keep]
            if per_pixel:
                a, b, R2 = a[keep], b[keep], R2[keep]
    return esc, code


def shade_dynamical_pixel(p, z, cfg: ShaderConfig = ShaderConfig()) -> Tuple[int, int]:
    """(escape_n, code_n) of one point; SURVIVED when an event never happened.

    code_n is the iteration count at which the orbit has taken the linear
    branch (been in PH^+) for the N-th time; for z = 0 this is N.
    """
    p = as_parameter(p)
    R = cfg.escape_R if cfg.escape_R > 0 else escape_radius(p)
    R2 = R * R
    z = complex(z)
    x, y = z.real, z.imag
    if x * x + y * y > R2:
        return 0, SURVIVED
    code = SURVIVED
    cnt = 0
    for it in range(1, cfg.max_iter + 1):
        x, y, folded = _step(p.alpha, p.beta, x, y)
        if not folded:
            cnt += 1
            if cnt == cfg.N:
                code = it
        if x * x + y * y > R2:
            return it, code
    return SURVIVED, code


def _meta(kind: str, vp: Viewport, cfg: Optional[ShaderConfig], **extra) -> Dict[str, object]:
    m: Dict[str, object] = {"kind": kind}
    m.update(extra)
    m["viewport"] = vp.describe()
    if cfg is not None:
        m.update({"max_iter": cfg.max_iter, "escape_R": cfg.escape_R, "N": cfg.N, "mode": cfg.mode})
    return m


def render_julia(p, vp: Viewport, cfg: ShaderConfig = ShaderConfig(),
                 workers: Optional[int] = None) -> Raster:
    """Dynamical-plane render of f_c."""
    p = as_parameter(p)
    R = cfg.escape_R if cfg.escape_R > 0 else escape_radius(p)
    R2 = R * R
    xs, ys = vp.xs(), vp.ys()
    esc = np.empty((vp.px_h, vp.px_w), dtype=np.int32)
    code = np.empty_like(esc)

    def rows(s):
        X, Y = np.meshgrid(xs, ys[s])
        e, c = _kernel(p.alpha, p.beta, X.ravel(), Y.ravel(), R2, cfg.max_iter, cfg.N)
        esc[s] = e.reshape(X.shape)
        code[s] = c.reshape(X.shape)

    _run_rows(rows, vp.px_h, resolve_workers(workers))
    return Raster(esc, code, _meta("julia", vp, cfg, c=format_complex(p.c), escape_R_used=R))


# ---------------------------------------------------------- param plane

def _param_grid(vp: Viewport, s: slice, canonical: bool):
    A, B = np.meshgrid(vp.xs(), vp.ys()[s])
    A, B = A.ravel(), B.ravel()
    if canonical:
        B = np.abs(B)
    return A, B


def escape_radius_grid(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorised escape radius; NaN where |c| <= 1."""
    c = a + 1j * b
    r = np.abs(c)
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = 2.0 / (r - 1.0)
        l0 = np.abs(2j * (1 - np.conj(c)) / (r * r - 1.0))
        g1 = np.where(b != 0, np.abs(((a - 1.0) / b - 1j) / c), 0.0)
    R = 1.1 * np.maximum(np.maximum(t1, l0), np.maximum(g1, 2.0))
    return np.where(r > 1.0, R, np.nan)


def _param_kernel(a, b, x0, y0, mask, cfg: ShaderConfig):
    esc = np.full(a.size, MASKED, dtype=np.int32)
    code = np.full(a.size, MASKED, dtype=np.int32)
    ok = ~mask
    if ok.any():
        if cfg.escape_R > 0:
            R = np.full(int(ok.sum()), float(cfg.escape_R))
        else:
            R = escape_radius_grid(a[ok], b[ok])
        e, c = _kernel(a[ok], b[ok], np.broadcast_to(x0, a.shape)[ok].astype(float),
                       np.broadcast_to(y0, a.shape)[ok].astype(float), R * R, cfg.max_iter, cfg.N)
        esc[ok] = e
        code[ok] = c
    return esc, code


def render_param_polygonal_locus(vp: Viewport, cfg: ShaderConfig = ShaderConfig(mode=ESCAPE_TIME),
                                 workers: Optional[int] = None, canonical: bool = True) -> Raster:
    """Escape time of gamma_0(c) under f_c for every pixel c.

    gamma_0 lies in K exactly when K is a polygon, so SURVIVED pixels
    approximate the polygonal locus. Real c and |c| <= 1 are MASKED.
    """
    esc = np.empty((vp.px_h, vp.px_w), dtype=np.int32)
    code = np.empty_like(esc)

    def rows(s):
        a, b = _param_grid(vp, s, canonical)
        r = np.abs(a + 1j * b)
        mask = (b == 0) | ~(r > 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            x0 = np.where(mask, 0.0, (a - 1.0) / np.where(mask, 1.0, b))
        e, c = _param_kernel(a, b, x0, -1.0, mask, cfg)
        esc[s] = e.reshape(-1, vp.px_w)
        code[s] = c.reshape(-1, vp.px_w)

    _run_rows(rows, vp.px_h, resolve_workers(workers))
    return Raster(esc, code, _meta("polygonal-locus", vp, cfg, test_point="gamma0", canonical=canonical))


def bubble_index(a, b, n_cap: int) -> np.ndarray:
    """Smallest n in [1, n_cap] with Im(ell_n) <= -1; SURVIVED if none, MASKED for |c| <= 1."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = a + 1j * b
    r = np.abs(c)
    out = np.full(c.shape, SURVIVED, dtype=np.int32)
    ok = r > 1.0
    out[~ok] = MASKED
    cc = c[ok]
    rr = r[ok]
    ell = 2j * (1 - np.conj(cc)) / (rr * rr - 1.0)
    res = np.full(cc.shape, SURVIVED, dtype=np.int32)
    for n in range(1, n_cap + 1):
        ell = ell / cc
        hit = (res == SURVIVED) & (ell.imag <= -1.0)
        res[hit] = n
    out[ok] = res
    return out


def render_param_bubbles(vp: Viewport, n_cap: int = 64, workers: Optional[int] = None) -> Raster:
    esc = np.empty((vp.px_h, vp.px_w), dtype=np.int32)

    def rows(s):
        a, b = _param_grid(vp, s, True)
        esc[s] = bubble_index(a, b, n_cap).reshape(-1, vp.px_w)

    _run_rows(rows, vp.px_h, resolve_workers(workers))
    return Raster(esc, esc.copy(), _meta("bubbles", vp, None, n_cap=n_cap, mode=ESCAPE_TIME))


def layer_masks(vp: Viewport, cfg: ShaderConfig = ShaderConfig(mode=ESCAPE_TIME),
                workers: Optional[int] = None) -> Dict[str, np.ndarray]:
    """The individual layers of the layered partition, as uint8 bit fields."""
    A, B = np.meshgrid(vp.xs(), np.abs(vp.ys()))
    r = np.abs(A + 1j * B)
    half = 0.5 * max(vp.dx, vp.dy)
    unit = r < 1.0
    sqrt2 = np.abs(r - math.sqrt(2)) <= half
    locus = render_param_polygonal_locus(vp, cfg, workers).escape == SURVIVED
    bub = render_param_bubbles(vp, BUBBLE_CAP, workers).escape
    bub = np.where(bub > 0, np.minimum(bub, BUBBLE_CAP), 0)
    return {
        "UnitDisk": np.where(unit, BIT_UNIT_DISK, 0).astype(np.int32),
        "SqrtTwoCircle": np.where(sqrt2, BIT_SQRT2, 0).astype(np.int32),
        "PolygonalLocus": np.where(locus, BIT_LOCUS, 0).astype(np.int32),
        "Bubble": (bub << BUBBLE_SHIFT).astype(np.int32),
    }


def render_param_layered(vp: Viewport, cfg: ShaderConfig = ShaderConfig(mode=ESCAPE_TIME),
                         workers: Optional[int] = None) -> Raster:
    """Bit-packed partition: bit0 |c|<1, bit1 |c|=sqrt2 (within half a pixel),
    bit2 polygonal locus, bits 3-7 bubble index clamped to 31."""
    layers = layer_masks(vp, cfg, workers)
    code = np.zeros((vp.px_h, vp.px_w), dtype=np.int32)
    for v in layers.values():
        code |= v
    return Raster(code, code.copy(), _meta("layered", vp, cfg, mode=ESCAPE_TIME,
                                            bits="unit_disk,sqrt2_circle,polygonal_locus,bubble<<3"))


def render_param_coded(vp: Viewport, test_point: complex = complex(0, -1), cfg: ShaderConfig = ShaderConfig(),
                       workers: Optional[int] = None) -> Raster:
    """Coded shader of a fixed test point under f_c, per pixel c (not canonicalised)."""
    tp = complex(test_point)
    esc = np.empty((vp.px_h, vp.px_w), dtype=np.int32)
    code = np.empty_like(esc)

    def rows(s):
        a, b = _param_grid(vp, s, False)
        mask = ~(np.abs(a + 1j * b) > 1.0)
        e, c = _param_kernel(a, b, tp.real, tp.imag, mask, cfg)
        esc[s] = e.reshape(-1, vp.px_w)
        code[s] = c.reshape(-1, vp.px_w)

    _run_rows(rows, vp.px_h, resolve_workers(workers))
    return Raster(esc, code, _meta("param-coded", vp, cfg, test_point=format_complex(tp)))


# ---------------------------------------------------------------- output

def default_palette(n: int = 256) -> np.ndarray:
    """Deterministic smooth cyclic palette, uint8 array of shape (n, 3)."""
    t = np.arange(n) / n
    rgb = np.stack([0.5 + 0.5 * np.cos(2 * np.pi * (t + off)) for off in (0.0, 0.33, 0.67)], axis=1)
    return np.round(rgb * 255).astype(np.uint8)


def load_palette(path) -> np.ndarray:
    rows = []
    try:
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = [int(v) for v in line.split()]
                if len(parts) != 3 or not all(0 <= v <= 255 for v in parts):
                    raise ValueError(f"bad palette line: {line!r}")
                rows.append(parts)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    if not rows:
        raise ValueError("empty palette")
    return np.asarray(rows, dtype=np.uint8)


def save_palette(palette: np.ndarray, path) -> None:
    try:
        with open(path, "w") as fh:
            for r, g, b in palette:
                fh.write(f"{r} {g} {b}\n")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


SURVIVED_RGB = (0, 0, 0)
MASKED_RGB = (128, 128, 128)
OVERLAY_RGB = [(255, 255, 255), (255, 0, 0), (0, 255, 0), (0, 0, 255), (255, 255, 0)]


def colorize(raster: Raster, palette: Optional[np.ndarray] = None, mode: Optional[str] = None) -> np.ndarray:
    if palette is None:
        palette = default_palette()
    palette = np.asarray(palette, dtype=np.uint8)
    vals = raster.values(mode)
    img = palette[np.mod(np.maximum(vals, 0), len(palette))]
    img[vals == SURVIVED] = SURVIVED_RGB
    img[vals == MASKED] = MASKED_RGB
    if raster.overlay is not None:
        for k in range(1, int(raster.overlay.max(initial=0)) + 1):
            img[raster.overlay == k] = OVERLAY_RGB[(k - 1) % len(OVERLAY_RGB)]
    return img


def write_ppm(raster: Raster, palette: Optional[np.ndarray] = None, path=None,
              mode: Optional[str] = None) -> bytes:
    """Binary P6 pixmap, top row first; written to ``path`` when given."""
    img = colorize(raster, palette, mode)
    data = f"P6\n{raster.px_w} {raster.px_h}\n255\n".encode("ascii") + img.tobytes()
    if path is not None:
        try:
            with open(path, "wb") as fh:
                fh.write(data)
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
    return data
