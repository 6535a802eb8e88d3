"""Named invariant checks run by ``ttm verify``.

Each check returns ``(ok, detail)``. Sample sizes are kept small enough that
the whole suite runs in a few seconds; the test suite runs the larger
versions.
"""
from __future__ import annotations

import cmath
import math
from typing import Callable, Dict, List, Tuple

import numpy as np

from . import core, perimeter, raster, regimes
from .entropy import estimate_entropy, itinerary_counts, segment_samples
from .orbits import check_affine_conjugacy, check_power_embedding, survived_samples

Check = Callable[[np.random.Generator], Tuple[bool, str]]


def random_expanding(rng, n, r_lo=1.0, r_hi=3.0, upper=True):
    r = rng.uniform(r_lo, r_hi, n)
    t = rng.uniform(0, math.pi if upper else 2 * math.pi, n)
    c = r * np.exp(1j * t)
    return c[(np.abs(c.imag) > 1e-9) & (r > r_lo)]


def _fixed_points(rng):
    worst = 0.0
    for c in random_expanding(rng, 300):
        l0 = core.ell0(c)
        worst = max(worst, abs(core.apply(c, l0).value - l0) / max(1, abs(l0)))
        if core.apply(c, 0j).value != 0:
            return False, f"f(0) != 0 for c={c}"
    return worst < 1e-10, f"max scaled residual {worst:.3g}"


def _fold_symmetry(rng):
    worst = 0.0
    for c in random_expanding(rng, 200):
        z = complex(*rng.normal(0, 3, 2))
        a, b = core.apply(c, z).value, core.apply(c, core.reflect_pfl(c, z)).value
        worst = max(worst, abs(a - b) / max(1, abs(a)))
    return worst < 1e-10, f"max relative deviation {worst:.3g}"


def _conjugation(rng):
    for c in random_expanding(rng, 200, upper=False):
        z = complex(*rng.normal(0, 3, 2))
        lhs = -core.apply(c, z).value.conjugate()
        rhs = core.apply(c.conjugate(), -z.conjugate()).value
        if abs(lhs - rhs) > 1e-12 * max(1, abs(lhs)):
            return False, f"c={c} z={z}"
    return True, "phi f_c = f_conj(c) phi"


def _image_upper(rng):
    lo = 0.0
    for c in random_expanding(rng, 500):
        z = complex(*rng.normal(0, 5, 2))
        lo = min(lo, core.apply(c, z).value.imag + 1)
    return lo >= -1e-12, f"min Im(f(z)) + 1 = {lo:.3g}"


def _escape_soundness(rng):
    for c in random_expanding(rng, 50):
        R = core.escape_radius(c)
        z = R * 1.001 * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        m = abs(z)
        for _ in range(50):
            z = core.apply(c, z).value
            if not abs(z) > m:
                return False, f"modulus not increasing for c={c}"
            m = abs(z)
    return True, "modulus strictly increasing for 50 steps"


def _mirror_chain(rng):
    worst = 0.0
    for c in random_expanding(rng, 200, 1.0001, 3.0):
        ch = perimeter.build_ell_chain(c, -6, 7)
        for k in range(-6, 7):
            worst = max(worst, abs(core.reflect_pfl(c, ch[k]) - ch[1 - k]))
    return worst < 1e-9, f"max |reflect(l_k) - l_(1-k)| {worst:.3g}"


def _pfl_bisector(rng):
    worst = 0.0
    for c in random_expanding(rng, 200, 1.0001, 3.0):
        l0, l1 = core.ell0(c), core.ell0(c) / c
        worst = max(worst, abs(core.pfl_side(c, (l0 + l1) / 2)) / abs(c))
        # PFL direction is 1/c; L_0 must be perpendicular to it
        ang = abs(((l1 - l0) * (1 / c).conjugate()).real) / (abs(l1 - l0) * abs(1 / c))
        worst = max(worst, ang)
    return worst < 1e-8, f"max deviation {worst:.3g}"


def _iff_predicates(rng):
    bad = 0
    for c in random_expanding(rng, 400, 1.0, 2.5):
        if abs(c.real + 1) > 1e-6:
            lhs = core.gamma0(c).real < core.ell0(c).real
            bad += lhs != perimeter.predicate_alpha_vs_gamma(c)
        if abs(abs(c) - math.sqrt(2)) > 1e-6:
            lhs = perimeter.ell_k(c, -1).imag > -1 + 1e-9
            bad += lhs != perimeter.predicate_ell_minus1(c)
    return bad == 0, f"{bad} disagreements"


def _real_segments(rng):
    for c, (top, bot) in ((1.5, (0, -4 / 3)), (-1.5, (4, -8 / 3))):
        ys = rng.uniform(bot, top, 200)
        if any(core.iterate_until_escape(c, 1j * y, 500).escaped for y in ys):
            return False, f"segment point escaped for c={c}"
        for y in (top + 1e-2, bot - 1e-2):
            if not core.iterate_until_escape(c, 1j * y, 500).escaped:
                return False, f"outside point survived for c={c}"
    return True, "segments invariant, outside escapes"


def _unit_cases(rng):
    zs = rng.uniform(-3, 3, 300) + 1j * rng.uniform(-1, 1, 300)
    if any(core.apply_n(-1, z, 2) != z for z in zs):
        return False, "f^2 != id on the strip for c=-1"
    c = cmath.exp(2j * math.pi / 5)
    poly = regimes.unit_modulus_polygon(core.canonicalize(c), 1, 5)
    cen = sum(poly) / 5
    worst = max(abs(core.apply_n(c, cen + t * (v - cen), 5) - (cen + t * (v - cen)))
                for v in poly for t in (0.3, 0.9))
    return worst < 1e-9, f"pentagon f^5 residual {worst:.3g}"


def _renormalization(rng):
    s = -1j * rng.uniform(0, 1.6454, 300)
    rep = check_power_embedding(1.05j, 4, s)
    return rep.max_deviation < 1e-9, f"max deviation {rep.max_deviation:.3g}"


def _affine(rng):
    from .orbits import conjugacy_map
    z0, s, cp = conjugacy_map()
    R = core.escape_radius(cp)
    pts = survived_samples(cp, raster.Viewport(0j, 2 * R, 160, 160), 200, seed=int(rng.integers(1 << 30)))
    rep = check_affine_conjugacy(pts)
    ok = rep.extra["fixed_residual"] < 1e-9 and rep.max_deviation < 1e-8
    return ok, f"fixed {rep.extra['fixed_residual']:.3g}, identity {rep.max_deviation:.3g}"


def _polygon_theorems(rng):
    seen = 0
    for c in random_expanding(rng, 150, 1.0, 1.45):
        rep = perimeter.build_perimeter(c)
        if rep.classification != perimeter.POLYGON:
            continue
        seen += 1
        p = core.as_parameter(c)
        if not (p.alpha >= -1 and p.r <= math.sqrt(2)):
            return False, f"Polygon with alpha={p.alpha}, r={p.r}"
        if rep.side_count % 2 != 1:
            return False, f"even side count for c={c}"
        ring = list(rep.outer_boundary.vertices)
        from .geometry import sample_boundary
        zs = sample_boundary(ring, 100)
        img = np.array([core.apply(c, z).value for z in zs])
        if not np.all(rep.contains(img, tol=1e-8)):
            return False, f"f(P) not in P for c={c}"
        if min(v.real for v in ring) < core.ell0(c).real - 1e-10:
            return False, f"vertex left of Re(l0) for c={c}"
    return True, f"{seen} polygons checked"


def _determinism(rng):
    vp = raster.Viewport(0.1 - 0.4j, 5.0, 24, 18)
    cfg = raster.ShaderConfig(max_iter=200, N=40)
    d = {raster.render_julia(0.5567 + 0.8471j, vp, cfg, workers=w).digest() for w in (1, 4, 16)}
    return len(d) == 1, f"{len(d)} distinct digests"


def _entropy_real(rng):
    s = segment_samples(-4j / 3, 0, 100000)
    est = estimate_entropy(itinerary_counts(1.5, s, 14), n_samples=s.size, r=1.5)
    return abs(est.slope - math.log(1.5)) <= 0.05, f"slope {est.slope:.4f} vs {math.log(1.5):.4f}"


def _config_roundtrip(rng):
    from .config import JobConfig, parse, serialize
    cfg = JobConfig(command="render-julia", c=-0.65 + 0.88j, center=0.25 - 1j, width=3.5, window=(5, 12))
    return parse(serialize(cfg)) == cfg, "parse(serialize(cfg)) == cfg"


CHECKS: Dict[str, Check] = {
    "fixed-points": _fixed_points,
    "fold-symmetry": _fold_symmetry,
    "conjugation-equivariance": _conjugation,
    "image-in-upper-region": _image_upper,
    "escape-soundness": _escape_soundness,
    "ell-mirror-symmetry": _mirror_chain,
    "pfl-bisects-L0": _pfl_bisector,
    "iff-predicates": _iff_predicates,
    "real-segments": _real_segments,
    "unit-modulus": _unit_cases,
    "renormalization": _renormalization,
    "affine-conjugacy": _affine,
    "polygon-theorems": _polygon_theorems,
    "render-determinism": _determinism,
    "entropy-real": _entropy_real,
    "config-roundtrip": _config_roundtrip,
}


def run_all(seed: int = 0) -> List[Tuple[str, bool, str]]:
    out = []
    for name, fn in CHECKS.items():
        rng = np.random.default_rng(seed)
        try:
            ok, detail = fn(rng)
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((name, bool(ok), detail))
    return out
