"""``ttm`` command line.

Every subcommand reads an optional ``--config`` job file and lets flags
override it. Exit status: 0 ok, 1 I/O failure, 2 bad config or input,
3 verify failure.
"""
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import __version__, config as jobconf
from .config import JobConfig, parse_complex
from .exceptions import ConfigParse, IoFailure, TTMError

COMPLEX_FLAGS = ("--c", "--center", "--test-point", "--z0")


def _complex(text):
    try:
        return parse_complex(text)
    except ConfigParse as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _window(text):
    try:
        lo, hi = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be lo,hi, got {text!r}")
    return (lo, hi)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ttm", description="Twisted tent map toolkit")
    ap.add_argument("--version", action="version", version=f"ttm {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, c=True):
        p.add_argument("--config", help="key = value job file; flags override it")
        p.add_argument("--output", "-o")
        if c:
            p.add_argument("--c", type=_complex, help="parameter, e.g. -0.65+0.88i")
        return p

    def view(p):
        p.add_argument("--center", type=_complex)
        p.add_argument("--width", type=float)
        p.add_argument("--height", type=float)
        p.add_argument("--px-w", dest="px_w", type=int)
        p.add_argument("--px-h", dest="px_h", type=int)
        p.add_argument("--palette")

    def shader(p):
        p.add_argument("--max-iter", dest="max_iter", type=int)
        p.add_argument("--escape-R", dest="escape_R", type=float)
        p.add_argument("--N", type=int, help="coded-coloring bailout")
        p.add_argument("--mode", choices=("EscapeTime", "Coded", "Fastest"))
        p.add_argument("--workers", type=int, help="threads (output is identical for any value)")

    common(sub.add_parser("classify", help="regime of a parameter"))
    common(sub.add_parser("perimeter", help="perimeter set report and boundary CSV"))
    p = common(sub.add_parser("render-julia", help="dynamical-plane render (PPM)"))
    view(p)
    shader(p)
    p = common(sub.add_parser("render-param", help="parameter-plane render (PPM)"), c=False)
    view(p)
    shader(p)
    p.add_argument("--kind", choices=jobconf.PARAM_KINDS)
    p.add_argument("--test-point", dest="test_point", type=_complex)
    p.add_argument("--n-cap", dest="n_cap", type=int)
    p = common(sub.add_parser("orbit", help="orbit CSV and occupancy grid"))
    view(p)
    p.add_argument("--z0", type=_complex)
    p.add_argument("--n", type=int)
    p.add_argument("--burn-in", dest="burn_in", type=int)
    p.add_argument("--resolution", type=int)
    p = common(sub.add_parser("entropy", help="itinerary-count entropy estimate"))
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--window", type=_window)
    p.add_argument("--samples", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--seed", type=int)
    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    return ap


def _glue_negative(argv: List[str]) -> List[str]:
    """Let ``--c -0.65+0.88i`` work: argparse would read the value as a flag."""
    out: List[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in COMPLEX_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def resolve_config(args) -> JobConfig:
    base = jobconf.load(args.config) if getattr(args, "config", None) else JobConfig()
    over = {k: v for k, v in vars(args).items()
            if k not in ("config", "workers") and v is not None}
    over["command"] = args.command
    try:
        return base.updated(**over)
    except TypeError as exc:
        raise ConfigParse(str(exc)) from exc


def _viewport(cfg: JobConfig):
    from .raster import Viewport
    return Viewport(cfg.center, cfg.width, cfg.px_w, cfg.px_h, cfg.height)


def _shader(cfg: JobConfig):
    from .raster import ShaderConfig
    try:
        return ShaderConfig(cfg.max_iter, cfg.escape_R, cfg.N, cfg.mode)
    except ValueError as exc:
        raise ConfigParse(str(exc)) from exc


def _palette(cfg: JobConfig):
    from .raster import load_palette
    if cfg.palette:
        try:
            return load_palette(cfg.palette)
        except ValueError as exc:
            raise ConfigParse(str(exc)) from exc
    return None


def _require(cfg: JobConfig, *names):
    for n in names:
        if getattr(cfg, n) is None:
            raise ConfigParse(f"{cfg.command} needs {n}")


def _write_text(path, text):
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def write_sidecar(cfg: JobConfig, extra: dict) -> None:
    """``<output>.meta``: the full job (a valid job file on its own), then the
    values derived while running it as ``derived.<key> = value``."""
    lines = [f"# ttm {__version__}", jobconf.serialize(cfg).rstrip("\n"), "# derived"]
    lines += [f"derived.{k} = {v}" for k, v in extra.items()]
    _write_text(cfg.output + ".meta", "\n".join(lines) + "\n")


def _render(cfg: JobConfig, ras, workers) -> None:
    from .raster import write_ppm
    write_ppm(ras, _palette(cfg), cfg.output)
    extra = {k: v for k, v in ras.meta.items()}
    extra["digest"] = ras.digest()
    write_sidecar(cfg, extra)
    print(f"wrote {cfg.output} ({ras.px_w}x{ras.px_h}) digest={ras.digest()}")


def cmd_classify(cfg, workers=None):
    from .regimes import classify, text_report
    _require(cfg, "c")
    text = text_report(classify(cfg.c))
    sys.stdout.write(text)
    if cfg.output:
        _write_text(cfg.output, text)
    return 0


def cmd_perimeter(cfg, workers=None):
    from .perimeter import build_perimeter
    from .core import canonicalize
    from .geometry import ring_csv
    _require(cfg, "c")
    rep = build_perimeter(canonicalize(cfg.c))
    for k, v in rep.summary().items():
        print(f"{k}: {v}")
    if cfg.output:
        _write_text(cfg.output, rep.outer_boundary.to_csv())
        regions = "".join(f"# S_{r.k}\n" + ring_csv(r.polygon) for r in rep.s_regions)
        _write_text(cfg.output + ".regions.csv", regions)
        write_sidecar(cfg, rep.summary())
    return 0


def cmd_render_julia(cfg, workers=None):
    from .raster import render_julia
    _require(cfg, "c", "output")
    _render(cfg, render_julia(cfg.c, _viewport(cfg), _shader(cfg), workers), workers)
    return 0


def cmd_render_param(cfg, workers=None):
    from . import raster
    _require(cfg, "output")
    vp, sh = _viewport(cfg), _shader(cfg)
    if cfg.kind == "polygonal-locus":
        ras = raster.render_param_polygonal_locus(vp, sh, workers)
    elif cfg.kind == "bubbles":
        ras = raster.render_param_bubbles(vp, cfg.n_cap, workers)
    elif cfg.kind == "layered":
        ras = raster.render_param_layered(vp, sh, workers)
    else:
        ras = raster.render_param_coded(vp, cfg.test_point, sh, workers)
    _render(cfg, ras, workers)
    return 0


def cmd_orbit(cfg, workers=None):
    from .orbits import occupancy, sample_orbit
    from .raster import write_ppm
    _require(cfg, "c")
    s = sample_orbit(cfg.c, cfg.z0, cfg.n, cfg.burn_in)
    print(f"points: {len(s.points)}")
    print(f"escaped: {str(s.escaped).lower()}")
    extra = {"escaped": str(s.escaped).lower()}
    if not s.escaped:
        occ = occupancy(s, _viewport(cfg), cfg.resolution)
        print(f"components: {occ.component_count}")
        extra["components"] = occ.component_count
    if cfg.output:
        _write_text(cfg.output, s.to_csv())
        if not s.escaped:
            write_ppm(occ.to_raster(), None, cfg.output + ".occupancy.ppm")
        write_sidecar(cfg, extra)
    return 0


def entropy_domain(cfg):
    """Samples of K: the segment for real c, a grid for polygons, else inverse iteration."""
    from . import entropy
    from .orbits import backward_samples
    from .regimes import COMPLEX_HOLES, COMPLEX_POLYGON, REAL_SEGMENT, classify
    reg = classify(cfg.c)
    p = reg.parameter
    if reg.tag == REAL_SEGMENT:
        top, bot = reg.endpoints
        return "segment", entropy.segment_samples(bot, top, cfg.samples)
    if reg.tag in (COMPLEX_POLYGON, COMPLEX_HOLES):
        return "grid", entropy.grid_samples(p, cfg.grid)
    return "backward", backward_samples(p, cfg.samples, seed=cfg.seed)


def cmd_entropy(cfg, workers=None):
    from . import entropy
    from .core import canonicalize
    _require(cfg, "c")
    p = canonicalize(cfg.c)
    domain, samples = entropy_domain(cfg)
    counts = entropy.itinerary_counts(p, samples, cfg.n_max)
    est = entropy.estimate_entropy(counts, cfg.window, n_samples=len(samples), r=p.r,
                                   theoretical=entropy.theoretical_entropy(p))
    print(f"domain: {domain}")
    sys.stdout.write(est.summary())
    if cfg.output:
        _write_text(cfg.output, entropy.counts_csv(counts))
        write_sidecar(cfg, {"domain": domain, "slope": repr(est.slope)})
    return 0


def cmd_verify(cfg, workers=None):
    from .checks import run_all
    results = run_all(cfg.seed)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    failed = sum(not ok for _, ok, _ in results)
    print(f"{len(results) - failed}/{len(results)} passed")
    return 3 if failed else 0


COMMANDS = {
    "classify": cmd_classify,
    "perimeter": cmd_perimeter,
    "render-julia": cmd_render_julia,
    "render-param": cmd_render_param,
    "orbit": cmd_orbit,
    "entropy": cmd_entropy,
    "verify": cmd_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_glue_negative(argv))
    try:
        cfg = resolve_config(args)
        return COMMANDS[cfg.command](cfg, getattr(args, "workers", None))
    except ConfigParse as exc:
        print(f"ttm: config error: {exc}", file=sys.stderr)
        return 2
    except IoFailure as exc:
        print(f"ttm: i/o error: {exc}", file=sys.stderr)
        return 1
    except TTMError as exc:
        print(f"ttm: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # argument checks in the library (e.g. n < burn_in)
        print(f"ttm: bad input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
