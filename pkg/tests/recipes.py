"""Render a recipe job file in-process (used by the golden-digest tests)."""
from pathlib import Path

from ttm import cli, config, raster

RECIPES = Path(__file__).resolve().parent.parent / "docs" / "recipes"

#: the figure-recipe set whose digests are pinned, with the reduced size used
GOLDEN = {
    "tbcoloring": "tbcoloring.conf",
    "tbcoloring-core": "tbcoloring-core.conf",
    "paramplane-minus-i": "paramplane-test-point-minus-i.conf",
    "polygonal-locus": "polygonal-locus.conf",
    "bubbles": "bubbles.conf",
}
SMALL = dict(px_w=96, px_h=96, max_iter=300)


def load(name, **over):
    cfg = config.load(RECIPES / name)
    return cfg.updated(**over)


def render(cfg, workers=None):
    vp, sh = cli._viewport(cfg), cli._shader(cfg)
    if cfg.command == "render-julia":
        return raster.render_julia(cfg.c, vp, sh, workers)
    if cfg.kind == "polygonal-locus":
        return raster.render_param_polygonal_locus(vp, sh, workers)
    if cfg.kind == "bubbles":
        return raster.render_param_bubbles(vp, cfg.n_cap, workers)
    if cfg.kind == "layered":
        return raster.render_param_layered(vp, sh, workers)
    return raster.render_param_coded(vp, cfg.test_point, sh, workers)
