"""Flat ``key = value`` job files.

Every field of :class:`JobConfig` is written on serialisation, so a job file
is a complete recipe: parse(serialize(cfg)) == cfg. Complex numbers use the
``a+bi`` form, windows are ``lo,hi``, missing values are ``none``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, fields, replace
from typing import Optional, Tuple

from .core import format_complex
from .exceptions import ConfigParse, IoFailure

COMMANDS = ("classify", "perimeter", "render-julia", "render-param", "orbit", "entropy", "verify")
PARAM_KINDS = ("polygonal-locus", "bubbles", "layered", "coded")


@dataclass(frozen=True)
class JobConfig:
    command: str = "classify"
    c: Optional[complex] = None
    # viewport
    center: complex = 0j
    width: float = 4.0
    height: Optional[float] = None
    px_w: int = 800
    px_h: int = 800
    # shader
    max_iter: int = 1000
    escape_R: float = 0.0
    N: int = 120
    mode: str = "Fastest"
    # render-param
    kind: str = "polygonal-locus"
    test_point: complex = complex(0, -1)
    n_cap: int = 64
    # orbit
    z0: complex = 0j
    n: int = 10000
    burn_in: int = 1000
    resolution: int = 512
    # entropy
    n_max: int = 14
    window: Tuple[int, int] = (6, 14)
    samples: int = 100000
    grid: int = 1024
    # output
    output: Optional[str] = None
    palette: Optional[str] = None
    seed: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigParse(f"unknown command {self.command!r}")
        if self.kind not in PARAM_KINDS:
            raise ConfigParse(f"unknown render-param kind {self.kind!r}")

    def updated(self, **kw) -> "JobConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)


_COMPLEX_FIELDS = {"c", "center", "test_point", "z0"}
_INT_FIELDS = {"px_w", "px_h", "max_iter", "N", "n_cap", "n", "burn_in", "resolution",
               "n_max", "samples", "grid", "seed"}
_FLOAT_FIELDS = {"width", "height", "escape_R"}
_OPTIONAL = {"c", "height", "output", "palette"}


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` / ``a-bi`` / ``bi`` / ``a`` (``j`` also accepted)."""
    s = text.strip().replace(" ", "").replace("I", "i").replace("j", "i")
    if not s:
        raise ConfigParse("empty complex value")
    s = re.sub(r"(^|[+-])i$", lambda m: m.group(1) + "1i", s)
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise ConfigParse(f"cannot parse complex value {text!r}") from None


def _format(name, value) -> str:
    if value is None:
        return "none"
    if name in _COMPLEX_FIELDS:
        return format_complex(value)
    if name == "window":
        return f"{value[0]},{value[1]}"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _convert(name, text: str):
    t = text.strip()
    if name in _OPTIONAL and t.lower() == "none":
        return None
    try:
        if name in _COMPLEX_FIELDS:
            return parse_complex(t)
        if name in _INT_FIELDS:
            return int(t)
        if name in _FLOAT_FIELDS:
            return float(t)
        if name == "window":
            lo, hi = (int(v) for v in t.split(","))
            return (lo, hi)
    except (ValueError, TypeError):
        raise ConfigParse(f"bad value for {name}: {text!r}") from None
    return t


def serialize(cfg: JobConfig) -> str:
    return "".join(f"{f.name} = {_format(f.name, getattr(cfg, f.name))}\n" for f in fields(cfg))


def parse(text: str, base: Optional[JobConfig] = None) -> JobConfig:
    known = {f.name for f in fields(JobConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParse(f"line {lineno}: expected key = value, got {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigParse(f"line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, val)
    base = base or JobConfig()
    return replace(base, **values)


def load(path) -> JobConfig:
    try:
        with open(path) as fh:
            return parse(fh.read())
    except OSError as exc:
        raise ConfigParse(f"cannot read config {path}: {exc}") from exc


def save(cfg: JobConfig, path) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(serialize(cfg))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
