"""Config files: flat INI sections, strict keys.

Unknown sections or keys are hard errors so that typos cannot silently
fall back to defaults.  The potential block either names a builtin with
its parameter list or gives inline expression strings for A0..A3.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .expressions import parse_expression
from .potentials import PotentialSpec, builtin, from_expressions

_SCHEMA = {
    "potential": {"name", "params", "q", "a0", "a1", "a2", "a3"},
    "grid.transverse": {"min", "max", "n"},
    "grid.longitudinal": {"min", "max", "n"},
    "solver": {"modes", "tolerance", "method", "lambda_max"},
    "scenario": {"m", "p3", "branch", "level", "energy_sign", "solution",
                 "coef1", "coef2"},
    "report": {"out_dir", "formats"},
}

_SOLUTIONS = {"planewave", "separated"}
_METHODS = {"auto", "dense", "iterative"}


@dataclass
class GridBlock:
    min: float
    max: float
    n: int


@dataclass
class RunConfig:
    potential: PotentialSpec
    potential_echo: dict
    transverse: GridBlock
    longitudinal: GridBlock
    modes: int = 6
    tolerance: float = 1e-10
    method: str = "auto"
    lambda_max: float = 0.0  # 0 = auto
    m: float = 1.0
    p3: float = 0.0
    branch: int = 1
    level: int = 1
    energy_sign: int = 1
    solution: str = "planewave"
    coef1: complex = 1.0 + 0.0j
    coef2: complex = 1.0 + 0.0j
    out_dir: str = "out"
    formats: tuple = ("json", "csv")

    def echo(self) -> dict:
        return {
            "potential": self.potential_echo,
            "grid.transverse": vars(self.transverse),
            "grid.longitudinal": vars(self.longitudinal),
            "solver": {"modes": self.modes, "tolerance": self.tolerance,
                       "method": self.method, "lambda_max": self.lambda_max},
            "scenario": {"m": self.m, "p3": self.p3, "branch": self.branch,
                         "level": self.level, "energy_sign": self.energy_sign,
                         "solution": self.solution,
                         "coef1": str(self.coef1), "coef2": str(self.coef2)},
            "report": {"out_dir": self.out_dir, "formats": list(self.formats)},
        }


def _get(parser, section, key, conv, default=None, required=False):
    if parser.has_option(section, key):
        raw = parser.get(section, key)
        try:
            return conv(raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from exc
    if required:
        raise ConfigError(f"missing required key [{section}] {key}")
    return default


def _parse_potential(parser) -> tuple:
    if not parser.has_section("potential"):
        raise ConfigError("missing [potential] section")
    name = _get(parser, "potential", "name", str)
    echo = {}
    if name is not None:
        raw = _get(parser, "potential", "params", str, default="")
        params = [float(v) for v in raw.split(",") if v.strip()]
        for key in ("a0", "a1", "a2", "a3"):
            if parser.has_option("potential", key):
                raise ConfigError(
                    f"[potential] cannot mix name= with inline {key}=")
        spec = builtin(name, params)
        echo = {"name": name, "params": params, "q": spec.q}
    else:
        q = _get(parser, "potential", "q", float, required=True)
        comps = {}
        for key in ("a0", "a1", "a2", "a3"):
            text = _get(parser, "potential", key, str, default="0")
            parse_expression(text)  # fail early with a clear message
            comps[key] = text
        spec = from_expressions(q, **comps)
        echo = {"q": q, **comps}
    return spec, echo


def _parse_grid(parser, section) -> GridBlock:
    if not parser.has_section(section):
        raise ConfigError(f"missing [{section}] section")
    lo = _get(parser, section, "min", float, required=True)
    hi = _get(parser, section, "max", float, required=True)
    n = _get(parser, section, "n", int, required=True)
    if hi <= lo or n < 1:
        raise ConfigError(f"[{section}] needs max > min and n >= 1")
    return GridBlock(min=lo, max=hi, n=n)


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (configparser.Error, OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser.options(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")

    spec, echo = _parse_potential(parser)
    cfg = RunConfig(
        potential=spec,
        potential_echo=echo,
        transverse=_parse_grid(parser, "grid.transverse"),
        longitudinal=_parse_grid(parser, "grid.longitudinal"),
        modes=_get(parser, "solver", "modes", int, default=6),
        tolerance=_get(parser, "solver", "tolerance", float, default=1e-10),
        method=_get(parser, "solver", "method", str, default="auto"),
        lambda_max=_get(parser, "solver", "lambda_max", float, default=0.0),
        m=_get(parser, "scenario", "m", float, default=1.0),
        p3=_get(parser, "scenario", "p3", float, default=0.0),
        branch=_get(parser, "scenario", "branch", int, default=1),
        level=_get(parser, "scenario", "level", int, default=1),
        energy_sign=_get(parser, "scenario", "energy_sign", int, default=1),
        solution=_get(parser, "scenario", "solution", str, default="planewave"),
        coef1=_get(parser, "scenario", "coef1", complex, default=1 + 0j),
        coef2=_get(parser, "scenario", "coef2", complex, default=1 + 0j),
        out_dir=_get(parser, "report", "out_dir", str, default="out"),
        formats=tuple(_get(parser, "report", "formats",
                           lambda s: [f.strip() for f in s.split(",") if f.strip()],
                           default=["json", "csv"])),
    )
    if cfg.method not in _METHODS:
        raise ConfigError(f"solver.method must be one of {sorted(_METHODS)}")
    if cfg.solution not in _SOLUTIONS:
        raise ConfigError(f"scenario.solution must be one of {sorted(_SOLUTIONS)}")
    if cfg.branch not in (1, 2):
        raise ConfigError("scenario.branch must be 1 or 2")
    if cfg.energy_sign not in (1, -1):
        raise ConfigError("scenario.energy_sign must be 1 or -1")
    if cfg.m <= 0:
        raise ConfigError("scenario.m must be positive")
    if cfg.modes < 1:
        raise ConfigError("solver.modes must be >= 1")
    unknown = set(cfg.formats) - {"json", "csv"}
    if unknown:
        raise ConfigError(f"unknown report formats {sorted(unknown)}")
    return cfg
