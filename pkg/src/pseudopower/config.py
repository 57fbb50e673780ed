"""Run configuration: YAML (or JSON) files with defaults and validation.

Nested layout::

    potential: {kind: linear, params: [1.0], m: 0.5, omega: 1.0}
    grid: {a: 1.0, b: 1.0, nx: 2001, ny: 2001}
    degrees: {n_max: 6}
    tolerances: {eps_f: 1.0e-12, picard_tol: 1.0e-12, picard_max_iter: 50,
                 residual_multiplier: 100.0, closed_vs_recursive: 10.0}
    expansion: {radius: 0.8, n_max: 20, target: pole, pole: 2.0}
    approx: {degrees: [2, 4, 6, 8]}
    outputs: out
    seed: 0

The flat shorthand ``{p: zero, m: 1, omega: 0, a: 1, b: 1}`` is accepted
as well.  ``expansion.target`` is ``pole`` (the image of ``1/(z - pole)``)
or a path to a field CSV.  ``pole`` defaults to ``2a``; ``radius`` to
``0.8 min(a, b)``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .dirac import POTENTIAL_KINDS, PotentialSpec
from .errors import ConfigParseError, ConfigValidationError
from .grids import Grid2D, SymmetricGrid1D


@dataclass
class Tolerances:
    eps_f: float = 1e-12
    picard_tol: float = 1e-12
    picard_max_iter: int = 50
    residual_multiplier: float = 100.0
    closed_vs_recursive: float = 10.0
    mapping: float = 1e-4
    free_case: float = 1e-10


@dataclass
class PotentialConfig:
    kind: str = "zero"
    params: tuple = ()
    m: float = 0.0
    omega: float = 0.0
    table: str | None = None


@dataclass
class GridConfig:
    a: float = 1.0
    b: float = 1.0
    nx: int = 2001
    ny: int = 2001


@dataclass
class ExpansionConfig:
    radius: float | None = None
    n_max: int = 20
    target: str = "pole"
    pole: float | None = None


@dataclass
class ApproxConfig:
    degrees: tuple = (2, 4, 6, 8)


@dataclass
class RunConfig:
    potential: PotentialConfig = field(default_factory=PotentialConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    n_max: int = 6
    tolerances: Tolerances = field(default_factory=Tolerances)
    expansion: ExpansionConfig = field(default_factory=ExpansionConfig)
    approx: ApproxConfig = field(default_factory=ApproxConfig)
    outputs: str = "out"
    seed: int = 0
    source: Path | None = None

    def domain(self) -> Grid2D:
        return Grid2D(SymmetricGrid1D(self.grid.a, self.grid.nx),
                      SymmetricGrid1D(self.grid.b, self.grid.ny))

    def potential_spec(self) -> PotentialSpec:
        pot = self.potential
        table = deriv = None
        if pot.kind == "table":
            path = Path(pot.table)
            if not path.is_absolute() and self.source is not None:
                path = self.source.parent / path
            data = np.loadtxt(path, delimiter=",", ndmin=2, skiprows=1)
            table, deriv = data[:, 0], data[:, 1] if data.shape[1] > 1 else None
            if table.shape[0] != self.grid.nx:
                raise ConfigValidationError(
                    f"potential.table: {table.shape[0]} rows but nx = {self.grid.nx}")
        return PotentialSpec(pot.kind, pot.params, pot.m, pot.omega,
                             self.domain(), table, deriv)

    @property
    def pole(self) -> float:
        return 2 * self.grid.a if self.expansion.pole is None else self.expansion.pole

    @property
    def radius(self) -> float:
        if self.expansion.radius is None:
            return 0.8 * min(self.grid.a, self.grid.b)
        return self.expansion.radius

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["source"] = None if self.source is None else str(self.source)
        return d


_FLAT_POTENTIAL = {"p": "kind", "kind": "kind", "params": "params",
                   "m": "m", "omega": "omega", "table": "table"}
_FLAT_GRID = ("a", "b", "nx", "ny")
_SECTIONS = ("potential", "grid", "degrees", "tolerances", "expansion",
             "approx", "outputs", "seed")


def _section(raw: dict, name: str, cls):
    block = raw.get(name, {})
    if block is None:
        block = {}
    if not isinstance(block, dict):
        raise ConfigParseError(f"{name}: expected a mapping")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(block) - names
    if unknown:
        raise ConfigParseError(f"{name}: unknown field(s) {sorted(unknown)}")
    try:
        return cls(**block)
    except TypeError as exc:
        raise ConfigParseError(f"{name}: {exc}") from None


def _normalise(raw: dict) -> dict:
    """Fold the flat shorthand into the nested layout."""
    out = {k: raw[k] for k in _SECTIONS if k in raw}
    pot = dict(out.get("potential") or {})
    grid = dict(out.get("grid") or {})
    for key, value in raw.items():
        if key in _SECTIONS:
            continue
        if key in _FLAT_POTENTIAL:
            pot[_FLAT_POTENTIAL[key]] = value
        elif key in _FLAT_GRID:
            grid[key] = value
        elif key == "n_max":
            out.setdefault("degrees", {})["n_max"] = value
        else:
            raise ConfigParseError(f"unknown field {key!r}")
    if pot:
        out["potential"] = pot
    if grid:
        out["grid"] = grid
    return out


def parse_config(raw, source: Path | None = None) -> RunConfig:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigParseError("top level must be a mapping")
    raw = _normalise(raw)
    pot = _section(raw, "potential", PotentialConfig)
    if not isinstance(pot.kind, str) or pot.kind not in POTENTIAL_KINDS:
        raise ConfigParseError(
            f"potential.kind: unknown kind {pot.kind!r}; expected one of "
            f"{', '.join(POTENTIAL_KINDS)}")
    if pot.params is None:
        pot.params = ()
    elif isinstance(pot.params, (int, float)):
        pot.params = (pot.params,)
    pot.params = tuple(pot.params)
    degrees = raw.get("degrees") or {}
    if set(degrees) - {"n_max"}:
        raise ConfigParseError(f"degrees: unknown field(s) {sorted(set(degrees) - {'n_max'})}")
    approx = _section(raw, "approx", ApproxConfig)
    approx.degrees = tuple(approx.degrees)
    cfg = RunConfig(
        potential=pot,
        grid=_section(raw, "grid", GridConfig),
        n_max=degrees.get("n_max", 6),
        tolerances=_section(raw, "tolerances", Tolerances),
        expansion=_section(raw, "expansion", ExpansionConfig),
        approx=approx,
        outputs=str(raw.get("outputs", "out")),
        seed=raw.get("seed", 0),
        source=source,
    )
    validate(cfg)
    return cfg


def _is_int(v) -> bool:
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool)


def validate(cfg: RunConfig) -> RunConfig:
    g = cfg.grid
    for name in ("nx", "ny"):
        v = getattr(g, name)
        if not _is_int(v) or v < 3 or v % 2 == 0:
            raise ConfigValidationError(f"grid.{name} must be an odd integer >= 3, got {v!r}")
    for name in ("a", "b"):
        v = getattr(g, name)
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
            raise ConfigValidationError(f"grid.{name} must be positive, got {v!r}")
    if not _is_int(cfg.n_max) or cfg.n_max < 0:
        raise ConfigValidationError(f"degrees.n_max must be >= 0, got {cfg.n_max!r}")
    if not _is_int(cfg.seed):
        raise ConfigValidationError(f"seed must be an integer, got {cfg.seed!r}")
    if cfg.potential.kind == "table" and not cfg.potential.table:
        raise ConfigValidationError("potential.table: a CSV path is required")
    if cfg.expansion.radius is not None and not cfg.expansion.radius > 0:
        raise ConfigValidationError("expansion.radius must be positive")
    if any(not _is_int(d) or d < 0 for d in cfg.approx.degrees):
        raise ConfigValidationError("approx.degrees must be non-negative integers")
    return cfg


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigParseError(f"{path}: {exc.strerror}") from None
    try:
        # JSON is a subset of YAML
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}" if mark is not None else "unknown line"
        raise ConfigParseError(f"{path}: {where}: {getattr(exc, 'problem', exc)}") from None
    return parse_config(raw, source=path)
