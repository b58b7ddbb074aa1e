"""Flat, sectioned key-value run configuration (INI dialect).

A run file looks like::

    [run]
    experiment = strain-check
    grids = 33,65,129
    trim = 2
    out_dir = out
    format = json
    figures = true

    [tolerances]
    order_min = 1.7
    order_max = 2.3
    floor = 1e-12

    [surface]
    name = sphere
    radius = 1.0

    [displacement]
    kind = rigid
    a = 0,0,1
    b = 0.3,-0.2,0.1

Sections other than ``[run]`` are required only by the experiments that
consume them; see :mod:`shellcompat.cli`.  Geometry may alternatively come
from a CSV bundle directory (key ``csv_bundle``), displacements from
``kind = csv`` with a ``dir`` key.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .report import Tolerances

__all__ = ["ConfigError", "RunConfig", "parse_config", "EXPERIMENTS"]

EXPERIMENTS = ("surface-check", "strain-check", "symmetry-demo", "reconstruct", "convergence")
FORMATS = ("json", "csv", "both")


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass
class RunConfig:
    experiment: str
    grids: list[int]
    out_dir: Path
    trim: int = 2
    fmt: str = "json"
    figures: bool = True
    negative_control: bool = False
    tolerances: Tolerances = field(default_factory=Tolerances)
    surface: dict[str, str] = field(default_factory=dict)
    displacement: dict[str, str] = field(default_factory=dict)
    seed: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if self.fmt not in FORMATS:
            raise ConfigError(f"unknown format {self.fmt!r}; choose from {FORMATS}")
        if not self.grids:
            raise ConfigError("at least one grid size is required")
        if any(n < 5 for n in self.grids):
            raise ConfigError("grid sizes below 5 cannot carry the residual stencils")
        if any(b <= a for a, b in zip(self.grids, self.grids[1:])):
            raise ConfigError("grid sizes must be strictly increasing")
        if self.trim < 0:
            raise ConfigError("trim must be >= 0")

    def echo(self) -> dict:
        """Effective configuration as serialized into the report."""
        return {
            "experiment": self.experiment,
            "grids": self.grids,
            "trim": self.trim,
            "format": self.fmt,
            "figures": self.figures,
            "negative_control": self.negative_control,
            "tolerances": self.tolerances.as_dict(),
            "surface": dict(self.surface),
            "displacement": dict(self.displacement),
            "seed": dict(self.seed),
        }


def _parse_grids(raw: str) -> list[int]:
    try:
        return [int(tok) for tok in raw.replace(" ", "").split(",") if tok]
    except ValueError as exc:
        raise ConfigError(f"cannot parse grid list {raw!r}") from exc


def _parse_bool(raw: str) -> bool:
    val = raw.strip().lower()
    if val in ("1", "true", "yes", "on"):
        return True
    if val in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"cannot parse boolean {raw!r}")


def parse_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read_string(path.read_text())
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if "run" not in parser:
        raise ConfigError(f"{path}: missing [run] section")
    run = parser["run"]

    try:
        tol_sec = parser["tolerances"] if "tolerances" in parser else {}
        tolerances = Tolerances(
            order_min=float(tol_sec.get("order_min", 1.7)),
            order_max=float(tol_sec.get("order_max", 2.3)),
            floor=float(tol_sec.get("floor", 1e-12)),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: bad tolerances: {exc}") from exc

    try:
        cfg = RunConfig(
            experiment=run.get("experiment", ""),
            grids=_parse_grids(run.get("grids", "")),
            out_dir=Path(run.get("out_dir", "out")),
            trim=int(run.get("trim", 2)),
            fmt=run.get("format", "json"),
            figures=_parse_bool(run.get("figures", "true")),
            negative_control=_parse_bool(run.get("negative_control", "false")),
            tolerances=tolerances,
            surface=dict(parser["surface"]) if "surface" in parser else {},
            displacement=dict(parser["displacement"]) if "displacement" in parser else {},
            seed=dict(parser["seed"]) if "seed" in parser else {},
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return cfg
