"""Residual report assembly: norms per grid, observed orders, pass/fail.

A report collects named residual series over an increasing list of grid
sizes.  For each series the observed convergence order between successive
sizes is log2 of the ratio of normalized interior max norms; a series
passes when every measured order falls inside the configured window, or
when its norms never rise above the rounding floor (in which case there is
nothing to measure).  Series marked ``check="none"`` are informational:
they carry physical values (actual strains, say) that are not expected to
shrink under refinement.

The serialized report is deterministic: identical configuration produces a
byte-identical JSON document except for the wall-time entry.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .grid import FieldNorms, ScalarField, field_norms

__all__ = ["Tolerances", "Series", "ReportBuilder", "report_to_json"]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Tolerances:
    order_min: float = 1.7
    order_max: float = 2.3
    floor: float = 1e-12

    def __post_init__(self) -> None:
        if not (self.order_min > 0 and self.order_max > self.order_min):
            raise ValueError("order window must satisfy 0 < order_min < order_max")
        if not self.floor > 0:
            raise ValueError("floor must be positive")

    def as_dict(self) -> dict:
        return {
            "order_min": self.order_min,
            "order_max": self.order_max,
            "floor": self.floor,
        }


@dataclass
class Series:
    """One residual family measured across the grid-size sweep.

    ``check`` selects the pass criterion: ``"order"`` requires every
    measured order inside [order_min, order_max]; ``"order-min"`` requires
    only the lower bound (for quantities that legitimately superconverge,
    like path-closure of a high-order integrator); ``"none"`` is
    informational.
    """

    name: str
    check: str = "order"  # "order" | "order-min" | "none"
    scale: float = 1.0
    norms: dict[int, FieldNorms] = field(default_factory=dict)
    fields: dict[int, ScalarField] = field(default_factory=dict)
    note: str = ""

    def normalized_linf(self, n: int) -> float:
        return self.norms[n].linf / self.scale

    def orders(self, tol: Tolerances) -> list[float | None]:
        """log2 ratios of successive normalized max norms; None below floor."""
        sizes = sorted(self.norms)
        out: list[float | None] = []
        for a, b in zip(sizes, sizes[1:]):
            ca, cb = self.normalized_linf(a), self.normalized_linf(b)
            if cb <= tol.floor:
                out.append(None)  # collapsed to the floor: nothing to measure
            elif ca <= tol.floor:
                # rounding in stacked differences grows ~4x per halving, so a
                # floor-level field may legitimately drift somewhat above the
                # floor on fine grids; only a large jump is a real stall
                out.append(None if cb <= 100.0 * tol.floor else -99.0)
            else:
                out.append(math.log2(ca / cb))
        return out

    def passed(self, tol: Tolerances) -> bool:
        if self.check == "none":
            return True
        sizes = sorted(self.norms)
        if all(self.normalized_linf(n) <= tol.floor for n in sizes):
            return True
        if len(sizes) < 2:
            return True  # nothing to measure on a single grid
        for o in self.orders(tol):
            if o is None:
                continue
            if o < tol.order_min:
                return False
            if self.check == "order" and o > tol.order_max:
                return False
        return True


class ReportBuilder:
    """Accumulates residual fields grid by grid and renders the report."""

    def __init__(self, experiment: str, grids: list[int], trim: int, tol: Tolerances):
        self.experiment = experiment
        self.grids = list(grids)
        self.trim = trim
        self.tol = tol
        self.series: dict[str, Series] = {}

    def add(
        self,
        name: str,
        n: int,
        fld: ScalarField,
        *,
        scale: float = 1.0,
        check: str = "order",
        trim: int | None = None,
        note: str = "",
    ) -> None:
        s = self.series.setdefault(name, Series(name=name, check=check, note=note))
        s.scale = max(s.scale, scale) if s.norms else scale
        s.check = check
        if note:
            s.note = note
        s.norms[n] = field_norms(fld, self.trim if trim is None else trim)
        s.fields[n] = fld

    @property
    def passed(self) -> bool:
        return all(s.passed(self.tol) for s in self.series.values())

    def as_dict(self, config_echo: dict, wall_time_s: float, version: str) -> dict:
        residuals = {}
        for name in sorted(self.series):
            s = self.series[name]
            residuals[name] = {
                "check": s.check,
                "scale": s.scale,
                "note": s.note,
                "norms": {
                    str(n): {"linf": s.norms[n].linf, "l2": s.norms[n].l2}
                    for n in sorted(s.norms)
                },
                "normalized_linf": {
                    str(n): s.normalized_linf(n) for n in sorted(s.norms)
                },
                "orders": s.orders(self.tol),
                "passed": s.passed(self.tol),
            }
        return {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "grids": self.grids,
            "trim": self.trim,
            "tolerances": self.tol.as_dict(),
            "passed": self.passed,
            "residuals": residuals,
            "provenance": {
                "config": config_echo,
                "version": version,
                "wall_time_s": wall_time_s,
            },
        }


def report_to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
