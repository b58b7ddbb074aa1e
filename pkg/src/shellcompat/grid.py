"""Uniform rectangular (alpha, beta) grids, finite differences, and field norms.

Every quantity in this package lives on a :class:`Grid2D` as a
:class:`ScalarField`.  Derivatives are second-order accurate everywhere:

- interior points: 3-point central differences, (f[i+1] - f[i-1]) / (2h)
- boundary points: 3-point one-sided differences, (-3f[0] + 4f[1] - f[2]) / (2h)

Second derivatives (used by the soliton-equation residuals) use the compact
3-point stencil inside and a 4-point one-sided stencil on the boundary, again
O(h^2).  Mixed partials are composed from the first-derivative operators,
``diff_beta(diff_alpha(f))``, which commutes with the opposite order on the
interior-of-interior points.

Norm reductions run in a fixed row-major order so that reports are
bit-for-bit reproducible.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

__all__ = [
    "Grid2D",
    "ScalarField",
    "FieldNorms",
    "constant_field",
    "field_from_function",
    "diff_alpha",
    "diff_beta",
    "diff2_alpha",
    "diff2_beta",
    "field_norms",
    "write_field_csv",
    "read_field_csv",
]


@dataclass(frozen=True)
class Grid2D:
    """Uniform tensor grid over the (alpha, beta) parameter rectangle.

    ``alpha`` is the first (outer, row) index, ``beta`` the second.  Central
    stencils need an interior, hence at least 3 points per direction.
    """

    n_alpha: int
    n_beta: int
    alpha0: float = 0.0
    beta0: float = 0.0
    h_alpha: float = 1.0
    h_beta: float = 1.0

    def __post_init__(self) -> None:
        if self.n_alpha < 3 or self.n_beta < 3:
            raise ValueError(
                f"grid needs at least 3 points per direction, got "
                f"{self.n_alpha} x {self.n_beta}"
            )
        if not (self.h_alpha > 0 and self.h_beta > 0):
            raise ValueError("grid spacings must be positive")

    @classmethod
    def from_ranges(
        cls,
        alpha_range: tuple[float, float],
        beta_range: tuple[float, float],
        n_alpha: int,
        n_beta: int,
    ) -> "Grid2D":
        a0, a1 = alpha_range
        b0, b1 = beta_range
        if not (a1 > a0 and b1 > b0):
            raise ValueError("ranges must be increasing")
        return cls(
            n_alpha=n_alpha,
            n_beta=n_beta,
            alpha0=a0,
            beta0=b0,
            h_alpha=(a1 - a0) / (n_alpha - 1),
            h_beta=(b1 - b0) / (n_beta - 1),
        )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_alpha, self.n_beta)

    @property
    def alphas(self) -> np.ndarray:
        return self.alpha0 + self.h_alpha * np.arange(self.n_alpha)

    @property
    def betas(self) -> np.ndarray:
        return self.beta0 + self.h_beta * np.arange(self.n_beta)

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate matrices A, B with shape (n_alpha, n_beta)."""
        return np.meshgrid(self.alphas, self.betas, indexing="ij")


class FieldNorms(NamedTuple):
    linf: float
    l2: float


@dataclass(frozen=True)
class ScalarField:
    """Real-valued samples on a :class:`Grid2D`, row-major in alpha.

    Arithmetic between fields on the same grid (and with scalars) is
    supported so that differential-geometric formulas read the way they are
    written.  Every operation that produces a field checks finiteness;
    curvature radii, which are legitimately infinite on flat regions, are
    constructed with ``allow_nonfinite=True``.
    """

    grid: Grid2D
    values: np.ndarray
    allow_nonfinite: InitVar[bool] = False

    def __post_init__(self, allow_nonfinite: bool) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} != grid shape {self.grid.shape}")
        if not allow_nonfinite and not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "values", v)

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other: "ScalarField | float") -> np.ndarray:
        if isinstance(other, ScalarField):
            if other.grid != self.grid:
                raise ValueError("fields live on different grids")
            return other.values
        return np.asarray(other, dtype=float)

    def __add__(self, other: "ScalarField | float") -> "ScalarField":
        return ScalarField(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other: "ScalarField | float") -> "ScalarField":
        return ScalarField(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other: "ScalarField | float") -> "ScalarField":
        return ScalarField(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other: "ScalarField | float") -> "ScalarField":
        return ScalarField(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other: "ScalarField | float") -> "ScalarField":
        return ScalarField(self.grid, self.values / self._coerce(other))

    def __rtruediv__(self, other: "ScalarField | float") -> "ScalarField":
        return ScalarField(self.grid, self._coerce(other) / self.values)

    def __neg__(self) -> "ScalarField":
        return ScalarField(self.grid, -self.values)

    def apply(self, fn: Callable[[np.ndarray], np.ndarray]) -> "ScalarField":
        """Pointwise map, e.g. ``f.apply(np.exp)``."""
        return ScalarField(self.grid, fn(self.values))


def constant_field(grid: Grid2D, value: float) -> ScalarField:
    return ScalarField(grid, np.full(grid.shape, float(value)))


def field_from_function(grid: Grid2D, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> ScalarField:
    """Sample ``fn(alpha, beta)`` on the grid (fn must broadcast)."""
    A, B = grid.meshgrid()
    return ScalarField(grid, np.broadcast_to(np.asarray(fn(A, B), dtype=float), grid.shape).copy())


# -- first derivatives ----------------------------------------------------


def _d1(v: np.ndarray, h: float, axis: int) -> np.ndarray:
    # stencils are written as combinations of neighbor differences so that
    # constant fields map to exact zeros
    if v.shape[axis] < 3:
        raise ValueError("first-derivative stencil needs at least 3 points")
    v = np.moveaxis(v, axis, 0)
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    out[0] = (4.0 * (v[1] - v[0]) + (v[0] - v[2])) / (2.0 * h)
    out[-1] = (4.0 * (v[-1] - v[-2]) + (v[-3] - v[-1])) / (2.0 * h)
    return np.moveaxis(out, 0, axis)


def diff_alpha(f: ScalarField) -> ScalarField:
    """d/d(alpha), second order everywhere (one-sided on the two alpha edges)."""
    return ScalarField(f.grid, _d1(f.values, f.grid.h_alpha, axis=0))


def diff_beta(f: ScalarField) -> ScalarField:
    """d/d(beta), mirror of :func:`diff_alpha` along the beta direction."""
    return ScalarField(f.grid, _d1(f.values, f.grid.h_beta, axis=1))


# -- second derivatives ----------------------------------------------------


def _d2(v: np.ndarray, h: float, axis: int) -> np.ndarray:
    if v.shape[axis] < 4:
        raise ValueError("second-derivative stencil needs at least 4 points")
    v = np.moveaxis(v, axis, 0)
    out = np.empty_like(v)
    h2 = h * h
    out[1:-1] = ((v[2:] - v[1:-1]) - (v[1:-1] - v[:-2])) / h2
    out[0] = (2.0 * (v[0] - v[1]) - 3.0 * (v[1] - v[2]) + (v[2] - v[3])) / h2
    out[-1] = (2.0 * (v[-1] - v[-2]) - 3.0 * (v[-2] - v[-3]) + (v[-3] - v[-4])) / h2
    return np.moveaxis(out, 0, axis)


def diff2_alpha(f: ScalarField) -> ScalarField:
    """d^2/d(alpha)^2 with the compact 3-point interior stencil."""
    return ScalarField(f.grid, _d2(f.values, f.grid.h_alpha, axis=0))


def diff2_beta(f: ScalarField) -> ScalarField:
    return ScalarField(f.grid, _d2(f.values, f.grid.h_beta, axis=1))


# -- norms -----------------------------------------------------------------


def field_norms(f: ScalarField, trim: int = 0) -> FieldNorms:
    """Max-abs and RMS over the field with ``trim`` boundary rings removed.

    One-sided stencils degrade up to two rings of residual fields built from
    stacked derivatives; callers measuring such residuals pass ``trim=2``.
    """
    if trim < 0:
        raise ValueError("trim must be >= 0")
    na, nb = f.grid.shape
    if na - 2 * trim <= 0 or nb - 2 * trim <= 0:
        raise ValueError(f"trim={trim} leaves no points on a {na} x {nb} grid")
    v = f.values[trim : na - trim, trim : nb - trim]
    region = np.ascontiguousarray(v)
    linf = float(np.max(np.abs(region)))
    l2 = float(np.sqrt(np.mean(np.square(region))))
    return FieldNorms(linf=linf, l2=l2)


# -- CSV I/O ---------------------------------------------------------------

_GRID_PREFIX = "# grid "


def _grid_header(grid: Grid2D) -> str:
    return (
        f"{_GRID_PREFIX}n_alpha={grid.n_alpha},n_beta={grid.n_beta},"
        f"alpha0={grid.alpha0!r},beta0={grid.beta0!r},"
        f"h_alpha={grid.h_alpha!r},h_beta={grid.h_beta!r}"
    )


def write_field_csv(f: ScalarField, path: str | Path) -> None:
    """Dump as ``alpha,beta,value`` rows, alpha outermost, 17 significant digits."""
    alphas, betas = f.grid.alphas, f.grid.betas
    lines = [_grid_header(f.grid), "alpha,beta,value"]
    for i in range(f.grid.n_alpha):
        a = alphas[i]
        row = f.values[i]
        for j in range(f.grid.n_beta):
            lines.append(f"{a:.17g},{betas[j]:.17g},{row[j]:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_field_csv(path: str | Path) -> ScalarField:
    """Inverse of :func:`write_field_csv`; the grid comes from the header line."""
    text = Path(path).read_text().strip().splitlines()
    if not text or not text[0].startswith(_GRID_PREFIX):
        raise ValueError(f"{path}: missing grid header line")
    header: dict[str, float] = {}
    for item in text[0][len(_GRID_PREFIX) :].split(","):
        key, _, raw = item.partition("=")
        header[key.strip()] = float(raw)
    grid = Grid2D(
        n_alpha=int(header["n_alpha"]),
        n_beta=int(header["n_beta"]),
        alpha0=header["alpha0"],
        beta0=header["beta0"],
        h_alpha=header["h_alpha"],
        h_beta=header["h_beta"],
    )
    if text[1].strip() != "alpha,beta,value":
        raise ValueError(f"{path}: expected 'alpha,beta,value' header")
    rows = text[2:]
    if len(rows) != grid.n_alpha * grid.n_beta:
        raise ValueError(f"{path}: expected {grid.n_alpha * grid.n_beta} rows, got {len(rows)}")
    values = np.array([float(r.split(",")[2]) for r in rows])
    return ScalarField(grid, values.reshape(grid.shape))
