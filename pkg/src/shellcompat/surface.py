"""Curvature-line surface data and the Gauss-Mainardi-Codazzi residuals.

A surface parametrized along its curvature lines is described here by six
scalar fields: the metric coefficients ``A1, A2`` of the diagonal first
fundamental form, the rotation coefficients ``p, q`` defined through
``(A1)_beta = p A2`` and ``(A2)_alpha = q A1``, and the normal-derivative
coefficients ``Hc, Kc`` defined through ``N_alpha = Hc e1``,
``N_beta = Kc e2``.

Sign convention (used consistently everywhere): ``Hc = -kappa1 * A1 =
A1 / R1`` and ``Kc = -kappa2 * A2 = A2 / R2``, so the principal curvatures
are ``kappa_i = -1 / R_i``.  On the unit sphere with outward normal this
gives kappa1 = kappa2 = -1, which is opposite to several textbooks.

The six fields of an actual surface satisfy the Gauss-Mainardi-Codazzi
(GMC) system,

    p_beta + q_alpha + Hc * Kc = 0
    (Hc)_beta = p * Kc
    (Kc)_alpha = q * Hc

and :func:`gmc_residuals` measures the discrete defect of that system.

The catalog provides analytic test surfaces (plane, sphere, catenoid,
pseudospherical kink chart, constant-mean-curvature profile).  Catalog
entries keep closed-form closures next to the sampled fields so tests can
separate discretization error from modeling error; where the embedding is
known in closed form (plane, sphere, catenoid) exact positions and frames
are attached as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .grid import (
    Grid2D,
    ScalarField,
    constant_field,
    diff_alpha,
    diff_beta,
    field_from_function,
    read_field_csv,
    write_field_csv,
)

__all__ = [
    "AnalyticSurface",
    "SurfaceGeometry",
    "CurvatureSet",
    "derive_pq",
    "gmc_residuals",
    "curvatures",
    "make_catalog_surface",
    "with_scaled_hc",
    "save_geometry_bundle",
    "load_geometry_bundle",
    "CATALOG_NAMES",
    "BUNDLE_FIELDS",
]

BUNDLE_FIELDS = ("A1", "A2", "p", "q", "Hc", "Kc")

Closure = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class AnalyticSurface:
    """Closed-form closures backing a catalog surface.

    All callables broadcast over (alpha, beta) arrays.  ``position`` returns
    shape (..., 3); ``frame`` returns shape (..., 3, 3) with columns
    (e1, e2, N).  Either may be None when the embedding has no convenient
    closed form.
    """

    A1: Closure
    A2: Closure
    p: Closure
    q: Closure
    Hc: Closure
    Kc: Closure
    position: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    frame: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None


@dataclass(frozen=True)
class SurfaceGeometry:
    """The six curvature-line coefficient fields, plus optional closures."""

    A1: ScalarField
    A2: ScalarField
    p: ScalarField
    q: ScalarField
    Hc: ScalarField
    Kc: ScalarField
    analytic: AnalyticSurface | None = None

    def __post_init__(self) -> None:
        g = self.A1.grid
        for name in ("A2", "p", "q", "Hc", "Kc"):
            if getattr(self, name).grid != g:
                raise ValueError("geometry fields live on different grids")
        if np.any(self.A1.values <= 0) or np.any(self.A2.values <= 0):
            raise ValueError("metric coefficients A1, A2 must be positive everywhere")

    @property
    def grid(self) -> Grid2D:
        return self.A1.grid

    def kappa1(self) -> ScalarField:
        return -(self.Hc / self.A1)

    def kappa2(self) -> ScalarField:
        return -(self.Kc / self.A2)

    def analytic_positions(self) -> np.ndarray | None:
        """Exact positions sampled on the grid, shape (n_alpha, n_beta, 3)."""
        if self.analytic is None or self.analytic.position is None:
            return None
        A, B = self.grid.meshgrid()
        return self.analytic.position(A, B)

    def analytic_frames(self) -> np.ndarray | None:
        """Exact frames sampled on the grid, shape (n_alpha, n_beta, 3, 3)."""
        if self.analytic is None or self.analytic.frame is None:
            return None
        A, B = self.grid.meshgrid()
        return self.analytic.frame(A, B)


@dataclass(frozen=True)
class CurvatureSet:
    """Principal curvatures, radii, and mean/Gauss curvature of a geometry.

    The radii are -1/kappa and carry infinities on flat regions; internal
    computations always use the curvatures instead.
    """

    kappa1: ScalarField
    kappa2: ScalarField
    meanH: ScalarField
    gaussK: ScalarField
    R1: ScalarField
    R2: ScalarField


def derive_pq(A1: ScalarField, A2: ScalarField) -> tuple[ScalarField, ScalarField]:
    """Rotation coefficients from the metric: p = (A1)_beta / A2, q = (A2)_alpha / A1."""
    if np.any(A1.values <= 0) or np.any(A2.values <= 0):
        raise ValueError("A1 and A2 must be positive")
    return diff_beta(A1) / A2, diff_alpha(A2) / A1


def gmc_residuals(geom: SurfaceGeometry) -> tuple[ScalarField, ScalarField, ScalarField]:
    """Discrete defect of the GMC system: (gauss, codazzi1, codazzi2)."""
    gauss = diff_beta(geom.p) + diff_alpha(geom.q) + geom.Hc * geom.Kc
    codazzi1 = diff_beta(geom.Hc) - geom.p * geom.Kc
    codazzi2 = diff_alpha(geom.Kc) - geom.q * geom.Hc
    return gauss, codazzi1, codazzi2


def curvatures(geom: SurfaceGeometry) -> CurvatureSet:
    k1 = geom.kappa1()
    k2 = geom.kappa2()
    with np.errstate(divide="ignore"):
        r1 = np.where(k1.values != 0, -1.0 / k1.values, np.inf)
        r2 = np.where(k2.values != 0, -1.0 / k2.values, np.inf)
    return CurvatureSet(
        kappa1=k1,
        kappa2=k2,
        meanH=(k1 + k2) * 0.5,
        gaussK=k1 * k2,
        R1=ScalarField(geom.grid, r1, allow_nonfinite=True),
        R2=ScalarField(geom.grid, r2, allow_nonfinite=True),
    )


# -- catalog ----------------------------------------------------------------

CATALOG_NAMES = ("plane", "sphere", "catenoid", "pseudosphere_kink", "cmc_profile")

# chart-regularity margin for the pseudospherical chart: cos(u), sin(u) and
# the tan/cot factors in derived strains all degenerate at u in {0, pi/2}
PSEUDOSPHERE_U_MARGIN = 0.05

_ZERO = lambda A, B: np.zeros_like(A)  # noqa: E731
_ONE = lambda A, B: np.ones_like(A)  # noqa: E731


def _geometry_from_closures(grid: Grid2D, closures: AnalyticSurface) -> SurfaceGeometry:
    return SurfaceGeometry(
        A1=field_from_function(grid, closures.A1),
        A2=field_from_function(grid, closures.A2),
        p=field_from_function(grid, closures.p),
        q=field_from_function(grid, closures.q),
        Hc=field_from_function(grid, closures.Hc),
        Kc=field_from_function(grid, closures.Kc),
        analytic=closures,
    )


def _plane(grid: Grid2D) -> SurfaceGeometry:
    def position(A, B):
        return np.stack([A, B, np.zeros_like(A)], axis=-1)

    def frame(A, B):
        eye = np.eye(3)
        return np.broadcast_to(eye, A.shape + (3, 3)).copy()

    closures = AnalyticSurface(
        A1=_ONE, A2=_ONE, p=_ZERO, q=_ZERO, Hc=_ZERO, Kc=_ZERO,
        position=position, frame=frame,
    )
    return _geometry_from_closures(grid, closures)


def _sphere(grid: Grid2D, radius: float) -> SurfaceGeometry:
    """Sphere of given radius, alpha = polar angle, beta = azimuth.

    A1 = R, A2 = R sin(alpha), Hc = 1, Kc = sin(alpha), q = cos(alpha).
    """
    if radius <= 0:
        raise ValueError("sphere radius must be positive")
    R = float(radius)

    def position(A, B):
        return R * np.stack(
            [np.sin(A) * np.cos(B), np.sin(A) * np.sin(B), np.cos(A)], axis=-1
        )

    def frame(A, B):
        e1 = np.stack([np.cos(A) * np.cos(B), np.cos(A) * np.sin(B), -np.sin(A)], axis=-1)
        e2 = np.stack([-np.sin(B), np.cos(B), np.zeros_like(A)], axis=-1)
        n = np.stack([np.sin(A) * np.cos(B), np.sin(A) * np.sin(B), np.cos(A)], axis=-1)
        return np.stack([e1, e2, n], axis=-1)

    closures = AnalyticSurface(
        A1=lambda A, B: np.full_like(A, R),
        A2=lambda A, B: R * np.sin(A),
        p=_ZERO,
        q=lambda A, B: np.cos(A),
        Hc=_ONE,
        Kc=lambda A, B: np.sin(A),
        position=position,
        frame=frame,
    )
    return _geometry_from_closures(grid, closures)


def _catenoid(grid: Grid2D) -> SurfaceGeometry:
    """Catenoid in conformal curvature-line coordinates.

    r = (cosh a cos b, cosh a sin b, a); A1 = A2 = cosh a, Hc = sech a,
    Kc = -sech a, q = tanh a.  A minimal surface: kappa1 = -kappa2.
    """

    def position(A, B):
        return np.stack([np.cosh(A) * np.cos(B), np.cosh(A) * np.sin(B), A], axis=-1)

    def frame(A, B):
        t, s = np.tanh(A), 1.0 / np.cosh(A)
        e1 = np.stack([t * np.cos(B), t * np.sin(B), s], axis=-1)
        e2 = np.stack([-np.sin(B), np.cos(B), np.zeros_like(A)], axis=-1)
        n = np.stack([-s * np.cos(B), -s * np.sin(B), t], axis=-1)
        return np.stack([e1, e2, n], axis=-1)

    closures = AnalyticSurface(
        A1=lambda A, B: np.cosh(A),
        A2=lambda A, B: np.cosh(A),
        p=_ZERO,
        q=lambda A, B: np.tanh(A),
        Hc=lambda A, B: 1.0 / np.cosh(A),
        Kc=lambda A, B: -1.0 / np.cosh(A),
        position=position,
        frame=frame,
    )
    return _geometry_from_closures(grid, closures)


def _kink_angle(X: np.ndarray, rho: float) -> np.ndarray:
    """Kink profile u = 2 arctan(exp(x / rho)); sin u = sech(x/rho), cos u = -tanh(x/rho)."""
    return 2.0 * np.arctan(np.exp(X / rho))


def _check_pseudosphere_margin(u: np.ndarray) -> None:
    lo, hi = PSEUDOSPHERE_U_MARGIN, np.pi / 2 - PSEUDOSPHERE_U_MARGIN
    if np.min(u) < lo or np.max(u) > hi:
        raise ValueError(
            f"pseudospherical chart angle must stay within [{lo:.3g}, {hi:.3g}], "
            f"got [{np.min(u):.3g}, {np.max(u):.3g}]"
        )


def _pseudosphere_kink(grid: Grid2D, rho: float) -> SurfaceGeometry:
    """Constant negative Gaussian curvature -1/rho^2 carried by a kink profile.

    A1 = cos u, A2 = sin u, Hc = -(sin u)/rho, Kc = (cos u)/rho with
    u = 2 arctan(exp(x/rho)); x < 0 keeps u below pi/2 so both metric
    coefficients stay positive.  No closed-form embedding is attached.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    _check_pseudosphere_margin(_kink_angle(grid.alphas, rho))

    closures = AnalyticSurface(
        A1=lambda A, B: np.cos(_kink_angle(A, rho)),
        A2=lambda A, B: np.sin(_kink_angle(A, rho)),
        p=_ZERO,
        q=lambda A, B: (1.0 / rho) / np.cosh(A / rho),
        Hc=lambda A, B: -np.sin(_kink_angle(A, rho)) / rho,
        Kc=lambda A, B: np.cos(_kink_angle(A, rho)) / rho,
    )
    return _geometry_from_closures(grid, closures)


def _cmc_profile(grid: Grid2D, mean_h: float, first_integral: float | None) -> SurfaceGeometry:
    """Constant-mean-curvature geometry from the 1D profile equation.

    A1 = A2 = exp(u), Hc = -2 H sinh(u), Kc = -2 H cosh(u) with u(alpha)
    integrated from u'' = -2 H^2 sinh(2u); q = u_alpha, p = 0.
    """
    from .integrable import cmc_profile_ode  # deferred: integrable imports this module

    profile = cmc_profile_ode(
        mean_h=mean_h, first_integral=first_integral, alphas=grid.alphas
    )
    u = profile.u[:, None] * np.ones((1, grid.n_beta))
    du = profile.du[:, None] * np.ones((1, grid.n_beta))
    eu = np.exp(u)
    return SurfaceGeometry(
        A1=ScalarField(grid, eu),
        A2=ScalarField(grid, eu),
        p=constant_field(grid, 0.0),
        q=ScalarField(grid, du),
        Hc=ScalarField(grid, -2.0 * mean_h * np.sinh(u)),
        Kc=ScalarField(grid, -2.0 * mean_h * np.cosh(u)),
    )


_DEFAULT_RANGES: dict[str, tuple[tuple[float, float], tuple[float, float]]] = {
    "plane": ((0.0, 1.0), (0.0, 1.0)),
    "sphere": ((np.pi / 6, 5 * np.pi / 6), (0.0, 2 * np.pi / 3)),
    "catenoid": ((-1.0, 1.0), (-1.0, 1.0)),
    "pseudosphere_kink": ((-3.0, -0.4), (-1.0, 1.0)),
    "cmc_profile": ((0.0, 2.0), (0.0, 2.0)),
}


def make_catalog_surface(
    name: str,
    n_alpha: int,
    n_beta: int | None = None,
    *,
    alpha_range: tuple[float, float] | None = None,
    beta_range: tuple[float, float] | None = None,
    radius: float = 1.0,
    rho: float = 1.0,
    mean_h: float = 0.5,
    first_integral: float | None = None,
    hc_scale: float = 1.0,
) -> SurfaceGeometry:
    """Build a named analytic test surface on an ``n_alpha x n_beta`` grid.

    Ranges default to chart-safe windows per surface.  ``hc_scale`` scales
    the normal-derivative coefficient Hc (including its closure) and is the
    standard way to manufacture a GMC-violating geometry.
    """
    if name not in CATALOG_NAMES:
        raise ValueError(f"unknown catalog surface {name!r}; choose from {CATALOG_NAMES}")
    if n_beta is None:
        n_beta = n_alpha
    ar, br = _DEFAULT_RANGES[name]
    grid = Grid2D.from_ranges(alpha_range or ar, beta_range or br, n_alpha, n_beta)

    if name == "plane":
        geom = _plane(grid)
    elif name == "sphere":
        geom = _sphere(grid, radius)
    elif name == "catenoid":
        geom = _catenoid(grid)
    elif name == "pseudosphere_kink":
        geom = _pseudosphere_kink(grid, rho)
    else:
        geom = _cmc_profile(grid, mean_h, first_integral)

    if hc_scale != 1.0:
        geom = with_scaled_hc(geom, hc_scale)
    return geom


def save_geometry_bundle(geom: SurfaceGeometry, directory: str | Path) -> Path:
    """Write the six coefficient fields as one CSV file each (grid header included)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in BUNDLE_FIELDS:
        write_field_csv(getattr(geom, name), directory / f"{name}.csv")
    return directory


def load_geometry_bundle(directory: str | Path) -> SurfaceGeometry:
    """Read a geometry written by :func:`save_geometry_bundle` (no closures)."""
    directory = Path(directory)
    fields = {name: read_field_csv(directory / f"{name}.csv") for name in BUNDLE_FIELDS}
    return SurfaceGeometry(**fields)


def with_scaled_hc(geom: SurfaceGeometry, factor: float) -> SurfaceGeometry:
    """Scale Hc (field and closure) by ``factor``; breaks GMC when factor != 1.

    The position/frame closures are kept: they describe the surface the data
    came from, and the point of the control is that no surface matches the
    scaled coefficients.
    """
    analytic = geom.analytic
    if analytic is not None:
        base_hc = analytic.Hc
        analytic = AnalyticSurface(
            A1=analytic.A1,
            A2=analytic.A2,
            p=analytic.p,
            q=analytic.q,
            Hc=lambda A, B: factor * base_hc(A, B),
            Kc=analytic.Kc,
            position=analytic.position,
            frame=analytic.frame,
        )
    return SurfaceGeometry(
        A1=geom.A1,
        A2=geom.A2,
        p=geom.p,
        q=geom.q,
        Hc=geom.Hc * factor,
        Kc=geom.Kc,
        analytic=analytic,
    )
