"""Soliton-equation seeds, their linearizations, and symmetry-built strains.

Three classes of curvature-line geometry are governed by a single scalar
function u whose Gauss equation is a classical integrable PDE:

- minimal surfaces (conformal coordinates, A1 = A2 = e^u):
      Liouville equation        u_aa + u_bb = exp(-2u)
- constant mean curvature H != 0 (A1 = A2 = e^u):
      elliptic sinh-Gordon      u_aa + u_bb + 4 H^2 sinh(u) cosh(u) = 0
- constant Gaussian curvature -1/rho^2 (A1 = cos u, A2 = sin u):
      sine-Gordon               u_xx - u_yy = (1/rho^2) sin(u) cos(u)

A *symmetry* S of such an equation is a solution of its linearization at u
(the first-order perturbation equation of u -> u + eps S).  For each class,
a symmetry generates strain fields with no shear and no twist that satisfy
the shell compatibility conditions; :func:`strains_from_symmetry` applies
the per-class formulas, and :func:`strains_from_generic_symmetry` the
coefficient-level ones that work directly from the perturbations of
(A1, A2, kappa1, kappa2).

Symmetries come from three sources: closed forms in the seed catalog
(translation symmetries S = u_x), the Dirichlet solver
:func:`solve_linearized_elliptic` for the two elliptic linearizations, and
user-supplied fields.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .grid import (
    Grid2D,
    ScalarField,
    constant_field,
    diff2_alpha,
    diff2_beta,
    field_norms,
)
from .strain import StrainState, pq_strain_form
from .surface import (
    PSEUDOSPHERE_U_MARGIN,
    SurfaceGeometry,
    derive_pq,
)

__all__ = [
    "SEED_CLASSES",
    "IntegrableSeed",
    "SymmetryField",
    "CmcProfile",
    "cmc_profile_ode",
    "pde_residual",
    "linearized_residual",
    "geometry_from_seed",
    "strains_from_symmetry",
    "symmetry_components",
    "strains_from_generic_symmetry",
    "solve_linearized_elliptic",
    "ConditioningError",
    "log_cosh_wave_symmetry",
    "seed_catalog",
    "SEED_CATALOG_NAMES",
]

SEED_CLASSES = ("minimal", "cmc", "pseudospherical")
SEED_CATALOG_NAMES = ("catenoid_log_cosh", "sg_kink", "cmc_ode_profile")

FIRST_INTEGRAL_TOL = 1e-8
CONDITION_LIMIT = 1e12


class ConditioningError(RuntimeError):
    """The discrete linearized operator is numerically near-singular."""


@dataclass(frozen=True)
class IntegrableSeed:
    """A solution sample of one of the three governing equations.

    ``rho`` is required for the pseudospherical class (curvature radius
    scale), ``mean_h`` for the cmc class.  Pseudospherical seeds must keep
    the chart angle u inside (0, pi/2) with a margin, otherwise the metric
    coefficients cos(u), sin(u) degenerate.
    """

    klass: str
    u: ScalarField
    rho: float | None = None
    mean_h: float | None = None
    note: str = ""

    def __post_init__(self) -> None:
        if self.klass not in SEED_CLASSES:
            raise ValueError(f"unknown seed class {self.klass!r}; choose from {SEED_CLASSES}")
        if self.klass == "pseudospherical":
            if self.rho is None or self.rho <= 0:
                raise ValueError("pseudospherical seeds need rho > 0")
            lo = PSEUDOSPHERE_U_MARGIN
            hi = math.pi / 2 - PSEUDOSPHERE_U_MARGIN
            umin, umax = float(np.min(self.u.values)), float(np.max(self.u.values))
            if umin < lo or umax > hi:
                raise ValueError(
                    f"pseudospherical seed angle must stay within [{lo:.3g}, {hi:.3g}], "
                    f"got [{umin:.3g}, {umax:.3g}]"
                )
        if self.klass == "cmc" and (self.mean_h is None or self.mean_h == 0):
            raise ValueError("cmc seeds need a nonzero mean curvature")

    @property
    def grid(self) -> Grid2D:
        return self.u.grid


@dataclass(frozen=True)
class SymmetryField:
    """A symmetry S, optionally with the induced coefficient perturbations."""

    S: ScalarField
    S_A1: ScalarField | None = None
    S_A2: ScalarField | None = None
    S_kappa1: ScalarField | None = None
    S_kappa2: ScalarField | None = None

    def __post_init__(self) -> None:
        for name in ("S_A1", "S_A2", "S_kappa1", "S_kappa2"):
            f = getattr(self, name)
            if f is not None and f.grid != self.S.grid:
                raise ValueError("symmetry component fields live on different grids")

    @property
    def grid(self) -> Grid2D:
        return self.S.grid


# -- governing equations ------------------------------------------------------


def pde_residual(seed: IntegrableSeed) -> ScalarField:
    """Discrete defect of the seed's governing equation."""
    u = seed.u
    if seed.klass == "minimal":
        return diff2_alpha(u) + diff2_beta(u) - u.apply(lambda x: np.exp(-2.0 * x))
    if seed.klass == "cmc":
        h = seed.mean_h
        return diff2_alpha(u) + diff2_beta(u) + (4.0 * h * h) * u.apply(
            lambda x: np.sinh(x) * np.cosh(x)
        )
    rho2 = seed.rho * seed.rho
    return diff2_alpha(u) - diff2_beta(u) - u.apply(lambda x: np.sin(x) * np.cos(x)) / rho2


def _linearized_potential(seed: IntegrableSeed) -> ScalarField:
    """c(alpha, beta) such that the linearization is S_aa +/- S_bb + c S = 0."""
    u = seed.u
    if seed.klass == "minimal":
        return 2.0 * u.apply(lambda x: np.exp(-2.0 * x))
    if seed.klass == "cmc":
        return (4.0 * seed.mean_h**2) * u.apply(lambda x: np.cosh(2.0 * x))
    return -u.apply(lambda x: np.cos(2.0 * x)) / (seed.rho * seed.rho)


def linearized_residual(seed: IntegrableSeed, S: ScalarField) -> ScalarField:
    """Discrete defect of the linearized equation at the seed, applied to S."""
    if S.grid != seed.grid:
        raise ValueError("symmetry candidate lives on a different grid than the seed")
    c = _linearized_potential(seed)
    if seed.klass == "pseudospherical":
        return diff2_alpha(S) - diff2_beta(S) + c * S
    return diff2_alpha(S) + diff2_beta(S) + c * S


# -- geometry and strains -----------------------------------------------------


def geometry_from_seed(seed: IntegrableSeed) -> SurfaceGeometry:
    """Curvature-line coefficients of the surface the seed describes.

    The Gauss equation of the result is the seed's governing equation, and
    the Codazzi pair holds identically for these coefficient shapes, so the
    GMC residual of the output converges at truncation order for a valid
    seed.  Rotation coefficients come from the metric by finite differences.
    """
    u = seed.u.values
    grid = seed.grid
    if seed.klass == "minimal":
        eu = np.exp(u)
        a1 = a2 = ScalarField(grid, eu)
        hc = ScalarField(grid, np.exp(-u))
        kc = ScalarField(grid, -np.exp(-u))
    elif seed.klass == "cmc":
        eu = np.exp(u)
        a1 = a2 = ScalarField(grid, eu)
        hc = ScalarField(grid, -2.0 * seed.mean_h * np.sinh(u))
        kc = ScalarField(grid, -2.0 * seed.mean_h * np.cosh(u))
    else:
        a1 = ScalarField(grid, np.cos(u))
        a2 = ScalarField(grid, np.sin(u))
        hc = ScalarField(grid, -np.sin(u) / seed.rho)
        kc = ScalarField(grid, np.cos(u) / seed.rho)
    p, q = derive_pq(a1, a2)
    return SurfaceGeometry(A1=a1, A2=a2, p=p, q=q, Hc=hc, Kc=kc)


def _class_strains(
    seed: IntegrableSeed, S: ScalarField
) -> tuple[ScalarField, ScalarField, ScalarField, ScalarField]:
    """(eps1, eps2, k1, k2) of the shear-free, twist-free deformation."""
    u = seed.u.values
    g = seed.grid
    sv = S.values
    if seed.klass == "minimal":
        em2u = np.exp(-2.0 * u)
        return (
            S,
            S,
            ScalarField(g, sv * em2u),
            ScalarField(g, -sv * em2u),
        )
    if seed.klass == "cmc":
        h = seed.mean_h
        emu = np.exp(-u)
        return (
            S,
            S,
            ScalarField(g, 2.0 * h * sv * emu * np.cosh(u)),
            ScalarField(g, 2.0 * h * sv * emu * np.sinh(u)),
        )
    k = ScalarField(g, sv / seed.rho)
    return (
        ScalarField(g, -sv * np.tan(u)),
        ScalarField(g, sv / np.tan(u)),
        k,
        k,
    )


def strains_from_symmetry(
    seed: IntegrableSeed,
    S: ScalarField,
    geom: SurfaceGeometry | None = None,
    warn_threshold: float = 1e-2,
) -> StrainState:
    """Strain state of the deformation generated by a symmetry S.

    The construction assumes no shear and no twist: om, om1, om2, tau and
    the deflection angles are set identically to zero, the normal and
    bending strains follow the per-class formulas, and P, Q, Hp, Kp are
    derived from the strains.  If S fails the linearized equation beyond
    ``warn_threshold`` (interior max), a warning is emitted; the returned
    strains then violate compatibility by a matching O(1) amount, which is
    the standard negative control.
    """
    if geom is None:
        geom = geometry_from_seed(seed)
    lin = field_norms(linearized_residual(seed, S), trim=2)
    if lin.linf > warn_threshold:
        warnings.warn(
            f"candidate S fails the linearized equation (interior max "
            f"{lin.linf:.3g}); derived strains will not be compatible",
            stacklevel=2,
        )
    eps1, eps2, k1, k2 = _class_strains(seed, S)
    zero = constant_field(seed.grid, 0.0)
    P, Q = pq_strain_form(geom, eps1, eps2, zero)
    return StrainState(
        grid=seed.grid,
        eps1=eps1,
        eps2=eps2,
        om=zero,
        om1=zero,
        om2=zero,
        theta=zero,
        psi=zero,
        k1=k1,
        k2=k2,
        tau=zero,
        P=P,
        Q=Q,
        Hp=-(k1 * geom.A1),
        Kp=-(k2 * geom.A2),
    )


def symmetry_components(seed: IntegrableSeed, S: ScalarField) -> SymmetryField:
    """Coefficient perturbations induced by S: the derivative of each of
    (A1, A2, kappa1, kappa2) with respect to u in the direction S."""
    u = seed.u.values
    g = seed.grid
    sv = S.values
    if seed.klass == "minimal":
        seu = sv * np.exp(u)
        sm = ScalarField(g, 2.0 * sv * np.exp(-2.0 * u))
        return SymmetryField(
            S=S,
            S_A1=ScalarField(g, seu),
            S_A2=ScalarField(g, seu),
            S_kappa1=sm,
            S_kappa2=-sm,
        )
    if seed.klass == "cmc":
        h = seed.mean_h
        seu = sv * np.exp(u)
        sm = ScalarField(g, 2.0 * h * sv * np.exp(-2.0 * u))
        return SymmetryField(
            S=S,
            S_A1=ScalarField(g, seu),
            S_A2=ScalarField(g, seu),
            S_kappa1=sm,
            S_kappa2=-sm,
        )
    rho = seed.rho
    return SymmetryField(
        S=S,
        S_A1=ScalarField(g, -sv * np.sin(u)),
        S_A2=ScalarField(g, sv * np.cos(u)),
        S_kappa1=ScalarField(g, sv / (rho * np.cos(u) ** 2)),
        S_kappa2=ScalarField(g, sv / (rho * np.sin(u) ** 2)),
    )


def strains_from_generic_symmetry(
    geom: SurfaceGeometry, sym: SymmetryField
) -> tuple[ScalarField, ScalarField, ScalarField, ScalarField]:
    """Strains from coefficient perturbations, independent of the seed class:

        eps_i = S_Ai / Ai,   k_i = S_kappai + (S_Ai / Ai) kappa_i.
    """
    if sym.S_A1 is None or sym.S_A2 is None or sym.S_kappa1 is None or sym.S_kappa2 is None:
        raise ValueError("generic construction needs all four coefficient perturbations")
    if sym.grid != geom.grid:
        raise ValueError("symmetry and geometry live on different grids")
    eps1 = sym.S_A1 / geom.A1
    eps2 = sym.S_A2 / geom.A2
    k1 = sym.S_kappa1 + eps1 * geom.kappa1()
    k2 = sym.S_kappa2 + eps2 * geom.kappa2()
    return eps1, eps2, k1, k2


# -- manufactured symmetries: Dirichlet solve of the elliptic linearization ---


def solve_linearized_elliptic(
    seed: IntegrableSeed,
    boundary_values: ScalarField,
    condition_limit: float = CONDITION_LIMIT,
) -> SymmetryField:
    """Solve S_aa + S_bb + c S = 0 with Dirichlet data on the grid boundary.

    Applies to the two elliptic linearizations (minimal and cmc classes);
    sine-Gordon symmetries come only from closed forms.  The interior is the
    standard 5-point discretization, factorized directly (sparse LU).  The
    potential c is positive, so definiteness is not guaranteed; a one-norm
    condition estimate above ``condition_limit`` raises
    :class:`ConditioningError` instead of returning garbage.

    ``boundary_values`` supplies the Dirichlet data on its boundary ring;
    its interior values are ignored.
    """
    if seed.klass not in ("minimal", "cmc"):
        raise ValueError("the Dirichlet solver covers only the elliptic linearizations")
    if boundary_values.grid != seed.grid:
        raise ValueError("boundary data lives on a different grid than the seed")

    g = seed.grid
    na, nb = g.shape
    c = _linearized_potential(seed).values
    bc = boundary_values.values
    mi, mj = na - 2, nb - 2
    n_unknown = mi * mj
    inv_ha2 = 1.0 / g.h_alpha**2
    inv_hb2 = 1.0 / g.h_beta**2

    def index(i: int, j: int) -> int:
        return (i - 1) * mj + (j - 1)

    main = -2.0 * (inv_ha2 + inv_hb2) + c[1:-1, 1:-1]
    a_mat = sp.lil_matrix((n_unknown, n_unknown))
    rhs = np.zeros(n_unknown)
    for i in range(1, na - 1):
        for j in range(1, nb - 1):
            k = index(i, j)
            a_mat[k, k] = main[i - 1, j - 1]
            for di, dj, coef in ((-1, 0, inv_ha2), (1, 0, inv_ha2), (0, -1, inv_hb2), (0, 1, inv_hb2)):
                ii, jj = i + di, j + dj
                if 1 <= ii <= na - 2 and 1 <= jj <= nb - 2:
                    a_mat[k, index(ii, jj)] = coef
                else:
                    rhs[k] -= coef * bc[ii, jj]
    a_csc = a_mat.tocsc()

    lu = spla.splu(a_csc)
    norm_a = spla.onenormest(a_csc)
    inv_op = spla.LinearOperator(
        (n_unknown, n_unknown), matvec=lu.solve, rmatvec=lambda x: lu.solve(x, trans="T")
    )
    norm_inv = spla.onenormest(inv_op)
    cond = norm_a * norm_inv
    if cond > condition_limit:
        raise ConditioningError(
            f"linearized operator condition estimate {cond:.3g} exceeds "
            f"{condition_limit:.3g}; the potential is resonant with the domain"
        )

    solution = bc.copy()
    solution[1:-1, 1:-1] = lu.solve(rhs).reshape(mi, mj)
    return SymmetryField(S=ScalarField(g, solution))


# -- seed catalog --------------------------------------------------------------


@dataclass(frozen=True)
class CmcProfile:
    """1D profile u(alpha) of the cmc class with its conserved quantity.

    Integrates u'' = -2 H^2 sinh(2u) from u = 0, u' = sqrt(C - 2 H^2) at the
    left end with classical RK4, landing exactly on the requested sample
    points.  ``drift`` is the worst deviation of the first integral
    (u')^2 + 2 H^2 cosh(2u) from C over all substeps.
    """

    alphas: np.ndarray
    u: np.ndarray
    du: np.ndarray
    first_integral: float
    drift: float
    step: float


def cmc_profile_ode(
    mean_h: float,
    first_integral: float | None,
    alphas: np.ndarray,
    max_step: float = 1e-3,
) -> CmcProfile:
    if mean_h == 0:
        raise ValueError("cmc profile needs a nonzero mean curvature")
    h2 = 2.0 * mean_h * mean_h
    c_val = first_integral if first_integral is not None else h2 * (math.cosh(0.2) + 1e-3)
    if c_val <= h2:
        raise ValueError(
            f"first integral must exceed 2 H^2 = {h2:.6g} for a real profile through u = 0"
        )
    alphas = np.asarray(alphas, dtype=float)
    if alphas.ndim != 1 or alphas.size < 2 or np.any(np.diff(alphas) <= 0):
        raise ValueError("sample points must be increasing")

    def rhs(y: np.ndarray) -> np.ndarray:
        return np.array([y[1], -h2 * math.sinh(2.0 * y[0])])

    y = np.array([0.0, math.sqrt(c_val - h2)])
    us = np.empty_like(alphas)
    dus = np.empty_like(alphas)
    us[0], dus[0] = y[0], y[1]
    drift = abs(y[1] ** 2 + h2 * math.cosh(2.0 * y[0]) - c_val)
    step_used = 0.0
    for k in range(alphas.size - 1):
        span = alphas[k + 1] - alphas[k]
        m = max(1, math.ceil(span / max_step))
        dt = span / m
        step_used = max(step_used, dt)
        for _ in range(m):
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * dt * k1)
            k3 = rhs(y + 0.5 * dt * k2)
            k4 = rhs(y + dt * k3)
            y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            drift = max(drift, abs(y[1] ** 2 + h2 * math.cosh(2.0 * y[0]) - c_val))
        us[k + 1], dus[k + 1] = y[0], y[1]
    if drift > FIRST_INTEGRAL_TOL:
        raise ValueError(
            f"first-integral drift {drift:.3g} exceeds {FIRST_INTEGRAL_TOL:.1g}; "
            f"reduce the step"
        )
    return CmcProfile(
        alphas=alphas, u=us, du=dus, first_integral=c_val, drift=drift, step=step_used
    )


def log_cosh_wave_symmetry(grid: Grid2D, k: float = 1.0) -> ScalarField:
    """A genuinely two-dimensional symmetry of the log-cosh seed.

    S = exp(k a) (k - tanh a) cos(k b) satisfies the linearized Liouville
    equation at u = log(cosh a) exactly: the alpha factor solves
    f'' + 2 sech^2(a) f = k^2 f, which the cos(k b) factor cancels.  Useful
    as corner-compatible Dirichlet data for manufactured-solution tests that
    exercise both directions.
    """
    A, B = grid.meshgrid()
    return ScalarField(grid, np.exp(k * A) * (k - np.tanh(A)) * np.cos(k * B))


_SEED_RANGES = {
    "catenoid_log_cosh": ((-1.0, 1.0), (-1.0, 1.0)),
    "sg_kink": ((-3.0, -0.4), (-1.0, 1.0)),
    "cmc_ode_profile": ((0.0, 2.0), (0.0, 2.0)),
}


def seed_catalog(
    name: str,
    n_alpha: int,
    n_beta: int | None = None,
    *,
    rho: float = 1.0,
    mean_h: float = 0.5,
    first_integral: float | None = None,
    alpha_range: tuple[float, float] | None = None,
    beta_range: tuple[float, float] | None = None,
) -> tuple[IntegrableSeed, SymmetryField | None]:
    """Exact seeds with their translation symmetries S = u_alpha.

    - ``catenoid_log_cosh``: u = log(cosh a), S = tanh(a)  (minimal class)
    - ``sg_kink``: u = 2 arctan(exp(x/rho)), S = sech(x/rho)/rho, x < 0
    - ``cmc_ode_profile``: u(a) from :func:`cmc_profile_ode`, S = u_a
    """
    if name not in SEED_CATALOG_NAMES:
        raise ValueError(f"unknown seed {name!r}; choose from {SEED_CATALOG_NAMES}")
    if n_beta is None:
        n_beta = n_alpha
    ar, br = _SEED_RANGES[name]
    grid = Grid2D.from_ranges(alpha_range or ar, beta_range or br, n_alpha, n_beta)
    A, _ = grid.meshgrid()

    if name == "catenoid_log_cosh":
        seed = IntegrableSeed(
            klass="minimal",
            u=ScalarField(grid, np.log(np.cosh(A))),
            note="log-cosh Liouville profile",
        )
        sym = SymmetryField(S=ScalarField(grid, np.tanh(A)))
        return seed, sym

    if name == "sg_kink":
        if grid.alphas[-1] >= 0:
            raise ValueError("the kink chart requires x < 0 (angle below pi/2)")
        seed = IntegrableSeed(
            klass="pseudospherical",
            u=ScalarField(grid, 2.0 * np.arctan(np.exp(A / rho))),
            rho=rho,
            note="static sine-Gordon kink",
        )
        sym = SymmetryField(S=ScalarField(grid, (1.0 / rho) / np.cosh(A / rho)))
        return seed, sym

    profile = cmc_profile_ode(mean_h=mean_h, first_integral=first_integral, alphas=grid.alphas)
    ones = np.ones((1, grid.n_beta))
    seed = IntegrableSeed(
        klass="cmc",
        u=ScalarField(grid, profile.u[:, None] * ones),
        mean_h=mean_h,
        note=f"sinh-Gordon profile, first integral {profile.first_integral:.6g}",
    )
    sym = SymmetryField(S=ScalarField(grid, profile.du[:, None] * ones))
    return seed, sym
