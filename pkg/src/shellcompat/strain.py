"""Linear shell kinematics: strain fields and their compatibility residuals.

A displacement of the middle surface, Delta = u e1 + v e2 + w N, produces
first-order strains through

    eps1  = (u_a + p v + Hc w) / A1      eps2  = (v_b + q u + Kc w) / A2
    om1   = (v_a - p u) / A1             om2   = (u_b - q v) / A2
    theta = (-w_a + Hc u) / A1           psi   = (-w_b + Kc v) / A2

(subscripts a, b denote alpha/beta derivatives).  eps1, eps2 are the normal
strains, om = om1 + om2 the shear strain, theta and psi the deflection
angles.  The bending strains are

    k1 = -(theta_a + p psi) / A1         k2 = -(psi_b + q theta) / A2
    tau = (psi_a - p theta) / A1 + om2 / R1
        = (theta_b - q psi) / A2 + om1 / R2   (the two agree identically)

Six strains (eps1, eps2, om, k1, k2, tau) determine a deformation only if
they satisfy three compatibility conditions, the thin-shell analogue of the
St. Venant conditions.  With the deformed-frame coefficients

    P = -((om1)_a + Hc psi) = ((A1 eps1)_b - (A2 om)_a - eps2 (A1)_b) / A2
    Q = -((om2)_b + Kc theta) = ((A2 eps2)_a - (A1 om)_b - eps1 (A2)_a) / A1
    Hp = -k1 A1,   Kp = -k2 A2

the conditions take the same shape as the GMC system of the base surface:

    P_b + Q_a + om_ab + Hp Kc + Hc Kp = 0
    (Hp)_b - (P Kc + p Kp) = (tau A2)_a + tau (A2)_a - om (Kc)_a
    (Kp)_a - (Q Hc + q Hp) = (tau A1)_b + tau (A1)_b - om (Hc)_b

:func:`goldenweizer_residuals` evaluates these three equations;
:func:`goldenweizer_matrix_residual` evaluates the equivalent matrix
identity L'_b - M'_a = [L', M] + [L, M'] built from the deformed-frame
increments of :func:`lm_prime_explicit` / :func:`lm_prime_commutator`; and
:func:`novozhilov_residuals` evaluates the classical regrouped forms.  All
derivatives are finite differences, so residuals of compatible strain
fields shrink at second order while incompatible fields leave an O(1)
defect.

Curvature radii never appear directly: 1/R_i is always evaluated as
-kappa_i so flat regions are valid input.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .frames import FrameField, VectorField3, gw_matrix_fields
from .grid import (
    Grid2D,
    ScalarField,
    _d1,
    diff_alpha,
    diff_beta,
)
from .surface import SurfaceGeometry

__all__ = [
    "DisplacementField",
    "StrainState",
    "LayerParams",
    "RigidMotion",
    "PQDiagnostics",
    "strains_from_displacement",
    "bending_strains",
    "pq_deformed",
    "pq_strain_form",
    "state_from_strain_fields",
    "rigid_displacement",
    "layer_strains",
    "lm_prime_commutator",
    "lm_prime_explicit",
    "goldenweizer_residuals",
    "goldenweizer_matrix_residual",
    "novozhilov_residuals",
    "tangential_compat_residuals",
    "deformation_consistency",
    "displacement_pipeline",
    "strain_scale",
]


@dataclass(frozen=True)
class DisplacementField:
    """Components of Delta = u e1 + v e2 + w N on a shared grid."""

    u: ScalarField
    v: ScalarField
    w: ScalarField

    def __post_init__(self) -> None:
        if self.v.grid != self.u.grid or self.w.grid != self.u.grid:
            raise ValueError("displacement components live on different grids")

    @property
    def grid(self) -> Grid2D:
        return self.u.grid


@dataclass(frozen=True)
class RigidMotion:
    """Infinitesimal rigid motion Delta = a + b x r (zero-strain oracle)."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.a, dtype=float).reshape(3)
        b = np.asarray(self.b, dtype=float).reshape(3)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("rigid motion parameters must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class LayerParams:
    """Normal offset z inside a shell of thickness delta."""

    z: float
    delta: float

    def __post_init__(self) -> None:
        if not self.delta > 0:
            raise ValueError("thickness must be positive")
        if not (-self.delta / 2 < self.z < self.delta / 2):
            raise ValueError("layer offset must satisfy -delta/2 < z < delta/2")


@dataclass(frozen=True)
class StrainState:
    """Strain fields of one deformation, filled in stages.

    ``strains_from_displacement`` fills the first seven fields;
    ``bending_strains`` adds (k1, k2, tau); ``pq_deformed`` adds
    (P, Q, Hp, Kp).  States built directly from six strain fields (symmetry
    constructions, strain-level checks) carry ``om1 = om2 = theta = psi =
    None`` unless those splits are genuinely known.
    """

    grid: Grid2D
    eps1: ScalarField
    eps2: ScalarField
    om: ScalarField
    om1: ScalarField | None = None
    om2: ScalarField | None = None
    theta: ScalarField | None = None
    psi: ScalarField | None = None
    k1: ScalarField | None = None
    k2: ScalarField | None = None
    tau: ScalarField | None = None
    P: ScalarField | None = None
    Q: ScalarField | None = None
    Hp: ScalarField | None = None
    Kp: ScalarField | None = None

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ValueError(f"strain state is missing fields: {missing}")


@dataclass(frozen=True)
class PQDiagnostics:
    """Differences between the equivalent expressions for P and Q.

    ``def_vs_strain``: defining form minus the strain-gradient form (the two
    sides of the tangential compatibility identities).  ``def_vs_grouped``:
    defining form minus the regrouped strain form used by the classical
    equations.  All four differences are O(h^2) for displacement-derived
    strains and stall when the strain fields are mutually inconsistent.
    """

    def_vs_strain: tuple[ScalarField, ScalarField]
    def_vs_grouped: tuple[ScalarField, ScalarField]


def _check_grids(geom: SurfaceGeometry, grid: Grid2D) -> None:
    if geom.grid != grid:
        raise ValueError("geometry and fields live on different grids")


def strains_from_displacement(geom: SurfaceGeometry, disp: DisplacementField) -> StrainState:
    """Tangential strain measures of a middle-surface displacement."""
    _check_grids(geom, disp.grid)
    u, v, w = disp.u, disp.v, disp.w
    a1, a2, p, q, hc, kc = geom.A1, geom.A2, geom.p, geom.q, geom.Hc, geom.Kc
    eps1 = (diff_alpha(u) + p * v + hc * w) / a1
    eps2 = (diff_beta(v) + q * u + kc * w) / a2
    om1 = (diff_alpha(v) - p * u) / a1
    om2 = (diff_beta(u) - q * v) / a2
    theta = (-diff_alpha(w) + hc * u) / a1
    psi = (-diff_beta(w) + kc * v) / a2
    return StrainState(
        grid=disp.grid,
        eps1=eps1,
        eps2=eps2,
        om=om1 + om2,
        om1=om1,
        om2=om2,
        theta=theta,
        psi=psi,
    )


def bending_strains(
    geom: SurfaceGeometry, state: StrainState
) -> tuple[StrainState, ScalarField]:
    """Fill (k1, k2, tau); also return the defect between the two tau formulas.

    The alpha formula is canonical; the beta formula feeds only the returned
    mismatch, which is an O(h^2) identity check for displacement-derived
    strains.  1/R_i is evaluated as -kappa_i throughout.
    """
    state.require("theta", "psi", "om1", "om2")
    _check_grids(geom, state.grid)
    a1, a2, p, q = geom.A1, geom.A2, geom.p, geom.q
    kap1, kap2 = geom.kappa1(), geom.kappa2()
    theta, psi = state.theta, state.psi

    k1 = -((diff_alpha(theta) + p * psi) / a1)
    k2 = -((diff_beta(psi) + q * theta) / a2)
    tau_a = (diff_alpha(psi) - p * theta) / a1 + (-kap1) * state.om2
    tau_b = (diff_beta(theta) - q * psi) / a2 + (-kap2) * state.om1
    new = dataclasses.replace(state, k1=k1, k2=k2, tau=tau_a)
    return new, tau_a - tau_b


def pq_strain_form(
    geom: SurfaceGeometry, eps1: ScalarField, eps2: ScalarField, om: ScalarField
) -> tuple[ScalarField, ScalarField]:
    """P and Q expressed through the strain fields alone.

    P = ((A1 eps1)_b - (A2 om)_a - eps2 (A1)_b) / A2 and the mirrored Q.
    This is the form a strain-level compatibility check must use, since it
    does not presuppose a displacement.
    """
    a1, a2 = geom.A1, geom.A2
    P = (diff_beta(a1 * eps1) - diff_alpha(a2 * om) - eps2 * diff_beta(a1)) / a2
    Q = (diff_alpha(a2 * eps2) - diff_beta(a1 * om) - eps1 * diff_alpha(a2)) / a1
    return P, Q


def _pq_grouped_form(
    geom: SurfaceGeometry, eps1: ScalarField, eps2: ScalarField, om: ScalarField
) -> tuple[ScalarField, ScalarField]:
    """The regrouped (product-rule expanded) P and Q used by the classical forms."""
    a1, a2 = geom.A1, geom.A2
    om_a, om_b = diff_alpha(om), diff_beta(om)
    P = (
        a1 * diff_beta(eps1)
        + diff_beta(a1) * (eps1 - eps2)
        - 0.5 * a2 * om_a
        - diff_alpha(a2) * om
    ) / a2 - 0.5 * om_a
    Q = (
        a2 * diff_alpha(eps2)
        + diff_alpha(a2) * (eps2 - eps1)
        - 0.5 * a1 * om_b
        - diff_beta(a1) * om
    ) / a1 - 0.5 * om_b
    return P, Q


def pq_deformed(
    geom: SurfaceGeometry, state: StrainState
) -> tuple[StrainState, PQDiagnostics]:
    """Fill (P, Q, Hp, Kp) for a displacement-derived state.

    Canonical values use the defining forms P = -((om1)_a + Hc psi),
    Q = -((om2)_b + Kc theta), which stack the fewest derivative
    applications.  The strain-gradient and regrouped forms are evaluated as
    diagnostics; their differences converge at O(h^2) exactly when the
    strain fields are mutually consistent.
    """
    state.require("om1", "om2", "theta", "psi", "k1", "k2")
    _check_grids(geom, state.grid)
    P_def = -(diff_alpha(state.om1) + geom.Hc * state.psi)
    Q_def = -(diff_beta(state.om2) + geom.Kc * state.theta)
    P_eps, Q_eps = pq_strain_form(geom, state.eps1, state.eps2, state.om)
    P_grp, Q_grp = _pq_grouped_form(geom, state.eps1, state.eps2, state.om)
    new = dataclasses.replace(
        state,
        P=P_def,
        Q=Q_def,
        Hp=-(state.k1 * geom.A1),
        Kp=-(state.k2 * geom.A2),
    )
    diag = PQDiagnostics(
        def_vs_strain=(P_def - P_eps, Q_def - Q_eps),
        def_vs_grouped=(P_def - P_grp, Q_def - Q_grp),
    )
    return new, diag


def state_from_strain_fields(
    geom: SurfaceGeometry,
    eps1: ScalarField,
    eps2: ScalarField,
    om: ScalarField,
    k1: ScalarField,
    k2: ScalarField,
    tau: ScalarField,
) -> StrainState:
    """Full compatibility-checkable state from the six strain fields alone.

    P and Q come from :func:`pq_strain_form` (there is no displacement to
    define them otherwise); the individual rotations om1/om2 and deflection
    angles remain unknown.
    """
    _check_grids(geom, eps1.grid)
    P, Q = pq_strain_form(geom, eps1, eps2, om)
    return StrainState(
        grid=eps1.grid,
        eps1=eps1,
        eps2=eps2,
        om=om,
        k1=k1,
        k2=k2,
        tau=tau,
        P=P,
        Q=Q,
        Hp=-(k1 * geom.A1),
        Kp=-(k2 * geom.A2),
    )


def rigid_displacement(
    frames: FrameField, positions: VectorField3, motion: RigidMotion
) -> DisplacementField:
    """Frame components of the infinitesimal rigid motion a + b x r."""
    if frames.grid != positions.grid:
        raise ValueError("frames and positions live on different grids")
    delta = motion.a + np.cross(np.broadcast_to(motion.b, positions.vectors.shape), positions.vectors)
    g = frames.grid
    return DisplacementField(
        u=ScalarField(g, np.sum(delta * frames.e1, axis=-1)),
        v=ScalarField(g, np.sum(delta * frames.e2, axis=-1)),
        w=ScalarField(g, np.sum(delta * frames.normal, axis=-1)),
    )


def layer_strains(
    geom: SurfaceGeometry, state: StrainState, layer: LayerParams
) -> tuple[ScalarField, ScalarField, ScalarField]:
    """Strains on the parallel surface at normal offset z.

    eps1_z = (eps1 - z k1) / (1 + z/R1), likewise eps2_z, and

        om_z = ((1 - z^2 K) om + 2 (1 + z H) z tau) / (1 - 2 H z + K z^2)

    with H, K the mean and Gauss curvature.  Fails when a denominator falls
    below 1e-12 in magnitude (the layer passes through a center of
    curvature).
    """
    state.require("k1", "k2", "tau")
    _check_grids(geom, state.grid)
    z = layer.z
    kap1, kap2 = geom.kappa1(), geom.kappa2()
    mean_h = (kap1 + kap2) * 0.5
    gauss_k = kap1 * kap2
    d1 = 1.0 - z * kap1  # = 1 + z / R1
    d2 = 1.0 - z * kap2
    dz = 1.0 - 2.0 * mean_h * z + gauss_k * (z * z)
    for d in (d1, d2, dz):
        if float(np.min(np.abs(d.values))) < 1e-12:
            raise ValueError("layer offset passes through a center of curvature")
    eps1_z = (state.eps1 - z * state.k1) / d1
    eps2_z = (state.eps2 - z * state.k2) / d2
    om_z = ((1.0 - z * z * gauss_k) * state.om + (2.0 * z) * (1.0 + z * mean_h) * state.tau) / dz
    return eps1_z, eps2_z, om_z


# -- deformed-frame coefficient matrices ------------------------------------


def _entry_diff(mats: np.ndarray, grid: Grid2D, axis: int) -> np.ndarray:
    """Finite difference of each matrix entry field."""
    h = grid.h_alpha if axis == 0 else grid.h_beta
    out = np.empty_like(mats)
    for r in range(3):
        for c in range(3):
            f = ScalarField(grid, mats[..., r, c])
            out[..., r, c] = (diff_alpha(f) if axis == 0 else diff_beta(f)).values
    return out


def _commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def _omega_matrices(state: StrainState) -> np.ndarray:
    state.require("om1", "om2", "theta", "psi")
    shape = state.grid.shape
    om = np.zeros(shape + (3, 3))
    om[..., 0, 1] = state.om2.values
    om[..., 0, 2] = state.theta.values
    om[..., 1, 0] = state.om1.values
    om[..., 1, 2] = state.psi.values
    om[..., 2, 0] = -state.theta.values
    om[..., 2, 1] = -state.psi.values
    return om


def lm_prime_commutator(
    geom: SurfaceGeometry, state: StrainState
) -> tuple[np.ndarray, np.ndarray]:
    """Frame-increment matrices from the rotation form.

    With Omega the (generally non-skew) frame perturbation matrix built from
    (om1, om2, theta, psi), the deformed frame satisfies a first-order
    system whose coefficient increments are

        L' = Omega_a + [L, Omega],   M' = Omega_b + [M, Omega].

    Requires the displacement-level fields; returns arrays of shape
    (n_alpha, n_beta, 3, 3).
    """
    _check_grids(geom, state.grid)
    omega = _omega_matrices(state)
    L, M = gw_matrix_fields(geom)
    lp = _entry_diff(omega, state.grid, axis=0) + _commutator(L, omega)
    mp = _entry_diff(omega, state.grid, axis=1) + _commutator(M, omega)
    return lp, mp


def lm_prime_explicit(
    geom: SurfaceGeometry, state: StrainState
) -> tuple[np.ndarray, np.ndarray]:
    """Frame-increment matrices written in the strain variables.

        L' = [[ p om,  P + om_a,  Hp            ],
              [-P,    -p om,      tau A1 - Hc om],
              [-Hp,   -tau A1,    0             ]]

        M' = [[-q om,     -Q,     tau A2 - Kc om],
              [ Q + om_b,  q om,  Kp            ],
              [-tau A2,   -Kp,    0             ]]

    Equivalent to :func:`lm_prime_commutator` up to truncation order for
    displacement-derived states, but defined for any six-strain state.  For
    om = tau = 0 both matrices reduce to the same skew shape as the base
    coefficients L and M with (p, q, Hc, Kc) replaced by (P, Q, Hp, Kp).
    """
    state.require("P", "Q", "Hp", "Kp", "tau")
    _check_grids(geom, state.grid)
    shape = state.grid.shape
    om = state.om
    om_a, om_b = diff_alpha(om), diff_beta(om)
    tau_a1 = state.tau * geom.A1
    tau_a2 = state.tau * geom.A2

    lp = np.zeros(shape + (3, 3))
    lp[..., 0, 0] = (geom.p * om).values
    lp[..., 0, 1] = (state.P + om_a).values
    lp[..., 0, 2] = state.Hp.values
    lp[..., 1, 0] = -state.P.values
    lp[..., 1, 1] = -(geom.p * om).values
    lp[..., 1, 2] = (tau_a1 - geom.Hc * om).values
    lp[..., 2, 0] = -state.Hp.values
    lp[..., 2, 1] = -tau_a1.values

    mp = np.zeros(shape + (3, 3))
    mp[..., 0, 0] = -(geom.q * om).values
    mp[..., 0, 1] = -state.Q.values
    mp[..., 0, 2] = (tau_a2 - geom.Kc * om).values
    mp[..., 1, 0] = (state.Q + om_b).values
    mp[..., 1, 1] = (geom.q * om).values
    mp[..., 1, 2] = state.Kp.values
    mp[..., 2, 0] = -tau_a2.values
    mp[..., 2, 1] = -state.Kp.values
    return lp, mp


def lm_prime_commutator_at(
    geom: SurfaceGeometry, state: StrainState, i: int, j: int
) -> tuple[np.ndarray, np.ndarray]:
    lp, mp = lm_prime_commutator(geom, state)
    return lp[i, j], mp[i, j]


def lm_prime_explicit_at(
    geom: SurfaceGeometry, state: StrainState, i: int, j: int
) -> tuple[np.ndarray, np.ndarray]:
    lp, mp = lm_prime_explicit(geom, state)
    return lp[i, j], mp[i, j]


# -- compatibility residuals -------------------------------------------------


def goldenweizer_residuals(
    geom: SurfaceGeometry, state: StrainState
) -> tuple[ScalarField, ScalarField, ScalarField]:
    """The three strain compatibility equations, as left-minus-right defects."""
    state.require("P", "Q", "Hp", "Kp", "tau")
    _check_grids(geom, state.grid)
    a1, a2, p, q, hc, kc = geom.A1, geom.A2, geom.p, geom.q, geom.Hc, geom.Kc
    P, Q, hp, kp, om, tau = state.P, state.Q, state.Hp, state.Kp, state.om, state.tau

    om_ab = diff_beta(diff_alpha(om))
    g1 = diff_beta(P) + diff_alpha(Q) + om_ab + hp * kc + hc * kp
    g2 = diff_beta(hp) - (P * kc + p * kp) - (
        diff_alpha(tau * a2) + tau * diff_alpha(a2) - om * diff_alpha(kc)
    )
    g3 = diff_alpha(kp) - (Q * hc + q * hp) - (
        diff_beta(tau * a1) + tau * diff_beta(a1) - om * diff_beta(hc)
    )
    return g1, g2, g3


def goldenweizer_matrix_residual(geom: SurfaceGeometry, state: StrainState) -> ScalarField:
    """Pointwise Frobenius norm of L'_b - M'_a - [L', M] - [L, M']."""
    lp, mp = lm_prime_explicit(geom, state)
    L, M = gw_matrix_fields(geom)
    res = (
        _entry_diff(lp, state.grid, axis=1)
        - _entry_diff(mp, state.grid, axis=0)
        - _commutator(lp, M)
        - _commutator(L, mp)
    )
    return ScalarField(state.grid, np.sqrt(np.sum(res * res, axis=(-2, -1))))


def novozhilov_residuals(
    geom: SurfaceGeometry, state: StrainState
) -> tuple[ScalarField, ScalarField, ScalarField]:
    """The classical regrouped compatibility equations, written in strains.

    These are algebraic regroupings of :func:`goldenweizer_residuals` using
    the Codazzi relations of the base surface: n1 matches g1 / (A1 A2) and
    n2, n3 match g2, g3 up to truncation order.  Note the cross pairing of
    the bending strains with the curvatures in n1 (k1 with kappa2 and vice
    versa), which the variation of the Gauss equation forces.
    """
    state.require("k1", "k2", "tau")
    _check_grids(geom, state.grid)
    a1, a2 = geom.A1, geom.A2
    eps1, eps2, om, k1, k2, tau = state.eps1, state.eps2, state.om, state.k1, state.k2, state.tau
    kap1, kap2 = geom.kappa1(), geom.kappa2()

    # -k1 / R2 = k1 kap2, -k2 / R1 = k2 kap1
    group_alpha = (
        a2 * diff_alpha(eps2)
        + diff_alpha(a2) * (eps2 - eps1)
        - 0.5 * a1 * diff_beta(om)
        - diff_beta(a1) * om
    ) / a1
    group_beta = (
        a1 * diff_beta(eps1)
        + diff_beta(a1) * (eps1 - eps2)
        - 0.5 * a2 * diff_alpha(om)
        - diff_alpha(a2) * om
    ) / a2
    n1 = k1 * kap2 + k2 * kap1 + (diff_alpha(group_alpha) + diff_beta(group_beta)) / (a1 * a2)

    # bracketed strain-gradient combinations = A2 P and A1 Q
    a2_p = diff_beta(a1 * eps1) - diff_alpha(a2 * om) - eps2 * diff_beta(a1)
    a1_q = diff_alpha(a2 * eps2) - diff_beta(a1 * om) - eps1 * diff_alpha(a2)

    # om / R1 = -kap1 om; -(1/R2) A2 P = kap2 A2 P
    n2 = (
        diff_beta(-(k1 * a1))
        + k2 * diff_beta(a1)
        - diff_alpha(tau * a2)
        - tau * diff_alpha(a2)
        - om * kap1 * diff_alpha(a2)
        + kap2 * a2_p
    )
    n3 = (
        diff_alpha(-(k2 * a2))
        + k1 * diff_alpha(a2)
        - diff_beta(tau * a1)
        - tau * diff_beta(a1)
        - om * kap2 * diff_beta(a1)
        + kap1 * a1_q
    )
    return n1, n2, n3


def tangential_compat_residuals(
    geom: SurfaceGeometry, state: StrainState
) -> tuple[ScalarField, ScalarField, ScalarField]:
    """Defects of the three cross-derivative identities of the deformed tangents.

    t1, t2 are the in-surface components (zero for any displacement-derived
    strains); t3 is the normal component, which holds identically:

        (A1 theta)_b - (A2 psi)_a + (om1/R2 - om2/R1) A1 A2 = 0.
    """
    state.require("om1", "om2", "theta", "psi")
    _check_grids(geom, state.grid)
    a1, a2 = geom.A1, geom.A2
    kap1, kap2 = geom.kappa1(), geom.kappa2()
    t1 = (
        diff_beta(a1 * state.eps1)
        - diff_alpha(a2 * state.om)
        - state.eps2 * diff_beta(a1)
        + (diff_alpha(state.om1) + geom.Hc * state.psi) * a2
    )
    t2 = (
        diff_alpha(a2 * state.eps2)
        - diff_beta(a1 * state.om)
        - state.eps1 * diff_alpha(a2)
        + (diff_beta(state.om2) + geom.Kc * state.theta) * a1
    )
    t3 = (
        diff_beta(a1 * state.theta)
        - diff_alpha(a2 * state.psi)
        + ((-kap2) * state.om1 - (-kap1) * state.om2) * a1 * a2
    )
    return t1, t2, t3


def deformation_consistency(
    geom: SurfaceGeometry,
    frames: FrameField,
    positions: VectorField3,
    disp: DisplacementField,
) -> tuple[ScalarField, ScalarField]:
    """Check the deformed-tangent decomposition against the strain fields.

    Builds R = r + Delta pointwise and measures

        c1 = | R_a / A1 - ((1 + eps1) e1 + om1 e2 - theta N) |
        c2 = | R_b / A2 - (om2 e1 + (1 + eps2) e2 - psi N) |

    per point (derivatives of the position field by finite differences).
    The decomposition is an identity of the linear kinematics, so both
    residuals sit at the O(h^2) finite-difference floor for any displacement
    and scale linearly with its amplitude beyond that floor.
    """
    state = strains_from_displacement(geom, disp)
    g = geom.grid
    delta = (
        disp.u.values[..., None] * frames.e1
        + disp.v.values[..., None] * frames.e2
        + disp.w.values[..., None] * frames.normal
    )
    big_r = positions.vectors + delta

    lhs1 = _d1(big_r, g.h_alpha, axis=0) / geom.A1.values[..., None]
    rhs1 = (
        (1.0 + state.eps1.values)[..., None] * frames.e1
        + state.om1.values[..., None] * frames.e2
        - state.theta.values[..., None] * frames.normal
    )
    lhs2 = _d1(big_r, g.h_beta, axis=1) / geom.A2.values[..., None]
    rhs2 = (
        state.om2.values[..., None] * frames.e1
        + (1.0 + state.eps2.values)[..., None] * frames.e2
        - state.psi.values[..., None] * frames.normal
    )
    return (
        ScalarField(g, np.linalg.norm(lhs1 - rhs1, axis=-1)),
        ScalarField(g, np.linalg.norm(lhs2 - rhs2, axis=-1)),
    )


# -- convenience ---------------------------------------------------------------


def displacement_pipeline(
    geom: SurfaceGeometry, disp: DisplacementField
) -> tuple[StrainState, ScalarField, PQDiagnostics]:
    """Run the full strain pipeline: tangential, bending, deformed-frame fields.

    Returns the complete state, the tau-formula mismatch, and the P/Q form
    diagnostics.
    """
    state = strains_from_displacement(geom, disp)
    state, tau_mismatch = bending_strains(geom, state)
    state, pq_diag = pq_deformed(geom, state)
    return state, tau_mismatch, pq_diag


def strain_scale(state: StrainState) -> float:
    """max(1, largest strain magnitude); reports normalize residuals by this."""
    mags = [
        float(np.max(np.abs(f.values)))
        for f in (state.eps1, state.eps2, state.om, state.k1, state.k2, state.tau)
        if f is not None
    ]
    return max(1.0, *mags)
