"""Curvature-line shell geometry, strain compatibility, and soliton symmetries.

The package verifies, on structured finite-difference grids, that

1. the six coefficient fields of curvature-line surface charts satisfy the
   Gauss-Mainardi-Codazzi system (module :mod:`shellcompat.surface`), whose
   matrix form is integrated and closure-checked by
   :mod:`shellcompat.frames`;
2. strain fields derived from middle-surface displacements satisfy the
   thin-shell compatibility conditions, in component, matrix, and classical
   regrouped forms (module :mod:`shellcompat.strain`);
3. symmetries of the Liouville, elliptic sinh-Gordon, and sine-Gordon
   equations generate shear-free, twist-free strain fields that pass the
   same compatibility residuals (module :mod:`shellcompat.integrable`).

The :mod:`shellcompat.cli` front end wires these into config-driven
convergence studies with JSON/CSV reports and rendered figures.
"""

from .grid import (
    FieldNorms,
    Grid2D,
    ScalarField,
    constant_field,
    diff2_alpha,
    diff2_beta,
    diff_alpha,
    diff_beta,
    field_from_function,
    field_norms,
    read_field_csv,
    write_field_csv,
)
from .surface import (
    CurvatureSet,
    SurfaceGeometry,
    curvatures,
    derive_pq,
    gmc_residuals,
    make_catalog_surface,
    with_scaled_hc,
)
from .frames import (
    FrameField,
    VectorField3,
    gw_matrices,
    integrate_frames,
    reconstruct_positions,
    weingarten_residual,
)
from .strain import (
    DisplacementField,
    LayerParams,
    RigidMotion,
    StrainState,
    bending_strains,
    deformation_consistency,
    displacement_pipeline,
    goldenweizer_matrix_residual,
    goldenweizer_residuals,
    layer_strains,
    lm_prime_commutator,
    lm_prime_explicit,
    novozhilov_residuals,
    pq_deformed,
    rigid_displacement,
    state_from_strain_fields,
    strains_from_displacement,
    tangential_compat_residuals,
)
from .integrable import (
    IntegrableSeed,
    SymmetryField,
    cmc_profile_ode,
    geometry_from_seed,
    linearized_residual,
    log_cosh_wave_symmetry,
    pde_residual,
    seed_catalog,
    solve_linearized_elliptic,
    strains_from_generic_symmetry,
    strains_from_symmetry,
    symmetry_components,
)

__version__ = "0.1.0"
