"""Config-driven front end: residual suites and convergence studies.

Experiments (``experiment`` key of the ``[run]`` section):

- ``surface-check``: GMC residuals of the configured surface per grid size.
- ``strain-check``: full strain pipeline for a configured displacement
  (rigid motion, inflation, or CSV fields); tangential identities, tau and
  P/Q form mismatches, the three compatibility residual families, the
  matrix-form residual, the regrouped forms, and cross-form agreement.
- ``symmetry-demo``: seed + symmetry (catalog closed form or Dirichlet
  solve); governing-equation residual, linearized residual, GMC of the
  derived geometry, and the compatibility residuals of the symmetry-built
  strains.
- ``reconstruct`` (alias ``convergence``): frame-integration closure,
  position reconstruction error against the analytic chart, and the
  Weingarten residuals.

``--negative-control`` flips each experiment into its standard broken
configuration (scaled Hc, injected strain inconsistency, or a non-symmetry)
and the run is expected to exit 1 with the offending families flagged.

Exit codes: 0 all checks passed, 1 tolerance/diagnostic failure, 2 config
error.  Outputs land in ``out_dir``: ``report.json`` always, per-field CSV
dumps named ``<residual>_<n>.csv`` for ``format`` csv/both, and rendered
figures unless disabled.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, parse_config
from .frames import FrameField, VectorField3, integrate_frames, reconstruct_positions, weingarten_residual
from .grid import ScalarField, field_from_function, read_field_csv, write_field_csv
from .integrable import (
    ConditioningError,
    SEED_CATALOG_NAMES,
    geometry_from_seed,
    linearized_residual,
    pde_residual,
    seed_catalog,
    solve_linearized_elliptic,
    strains_from_symmetry,
)
from .report import ReportBuilder, report_to_json
from .strain import (
    DisplacementField,
    RigidMotion,
    displacement_pipeline,
    goldenweizer_matrix_residual,
    goldenweizer_residuals,
    novozhilov_residuals,
    rigid_displacement,
    state_from_strain_fields,
    strain_scale,
    tangential_compat_residuals,
)
from .surface import (
    CATALOG_NAMES,
    SurfaceGeometry,
    gmc_residuals,
    load_geometry_bundle,
    make_catalog_surface,
)

HC_CONTROL_SCALE = 1.1
EPS1_CONTROL_AMPLITUDE = 0.01


def _surface_params(section: dict[str, str]) -> dict:
    params: dict = {}
    if "radius" in section:
        params["radius"] = float(section["radius"])
    if "rho" in section:
        params["rho"] = float(section["rho"])
    if "mean_h" in section:
        params["mean_h"] = float(section["mean_h"])
    if "first_integral" in section:
        params["first_integral"] = float(section["first_integral"])
    if "alpha_min" in section or "alpha_max" in section:
        params["alpha_range"] = (float(section["alpha_min"]), float(section["alpha_max"]))
    if "beta_min" in section or "beta_max" in section:
        params["beta_range"] = (float(section["beta_min"]), float(section["beta_max"]))
    return params


def _build_geometry(cfg: RunConfig, n: int, hc_control: bool = False) -> SurfaceGeometry:
    sec = cfg.surface
    hc_scale = HC_CONTROL_SCALE if hc_control else float(sec.get("hc_scale", 1.0))
    if "csv_bundle" in sec:
        geom = load_geometry_bundle(sec["csv_bundle"])
        if geom.grid.n_alpha != n:
            raise ConfigError(
                f"csv bundle carries a {geom.grid.n_alpha}-point grid; configure "
                f"grids = {geom.grid.n_alpha} to use it"
            )
        if hc_scale != 1.0:
            from .surface import with_scaled_hc

            geom = with_scaled_hc(geom, hc_scale)
        return geom
    name = sec.get("name")
    if name not in CATALOG_NAMES:
        raise ConfigError(f"surface name must be one of {CATALOG_NAMES}, got {name!r}")
    try:
        return make_catalog_surface(name, n, hc_scale=hc_scale, **_surface_params(sec))
    except ValueError as exc:
        raise ConfigError(f"bad surface parameters: {exc}") from exc


def _parse_vec(raw: str) -> np.ndarray:
    try:
        vec = np.array([float(t) for t in raw.replace(" ", "").split(",")])
    except ValueError as exc:
        raise ConfigError(f"cannot parse vector {raw!r}") from exc
    if vec.shape != (3,):
        raise ConfigError(f"expected three components, got {raw!r}")
    return vec


def _build_displacement(cfg: RunConfig, geom: SurfaceGeometry) -> tuple[DisplacementField, str]:
    sec = cfg.displacement
    kind = sec.get("kind", "rigid")
    if kind == "rigid":
        frames = geom.analytic_frames()
        positions = geom.analytic_positions()
        if frames is None or positions is None:
            raise ConfigError(
                "rigid displacements need a catalog surface with an embedding "
                "(plane, sphere, catenoid)"
            )
        motion = RigidMotion(a=_parse_vec(sec.get("a", "0,0,1")), b=_parse_vec(sec.get("b", "0,0,0")))
        disp = rigid_displacement(
            FrameField(geom.grid, frames), VectorField3(geom.grid, positions), motion
        )
        return disp, kind
    if kind == "inflation":
        c = float(sec.get("c", "0.1"))
        g = geom.grid
        zero = ScalarField(g, np.zeros(g.shape))
        return DisplacementField(u=zero, v=zero, w=ScalarField(g, np.full(g.shape, c))), kind
    if kind == "csv":
        directory = Path(sec.get("dir", ""))
        comp = {name: read_field_csv(directory / f"{name}.csv") for name in ("u", "v", "w")}
        if comp["u"].grid != geom.grid:
            raise ConfigError("displacement CSV grid does not match the geometry grid")
        return DisplacementField(**comp), kind
    raise ConfigError(f"unknown displacement kind {kind!r}")


def run_surface_check(cfg: RunConfig) -> ReportBuilder:
    rb = ReportBuilder("surface-check", cfg.grids, cfg.trim, cfg.tolerances)
    for n in cfg.grids:
        geom = _build_geometry(cfg, n, hc_control=cfg.negative_control)
        gauss, cod1, cod2 = gmc_residuals(geom)
        rb.add("gauss", n, gauss)
        rb.add("codazzi1", n, cod1)
        rb.add("codazzi2", n, cod2)
    return rb


def run_strain_check(cfg: RunConfig) -> ReportBuilder:
    rb = ReportBuilder("strain-check", cfg.grids, cfg.trim, cfg.tolerances)
    for n in cfg.grids:
        geom = _build_geometry(cfg, n)
        disp, kind = _build_displacement(cfg, geom)
        state, tau_mismatch, pq_diag = displacement_pipeline(geom, disp)
        scale = strain_scale(state)

        # the six strains vanish for rigid motions; the rotation measures
        # om1, om2 and the deflection angles theta, psi do not (a rigid
        # rotation turns tangents and normal), so those are report-only
        strain_check = "order-min" if kind == "rigid" else "none"
        for name in ("eps1", "eps2", "om", "k1", "k2", "tau"):
            rb.add(f"strain_{name}", n, getattr(state, name), scale=scale, check=strain_check)
        for name in ("om1", "om2", "theta", "psi"):
            rb.add(f"strain_{name}", n, getattr(state, name), scale=scale, check="none")

        t1, t2, t3 = tangential_compat_residuals(geom, state)
        rb.add("tangential1", n, t1, scale=scale, check="order-min")
        rb.add("tangential2", n, t2, scale=scale, check="order-min")
        rb.add("tangential3", n, t3, scale=scale, check="order-min")
        rb.add("tau_mismatch", n, tau_mismatch, scale=scale, check="order-min")
        rb.add("pq_mismatch_p", n, pq_diag.def_vs_strain[0], scale=scale, check="order-min")
        rb.add("pq_mismatch_q", n, pq_diag.def_vs_strain[1], scale=scale, check="order-min")
        rb.add("pq_grouped_p", n, pq_diag.def_vs_grouped[0], scale=scale, check="order-min")
        rb.add("pq_grouped_q", n, pq_diag.def_vs_grouped[1], scale=scale, check="order-min")

        check_state = state
        note = ""
        if cfg.negative_control:
            bump = field_from_function(
                geom.grid, lambda a, b: EPS1_CONTROL_AMPLITUDE * np.sin(a)
            )
            check_state = state_from_strain_fields(
                geom, state.eps1 + bump, state.eps2, state.om, state.k1, state.k2, state.tau
            )
            note = "eps1 inconsistency injected"

        g1, g2, g3 = goldenweizer_residuals(geom, check_state)
        gm = goldenweizer_matrix_residual(geom, check_state)
        n1, n2, n3 = novozhilov_residuals(geom, check_state)
        for name, fld in (("compat1", g1), ("compat2", g2), ("compat3", g3), ("compat_matrix", gm)):
            rb.add(name, n, fld, scale=scale, note=note)
        for name, fld in (("regrouped1", n1), ("regrouped2", n2), ("regrouped3", n3)):
            rb.add(name, n, fld, scale=scale, note=note)
        cross1 = n1 - g1 / (geom.A1 * geom.A2)
        rb.add("crossform1", n, cross1, scale=scale, check="order-min")
        rb.add("crossform2", n, n2 - g2, scale=scale, check="order-min")
        rb.add("crossform3", n, n3 - g3, scale=scale, check="order-min")
    return rb


def _build_symmetry(cfg: RunConfig, seed, exact_sym) -> ScalarField:
    mode = cfg.seed.get("symmetry", "catalog")
    if cfg.negative_control:
        mode = "ones"
    if mode == "catalog":
        if exact_sym is None:
            raise ConfigError("this seed has no catalog symmetry; use symmetry = solve-exact")
        return exact_sym.S
    if mode == "ones":
        return ScalarField(seed.grid, np.ones(seed.grid.shape))
    if mode == "solve-exact":
        if exact_sym is None:
            raise ConfigError("solve-exact needs a catalog symmetry for boundary data")
        return solve_linearized_elliptic(seed, exact_sym.S).S
    if mode == "solve-wave":
        # corner-compatible, genuinely 2D boundary data; only the log-cosh
        # seed has this closed form
        if seed.klass != "minimal":
            raise ConfigError("solve-wave applies to the catenoid_log_cosh seed only")
        from .integrable import log_cosh_wave_symmetry

        return solve_linearized_elliptic(seed, log_cosh_wave_symmetry(seed.grid)).S
    raise ConfigError(f"unknown symmetry mode {mode!r}")


def run_symmetry_demo(cfg: RunConfig) -> ReportBuilder:
    rb = ReportBuilder("symmetry-demo", cfg.grids, cfg.trim, cfg.tolerances)
    name = cfg.seed.get("name")
    if name not in SEED_CATALOG_NAMES:
        raise ConfigError(f"seed name must be one of {SEED_CATALOG_NAMES}, got {name!r}")
    params: dict = {}
    if "rho" in cfg.seed:
        params["rho"] = float(cfg.seed["rho"])
    if "mean_h" in cfg.seed:
        params["mean_h"] = float(cfg.seed["mean_h"])
    if "first_integral" in cfg.seed:
        params["first_integral"] = float(cfg.seed["first_integral"])

    import warnings

    for n in cfg.grids:
        try:
            seed, exact_sym = seed_catalog(name, n, **params)
        except ValueError as exc:
            raise ConfigError(f"bad seed parameters: {exc}") from exc
        sym = _build_symmetry(cfg, seed, exact_sym)
        geom = geometry_from_seed(seed)

        rb.add("pde_residual", n, pde_residual(seed))
        rb.add("linearized_residual", n, linearized_residual(seed, sym))
        gauss, cod1, cod2 = gmc_residuals(geom)
        rb.add("gauss", n, gauss)
        rb.add("codazzi1", n, cod1)
        rb.add("codazzi2", n, cod2)

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # non-symmetry control warns by design
            state = strains_from_symmetry(seed, sym, geom)
        scale = strain_scale(state)
        g1, g2, g3 = goldenweizer_residuals(geom, state)
        rb.add("compat1", n, g1, scale=scale)
        rb.add("compat2", n, g2, scale=scale)
        rb.add("compat3", n, g3, scale=scale)
        rb.add("compat_matrix", n, goldenweizer_matrix_residual(geom, state), scale=scale)
    return rb


def run_reconstruct(cfg: RunConfig) -> ReportBuilder:
    rb = ReportBuilder("reconstruct", cfg.grids, cfg.trim, cfg.tolerances)
    for n in cfg.grids:
        geom = _build_geometry(cfg, n, hc_control=cfg.negative_control)
        exact_frames = geom.analytic_frames()
        exact_positions = geom.analytic_positions()
        phi0 = exact_frames[0, 0] if exact_frames is not None else np.eye(3)
        r0 = exact_positions[0, 0] if exact_positions is not None else np.zeros(3)

        frames, closure = integrate_frames(geom, phi0)
        positions = reconstruct_positions(geom, frames, r0)
        rb.add("closure", n, closure, check="order-min")
        w1, w2 = weingarten_residual(geom, frames, positions)
        rb.add("weingarten1", n, w1, check="order-min")
        rb.add("weingarten2", n, w2, check="order-min")
        if exact_positions is not None:
            err = np.linalg.norm(positions.vectors - exact_positions, axis=-1)
            rb.add("position_error", n, ScalarField(geom.grid, err), check="order-min")
    return rb


_DRIVERS = {
    "surface-check": run_surface_check,
    "strain-check": run_strain_check,
    "symmetry-demo": run_symmetry_demo,
    "reconstruct": run_reconstruct,
    "convergence": run_reconstruct,
}


def _write_outputs(cfg: RunConfig, rb: ReportBuilder, wall_time_s: float) -> Path:
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    report = rb.as_dict(cfg.echo(), wall_time_s, __version__)
    (out / "report.json").write_text(report_to_json(report))
    if cfg.fmt in ("csv", "both"):
        for name, series in rb.series.items():
            for n, fld in series.fields.items():
                write_field_csv(fld, out / f"{name}_{n}.csv")
    if cfg.figures:
        from .figures import render_report_figures

        render_report_figures(rb, out)
    return out / "report.json"


def _print_summary(rb: ReportBuilder) -> None:
    for name in sorted(rb.series):
        s = rb.series[name]
        status = "PASS" if s.passed(rb.tol) else "FAIL"
        finest = max(s.norms)
        orders = ", ".join(
            "-" if o is None else f"{o:.2f}" for o in s.orders(rb.tol)
        ) or "-"
        print(
            f"[{status}] {name:<18} linf({finest})={s.normalized_linf(finest):.3e} "
            f"orders: {orders}"
        )
    print(f"overall: {'PASS' if rb.passed else 'FAIL'}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="shellcompat",
        description="Curvature-line shell geometry and strain compatibility checks.",
    )
    parser.add_argument("--config", required=True, help="run configuration file")
    parser.add_argument("--out-dir", default=None, help="override output directory")
    parser.add_argument("--format", default=None, choices=["json", "csv", "both"])
    parser.add_argument("--grids", default=None, help="override grid sizes, e.g. 33,65,129")
    parser.add_argument(
        "--negative-control",
        action="store_true",
        help="run the experiment's standard broken configuration (expected to fail)",
    )
    parser.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    args = parser.parse_args(argv)

    try:
        cfg = parse_config(args.config)
        if args.out_dir is not None:
            cfg.out_dir = Path(args.out_dir)
        if args.format is not None:
            cfg.fmt = args.format
        if args.grids is not None:
            grids = [int(t) for t in args.grids.replace(" ", "").split(",") if t]
            cfg = RunConfig(**{**cfg.__dict__, "grids": grids})
        if args.negative_control:
            cfg.negative_control = True
        if args.no_figures:
            cfg.figures = False
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    t0 = time.perf_counter()
    try:
        rb = _DRIVERS[cfg.experiment](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ConditioningError, ValueError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1
    wall = time.perf_counter() - t0

    report_path = _write_outputs(cfg, rb, wall)
    _print_summary(rb)
    print(f"report: {report_path}")
    return 0 if rb.passed else 1


if __name__ == "__main__":
    sys.exit(main())
