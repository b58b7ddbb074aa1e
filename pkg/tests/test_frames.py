import numpy as np
import pytest

from shellcompat.frames import (
    FrameField,
    VectorField3,
    gram_schmidt_columns,
    gw_matrices,
    gw_matrix_fields,
    integrate_frames,
    orthonormality_defect,
    reconstruct_positions,
    weingarten_residual,
    write_frames_csv,
    write_positions_csv,
)
from shellcompat.grid import Grid2D, ScalarField, constant_field, field_norms, _d1
from shellcompat.surface import SurfaceGeometry, make_catalog_surface


def linf(f, trim=1):
    return field_norms(f, trim).linf


def uniform_geometry(n, hc, kc, h=0.25):
    g = Grid2D(n, n, h_alpha=h, h_beta=h)
    one = constant_field(g, 1.0)
    zero = constant_field(g, 0.0)
    return SurfaceGeometry(
        A1=one, A2=one, p=zero, q=zero,
        Hc=constant_field(g, hc), Kc=constant_field(g, kc),
    )


class TestGwMatrices:
    def test_plane_zero(self):
        geom = make_catalog_surface("plane", 9)
        L, M = gw_matrices(geom, 4, 4)
        assert np.all(L == 0.0) and np.all(M == 0.0)

    def test_sphere_at_equator(self):
        geom = make_catalog_surface("sphere", 33)
        i = 16  # theta = pi/2: p = 0, q = cos = 0, Hc = 1, Kc = 1
        L, M = gw_matrices(geom, i, 3)
        np.testing.assert_allclose(L, [[0, 0, 1], [0, 0, 0], [-1, 0, 0]], atol=1e-14)
        np.testing.assert_allclose(M, [[0, 0, 0], [0, 0, 1], [0, -1, 0]], atol=1e-14)

    def test_catenoid_at_waist(self):
        geom = make_catalog_surface("catenoid", 33)
        i = 16  # alpha = 0: q = tanh(0) = 0, Hc = 1, Kc = -1
        L, M = gw_matrices(geom, i, 0)
        assert L[0, 2] == pytest.approx(1.0, abs=1e-14)
        assert M[0, 1] == pytest.approx(0.0, abs=1e-14)
        assert M[1, 2] == pytest.approx(-1.0, abs=1e-14)

    def test_skew_symmetry(self):
        geom = make_catalog_surface("pseudosphere_kink", 9)
        L, M = gw_matrix_fields(geom)
        np.testing.assert_allclose(L + np.swapaxes(L, -1, -2), 0.0, atol=1e-15)
        np.testing.assert_allclose(M + np.swapaxes(M, -1, -2), 0.0, atol=1e-15)


class TestFrameHelpers:
    def test_gram_schmidt_restores_orthonormality(self):
        rng = np.random.default_rng(3)
        mats = np.eye(3) + 1e-4 * rng.standard_normal((10, 3, 3))
        fixed = gram_schmidt_columns(mats)
        assert orthonormality_defect(fixed) < 1e-12

    def test_frame_field_validation(self):
        g = Grid2D(3, 3)
        frames = np.broadcast_to(np.eye(3), (3, 3, 3, 3)).copy()
        FrameField(g, frames)  # valid
        frames[1, 1] *= 1.01
        with pytest.raises(ValueError):
            FrameField(g, frames)

    def test_improper_rotation_rejected(self):
        g = Grid2D(3, 3)
        flip = np.diag([1.0, 1.0, -1.0])
        frames = np.broadcast_to(flip, (3, 3, 3, 3)).copy()
        with pytest.raises(ValueError):
            FrameField(g, frames)

    def test_vector_field_validation(self):
        g = Grid2D(3, 3)
        VectorField3(g, np.zeros((3, 3, 3)))
        with pytest.raises(ValueError):
            VectorField3(g, np.zeros((3, 3, 2)))


class TestIntegrateFrames:
    def test_plane_identity(self):
        geom = make_catalog_surface("plane", 17)
        frames, closure = integrate_frames(geom, np.eye(3))
        assert np.all(closure.values == 0.0)
        np.testing.assert_allclose(
            frames.frames, np.broadcast_to(np.eye(3), frames.frames.shape), atol=1e-15
        )

    def test_requires_orthonormal_start(self):
        geom = make_catalog_surface("plane", 9)
        with pytest.raises(ValueError):
            integrate_frames(geom, 2.0 * np.eye(3))

    def test_closure_vanishes_on_edges(self):
        geom = make_catalog_surface("sphere", 17)
        _, closure = integrate_frames(geom, geom.analytic_frames()[0, 0])
        np.testing.assert_allclose(closure.values[0, :], 0.0, atol=1e-13)
        np.testing.assert_allclose(closure.values[:, 0], 0.0, atol=1e-13)

    def test_sphere_closure_converges(self):
        norms = []
        for n in (33, 65):
            geom = make_catalog_surface("sphere", n)
            _, closure = integrate_frames(geom, geom.analytic_frames()[0, 0])
            norms.append(linf(closure))
        assert norms[0] / norms[1] >= 3.5  # order >= 2 (superconvergent here)

    def test_frames_match_analytic_chart(self):
        geom = make_catalog_surface("sphere", 33)
        frames, _ = integrate_frames(geom, geom.analytic_frames()[0, 0])
        err = np.max(np.abs(frames.frames - geom.analytic_frames()))
        assert err < 1e-5

    def test_gmc_violation_stalls_closure(self):
        norms = []
        for n in (33, 65):
            geom = make_catalog_surface("sphere", n, hc_scale=1.1)
            _, closure = integrate_frames(geom, geom.analytic_frames()[0, 0])
            norms.append(linf(closure))
        assert norms[1] > 0.1
        assert norms[0] / norms[1] < 1.5  # no convergence

    def test_sampled_midpoints_still_converge(self):
        # drop the closures: midpoint coefficients fall back to averaging
        norms = []
        for n in (33, 65):
            geom = make_catalog_surface("sphere", n)
            bare = SurfaceGeometry(
                A1=geom.A1, A2=geom.A2, p=geom.p, q=geom.q, Hc=geom.Hc, Kc=geom.Kc
            )
            _, closure = integrate_frames(bare, geom.analytic_frames()[0, 0])
            norms.append(linf(closure))
        assert norms[0] / norms[1] >= 3.5

    def test_step_drift_guard(self):
        # one RK4 step through ~60 radians of rotation cannot stay orthonormal
        geom = uniform_geometry(5, hc=250.0, kc=0.0)
        with pytest.raises(ValueError, match="drift"):
            integrate_frames(geom, np.eye(3))


class TestReconstructPositions:
    def test_plane_exact(self):
        geom = make_catalog_surface("plane", 17)
        frames, _ = integrate_frames(geom, np.eye(3))
        pos = reconstruct_positions(geom, frames, np.zeros(3))
        A, B = geom.grid.meshgrid()
        np.testing.assert_allclose(pos.vectors[..., 0], A, atol=1e-14)
        np.testing.assert_allclose(pos.vectors[..., 1], B, atol=1e-14)
        np.testing.assert_allclose(pos.vectors[..., 2], 0.0, atol=1e-14)

    def test_sphere_error_decays_second_order(self):
        errs = []
        for n in (33, 65):
            geom = make_catalog_surface("sphere", n)
            frames, _ = integrate_frames(geom, geom.analytic_frames()[0, 0])
            pos = reconstruct_positions(geom, frames, geom.analytic_positions()[0, 0])
            errs.append(np.max(np.linalg.norm(pos.vectors - geom.analytic_positions(), axis=-1)))
        assert errs[0] / errs[1] >= 3.5

    def test_catenoid_satisfies_implicit_equation(self):
        devs = []
        for n in (33, 65):
            geom = make_catalog_surface("catenoid", n)
            frames, _ = integrate_frames(geom, geom.analytic_frames()[0, 0])
            pos = reconstruct_positions(geom, frames, geom.analytic_positions()[0, 0])
            x, y, z = pos.vectors[..., 0], pos.vectors[..., 1], pos.vectors[..., 2]
            devs.append(np.max(np.abs(x * x + y * y - np.cosh(z) ** 2)))
        assert devs[0] <= 1e-5
        assert devs[0] / devs[1] >= 3.5

    def test_first_fundamental_form_recovered(self):
        devs = []
        for n in (33, 65):
            geom = make_catalog_surface("sphere", n)
            frames, _ = integrate_frames(geom, geom.analytic_frames()[0, 0])
            pos = reconstruct_positions(geom, frames, geom.analytic_positions()[0, 0])
            r_a = _d1(pos.vectors, geom.grid.h_alpha, axis=0)
            dev = np.abs(np.sum(r_a * r_a, axis=-1) - geom.A1.values**2)
            devs.append(field_norms(ScalarField(geom.grid, dev), 1).linf)
        assert 3.5 <= devs[0] / devs[1] <= 4.5


class TestWeingartenResidual:
    def test_plane_exact_zero(self):
        geom = make_catalog_surface("plane", 17)
        frames, _ = integrate_frames(geom, np.eye(3))
        pos = reconstruct_positions(geom, frames, np.zeros(3))
        r1, r2 = weingarten_residual(geom, frames, pos)
        assert np.all(r1.values == 0.0) and np.all(r2.values == 0.0)

    def test_sphere_converges(self):
        norms = []
        for n in (33, 65):
            geom = make_catalog_surface("sphere", n)
            frames, _ = integrate_frames(geom, geom.analytic_frames()[0, 0])
            pos = reconstruct_positions(geom, frames, geom.analytic_positions()[0, 0])
            r1, r2 = weingarten_residual(geom, frames, pos)
            norms.append(max(linf(r1), linf(r2)))
        assert norms[0] / norms[1] >= 3.5

    def test_pseudosphere_converges(self):
        # no embedding closure: everything from integrated frames
        norms = []
        for n in (33, 65):
            geom = make_catalog_surface("pseudosphere_kink", n)
            frames, _ = integrate_frames(geom, np.eye(3))
            pos = reconstruct_positions(geom, frames, np.zeros(3))
            r1, r2 = weingarten_residual(geom, frames, pos)
            norms.append(max(linf(r1), linf(r2)))
        assert 3.0 <= norms[0] / norms[1] <= 5.0


class TestCsvDumps:
    def test_positions_csv(self, tmp_path):
        geom = make_catalog_surface("sphere", 5)
        pos = VectorField3(geom.grid, geom.analytic_positions())
        path = tmp_path / "positions.csv"
        write_positions_csv(pos, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "alpha,beta,x,y,z"
        assert len(lines) == 1 + 25
        first = [float(t) for t in lines[1].split(",")]
        np.testing.assert_allclose(first[2:], pos.vectors[0, 0], rtol=1e-15)

    def test_frames_csv(self, tmp_path):
        geom = make_catalog_surface("sphere", 5)
        frames = FrameField(geom.grid, geom.analytic_frames())
        path = tmp_path / "frames.csv"
        write_frames_csv(frames, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "alpha,beta,e1x,e1y,e1z,e2x,e2y,e2z,nx,ny,nz"
        last = [float(t) for t in lines[-1].split(",")]
        np.testing.assert_allclose(last[2:5], frames.e1[-1, -1], rtol=1e-15)
        np.testing.assert_allclose(last[8:11], frames.normal[-1, -1], rtol=1e-15)
