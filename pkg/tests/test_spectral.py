import math

import numpy as np
import pytest

from fdyson.errors import DimensionMismatch, NoConvergence, NotVeryGood
from fdyson.gaussian_paths import CovarianceModel
from fdyson.matrix_ensemble import simulate_hermitian, simulate_symmetric
from fdyson.models import GridSpec
from fdyson.spectral import (
    GRADIENT_BOUND,
    eigen_derivatives,
    eigen_path,
    eigh_jacobi,
    finite_difference_derivatives,
    hoffman_wielandt_gap,
    hoffman_wielandt_path,
)


def random_symmetric(rng, d):
    A = rng.standard_normal((d, d))
    return (A + A.T) / 2.0


def random_hermitian(rng, d):
    A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (A + A.conj().T) / 2.0


class TestJacobi:
    def test_diagonal(self):
        dec = eigh_jacobi(np.diag([1.0, 3.0, 2.0]))
        np.testing.assert_array_equal(dec.eigenvalues, [3.0, 2.0, 1.0])
        assert np.all(np.abs(dec.frame).sum(axis=0) == 1.0)
        assert not dec.very_good

    @pytest.mark.parametrize('d', [2, 3, 5, 8])
    def test_symmetric_matches_lapack(self, rng, d):
        M = random_symmetric(rng, d)
        dec = eigh_jacobi(M)
        np.testing.assert_allclose(dec.eigenvalues, np.linalg.eigvalsh(M)[::-1], atol=1e-12)
        dec.check(M)

    @pytest.mark.parametrize('d', [2, 4])
    def test_hermitian_matches_lapack(self, rng, d):
        M = random_hermitian(rng, d)
        dec = eigh_jacobi(M)
        assert dec.is_hermitian
        np.testing.assert_allclose(dec.eigenvalues, np.linalg.eigvalsh(M)[::-1], atol=1e-12)
        dec.check(M)

    def test_sign_convention(self, rng):
        dec = eigh_jacobi(random_hermitian(rng, 4))
        diag = np.diag(dec.frame)
        assert np.all(diag.real > 0)
        np.testing.assert_allclose(diag.imag, 0.0, atol=1e-12)

    def test_zero_matrix(self):
        dec = eigh_jacobi(np.zeros((3, 3)))
        np.testing.assert_array_equal(dec.eigenvalues, np.zeros(3))
        np.testing.assert_array_equal(dec.frame, np.eye(3))

    def test_no_convergence(self):
        with pytest.raises(NoConvergence) as info:
            eigh_jacobi(np.array([[1.0, 1.0], [1.0, -1.0]]), max_sweeps=0)
        assert info.value.sweeps == 0

    def test_not_square(self):
        with pytest.raises(DimensionMismatch):
            eigh_jacobi(np.zeros((2, 3)))

    def test_generic_matrix_is_very_good(self, rng):
        assert eigh_jacobi(random_symmetric(rng, 3)).very_good


class TestEigenPath:
    def test_nodewise(self, seed, small_grid):
        P = simulate_symmetric(3, small_grid, CovarianceModel.fbm(0.75), seed, np.diag([1.0, 0.0, -1.0]))
        ep = eigen_path(P)
        assert ep.values.shape == (3, small_grid.steps + 1)
        np.testing.assert_array_equal(ep.values[:, 0], [1.0, 0.0, -1.0])
        np.testing.assert_allclose(ep.values[:, 10], np.linalg.eigvalsh(P.matrices[10])[::-1], atol=1e-12)
        assert len(ep.frames) == small_grid.steps + 1
        assert ep.trace_residual() < 1e-12

    def test_without_frames(self, seed, small_grid):
        P = simulate_hermitian(2, small_grid, CovarianceModel.fbm(0.75), seed)
        ep = eigen_path(P, retain_frames=False)
        assert ep.frames is None
        assert np.all(np.diff(ep.values, axis=0) <= 0)

    def test_node_attached_to_error(self, seed, small_grid, monkeypatch):
        from fdyson import spectral

        original = spectral.eigh_jacobi

        def flaky(M, *args, **kwargs):
            if np.any(M):
                raise NoConvergence(100, 1.0)
            return original(M, *args, **kwargs)

        monkeypatch.setattr(spectral, 'eigh_jacobi', flaky)
        P = simulate_symmetric(2, small_grid, CovarianceModel.fbm(0.75), seed)
        with pytest.raises(NoConvergence) as info:
            eigen_path(P)
        assert info.value.node == 1


class TestDerivatives:
    def test_two_by_two_diagonal(self):
        der = eigen_derivatives(eigh_jacobi(np.diag([2.0, -2.0])))
        # coordenadas (0,0), (0,1), (1,1)
        np.testing.assert_allclose(der.gradient[0], [math.sqrt(2.0), 0.0, 0.0], atol=1e-15)
        assert der.hessian[0, 1] == pytest.approx(0.5)
        assert der.hessian[1, 1] == pytest.approx(-0.5)

    def test_strict_requires_very_good(self):
        dec = eigh_jacobi(np.diag([2.0, -2.0]))
        # espectro simple pero U con entradas nulas
        assert not dec.very_good
        assert eigen_derivatives(dec).gradient.shape == (2, 3)
        with pytest.raises(NotVeryGood):
            eigen_derivatives(dec, strict=True)

    def test_degenerate_spectrum(self):
        with pytest.raises(NotVeryGood):
            eigen_derivatives(eigh_jacobi(np.eye(3)))

    @pytest.mark.parametrize('hermitian, norm', [(False, 2.0), (True, 1.0)])
    def test_identities(self, rng, hermitian, norm):
        M = random_hermitian(rng, 4) if hermitian else random_symmetric(rng, 4)
        der = eigen_derivatives(eigh_jacobi(M))
        np.testing.assert_allclose(der.gradient_norms(), norm, atol=1e-10)
        np.testing.assert_allclose(der.hessian_traces(), der.expected_hessian_traces(), rtol=1e-8)
        assert np.max(np.abs(der.gradient)) <= GRADIENT_BOUND
        der.check()

    @pytest.mark.parametrize('hermitian', [False, True])
    def test_finite_differences(self, rng, hermitian):
        M = random_hermitian(rng, 3) if hermitian else random_symmetric(rng, 3)
        M = M + np.diag([3.0, 0.0, -3.0])
        der = eigen_derivatives(eigh_jacobi(M))
        grad, hess = finite_difference_derivatives(M)
        np.testing.assert_allclose(der.gradient, grad, atol=1e-6)
        np.testing.assert_allclose(der.hessian, hess, atol=1e-4)

    def test_frame_columns(self, rng):
        der = eigen_derivatives(eigh_jacobi(random_hermitian(rng, 2)))
        frame = der.to_frame()
        assert list(frame.columns) == ['i', 'k', 'h', 'grad', 'hess', 'part']
        assert len(frame) == 2 * 4


class TestHoffmanWielandt:
    def test_inequality(self, rng):
        for _ in range(20):
            A = random_symmetric(rng, 4)
            B = random_symmetric(rng, 4)
            lhs, rhs = hoffman_wielandt_gap(A, B)
            assert lhs <= rhs + 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            hoffman_wielandt_gap(np.eye(2), np.eye(3))

    def test_along_path(self, seed, small_grid):
        P = simulate_symmetric(3, small_grid, CovarianceModel.fbm(0.75), seed)
        result = hoffman_wielandt_path(eigen_path(P, retain_frames=False))
        assert result['steps'] == small_grid.steps
        assert result['classical_violations'] == 0
        assert result['max_ratio'] <= 1.0 + 1e-9
