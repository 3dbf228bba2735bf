import numpy as np
import pytest

from qtoeplitz.cla import NonHermitianError, complex_svd_values, general_eig, herm_eig


def _householder_unitary(rng, n):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v = v / np.linalg.norm(v)
    return np.eye(n) - 2.0 * np.outer(v, v.conj())


class TestHermEig:
    def test_2x2_example(self):
        # char poly lambda^2 - 4 lambda + 3 -> {1, 3}
        h = np.array([[2.0, 1j], [-1j, 2.0]])
        np.testing.assert_allclose(herm_eig(h), [1.0, 3.0], atol=1e-12)

    def test_identity(self):
        np.testing.assert_allclose(herm_eig(np.eye(7)), np.ones(7))

    def test_scalar(self):
        np.testing.assert_allclose(herm_eig(np.array([[5.0]])), [5.0])

    def test_non_hermitian_rejected(self):
        with pytest.raises(NonHermitianError):
            herm_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_sum_equals_trace(self, rng):
        a = rng.standard_normal((40, 40)) + 1j * rng.standard_normal((40, 40))
        h = a + a.conj().T
        eigs = herm_eig(h)
        assert np.all(np.diff(eigs) >= 0)
        assert eigs.sum() == pytest.approx(np.trace(h).real, rel=1e-10)


class TestSvdValues:
    def test_nilpotent(self):
        np.testing.assert_allclose(
            complex_svd_values(np.array([[0.0, 1.0], [0.0, 0.0]])), [1.0, 0.0]
        )

    def test_diagonal_moduli(self):
        np.testing.assert_allclose(
            complex_svd_values(np.diag([-2.0, 3.0j])), [3.0, 2.0]
        )

    def test_against_eig_oracle(self, rng):
        a = rng.standard_normal((8, 5)) + 1j * rng.standard_normal((8, 5))
        gram = a.conj().T @ a
        oracle = np.sqrt(np.clip(herm_eig(gram)[::-1], 0.0, None))
        np.testing.assert_allclose(complex_svd_values(a), oracle, atol=1e-10)

    def test_unitary_invariance(self, rng):
        a = rng.standard_normal((6, 4)) + 1j * rng.standard_normal((6, 4))
        u = _householder_unitary(rng, 6)
        v = _householder_unitary(rng, 4)
        np.testing.assert_allclose(
            complex_svd_values(u @ a @ v), complex_svd_values(a), atol=1e-9
        )


class TestGeneralEig:
    def test_companion_of_lambda_sq_plus_one(self):
        eigs = general_eig(np.array([[0.0, 1.0], [-1.0, 0.0]]))
        assert sorted(np.round(eigs.imag, 10)) == [-1.0, 1.0]
        np.testing.assert_allclose(eigs.real, 0.0, atol=1e-12)

    def test_upper_triangular(self, rng):
        t = np.triu(rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)))
        eigs = np.sort_complex(general_eig(t))
        np.testing.assert_allclose(eigs, np.sort_complex(np.diag(t)), atol=1e-10)

    def test_trace_det(self, rng):
        a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        eigs = general_eig(a)
        assert eigs.sum() == pytest.approx(np.trace(a), rel=1e-8, abs=1e-8)
        assert np.prod(eigs) == pytest.approx(np.linalg.det(a), rel=1e-8)

    def test_matches_herm_eig_on_hermitian(self, rng):
        a = rng.standard_normal((7, 7)) + 1j * rng.standard_normal((7, 7))
        h = a + a.conj().T
        general = np.sort(general_eig(h).real)
        np.testing.assert_allclose(general, herm_eig(h), atol=1e-8)

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            general_eig(np.zeros((2, 3)))
