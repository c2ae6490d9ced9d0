import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from udep import linalg
from udep.errors import DegenerateProjectionError, FormatError, PreconditionError


def _random_hermitian(n, rng):
    a = linalg.complex_gaussian((n, n), rng)
    return a + a.conj().T


def _series_exp(x, terms=60):
    """Truncated Taylor series, an oracle independent of eigendecomposition."""
    out = np.eye(x.shape[0], dtype=complex)
    term = np.eye(x.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ x / k
        out = out + term
    return out


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
class TestHermitianEig:
    def test_diagonal(self, method):
        e = linalg.hermitian_eig(np.diag([3.0, 1.0]), method=method)
        assert np.allclose(e.eigenvalues, [1, 3])
        assert np.allclose(np.abs(e.eigenvectors), [[0, 1], [1, 0]])

    def test_pauli_x(self, method):
        e = linalg.hermitian_eig(np.array([[0, 1], [1, 0]]), method=method)
        assert np.allclose(e.eigenvalues, [-1, 1])
        ref = np.array([[-1, 1], [1, 1]]) / np.sqrt(2)
        # columns agree up to a phase
        for k in range(2):
            assert abs(abs(np.vdot(ref[:, k], e.eigenvectors[:, k])) - 1) < 1e-12

    def test_identity(self, method):
        e = linalg.hermitian_eig(np.eye(4), method=method)
        assert np.allclose(e.eigenvalues, 1)
        assert np.allclose(e.eigenvectors, np.eye(4))

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 16])
    def test_random_reconstruction(self, method, n, rng):
        a = _random_hermitian(n, rng)
        e = linalg.hermitian_eig(a, method=method)
        v, lam = e.eigenvectors, e.eigenvalues
        assert np.all(np.diff(lam) >= 0)
        assert linalg.unitarity_defect(v) <= 1e-10 * n
        assert np.linalg.norm(v @ np.diag(lam) @ v.conj().T - a) <= 1e-10 * n * np.linalg.norm(a)
        assert np.allclose(lam, scipy.linalg.eigvalsh(a), atol=1e-10 * np.linalg.norm(a))

    def test_rejects_non_hermitian(self, method):
        with pytest.raises(PreconditionError):
            linalg.hermitian_eig(np.array([[0, 1], [0, 0]]), method=method)


def test_jacobi_matches_lapack_on_degenerate_spectrum(rng):
    q = linalg.haar_unitary(6, rng)
    a = q @ np.diag([1, 1, 1, 2, 2, 5]) @ q.conj().T
    a = 0.5 * (a + a.conj().T)
    e = linalg.hermitian_eig(a, method="jacobi")
    assert np.allclose(e.eigenvalues, [1, 1, 1, 2, 2, 5], atol=1e-12)
    assert linalg.unitarity_defect(e.eigenvectors) <= 1e-12


class TestUnitaryEig:
    def test_identity(self):
        assert np.allclose(linalg.unitary_eig(np.eye(2)).phases, 0)

    def test_diagonal(self):
        p = linalg.unitary_eig(np.diag([1j, -1j])).phases
        assert sorted(p) == pytest.approx([-np.pi / 2, np.pi / 2])

    def test_minus_identity_maps_to_pi(self):
        p = linalg.unitary_eig(-np.eye(2)).phases
        assert np.all(p == np.pi)

    def test_rejects_non_unitary(self):
        with pytest.raises(PreconditionError):
            linalg.unitary_eig(2 * np.eye(2))

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 8, 16])
    def test_reconstruction(self, n, rng):
        for _ in range(20):
            u = linalg.haar_unitary(n, rng)
            e = linalg.unitary_eig(u)
            v = e.eigenvectors
            assert np.all((e.phases > -np.pi) & (e.phases <= np.pi))
            assert np.linalg.norm(v @ np.diag(np.exp(1j * e.phases)) @ v.conj().T - u) <= 1e-9 * n

    def test_clustered_and_conjugate_spectrum(self, rng):
        # eigenvalues at +-1, conjugate pairs and a near-degenerate cluster
        q = linalg.haar_unitary(7, rng)
        phi = np.array([0.0, np.pi, 0.4, -0.4, np.pi / 2, -np.pi / 2, 0.4 + 1e-9])
        u = q @ np.diag(np.exp(1j * phi)) @ q.conj().T
        e = linalg.unitary_eig(u)
        v = e.eigenvectors
        assert np.linalg.norm(v @ np.diag(np.exp(1j * e.phases)) @ v.conj().T - u) <= 1e-9 * 7
        assert np.allclose(np.sort(e.phases), np.sort(phi), atol=1e-7)


class TestLogExp:
    def test_log_identity(self):
        assert np.allclose(linalg.matrix_log_unitary(np.eye(3)), 0)

    def test_log_diagonal(self):
        x = linalg.matrix_log_unitary(np.diag([1j, -1j]))
        assert np.allclose(x, np.diag([1j * np.pi / 2, -1j * np.pi / 2]))

    def test_log_minus_identity(self):
        assert np.allclose(linalg.matrix_log_unitary(-np.eye(2)), 1j * np.pi * np.eye(2))

    def test_exp_zero(self):
        assert np.array_equal(linalg.matrix_exp_skew(np.zeros((3, 3))), np.eye(3))

    def test_exp_diagonal(self):
        u = linalg.matrix_exp_skew(np.diag([1j * np.pi / 2, -1j * np.pi / 2]))
        assert np.allclose(u, np.diag([1j, -1j]))

    @pytest.mark.parametrize("theta", [0.1, 1.0])
    def test_exp_plane_rotation(self, theta):
        x = np.array([[0, theta], [-theta, 0]], dtype=complex)
        u = linalg.matrix_exp_skew(x)
        expected = np.array([[np.cos(theta), np.sin(theta)], [-np.sin(theta), np.cos(theta)]])
        assert np.allclose(u, expected, atol=1e-14)
        assert np.allclose(u, _series_exp(x), atol=1e-14)

    def test_exp_rejects_non_skew(self):
        with pytest.raises(PreconditionError):
            linalg.matrix_exp_skew(np.eye(2))

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 8, 16])
    def test_exp_log_roundtrip(self, n, rng):
        for _ in range(100):
            u = linalg.haar_unitary(n, rng)
            x = linalg.matrix_log_unitary(u)
            assert np.linalg.norm(x + x.conj().T) <= 1e-9 * n
            assert np.linalg.norm(linalg.matrix_exp_skew(x) - u) <= 1e-9 * n

    def test_log_matches_scipy(self, rng):
        u = linalg.haar_unitary(5, rng)
        assert np.allclose(linalg.matrix_log_unitary(u), scipy.linalg.logm(u), atol=1e-9)

    def test_exp_matches_scipy(self, rng):
        a = linalg.complex_gaussian((6, 6), rng)
        x = a - a.conj().T
        assert np.allclose(linalg.matrix_exp_skew(x), scipy.linalg.expm(x), atol=1e-10)


class TestSvd:
    def test_diagonal(self):
        s = linalg.svd(np.diag([2.0, 1.0]))
        assert np.allclose(s.singulars, [2, 1])
        assert np.allclose(np.abs(s.left), np.eye(2)) and np.allclose(np.abs(s.right), np.eye(2))

    def test_reordered(self):
        s = linalg.svd(np.diag([1.0, 3.0]))
        assert np.allclose(s.singulars, [3, 1])
        swap = np.array([[0, 1], [1, 0]])
        assert np.allclose(np.abs(s.left), swap) and np.allclose(np.abs(s.right), swap)

    def test_unitary_has_unit_singulars(self, rng):
        assert np.allclose(linalg.svd(linalg.haar_unitary(5, rng)).singulars, 1)

    def test_reconstruction(self, rng):
        a = linalg.complex_gaussian((7, 4), rng)
        s = linalg.svd(a)
        assert np.all(np.diff(s.singulars) <= 0)
        rec = s.left @ np.diag(s.singulars) @ s.right.conj().T
        assert np.linalg.norm(rec - a) <= 1e-8 * np.linalg.norm(a)


class TestNearestUnitary:
    def test_scaled_identity(self):
        assert np.allclose(linalg.nearest_unitary(2 * np.eye(3)), np.eye(3))

    def test_fixed_point(self, rng):
        u = linalg.haar_unitary(4, rng)
        assert np.allclose(linalg.nearest_unitary(u), u)

    def test_positive_diagonal(self):
        assert np.allclose(linalg.nearest_unitary(np.diag([2.0, 0.5])), np.eye(2))

    def test_rank_deficient(self):
        with pytest.raises(DegenerateProjectionError):
            linalg.nearest_unitary(np.diag([1.0, 0.0]))

    def test_beats_random_competitors(self, rng):
        a = linalg.complex_gaussian((4, 4), rng)
        best = np.linalg.norm(linalg.nearest_unitary(a) - a)
        for _ in range(50):
            assert best <= np.linalg.norm(linalg.haar_unitary(4, rng) - a)


class TestHaar:
    def test_scalar_is_unimodular(self, rng):
        u = linalg.haar_unitary(1, rng)
        assert abs(abs(u[0, 0]) - 1) < 1e-15

    def test_deterministic(self):
        a = linalg.haar_unitary(5, np.random.default_rng(3))
        b = linalg.haar_unitary(5, np.random.default_rng(3))
        assert np.array_equal(a, b)

    def test_first_moment(self, rng):
        vals = [abs(linalg.haar_unitary(4, rng)[0, 0]) ** 2 for _ in range(10000)]
        assert abs(np.mean(vals) - 0.25) < 0.01

    def test_unitary(self, rng):
        for n in (1, 2, 8, 32):
            assert linalg.unitarity_defect(linalg.haar_unitary(n, rng)) <= 1e-10 * n


def test_unitarity_defect_examples():
    assert linalg.unitarity_defect(np.eye(3)) == 0
    # 2I gives A^H A - I = 3I, whose Frobenius norm is 3 * sqrt(2)
    assert linalg.unitarity_defect(2 * np.eye(2)) == pytest.approx(3 * np.sqrt(2))


class TestMatrixText:
    def test_roundtrip_exact(self, rng):
        a = linalg.complex_gaussian((3, 5), rng)
        assert np.array_equal(linalg.read_matrix(linalg.write_matrix(a)), a)

    @pytest.mark.parametrize("text,code", [
        ("", "empty"),
        ("2\n", "bad-header"),
        ("2 2\n1 0 0 0\n", "bad-rows"),
        ("1 1\nx 0\n", "bad-number"),
        ("1 2\n1 0\n", "bad-row"),
        ("1 1\nnan 0\n", "bad-number"),
    ])
    def test_errors(self, text, code):
        with pytest.raises(FormatError) as info:
            linalg.read_matrix(text)
        assert info.value.code == code


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_log_is_skew_and_inverts_exp(n, seed):
    u = linalg.haar_unitary(n, np.random.default_rng(seed))
    x = linalg.matrix_log_unitary(u)
    phases = linalg.unitary_eig(u).phases
    assert not np.any(np.isnan(phases))
    assert np.linalg.norm(x + x.conj().T) <= 1e-9 * n
    assert np.linalg.norm(linalg.matrix_exp_skew(x) - u) <= 1e-9 * n
