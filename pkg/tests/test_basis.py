import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from udep import basis
from udep.basis import FULL, ROTATION, SPECIAL_UNITARY, SYMMETRIC, CoordVector, Kind, Variant
from udep.errors import ShapeError, StructureError
from udep.linalg import complex_gaussian

S2 = np.sqrt(2)


def _random_skew(n, rng):
    a = complex_gaussian((n, n), rng)
    return 0.5 * (a - a.conj().T)


def _brute_pairs(size):
    return [(k, l) for k in range(1, size + 1) for l in range(k + 1, size + 1)]


class TestPairIndex:
    @pytest.mark.parametrize("n,pair", [(1, (1, 2)), (2, (1, 3)), (3, (2, 3))])
    def test_examples(self, n, pair):
        assert basis.pair_of_index(n, 3) == pair

    @pytest.mark.parametrize("size", [2, 3, 4, 7])
    def test_row_major_enumeration(self, size):
        got = [basis.pair_of_index(i, size) for i in range(1, size * (size - 1) // 2 + 1)]
        assert got == _brute_pairs(size)
        ks = [k for k, _ in got]
        # N-1 ones, then N-2 twos, ...
        assert ks == [k for k in range(1, size) for _ in range(size - k)]

    @pytest.mark.parametrize("n", [0, 4])
    def test_out_of_range(self, n):
        with pytest.raises(IndexError):
            basis.pair_of_index(n, 3)


class TestBasisElement:
    def test_first(self):
        assert np.allclose(basis.basis_element(1, 2), 1j / S2 * np.eye(2))

    def test_symmetric(self):
        assert np.allclose(basis.basis_element(3, 2), 1j / S2 * np.array([[0, 1], [1, 0]]))

    def test_antisymmetric(self):
        assert np.allclose(basis.basis_element(4, 2), 1 / S2 * np.array([[0, 1], [-1, 0]]))

    def test_diagonal_gell_mann(self):
        b = basis.basis_element(3, 3)
        assert np.allclose(b, 1j / np.sqrt(6) * np.diag([1, 1, -2]))

    @pytest.mark.parametrize("size", range(1, 9))
    def test_orthonormal_and_skew(self, size):
        elems = [basis.basis_element(n, size) for n in range(1, size * size + 1)]
        gram = np.array([[np.real(np.vdot(a, b)) for b in elems] for a in elems])
        assert np.allclose(gram, np.eye(size * size), atol=1e-12)
        for i, b in enumerate(elems):
            assert np.allclose(b, -b.conj().T)
            if i > 0:
                assert abs(np.trace(b)) < 1e-12

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            basis.basis_element(5, 2)


class TestDims:
    @pytest.mark.parametrize("variant,n,d", [
        (FULL, 4, 16), (SYMMETRIC, 4, 10), (ROTATION, 4, 6), (SPECIAL_UNITARY, 4, 15),
        (Variant.block_diagonal([4, 4]), 8, 32), (Variant.block_diagonal([1, 2, 3]), 6, 14),
    ])
    def test_census(self, variant, n, d):
        assert basis.dims(variant, n) == d


class TestVariant:
    @pytest.mark.parametrize("text", ["full", "su", "symmetric", "rotation", "block:4,4"])
    def test_parse_roundtrip(self, text):
        assert str(Variant.parse(text)) == text

    @pytest.mark.parametrize("text", ["nope", "block:", "block:0,2", "block:a"])
    def test_parse_errors(self, text):
        with pytest.raises(ValueError):
            Variant.parse(text)

    def test_blocks_only_for_block_diagonal(self):
        with pytest.raises(ValueError):
            Variant(Kind.FULL, (2,))

    def test_coord_vector_length(self):
        with pytest.raises(ShapeError):
            CoordVector(2, FULL, np.zeros(3))


class TestCoords:
    @pytest.mark.parametrize("variant", [FULL, SPECIAL_UNITARY, SYMMETRIC, ROTATION])
    def test_zero(self, variant):
        c = basis.coords_from_skew(np.zeros((3, 3)), variant)
        assert np.array_equal(c.coords, np.zeros(basis.dims(variant, 3)))

    def test_bound_witness(self):
        c = basis.coords_from_skew(1j * np.pi * np.eye(2))
        assert np.allclose(c.coords, [S2 * np.pi, 0, 0, 0])

    def test_diagonal(self):
        c = basis.coords_from_skew(np.diag([1j * np.pi / 2, -1j * np.pi / 2]))
        assert np.allclose(c.coords, [0, np.pi / S2, 0, 0])

    def test_synthesis_examples(self):
        assert np.array_equal(basis.skew_from_coords(CoordVector(2, FULL, np.zeros(4))), np.zeros((2, 2)))
        x = basis.skew_from_coords(CoordVector(2, FULL, [S2 * np.pi, 0, 0, 0]))
        assert np.allclose(x, 1j * np.pi * np.eye(2))

    @pytest.mark.parametrize("size", [1, 2, 3, 5, 8])
    def test_matches_materialized_basis(self, size, rng):
        # closed forms agree with projecting vec(X) on the explicit basis matrix
        x = _random_skew(size, rng)
        ub = basis.basis_matrix(size)
        expected = np.real(ub.conj().T @ x.reshape(-1, order="F"))
        assert np.allclose(basis.coords_from_skew(x).coords, expected, atol=1e-12)

    def test_structure_errors(self, rng):
        x = _random_skew(3, rng)
        with pytest.raises(StructureError):
            basis.coords_from_skew(x, SYMMETRIC)
        with pytest.raises(StructureError):
            basis.coords_from_skew(x, ROTATION)
        with pytest.raises(StructureError):
            basis.coords_from_skew(np.eye(3))

    def test_symmetric_positions(self, rng):
        a = rng.standard_normal((4, 4))
        x = 1j * (a + a.T)
        full = basis.coords_from_skew(x).coords
        sym = basis.coords_from_skew(x, SYMMETRIC).coords
        assert np.allclose(full[10:], 0)
        assert np.array_equal(sym, full[:10])

    def test_rotation_positions(self, rng):
        a = rng.standard_normal((4, 4))
        x = (a - a.T).astype(complex)
        full = basis.coords_from_skew(x).coords
        assert np.allclose(full[:10], 0)
        assert np.allclose(basis.coords_from_skew(x, ROTATION).coords, full[10:])


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_isometry_and_inverse(size, seed):
    rng = np.random.default_rng(seed)
    x = _random_skew(size, rng)
    c = basis.coords_from_skew(x)
    assert abs(np.linalg.norm(c.coords) - np.linalg.norm(x)) <= 1e-10
    assert np.allclose(basis.skew_from_coords(c), x, atol=1e-12)
    alpha = rng.uniform(-3, 3, size * size)
    back = basis.coords_from_skew(basis.skew_from_coords(CoordVector(size, FULL, alpha)))
    assert np.allclose(back.coords, alpha, atol=1e-12)
