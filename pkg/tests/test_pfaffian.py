import math

import numpy as np
import pytest
from scipy.stats import special_ortho_group

from gblab.errors import DimensionError
from gblab.errors import DomainError
from gblab.errors import NotSkewError
from gblab.pfaffian import SkewMatrix
from gblab.pfaffian import double_factorial_c
from gblab.pfaffian import expand_pfaffian
from gblab.pfaffian import gaussian_moment
from gblab.pfaffian import half_line_moment
from gblab.pfaffian import pfaffian
from gblab.pfaffian import pfaffian_by_definition
from gblab.pfaffian import pfaffian_by_expansion
from gblab.pfaffian import sphere_volume


class TestSkewMatrix:
    """
    Tests for SkewMatrix construction and validation.
    """

    def test_from_blocks(self):
        """
        Test that the block constructor places a_k above the diagonal.
        """
        skew = SkewMatrix.from_blocks([2.0, 3.0])

        assert skew.dim == 4
        np.testing.assert_array_equal(
            skew.entries,
            [[0, 2, 0, 0], [-2, 0, 0, 0], [0, 0, 0, 3], [0, 0, -3, 0]],
        )

    def test_entries_are_read_only(self):
        """
        Test that the stored matrix cannot be modified in place.
        """
        skew = SkewMatrix([[0.0, 1.0], [-1.0, 0.0]])

        with pytest.raises(ValueError, match="read-only"):
            skew.entries[0, 1] = 5.0

    def test_not_skew(self):
        """
        Test that a symmetric matrix is rejected.
        """
        with pytest.raises(NotSkewError):
            SkewMatrix([[0.0, 1.0], [1.0, 0.0]])

    @pytest.mark.parametrize(
        "entries",
        [
            pytest.param([[0.0, 1.0, 2.0], [-1.0, 0.0, 3.0]], id="rectangular"),
            pytest.param([0.0, 1.0], id="vector"),
            pytest.param(np.zeros((0, 0)), id="empty"),
        ],
    )
    def test_bad_shape(self, entries):
        """
        Test that non-square or empty input raises DimensionError.
        """
        with pytest.raises(DimensionError):
            SkewMatrix(entries)

    def test_conjugate_stays_skew(self, rng):
        """
        Test that conjugation by a rotation returns an exactly skew matrix.
        """
        skew = SkewMatrix.random(6, rng)
        rotation = special_ortho_group.rvs(dim=6, random_state=rng)

        conjugated = skew.conjugate(rotation)

        np.testing.assert_array_equal(conjugated.entries, -conjugated.entries.T)

    def test_not_skew_error_is_value_error(self):
        """
        Test that library errors can be caught as ValueError.
        """
        with pytest.raises(ValueError, match="not skew-symmetric"):
            SkewMatrix([[1.0, 0.0], [0.0, 1.0]])


class TestPfaffian:
    """
    Tests for the Pfaffian evaluations.
    """

    def test_block_product(self):
        """
        Test Pf of the block matrix with a_1 = 2 and a_2 = 3.
        """
        assert pfaffian(SkewMatrix.from_blocks([2.0, 3.0])) == pytest.approx(6.0)

    def test_two_by_two(self):
        """
        Test that Pf([[0, a], [-a, 0]]) = a.
        """
        assert pfaffian([[0.0, -1.5], [1.5, 0.0]]) == pytest.approx(-1.5)

    @pytest.mark.parametrize("dim", [2, 4, 6, 8, 10])
    def test_square_is_determinant(self, rng, dim):
        """
        Test Pf(A)^2 = det(A) on random skew matrices.
        """
        for _ in range(20):
            skew = SkewMatrix.random(dim, rng)
            det = np.linalg.det(skew.entries)
            assert abs(pfaffian(skew) ** 2 - det) <= 1e-9 * max(abs(det), 1.0)

    @pytest.mark.parametrize("dim", [2, 4, 6])
    def test_definition_matches_expansion(self, rng, dim):
        """
        Test that the permutation sum and the minor expansion agree.
        """
        skew = SkewMatrix.random(dim, rng)

        assert pfaffian_by_definition(skew) == pytest.approx(pfaffian_by_expansion(skew), rel=1e-10, abs=1e-10)

    def test_rotation_invariance_and_reflection_sign(self, rng):
        """
        Test Pf(B A B^T) = det(B) Pf(A) for a rotation and a reflection.
        """
        skew = SkewMatrix.random(6, rng)
        rotation = special_ortho_group.rvs(dim=6, random_state=rng)
        reflection = np.diag([-1.0, 1.0, 1.0, 1.0, 1.0, 1.0]) @ rotation

        assert pfaffian(skew.conjugate(rotation)) == pytest.approx(pfaffian(skew), rel=1e-9)
        assert pfaffian(skew.conjugate(reflection)) == pytest.approx(-pfaffian(skew), rel=1e-9)

    def test_odd_dimension(self):
        """
        Test that odd dimensions raise DimensionError.
        """
        with pytest.raises(DimensionError):
            pfaffian(np.zeros((3, 3)))

    def test_definition_dimension_limit(self, rng):
        """
        Test that the permutation sum refuses dimension 8.
        """
        with pytest.raises(DimensionError):
            pfaffian_by_definition(SkewMatrix.random(8, rng))

    def test_expansion_over_strings(self):
        """
        Test the generic expansion with symbolic entries.
        """

        def combine(terms):
            return " ".join(("+" if sign > 0 else "-") + term for sign, term in terms)

        result = expand_pfaffian((0, 1, 2, 3), lambda i, j: f"a{i}{j}", lambda x, y: x + y, combine, "")

        assert result == "+a01+a23 -a02+a13 +a03+a12"


class TestConstants:
    """
    Tests for the closed-form constants.
    """

    @pytest.mark.parametrize(("m", "expected"), [(1, 1), (2, 3), (3, 15), (4, 105)])
    def test_double_factorial_c(self, m, expected):
        """
        Test c_m = (2m - 1)!!.
        """
        assert double_factorial_c(m) == expected

    def test_double_factorial_domain(self):
        """
        Test that c_0 is rejected.
        """
        with pytest.raises(DomainError):
            double_factorial_c(0)

    @pytest.mark.parametrize(
        ("n", "expected"),
        [(1, 2.0), (2, 2.0 * math.pi), (3, 4.0 * math.pi), (4, 2.0 * math.pi**2)],
    )
    def test_sphere_volume(self, n, expected):
        """
        Test the volumes of S^0, S^1, S^2 and S^3.
        """
        assert sphere_volume(n) == pytest.approx(expected)

    def test_gaussian_moments(self):
        """
        Test the first Gaussian moments against their closed forms.
        """
        assert gaussian_moment(0) == pytest.approx(math.sqrt(math.pi))
        assert gaussian_moment(1) == pytest.approx(math.sqrt(math.pi) / 2.0)
        assert gaussian_moment(2) == pytest.approx(3.0 * math.sqrt(math.pi) / 4.0)

    def test_half_line_moments(self):
        """
        Test the half-line moments of e^{-t^2}.
        """
        assert half_line_moment(0) == pytest.approx(math.sqrt(math.pi) / 2.0)
        assert half_line_moment(1) == pytest.approx(0.5)
        assert half_line_moment(2) == pytest.approx(math.sqrt(math.pi) / 4.0)
