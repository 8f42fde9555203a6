import math

import numpy as np
import pytest

from gblab.angles import hazzidakis_boundary_rhs
from gblab.angles import hazzidakis_rhs
from gblab.angles import planar_solid_angle
from gblab.angles import solid_angle
from gblab.angles import solid_angles
from gblab.angles import volume_bound
from gblab.errors import DimensionError
from gblab.errors import DomainError
from gblab.errors import FrameError

SHEAR = [[1.0, 0.5], [0.0, 1.0]]


class TestSolidAngles:
    """
    Tests for the cone fractions.
    """

    @pytest.mark.parametrize(("axis", "sign"), [(0, 1), (0, -1), (1, 1), (1, -1)])
    def test_planar_square(self, axis, sign):
        """
        Test that the standard coframe cuts the circle into quarters.
        """
        assert planar_solid_angle(axis, sign, np.eye(2)) == 0.25

    def test_fractions_tile_the_sphere(self):
        """
        Test that the 2n fractions of one seed sum to one.
        """
        fractions = solid_angles(SHEAR, samples=50_000, seed=3)

        assert len(fractions) == 4
        assert sum(fractions) == pytest.approx(1.0, abs=1e-12)

    def test_monte_carlo_matches_planar(self):
        """
        Test the sampled fractions against the planar quadrature.
        """
        for axis in range(2):
            for sign in (1, -1):
                sampled = solid_angle(axis, sign, SHEAR, samples=200_000, seed=11)
                assert sampled == pytest.approx(planar_solid_angle(axis, sign, SHEAR), abs=5e-3)

    def test_symmetric_cube(self):
        """
        Test that the standard coframe in three dimensions gives six equal cones.
        """
        fractions = solid_angles(np.eye(3), samples=200_000, seed=5)

        np.testing.assert_allclose(fractions, 1.0 / 6.0, atol=5e-3)

    def test_reproducible(self):
        """
        Test that a seed fixes the result.
        """
        assert solid_angle(1, -1, SHEAR, 10_000, 99) == solid_angle(1, -1, SHEAR, 10_000, 99)

    @pytest.mark.parametrize(
        ("coframe", "error"),
        [
            pytest.param([[1.0, 2.0], [2.0, 4.0]], FrameError, id="singular"),
            pytest.param([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], DimensionError, id="rectangular"),
        ],
    )
    def test_bad_coframe(self, coframe, error):
        """
        Test coframe validation.
        """
        with pytest.raises(error):
            solid_angle(0, 1, coframe, samples=10)

    def test_bad_cone(self):
        """
        Test that the cone axis and sign are validated.
        """
        with pytest.raises(DomainError):
            solid_angle(2, 1, np.eye(2), samples=10)
        with pytest.raises(DomainError):
            solid_angle(0, 0, np.eye(2), samples=10)

    def test_planar_needs_two_dimensions(self):
        """
        Test that the deterministic quadrature is planar only.
        """
        with pytest.raises(DimensionError):
            planar_solid_angle(0, 1, np.eye(3))


class TestRightHandSides:
    """
    Tests for the Hazzidakis right-hand sides and the volume bound.
    """

    def test_euclidean_rhs(self):
        """
        Test that a tiling of the circle gives zero.
        """
        assert hazzidakis_rhs([0.25, 0.25, 0.25, 0.25]) == 0.0

    def test_rhs(self):
        """
        Test 1 - sum for a concrete corner.
        """
        assert hazzidakis_rhs([0.3, 0.3, 0.3, 0.3]) == pytest.approx(-0.2)

    def test_boundary_rhs(self):
        """
        Test the odd formula and its parity check.
        """
        assert hazzidakis_boundary_rhs([1.0 / 6.0] * 6) == pytest.approx(0.0, abs=1e-15)
        with pytest.raises(DimensionError):
            hazzidakis_boundary_rhs([0.25] * 4)

    @pytest.mark.parametrize(
        "fractions",
        [
            pytest.param([0.5, 0.5, 0.5], id="odd-count"),
            pytest.param([], id="empty"),
        ],
    )
    def test_fraction_count(self, fractions):
        """
        Test that 2n fractions are required.
        """
        with pytest.raises(DimensionError):
            hazzidakis_rhs(fractions)

    def test_fraction_range(self):
        """
        Test that fractions must lie in [0, 1].
        """
        with pytest.raises(DomainError):
            hazzidakis_rhs([0.5, 0.5, -0.1, 0.1])

    def test_volume_bound_surface(self):
        """
        Test area = -2 pi RHS for a surface.
        """
        assert volume_bound([0.3] * 4, 2) == pytest.approx(0.4 * math.pi)

    def test_volume_bound_three_dimensions(self):
        """
        Test that odd n doubles the bound, giving the boundary area.
        """
        assert volume_bound([0.2] * 6, 3) == pytest.approx(2.0 * 2.0 * math.pi * 0.2)

    def test_volume_bound_four_dimensions(self):
        """
        Test the c_2 = 3 normalization for n = 4.
        """
        assert volume_bound([0.1] * 8, 4) == pytest.approx(0.2 * (2.0 * math.pi) ** 2 / 3.0)

    def test_volume_bound_count(self):
        """
        Test that the fraction count must match n.
        """
        with pytest.raises(DimensionError):
            volume_bound([0.25] * 4, 3)
