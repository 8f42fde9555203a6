import math

import numpy as np
import pytest

from gblab.errors import DimensionError
from gblab.errors import DomainError
from gblab.errors import FixtureError
from gblab.errors import FrameError
from gblab.fixtures import hyperbolic_plane
from gblab.fixtures import load_fixture
from gblab.fixtures import sphere_angle_grid
from gblab.fixtures import sphere_in_space
from gblab.fixtures import sphere_volume_quadrature
from gblab.fixtures import unit_sphere_embedding
from gblab.forms import ChartGrid
from gblab.forms import MixedForm
from gblab.forms import integrate
from gblab.frames import FrameConnection
from gblab.frames import HypersurfaceFrame
from gblab.frames import PrincipalFrameData
from gblab.frames import apply_group_action
from gblab.frames import bianchi_residual
from gblab.frames import constant_curvature_residual
from gblab.frames import curvature
from gblab.frames import curvature_operator
from gblab.frames import euler_form
from gblab.frames import gauss_equation_residual
from gblab.frames import signed_average_euler
from gblab.group import GroupElement
from gblab.pfaffian import sphere_volume


class TestFrameConnection:
    """
    Tests for connection validation and access.
    """

    def test_omega_is_skew(self, sphere):
        """
        Test that omega_10 = -omega_01.
        """
        assert (sphere.omega(1, 0) + sphere.omega(0, 1)).max_abs() == 0.0
        assert sphere.omega(1, 1).max_abs() == 0.0

    def test_bad_pair(self, plane_grid):
        """
        Test that only pairs i < j are stored.
        """
        form = MixedForm.monomial(plane_grid, 2, (0,), (), 1.0)

        with pytest.raises(FrameError):
            FrameConnection(plane_grid, 2, {(1, 0): form})

    def test_wrong_bidegree(self, plane_grid):
        """
        Test that connection forms must be one-forms.
        """
        with pytest.raises(FrameError):
            FrameConnection(plane_grid, 2, {(0, 1): MixedForm.scalar(plane_grid, 2, 1.0)})

    def test_negative_orientation(self, plane_grid):
        """
        Test that a coframe with reversed orientation is rejected.
        """
        dy0 = MixedForm.monomial(plane_grid, 2, (0,), (), 1.0)
        dy1 = MixedForm.monomial(plane_grid, 2, (1,), (), 1.0)

        with pytest.raises(FrameError):
            FrameConnection(plane_grid, 2, {}, [dy1, dy0])

    def test_missing_coframe(self, plane_grid):
        """
        Test that theta is unavailable on a bare connection.
        """
        with pytest.raises(FrameError):
            FrameConnection(plane_grid, 2).theta(0)

    def test_frame_vectors_of_flat_chart(self, plane_grid):
        """
        Test that the frame dual to dy is d/dy.
        """
        vectors = FrameConnection.flat(plane_grid).frame_vectors()

        np.testing.assert_allclose(vectors[:, :, 4, 9], np.eye(2))

    def test_group_action(self, sphere):
        """
        Test that a single flip reverses omega_01.
        """
        flipped = apply_group_action(sphere, GroupElement.flip(2, 0))

        assert (flipped.omega(0, 1) + sphere.omega(0, 1)).max_abs() == 0.0


class TestCurvature:
    """
    Tests for curvature and the Euler form.
    """

    def test_sphere_has_curvature_one(self, sphere):
        """
        Test Omega_01 = theta_0 ^ theta_1 on the unit sphere.
        """
        assert constant_curvature_residual(sphere, 1.0) < 1e-3

    def test_hyperbolic_plane(self):
        """
        Test Omega_01 = -theta_0 ^ theta_1 on the upper half plane.
        """
        assert constant_curvature_residual(hyperbolic_plane(101), -1.0) < 1e-3

    def test_flat_torus(self):
        """
        Test that the trivial connection is flat.
        """
        assert curvature(load_fixture("flat_torus", 32)).max_abs() == 0.0

    def test_sphere_euler_characteristic(self, sphere):
        """
        Test that the Euler form of the sphere integrates to 2.
        """
        assert integrate(euler_form(curvature(sphere)), "simpson") == pytest.approx(2.0, abs=2e-3)

    def test_odd_rank_euler_form(self):
        """
        Test that the Euler form vanishes in odd rank.
        """
        conn = FrameConnection.flat(ChartGrid.uniform(3, 0.0, 1.0, 5))

        assert euler_form(curvature(conn)).max_abs() == 0.0

    def test_signed_average(self, sphere):
        """
        Test that averaging eps(g) e(Omega^g) over the group gives e(Omega).
        """
        difference = signed_average_euler(sphere) - euler_form(curvature(sphere))

        assert difference.max_abs() < 1e-12

    def test_curvature_operator(self, sphere):
        """
        Test R = -1/2 Omega_01 e_0 e_1 in rank two.
        """
        omega = curvature(sphere)

        operator = curvature_operator(omega)

        np.testing.assert_allclose(
            operator.coefficient((0, 1), (0, 1)),
            -0.5 * omega.omega(0, 1).coefficient((0, 1), ()),
        )

    def test_unknown_fixture(self):
        """
        Test that unknown fixture names raise FixtureError.
        """
        with pytest.raises(FixtureError):
            load_fixture("klein_bottle", 32)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_sphere_volume_quadrature(self, n):
        """
        Test the hyperspherical volume form against the closed form.
        """
        assert sphere_volume_quadrature(n, 101) == pytest.approx(sphere_volume(n), rel=1e-4)

    def test_unit_sphere_embedding(self):
        """
        Test that hyperspherical angles land on the unit sphere.
        """
        grid = sphere_angle_grid(4, 9)
        coordinates = unit_sphere_embedding(list(grid.coordinates()))

        assert len(coordinates) == 4
        np.testing.assert_allclose(sum(x**2 for x in coordinates), 1.0, atol=1e-14)

    def test_sphere_angles_domain(self):
        """
        Test that angles need a sphere of dimension at least one.
        """
        with pytest.raises(DomainError):
            sphere_angle_grid(1, 9)
        with pytest.raises(DomainError):
            unit_sphere_embedding([])


class TestHypersurface:
    """
    Tests for hypersurface frames and the Gauss equation.
    """

    def test_gauss_equation(self):
        """
        Test both forms of the Gauss equation on the unit sphere in R^3.
        """
        surface = sphere_in_space(101)
        ambient = surface.ambient_connection()

        form, operator = gauss_equation_residual(ambient, surface.boundary_connection())

        assert form < 1e-10
        assert operator < 1e-3

    def test_bianchi(self):
        """
        Test the Bianchi identity of the pulled back connection.
        """
        assert bianchi_residual(sphere_in_space(101).ambient_connection()) < 1e-10

    def test_rank_mismatch(self):
        """
        Test that the induced connection must have rank n - 1.
        """
        surface = sphere_in_space(101)

        with pytest.raises(FrameError):
            gauss_equation_residual(surface.ambient_connection(), surface.ambient_connection())

    def test_not_orthonormal(self):
        """
        Test that a scaled frame is rejected.
        """
        grid = ChartGrid.uniform(2, 0.0, 1.0, 9)
        x, y = grid.coordinates()
        zero, one = np.zeros_like(x), np.ones_like(x)
        frame = np.stack([np.stack([2.0 * one, zero, zero]), np.stack([zero, one, zero]), np.stack([zero, zero, one])])

        with pytest.raises(FrameError):
            HypersurfaceFrame(grid, np.stack([x, y, zero]), frame)

    def test_bad_shape(self):
        """
        Test that the position must have one row per ambient coordinate.
        """
        grid = ChartGrid.uniform(2, 0.0, 1.0, 9)

        with pytest.raises(DimensionError):
            HypersurfaceFrame(grid, np.zeros((2, 9, 9)), np.zeros((3, 3, 9, 9)))


class TestPrincipalFrameData:
    """
    Tests for principal data validation.
    """

    def test_unit_sum(self):
        """
        Test that sum x_i^2 must be one.
        """
        with pytest.raises(DomainError):
            PrincipalFrameData((np.full(3, 0.6), np.full(3, 0.6)))

    def test_accepts_unit_data(self):
        """
        Test cos and sin of a half angle.
        """
        angle = np.linspace(0.1, 1.0, 5)

        data = PrincipalFrameData((np.cos(angle), np.sin(angle)))

        assert data.y is None
        assert math.isclose(float(data.x[0][0]), math.cos(0.1))
