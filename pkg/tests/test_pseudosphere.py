import math

import numpy as np
import pytest

from gblab.angles import hazzidakis_rhs
from gblab.angles import volume_bound
from gblab.errors import DomainError
from gblab.errors import FixtureError
from gblab.errors import GridError
from gblab.frames import principal_frame_residuals
from gblab.pseudosphere import DEFAULT_RECTANGLE
from gblab.pseudosphere import Rectangle
from gblab.pseudosphere import SineGordonSolution
from gblab.pseudosphere import Soliton
from gblab.pseudosphere import chebyshev_curvature_residual
from gblab.pseudosphere import convergence_table
from gblab.pseudosphere import corner_angle_fractions
from gblab.pseudosphere import gauss_bonnet_closed
from gblab.pseudosphere import hazzidakis_corner_sum
from gblab.pseudosphere import hyperbolic_area
from gblab.pseudosphere import one_soliton
from gblab.pseudosphere import principal_frame_data
from gblab.pseudosphere import sine_gordon_residual


@pytest.fixture(scope="module")
def soliton():
    return one_soliton(1.0, DEFAULT_RECTANGLE, 129)


class TestFixtures:
    """
    Tests for rectangles and the one-soliton fixture.
    """

    def test_rectangle_order(self):
        """
        Test that reversed bounds are refused.
        """
        with pytest.raises(DomainError):
            Rectangle(1.0, 0.0, 0.0, 1.0)

    def test_degenerate_rectangle(self):
        """
        Test that a segment has zero corner sum.
        """
        rectangle = Rectangle(0.2, 0.2, 0.1, 0.9)

        assert rectangle.degenerate
        assert Soliton(1.5).corner_sum(rectangle) == 0.0

    def test_degenerate_solution(self):
        """
        Test that the one-soliton on a segment has zero area and zero corner sum.
        """
        sol = one_soliton(1.0, Rectangle(0.5, 0.5, 0.1, 1.1), 65)

        assert hyperbolic_area(sol) == 0.0
        assert hazzidakis_corner_sum(sol) == 0.0
        with pytest.raises(GridError):
            sine_gordon_residual(sol)
        with pytest.raises(DomainError):
            principal_frame_data(sol)

    def test_soliton_parameter(self):
        """
        Test that mu must be positive.
        """
        with pytest.raises(DomainError):
            Soliton(0.0)

    def test_soliton_branch(self):
        """
        Test that a rectangle with negative phase leaves the admissible range.
        """
        with pytest.raises(DomainError):
            one_soliton(1.0, Rectangle(-2.0, -1.0, -2.0, -1.0), 33)

    def test_shape_mismatch(self, soliton):
        """
        Test that the net angle must match the chart.
        """
        with pytest.raises(GridError):
            SineGordonSolution(soliton.grid, np.full((3, 3), 1.0))

    def test_corners_match_closed_form(self, soliton):
        """
        Test that the sampled corners reproduce the exact corner sum.
        """
        assert hazzidakis_corner_sum(soliton) == pytest.approx(Soliton(1.0).corner_sum(DEFAULT_RECTANGLE), abs=1e-14)
        assert soliton.rectangle == DEFAULT_RECTANGLE


class TestHazzidakis:
    """
    Tests for the area identity on asymptotic rectangles.
    """

    @pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
    def test_area_equals_corner_sum(self, mu):
        """
        Test area = theta(b, d) - theta(b, c) - theta(a, d) + theta(a, c).
        """
        sol = one_soliton(mu, DEFAULT_RECTANGLE, 129)

        assert hyperbolic_area(sol) == pytest.approx(hazzidakis_corner_sum(sol), abs=1e-6)

    def test_angle_fractions(self, soliton):
        """
        Test that the corner fractions give -area / 2 pi and the area bound.
        """
        fractions = corner_angle_fractions(soliton)
        corner = hazzidakis_corner_sum(soliton)

        assert all(0.0 < fraction < 0.5 for fraction in fractions)
        assert hazzidakis_rhs(fractions) == pytest.approx(-corner / (2.0 * math.pi), abs=1e-14)
        assert volume_bound(fractions, 2) == pytest.approx(corner, abs=1e-13)

    def test_area_below_two_pi(self):
        """
        Test that a large rectangle still has area below 2 pi.
        """
        sol = one_soliton(1.0, Rectangle(0.05, 3.0, 0.05, 3.0), 129)

        assert 0.0 < hyperbolic_area(sol) < 2.0 * math.pi

    def test_sine_gordon_residual(self, soliton):
        """
        Test that the fixture solves theta_zw = sin(theta).
        """
        assert sine_gordon_residual(soliton) < 1e-3

    def test_residual_of_a_non_solution(self):
        """
        Test that a constant net angle misses the equation by sin(theta).
        """
        sol = SineGordonSolution.sample(lambda z, _w: np.full_like(z, math.pi / 2.0), DEFAULT_RECTANGLE, 33)

        assert sine_gordon_residual(sol) == pytest.approx(1.0, abs=1e-12)

    def test_residual_needs_samples(self):
        """
        Test the minimum resolution of the residual.
        """
        with pytest.raises(GridError):
            sine_gordon_residual(one_soliton(1.0, DEFAULT_RECTANGLE, 17))

    def test_chebyshev_curvature(self):
        """
        Test that the Chebyshev metric has curvature -1.
        """
        assert chebyshev_curvature_residual(one_soliton(1.0, DEFAULT_RECTANGLE, 257)) < 1e-3

    def test_convergence(self):
        """
        Test second-order convergence of the trapezoid area.
        """
        table = convergence_table(1.0, (65, 129, 257))

        assert table.rule == "trapezoid"
        assert len(table.rows) == 3
        assert table.order == pytest.approx(2.0, abs=0.25)
        assert table.constant < 10.0
        assert [row.as_dict()["resolution"] for row in table.rows] == [65, 129, 257]


class TestClosedSurfaces:
    """
    Tests for Gauss-Bonnet on closed fixtures.
    """

    def test_sphere(self):
        """
        Test chi = 2 for the round sphere.
        """
        assert gauss_bonnet_closed("round_sphere", 101) == pytest.approx(2.0, abs=2e-3)

    def test_torus(self):
        """
        Test chi = 0 for the flat torus.
        """
        assert gauss_bonnet_closed("flat_torus", 33) == pytest.approx(0.0, abs=1e-10)

    @pytest.mark.parametrize("name", ["disk_boundary", "no_such_surface"])
    def test_not_closed(self, name):
        """
        Test that open or unknown fixtures are refused.
        """
        with pytest.raises(FixtureError):
            gauss_bonnet_closed(name)


class TestPrincipalFrame:
    """
    Tests for the principal frame of the soliton surface.
    """

    def test_residuals(self, soliton):
        """
        Test the principal-frame identities on the soliton surface.
        """
        frame = principal_frame_data(soliton)

        residuals = principal_frame_residuals(frame.data, frame.connection, frame.normal_forms)

        for value in residuals.as_dict().values():
            assert value is not None
            assert value < 1e-3

    def test_unit_data(self, soliton):
        """
        Test that x_1^2 + x_2^2 = 1 for the half-angle data.
        """
        x1, x2 = principal_frame_data(soliton, 33).data.x

        np.testing.assert_allclose(x1**2 + x2**2, 1.0, atol=1e-14)

    def test_needs_closed_form(self):
        """
        Test that a sampled solution without a formula is refused.
        """
        sol = SineGordonSolution.sample(Soliton(1.0).theta, DEFAULT_RECTANGLE, 33)

        with pytest.raises(DomainError):
            principal_frame_data(sol)
