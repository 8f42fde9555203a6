import numpy as np
import pytest
from pytest_mock import MockerFixture
from scipy.stats import ortho_group

from gblab.errors import CommutationError
from gblab.errors import DimensionError
from gblab.errors import DomainError
from gblab.errors import KernelError
from gblab.flatform import FlatBilinearTensor
from gblab.flatform import degenerate
from gblab.flatform import diagonal_instance
from gblab.flatform import diagonalize
from gblab.flatform import exterior_orthogonality_residual
from gblab.flatform import find_regular_element
from gblab.flatform import flatness_residual
from gblab.flatform import image_dimension
from gblab.flatform import jacobi_joint_diagonalize
from gblab.flatform import planted
from gblab.flatform import pseudosphere_instance
from gblab.flatform import recovery_error


def _generic(n: int, rng: np.random.Generator) -> FlatBilinearTensor:
    h = rng.standard_normal((n, n, n))
    return FlatBilinearTensor((h + h.transpose(0, 2, 1)) / 2.0)


class TestFlatBilinearTensor:
    """
    Tests for tensor validation and evaluation.
    """

    def test_shape(self):
        """
        Test that h must be n x n x n.
        """
        with pytest.raises(DimensionError):
            FlatBilinearTensor(np.zeros((2, 2, 3)))

    def test_symmetric_slices(self):
        """
        Test that asymmetric slices are rejected.
        """
        h = np.zeros((2, 2, 2))
        h[0, 0, 1] = 1.0

        with pytest.raises(DomainError):
            FlatBilinearTensor(h)

    def test_read_only(self):
        """
        Test that the stored tensor is immutable.
        """
        tensor = diagonal_instance(2)

        with pytest.raises(ValueError, match="read-only"):
            tensor.h[0, 0, 0] = 2.0

    def test_evaluate(self):
        """
        Test beta(x, y) for the coordinate product form.
        """
        tensor = diagonal_instance(3)

        np.testing.assert_allclose(tensor.evaluate(np.array([1.0, 2.0, 3.0]), np.array([4.0, 5.0, 6.0])), [4, 10, 18])

    def test_from_terms_shapes(self):
        """
        Test that weights and directions must match.
        """
        with pytest.raises(DimensionError):
            FlatBilinearTensor.from_terms(np.eye(3), np.eye(2))

    def test_image_dimension(self):
        """
        Test dim beta(v)(V) for a coordinate direction and a generic one.
        """
        tensor = diagonal_instance(3)

        assert image_dimension(tensor, np.array([1.0, 0.0, 0.0])) == 1
        assert image_dimension(tensor, np.array([1.0, 2.0, 3.0])) == 3


class TestFlatness:
    """
    Tests for the flatness residuals.
    """

    def test_planted_is_flat(self, rng):
        """
        Test that rank-one splittings with orthogonal weights are flat.
        """
        instance = planted(4, rng)

        assert flatness_residual(instance.tensor) < 1e-10
        assert exterior_orthogonality_residual(instance.tensor) < 1e-10

    def test_generic_is_not_flat(self, rng):
        """
        Test that a random symmetric tensor is far from flat.
        """
        assert flatness_residual(_generic(3, rng)) > 1e-3


class TestDiagonalize:
    """
    Tests for the rank-one splitting.
    """

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_planted_recovery(self, rng, n):
        """
        Test that the planted directions are recovered with small residuals.
        """
        for _ in range(5):
            instance = planted(n, rng)

            result = diagonalize(instance.tensor, seed=int(rng.integers(2**31)))

            assert recovery_error(instance.phi, result.phi) < 1e-8
            assert max(result.residuals.values()) < 1e-7

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_general_rows(self, rng, n):
        """
        Test recovery when the directions are not orthogonal.
        """
        instance = planted(n, rng, orthogonal_rows=False)

        result = diagonalize(instance.tensor)

        assert recovery_error(instance.phi, result.phi) < 1e-8
        assert result.residuals["reconstruction"] < 1e-7
        assert result.residuals["orthogonality"] < 1e-7

    def test_coordinate_form(self):
        """
        Test the form sum x_i y_i w_i, whose splitting is the coordinate coframe.
        """
        result = diagonalize(diagonal_instance(3))

        assert recovery_error(np.eye(3), result.phi) < 1e-12
        assert result.residuals["reconstruction"] < 1e-12

    def test_pseudosphere(self):
        """
        Test that the curvature -1 surface form splits along the principal directions.
        """
        x1, x2 = 0.6, 0.8

        result = diagonalize(pseudosphere_instance(x1, x2))

        assert recovery_error(np.eye(2), result.phi) < 1e-10
        np.testing.assert_allclose(sorted(np.sum(result.phi**2, axis=1)), sorted([1.0 / x1, 1.0 / x2]), rtol=1e-10)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_kernel(self, rng, n):
        """
        Test that n - 1 rank-one terms leave a kernel.
        """
        with pytest.raises(KernelError):
            diagonalize(degenerate(n, rng).tensor)

    def test_not_flat(self, rng):
        """
        Test that a generic symmetric tensor fails to commute.
        """
        with pytest.raises(CommutationError):
            diagonalize(_generic(3, rng))

    def test_flatness_warning(self, mocker: MockerFixture, caplog):
        """
        Test that a commuting form failing the flatness gate is split with a warning.
        """
        mocker.patch("gblab.flatform.flatness_residual", return_value=1e-3)

        with caplog.at_level("WARNING", logger="gblab.flatform"):
            result = diagonalize(diagonal_instance(3))

        assert recovery_error(np.eye(3), result.phi) < 1e-12
        assert "exceeds" in caplog.text

    def test_flat_input_is_quiet(self, caplog):
        """
        Test that a flat form is split without a warning.
        """
        with caplog.at_level("WARNING", logger="gblab.flatform"):
            diagonalize(diagonal_instance(3))

        assert caplog.records == []

    def test_as_dict(self):
        """
        Test the JSON shape of a result.
        """
        payload = diagonalize(diagonal_instance(2)).as_dict()

        assert sorted(payload) == ["A", "basis", "phi", "residuals"]
        assert len(payload["phi"]) == 2


class TestHelpers:
    """
    Tests for joint diagonalization and matching.
    """

    def test_joint_diagonalization(self, rng):
        """
        Test that two commuting symmetric matrices are diagonalized together.
        """
        q = ortho_group.rvs(dim=4, random_state=rng)
        stack = np.stack([q @ np.diag([1.0, 2.0, 3.0, 4.0]) @ q.T, q @ np.diag([4.0, 1.0, 1.0, 2.0]) @ q.T])

        rotation, rotated = jacobi_joint_diagonalize(stack)

        off = rotated - np.stack([np.diag(np.diag(block)) for block in rotated])
        assert np.max(np.abs(off)) < 1e-9
        np.testing.assert_allclose(rotation.T @ rotation, np.eye(4), atol=1e-12)

    def test_recovery_error_ignores_order_and_sign(self):
        """
        Test that permuted, negated and rescaled rows match exactly.
        """
        rows = np.array([[1.0, 0.0], [1.0, 1.0]])

        assert recovery_error(rows, np.array([[-2.0, -2.0], [3.0, 0.0]])) == pytest.approx(0.0, abs=1e-15)

    def test_recovery_error_shape(self):
        """
        Test that the row sets must have equal shapes.
        """
        with pytest.raises(DimensionError):
            recovery_error(np.eye(2), np.eye(3))

    @pytest.mark.parametrize(
        ("x1", "x2"),
        [pytest.param(0.6, 0.6, id="not-unit"), pytest.param(-0.6, 0.8, id="negative")],
    )
    def test_pseudosphere_domain(self, x1, x2):
        """
        Test the principal data constraints.
        """
        with pytest.raises(DomainError):
            pseudosphere_instance(x1, x2)

    def test_planted_needs_two_dimensions(self, rng):
        """
        Test the lower bound on n.
        """
        with pytest.raises(DimensionError):
            planted(1, rng)

    def test_regular_element(self):
        """
        Test that the regular element is a unit vector of full image rank.
        """
        beta = diagonal_instance(3)

        x = find_regular_element(beta, seed=3)

        assert np.linalg.norm(x) == pytest.approx(1.0)
        assert image_dimension(beta, x) == 3

    def test_regular_element_kernel(self, rng):
        """
        Test that no regular element exists when the form has a kernel.
        """
        with pytest.raises(KernelError):
            find_regular_element(degenerate(3, rng).tensor)
