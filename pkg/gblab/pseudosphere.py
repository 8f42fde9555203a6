"""Surfaces of curvature -1 in asymptotic coordinates: the two-dimensional ground truth.

A pseudospherical surface parameterized by asymptotic arc length ``(z, w)`` has the Chebyshev
metric ``dz^2 + 2 cos(theta) dz dw + dw^2`` whose net angle solves the sine-Gordon equation
``theta_zw = sin(theta)``. Integrating it over an asymptotic rectangle ``[a, b] x [c, d]`` gives
the Hazzidakis formula

    area = theta(b, d) - theta(b, c) - theta(a, d) + theta(a, c),

so no such rectangle has area ``2 pi`` or more. The fixtures here are closed-form one-soliton
solutions; nothing is solved numerically.
"""

import logging
import math
from collections.abc import Callable
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Final

import numpy as np

from gblab.errors import DomainError
from gblab.errors import FixtureError
from gblab.errors import GridError
from gblab.fixtures import CLOSED_SURFACES
from gblab.fixtures import load_fixture
from gblab.forms import ChartGrid
from gblab.forms import MixedForm
from gblab.forms import Rule
from gblab.forms import exterior_derivative
from gblab.forms import integrate
from gblab.forms import wedge
from gblab.frames import FrameConnection
from gblab.frames import PrincipalFrameData
from gblab.frames import curvature
from gblab.frames import euler_form

logger = logging.getLogger(__name__)

ADMISSIBLE_MARGIN: Final[float] = 1e-6
MIN_RESOLUTION: Final[int] = 33
# curvature is compared away from the one-sided stencils at the edge
EDGE_MARGIN: Final[int] = 2
DEFAULT_RESOLUTION: Final[int] = 129
CONVERGENCE_RESOLUTIONS: Final[tuple[int, ...]] = (65, 129, 257, 513)
CLOSED_SURFACE_RESOLUTION: Final[int] = 201


@dataclass(frozen=True)
class Rectangle:
    """The asymptotic rectangle ``[a, b] x [c, d]`` in ``(z, w)``."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        if self.a > self.b or self.c > self.d:
            raise DomainError(f"Rectangle needs a <= b and c <= d, got {self}")

    @property
    def degenerate(self) -> bool:
        return self.a == self.b or self.c == self.d

    @property
    def bounds(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return (self.a, self.b), (self.c, self.d)


DEFAULT_RECTANGLE: Final[Rectangle] = Rectangle(0.1, 1.1, 0.1, 1.1)


def _alternating_corner_sum(theta: Callable[[float, float], float], rectangle: Rectangle) -> float:
    a, b, c, d = rectangle.a, rectangle.b, rectangle.c, rectangle.d
    return float(theta(b, d) - theta(b, c) - theta(a, d) + theta(a, c))


@dataclass(frozen=True)
class Soliton:
    """``theta = 4 arctan(exp(-(mu z + w / mu)))``, the branch with ``0 < theta < pi`` where the phase is positive."""

    mu: float = 1.0

    def __post_init__(self) -> None:
        if not self.mu > 0:
            raise DomainError(f"Soliton parameter must be positive, got {self.mu}")

    def phase(self, z: np.ndarray | float, w: np.ndarray | float) -> np.ndarray:
        return np.asarray(self.mu * np.asarray(z) + np.asarray(w) / self.mu)

    def theta(self, z: np.ndarray | float, w: np.ndarray | float) -> np.ndarray:
        return 4.0 * np.arctan(np.exp(-self.phase(z, w)))

    def derivatives(self, z: np.ndarray | float, w: np.ndarray | float) -> tuple[np.ndarray, np.ndarray]:
        """``(theta_z, theta_w)``."""
        slope = -2.0 / np.cosh(self.phase(z, w))
        return self.mu * slope, slope / self.mu

    def corner_sum(self, rectangle: Rectangle) -> float:
        """The exact alternating corner sum; zero on a degenerate rectangle."""
        return _alternating_corner_sum(lambda z, w: float(self.theta(z, w)), rectangle)


@dataclass(frozen=True)
class SineGordonSolution:
    """A net angle ``theta`` sampled on a ``(z, w)`` chart, optionally with its closed form.

    Raises:
        GridError: the chart is not two-dimensional or ``theta`` has the wrong shape.
        DomainError: ``theta`` leaves ``[delta, pi - delta]``.
    """

    grid: ChartGrid
    theta: np.ndarray
    soliton: Soliton | None = None

    def __post_init__(self) -> None:
        if self.grid.base_dim != 2 or any(self.grid.periodic):
            raise GridError(f"A sine-Gordon solution lives on a plain 2-D chart, got {self.grid!r}")
        if np.shape(self.theta) != self.grid.shape:
            raise GridError(f"Net angle has shape {np.shape(self.theta)}, chart has {self.grid.shape}")
        low, high = float(np.min(self.theta)), float(np.max(self.theta))
        if low < ADMISSIBLE_MARGIN or high > math.pi - ADMISSIBLE_MARGIN:
            raise DomainError(f"Net angle must stay inside (0, pi), got range [{low:.6g}, {high:.6g}]")

    @staticmethod
    def sample(
        function: Callable[[np.ndarray, np.ndarray], np.ndarray],
        rectangle: Rectangle,
        resolution: int = DEFAULT_RESOLUTION,
    ) -> "SineGordonSolution":
        grid = ChartGrid(rectangle.bounds, resolution)
        z, w = grid.coordinates()
        return SineGordonSolution(grid, np.broadcast_to(np.asarray(function(z, w), dtype=float), grid.shape))

    @property
    def rectangle(self) -> Rectangle:
        (a, b), (c, d) = self.grid.bounds
        return Rectangle(a, b, c, d)

    def corner(self, z_index: int, w_index: int) -> float:
        return float(self.theta[z_index, w_index])


def one_soliton(
    mu: float = 1.0,
    rectangle: Rectangle = DEFAULT_RECTANGLE,
    resolution: int = DEFAULT_RESOLUTION,
) -> SineGordonSolution:
    """The one-soliton fixture on ``rectangle``, which must keep the phase positive."""
    soliton = Soliton(mu)
    grid = ChartGrid(rectangle.bounds, resolution)
    z, w = grid.coordinates()
    return SineGordonSolution(grid, soliton.theta(z, w), soliton)


def sine_gordon_residual(sol: SineGordonSolution) -> float:
    """``max |theta_zw - sin(theta)|`` over the interior, by the centered mixed difference.

    Raises:
        GridError: fewer than 33 samples along an axis, or a collapsed rectangle.
    """
    if sol.grid.collapsed:
        raise GridError(f"The residual needs a rectangle with interior, got {sol.rectangle}")
    if min(sol.grid.resolution) < MIN_RESOLUTION:
        raise GridError(f"The residual needs at least {MIN_RESOLUTION} samples per axis, got {sol.grid.resolution}")
    hz, hw = sol.grid.spacing
    t = sol.theta
    mixed = (t[2:, 2:] - t[2:, :-2] - t[:-2, 2:] + t[:-2, :-2]) / (4.0 * hz * hw)
    residual = float(np.max(np.abs(mixed - np.sin(t[1:-1, 1:-1]))))
    logger.debug("sine-Gordon residual at %s: %.3e", sol.grid.resolution, residual)
    return residual


def hyperbolic_area(sol: SineGordonSolution, rule: Rule = "simpson") -> float:
    """``int int sin(theta) dz dw``, the area of the rectangle in the Chebyshev metric; zero on a segment."""
    if sol.rectangle.degenerate:
        return 0.0
    return sol.grid.integrate_values(np.sin(sol.theta), rule)


def hazzidakis_corner_sum(sol: SineGordonSolution) -> float:
    """``theta(b, d) - theta(b, c) - theta(a, d) + theta(a, c)``, zero on a segment."""
    if sol.rectangle.degenerate:
        return 0.0
    return sol.corner(-1, -1) - sol.corner(-1, 0) - sol.corner(0, -1) + sol.corner(0, 0)


def corner_angle_fractions(sol: SineGordonSolution) -> list[float]:
    """Interior angles of the rectangle at its four corners as fractions of a full turn.

    Fed to :func:`gblab.angles.hazzidakis_rhs` they give ``-corner_sum / (2 pi)``.
    """
    angles = [
        sol.corner(0, 0),
        math.pi - sol.corner(-1, 0),
        math.pi - sol.corner(0, -1),
        sol.corner(-1, -1),
    ]
    return [angle / (2.0 * math.pi) for angle in angles]


def chebyshev_connection(sol: SineGordonSolution) -> FrameConnection:
    """Orthonormal coframe ``(dz + cos(theta) dw, sin(theta) dw)`` of the Chebyshev metric.

    The connection form is solved from the numerically differentiated coframe, so its
    curvature is a finite-difference quantity.
    """
    grid = sol.grid
    theta0 = MixedForm.monomial(grid, 2, (0,), (), 1.0) + MixedForm.monomial(grid, 2, (1,), (), np.cos(sol.theta))
    theta1 = MixedForm.monomial(grid, 2, (1,), (), np.sin(sol.theta))
    d0 = exterior_derivative(theta0).coefficient((0, 1), ())
    d1 = exterior_derivative(theta1).coefficient((0, 1), ())
    p = -d0 / np.sin(sol.theta)
    q = p * np.cos(sol.theta) - d1
    omega = MixedForm.monomial(grid, 2, (0,), (), p) + MixedForm.monomial(grid, 2, (1,), (), q)
    return FrameConnection(grid, 2, {(0, 1): omega}, [theta0, theta1])


def chebyshev_curvature_residual(sol: SineGordonSolution) -> float:
    """``max |K + 1|`` of the Chebyshev metric, away from the edge of the chart."""
    conn = chebyshev_connection(sol)
    omega = curvature(conn).omega(0, 1).coefficient((0, 1), ())
    area = wedge(conn.theta(0), conn.theta(1)).coefficient((0, 1), ())
    gauss = omega / area
    inner = (slice(EDGE_MARGIN, -EDGE_MARGIN),) * 2
    residual = float(np.max(np.abs(gauss[inner] + 1.0)))
    logger.debug("chebyshev curvature residual at %s: %.3e", sol.grid.resolution, residual)
    return residual


@dataclass(frozen=True)
class PrincipalFrame:
    """The principal frame of a soliton surface in ``y_1 = z + w``, ``y_2 = z - w``.

    ``data`` holds ``x_1 = cos(theta/2)``, ``x_2 = sin(theta/2)`` and the coordinates,
    ``connection`` the coframe ``theta_i = x_i dy_i`` with its Levi-Civita form and
    ``normal_forms`` the normal connection form, both in closed form.
    """

    data: PrincipalFrameData
    connection: FrameConnection
    normal_forms: dict[tuple[int, int], MixedForm]


def principal_frame_data(sol: SineGordonSolution, resolution: int | None = None) -> PrincipalFrame:
    """Principal frame on the largest ``y``-square whose image lies in the rectangle.

    Raises:
        DomainError: the solution carries no closed form to evaluate off its grid.
    """
    if sol.soliton is None:
        raise DomainError("The principal frame needs a closed-form soliton")
    rect = sol.rectangle
    if rect.degenerate:
        raise DomainError("The principal frame needs a nondegenerate rectangle")
    z0, w0 = (rect.a + rect.b) / 2.0, (rect.c + rect.d) / 2.0
    half = min(rect.b - rect.a, rect.d - rect.c) / 2.0
    grid = ChartGrid(
        [(z0 + w0 - half, z0 + w0 + half), (z0 - w0 - half, z0 - w0 + half)],
        resolution or sol.grid.resolution[0],
    )
    y1, y2 = grid.coordinates()
    z, w = (y1 + y2) / 2.0, (y1 - y2) / 2.0
    theta = sol.soliton.theta(z, w)
    theta_z, theta_w = sol.soliton.derivatives(z, w)
    x1, x2 = np.cos(theta / 2.0), np.sin(theta / 2.0)

    coframe = [MixedForm.monomial(grid, 2, (0,), (), x1), MixedForm.monomial(grid, 2, (1,), (), x2)]
    omega = MixedForm.monomial(grid, 2, (0,), (), -(theta_z - theta_w) / 4.0) + MixedForm.monomial(
        grid, 2, (1,), (), -(theta_z + theta_w) / 4.0
    )
    normal = MixedForm.monomial(grid, 2, (0,), (), (theta_z + theta_w) / 4.0) + MixedForm.monomial(
        grid, 2, (1,), (), (theta_z - theta_w) / 4.0
    )
    data = PrincipalFrameData((x1, x2), (y1, y2))
    return PrincipalFrame(data, FrameConnection(grid, 2, {(0, 1): omega}, coframe), {(0, 1): normal})


def gauss_bonnet_closed(name: str, resolution: int = CLOSED_SURFACE_RESOLUTION, rule: Rule = "simpson") -> float:
    """``(1 / 2 pi) int K dA`` of a named closed surface, through the curvature of its fixture.

    Raises:
        FixtureError: the fixture is unknown or does not cover a closed surface.
    """
    if name not in CLOSED_SURFACES:
        raise FixtureError(f"{name!r} is not a closed-surface fixture; choose from {sorted(CLOSED_SURFACES)}")
    conn = load_fixture(name, resolution)
    value = integrate(euler_form(curvature(conn)), rule)
    logger.debug("gauss-bonnet %s at resolution %d: %.10f (chi = %d)", name, resolution, value, CLOSED_SURFACES[name])
    return value


@dataclass(frozen=True)
class ConvergenceRow:
    resolution: int
    spacing: float
    area: float
    corner_sum: float
    identity_error: float
    residual: float

    def as_dict(self) -> dict[str, float]:
        return {
            "resolution": self.resolution,
            "spacing": self.spacing,
            "area": self.area,
            "corner_sum": self.corner_sum,
            "identity_error": self.identity_error,
            "residual": self.residual,
        }


@dataclass(frozen=True)
class ConvergenceTable:
    mu: float
    rule: str
    rows: tuple[ConvergenceRow, ...]

    @property
    def order(self) -> float:
        """Least-squares slope of ``log(identity_error)`` against ``log(h)``."""
        errors = [row for row in self.rows if row.identity_error > 0.0]
        if len(errors) < 2:
            return math.nan
        slope, _ = np.polyfit(
            np.log([row.spacing for row in errors]),
            np.log([row.identity_error for row in errors]),
            1,
        )
        return float(slope)

    @property
    def constant(self) -> float:
        """Largest ``identity_error / h^2`` over the rows."""
        return max(row.identity_error / row.spacing**2 for row in self.rows)


def convergence_table(
    mu: float = 1.0,
    resolutions: Sequence[int] = CONVERGENCE_RESOLUTIONS,
    rectangle: Rectangle = DEFAULT_RECTANGLE,
    rule: Rule = "trapezoid",
) -> ConvergenceTable:
    """Area, corner sum and residuals of the one-soliton fixture over a resolution ladder."""
    rows = []
    for resolution in resolutions:
        sol = one_soliton(mu, rectangle, resolution)
        area = hyperbolic_area(sol, rule)
        corner = hazzidakis_corner_sum(sol)
        rows.append(
            ConvergenceRow(
                resolution,
                max(sol.grid.spacing),
                area,
                corner,
                abs(area - corner),
                sine_gordon_residual(sol),
            )
        )
        logger.debug("convergence mu=%g resolution=%d |area - corner| = %.3e", mu, resolution, rows[-1].identity_error)
    return ConvergenceTable(mu, rule, tuple(rows))
