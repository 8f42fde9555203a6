"""Named chart fixtures with analytic frames.

Each fixture samples its coframe and connection forms from closed formulas; curvature is then
computed numerically, so a fixture is a witness for the finite-difference machinery and not
a copy of its expected answer.
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
from gblab.forms import ChartGrid
from gblab.forms import MixedForm
from gblab.forms import integrate
from gblab.frames import FrameConnection
from gblab.frames import HypersurfaceFrame

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTION: Final[int] = 201
SPHERE_MARGIN: Final[float] = 0.2


def _one_form(grid: ChartGrid, rank: int, *components: np.ndarray | float) -> MixedForm:
    form = MixedForm.zero(grid, rank, (1, 0))
    for axis, values in enumerate(components):
        if np.any(values):
            form = form + MixedForm.monomial(grid, rank, (axis,), (), values)
    return form


def round_sphere(resolution: int = DEFAULT_RESOLUTION, radius: float = 1.0) -> FrameConnection:
    """Sphere of the given radius in the chart ``(phi, lambda)`` covering it entirely.

    ``theta_0 = r dphi``, ``theta_1 = r sin(phi) dlambda`` and ``omega_01 = -cos(phi) dlambda``;
    the longitude is periodic and the poles are edges of the chart.
    """
    if radius <= 0:
        raise DomainError(f"Sphere radius must be positive, got {radius}")
    grid = ChartGrid([(0.0, math.pi), (0.0, 2.0 * math.pi)], resolution, periodic=(False, True))
    phi, _ = grid.coordinates()
    theta = [_one_form(grid, 2, radius, 0.0), _one_form(grid, 2, 0.0, radius * np.sin(phi))]
    omega = {(0, 1): _one_form(grid, 2, 0.0, -np.cos(phi))}
    return FrameConnection(grid, 2, omega, theta)


def hyperbolic_plane(
    resolution: int = 101,
    bounds: Sequence[tuple[float, float]] = ((-1.0, 1.0), (1.0, 2.0)),
) -> FrameConnection:
    """Upper half plane ``(x, y)``, ``y > 0``: ``theta = (dx/y, dy/y)``, ``omega_01 = -dx/y``."""
    grid = ChartGrid(bounds, resolution)
    _, y = grid.coordinates()
    if np.any(y <= 0):
        raise DomainError("The upper half plane chart needs y > 0")
    theta = [_one_form(grid, 2, 1.0 / y, 0.0), _one_form(grid, 2, 0.0, 1.0 / y)]
    omega = {(0, 1): _one_form(grid, 2, -1.0 / y, 0.0)}
    return FrameConnection(grid, 2, omega, theta)


def flat_torus(resolution: int = 64) -> FrameConnection:
    """The unit square with both axes periodic and the trivial connection."""
    grid = ChartGrid([(0.0, 1.0), (0.0, 1.0)], resolution, periodic=(True, True))
    return FrameConnection.flat(grid)


def flat_box(base_dim: int, resolution: int, half_width: float = 1.0) -> FrameConnection:
    """``[-half_width, half_width]^base_dim`` with the trivial connection."""
    return FrameConnection.flat(ChartGrid.uniform(base_dim, -half_width, half_width, resolution))


def sphere_angle_grid(n: int, resolution: int) -> ChartGrid:
    """Chart of hyperspherical angles on ``S^{n-1}``: ``n - 2`` polar angles and one periodic angle."""
    if n < 2:
        raise DomainError(f"Hyperspherical angles need n >= 2, got {n}")
    bounds = [(0.0, math.pi)] * (n - 2) + [(0.0, 2.0 * math.pi)]
    periodic = [False] * (n - 2) + [True]
    return ChartGrid(bounds, resolution, periodic)


def unit_sphere_embedding(angles: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Hyperspherical parameterization of ``S^{n-1}`` from ``n - 1`` angle arrays.

    ``x_0 = cos a_0``, ``x_1 = sin a_0 cos a_1``, ... , ``x_{n-1} = sin a_0 ... sin a_{n-2}``.
    """
    if not angles:
        raise DomainError("Need at least one angle")
    coordinates = []
    product = np.ones_like(np.asarray(angles[0], dtype=float))
    for angle in angles:
        coordinates.append(product * np.cos(angle))
        product = product * np.sin(angle)
    coordinates.append(product)
    return coordinates


def sphere_volume_quadrature(n: int, resolution: int = 201) -> float:
    """Volume of ``S^{n-1}`` from the hyperspherical volume form and :func:`~gblab.forms.integrate`."""
    grid = sphere_angle_grid(n, resolution)
    angles = grid.coordinates()
    density = np.ones(grid.shape)
    for k, angle in enumerate(angles[:-1]):
        density = density * np.sin(angle) ** (n - 2 - k)
    volume = MixedForm.monomial(grid, n, tuple(range(n - 1)), (), density)
    return integrate(volume, "simpson" if resolution % 2 else "trapezoid")


def sphere_in_space(resolution: int = 101, margin: float = SPHERE_MARGIN) -> HypersurfaceFrame:
    """Unit sphere in ``R^3`` with the frame ``(e_phi, e_lambda, N)``, poles cut off by ``margin``."""
    grid = ChartGrid([(margin, math.pi - margin), (0.0, 2.0 * math.pi)], resolution, periodic=(False, True))
    phi, lam = grid.coordinates()
    zero = np.zeros_like(phi)
    normal = np.stack([np.sin(phi) * np.cos(lam), np.sin(phi) * np.sin(lam), np.cos(phi)])
    e_phi = np.stack([np.cos(phi) * np.cos(lam), np.cos(phi) * np.sin(lam), -np.sin(phi)])
    e_lam = np.stack([-np.sin(lam), np.cos(lam), zero])
    return HypersurfaceFrame(grid, normal, np.stack([e_phi, e_lam, normal]))


def plane_in_space(resolution: int = 33) -> HypersurfaceFrame:
    """The plane ``z = 0`` of ``R^3`` with the standard frame."""
    grid = ChartGrid([(0.0, 1.0), (0.0, 1.0)], resolution)
    x, y = grid.coordinates()
    zero = np.zeros_like(x)
    one = np.ones_like(x)
    frame = np.stack([np.stack([one, zero, zero]), np.stack([zero, one, zero]), np.stack([zero, zero, one])])
    return HypersurfaceFrame(grid, np.stack([x, y, zero]), frame)


def cylinder_in_space(resolution: int = 101) -> HypersurfaceFrame:
    """Unit cylinder ``(cos a, sin a, z)`` with the frame ``(e_a, e_z, N)``."""
    grid = ChartGrid([(0.0, 2.0 * math.pi), (0.0, 1.0)], resolution, periodic=(True, False))
    alpha, z = grid.coordinates()
    zero = np.zeros_like(alpha)
    one = np.ones_like(alpha)
    normal = np.stack([np.cos(alpha), np.sin(alpha), zero])
    frame = np.stack([np.stack([-np.sin(alpha), np.cos(alpha), zero]), np.stack([zero, zero, one]), normal])
    return HypersurfaceFrame(grid, np.stack([np.cos(alpha), np.sin(alpha), z]), frame)


@dataclass(frozen=True)
class BoundaryFixture:
    """A boundary chart with the restricted connection and the outward unit normal ``V``.

    ``interior_euler`` is the known Euler integral of the region the boundary encloses and
    ``boundary_total`` the expected integral of the geodesic curvature form.
    """

    name: str
    connection: FrameConnection
    field: tuple[np.ndarray, ...]
    interior_euler: float
    boundary_total: float


def disk_boundary(resolution: int = 64) -> BoundaryFixture:
    """The unit circle bounding a flat disk."""
    grid = ChartGrid([(0.0, 2.0 * math.pi)], resolution, periodic=(True,))
    (alpha,) = grid.coordinates()
    return BoundaryFixture("disk", FrameConnection.flat(grid, 2), (np.cos(alpha), np.sin(alpha)), 0.0, 1.0)


def cap_boundary(polar_angle: float = 1.0, resolution: int = 64) -> BoundaryFixture:
    """The latitude circle ``phi = polar_angle`` bounding a polar cap of the unit sphere.

    The frame is ``(e_phi, e_lambda)``, so the outward normal of the cap is ``e_0``.
    """
    if not 0.0 < polar_angle < math.pi:
        raise DomainError(f"Cap angle must lie in (0, pi), got {polar_angle}")
    grid = ChartGrid([(0.0, 2.0 * math.pi)], resolution, periodic=(True,))
    omega = {(0, 1): _one_form(grid, 2, -math.cos(polar_angle))}
    conn = FrameConnection(grid, 2, omega)
    ones, zeros = np.ones(grid.shape), np.zeros(grid.shape)
    cap_euler = 1.0 - math.cos(polar_angle)
    return BoundaryFixture("cap", conn, (ones, zeros), cap_euler, math.cos(polar_angle))


def ball_boundary(resolution: int = 101) -> BoundaryFixture:
    """The unit sphere bounding a flat ball in ``R^3``, standard frame, ``V`` the radial field."""
    grid = sphere_angle_grid(3, resolution)
    angles = grid.coordinates()
    field = tuple(unit_sphere_embedding(list(angles)))
    return BoundaryFixture("ball", FrameConnection.flat(grid, 3), field, 1.0, 1.0)


FIXTURES: Final[dict[str, Callable[[int], FrameConnection]]] = {
    "round_sphere": round_sphere,
    "scaled_sphere": lambda resolution: round_sphere(resolution, radius=2.0),
    "flat_torus": flat_torus,
    "hyperbolic_plane": hyperbolic_plane,
}

CLOSED_SURFACES: Final[dict[str, int]] = {"round_sphere": 2, "scaled_sphere": 2, "flat_torus": 0}


def load_fixture(name: str, resolution: int) -> FrameConnection:
    """Build a named fixture.

    Raises:
        FixtureError: the name is not registered.
    """
    try:
        factory = FIXTURES[name]
    except KeyError:
        raise FixtureError(f"Unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None
    logger.debug("building fixture %s at resolution %d", name, resolution)
    return factory(resolution)
