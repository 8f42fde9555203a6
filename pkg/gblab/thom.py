"""Thom forms of a Euclidean bundle with connection, and what integrating them over rays gives.

For a section ``V`` of a rank-``n`` bundle with connection ``nabla`` and curvature operator
``R``, the even element ``Phi(V) = -|V|^2 + nabla V + R`` gives the pulled-back Thom form

    tau(sV) = (-1)^[n/2] / pi^(n/2) * Tr_s exp(Phi(sV)),

closed, with unit integral over each fiber, and equal to the Euler form at ``s = 0``.
Integrating ``tau(tV)`` over ``t`` in ``[0, inf)`` along a unit section gives the geodesic
curvature form ``Pi(nabla, V)``. Term by term in ``nabla V`` this only needs the half-line
moments of the Gaussian, so ``Pi`` is available in closed form as well as by quadrature.

Signs are fixed so that ``Pi`` is the fiber integral of ``tau`` over rays with the ray
direction oriented first, which is ``(-1)^(n-1)`` times the base-first slant of
:func:`~gblab.forms.fiber_integrate`; the outward normal of a flat disk or ball then gives
``int Pi = 1``.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Final

import numpy as np

from gblab.errors import DimensionError
from gblab.errors import GridError
from gblab.errors import LocusError
from gblab.errors import NormError
from gblab.fixtures import sphere_angle_grid
from gblab.fixtures import unit_sphere_embedding
from gblab.forms import ChartGrid
from gblab.forms import MixedForm
from gblab.forms import MixedSum
from gblab.forms import Rule
from gblab.forms import embed
from gblab.forms import exp_even
from gblab.forms import exterior_derivative
from gblab.forms import fiber_integrate
from gblab.forms import integrate
from gblab.forms import supertrace
from gblab.forms import wedge
from gblab.frames import FrameConnection
from gblab.frames import covariant_derivative
from gblab.frames import curvature
from gblab.frames import curvature_operator
from gblab.frames import euler_form
from gblab.pfaffian import half_line_moment

logger = logging.getLogger(__name__)

UNIT_TOLERANCE: Final[float] = 1e-10
LOCUS_TOLERANCE: Final[float] = 1e-8
FIBER_RADIUS: Final[float] = 6.0
DEFAULT_SCALES: Final[tuple[float, ...]] = (10.0, 20.0, 40.0)


@dataclass(frozen=True)
class SectionField:
    """A section ``V = sum_i v_i e_i`` sampled on a chart."""

    grid: ChartGrid
    components: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        arrays = tuple(np.array(np.broadcast_to(np.asarray(v, dtype=float), self.grid.shape)) for v in self.components)
        object.__setattr__(self, "components", arrays)

    @staticmethod
    def of(grid: ChartGrid, components: Sequence[np.ndarray | float]) -> "SectionField":
        return SectionField(grid, tuple(np.asarray(v, dtype=float) for v in components))

    @property
    def rank(self) -> int:
        return len(self.components)

    def norm_squared(self) -> np.ndarray:
        return sum((v**2 for v in self.components), np.zeros(self.grid.shape))

    def scaled(self, factor: float | np.ndarray) -> "SectionField":
        return SectionField(self.grid, tuple(v * factor for v in self.components))

    def __neg__(self) -> "SectionField":
        return self.scaled(-1.0)

    def as_form(self) -> MixedForm:
        """``V`` as an element of bidegree (0, 1)."""
        total = MixedForm.zero(self.grid, self.rank, (0, 1))
        for i, v in enumerate(self.components):
            total = total + MixedForm.monomial(self.grid, self.rank, (), (i,), v)
        return total

    def check_unit(self, tolerance: float = UNIT_TOLERANCE) -> None:
        """Raises NormError unless ``|V| = 1`` at every sample."""
        deviation = float(np.max(np.abs(self.norm_squared() - 1.0)))
        if deviation > tolerance:
            raise NormError(f"Section must have unit length, |V|^2 - 1 reaches {deviation:.3e}")


def _check_pair(field: SectionField, conn: FrameConnection) -> None:
    if field.grid != conn.grid:
        raise GridError("Section and connection live on different charts")
    if field.rank != conn.rank:
        raise DimensionError(f"Section has rank {field.rank}, connection has rank {conn.rank}")


def thom_prefactor(n: int) -> float:
    """``(-1)^[n/2] / pi^(n/2)``."""
    return (-1) ** (n // 2) / math.pi ** (n / 2.0)


def boundary_prefactor(n: int) -> float:
    """``(-1)^(n-1) (-1)^[(n-1)/2] / pi^(n/2)``, the constant in front of ``Pi``."""
    return (-1) ** (n - 1) * (-1) ** ((n - 1) // 2) / math.pi ** (n / 2.0)


def phi_element(field: SectionField, conn: FrameConnection, scale: float = 1.0) -> MixedSum:
    """``Phi(sV) = -s^2 |V|^2 + s nabla V + R``, with components of bidegree (0,0), (1,1), (2,2)."""
    _check_pair(field, conn)
    n = conn.rank
    parts = [
        MixedForm.scalar(conn.grid, n, -(scale**2) * field.norm_squared()),
        covariant_derivative(field.components, conn) * scale,
        curvature_operator(curvature(conn)),
    ]
    return MixedSum(conn.grid, n, parts)


def thom_pullback(field: SectionField, conn: FrameConnection, scale: float = 1.0) -> MixedForm:
    """``tau(sV, nabla)``, the top fiber-free component of bidegree ``(n, 0)``."""
    n = conn.rank
    density = supertrace(exp_even(phi_element(field, conn, scale)))
    return density.component((n, 0)) * thom_prefactor(n)


def thom_integral(field: SectionField, conn: FrameConnection, scale: float, rule: Rule = "trapezoid") -> float:
    """``int tau(sV)`` over the chart; the chart dimension must equal the rank."""
    if conn.grid.base_dim != conn.rank:
        raise DimensionError(f"Integrating tau needs chart dimension {conn.rank}, got {conn.grid.base_dim}")
    return integrate(thom_pullback(field, conn, scale), rule)


def thom_normalization(n: int, resolution: int, radius: float = FIBER_RADIUS) -> float:
    """Integral of the flat Thom form over the fiber ``R^n`` of a bundle over a point."""
    grid = ChartGrid.uniform(n, -radius, radius, resolution)
    tautological = SectionField.of(grid, grid.coordinates())
    tau = thom_pullback(tautological, FrameConnection.flat(grid), 1.0)
    over_point = fiber_integrate(tau, tuple(range(n)))
    value = float(over_point.coefficient((), ()))
    logger.debug("thom normalization n=%d resolution=%d: %.15f", n, resolution, value)
    return value


def rotation_index_limit(
    field: SectionField,
    conn: FrameConnection,
    scales: Sequence[float] = DEFAULT_SCALES,
    rule: Rule = "trapezoid",
) -> float:
    """``int tau(sV)`` at the largest scale of the schedule.

    As ``s`` grows the integral concentrates at the zeros of ``V`` and tends to the sum of
    their rotation indices.

    Raises:
        LocusError: ``V`` vanishes on the edge of the chart.
    """
    _check_pair(field, conn)
    edge = conn.grid.boundary_mask()
    if np.any(edge) and float(np.min(field.norm_squared()[edge])) < LOCUS_TOLERANCE:
        raise LocusError("Section vanishes on the boundary of the chart")
    value = math.nan
    for scale in sorted(scales):
        value = thom_integral(field, conn, scale, rule)
        logger.debug("rotation index at s=%g: %.12f", scale, value)
    return value


def closedness_defect(
    field: SectionField,
    conn: FrameConnection,
    scales: Sequence[float],
    rule: Rule = "trapezoid",
) -> float:
    """Spread of ``int tau(sV)`` over the given scales; zero when ``tau`` is closed and ``V`` has no zeros."""
    values = [thom_integral(field, conn, scale, rule) for scale in scales]
    return max(values) - min(values)


def _moment_sum(field: SectionField, conn: FrameConnection) -> MixedSum:
    """``sum_k m_k / k! Tr_s[V (nabla V)^k exp(R)]`` with ``m_k`` the half-line moments."""
    grid = conn.grid
    n = conn.rank
    vector = MixedSum.of(field.as_form())
    nabla = MixedSum.of(covariant_derivative(field.components, conn))
    exp_curvature = exp_even(MixedSum.of(curvature_operator(curvature(conn))))
    power = MixedSum.identity(grid, n)
    total = MixedSum(grid, n)
    for k in range(min(n, grid.base_dim) + 1):
        term = supertrace(wedge(wedge(vector, power), exp_curvature))
        total = total + term * (half_line_moment(k) / math.factorial(k))
        power = wedge(power, nabla)
    return total


def geodesic_curvature(field: SectionField, conn: FrameConnection) -> MixedForm:
    """``Pi(nabla, V)`` for a unit section, any rank, by the moment expansion.

    Raises:
        NormError: ``V`` is not of unit length.
    """
    _check_pair(field, conn)
    field.check_unit()
    n = conn.rank
    return _moment_sum(field, conn).component((n - 1, 0)) * boundary_prefactor(n)


def geodesic_curvature_even(field: SectionField, conn: FrameConnection) -> MixedForm:
    """``Pi(nabla, V)`` for even rank; invariant under ``V -> -V``."""
    if conn.rank % 2:
        raise DimensionError(f"geodesic_curvature_even needs even rank, got {conn.rank}")
    return geodesic_curvature(field, conn)


def geodesic_curvature_odd(field: SectionField, conn: FrameConnection) -> MixedForm:
    """``Pi(nabla, V)`` for odd rank from the closed form

        (-1)^(n-1) (-1)^[(n-1)/2] / pi^(n/2) * sqrt(pi)/2 * Tr_s[V exp((nabla V)^2 / 4 + R)],

    which changes sign under ``V -> -V``.

    Raises:
        NormError: ``V`` is not of unit length.
    """
    _check_pair(field, conn)
    if conn.rank % 2 == 0:
        raise DimensionError(f"geodesic_curvature_odd needs odd rank, got {conn.rank}")
    field.check_unit()
    n = conn.rank
    nabla = covariant_derivative(field.components, conn)
    exponent = MixedSum(conn.grid, n, [wedge(nabla, nabla) * 0.25, curvature_operator(curvature(conn))])
    density = supertrace(wedge(MixedSum.of(field.as_form()), exp_even(exponent)))
    return density.component((n - 1, 0)) * (boundary_prefactor(n) * math.sqrt(math.pi) / 2.0)


def geodesic_curvature_by_rays(
    field: SectionField,
    conn: FrameConnection,
    radius: float = FIBER_RADIUS,
    resolution: int = 1001,
    rule: Rule = "simpson",
) -> MixedForm:
    """``Pi(nabla, V)`` by integrating ``tau(tV)`` over ``t`` in ``[0, radius]`` numerically."""
    _check_pair(field, conn)
    field.check_unit()
    base = conn.grid
    product = base.product(ChartGrid([(0.0, radius)], resolution))
    axes = tuple(range(base.base_dim))
    t = product.coordinates()[-1]
    lifted = SectionField(product, tuple(np.expand_dims(v, -1) * t for v in field.components))
    tau = thom_pullback(lifted, conn.embed(product, axes), 1.0)
    slant = fiber_integrate(tau, (base.base_dim,), rule=rule, rays=True)
    # move dt in front of the (n-1)-form on the base
    return slant * float((-1) ** (conn.rank - 1))


def transgressed_euler_form(conn: FrameConnection, sphere_resolution: int = 32) -> MixedForm:
    """``Te(nabla) = -Pi(pi* nabla, T)`` on the chart ``base x S^{n-1}``, ``T`` the tautological section.

    The sphere axes follow the base axes and use hyperspherical angles.
    """
    n = conn.rank
    base = conn.grid
    product = base.product(sphere_angle_grid(n, sphere_resolution))
    angles = product.coordinates()[base.base_dim :]
    tautological = SectionField.of(product, unit_sphere_embedding(list(angles)))
    return -geodesic_curvature(tautological, conn.embed(product, tuple(range(base.base_dim))))


def transgression_check(conn: FrameConnection, sphere_resolution: int = 32) -> float:
    """Largest coefficient of ``d Te(nabla) - pi* e(nabla)`` on the sphere bundle chart."""
    te = transgressed_euler_form(conn, sphere_resolution)
    euler = euler_form(curvature(conn))
    pulled = embed(euler, te.grid, tuple(range(conn.grid.base_dim)))
    residual = (exterior_derivative(te) - pulled).max_abs()
    logger.debug("transgression residual %.3e", residual)
    return residual
