"""Moving frames: connection and curvature forms on a chart.

Conventions, with ``e_0, ..., e_{n-1}`` an orthonormal frame and ``theta`` its coframe::

    nabla e_j = sum_i e_i omega_ij          omega_ij = -omega_ji
    d theta_i = -sum_j omega_ij ^ theta_j
    Omega_ij  = d omega_ij + sum_k omega_ik ^ omega_kj

so a space of constant curvature ``k`` has ``Omega_ij = k theta_i ^ theta_j``. Connection and
curvature forms are scalar forms, stored as :class:`~gblab.forms.MixedForm` of fiber degree 0
over a bundle of rank ``n``.
"""

import logging
import math
from collections.abc import Mapping
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Final

import numpy as np

from gblab.errors import DimensionError
from gblab.errors import DomainError
from gblab.errors import FrameError
from gblab.errors import GridError
from gblab.forms import ChartGrid
from gblab.forms import Coefficient
from gblab.forms import MixedForm
from gblab.forms import embed
from gblab.forms import exterior_derivative
from gblab.forms import restrict
from gblab.forms import wedge
from gblab.group import GroupElement
from gblab.group import epsilon
from gblab.pfaffian import expand_pfaffian

logger = logging.getLogger(__name__)

ORIENTATION_TOLERANCE: Final[float] = 1e-12
ORTHONORMAL_TOLERANCE: Final[float] = 1e-8
# normality is checked against finite-difference tangents
ADAPTED_TOLERANCE: Final[float] = 1e-3
UNIT_TOLERANCE: Final[float] = 1e-10

Pair = tuple[int, int]


def _pairs(n: int) -> list[Pair]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


class FrameConnection:
    """Connection one-forms ``omega_ij`` (``i < j`` stored) and optionally a coframe ``theta``.

    Parameters
    ----------
    grid : ChartGrid
        Chart the forms are sampled on.
    rank : int
        Rank ``n`` of the bundle.
    omega : mapping
        ``{(i, j): form}`` for ``i < j``; missing pairs are zero. Each form has bidegree (1, 0).
    theta : sequence of MixedForm, optional
        The coframe. Needed by anything that refers to ``theta``; when the rank equals the
        chart dimension ``theta_0 ^ ... ^ theta_{n-1}`` must be positive on the interior of
        the chart (an edge may be a coordinate singularity) and nonnegative on its edge.
    """

    def __init__(
        self,
        grid: ChartGrid,
        rank: int,
        omega: Mapping[Pair, MixedForm] | None = None,
        theta: Sequence[MixedForm] | None = None,
    ) -> None:
        if rank < 1:
            raise DimensionError(f"Connection rank must be positive, got {rank}")
        self._grid = grid
        self._rank = rank
        self._omega: dict[Pair, MixedForm] = {}
        for (i, j), form in (omega or {}).items():
            if not 0 <= i < j < rank:
                raise FrameError(f"Connection forms are stored for 0 <= i < j < {rank}, got ({i}, {j})")
            self._omega[(i, j)] = self._check_one_form(form, f"omega[{i},{j}]")
        self._theta: tuple[MixedForm, ...] | None = None
        if theta is not None:
            if len(theta) != rank:
                raise FrameError(f"Coframe needs {rank} one-forms, got {len(theta)}")
            self._theta = tuple(self._check_one_form(form, f"theta[{i}]") for i, form in enumerate(theta))
            if rank == grid.base_dim:
                self._check_orientation()

    def _check_one_form(self, form: MixedForm, name: str) -> MixedForm:
        if form.grid != self._grid:
            raise GridError(f"{name} lives on {form.grid!r}, expected {self._grid!r}")
        if form.bidegree != (1, 0):
            raise FrameError(f"{name} must have bidegree (1, 0), got {form.bidegree}")
        if form.fiber_rank != self._rank:
            return MixedForm(self._grid, self._rank, (1, 0), dict(form.items()))
        return form

    def _check_orientation(self) -> None:
        volume = self.volume_form().coefficient(tuple(range(self._grid.base_dim)), ())
        interior = ~self._grid.boundary_mask()
        if np.any(volume < -ORIENTATION_TOLERANCE) or np.any(volume[interior] <= ORIENTATION_TOLERANCE):
            raise FrameError("Coframe is degenerate or negatively oriented on the chart")

    @staticmethod
    def flat(grid: ChartGrid, rank: int | None = None) -> "FrameConnection":
        """The trivial connection; the coframe is ``dy`` when the rank equals the chart dimension."""
        rank = grid.base_dim if rank is None else rank
        theta = None
        if rank == grid.base_dim:
            theta = [MixedForm.monomial(grid, rank, (i,), (), 1.0) for i in range(rank)]
        return FrameConnection(grid, rank, {}, theta)

    @property
    def grid(self) -> ChartGrid:
        return self._grid

    @property
    def rank(self) -> int:
        return self._rank

    @property
    def has_coframe(self) -> bool:
        return self._theta is not None

    def omega(self, i: int, j: int) -> MixedForm:
        """``omega_ij`` for any ``i, j``, extended skew-symmetrically."""
        if i == j:
            return MixedForm.zero(self._grid, self._rank, (1, 0))
        if i > j:
            return -self.omega(j, i)
        return self._omega.get((i, j), MixedForm.zero(self._grid, self._rank, (1, 0)))

    def stored_pairs(self) -> list[Pair]:
        return sorted(self._omega)

    def theta(self, i: int) -> MixedForm:
        if self._theta is None:
            raise FrameError("This connection carries no coframe")
        return self._theta[i]

    def volume_form(self) -> MixedForm:
        """``theta_0 ^ ... ^ theta_{n-1}``."""
        form = self.theta(0)
        for i in range(1, self._rank):
            form = wedge(form, self.theta(i))
        return form

    def evaluate(self, form: MixedForm, field: Sequence[Coefficient]) -> np.ndarray:
        """Value of a scalar one-form on a chart vector field ``sum_a field[a] d/dy_a``."""
        if form.bidegree != (1, 0):
            raise FrameError(f"Only one-forms can be evaluated on vectors, got {form.bidegree}")
        total = np.zeros(self._grid.shape)
        for a in range(self._grid.base_dim):
            total = total + form.coefficient((a,), ()) * np.asarray(field[a])
        return total

    def frame_vectors(self) -> np.ndarray:
        """Chart components of the frame dual to ``theta``, shape ``(rank, base_dim, *grid.shape)``.

        Entry ``[j, a]`` is the ``d/dy_a`` component of ``e_j``.
        """
        if self._rank != self._grid.base_dim:
            raise FrameError("Frame vectors need rank equal to the chart dimension")
        n = self._rank
        coframe = np.empty((*self._grid.shape, n, n))
        for i in range(n):
            for a in range(n):
                coframe[..., i, a] = self.theta(i).coefficient((a,), ())
        inverse = np.linalg.inv(coframe)
        return np.moveaxis(np.moveaxis(inverse, -1, 0), -1, 1)

    def embed(self, grid: ChartGrid, axes: Sequence[int]) -> "FrameConnection":
        """Pullback along the projection of a product chart onto ``axes``; the coframe is dropped."""
        return FrameConnection(grid, self._rank, {pair: embed(form, grid, axes) for pair, form in self._omega.items()})

    def restrict(self, axis: int, index: int) -> "FrameConnection":
        """Pullback to a coordinate slice of the chart; the coframe is dropped."""
        forms = {pair: restrict(form, axis, index) for pair, form in self._omega.items()}
        grid = self._grid.drop_axes((axis,))
        kept = {pair: form for pair, form in forms.items() if form.bidegree == (1, 0)}
        return FrameConnection(grid, self._rank, kept)

    def __repr__(self) -> str:
        return f"FrameConnection(rank={self._rank}, grid={self._grid!r}, pairs={self.stored_pairs()!r})"


@dataclass(frozen=True)
class CurvatureSet:
    """Curvature two-forms ``Omega_ij`` for ``i < j``; the rest follow by skew-symmetry."""

    grid: ChartGrid
    rank: int
    forms: Mapping[Pair, MixedForm]

    def omega(self, i: int, j: int) -> MixedForm:
        if i == j:
            return MixedForm.zero(self.grid, self.rank, (2, 0))
        if i > j:
            return -self.omega(j, i)
        return self.forms.get((i, j), MixedForm.zero(self.grid, self.rank, (2, 0)))

    def max_abs(self) -> float:
        return max((form.max_abs() for form in self.forms.values()), default=0.0)


def curvature(conn: FrameConnection) -> CurvatureSet:
    """``Omega_ij = d omega_ij + sum_k omega_ik ^ omega_kj``."""
    n = conn.rank
    forms = {}
    for i, j in _pairs(n):
        total = exterior_derivative(conn.omega(i, j))
        for k in range(n):
            if k in (i, j):
                continue
            total = total + wedge(conn.omega(i, k), conn.omega(k, j))
        forms[(i, j)] = total
    return CurvatureSet(conn.grid, n, forms)


def constant_curvature_residual(conn: FrameConnection, k: float) -> float:
    """Largest coefficient of ``Omega_ij - k theta_i ^ theta_j`` over all pairs and samples."""
    omega = curvature(conn)
    residual = 0.0
    for i, j in _pairs(conn.rank):
        difference = omega.omega(i, j) - wedge(conn.theta(i), conn.theta(j)) * k
        residual = max(residual, difference.max_abs())
    logger.debug("constant curvature residual k=%g: %.3e", k, residual)
    return residual


def bianchi_residual(conn: FrameConnection) -> float:
    """Largest coefficient of ``d Omega - Omega ^ omega + omega ^ Omega``."""
    n = conn.rank
    omega = curvature(conn)
    residual = 0.0
    for i, j in _pairs(n):
        total = exterior_derivative(omega.omega(i, j))
        for k in range(n):
            total = total - wedge(omega.omega(i, k), conn.omega(k, j)) + wedge(conn.omega(i, k), omega.omega(k, j))
        residual = max(residual, total.max_abs())
    return residual


def euler_form(omega: CurvatureSet) -> MixedForm:
    """The Euler form ``Pf(Omega) / (2 pi)^m`` for ``n = 2m``; the zero form for odd ``n``.

    The Pfaffian is expanded along the first row with the wedge product, which is commutative
    on two-forms.
    """
    n = omega.rank
    if n % 2:
        return MixedForm.zero(omega.grid, n, (n, 0))

    def combine(terms: list[tuple[int, MixedForm]]) -> MixedForm:
        total = MixedForm.zero(omega.grid, n, terms[0][1].bidegree)
        for sign, term in terms:
            total = total + term * sign
        return total

    pfaffian_form = expand_pfaffian(
        tuple(range(n)),
        omega.omega,
        wedge,
        combine,
        MixedForm.scalar(omega.grid, n, 1.0),
    )
    return pfaffian_form * (1.0 / (2.0 * math.pi) ** (n // 2))


def apply_group_action(conn: FrameConnection, g: GroupElement) -> FrameConnection:
    """The connection ``g nabla g``, with forms ``g(i) g(j) omega_ij``; the coframe is kept."""
    if g.n != conn.rank:
        raise DimensionError(f"Group element has rank {g.n}, connection has rank {conn.rank}")
    forms = {(i, j): conn.omega(i, j) * float(g[i] * g[j]) for i, j in conn.stored_pairs()}
    theta = [conn.theta(i) for i in range(conn.rank)] if conn.has_coframe else None
    return FrameConnection(conn.grid, conn.rank, forms, theta)


def signed_average_euler(conn: FrameConnection) -> MixedForm:
    """``2^-n sum_g eps(g) e(Omega^g)``, which reproduces ``e(Omega)``."""
    total = MixedForm.zero(conn.grid, conn.rank, (conn.rank, 0))
    count = 0
    for g in GroupElement.elements(conn.rank):
        total = total + euler_form(curvature(apply_group_action(conn, g))) * float(epsilon(g))
        count += 1
    return total * (1.0 / count)


def covariant_derivative(field: Sequence[Coefficient], conn: FrameConnection) -> MixedForm:
    """``nabla V = sum_i (d v_i + sum_j omega_ij v_j) e_i``, a form of bidegree (1, 1)."""
    grid = conn.grid
    n = conn.rank
    if len(field) != n:
        raise GridError(f"Vector field has {len(field)} components, connection has rank {n}")
    total = MixedForm.zero(grid, n, (1, 1))
    for i in range(n):
        component = exterior_derivative(MixedForm.scalar(grid, n, field[i]))
        for j in range(n):
            if j != i:
                component = component + conn.omega(i, j) * np.asarray(field[j])
        total = total + wedge(component, MixedForm.monomial(grid, n, (), (i,), 1.0))
    return total


def curvature_operator(omega: CurvatureSet) -> MixedForm:
    """``R = -1/4 sum_ij Omega_ij e_i e_j = -1/2 sum_{i<j} Omega_ij e_i e_j``, bidegree (2, 2)."""
    total = MixedForm.zero(omega.grid, omega.rank, (2, 2))
    for i, j in _pairs(omega.rank):
        generator = MixedForm.monomial(omega.grid, omega.rank, (), (i, j), -0.5)
        total = total + wedge(omega.omega(i, j), generator)
    return total


class HypersurfaceFrame:
    """A frame of flat ``R^n`` along a parameterized hypersurface.

    Parameters
    ----------
    grid : ChartGrid
        Chart of the hypersurface, of dimension ``n - 1``.
    position : array_like
        Ambient coordinates, shape ``(n, *grid.shape)``.
    frame : array_like
        Ambient components of ``e_0, ..., e_{n-1}``, shape ``(n, n, *grid.shape)``; entry
        ``[i, k]`` is the ``k``-th component of ``e_i``. The last vector must be normal.
    """

    def __init__(self, grid: ChartGrid, position: np.ndarray, frame: np.ndarray) -> None:
        position = np.asarray(position, dtype=float)
        frame = np.asarray(frame, dtype=float)
        n = grid.base_dim + 1
        if position.shape != (n, *grid.shape) or frame.shape != (n, n, *grid.shape):
            raise DimensionError(
                f"Hypersurface data must have shapes {(n, *grid.shape)} and {(n, n, *grid.shape)}, "
                f"got {position.shape} and {frame.shape}",
            )
        gram = np.einsum("ik...,jk...->ij...", frame, frame)
        identity = np.eye(n).reshape((n, n) + (1,) * grid.base_dim)
        if float(np.max(np.abs(gram - identity))) > ORTHONORMAL_TOLERANCE:
            raise FrameError("Hypersurface frame is not orthonormal")
        self.grid = grid
        self.position = position
        self.frame = frame
        self.rank = n
        self._check_adapted()

    def _check_adapted(self) -> None:
        normal = self.frame[-1]
        for a in range(self.grid.base_dim):
            tangent = np.stack([self.grid.derivative(self.position[k], a) for k in range(self.rank)])
            scale = max(1.0, float(np.max(np.abs(tangent))))
            leak = float(np.max(np.abs(np.einsum("k...,k...->...", normal, tangent))))
            if leak > ADAPTED_TOLERANCE * scale:
                raise FrameError(f"Last frame vector is not normal: <e_n, dX/dy_{a}> reaches {leak:.3e}")

    def _d(self, values: np.ndarray) -> MixedForm:
        return exterior_derivative(MixedForm.scalar(self.grid, self.rank, values))

    def ambient_connection(self) -> FrameConnection:
        """Pullback of the flat connection: ``omega_ij = sum_k E_ik dE_jk``."""
        forms = {}
        for i, j in _pairs(self.rank):
            total = MixedForm.zero(self.grid, self.rank, (1, 0))
            for k in range(self.rank):
                total = total + self._d(self.frame[j, k]) * self.frame[i, k]
            forms[(i, j)] = total
        return FrameConnection(self.grid, self.rank, forms)

    def boundary_connection(self) -> FrameConnection:
        """Induced Levi-Civita connection of the hypersurface in the tangent frame."""
        ambient = self.ambient_connection()
        n = self.rank - 1
        theta = []
        for a in range(n):
            total = MixedForm.zero(self.grid, n, (1, 0))
            for k in range(self.rank):
                differential = MixedForm(self.grid, n, (1, 0), dict(self._d(self.position[k]).items()))
                total = total + differential * self.frame[a, k]
            theta.append(total)
        forms = {(a, b): MixedForm(self.grid, n, (1, 0), dict(ambient.omega(a, b).items())) for a, b in _pairs(n)}
        return FrameConnection(self.grid, n, forms, theta)


def gauss_equation_residual(ambient: FrameConnection, induced: FrameConnection) -> tuple[float, float]:
    """Residuals of the Gauss equation along a hypersurface with normal ``e_{n-1}``.

    Returns:
        ``(form, operator)``: the largest coefficient of
        ``Omega^d_ab - Omega^M_ab - omega_{n-1,a} ^ omega_{n-1,b}``, and that of
        ``R^d - R^M_tan - (nabla N)^2 / 4`` in the algebra of rank ``n``, ``R^M_tan`` being the
        part of ``R^M`` tangent to the hypersurface.
    """
    n = ambient.rank
    if induced.rank != n - 1 or induced.grid != ambient.grid:
        raise FrameError("Induced connection must have rank n - 1 on the same chart")
    outer = curvature(ambient)
    inner = curvature(induced)
    last = n - 1
    form_residual = 0.0
    for a, b in _pairs(n - 1):
        expected = outer.omega(a, b) + wedge(ambient.omega(last, a), ambient.omega(last, b))
        difference = MixedForm(ambient.grid, n, (2, 0), dict(inner.omega(a, b).items())) - expected
        form_residual = max(form_residual, difference.max_abs())

    lifted = CurvatureSet(
        ambient.grid,
        n,
        {pair: MixedForm(ambient.grid, n, (2, 0), dict(form.items())) for pair, form in inner.forms.items()},
    )
    tangential = CurvatureSet(ambient.grid, n, {pair: outer.omega(*pair) for pair in _pairs(n - 1)})
    normal = np.zeros(n)
    normal[last] = 1.0
    shape_operator = covariant_derivative(list(normal), ambient)
    square = wedge(shape_operator, shape_operator)
    operator_difference = curvature_operator(lifted) - curvature_operator(tangential) - square * 0.25
    operator_residual = operator_difference.max_abs()
    logger.debug("gauss equation residuals: form %.3e operator %.3e", form_residual, operator_residual)
    return form_residual, operator_residual


@dataclass(frozen=True)
class PrincipalFrameData:
    """Principal data ``x_i > 0`` with ``sum x_i^2 = 1`` and coordinates ``y_i`` with ``dy_i = theta_i / x_i``."""

    x: tuple[np.ndarray, ...]
    y: tuple[np.ndarray, ...] | None = None

    def __post_init__(self) -> None:
        squares = sum(np.asarray(xi, dtype=float) ** 2 for xi in self.x)
        deviation = float(np.max(np.abs(squares - 1.0)))
        if deviation > UNIT_TOLERANCE:
            raise DomainError(f"Principal data must satisfy sum x_i^2 = 1, off by {deviation:.3e}")


@dataclass(frozen=True)
class PrincipalResiduals:
    connection: float
    closedness: float
    normal: float | None = None
    asymptotic: float | None = None
    coordinates: float | None = None

    def as_dict(self) -> dict[str, float | None]:
        return {
            "connection": self.connection,
            "normal": self.normal,
            "closedness": self.closedness,
            "asymptotic": self.asymptotic,
            "coordinates": self.coordinates,
        }


def principal_frame_residuals(
    data: PrincipalFrameData,
    conn: FrameConnection,
    normal_forms: Mapping[Pair, MixedForm] | None = None,
) -> PrincipalResiduals:
    """Residuals of the principal-frame identities.

    * connection: ``omega_ij - [(1/x_i) e_j(x_i) theta_i - (1/x_j) e_i(x_j) theta_j]``
    * normal: ``phi_ij - [(1/x_i) e_i(x_j) theta_i - (1/x_j) e_j(x_i) theta_j]`` when the
      normal connection forms are given
    * closedness: ``d(theta_i / x_i)``
    * asymptotic: ``omega_01(W) - phi_01(W)`` for the asymptotic field
      ``W = x_0 e_0 - x_1 e_1`` of a surface
    * coordinates: ``dy_i - theta_i / x_i`` when the coordinates are given

    Directional derivatives ``e_j(f)`` contract the sampled gradient of ``f`` with the frame
    vectors in chart coordinates.

    Raises:
        DomainError: some ``x_i <= 0``.
    """
    n = conn.rank
    grid = conn.grid
    x = [np.asarray(xi, dtype=float) for xi in data.x]
    if len(x) != n:
        raise DimensionError(f"Principal data has {len(x)} functions, connection has rank {n}")
    for i, xi in enumerate(x):
        if np.any(xi <= 0):
            raise DomainError(f"Principal function x_{i} must be positive")
    vectors = conn.frame_vectors()
    gradients = [[grid.derivative(xi, a) for a in range(grid.base_dim)] for xi in x]

    def directional(j: int, i: int) -> np.ndarray:
        # e_j(x_i)
        return sum(vectors[j, a] * gradients[i][a] for a in range(grid.base_dim))

    def predicted(i: int, j: int, *, normal: bool) -> MixedForm:
        if normal:
            return conn.theta(i) * (directional(i, j) / x[i]) - conn.theta(j) * (directional(j, i) / x[j])
        return conn.theta(i) * (directional(j, i) / x[i]) - conn.theta(j) * (directional(i, j) / x[j])

    connection = max((conn.omega(i, j) - predicted(i, j, normal=False)).max_abs() for i, j in _pairs(n))
    closedness = max(exterior_derivative(conn.theta(i) * (1.0 / x[i])).max_abs() for i in range(n))

    normal = asymptotic = coordinates = None
    if normal_forms is not None:
        normal = max(
            (MixedForm(grid, n, (1, 0), dict(normal_forms[(i, j)].items())) - predicted(i, j, normal=True)).max_abs()
            for i, j in _pairs(n)
        )
        if n == 2:
            field = [x[0] * vectors[0, a] - x[1] * vectors[1, a] for a in range(grid.base_dim)]
            phi = MixedForm(grid, n, (1, 0), dict(normal_forms[(0, 1)].items()))
            asymptotic = float(np.max(np.abs(conn.evaluate(conn.omega(0, 1), field) - conn.evaluate(phi, field))))
    if data.y is not None:
        coordinates = max(
            (exterior_derivative(MixedForm.scalar(grid, n, data.y[i])) - conn.theta(i) * (1.0 / x[i])).max_abs()
            for i in range(n)
        )
    residuals = PrincipalResiduals(connection, closedness, normal, asymptotic, coordinates)
    logger.debug("principal frame residuals %s", residuals)
    return residuals

