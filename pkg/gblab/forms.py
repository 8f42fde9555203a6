"""Differential forms with values in an exterior algebra, sampled on a chart grid.

An element of ``A^{p,q}`` is a base ``p``-form with values in ``Lambda^q`` of a rank-``n``
bundle. On a chart it is a finite sum of monomials ``f(y) dy_I e_K`` where ``I`` and ``K``
are strictly increasing index tuples and ``f`` is sampled on a :class:`ChartGrid`.

The product is the skew-commutative one,

    (phi alpha) ^ (psi beta) = (-1)^(deg psi * deg alpha) (phi ^ psi)(alpha ^ beta),

so elements of even total degree commute. Indices are 0-based: ``dy_0`` is the first chart
axis and ``e_0`` the first frame vector.

Derivatives are second-order finite differences on ordinary axes and spectral (FFT) on
periodic axes. Quadrature is the trapezoid rule (or Simpson) on ordinary axes and the
rectangle rule on periodic axes.

Examples
--------
>>> from gblab.forms import ChartGrid, MixedForm, wedge
>>> grid = ChartGrid([(0.0, 1.0), (0.0, 1.0)], resolution=5)
>>> dy0 = MixedForm.monomial(grid, 1, (0,), (), 1.0)
>>> dy1 = MixedForm.monomial(grid, 1, (1,), (), 1.0)
>>> wedge(dy1, dy0).coefficient((0, 1), ())[0, 0]
np.float64(-1.0)
"""

import logging
import math
from collections.abc import Callable
from collections.abc import Iterable
from collections.abc import Iterator
from collections.abc import Mapping
from collections.abc import Sequence
from typing import Final
from typing import Literal
from typing import Union
from typing import overload

import numpy as np
from scipy.integrate import simpson
from scipy.integrate import trapezoid

from gblab.errors import DegreeError
from gblab.errors import GridError
from gblab.errors import TruncationError
from gblab.utils import canonical_indices
from gblab.utils import merge_sign
from gblab.utils import permutation_sign

logger = logging.getLogger(__name__)

MIN_RESOLUTION: Final[int] = 3
DEFAULT_DECAY_TOLERANCE: Final[float] = 1e-10

Rule = Literal["trapezoid", "simpson"]
Key = tuple[tuple[int, ...], tuple[int, ...]]
Coefficient = Union[float, np.ndarray]


class ChartGrid:
    """A rectangular sampling of a single coordinate chart.

    Parameters
    ----------
    bounds : sequence of (float, float)
        Per-axis ``(lower, upper)`` with ``lower <= upper``. Equal bounds collapse an ordinary axis,
        leaving a chart of measure zero. An empty sequence gives the zero-dimensional chart of a point.
    resolution : int or sequence of int
        Per-axis sample count, at least 3.
    periodic : sequence of bool, optional
        Axes flagged periodic sample ``[lower, upper)`` and are differentiated spectrally.

    Attributes
    ----------
    base_dim : int
        Number of axes.
    shape : tuple of int
        Shape of every sampled coefficient.
    spacing : tuple of float
        Sample spacing per axis.
    """

    def __init__(
        self,
        bounds: Sequence[tuple[float, float]],
        resolution: int | Sequence[int],
        periodic: Sequence[bool] | None = None,
    ) -> None:
        bounds = tuple((float(lower), float(upper)) for lower, upper in bounds)
        if isinstance(resolution, int):
            resolution = (resolution,) * len(bounds)
        resolution = tuple(int(r) for r in resolution)
        periodic = tuple(bool(p) for p in periodic) if periodic is not None else (False,) * len(bounds)

        if len(resolution) != len(bounds) or len(periodic) != len(bounds):
            raise GridError(
                f"Grid needs one resolution and periodic flag per axis, got {len(bounds)} axes, "
                f"{len(resolution)} resolutions and {len(periodic)} flags",
            )
        for axis, ((lower, upper), count, flag) in enumerate(zip(bounds, resolution, periodic, strict=True)):
            if lower > upper:
                raise GridError(f"Axis {axis} needs lower <= upper, got ({lower}, {upper})")
            if lower == upper and flag:
                raise GridError(f"Periodic axis {axis} needs lower < upper, got ({lower}, {upper})")
            if count < MIN_RESOLUTION:
                raise GridError(f"Axis {axis} needs at least {MIN_RESOLUTION} samples, got {count}")

        self._bounds = bounds
        self._resolution = resolution
        self._periodic = periodic

    @staticmethod
    def point() -> "ChartGrid":
        """The zero-dimensional chart of a single point."""
        return ChartGrid((), ())

    @staticmethod
    def uniform(base_dim: int, lower: float, upper: float, resolution: int) -> "ChartGrid":
        """Cube ``[lower, upper]^base_dim`` with the same resolution on every axis."""
        return ChartGrid([(lower, upper)] * base_dim, resolution)

    @property
    def base_dim(self) -> int:
        return len(self._bounds)

    @property
    def bounds(self) -> tuple[tuple[float, float], ...]:
        return self._bounds

    @property
    def resolution(self) -> tuple[int, ...]:
        return self._resolution

    @property
    def periodic(self) -> tuple[bool, ...]:
        return self._periodic

    @property
    def shape(self) -> tuple[int, ...]:
        return self._resolution

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(self._step(axis) for axis in range(self.base_dim))

    @property
    def max_spacing(self) -> float:
        return max(self.spacing, default=0.0)

    @property
    def collapsed(self) -> bool:
        """True when some axis has equal bounds."""
        return any(lower == upper for lower, upper in self._bounds)

    def _step(self, axis: int) -> float:
        lower, upper = self._bounds[axis]
        count = self._resolution[axis]
        return (upper - lower) / (count if self._periodic[axis] else count - 1)

    def axis(self, axis: int) -> np.ndarray:
        """The 1-D sample coordinates along ``axis``."""
        lower, upper = self._bounds[axis]
        count = self._resolution[axis]
        if self._periodic[axis]:
            return lower + self._step(axis) * np.arange(count)
        return np.linspace(lower, upper, count)

    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of full grid shape, ``ij`` indexing."""
        if self.base_dim == 0:
            return ()
        return tuple(np.meshgrid(*(self.axis(k) for k in range(self.base_dim)), indexing="ij"))

    def derivative(self, values: np.ndarray, axis: int) -> np.ndarray:
        """Partial derivative of sampled values along ``axis``."""
        if self._bounds[axis][0] == self._bounds[axis][1]:
            raise GridError(f"Axis {axis} is collapsed, there is no derivative along it")
        values = np.asarray(values, dtype=float)
        if not self._periodic[axis]:
            return np.gradient(values, self._step(axis), axis=axis, edge_order=2)
        count = values.shape[axis]
        lower, upper = self._bounds[axis]
        wavenumbers = 2.0 * math.pi / (upper - lower) * np.fft.rfftfreq(count, d=1.0 / count)
        factor = 1j * wavenumbers
        if count % 2 == 0:
            # the Nyquist mode has no odd derivative on a real grid
            factor[-1] = 0.0
        shape = [1] * values.ndim
        shape[axis] = factor.size
        spectrum = np.fft.rfft(values, axis=axis) * factor.reshape(shape)
        return np.fft.irfft(spectrum, n=count, axis=axis)

    def integrate_axes(self, values: np.ndarray, axes: Sequence[int], rule: Rule = "trapezoid") -> np.ndarray:
        """Integrate sampled values over the listed axes; the other axes are kept."""
        result = np.asarray(values, dtype=float)
        for axis in sorted(axes, reverse=True):
            step = self._step(axis)
            if self._periodic[axis]:
                result = step * np.sum(result, axis=axis)
            elif rule == "simpson":
                result = simpson(result, dx=step, axis=axis)
            elif rule == "trapezoid":
                result = trapezoid(result, dx=step, axis=axis)
            else:
                raise ValueError(f"Unknown quadrature rule {rule!r}")
        return result

    def integrate_values(self, values: Coefficient, rule: Rule = "trapezoid") -> float:
        """Integrate sampled values over the whole chart."""
        full = np.broadcast_to(np.asarray(values, dtype=float), self.shape)
        return float(self.integrate_axes(full, range(self.base_dim), rule))

    def drop_axes(self, axes: Iterable[int]) -> "ChartGrid":
        """The chart spanned by the axes not listed."""
        dropped = set(axes)
        kept = [k for k in range(self.base_dim) if k not in dropped]
        return ChartGrid(
            [self._bounds[k] for k in kept],
            [self._resolution[k] for k in kept],
            [self._periodic[k] for k in kept],
        )

    def product(self, other: "ChartGrid") -> "ChartGrid":
        """The product chart, axes of ``self`` first."""
        return ChartGrid(
            self._bounds + other.bounds,
            self._resolution + other.resolution,
            self._periodic + other.periodic,
        )

    def boundary_mask(self) -> np.ndarray:
        """Boolean array marking samples on a non-periodic edge of the chart."""
        mask = np.zeros(self.shape, dtype=bool)
        for axis in range(self.base_dim):
            if self._periodic[axis]:
                continue
            index: list[slice | int] = [slice(None)] * self.base_dim
            index[axis] = 0
            mask[tuple(index)] = True
            index[axis] = -1
            mask[tuple(index)] = True
        return mask

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChartGrid):
            return NotImplemented
        return (
            self._bounds == other.bounds and self._resolution == other.resolution and self._periodic == other.periodic
        )

    def __hash__(self) -> int:
        return hash((self._bounds, self._resolution, self._periodic))

    def __repr__(self) -> str:
        return f"ChartGrid(bounds={self._bounds!r}, resolution={self._resolution!r}, periodic={self._periodic!r})"


def _check_same(grid: ChartGrid, other: ChartGrid, fiber_rank: int, other_rank: int) -> None:
    if grid != other:
        raise GridError(f"Forms live on different grids: {grid!r} and {other!r}")
    if fiber_rank != other_rank:
        raise GridError(f"Forms have different fiber ranks: {fiber_rank} and {other_rank}")


class MixedForm:
    """A homogeneous element of ``A^{p,q}`` sampled on a chart.

    Parameters
    ----------
    grid : ChartGrid
        The chart the coefficients are sampled on.
    fiber_rank : int
        Rank ``n`` of the bundle.
    bidegree : (int, int)
        Base degree ``p`` and fiber degree ``q``. Bidegrees beyond ``(base_dim, n)`` are
        allowed but such a form is always zero.
    coefficients : mapping
        ``{(I, K): values}`` with canonical (strictly increasing) index tuples. Values are
        scalars or arrays broadcastable to ``grid.shape``. Use :meth:`monomial` for
        non-canonical indices.
    """

    def __init__(
        self,
        grid: ChartGrid,
        fiber_rank: int,
        bidegree: tuple[int, int],
        coefficients: Mapping[Key, Coefficient] | None = None,
    ) -> None:
        p, q = bidegree
        if p < 0 or q < 0:
            raise DegreeError(f"Bidegree must be nonnegative, got {bidegree}")
        if fiber_rank < 0:
            raise DegreeError(f"Fiber rank must be nonnegative, got {fiber_rank}")
        self._grid = grid
        self._fiber_rank = fiber_rank
        self._bidegree = (p, q)
        self._coefficients: dict[Key, np.ndarray] = {}
        for (base, fiber), values in (coefficients or {}).items():
            base, fiber = tuple(base), tuple(fiber)
            if len(base) != p or len(fiber) != q:
                raise DegreeError(f"Monomial {(base, fiber)} does not have bidegree {bidegree}")
            if list(base) != sorted(set(base)) or list(fiber) != sorted(set(fiber)):
                raise DegreeError(f"Monomial {(base, fiber)} is not canonically ordered")
            if (base and not 0 <= base[-1] < grid.base_dim) or (base and base[0] < 0):
                raise DegreeError(f"Base index out of range in {base} for a {grid.base_dim}-dimensional chart")
            if (fiber and not 0 <= fiber[-1] < fiber_rank) or (fiber and fiber[0] < 0):
                raise DegreeError(f"Fiber index out of range in {fiber} for rank {fiber_rank}")
            array = np.array(np.broadcast_to(values, grid.shape), dtype=float)
            # identically zero monomials are not stored
            if np.any(array):
                self._coefficients[(base, fiber)] = array

    @staticmethod
    def zero(grid: ChartGrid, fiber_rank: int, bidegree: tuple[int, int]) -> "MixedForm":
        return MixedForm(grid, fiber_rank, bidegree)

    @staticmethod
    def scalar(grid: ChartGrid, fiber_rank: int, values: Coefficient) -> "MixedForm":
        """A function, as a form of bidegree (0, 0)."""
        return MixedForm(grid, fiber_rank, (0, 0), {((), ()): values})

    @staticmethod
    def monomial(
        grid: ChartGrid,
        fiber_rank: int,
        base: Sequence[int],
        fiber: Sequence[int],
        values: Coefficient,
    ) -> "MixedForm":
        """``values * dy_base e_fiber`` with arbitrary index order.

        Reordering multiplies by the sign of the sorting permutation of each tuple; a repeated
        index gives the zero form.
        """
        base_sign, base_sorted = canonical_indices(base)
        fiber_sign, fiber_sorted = canonical_indices(fiber)
        bidegree = (len(base), len(fiber))
        if base_sign == 0 or fiber_sign == 0:
            return MixedForm.zero(grid, fiber_rank, bidegree)
        sign = base_sign * fiber_sign
        return MixedForm(grid, fiber_rank, bidegree, {(base_sorted, fiber_sorted): sign * np.asarray(values)})

    @property
    def grid(self) -> ChartGrid:
        return self._grid

    @property
    def fiber_rank(self) -> int:
        return self._fiber_rank

    @property
    def bidegree(self) -> tuple[int, int]:
        return self._bidegree

    @property
    def total_degree(self) -> int:
        return self._bidegree[0] + self._bidegree[1]

    def keys(self) -> Iterator[Key]:
        return iter(self._coefficients)

    def items(self) -> Iterator[tuple[Key, np.ndarray]]:
        return iter(self._coefficients.items())

    def coefficient(self, base: Sequence[int], fiber: Sequence[int]) -> np.ndarray:
        """Coefficient of ``dy_base e_fiber``, signs resolved for any index order."""
        base_sign, base_sorted = canonical_indices(base)
        fiber_sign, fiber_sorted = canonical_indices(fiber)
        stored = self._coefficients.get((base_sorted, fiber_sorted))
        if stored is None or base_sign == 0 or fiber_sign == 0:
            return np.zeros(self._grid.shape)
        return base_sign * fiber_sign * stored

    def max_abs(self) -> float:
        """Largest absolute coefficient value over all monomials and samples."""
        return max((float(np.max(np.abs(values))) for values in self._coefficients.values()), default=0.0)

    def map_coefficients(self, function: Callable[[np.ndarray], np.ndarray]) -> "MixedForm":
        return MixedForm(
            self._grid,
            self._fiber_rank,
            self._bidegree,
            {key: function(values) for key, values in self._coefficients.items()},
        )

    def __add__(self, other: "MixedForm") -> "MixedForm":
        if not isinstance(other, MixedForm):
            return NotImplemented
        _check_same(self._grid, other.grid, self._fiber_rank, other.fiber_rank)
        if self._bidegree != other.bidegree:
            raise DegreeError(f"Cannot add bidegrees {self._bidegree} and {other.bidegree}; use MixedSum")
        merged = dict(self._coefficients)
        for key, values in other.items():
            merged[key] = merged[key] + values if key in merged else values
        return MixedForm(self._grid, self._fiber_rank, self._bidegree, merged)

    def __neg__(self) -> "MixedForm":
        return self.map_coefficients(np.negative)

    def __sub__(self, other: "MixedForm") -> "MixedForm":
        if not isinstance(other, MixedForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, factor: Coefficient) -> "MixedForm":
        if isinstance(factor, (MixedForm, MixedSum)):
            return NotImplemented
        return self.map_coefficients(lambda values: values * factor)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return (
            f"MixedForm(bidegree={self._bidegree}, fiber_rank={self._fiber_rank}, "
            f"monomials={sorted(self._coefficients)!r})"
        )


class MixedSum:
    """A formal sum of :class:`MixedForm` values, at most one per bidegree."""

    def __init__(self, grid: ChartGrid, fiber_rank: int, components: Iterable[MixedForm] = ()) -> None:
        self._grid = grid
        self._fiber_rank = fiber_rank
        self._components: dict[tuple[int, int], MixedForm] = {}
        for form in components:
            _check_same(grid, form.grid, fiber_rank, form.fiber_rank)
            if form.bidegree in self._components:
                self._components[form.bidegree] = self._components[form.bidegree] + form
            else:
                self._components[form.bidegree] = form

    @staticmethod
    def identity(grid: ChartGrid, fiber_rank: int) -> "MixedSum":
        return MixedSum(grid, fiber_rank, [MixedForm.scalar(grid, fiber_rank, 1.0)])

    @staticmethod
    def of(form: MixedForm) -> "MixedSum":
        return MixedSum(form.grid, form.fiber_rank, [form])

    @property
    def grid(self) -> ChartGrid:
        return self._grid

    @property
    def fiber_rank(self) -> int:
        return self._fiber_rank

    @property
    def bidegrees(self) -> list[tuple[int, int]]:
        return sorted(self._components)

    def components(self) -> Iterator[MixedForm]:
        return iter(self._components[bidegree] for bidegree in self.bidegrees)

    def component(self, bidegree: tuple[int, int]) -> MixedForm:
        """The summand of the given bidegree, zero if absent."""
        return self._components.get(bidegree, MixedForm.zero(self._grid, self._fiber_rank, bidegree))

    def is_zero(self) -> bool:
        return all(form.max_abs() == 0.0 for form in self._components.values())

    def max_abs(self) -> float:
        return max((form.max_abs() for form in self._components.values()), default=0.0)

    def __add__(self, other: "MixedSum | MixedForm") -> "MixedSum":
        if isinstance(other, MixedForm):
            other = MixedSum.of(other)
        if not isinstance(other, MixedSum):
            return NotImplemented
        _check_same(self._grid, other.grid, self._fiber_rank, other.fiber_rank)
        return MixedSum(self._grid, self._fiber_rank, [*self.components(), *other.components()])

    def __neg__(self) -> "MixedSum":
        return MixedSum(self._grid, self._fiber_rank, [-form for form in self.components()])

    def __sub__(self, other: "MixedSum | MixedForm") -> "MixedSum":
        if isinstance(other, MixedForm):
            other = MixedSum.of(other)
        return self + (-other)

    def __mul__(self, factor: Coefficient) -> "MixedSum":
        if isinstance(factor, (MixedForm, MixedSum)):
            return NotImplemented
        return MixedSum(self._grid, self._fiber_rank, [form * factor for form in self.components()])

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"MixedSum(fiber_rank={self._fiber_rank}, bidegrees={self.bidegrees!r})"


def _wedge_forms(alpha: MixedForm, beta: MixedForm) -> MixedForm:
    _check_same(alpha.grid, beta.grid, alpha.fiber_rank, beta.fiber_rank)
    bidegree = (alpha.bidegree[0] + beta.bidegree[0], alpha.bidegree[1] + beta.bidegree[1])
    # (phi alpha)(psi beta) = (-1)^(|psi||alpha|) (phi psi)(alpha beta)
    swap = -1 if (beta.bidegree[0] * alpha.bidegree[1]) % 2 else 1
    product: dict[Key, np.ndarray] = {}
    for (base_a, fiber_a), values_a in alpha.items():
        for (base_b, fiber_b), values_b in beta.items():
            sign = merge_sign(base_a, base_b) * merge_sign(fiber_a, fiber_b)
            if sign == 0:
                continue
            key = (tuple(sorted(base_a + base_b)), tuple(sorted(fiber_a + fiber_b)))
            term = (swap * sign) * values_a * values_b
            product[key] = product[key] + term if key in product else term
    return MixedForm(alpha.grid, alpha.fiber_rank, bidegree, product)


@overload
def wedge(alpha: MixedForm, beta: MixedForm) -> MixedForm: ...
@overload
def wedge(alpha: MixedSum, beta: MixedForm | MixedSum) -> MixedSum: ...
@overload
def wedge(alpha: MixedForm | MixedSum, beta: MixedSum) -> MixedSum: ...


def wedge(alpha: MixedForm | MixedSum, beta: MixedForm | MixedSum) -> MixedForm | MixedSum:
    """Skew-commutative product in the bigraded algebra.

    Two :class:`MixedForm` values give a :class:`MixedForm`; if either factor is a
    :class:`MixedSum` the result is a :class:`MixedSum`.

    Raises:
        GridError: the factors live on different grids or bundles.
    """
    if isinstance(alpha, MixedForm) and isinstance(beta, MixedForm):
        return _wedge_forms(alpha, beta)
    left = MixedSum.of(alpha) if isinstance(alpha, MixedForm) else alpha
    right = MixedSum.of(beta) if isinstance(beta, MixedForm) else beta
    _check_same(left.grid, right.grid, left.fiber_rank, right.fiber_rank)
    terms = []
    for a in left.components():
        for b in right.components():
            product = _wedge_forms(a, b)
            if any(True for _ in product.keys()):
                terms.append(product)
    return MixedSum(left.grid, left.fiber_rank, terms)


@overload
def exterior_derivative(alpha: MixedForm) -> MixedForm: ...
@overload
def exterior_derivative(alpha: MixedSum) -> MixedSum: ...


def exterior_derivative(alpha: MixedForm | MixedSum) -> MixedForm | MixedSum:
    """Base exterior derivative ``d``, acting on coefficients with the fiber generators held fixed."""
    if isinstance(alpha, MixedSum):
        return MixedSum(alpha.grid, alpha.fiber_rank, [exterior_derivative(form) for form in alpha.components()])
    grid = alpha.grid
    p, q = alpha.bidegree
    result: dict[Key, np.ndarray] = {}
    for (base, fiber), values in alpha.items():
        for axis in range(grid.base_dim):
            if axis in base:
                continue
            # dy_axis ^ dy_base -> move dy_axis past the smaller indices
            sign = -1 if sum(1 for i in base if i < axis) % 2 else 1
            key = (tuple(sorted((*base, axis))), fiber)
            term = sign * grid.derivative(values, axis)
            result[key] = result[key] + term if key in result else term
    return MixedForm(grid, alpha.fiber_rank, (p + 1, q), result)


def interior_product(field: Sequence[Coefficient], alpha: MixedForm | MixedSum) -> MixedForm | MixedSum:
    """Contraction with a fiber vector field ``V = sum_i v_i e_i``.

    ``iota(V)`` is the odd derivation of the fiber algebra with ``iota(V) e_i = v_i``; passing
    it across a base ``p``-form costs ``(-1)^p``. On fiber degree 0 the result is zero.
    """
    if isinstance(alpha, MixedSum):
        return MixedSum(alpha.grid, alpha.fiber_rank, [interior_product(field, form) for form in alpha.components()])
    if len(field) != alpha.fiber_rank:
        raise GridError(f"Vector field has {len(field)} components, bundle has rank {alpha.fiber_rank}")
    p, q = alpha.bidegree
    if q == 0:
        return MixedForm.zero(alpha.grid, alpha.fiber_rank, (p, 0))
    base_sign = -1 if p % 2 else 1
    result: dict[Key, np.ndarray] = {}
    for (base, fiber), values in alpha.items():
        for position, index in enumerate(fiber):
            sign = base_sign * (-1 if position % 2 else 1)
            key = (base, fiber[:position] + fiber[position + 1 :])
            term = sign * values * np.asarray(field[index])
            result[key] = result[key] + term if key in result else term
    return MixedForm(alpha.grid, alpha.fiber_rank, (p, q - 1), result)


def supertrace(alpha: MixedForm | MixedSum) -> MixedForm | MixedSum:
    """Projection onto the coefficient of ``e_0 ^ ... ^ e_{n-1}``.

    For a :class:`MixedForm` the fiber degree must equal the rank; a :class:`MixedSum`
    contributes only its top-fiber-degree components.

    Raises:
        DegreeError: a MixedForm with fiber degree different from the rank.
    """
    if isinstance(alpha, MixedSum):
        top = [supertrace(form) for form in alpha.components() if form.bidegree[1] == alpha.fiber_rank]
        return MixedSum(alpha.grid, alpha.fiber_rank, top)
    p, q = alpha.bidegree
    if q != alpha.fiber_rank:
        raise DegreeError(f"Supertrace needs fiber degree {alpha.fiber_rank}, got {q}")
    volume = tuple(range(alpha.fiber_rank))
    return MixedForm(
        alpha.grid,
        alpha.fiber_rank,
        (p, 0),
        {(base, ()): values for (base, fiber), values in alpha.items() if fiber == volume},
    )


def exp_even(x: MixedSum) -> MixedSum:
    """Exponential of an even element.

    The scalar part ``s`` is exponentiated pointwise; the rest ``N`` is nilpotent, so
    ``exp(x) = e^s (1 + N + N^2/2! + ...)`` stops once a power vanishes.

    Raises:
        DegreeError: a summand has odd total degree.
    """
    for form in x.components():
        if form.total_degree % 2:
            raise DegreeError(f"exp_even needs even total degree, got bidegree {form.bidegree}")
    scalar = x.component((0, 0)).coefficient((), ())
    nilpotent = MixedSum(x.grid, x.fiber_rank, [form for form in x.components() if form.bidegree != (0, 0)])

    total = MixedSum.identity(x.grid, x.fiber_rank)
    power = MixedSum.identity(x.grid, x.fiber_rank)
    order = 0
    while True:
        order += 1
        power = wedge(power, nilpotent) * (1.0 / order)
        if not any(True for _ in power.components()):
            break
        total = total + power
    logger.debug("exp_even stopped after %d powers", order - 1)
    return total * np.exp(scalar)


def integrate(alpha: MixedForm, rule: Rule = "trapezoid") -> float:
    """Integral of a top-degree scalar form over the chart, oriented by ``dy_0 ^ ... ^ dy_{d-1}``.

    Raises:
        DegreeError: the form is not of bidegree ``(base_dim, 0)``.
    """
    grid = alpha.grid
    if alpha.bidegree != (grid.base_dim, 0):
        raise DegreeError(f"integrate needs bidegree ({grid.base_dim}, 0), got {alpha.bidegree}")
    values = alpha.coefficient(tuple(range(grid.base_dim)), ())
    return grid.integrate_values(values, rule)


def _renumber(base: Sequence[int], dropped: Sequence[int]) -> tuple[int, ...]:
    return tuple(i - sum(1 for d in dropped if d < i) for i in base)


def _check_axes(grid: ChartGrid, axes: Sequence[int]) -> tuple[int, ...]:
    axes = tuple(sorted(axes))
    if len(set(axes)) != len(axes) or any(not 0 <= axis < grid.base_dim for axis in axes):
        raise GridError(f"Invalid fiber axes {axes} for a {grid.base_dim}-dimensional chart")
    return axes


def fiber_integrate(
    alpha: MixedForm,
    fiber_axes: Sequence[int],
    *,
    rule: Rule = "trapezoid",
    decay_tol: float | None = DEFAULT_DECAY_TOLERANCE,
    rays: bool = False,
) -> MixedForm:
    """Integration over the fiber spanned by ``fiber_axes`` (the slant product).

    A monomial ``f dy_J ^ dt_F`` integrates to ``(integral of f dt) dy_J``; monomials missing
    part of ``dt_F`` integrate to zero. The total space is oriented base first.

    Args:
        alpha: Form on the total-space chart.
        fiber_axes: Chart axes that span the fiber.
        rule: Quadrature rule on non-periodic axes.
        decay_tol: Largest coefficient magnitude tolerated on a truncated fiber edge; ``None``
            skips the check.
        rays: Fibers start at their lower edge, so only upper edges count as truncations.

    Returns:
        Form on the chart of the remaining axes.

    Raises:
        TruncationError: the integrand has not decayed at a truncated edge.
    """
    grid = alpha.grid
    axes = _check_axes(grid, fiber_axes)
    reduced = grid.drop_axes(axes)
    p, q = alpha.bidegree
    result: dict[Key, np.ndarray] = {}
    for (base, fiber), values in alpha.items():
        if not set(axes) <= set(base):
            continue
        remaining = tuple(i for i in base if i not in axes)
        # dy_base = sign * dy_remaining ^ dt_axes
        sign = permutation_sign(remaining + axes)
        if decay_tol is not None:
            _check_decay(grid, values, axes, decay_tol, rays=rays)
        key = (_renumber(remaining, axes), fiber)
        term = sign * grid.integrate_axes(values, axes, rule)
        result[key] = result[key] + term if key in result else term
    return MixedForm(reduced, alpha.fiber_rank, (max(p - len(axes), 0), q), result)


def _check_decay(grid: ChartGrid, values: np.ndarray, axes: Sequence[int], tolerance: float, *, rays: bool) -> None:
    for axis in axes:
        if grid.periodic[axis]:
            continue
        edges = (-1,) if rays else (0, -1)
        for edge in edges:
            edge_max = float(np.max(np.abs(np.take(values, edge, axis=axis))))
            if edge_max > tolerance:
                raise TruncationError(
                    f"Fiber integrand is {edge_max:.3e} on the edge of axis {axis}, above tolerance {tolerance:.1e}",
                )


def restrict(alpha: MixedForm, axis: int, index: int) -> MixedForm:
    """Pullback to the coordinate slice ``y_axis = axis sample[index]``."""
    grid = alpha.grid
    _check_axes(grid, (axis,))
    p, q = alpha.bidegree
    result = {
        (_renumber(base, (axis,)), fiber): np.take(values, index, axis=axis)
        for (base, fiber), values in alpha.items()
        if axis not in base
    }
    return MixedForm(grid.drop_axes((axis,)), alpha.fiber_rank, (p, q), result)


def boundary_fiber_integrate(alpha: MixedForm, fiber_axes: Sequence[int], *, rule: Rule = "trapezoid") -> MixedForm:
    """Integration over the boundary of a box fiber with its outward orientation.

    ``Theta/dF = sum_j (-1)^j (Theta|_{t_j = upper} - Theta|_{t_j = lower}) / F_j`` where
    ``F_j`` is the face box spanned by the other fiber axes. With :func:`fiber_integrate`
    this satisfies ``(d Theta)/F = d(Theta/F) + (-1)^(p+1) Theta/dF``, ``p`` the degree of
    ``Theta/F``.
    """
    grid = alpha.grid
    axes = _check_axes(grid, fiber_axes)
    terms: list[MixedForm] = []
    for position, axis in enumerate(axes):
        others = tuple(a - (1 if a > axis else 0) for a in axes if a != axis)
        upper = fiber_integrate(restrict(alpha, axis, -1), others, rule=rule, decay_tol=None)
        lower = fiber_integrate(restrict(alpha, axis, 0), others, rule=rule, decay_tol=None)
        face = upper - lower
        terms.append(-face if position % 2 else face)
    total = terms[0]
    for term in terms[1:]:
        total = total + term
    return total


def embed(alpha: MixedForm, grid: ChartGrid, axes: Sequence[int]) -> MixedForm:
    """Pull a form back along the projection of ``grid`` onto the listed axes.

    Axis ``k`` of the form's chart becomes axis ``axes[k]`` of ``grid``; coefficients are
    constant along the other axes.
    """
    if len(axes) != alpha.grid.base_dim:
        raise GridError(f"Need {alpha.grid.base_dim} target axes, got {len(axes)}")
    for k, axis in enumerate(axes):
        if grid.bounds[axis] != alpha.grid.bounds[k] or grid.resolution[axis] != alpha.grid.resolution[k]:
            raise GridError(f"Axis {k} of the form does not match axis {axis} of the target grid")
    order = list(axes)
    if order != sorted(order):
        raise GridError(f"Target axes must keep their order, got {axes}")
    missing = [axis for axis in range(grid.base_dim) if axis not in order]
    result = {}
    for (base, fiber), values in alpha.items():
        expanded = np.expand_dims(values, tuple(missing)) if missing else values
        result[(tuple(order[i] for i in base), fiber)] = np.broadcast_to(expanded, grid.shape)
    return MixedForm(grid, alpha.fiber_rank, alpha.bidegree, result)
