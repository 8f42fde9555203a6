"""Pfaffians of skew-symmetric matrices and the closed-form constants used with them.

The Pfaffian of an even-dimensional skew-symmetric matrix is the polynomial square root of its
determinant. Two evaluation routes are kept side by side:

* the permutation sum ``Pf(A) = 1/(2^m m!) * sum sgn(s) a_{s(1)s(2)} ... a_{s(2m-1)s(2m)}``,
  affordable up to dimension 6, and
* the first-row minor expansion ``Pf(A) = sum_j (-1)^j a_{0j} Pf(A without rows/cols 0, j)``,
  used up to dimension 12.

The expansion is also available against an arbitrary commutative product, which is how
:mod:`gblab.frames` evaluates the form-valued Pfaffian of a curvature matrix.

Examples
--------
>>> from gblab.pfaffian import SkewMatrix, pfaffian
>>> pfaffian(SkewMatrix.from_blocks([2.0, 3.0]))
6.0
"""

import itertools
import logging
import math
from collections.abc import Callable
from collections.abc import Sequence
from functools import lru_cache
from typing import Final
from typing import TypeVar

import numpy as np
from scipy.special import factorial2
from scipy.special import gamma

from gblab.errors import DimensionError
from gblab.errors import DomainError
from gblab.errors import NotSkewError
from gblab.utils import permutation_sign

logger = logging.getLogger(__name__)

SKEW_TOLERANCE: Final[float] = 1e-12
DEFINITION_MAX_DIM: Final[int] = 6
EXPANSION_MAX_DIM: Final[int] = 12

T = TypeVar("T")


class SkewMatrix:
    """A real skew-symmetric matrix.

    Parameters
    ----------
    entries : array_like
        Square matrix. It is rejected, never repaired, when ``A + A^T`` exceeds
        ``SKEW_TOLERANCE`` relative to the largest entry.

    Attributes
    ----------
    dim : int
        Number of rows.
    entries : numpy.ndarray
        Read-only copy of the matrix.
    """

    def __init__(self, entries: Sequence[Sequence[float]] | np.ndarray) -> None:
        matrix = np.array(entries, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionError(f"Skew matrix must be square, got shape {matrix.shape}")
        if matrix.shape[0] == 0:
            raise DimensionError("Skew matrix must have positive dimension")
        scale = max(1.0, float(np.max(np.abs(matrix))))
        asymmetry = float(np.max(np.abs(matrix + matrix.T)))
        if asymmetry > SKEW_TOLERANCE * scale:
            raise NotSkewError(f"Matrix is not skew-symmetric: max |A + A^T| = {asymmetry:.3e}")
        matrix.setflags(write=False)
        self._entries = matrix

    @staticmethod
    def from_blocks(values: Sequence[float]) -> "SkewMatrix":
        """Block-diagonal matrix with 2x2 blocks ``[[0, a_k], [-a_k, 0]]``.

        Args:
            values: The block entries ``a_1, ..., a_m``.

        Returns:
            New SkewMatrix of dimension ``2m``.
        """
        dim = 2 * len(values)
        matrix = np.zeros((dim, dim))
        for k, value in enumerate(values):
            matrix[2 * k, 2 * k + 1] = value
            matrix[2 * k + 1, 2 * k] = -value
        return SkewMatrix(matrix)

    @staticmethod
    def random(dim: int, rng: np.random.Generator) -> "SkewMatrix":
        """Skew matrix with standard normal entries above the diagonal.

        Args:
            dim: Matrix dimension.
            rng: Random generator.

        Returns:
            New SkewMatrix.
        """
        upper = np.triu(rng.standard_normal((dim, dim)), k=1)
        return SkewMatrix(upper - upper.T)

    @property
    def dim(self) -> int:
        return int(self._entries.shape[0])

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    def conjugate(self, rotation: np.ndarray) -> "SkewMatrix":
        """Return ``B A B^T`` for a square matrix ``B``."""
        rotation = np.asarray(rotation, dtype=float)
        conjugated = rotation @ self._entries @ rotation.T
        # B A B^T is skew up to rounding; restore exact skewness of the product
        return SkewMatrix((conjugated - conjugated.T) / 2.0)

    def __repr__(self) -> str:
        return f"SkewMatrix(dim={self.dim}, entries={self._entries.tolist()!r})"


def expand_pfaffian(
    indices: tuple[int, ...],
    entry: Callable[[int, int], T],
    product: Callable[[T, T], T],
    combine: Callable[[list[tuple[int, T]]], T],
    unit: T,
) -> T:
    """First-row minor expansion of a Pfaffian over a commutative ring.

    Args:
        indices: Row/column labels still present in the minor, in order.
        entry: ``entry(i, j)`` returns the matrix entry ``a_ij`` for ``i < j``.
        product: Ring multiplication; must be commutative on the entries.
        combine: Turns a list of ``(sign, term)`` pairs into their signed sum.
        unit: Ring identity, the Pfaffian of the empty minor.

    Returns:
        The Pfaffian of the minor labelled by ``indices``.
    """
    if not indices:
        return unit
    first, rest = indices[0], indices[1:]
    terms = []
    for position, j in enumerate(rest):
        minor = rest[:position] + rest[position + 1 :]
        sign = -1 if position % 2 else 1
        terms.append((sign, product(entry(first, j), expand_pfaffian(minor, entry, product, combine, unit))))
    return combine(terms)


def _as_skew(matrix: "SkewMatrix | np.ndarray | Sequence[Sequence[float]]") -> SkewMatrix:
    if isinstance(matrix, SkewMatrix):
        return matrix
    return SkewMatrix(matrix)


def _check_even(skew: SkewMatrix) -> None:
    if skew.dim % 2:
        raise DimensionError(f"Pfaffian needs an even dimension, got {skew.dim}")


def pfaffian_by_definition(matrix: "SkewMatrix | np.ndarray | Sequence[Sequence[float]]") -> float:
    """Pfaffian from the permutation sum; limited to dimension ``DEFINITION_MAX_DIM``."""
    skew = _as_skew(matrix)
    _check_even(skew)
    if skew.dim > DEFINITION_MAX_DIM:
        raise DimensionError(f"Permutation sum is limited to dim <= {DEFINITION_MAX_DIM}, got {skew.dim}")
    a = skew.entries
    half = skew.dim // 2
    total = 0.0
    for perm in itertools.permutations(range(skew.dim)):
        term = float(permutation_sign(perm))
        for k in range(half):
            term *= a[perm[2 * k], perm[2 * k + 1]]
        total += term
    return total / (2**half * math.factorial(half))


def pfaffian_by_expansion(matrix: "SkewMatrix | np.ndarray | Sequence[Sequence[float]]") -> float:
    """Pfaffian from the memoized first-row minor expansion; limited to ``EXPANSION_MAX_DIM``."""
    skew = _as_skew(matrix)
    _check_even(skew)
    if skew.dim > EXPANSION_MAX_DIM:
        raise DimensionError(f"Minor expansion is limited to dim <= {EXPANSION_MAX_DIM}, got {skew.dim}")
    a = skew.entries

    # same recursion as expand_pfaffian, memoized on the remaining labels
    @lru_cache(maxsize=None)
    def minor(indices: tuple[int, ...]) -> float:
        if not indices:
            return 1.0
        first, rest = indices[0], indices[1:]
        total = 0.0
        for position, j in enumerate(rest):
            sign = -1.0 if position % 2 else 1.0
            total += sign * a[first, j] * minor(rest[:position] + rest[position + 1 :])
        return total

    return float(minor(tuple(range(skew.dim))))


def pfaffian(matrix: "SkewMatrix | np.ndarray | Sequence[Sequence[float]]") -> float:
    """Pfaffian of a skew-symmetric matrix.

    Args:
        matrix: A :class:`SkewMatrix` or anything convertible to one.

    Returns:
        ``Pf(A)``; its square equals ``det(A)``.

    Raises:
        DimensionError: odd dimension or dimension above ``EXPANSION_MAX_DIM``.
        NotSkewError: the matrix is not skew-symmetric.
    """
    value = pfaffian_by_expansion(matrix)
    logger.debug("pfaffian value=%r", value)
    return value


def double_factorial_c(m: int) -> int:
    """The constant ``c_m = (2m)!/(2^m m!) = (2m-1)(2m-3)...3*1``."""
    if m < 1:
        raise DomainError(f"c_m is defined for m >= 1, got {m}")
    return int(factorial2(2 * m - 1, exact=True))


def sphere_volume(n: int) -> float:
    """Volume of the unit sphere ``S^{n-1}`` in ``R^n``: ``2 pi^{n/2} / Gamma(n/2)``."""
    if n < 1:
        raise DomainError(f"Sphere volume needs n >= 1, got {n}")
    return float(2.0 * math.pi ** (n / 2.0) / gamma(n / 2.0))


def gaussian_moment(k: int) -> float:
    """``integral over R of t^{2k} e^{-t^2} dt = Gamma(k + 1/2) = (sqrt(pi)/2^k)(2k-1)!!``."""
    if k < 0:
        raise DomainError(f"Gaussian moment needs k >= 0, got {k}")
    return float(gamma(k + 0.5))


def half_line_moment(j: int) -> float:
    """``integral over [0, inf) of t^j e^{-t^2} dt = Gamma((j+1)/2)/2``."""
    if j < 0:
        raise DomainError(f"Half-line moment needs j >= 0, got {j}")
    return float(gamma((j + 1) / 2.0) / 2.0)
