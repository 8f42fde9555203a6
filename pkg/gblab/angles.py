"""Solid angles of the dual cone cells and the right-hand sides of the Hazzidakis formulae.

At a vertex of the asymptotic polyhedron the unit sphere of the tangent space is cut into
``2n`` cones ``Box(i)+-`` where ``+-dy_i(v) >= |dy_j(v)|`` for every ``j``. Their relative
measures enter the Hazzidakis right-hand side ``1 - sum_i [frac(Box(i)+) + frac(Box(i)-)]``.
"""

import logging
import math
from collections.abc import Sequence
from typing import Final

import numpy as np

from gblab.errors import DimensionError
from gblab.errors import DomainError
from gblab.errors import FrameError
from gblab.pfaffian import double_factorial_c

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES: Final[int] = 1_000_000
DEFAULT_SEED: Final[int] = 0xC0FFEE
CHUNK: Final[int] = 250_000
SINGULAR_TOLERANCE: Final[float] = 1e-12


def _check_coframe(coframe: np.ndarray | Sequence[Sequence[float]]) -> np.ndarray:
    matrix = np.asarray(coframe, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
        raise DimensionError(f"Coframe must be a square matrix, got shape {matrix.shape}")
    scale = max(1.0, float(np.max(np.abs(matrix))))
    if abs(float(np.linalg.det(matrix))) <= SINGULAR_TOLERANCE * scale ** matrix.shape[0]:
        raise FrameError("Coframe matrix is singular")
    return matrix


def _check_cone(axis: int, sign: int, n: int) -> None:
    if not 0 <= axis < n:
        raise DomainError(f"Cone axis must be in 0..{n - 1}, got {axis}")
    if sign not in (1, -1):
        raise DomainError(f"Cone sign must be +1 or -1, got {sign}")


def _in_cone(values: np.ndarray, axis: int, sign: int) -> np.ndarray:
    leading = sign * values[:, axis]
    others = np.delete(np.abs(values), axis, axis=1)
    if others.shape[1] == 0:
        return leading >= 0
    return leading >= np.max(others, axis=1)


def solid_angle(
    axis: int,
    sign: int,
    coframe: np.ndarray | Sequence[Sequence[float]],
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> float:
    """Fraction of the unit sphere lying in the cone ``Box(axis)^sign``.

    Args:
        axis: Index ``i`` of the cone, 0-based.
        sign: +1 or -1.
        coframe: ``coframe[j, k] = dy_j(e_k)`` on an orthonormal frame ``e``.
        samples: Monte Carlo sample count.
        seed: Seed of the sample stream; the same seed gives the same sample set for every
            cone, so the ``2n`` fractions of one coframe sum to exactly 1.

    Returns:
        The measure of the cone relative to the whole sphere, in ``[0, 1]``.

    Raises:
        FrameError: the coframe is singular.
    """
    matrix = _check_coframe(coframe)
    n = matrix.shape[0]
    _check_cone(axis, sign, n)
    if samples < 1:
        raise DomainError(f"Need at least one sample, got {samples}")
    rng = np.random.default_rng(seed)
    hits = 0
    remaining = samples
    while remaining:
        size = min(CHUNK, remaining)
        directions = rng.standard_normal((size, n))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        hits += int(np.count_nonzero(_in_cone(directions @ matrix.T, axis, sign)))
        remaining -= size
    fraction = hits / samples
    logger.debug(
        "solid angle axis=%d sign=%+d fraction=%.6f (seed %#x, %d samples)", axis, sign, fraction, seed, samples
    )
    return fraction


def solid_angles(
    coframe: np.ndarray | Sequence[Sequence[float]],
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> list[float]:
    """All ``2n`` fractions in the order ``Box(0)+, Box(0)-, Box(1)+, ...``."""
    n = _check_coframe(coframe).shape[0]
    return [solid_angle(i, s, coframe, samples, seed) for i in range(n) for s in (1, -1)]


def planar_solid_angle(
    axis: int,
    sign: int,
    coframe: np.ndarray | Sequence[Sequence[float]],
    resolution: int = 200_000,
) -> float:
    """Deterministic cone fraction for ``n = 2`` by midpoint quadrature over the circle."""
    matrix = _check_coframe(coframe)
    if matrix.shape[0] != 2:
        raise DimensionError(f"Planar solid angle needs n = 2, got {matrix.shape[0]}")
    _check_cone(axis, sign, 2)
    angles = (np.arange(resolution) + 0.5) * (2.0 * math.pi / resolution)
    directions = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    return float(np.mean(_in_cone(directions @ matrix.T, axis, sign)))


def _check_fractions(fractions: Sequence[float]) -> np.ndarray:
    values = np.asarray(fractions, dtype=float)
    if values.ndim != 1 or values.size % 2 or values.size == 0:
        raise DimensionError(f"Need 2n angle fractions, got {values.size}")
    for position, value in enumerate(values):
        if not 0.0 <= value <= 1.0:
            raise DomainError(f"Angle fraction must lie in [0, 1], got {value} at position {position}")
    return values


def hazzidakis_rhs(fractions: Sequence[float]) -> float:
    """``1 - sum of the 2n cone fractions``, the right-hand side for even ``n``.

    Raises:
        DomainError: a fraction outside ``[0, 1]``.
    """
    return 1.0 - float(np.sum(_check_fractions(fractions)))


def hazzidakis_boundary_rhs(fractions: Sequence[float]) -> float:
    """The same right-hand side for odd ``n``, where it equals half the boundary Euler integral."""
    values = _check_fractions(fractions)
    n = values.size // 2
    if n % 2 == 0:
        raise DimensionError(f"The boundary formula is for odd n, got n={n}")
    return 1.0 - float(np.sum(values))


def volume_bound(fractions: Sequence[float], n: int) -> float:
    """Volume forced by the Hazzidakis formula on a curvature -1 polyhedron.

    For ``n = 2m`` this is the volume of the polyhedron, ``(-1)^m RHS (2 pi)^m / c_m``; for
    ``n = 2m + 1`` it is the area of its boundary, ``2 (-1)^m RHS (2 pi)^m / c_m``.
    """
    values = _check_fractions(fractions)
    if values.size != 2 * n:
        raise DimensionError(f"Need {2 * n} fractions for n={n}, got {values.size}")
    m = n // 2
    if m < 1:
        raise DomainError(f"Volume bound needs n >= 2, got {n}")
    rhs = 1.0 - float(np.sum(values))
    scale = (-1) ** m * (2.0 * math.pi) ** m / double_factorial_c(m)
    return scale * rhs if n % 2 == 0 else 2.0 * scale * rhs
