"""Flat symmetric bilinear forms and their diagonalization into rank-one terms.

A symmetric bilinear map ``beta: V x V -> W`` between ``n``-dimensional inner product spaces
is stored as the tensor ``h[l, i, j] = <beta(e_i, e_j), w_l>``. It is flat when

    <beta(x, x), beta(y, y)> = <beta(x, y), beta(x, y)>

for all ``x, y``. A flat form with trivial kernel splits as ``h[l] = sum_k A[l, k] phi_k (x) phi_k``
with ``A`` orthogonal; :func:`diagonalize` recovers ``phi`` and ``A`` through the commuting
symmetric family ``B(y) = beta(y) beta(x)^-1`` of a regular element ``x``.
"""

import itertools
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from dataclasses import field
from typing import Final

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.stats import ortho_group

from gblab.errors import CommutationError
from gblab.errors import DimensionError
from gblab.errors import DomainError
from gblab.errors import KernelError

logger = logging.getLogger(__name__)

FLATNESS_SAMPLES: Final[int] = 1000
FLATNESS_GATE: Final[float] = 1e-8
REGULAR_SAMPLES: Final[int] = 200
DEFAULT_SEED: Final[int] = 20240611
RANK_TOLERANCE: Final[float] = 1e-9
CLUSTER_TOLERANCE: Final[float] = 1e-6
COMMUTATION_LIMIT: Final[float] = 1e-5
JACOBI_THRESHOLD: Final[float] = 1e-12
JACOBI_MAX_SWEEPS: Final[int] = 100
FAMILY_SIZE: Final[int] = 4


class FlatBilinearTensor:
    """The tensor ``h[l, i, j]`` of a symmetric bilinear map ``R^n x R^n -> R^n``.

    Raises:
        DimensionError: ``h`` is not an ``n x n x n`` array.
        DomainError: ``h[l]`` is not exactly symmetric.
    """

    def __init__(self, h: np.ndarray | Sequence[Sequence[Sequence[float]]]) -> None:
        values = np.array(h, dtype=float)
        if values.ndim != 3 or not values.shape[0] == values.shape[1] == values.shape[2] or values.shape[0] < 1:
            raise DimensionError(f"Tensor must have shape (n, n, n), got {values.shape}")
        if not np.array_equal(values, values.transpose(0, 2, 1)):
            raise DomainError("Every slice h[l] must be symmetric")
        values.setflags(write=False)
        self._h = values

    @staticmethod
    def from_terms(weights: np.ndarray, phi: np.ndarray) -> "FlatBilinearTensor":
        """``h[l] = sum_k weights[l, k] phi[k] (x) phi[k]``, symmetrized exactly."""
        weights = np.asarray(weights, dtype=float)
        phi = np.asarray(phi, dtype=float)
        if weights.ndim != 2 or phi.ndim != 2 or weights.shape[1] != phi.shape[0]:
            raise DimensionError(f"Incompatible term shapes {weights.shape} and {phi.shape}")
        h = np.einsum("lk,ki,kj->lij", weights, phi, phi)
        return FlatBilinearTensor((h + h.transpose(0, 2, 1)) / 2.0)

    @property
    def n(self) -> int:
        return self._h.shape[0]

    @property
    def h(self) -> np.ndarray:
        return self._h

    def evaluate(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """``beta(x, y)``; leading axes of ``x`` and ``y`` broadcast."""
        return np.einsum("lij,...i,...j->...l", self._h, x, y)

    def matrix(self, x: np.ndarray) -> np.ndarray:
        """The matrix of ``beta(x): V -> W``, ``M[l, j] = sum_i h[l, i, j] x_i``."""
        return np.einsum("lij,i->lj", self._h, np.asarray(x, dtype=float))

    def contract(self, w: np.ndarray) -> np.ndarray:
        """The bilinear form ``<beta(., .), w>`` as a symmetric matrix."""
        return np.einsum("l,lij->ij", np.asarray(w, dtype=float), self._h)

    def __repr__(self) -> str:
        return f"FlatBilinearTensor(n={self.n})"


def _unit_vectors(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    vectors = rng.standard_normal((count, n))
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def flatness_residual(beta: FlatBilinearTensor, samples: int = FLATNESS_SAMPLES, seed: int = DEFAULT_SEED) -> float:
    """Largest flatness defect over random unit pairs and the polarized quadruple form."""
    rng = np.random.default_rng(seed)
    x = _unit_vectors(rng, samples, beta.n)
    y = _unit_vectors(rng, samples, beta.n)
    diagonal = np.einsum("sl,sl->s", beta.evaluate(x, x), beta.evaluate(y, y))
    mixed = beta.evaluate(x, y)
    pairs = float(np.max(np.abs(diagonal - np.einsum("sl,sl->s", mixed, mixed))))
    residual = max(pairs, exterior_orthogonality_residual(beta, samples, seed + 1))
    logger.debug("flatness residual n=%d: %.3e", beta.n, residual)
    return residual


def exterior_orthogonality_residual(
    beta: FlatBilinearTensor,
    samples: int = FLATNESS_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> float:
    """Largest ``|sum_l [h_l(x, z) h_l(y, w) - h_l(x, w) h_l(y, z)]|`` over random unit quadruples."""
    rng = np.random.default_rng(seed)
    x, y, z, w = (_unit_vectors(rng, samples, beta.n) for _ in range(4))
    first = np.einsum("sl,sl->s", beta.evaluate(x, z), beta.evaluate(y, w))
    second = np.einsum("sl,sl->s", beta.evaluate(x, w), beta.evaluate(y, z))
    return float(np.max(np.abs(first - second)))


def _rank(matrix: np.ndarray) -> tuple[int, float]:
    singular = np.linalg.svd(matrix, compute_uv=False)
    if singular[0] == 0.0:
        return 0, 0.0
    return int(np.count_nonzero(singular > RANK_TOLERANCE * singular[0])), float(singular[-1] / singular[0])


def find_regular_element(
    beta: FlatBilinearTensor,
    samples: int = REGULAR_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> np.ndarray:
    """A unit vector ``x`` of maximal rank ``dim beta(x)(V)``.

    Candidates are ``samples`` random unit vectors followed by the coordinate directions; among
    those of maximal rank the best conditioned one wins.

    Raises:
        KernelError: no candidate has full rank, so ``N(beta) != 0``.
    """
    rng = np.random.default_rng(seed)
    candidates = np.concatenate([_unit_vectors(rng, samples, beta.n), np.eye(beta.n)])
    best, best_score = candidates[0], (-1, -1.0)
    for candidate in candidates:
        score = _rank(beta.matrix(candidate))
        if score > best_score:
            best, best_score = candidate, score
    rank = best_score[0]
    logger.debug("regular element rank %d of %d, conditioning %.3e", rank, beta.n, best_score[1])
    if rank < beta.n:
        raise KernelError(f"Every sampled beta(x) has rank at most {rank} < {beta.n}; the form has a kernel")
    return best


def jacobi_joint_diagonalize(
    matrices: np.ndarray,
    threshold: float = JACOBI_THRESHOLD,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal ``V`` making every symmetric ``matrices[k]`` as diagonal as possible.

    Sweeps of Givens rotations; a sweep whose rotation sines all stay below ``threshold`` ends
    the iteration. Returns ``V`` and the rotated stack ``V^T matrices[k] V``.
    """
    stack = np.array(matrices, dtype=float)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise DimensionError(f"Need a stack of square matrices, got shape {stack.shape}")
    size = stack.shape[1]
    rotation = np.eye(size)
    for _ in range(max_sweeps):
        rotated = False
        for p, q in itertools.combinations(range(size), 2):
            difference = stack[:, p, p] - stack[:, q, q]
            twice_off = stack[:, p, q] + stack[:, q, p]
            ton = difference @ difference - twice_off @ twice_off
            toff = 2.0 * (difference @ twice_off)
            angle = 0.5 * np.arctan2(toff, ton + np.hypot(ton, toff))
            c, s = np.cos(angle), np.sin(angle)
            if abs(s) <= threshold:
                continue
            rotated = True
            givens = np.array([[c, -s], [s, c]])
            index = [p, q]
            stack[:, :, index] = stack[:, :, index] @ givens
            stack[:, index, :] = np.einsum("ba,kbj->kaj", givens, stack[:, index, :])
            rotation[:, index] = rotation[:, index] @ givens
        if not rotated:
            break
    return rotation, stack


def _clusters(values: np.ndarray, tolerance: float) -> list[list[int]]:
    groups: list[list[int]] = []
    scale = max(1.0, float(np.max(np.abs(values))))
    for index in np.argsort(values):
        if groups and abs(values[index] - values[groups[-1][-1]]) <= tolerance * scale:
            groups[-1].append(int(index))
        else:
            groups.append([int(index)])
    return groups


def _split_clusters(
    eigenvectors: np.ndarray,
    eigenvalues: np.ndarray,
    family: Sequence[np.ndarray],
    tolerance: float,
) -> np.ndarray:
    """Resolve eigenvalue clusters of the leading operator with the rest of the family."""
    vectors = eigenvectors.copy()
    for group in _clusters(eigenvalues, tolerance):
        if len(group) == 1:
            continue
        basis = vectors[:, group]
        projected = np.stack([basis.T @ member @ basis for member in family])
        projected = (projected + projected.transpose(0, 2, 1)) / 2.0
        rotation, diagonal = jacobi_joint_diagonalize(projected)
        spectra = np.stack([np.diag(block) for block in diagonal])
        scale = max(1.0, float(np.max(np.abs(spectra))))
        for a, b in itertools.combinations(range(len(group)), 2):
            if np.max(np.abs(spectra[:, a] - spectra[:, b])) <= tolerance * scale:
                raise KernelError(
                    f"A cluster of {len(group)} eigenvalues is shared by the whole family; the form has a kernel",
                )
        vectors[:, group] = basis @ rotation
        logger.debug("split an eigenvalue cluster of size %d by joint diagonalization", len(group))
    return vectors


@dataclass(frozen=True)
class Diagonalization:
    """The rank-one splitting ``h[l] = sum_k A[l, k] phi[k] (x) phi[k]``.

    ``basis[k]`` is the unit vector with ``phi_j(basis[k]) = 0`` for ``j != k``, so that
    ``beta(basis[k])(V)`` is the line through ``A[:, k]``.
    """

    basis: np.ndarray
    phi: np.ndarray
    A: np.ndarray
    residuals: dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict[str, object]:
        return {
            "basis": self.basis.tolist(),
            "phi": self.phi.tolist(),
            "A": self.A.tolist(),
            "residuals": dict(sorted(self.residuals.items())),
        }


def _family(beta: FlatBilinearTensor, regular: np.ndarray, rng: np.random.Generator) -> tuple[list[np.ndarray], float]:
    inverse = np.linalg.inv(beta.matrix(regular))
    directions = list(_unit_vectors(rng, FAMILY_SIZE, beta.n)) + list(np.eye(beta.n))
    family = [beta.matrix(y) @ inverse for y in directions]
    symmetry = max(float(np.max(np.abs(member - member.T))) for member in family)
    return family, symmetry


def reconstruction_residual(beta: FlatBilinearTensor, phi: np.ndarray, weights: np.ndarray) -> float:
    """Largest entry of ``h[l] - sum_k weights[l, k] phi[k] (x) phi[k]``."""
    rebuilt = np.einsum("lk,ki,kj->lij", weights, phi, phi)
    return float(np.max(np.abs(beta.h - rebuilt)))


def diagonalize(beta: FlatBilinearTensor, seed: int = DEFAULT_SEED) -> Diagonalization:
    """Split a flat form with trivial kernel into ``n`` rank-one terms.

    A form whose operators commute but whose flatness residual exceeds ``FLATNESS_GATE`` is still split,
    with a warning.

    Raises:
        KernelError: ``N(beta) != 0``.
        CommutationError: the operators ``B(y)`` fail to commute, so the input is not flat.
    """
    n = beta.n
    regular = find_regular_element(beta, seed=seed)
    rng = np.random.default_rng(seed + 1)
    family, symmetry = _family(beta, regular, rng)
    commutation = max(
        (float(np.max(np.abs(a @ b - b @ a))) for a, b in itertools.combinations(family, 2)),
        default=0.0,
    )
    logger.debug("B(y) family: symmetry %.3e, commutation %.3e", symmetry, commutation)
    if commutation > COMMUTATION_LIMIT:
        raise CommutationError(f"B(y) operators fail to commute, defect {commutation:.3e} > {COMMUTATION_LIMIT}")

    flatness = flatness_residual(beta, seed=seed)
    if flatness > FLATNESS_GATE:
        logger.warning(
            "flatness residual %.3e exceeds %.0e, splitting a form that is not flat",
            flatness,
            FLATNESS_GATE,
        )

    leading = (family[0] + family[0].T) / 2.0
    eigenvalues, eigenvectors = np.linalg.eigh(leading)
    directions = _split_clusters(eigenvectors, eigenvalues, family[1:], CLUSTER_TOLERANCE)

    phi = np.empty((n, n))
    weights = np.empty((n, n))
    rank_one = 0.0
    for k in range(n):
        w = directions[:, k]
        values, vectors = np.linalg.eigh(beta.contract(w))
        top = int(np.argmax(np.abs(values)))
        if values[top] < 0:
            w, values = -w, -values
        rank_one = max(rank_one, float(np.sum(np.abs(np.delete(values, top))) / abs(values[top])))
        vector = vectors[:, top]
        # fix the sign of phi_k by its largest component
        if vector[int(np.argmax(np.abs(vector)))] < 0:
            vector = -vector
        phi[k] = np.sqrt(values[top]) * vector
        weights[:, k] = w

    basis = np.linalg.inv(phi)
    basis = (basis / np.linalg.norm(basis, axis=0, keepdims=True)).T
    residuals = {
        "symmetry": symmetry,
        "commutation": commutation,
        "rank_one": rank_one,
        "orthogonality": float(np.max(np.abs(weights.T @ weights - np.eye(n)))),
        "reconstruction": reconstruction_residual(beta, phi, weights),
        "basis_orthonormality": float(np.max(np.abs(basis @ basis.T - np.eye(n)))),
    }
    logger.debug("diagonalization residuals %s", residuals)
    return Diagonalization(basis, phi, weights, residuals)


def image_dimension(beta: FlatBilinearTensor, v: np.ndarray) -> int:
    """``dim beta(v)(V)``."""
    return _rank(beta.matrix(v))[0]


@dataclass(frozen=True)
class PlantedInstance:
    """A synthetic form built from known rank-one directions ``phi`` and normal weights."""

    tensor: FlatBilinearTensor
    phi: np.ndarray
    weights: np.ndarray


def _orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    return np.asarray(ortho_group.rvs(dim=n, random_state=rng), dtype=float)


def planted(n: int, rng: np.random.Generator, *, orthogonal_rows: bool = True) -> PlantedInstance:
    """A flat form with trivial kernel and known splitting.

    ``phi`` has orthogonal rows of lengths in ``[0.5, 2]`` when ``orthogonal_rows``, otherwise
    it is a general invertible matrix with singular values in ``[0.5, 2]``.
    """
    if n < 2:
        raise DimensionError(f"Planted instances need n >= 2, got {n}")
    weights = _orthogonal(n, rng)
    scales = rng.uniform(0.5, 2.0, size=n)
    rows = _orthogonal(n, rng)
    phi = scales[:, None] * rows if orthogonal_rows else _orthogonal(n, rng) @ (scales[:, None] * rows)
    return PlantedInstance(FlatBilinearTensor.from_terms(weights, phi), phi, weights)


def degenerate(n: int, rng: np.random.Generator) -> PlantedInstance:
    """A flat form built from only ``n - 1`` rank-one terms, so its kernel is a line."""
    if n < 2:
        raise DimensionError(f"Degenerate instances need n >= 2, got {n}")
    weights = _orthogonal(n, rng)[:, : n - 1]
    phi = _orthogonal(n, rng)[: n - 1] * rng.uniform(0.5, 2.0, size=n - 1)[:, None]
    return PlantedInstance(FlatBilinearTensor.from_terms(weights, phi), phi, weights)


def pseudosphere_instance(x1: float, x2: float) -> FlatBilinearTensor:
    """Second fundamental forms of a surface of curvature -1 in principal coordinates.

    ``h[1]`` is the horosphere form ``theta_0^2 + theta_1^2`` and ``h[0]`` the remaining one,
    ``diag(-x2/x1, x1/x2)``; the splitting has ``phi_i = theta_i / sqrt(x_i)``.
    """
    if x1 <= 0 or x2 <= 0 or abs(x1 * x1 + x2 * x2 - 1.0) > 1e-12:
        raise DomainError(f"Need x1, x2 > 0 with x1^2 + x2^2 = 1, got ({x1}, {x2})")
    return FlatBilinearTensor([np.diag([-x2 / x1, x1 / x2]), np.eye(2)])


def diagonal_instance(n: int) -> FlatBilinearTensor:
    """``beta(x, y) = sum_i x_i y_i w_i``."""
    h = np.zeros((n, n, n))
    for i in range(n):
        h[i, i, i] = 1.0
    return FlatBilinearTensor(h)


def recovery_error(planted_rows: np.ndarray, recovered_rows: np.ndarray) -> float:
    """``1 - min |cos|`` between row directions after the best matching up to sign and order."""
    planted_rows = np.asarray(planted_rows, dtype=float)
    recovered_rows = np.asarray(recovered_rows, dtype=float)
    if planted_rows.shape != recovered_rows.shape:
        raise DimensionError(f"Cannot match {planted_rows.shape} against {recovered_rows.shape}")
    left = planted_rows / np.linalg.norm(planted_rows, axis=1, keepdims=True)
    right = recovered_rows / np.linalg.norm(recovered_rows, axis=1, keepdims=True)
    cosines = np.abs(left @ right.T)
    rows, cols = linear_sum_assignment(-cosines)
    return float(1.0 - np.min(cosines[rows, cols]))
