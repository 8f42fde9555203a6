"""Integer chains on the asymptotic polyhedron and its dual cell decomposition of the sphere.

Two finite complexes carry the combinatorics:

* the simplicial complex ``Delta_*`` of the boundary of the cross-polytope
  ``P = {|+-y_0 +- ... +- y_{n-1}| <= a}``, with cells ``g Delta(I)`` spanned by the vertices
  ``g(i) a_i`` for ``i`` in ``I``;
* the cubical complex ``Box_*`` of the unit sphere, with cells ``g Box(I)`` dual to them.

A cell is stored under the key ``(I, g|_I)`` with ``I`` strictly increasing; ``g`` only
matters on ``I``. The stabilizer ``G(I*)`` acts trivially on ``Delta(I)`` and through the
orientation character ``eps_{I*}`` on ``Box(I)``. Reordering ``I`` multiplies by the sign of
the sorting permutation and a repeated index gives zero.

Examples
--------
>>> from gblab.chains import boundary_delta, simplex
>>> from gblab.group import GroupElement
>>> dict(boundary_delta(simplex(2, GroupElement.identity(2), (0, 1))).items())
{((0,), (1,)): -1, ((1,), (1,)): 1}
"""

import itertools
import logging
import math
from collections.abc import Iterator
from collections.abc import Mapping
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Final
from typing import Literal

import numpy as np
from sympy import ZZ
from sympy import Matrix
from sympy.matrices.normalforms import invariant_factors

from gblab.errors import DimensionError
from gblab.errors import DomainError
from gblab.group import GroupElement
from gblab.group import complement
from gblab.group import epsilon
from gblab.group import epsilon_restricted
from gblab.utils import canonical_indices

logger = logging.getLogger(__name__)

CellKey = tuple[tuple[int, ...], tuple[int, ...]]
Kind = Literal["simplex", "cube"]

HOMOLOGY_MAX_N: Final[int] = 8


class Chain:
    """A finitely supported integer combination of cells of one complex.

    Parameters
    ----------
    kind : {"simplex", "cube"}
        Which complex the cells belong to.
    n : int
        Rank of the symmetry group, the number of coordinates.
    terms : mapping, optional
        ``{(I, g|_I): coefficient}`` with canonical keys. Zero coefficients are dropped.
    """

    def __init__(self, kind: Kind, n: int, terms: Mapping[CellKey, int] | None = None) -> None:
        if kind not in ("simplex", "cube"):
            raise DomainError(f"Chain kind must be 'simplex' or 'cube', got {kind!r}")
        if n < 1:
            raise DimensionError(f"Chains need n >= 1, got {n}")
        self.kind: Kind = kind
        self.n = n
        self.terms: dict[CellKey, int] = {}
        for key, coefficient in (terms or {}).items():
            _check_key(key, n)
            if coefficient:
                self.terms[key] = self.terms.get(key, 0) + int(coefficient)
        self.terms = {key: c for key, c in self.terms.items() if c}

    @staticmethod
    def zero(kind: Kind, n: int) -> "Chain":
        return Chain(kind, n)

    def is_zero(self) -> bool:
        return not self.terms

    def dimension_of(self, key: CellKey) -> int:
        """Geometric dimension of a cell: ``|I| - 1`` for simplices, ``n - |I|`` for cubes."""
        size = len(key[0])
        return size - 1 if self.kind == "simplex" else self.n - size

    def items(self) -> Iterator[tuple[CellKey, int]]:
        return iter(sorted(self.terms.items()))

    def _check(self, other: "Chain") -> None:
        if other.kind != self.kind or other.n != self.n:
            raise DimensionError(
                f"Cannot combine a {self.kind} chain (n={self.n}) with a {other.kind} chain (n={other.n})",
            )

    def __add__(self, other: "Chain") -> "Chain":
        if not isinstance(other, Chain):
            return NotImplemented
        self._check(other)
        merged = dict(self.terms)
        for key, coefficient in other.terms.items():
            merged[key] = merged.get(key, 0) + coefficient
        return Chain(self.kind, self.n, merged)

    def __neg__(self) -> "Chain":
        return self * -1

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __mul__(self, factor: int) -> "Chain":
        return Chain(self.kind, self.n, {key: factor * c for key, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        return (self.kind, self.n, self.terms) == (other.kind, other.n, other.terms)

    def __hash__(self) -> int:
        return hash((self.kind, self.n, tuple(sorted(self.terms.items()))))

    def __repr__(self) -> str:
        return f"Chain({self.kind!r}, n={self.n}, terms={dict(self.items())!r})"


def _check_key(key: CellKey, n: int) -> None:
    indices, signs = key
    if list(indices) != sorted(set(indices)) or any(not 0 <= i < n for i in indices):
        raise DomainError(f"Cell indices must be strictly increasing in 0..{n - 1}, got {indices}")
    if len(signs) != len(indices) or any(s not in (1, -1) for s in signs):
        raise DomainError(f"Cell signs {signs} do not match indices {indices}")
    if not indices:
        raise DomainError("Cells need at least one index")


def simplex(n: int, g: GroupElement, indices: Sequence[int], coefficient: int = 1) -> Chain:
    """The chain ``coefficient * g Delta(i_0, ..., i_k)``."""
    if g.n != n:
        raise DimensionError(f"Group element has rank {g.n}, expected {n}")
    sign, ordered = canonical_indices(indices)
    if sign == 0:
        return Chain.zero("simplex", n)
    return Chain("simplex", n, {(ordered, g.restrict(ordered)): sign * coefficient})


def cube(n: int, g: GroupElement, indices: Sequence[int], coefficient: int = 1) -> Chain:
    """The chain ``coefficient * g Box(i_0, ..., i_k)``; ``G(I*)`` acts through ``eps_{I*}``."""
    if g.n != n:
        raise DimensionError(f"Group element has rank {g.n}, expected {n}")
    sign, ordered = canonical_indices(indices)
    if sign == 0:
        return Chain.zero("cube", n)
    twist = epsilon_restricted(g, complement(ordered, n))
    return Chain("cube", n, {(ordered, g.restrict(ordered)): sign * twist * coefficient})


def representative(n: int, key: CellKey) -> GroupElement:
    """The element equal to ``g|_I`` on ``I`` and +1 elsewhere."""
    indices, signs = key
    full = [1] * n
    for i, s in zip(indices, signs):
        full[i] = s
    return GroupElement(full)


def cells(kind: Kind, n: int, size: int) -> list[CellKey]:
    """All canonical cell keys with ``|I| = size``, in sorted order."""
    keys = []
    for indices in _subsets(n, size):
        for g in GroupElement.elements(size):
            keys.append((indices, g.signs))
    return sorted(keys)


def _subsets(n: int, size: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(n), size))


def simplex_count(n: int, k: int) -> int:
    """Number of ``k``-simplices of the cross-polytope boundary, ``2^(k+1) C(n, k+1)``."""
    if not 0 <= k < n:
        raise DomainError(f"Simplex dimension must be in 0..{n - 1}, got {k}")
    return 2 ** (k + 1) * math.comb(n, k + 1)


def cube_count(n: int, d: int) -> int:
    """Number of ``d``-dimensional cells of the dual sphere decomposition."""
    return simplex_count(n, n - 1 - d)


def act(g: GroupElement, chain: Chain) -> Chain:
    """Left translation of a chain by ``g``."""
    result = Chain.zero(chain.kind, chain.n)
    build = simplex if chain.kind == "simplex" else cube
    for key, coefficient in chain.terms.items():
        result = result + build(chain.n, g * representative(chain.n, key), key[0], coefficient)
    return result


def boundary_delta(chain: Chain) -> Chain:
    """Alternating face boundary ``sum_j (-1)^j g Delta(I without i_j)``."""
    if chain.kind != "simplex":
        raise DomainError(f"boundary_delta needs a simplex chain, got {chain.kind}")
    terms: dict[CellKey, int] = {}
    for (indices, signs), coefficient in chain.terms.items():
        if len(indices) == 1:
            continue
        for j in range(len(indices)):
            face = (indices[:j] + indices[j + 1 :], signs[:j] + signs[j + 1 :])
            terms[face] = terms.get(face, 0) + (-1 if j % 2 else 1) * coefficient
    return Chain("simplex", chain.n, terms)


def boundary_box(chain: Chain) -> Chain:
    """Cellular boundary ``d(g Box(I)) = sum over i not in I of (g - g g_i) Box(i, I)``."""
    if chain.kind != "cube":
        raise DomainError(f"boundary_box needs a cube chain, got {chain.kind}")
    n = chain.n
    result = Chain.zero("cube", n)
    for key, coefficient in chain.terms.items():
        g = representative(n, key)
        for i in complement(key[0], n):
            flipped = g * GroupElement.flip(n, i)
            result = result + cube(n, g, (i, *key[0]), coefficient) - cube(n, flipped, (i, *key[0]), coefficient)
    return result


def boundary(chain: Chain) -> Chain:
    return boundary_delta(chain) if chain.kind == "simplex" else boundary_box(chain)


def duality_pairing(box: Chain, delta: Chain) -> int:
    """Bilinear pairing ``<g Box(I), h Delta(J)> = eps_I(g)`` when ``I = J`` and ``g|_I = h|_I``.

    With this pairing ``boundary_box`` is the adjoint of ``boundary_delta``.
    """
    if box.kind != "cube" or delta.kind != "simplex":
        raise DomainError("duality_pairing takes a cube chain and a simplex chain")
    if box.n != delta.n:
        raise DimensionError(f"Chains have different ranks {box.n} and {delta.n}")
    total = 0
    for key, coefficient in box.terms.items():
        other = delta.terms.get(key)
        if other:
            total += coefficient * other * math.prod(key[1])
    return total


DoubleKey = tuple[CellKey, CellKey]


class DoubleChain:
    """Integer chain on the product complex ``Delta_* x Box_*``."""

    def __init__(self, n: int, terms: Mapping[DoubleKey, int] | None = None) -> None:
        if n < 1:
            raise DimensionError(f"Chains need n >= 1, got {n}")
        self.n = n
        merged: dict[DoubleKey, int] = {}
        for (left, right), coefficient in (terms or {}).items():
            _check_key(left, n)
            _check_key(right, n)
            merged[(left, right)] = merged.get((left, right), 0) + int(coefficient)
        self.terms = {key: c for key, c in merged.items() if c}

    @staticmethod
    def product(left: Chain, right: Chain) -> "DoubleChain":
        """Cross product of a simplex chain and a cube chain."""
        if left.kind != "simplex" or right.kind != "cube" or left.n != right.n:
            raise DomainError("DoubleChain.product takes a simplex chain and a cube chain of the same rank")
        return DoubleChain(
            left.n,
            {(a, b): ca * cb for a, ca in left.terms.items() for b, cb in right.terms.items()},
        )

    def is_zero(self) -> bool:
        return not self.terms

    def items(self) -> Iterator[tuple[DoubleKey, int]]:
        return iter(sorted(self.terms.items()))

    def __add__(self, other: "DoubleChain") -> "DoubleChain":
        if not isinstance(other, DoubleChain):
            return NotImplemented
        merged = dict(self.terms)
        for key, coefficient in other.terms.items():
            merged[key] = merged.get(key, 0) + coefficient
        return DoubleChain(self.n, merged)

    def __mul__(self, factor: int) -> "DoubleChain":
        return DoubleChain(self.n, {key: factor * c for key, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DoubleChain):
            return NotImplemented
        return (self.n, self.terms) == (other.n, other.terms)

    def __hash__(self) -> int:
        return hash((self.n, tuple(sorted(self.terms.items()))))

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"DoubleChain(n={self.n}, terms={len(self.terms)})"


def double_boundary(chain: DoubleChain) -> DoubleChain:
    """Product boundary ``d(s x c) = ds x c + (-1)^(dim s) s x dc``."""
    n = chain.n
    terms: dict[DoubleKey, int] = {}
    for (left, right), coefficient in chain.terms.items():
        for face, c in boundary_delta(Chain("simplex", n, {left: coefficient})).terms.items():
            terms[(face, right)] = terms.get((face, right), 0) + c
        sign = -1 if (len(left[0]) - 1) % 2 else 1
        for face, c in boundary_box(Chain("cube", n, {right: 1})).terms.items():
            terms[(left, face)] = terms.get((left, face), 0) + sign * coefficient * c
    return DoubleChain(n, terms)


def fundamental_cycle(n: int) -> DoubleChain:
    """The cycle ``z = sum_k z_{k, n-1-k}`` pairing every simplex with its dual cell.

    The term ``g Delta(I) x g Box(I)`` with ``|I| = k + 1`` carries the coefficient
    ``(-1)^(k(k+1)/2) eps_I(g)``. Under the ``eps_{I*}``-twisted cube orientation this is the sign
    that makes the double boundary vanish; ``(-1)^(k(k-1)/2)`` leaves a nonzero boundary.

    Raises:
        DomainError: ``n < 2``.
    """
    if n < 2:
        raise DomainError(f"The fundamental cycle needs n >= 2, got {n}")
    terms: dict[DoubleKey, int] = {}
    for size in range(1, n + 1):
        k = size - 1
        sign = -1 if (k * (k + 1) // 2) % 2 else 1
        for key in cells("simplex", n, size):
            terms[(key, key)] = sign * math.prod(key[1])
    logger.debug("fundamental cycle for n=%d has %d terms", n, len(terms))
    return DoubleChain(n, terms)


def is_cycle(chain: "Chain | DoubleChain") -> bool:
    if isinstance(chain, DoubleChain):
        return double_boundary(chain).is_zero()
    return boundary(chain).is_zero()


def beta_action(h: GroupElement, chain: DoubleChain) -> DoubleChain:
    """The action ``g Delta(I) x g Box(I) -> eps(h) g Delta(I) x g h Box(I)``."""
    if h.n != chain.n:
        raise DimensionError(f"Group element has rank {h.n}, expected {chain.n}")
    n = chain.n
    scale = epsilon(h)
    terms: dict[DoubleKey, int] = {}
    for (left, right), coefficient in chain.terms.items():
        moved = cube(n, representative(n, right) * h, right[0], coefficient * scale)
        for key, c in moved.terms.items():
            terms[(left, key)] = terms.get((left, key), 0) + c
    return DoubleChain(n, terms)


def fiber_part(chain: DoubleChain, size: int = 1) -> Chain:
    """Collapse the simplex factor of the terms with ``|I| = size`` to a point."""
    terms: dict[CellKey, int] = {}
    for (left, right), coefficient in chain.terms.items():
        if len(left[0]) == size:
            terms[right] = terms.get(right, 0) + coefficient
    return Chain("cube", chain.n, terms)


def fiber_class(n: int) -> Chain:
    """``sum_i (Box(i) + (-1)^n A Box(i))``, the fundamental class of the sphere."""
    identity = GroupElement.identity(n)
    antipodal = GroupElement.antipodal(n)
    total = Chain.zero("cube", n)
    for i in range(n):
        total = total + cube(n, identity, (i,)) + cube(n, antipodal, (i,), (-1) ** n)
    return total


def boundary_class(n: int) -> Chain:
    """``sum_g eps(g) g Delta(0, ..., n-1)``, the fundamental class of the polytope boundary."""
    total = Chain.zero("simplex", n)
    for g in GroupElement.elements(n):
        total = total + simplex(n, g, tuple(range(n)), epsilon(g))
    return total


@dataclass(frozen=True)
class HomologyGroup:
    """``Z^rank`` plus the listed torsion summands ``Z/t``."""

    rank: int
    torsion: tuple[int, ...] = ()


def boundary_matrix(kind: Kind, n: int, dimension: int) -> np.ndarray:
    """Integer matrix of the boundary from ``dimension`` to ``dimension - 1``, cells in sorted key order."""
    size = dimension + 1 if kind == "simplex" else n - dimension
    target_size = size - 1 if kind == "simplex" else size + 1
    sources = cells(kind, n, size)
    targets = cells(kind, n, target_size) if 1 <= target_size <= n else []
    row = {key: r for r, key in enumerate(targets)}
    matrix = np.zeros((len(targets), len(sources)), dtype=np.int64)
    for column, key in enumerate(sources):
        for face, coefficient in boundary(Chain(kind, n, {key: 1})).terms.items():
            matrix[row[face], column] = coefficient
    return matrix


def smith_diagonal(matrix: np.ndarray) -> list[int]:
    """Nonzero invariant factors of an integer matrix, in divisibility order."""
    a = np.asarray(matrix, dtype=np.int64)
    if a.size == 0:
        return []
    factors = invariant_factors(Matrix(a.tolist()), domain=ZZ)
    return sorted(abs(int(f)) for f in factors if f != 0)


def homology(kind: Kind, n: int) -> list[HomologyGroup]:
    """Cellular homology ``H_0, ..., H_{n-1}`` of either complex via Smith normal form.

    Raises:
        DomainError: ``n`` outside ``1..HOMOLOGY_MAX_N``.
    """
    if not 1 <= n <= HOMOLOGY_MAX_N:
        raise DomainError(f"Homology is computed for 1 <= n <= {HOMOLOGY_MAX_N}, got {n}")
    sizes = {d: len(cells(kind, n, d + 1 if kind == "simplex" else n - d)) for d in range(n)}
    diagonals = {d: smith_diagonal(boundary_matrix(kind, n, d)) for d in range(1, n)}
    groups = []
    for d in range(n):
        outgoing = len(diagonals.get(d, []))
        incoming = diagonals.get(d + 1, [])
        groups.append(
            HomologyGroup(
                rank=sizes[d] - outgoing - len(incoming),
                torsion=tuple(value for value in incoming if value > 1),
            ),
        )
    logger.debug("homology of %s complex, n=%d: %s", kind, n, groups)
    return groups


def betti_numbers(kind: Kind, n: int) -> tuple[int, ...]:
    return tuple(group.rank for group in homology(kind, n))


