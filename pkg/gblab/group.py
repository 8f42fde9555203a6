"""The symmetry group ``G = (Z/2)^n`` of coordinate sign flips and its characters."""

import itertools
from collections.abc import Iterable
from collections.abc import Iterator
from collections.abc import Sequence
from typing import Final

from gblab.errors import DimensionError
from gblab.errors import DomainError

SIGNS: Final[tuple[int, int]] = (1, -1)


class GroupElement:
    """An element ``g : {0, ..., n-1} -> {-1, +1}`` of ``G``.

    The group law is the componentwise product. ``g_i`` denotes the flip of coordinate ``i``
    alone and ``A = g_0 g_1 ... g_{n-1}`` the antipodal map.
    """

    def __init__(self, signs: Sequence[int]) -> None:
        """Create a group element from its sign vector.

        Args:
            signs: One entry per coordinate, each +1 or -1.
        """
        signs = tuple(int(s) for s in signs)
        for position, sign in enumerate(signs):
            if sign not in SIGNS:
                raise DomainError(f"Group element entries must be +1 or -1, got {sign} at position {position}")
        self._signs: tuple[int, ...] = signs

    @staticmethod
    def identity(n: int) -> "GroupElement":
        return GroupElement((1,) * n)

    @staticmethod
    def flip(n: int, index: int) -> "GroupElement":
        """The generator ``g_index`` that reverses coordinate ``index`` only.

        Args:
            n: Rank of the group.
            index: Coordinate to flip, 0-based.

        Returns:
            New GroupElement
        """
        if not 0 <= index < n:
            raise DomainError(f"Flip index must be in 0..{n - 1}, got {index}")
        return GroupElement(tuple(-1 if k == index else 1 for k in range(n)))

    @staticmethod
    def antipodal(n: int) -> "GroupElement":
        return GroupElement((-1,) * n)

    @staticmethod
    def from_flips(n: int, indices: Iterable[int]) -> "GroupElement":
        """Product of the generators ``g_i`` over ``indices``."""
        element = GroupElement.identity(n)
        for index in indices:
            element = element * GroupElement.flip(n, index)
        return element

    @staticmethod
    def elements(n: int) -> Iterator["GroupElement"]:
        """All ``2^n`` elements, identity first."""
        for signs in itertools.product(SIGNS, repeat=n):
            yield GroupElement(signs)

    @property
    def n(self) -> int:
        return len(self._signs)

    @property
    def signs(self) -> tuple[int, ...]:
        return self._signs

    def restrict(self, indices: Iterable[int]) -> tuple[int, ...]:
        """The restriction ``g|_I`` as a tuple in the order of ``indices``."""
        return tuple(self._signs[i] for i in indices)

    def __getitem__(self, index: int) -> int:
        return self._signs[index]

    def __iter__(self) -> Iterator[int]:
        return iter(self._signs)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if not isinstance(other, GroupElement):
            return NotImplemented
        if other.n != self.n:
            raise DimensionError(f"Cannot multiply elements of (Z/2)^{self.n} and (Z/2)^{other.n}")
        return GroupElement(tuple(a * b for a, b in zip(self._signs, other.signs)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self._signs == other.signs

    def __hash__(self) -> int:
        return hash(self._signs)

    def __repr__(self) -> str:
        return f"GroupElement({list(self._signs)!r})"


def epsilon(g: GroupElement) -> int:
    """Orientation character ``g(0) g(1) ... g(n-1)``: +1 iff ``g`` preserves orientation."""
    return epsilon_restricted(g, range(g.n))


def epsilon_restricted(g: GroupElement, indices: Iterable[int]) -> int:
    """The character ``eps_I(g)``, the product of ``g(i)`` over ``i`` in ``I``."""
    value = 1
    for i in indices:
        value *= g[i]
    return value


def complement(indices: Iterable[int], n: int) -> tuple[int, ...]:
    """The complementary index set ``I*`` in ``{0, ..., n-1}``."""
    chosen = set(indices)
    return tuple(i for i in range(n) if i not in chosen)


def character_sum(indices: Sequence[int], n: int) -> int:
    """``sum over g in G of eps(g) eps_I(g)``.

    Since ``eps * eps_I = eps_{I*}`` this is ``2^n`` when ``I`` is everything and 0 otherwise.

    Raises:
        DomainError: an index outside ``0..n-1``.
    """
    if any(not 0 <= i < n for i in indices):
        raise DomainError(f"Indices must lie in 0..{n - 1}, got {tuple(indices)}")
    return sum(epsilon(g) * epsilon_restricted(g, indices) for g in GroupElement.elements(n))
