"""Index bookkeeping shared by the form algebra and the chain complexes."""

from collections.abc import Sequence


def permutation_sign(indices: Sequence[int]) -> int:
    """Sign of the permutation that sorts ``indices``, or 0 if an index repeats."""
    if len(set(indices)) != len(indices):
        return 0
    inversions = sum(1 for a in range(len(indices)) for b in range(a + 1, len(indices)) if indices[a] > indices[b])
    return -1 if inversions % 2 else 1


def canonical_indices(indices: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sort an index sequence.

    Returns:
        The pair ``(sign, sorted_indices)``; ``sign`` is 0 when an index repeats.
    """
    sign = permutation_sign(indices)
    if sign == 0:
        return 0, ()
    return sign, tuple(sorted(indices))


def merge_sign(left: Sequence[int], right: Sequence[int]) -> int:
    """Sign picked up by concatenating two sorted index tuples and sorting the result.

    Returns 0 when the tuples share an index.
    """
    if set(left) & set(right):
        return 0
    crossings = sum(1 for a in left for b in right if a > b)
    return -1 if crossings % 2 else 1
