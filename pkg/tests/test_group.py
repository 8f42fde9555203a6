import itertools

import pytest

from gblab.errors import DimensionError
from gblab.errors import DomainError
from gblab.group import GroupElement
from gblab.group import character_sum
from gblab.group import complement
from gblab.group import epsilon
from gblab.group import epsilon_restricted
from gblab.utils import canonical_indices
from gblab.utils import merge_sign
from gblab.utils import permutation_sign


class TestGroupElement:
    """
    Tests for the sign-flip group elements.
    """

    def test_identity_and_antipodal(self):
        """
        Test the distinguished elements.
        """
        assert GroupElement.identity(3).signs == (1, 1, 1)
        assert GroupElement.antipodal(3).signs == (-1, -1, -1)

    def test_flip(self):
        """
        Test that a generator reverses one coordinate.
        """
        assert GroupElement.flip(4, 2).signs == (1, 1, -1, 1)

    def test_flip_out_of_range(self):
        """
        Test that a flip index outside 0..n-1 is rejected.
        """
        with pytest.raises(DomainError):
            GroupElement.flip(3, 3)

    def test_bad_entry(self):
        """
        Test that entries other than +1 and -1 are rejected.
        """
        with pytest.raises(DomainError):
            GroupElement([1, 0, -1])

    def test_product_of_flips_is_antipodal(self):
        """
        Test that flipping every coordinate gives the antipodal map.
        """
        assert GroupElement.from_flips(3, range(3)) == GroupElement.antipodal(3)

    def test_involution(self):
        """
        Test that every element squares to the identity.
        """
        for g in GroupElement.elements(3):
            assert g * g == GroupElement.identity(3)

    def test_elements(self):
        """
        Test that there are 2^n distinct elements, identity first.
        """
        elements = list(GroupElement.elements(4))

        assert len(set(elements)) == 16
        assert elements[0] == GroupElement.identity(4)

    def test_rank_mismatch(self):
        """
        Test that elements of different groups cannot be multiplied.
        """
        with pytest.raises(DimensionError):
            GroupElement.identity(2) * GroupElement.identity(3)

    def test_restrict(self):
        """
        Test the restriction to an index list, in the listed order.
        """
        assert GroupElement([1, -1, -1, 1]).restrict((3, 1)) == (1, -1)


class TestCharacters:
    """
    Tests for the orientation characters.
    """

    def test_epsilon(self):
        """
        Test that eps is the product of the signs.
        """
        assert epsilon(GroupElement([1, -1, -1])) == 1
        assert epsilon(GroupElement([1, -1, 1])) == -1

    def test_epsilon_restricted(self):
        """
        Test eps_I on a subset.
        """
        assert epsilon_restricted(GroupElement([1, -1, -1]), (0, 1)) == -1
        assert epsilon_restricted(GroupElement([1, -1, -1]), ()) == 1

    def test_complement(self):
        """
        Test the complementary index set.
        """
        assert complement((0, 2), 4) == (1, 3)

    def test_complementary_character(self):
        """
        Test eps(g) eps_I(g) = eps_{I*}(g) for every g and every I.
        """
        n = 4
        for g in GroupElement.elements(n):
            for size in range(n + 1):
                for indices in itertools.combinations(range(n), size):
                    assert epsilon(g) * epsilon_restricted(g, indices) == epsilon_restricted(g, complement(indices, n))

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_character_sums(self, n):
        """
        Test that the signed character sum vanishes unless I is everything.
        """
        for size in range(n + 1):
            for indices in itertools.combinations(range(n), size):
                expected = 2**n if size == n else 0
                assert character_sum(indices, n) == expected

    def test_character_sum_domain(self):
        """
        Test that an index outside the group rank is rejected.
        """
        with pytest.raises(DomainError):
            character_sum((0, 3), 3)


class TestIndexSigns:
    """
    Tests for the index helpers.
    """

    @pytest.mark.parametrize(
        ("indices", "expected"),
        [
            pytest.param((0, 1, 2), 1, id="sorted"),
            pytest.param((1, 0, 2), -1, id="one-swap"),
            pytest.param((2, 0, 1), 1, id="cycle"),
            pytest.param((1, 1), 0, id="repeat"),
            pytest.param((), 1, id="empty"),
        ],
    )
    def test_permutation_sign(self, indices, expected):
        """
        Test the sorting sign.
        """
        assert permutation_sign(indices) == expected

    def test_canonical_indices(self):
        """
        Test sorting with sign and the repeated index case.
        """
        assert canonical_indices((3, 1)) == (-1, (1, 3))
        assert canonical_indices((2, 2)) == (0, ())

    def test_merge_sign(self):
        """
        Test the concatenation sign of two sorted tuples.
        """
        assert merge_sign((1,), (0,)) == -1
        assert merge_sign((0, 2), (1,)) == -1
        assert merge_sign((0,), (1, 2)) == 1
        assert merge_sign((0, 1), (1,)) == 0
