import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import twistlab as tl
from twistlab.groups import _reduce

F2 = tl.Group.free(2)


def words(max_letters=8):
    letter = st.tuples(st.integers(0, 1), st.sampled_from([1, -1]))
    return st.lists(letter, max_size=max_letters).map(
        lambda ls: F2.word(ls))


class TestReducedWords:
    def test_reduction_cancels(self):
        # a b b^-1 a -> a^2
        assert _reduce([(0, 1), (1, 1), (1, -1), (0, 1)]) == ((0, 2),)

    def test_reduction_cascades(self):
        # a b b^-1 a^-1 -> e
        assert _reduce([(0, 1), (1, 1), (1, -1), (0, -1)]) == ()

    def test_word_length(self):
        w = F2.word([(0, 3), (1, -2)])
        assert w.word_length() == 5

    @given(words(), words(), words())
    @settings(max_examples=200, deadline=None)
    def test_associativity(self, u, v, w):
        assert tl.mul(tl.mul(u, v), w) == tl.mul(u, tl.mul(v, w))

    @given(words())
    @settings(max_examples=200, deadline=None)
    def test_inverse_law(self, w):
        assert tl.mul(w, tl.inv(w)).is_identity()
        assert tl.mul(tl.inv(w), w).is_identity()

    @given(words(), st.integers(-6, 6))
    @settings(max_examples=100, deadline=None)
    def test_power_matches_repeated_product(self, w, n):
        expected = F2.identity()
        base = w if n >= 0 else tl.inv(w)
        for _ in range(abs(n)):
            expected = tl.mul(expected, base)
        assert tl.power(w, n) == expected


class TestBall:
    @pytest.mark.parametrize("radius", [0, 1, 2, 3, 4, 5])
    def test_ball_size_formula_f2(self, radius):
        # |B_R| in F_2 is 2 * 3^R - 1
        assert tl.ball_size(2, radius) == 2 * 3 ** radius - 1
        assert len(tl.ball(F2, radius)) == 2 * 3 ** radius - 1

    def test_ball_ordering_is_length_lex(self):
        from twistlab.rep import length_lex_key
        b = tl.ball(F2, 3)
        keys = [length_lex_key(w) for w in b]
        assert keys == sorted(keys)

    def test_ball_has_no_duplicates(self):
        b = tl.ball(F2, 4)
        assert len(set(b)) == len(b)

    def test_ball_cap(self):
        with pytest.raises(tl.ResourceError):
            tl.ball(F2, 50)


class TestFiniteGroups:
    def test_cyclic_group(self):
        g = tl.Group.cyclic(4)
        assert g.order == 4
        x = g.element(1)
        assert tl.power(x, 4).is_identity()
        assert tl.inv(x) == g.element(3)

    def test_table_without_identity_rejected(self):
        with pytest.raises(tl.UsageError):
            tl.Group.from_table([[0, 0], [0, 0]])

    def test_non_associative_table_rejected(self):
        # a quasigroup table that is not associative
        with pytest.raises(tl.UsageError):
            tl.Group.from_table([[0, 1, 2, 3, 4],
                                 [1, 0, 3, 4, 2],
                                 [2, 4, 0, 1, 3],
                                 [3, 2, 4, 0, 1],
                                 [4, 3, 1, 2, 0]])

    def test_symmetric_group_order(self):
        s3 = tl.Group.symmetric(3)
        assert s3.order == 6
        # composition law spot-check: (01) . (12) maps 2 -> 1 -> 0... compute directly
        perms = s3.point_perms
        i = perms.index((1, 0, 2))
        j = perms.index((0, 2, 1))
        k = int(s3.table[i, j])
        assert perms[k] == tuple(perms[i][perms[j][x]] for x in range(3))

    def test_cyclic_product_coords(self):
        g = tl.Group.cyclic_product([2, 2])
        assert g.order == 4
        assert set(g.coords) == {(0, 0), (0, 1), (1, 0), (1, 1)}


class TestActionsAndOrbits:
    def test_orbits_of_swap(self):
        g = tl.Group.cyclic(2)
        act = tl.FiniteAction(g, [[0, 1, 2, 3], [1, 0, 3, 2]])
        rep = tl.orbits(act)
        assert rep.orbits == [[0, 1], [2, 3]]
        assert all(len(s) == 1 for s in rep.stabilizers)

    def test_s3_natural_orbit_and_stabilizer(self):
        s3 = tl.Group.symmetric(3)
        act = tl.FiniteAction(s3, s3.point_perms)
        rep = tl.orbits(act)
        assert rep.orbits == [[0, 1, 2]]
        # orbit-stabilizer: |orbit| * |stabilizer| = |G|
        assert len(rep.stabilizers[0]) * 3 == s3.order

    def test_invalid_action_rejected(self):
        g = tl.Group.cyclic(2)
        with pytest.raises(tl.UsageError):
            tl.FiniteAction(g, [[0, 1], [0, 0]])  # not a permutation
        with pytest.raises(tl.UsageError):
            tl.FiniteAction(g, [[1, 0], [0, 1]])  # identity must act trivially
