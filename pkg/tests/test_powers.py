import pytest

import twistlab as tl
from twistlab.powers import PrefixSet, starts_with

F2 = tl.Group.free(2)
A = F2.generator(0)
B = F2.generator(1)
E = F2.identity()


def w(*blocks):
    return F2.word(blocks)


class TestStartsWith:
    def test_exact_match(self):
        assert starts_with(w((0, 2), (1, 1)), w((0, 2)))

    def test_partial_power_prefix(self):
        assert starts_with(w((0, 3)), w((0, 2)))
        assert not starts_with(w((0, 2)), w((0, 3)))

    def test_sign_matters(self):
        assert not starts_with(w((0, 2)), w((0, -1)))

    def test_empty_prefix_matches_everything(self):
        assert starts_with(w((1, -4)), E)


class TestPrefixSet:
    def test_membership(self):
        T = PrefixSet([w((1, 1), (0, 1)), w((1, 1), (0, -1))])
        assert w((1, 1), (0, 3)) in T
        assert w((1, 1), (0, -1), (1, 2)) in T
        assert w((1, 2)) not in T
        assert E not in T

    def test_complement(self):
        U = PrefixSet([B, tl.inv(B)], complement=True)
        assert E in U
        assert A in U
        assert B not in U
        assert w((1, -3), (0, 1)) not in U

    def test_symbolic_disjointness(self):
        T1 = PrefixSet([w((1, 1), (0, 1)), w((1, 1), (0, -1))])
        T2 = PrefixSet([w((1, 2), (0, 1)), w((1, 2), (0, -1))])
        assert T1.disjoint_from(T2)
        overlapping = PrefixSet([w((1, 1))])
        assert not T1.disjoint_from(overlapping)

    def test_identity_prefix_rejected(self):
        with pytest.raises(tl.UsageError):
            PrefixSet([E])


class TestPowersTriple:
    def test_construction_for_single_generator(self):
        triple = tl.construct_powers_triple(F2, [A])
        assert triple.count == 3
        for i in range(3):
            for j in range(i + 1, 3):
                assert triple.sets[i].disjoint_from(triple.sets[j])

    def test_largeness_verified_on_ball(self):
        # T_j is h_j F h_j^-1-large: no counterexample up to radius 6
        triple = tl.construct_powers_triple(F2, [A])
        for j in range(3):
            movers = tl.triple_movers(triple, j)
            assert tl.verify_largeness(triple.sets[j], movers, radius=6, group=F2) is None

    def test_largeness_for_mixed_words(self):
        target = [w((0, 1), (1, 1)), w((1, -1), (0, 2))]
        triple = tl.construct_powers_triple(F2, target)
        movers = tl.triple_movers(triple, 0)
        assert tl.verify_largeness(triple.sets[0], movers, radius=5, group=F2) is None

    def test_falsifier_catches_a_bad_certificate(self):
        # prefix(b a) alone is NOT large for a-translates: a * e = a lands outside
        bad = PrefixSet([w((1, 1), (0, 1))])
        witness = tl.verify_largeness(bad, [A], radius=3, group=F2)
        assert witness is not None

    def test_identity_in_target_rejected(self):
        with pytest.raises(tl.UsageError):
            tl.construct_powers_triple(F2, [E])

    def test_finite_group_rejected(self):
        g = tl.Group.cyclic(3)
        with pytest.raises(tl.UsageError):
            tl.construct_powers_triple(g, [g.element(1)])


class TestPcomCertificate:
    def test_construction_for_a_family(self):
        cert = tl.construct_pcom(F2, [A, tl.inv(A)])
        assert cert.g0 == B
        assert cert.n == 1
        assert cert.conjugator.is_identity()

    def test_conjugation_applied_when_needed(self):
        cert = tl.construct_pcom(F2, [B])  # b does not start with a-letters
        assert not cert.conjugator.is_identity()
        assert all(f.blocks[0][0] == 0 and f.blocks[-1][0] == 0 for f in cert.target)

    def test_conditions_verified_on_ball(self):
        cert = tl.construct_pcom(F2, [A, tl.inv(A)])
        assert tl.verify_pcom(cert, cert.target, radius=5, j_max=5, group=F2) is None

    def test_verifier_catches_cover_violation(self):
        cert = tl.construct_pcom(F2, [A, tl.inv(A)])
        broken = tl.PcomCertificate(g0=cert.g0, shift_set=PrefixSet([A]),
                                    covers=cert.covers, target=cert.target,
                                    conjugator=cert.conjugator)
        result = tl.verify_pcom(broken, broken.target, radius=3, j_max=2, group=F2)
        assert result is not None and result[0] in ("cover", "shift-disjoint")

    def test_verifier_catches_shift_violation(self):
        # family containing b itself: b U meets U, certificate without
        # conjugation must fail condition (ii)
        cert = tl.construct_pcom(F2, [A, tl.inv(A)])
        broken = tl.PcomCertificate(g0=cert.g0, shift_set=cert.shift_set,
                                    covers=cert.covers, target=(B,),
                                    conjugator=F2.identity())
        result = tl.verify_pcom(broken, broken.target, radius=3, j_max=2, group=F2)
        assert result is not None and result[0] == "shift-disjoint"
