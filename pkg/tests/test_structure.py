import numpy as np
import pytest

import twistlab as tl
from twistlab.structure import _SpanBuilder, _close_under_products

from conftest import FINITE_FIXTURES, load_fixture


def model_of(name):
    return tl.matrix_model(load_fixture(name).system)


class TestMatrixModel:
    @pytest.mark.parametrize("name,ambient,dim", [
        ("z2-swap", 4, 4),          # M_2
        ("pauli-z2z2", 4, 4),       # M_2 (anticommuting translations)
        ("z2-trivial-scalars", 2, 2),
        ("s3-natural", 18, 18),
        ("z4-regular", 16, 16),
        ("z2-1234", 8, 8),
    ])
    def test_dimensions(self, name, ambient, dim):
        m = model_of(name)
        assert m.ambient_dim == ambient
        assert m.dimension == dim

    @pytest.mark.parametrize("name", FINITE_FIXTURES)
    def test_model_closed_under_product_and_adjoint(self, name):
        m = model_of(name)
        rng = np.random.default_rng(0)
        for _ in range(5):
            i, j = rng.integers(0, len(m.basis), size=2)
            assert m.contains(m.basis[i] @ m.basis[j])
            assert m.contains(m.basis[i].conj().T)
        assert m.contains(np.eye(m.ambient_dim))

    @pytest.mark.parametrize("name", FINITE_FIXTURES)
    def test_expectation_idempotent_unital_faithful(self, name):
        m = model_of(name)
        rng = np.random.default_rng(1)
        x = sum(rng.standard_normal() * b for b in m.basis)
        once = m.expectation(x)
        assert np.max(np.abs(m.expectation(once) - once)) < 1e-10
        eye = np.eye(m.ambient_dim)
        assert np.max(np.abs(m.expectation(eye) - eye)) < 1e-10
        assert m.expectation_is_faithful()

    @pytest.mark.parametrize("name", FINITE_FIXTURES)
    def test_expectation_equivariance(self, name):
        assert model_of(name).expectation_is_equivariant()

    def test_dimension_cap(self):
        system = load_fixture("s3-natural").system
        with pytest.raises(tl.ResourceError):
            tl.matrix_model(system, cap=4)

    def test_free_group_rejected(self):
        system = load_fixture("free2-trivial").system
        with pytest.raises(tl.UsageError):
            tl.matrix_model(system)


class TestBlockDecomposition:
    @pytest.mark.parametrize("name,dims", [
        ("z2-swap", (2,)),
        ("pauli-z2z2", (2,)),
        ("z2-trivial-scalars", (1, 1)),
        ("s3-natural", (3, 3)),
        ("z2-1234", (2, 2)),
        ("z4-regular", (4,)),
    ])
    def test_block_dims(self, name, dims):
        blocks = tl.block_decompose(model_of(name))
        assert not blocks.indeterminate
        assert blocks.dims == dims

    def test_dimension_accounting(self):
        m = model_of("s3-natural")
        blocks = tl.block_decompose(m)
        assert sum(d * d for d in blocks.dims) == m.dimension
        # ambient accounting: sum of dim x multiplicity
        assert sum(d * mu for d, mu in zip(blocks.dims, blocks.multiplicities)) \
            == m.ambient_dim

    def test_projections_are_central_and_orthogonal(self):
        m = model_of("z2-1234")
        blocks = tl.block_decompose(m)
        for i, p in enumerate(blocks.projections):
            assert np.max(np.abs(p @ p - p)) < 1e-8
            for g in m.algebra_generators + m.unitary_generators:
                assert np.max(np.abs(p @ g - g @ p)) < 1e-8
            for q in blocks.projections[i + 1:]:
                assert np.max(np.abs(p @ q)) < 1e-8

    def test_deterministic_given_seed(self):
        m = model_of("s3-natural")
        b1 = tl.block_decompose(m, seed=5)
        b2 = tl.block_decompose(m, seed=5)
        assert b1.dims == b2.dims
        for p, q in zip(b1.projections, b2.projections):
            assert np.max(np.abs(p - q)) < 1e-12


class TestIdealPairs:
    @pytest.mark.parametrize("name", FINITE_FIXTURES)
    def test_every_invariant_ideal_is_exact(self, name):
        system = load_fixture(name).system
        lattice = tl.invariant_ideals(system.algebra, system.action)
        model = tl.matrix_model(system)
        blocks = tl.block_decompose(model)
        for J in lattice.ideals:
            pair = tl.ideal_pair(system, J, model=model, blocks=blocks)
            assert pair.equal, (name, J)
            assert pair.expectation_recovers

    def test_zero_and_full_ideals(self):
        system = load_fixture("z2-swap").system
        zero = tl.IdealDescriptor(frozenset())
        pair = tl.ideal_pair(system, zero)
        assert pair.induced_blocks == frozenset() == pair.tilde_blocks
        full = tl.IdealDescriptor(frozenset(range(system.algebra.num_blocks)))
        pair = tl.ideal_pair(system, full)
        assert pair.induced_blocks == pair.tilde_blocks != frozenset()

    def test_proper_ideal_on_four_points(self):
        # functions vanishing on the first orbit induce a proper block subset
        system = load_fixture("z2-1234").system
        J = tl.IdealDescriptor(frozenset({2, 3}))
        pair = tl.ideal_pair(system, J)
        assert pair.equal
        assert 0 < len(pair.induced_blocks) < 2

    def test_non_invariant_ideal_rejected(self):
        system = load_fixture("z2-swap").system
        with pytest.raises(tl.UsageError):
            tl.ideal_pair(system, tl.IdealDescriptor(frozenset({0})))

    def test_e_invariant_ideal_is_induced(self):
        # an ideal of the model closed under E equals the ideal induced from
        # its coefficient projection
        system = load_fixture("z2-1234").system
        model = tl.matrix_model(system)
        blocks = tl.block_decompose(model)
        J = tl.IdealDescriptor(frozenset({0, 1}))
        pair = tl.ideal_pair(system, J, model=model, blocks=blocks)
        # rebuild the model-ideal span from one block projection and check
        # that E maps it into the embedded J and induction recovers it
        span = _SpanBuilder()
        for k in pair.induced_blocks:
            for x in model.basis:
                span.add(blocks.projections[k] @ x)
        for x in span.matrices:
            ex = model.expectation(x)
            coeff = model.coefficient(ex, system.group.identity())
            # coefficient lies in J: entries outside blocks {0,1} vanish
            assert abs(coeff[2, 2]) < 1e-8 and abs(coeff[3, 3]) < 1e-8


class TestBijectionReports:
    def test_swap_fixture_bijection_holds(self):
        report = tl.bijection_report(load_fixture("z2-swap").system)
        assert report.holds
        assert report.invariant_maximal_count == 1
        assert report.model_maximal_count == 1

    def test_trivial_fixture_is_a_negative_control(self):
        report = tl.bijection_report(load_fixture("z2-trivial-scalars").system)
        assert not report.holds
        assert report.invariant_maximal_count == 1
        assert report.model_maximal_count == 2
        assert "(DP)" in report.explanation

    def test_s3_fixture_is_a_negative_control(self):
        report = tl.bijection_report(load_fixture("s3-natural").system)
        assert not report.holds
        assert report.invariant_maximal_count == 1
        assert report.model_maximal_count == 2

    def test_injectivity_always(self):
        for name in FINITE_FIXTURES:
            assert tl.bijection_report(load_fixture(name).system).injective


class TestTraceCorrespondence:
    def test_swap_fixture(self):
        report = tl.trace_correspondence(load_fixture("z2-swap").system)
        assert report.holds
        assert report.invariant_trace_count == 1
        assert report.model_trace_count == 1
        assert report.composed_tracial

    def test_trivial_fixture_not_surjective(self):
        report = tl.trace_correspondence(load_fixture("z2-trivial-scalars").system)
        assert report.injective
        assert not report.surjective
        assert report.composed_tracial

    @pytest.mark.parametrize("name", FINITE_FIXTURES)
    def test_composition_with_expectation_is_tracial(self, name):
        assert tl.trace_correspondence(load_fixture(name).system).composed_tracial


class TestOrbitDecomposition:
    def test_two_orbit_fixture(self):
        report = tl.orbit_decomposition(load_fixture("z2-1234").system)
        assert report.dimensions_add_up
        assert report.blocks_match
        assert len(report.entries) == 2
        for entry in report.entries:
            assert entry.block_dims == (2,)
            assert entry.morita_consistent

    def test_s3_dimension_arithmetic(self):
        report = tl.orbit_decomposition(load_fixture("s3-natural").system)
        (entry,) = report.entries
        # 18 = [G:H]^2 * |H| = 3^2 * 2
        assert entry.model_dimension == 18 == 3 ** 2 * entry.stabilizer_order
        assert entry.morita_consistent

    def test_fixed_point_orbit_gives_the_twisted_group_algebra(self):
        # trivial action: each point is an orbit and each summand is the
        # group algebra itself
        system = load_fixture("z2-trivial-scalars").system
        report = tl.orbit_decomposition(system)
        (entry,) = report.entries
        assert entry.stabilizer_order == 2
        assert entry.model_dimension == 2

    def test_noncommutative_coefficients_rejected(self):
        g = tl.Group.cyclic(2)
        A = tl.CoeffAlgebra([2])
        system = tl.TwistedSystem(g, A, tl.AlgebraAction.trivial(g, A),
                                  tl.builtin_cocycle(g, "trivial"))
        with pytest.raises(tl.UsageError):
            tl.orbit_decomposition(system)
