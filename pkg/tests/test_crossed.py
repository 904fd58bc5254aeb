import numpy as np
import pytest

import twistlab as tl
from conftest import FINITE_FIXTURES, load_fixture


def random_crossed(system, rng, support=None):
    group = system.group
    algebra = system.algebra
    if support is None:
        support = group.elements()
    terms = []
    for g in support:
        blocks = [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
                  for d in algebra.dims]
        terms.append((g, algebra.element(blocks)))
    return tl.CrossedElement.from_terms(system, terms)


class TestBasicOperations:
    def test_unit_element(self):
        system = load_fixture("z2-swap").system
        one = tl.CrossedElement.embed(system, system.algebra.unit())
        rng = np.random.default_rng(0)
        x = random_crossed(system, rng)
        assert one.multiply(x).allclose(x)
        assert x.multiply(one).allclose(x)

    def test_lam_multiplication_rule(self):
        # lam(g) lam(h) = sigma(g,h) lam(gh)
        system = load_fixture("pauli-z2z2").system
        for g in system.group.elements():
            for h in system.group.elements():
                lhs = tl.CrossedElement.lam(system, g).multiply(
                    tl.CrossedElement.lam(system, h))
                rhs = system.sigma(g, h) * tl.CrossedElement.lam(system, tl.mul(g, h))
                assert lhs.allclose(rhs)

    def test_covariance_rule(self):
        # lam(g) a lam(g)* = alpha_g(a)
        system = load_fixture("s3-natural").system
        rng = np.random.default_rng(1)
        a = system.algebra.from_function(rng.standard_normal(3))
        for g in system.group.elements():
            u = tl.CrossedElement.lam(system, g)
            lhs = u.multiply(tl.CrossedElement.embed(system, a)).multiply(u.adjoint())
            rhs = tl.CrossedElement.embed(system, system.alpha(g, a))
            assert lhs.allclose(rhs)

    def test_lam_is_unitary(self):
        system = load_fixture("pauli-z2z2").system
        one = tl.CrossedElement.embed(system, system.algebra.unit())
        for g in system.group.elements():
            u = tl.CrossedElement.lam(system, g)
            assert u.multiply(u.adjoint()).allclose(one)
            assert u.adjoint().multiply(u).allclose(one)

    def test_expectation_kills_nonidentity(self):
        system = load_fixture("z2-swap").system
        g = system.group.element(1)
        assert tl.CrossedElement.lam(system, g).expectation().is_zero()

    def test_coefficient_drop(self):
        system = load_fixture("z2-swap").system
        tiny = 1e-16 * system.algebra.unit()
        x = tl.CrossedElement.embed(system, tiny)
        assert x.term_count() == 0

    def test_adjoint_is_involutive(self):
        system = load_fixture("pauli-z2z2").system
        rng = np.random.default_rng(2)
        x = random_crossed(system, rng)
        assert x.adjoint().adjoint().allclose(x)

    def test_real_imag_decomposition(self):
        system = load_fixture("s3-natural").system
        rng = np.random.default_rng(3)
        x = random_crossed(system, rng)
        re, im = x.real_part(), x.imag_part()
        assert re.is_selfadjoint()
        assert im.is_selfadjoint()
        assert (re + 1j * im).allclose(x)


class TestRepresentationOracle:
    """The faithful regular representation is the independent oracle for
    the convolution and adjoint formulas."""

    @pytest.mark.parametrize("name", FINITE_FIXTURES)
    def test_multiplication_matches_matrix_product(self, name):
        system = load_fixture(name).system
        model = tl.matrix_model(system)
        rng = np.random.default_rng(4)
        for _ in range(10):
            x = random_crossed(system, rng)
            y = random_crossed(system, rng)
            lhs = model.represent(x.multiply(y))
            rhs = model.represent(x) @ model.represent(y)
            assert np.max(np.abs(lhs - rhs)) < 1e-10

    @pytest.mark.parametrize("name", FINITE_FIXTURES)
    def test_adjoint_matches_conjugate_transpose(self, name):
        system = load_fixture(name).system
        model = tl.matrix_model(system)
        rng = np.random.default_rng(5)
        for _ in range(10):
            x = random_crossed(system, rng)
            lhs = model.represent(x.adjoint())
            rhs = model.represent(x).conj().T
            assert np.max(np.abs(lhs - rhs)) < 1e-10

    def test_expectation_matches_model(self):
        system = load_fixture("z4-regular").system
        model = tl.matrix_model(system)
        rng = np.random.default_rng(6)
        x = random_crossed(system, rng)
        lhs = model.expectation(model.represent(x))
        rhs = model.represent(tl.CrossedElement.embed(system, x.expectation()))
        assert np.max(np.abs(lhs - rhs)) < 1e-10


class TestExpectationProperties:
    def test_expectation_is_idempotent_and_unital(self):
        system = load_fixture("s3-natural").system
        rng = np.random.default_rng(7)
        x = random_crossed(system, rng)
        e1 = x.expectation()
        e2 = tl.CrossedElement.embed(system, e1).expectation()
        assert e1.allclose(e2)
        one = tl.CrossedElement.embed(system, system.algebra.unit())
        assert one.expectation().allclose(system.algebra.unit())

    def test_expectation_equivariance(self):
        # E(lam(g) x lam(g)*) = alpha_g(E(x))
        system = load_fixture("z2-1234").system
        rng = np.random.default_rng(8)
        x = random_crossed(system, rng)
        for g in system.group.elements():
            u = tl.CrossedElement.lam(system, g)
            lhs = u.multiply(x).multiply(u.adjoint()).expectation()
            rhs = system.alpha(g, x.expectation())
            assert lhs.allclose(rhs, 1e-10)

    def test_fourier_recovers_terms(self):
        system = load_fixture("z2-swap").system
        a = system.algebra.from_function([1.0, 2.0])
        g = system.group.element(1)
        x = tl.CrossedElement.from_terms(system, [(g, a)])
        assert x.fourier(g).allclose(a)
        assert x.fourier(system.group.identity()).is_zero()
