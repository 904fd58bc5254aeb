"""Finitely supported Fourier series over a twisted system: the dense
subalgebra B0 of the reduced crossed product, with twisted convolution,
adjoint, and the conditional expectation onto the coefficient algebra.

The adjoint coefficient formula (a lam(g))* = conj(sigma(g,g^-1))
alpha_{g^-1}(a*) lam(g^-1) is derived from lam(g)lam(g^-1) =
sigma(g,g^-1) lam(e) and locked in by the representation oracle tests.
"""

from __future__ import annotations

from typing import Iterable

from .algebra import AlgebraElement
from .cocycles import TwistedSystem
from .errors import UsageError
from .groups import GroupElement, inv, mul

COEFF_DROP_TOL = 1e-14


class CrossedElement:
    """x = sum_g xhat(g) lam(g), a finitely supported coefficient map."""

    __slots__ = ("system", "coeffs")

    def __init__(self, system: TwistedSystem, coeffs: dict):
        self.system = system
        clean = {}
        for g, a in coeffs.items():
            if a.norm() >= COEFF_DROP_TOL:
                clean[g] = a
        self.coeffs = clean

    # -- constructors ------------------------------------------------------
    @staticmethod
    def zero(system: TwistedSystem) -> "CrossedElement":
        return CrossedElement(system, {})

    @staticmethod
    def lam(system: TwistedSystem, g: GroupElement) -> "CrossedElement":
        return CrossedElement(system, {g: system.algebra.unit()})

    @staticmethod
    def embed(system: TwistedSystem, a: AlgebraElement) -> "CrossedElement":
        return CrossedElement(system, {system.group.identity(): a})

    @staticmethod
    def from_terms(system: TwistedSystem, terms: Iterable) -> "CrossedElement":
        """Sum of (g, a) terms; scalars are promoted to a * unit."""
        coeffs: dict = {}
        for g, a in terms:
            if not isinstance(a, AlgebraElement):
                a = system.algebra.scalar(a)
            coeffs[g] = coeffs[g] + a if g in coeffs else a
        return CrossedElement(system, coeffs)

    # -- structure -----------------------------------------------------------
    def support(self):
        return set(self.coeffs)

    def fourier(self, g: GroupElement) -> AlgebraElement:
        """xhat(g) = E(x lam(g)*)."""
        return self.coeffs.get(g, self.system.algebra.zero())

    def expectation(self) -> AlgebraElement:
        """E(x) = xhat(e)."""
        return self.fourier(self.system.group.identity())

    def term_count(self) -> int:
        return len(self.coeffs)

    def l1_norm(self) -> float:
        """sum_g ||xhat(g)||; an upper bound for the reduced norm."""
        return sum(a.norm() for a in self.coeffs.values())

    # -- linear operations --------------------------------------------------
    def _same_system(self, other):
        if self.system is not other.system:
            raise UsageError("operands belong to different twisted systems")

    def __add__(self, other):
        self._same_system(other)
        coeffs = dict(self.coeffs)
        for g, a in other.coeffs.items():
            coeffs[g] = coeffs[g] + a if g in coeffs else a
        return CrossedElement(self.system, coeffs)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rmul__(self, scalar):
        return CrossedElement(self.system, {g: scalar * a for g, a in self.coeffs.items()})

    def scale(self, scalar):
        return scalar * self

    def __eq__(self, other):
        if not isinstance(other, CrossedElement):
            return NotImplemented
        return self.system is other.system and self.allclose(other, tol=0.0)

    def allclose(self, other, tol=1e-12) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        zero = self.system.algebra.zero()
        return all(self.coeffs.get(g, zero).allclose(other.coeffs.get(g, zero), tol + 1e-15)
                   for g in keys)

    def is_selfadjoint(self, tol=1e-10) -> bool:
        return self.adjoint().allclose(self, tol)

    # -- *-algebra operations -------------------------------------------------
    def multiply(self, other: "CrossedElement") -> "CrossedElement":
        """(xy)^(k) = sum_g xhat(g) alpha_g(yhat(g^-1 k)) sigma(g, g^-1 k)."""
        self._same_system(other)
        sys = self.system
        coeffs: dict = {}
        for g, ag in self.coeffs.items():
            for h, bh in other.coeffs.items():
                k = mul(g, h)
                term = sys.sigma(g, h) * (ag * sys.alpha(g, bh))
                coeffs[k] = coeffs[k] + term if k in coeffs else term
        return CrossedElement(sys, coeffs)

    def adjoint(self) -> "CrossedElement":
        sys = self.system
        coeffs = {}
        for g, a in self.coeffs.items():
            gi = inv(g)
            coeffs[gi] = sys.sigma(g, gi).conjugate() * sys.alpha(gi, a.adjoint())
        return CrossedElement(sys, coeffs)

    def real_part(self) -> "CrossedElement":
        return 0.5 * (self + self.adjoint())

    def imag_part(self) -> "CrossedElement":
        return (-0.5j) * (self - self.adjoint())

    def __repr__(self):
        items = ", ".join(f"{g!r}: {a.norm():.4g}" for g, a in sorted(
            self.coeffs.items(), key=lambda t: repr(t[0])))
        return f"CrossedElement({{{items}}})"


def multiply(x: CrossedElement, y: CrossedElement) -> CrossedElement:
    return x.multiply(y)


def adjoint(x: CrossedElement) -> CrossedElement:
    return x.adjoint()


def expectation(x: CrossedElement) -> AlgebraElement:
    return x.expectation()


def fourier(x: CrossedElement, g: GroupElement) -> AlgebraElement:
    return x.fourier(g)
