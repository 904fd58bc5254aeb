"""Scalar 2-cocycles and twisted actions, with axiom validation.

Cocycles here take values on the unit circle (the center of every fixture
algebra); with scalar values the twisted-action axiom
alpha_g . alpha_h = Ad(sigma(g,h)) . alpha_{gh} collapses to the plain
action law, and the cocycle identity loses its alpha_g twist.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import AlgebraAction, AlgebraAutomorphism, CoeffAlgebra
from .errors import UsageError
from .groups import Group, GroupElement, ball, inv, mul

UNITARY_TOL = 1e-9


class TwoCocycle:
    """sigma: G x G -> T, one of {trivial, table, bicharacter}."""

    def __init__(self, group: Group, kind: str, table=None, matrix=None, root_order=None):
        self.group = group
        self.kind = kind
        if kind == "trivial":
            pass
        elif kind == "table":
            if group.kind != "finite":
                raise UsageError("table cocycles require a finite group")
            self.table = np.asarray(table, dtype=complex)
            if self.table.shape != (group.order, group.order):
                raise UsageError("cocycle table must be order x order")
        elif kind == "bicharacter":
            if group.kind != "finite" or group.coords is None:
                raise UsageError("bicharacter cocycles need a product of cyclic groups")
            self.matrix = np.asarray(matrix, dtype=np.int64)
            k = len(group.coords[0])
            if self.matrix.shape != (k, k):
                raise UsageError("bicharacter matrix shape must match the coordinate count")
            self.root_order = int(root_order)
            if self.root_order < 1:
                raise UsageError("root order must be positive")
        else:
            raise UsageError(f"unknown cocycle kind {kind!r}")

    def value(self, g: GroupElement, h: GroupElement) -> complex:
        if self.kind == "trivial":
            return 1.0 + 0j
        if self.kind == "table":
            return complex(self.table[g.index, h.index])
        q = np.array(self.group.coords[g.index]) @ self.matrix @ np.array(self.group.coords[h.index])
        return cmath.exp(2j * cmath.pi * (int(q) % self.root_order) / self.root_order)

    @property
    def is_trivial(self):
        return self.kind == "trivial"


def builtin_cocycle(group: Group, name: str, matrix=None, root_order=None) -> TwoCocycle:
    """Named cocycle constructors: trivial, pauli, bicharacter."""
    if name == "trivial":
        return TwoCocycle(group, "trivial")
    if name == "pauli":
        if group.coords is None or len(group.coords[0]) != 2:
            raise UsageError("the pauli cocycle lives on Z2 x Z2")
        return TwoCocycle(group, "bicharacter", matrix=[[0, 0], [1, 0]], root_order=2)
    if name == "bicharacter":
        return TwoCocycle(group, "bicharacter", matrix=matrix, root_order=root_order)
    raise UsageError(f"unknown builtin cocycle {name!r}")


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: Optional[str] = None

    def as_dict(self):
        return {"name": self.name, "passed": self.passed, "witness": self.witness}


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, name, passed, witness=None):
        self.checks.append(CheckResult(name, passed, witness))

    def as_dict(self):
        return {"passed": self.passed, "checks": [c.as_dict() for c in self.checks]}


class TwistedSystem:
    """The tuple (A, G, alpha, sigma) together with its validation report."""

    def __init__(self, group: Group, algebra: CoeffAlgebra, action: AlgebraAction,
                 cocycle: TwoCocycle, sample_radius: int = 4, seed: int = 42,
                 validate: bool = True):
        if action.group is not group or cocycle.group is not group:
            raise UsageError("action and cocycle must live on the system's group")
        if action.algebra != algebra:
            raise UsageError("action must act on the system's algebra")
        self.group = group
        self.algebra = algebra
        self.action = action
        self.cocycle = cocycle
        # failed checks live in the report; they are findings, not exceptions
        self.report = None
        if validate:
            self.report = validate_system(self, sample_radius=sample_radius, seed=seed)

    def sigma(self, g: GroupElement, h: GroupElement) -> complex:
        return self.cocycle.value(g, h)

    def alpha(self, g: GroupElement, a):
        return self.action.apply(g, a)

    @property
    def is_trivial_action(self):
        return self.action.is_trivial


def _sample_elements(system: TwistedSystem, sample_radius: int, seed: int, count=64):
    g = system.group
    if g.kind == "finite":
        return g.elements()
    pool = ball(g, sample_radius)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(pool), size=min(count, len(pool)))
    sample = [pool[i] for i in idx]
    # always include the identity and the generators
    sample += [g.identity()] + [g.generator(i) for i in range(g.rank)]
    return sample


def validate_system(system: TwistedSystem, sample_radius: int = 4, seed: int = 42) -> ValidationReport:
    """Check the twisted-action axioms and the derived identities.

    Exhaustive for finite groups; a seeded sample of the radius-R ball for
    free groups.  Failures are recorded with a concrete witness, never raised.
    """
    report = ValidationReport()
    sig = system.sigma
    G = system.group
    e = G.identity()
    elems = _sample_elements(system, sample_radius, seed)

    bad = next((g for g in elems
                if abs(sig(g, e) - 1) > UNITARY_TOL or abs(sig(e, g) - 1) > UNITARY_TOL), None)
    report.add("normalization sigma(g,e) = sigma(e,g) = 1", bad is None,
               None if bad is None else f"g={bad!r}")

    bad = next(((g, h) for g in elems for h in elems
                if abs(abs(sig(g, h)) - 1) > UNITARY_TOL), None)
    report.add("unitarity |sigma(g,h)| = 1", bad is None,
               None if bad is None else f"(g,h)={bad!r}")

    # cocycle identity; sigma is scalar so alpha_g(sigma(h,k)) = sigma(h,k)
    if G.kind == "finite":
        triples = [(g, h, k) for g in elems for h in elems for k in elems]
    else:
        rng = np.random.default_rng(seed + 1)
        pool = ball(G, sample_radius)
        triples = [tuple(pool[i] for i in rng.integers(0, len(pool), size=3))
                   for _ in range(512)]
    bad = None
    for g, h, k in triples:
        lhs = sig(g, h) * sig(mul(g, h), k)
        rhs = sig(h, k) * sig(g, mul(h, k))
        if abs(lhs - rhs) > UNITARY_TOL:
            bad = (g, h, k)
            break
    report.add("cocycle identity sigma(g,h)sigma(gh,k) = alpha_g(sigma(h,k))sigma(g,hk)",
               bad is None, None if bad is None else f"(g,h,k)={bad!r}")

    # action law (Ad(sigma) is trivial for scalar sigma)
    pairs = ([(g, h) for g in elems for h in elems] if G.kind == "finite"
             else [(g, h) for g in elems[:16] for h in elems[:16]])
    bad = None
    for g, h in pairs:
        lhs = system.action.automorphism(g).compose(system.action.automorphism(h))
        rhs = system.action.automorphism(mul(g, h))
        if not lhs.agrees_with(rhs):
            bad = (g, h)
            break
    report.add("twisted action alpha_g . alpha_h = Ad(sigma(g,h)) . alpha_gh",
               bad is None, None if bad is None else f"(g,h)={bad!r}")

    # derived identities, re-checked independently
    ident = AlgebraAutomorphism.identity(system.algebra)
    report.add("derived alpha_e = id", system.action.automorphism(e).agrees_with(ident))

    bad = next((g for g in elems
                if abs(sig(g, inv(g)) - sig(inv(g), g)) > UNITARY_TOL), None)
    report.add("derived sigma(g,g^-1) = alpha_g(sigma(g^-1,g))", bad is None,
               None if bad is None else f"g={bad!r}")

    check_elems = elems if G.kind == "finite" else elems[:16]
    bad = None
    for g in check_elems:
        lhs = system.action.automorphism(g).inverse()
        rhs = system.action.automorphism(inv(g))  # Ad(sigma*) trivial for scalars
        if not lhs.agrees_with(rhs):
            bad = g
            break
    report.add("derived alpha_g^-1 = alpha_{g^-1} . Ad(sigma(g,g^-1)*)", bad is None,
               None if bad is None else f"g={bad!r}")

    return report
