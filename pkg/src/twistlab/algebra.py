"""Finite-dimensional C*-algebras as direct sums of matrix blocks, with
their ideals, automorphisms, actions, and invariant traces.

An ideal of a direct sum of matrix blocks is a direct sum of a subset of
the blocks, so ideal arithmetic is exact set arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import UsageError
from .groups import Group, GroupElement, inv

UNITARY_TOL = 1e-9


class CoeffAlgebra:
    """Direct sum of full matrix algebras with block dimensions `dims`."""

    def __init__(self, dims: Sequence[int]):
        dims = tuple(int(d) for d in dims)
        if not dims or any(d < 1 for d in dims):
            raise UsageError("block dimensions must be a nonempty list of positives")
        self.dims = dims
        self.num_blocks = len(dims)
        self.dim = sum(d * d for d in dims)      # linear dimension
        self.rep_dim = sum(dims)                  # dimension of the defining rep

    @staticmethod
    def scalars() -> "CoeffAlgebra":
        return CoeffAlgebra([1])

    @staticmethod
    def functions_on_set(size: int) -> "CoeffAlgebra":
        return CoeffAlgebra([1] * size)

    @property
    def is_commutative(self) -> bool:
        return all(d == 1 for d in self.dims)

    def element(self, blocks) -> "AlgebraElement":
        return AlgebraElement(self, blocks)

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, [np.zeros((d, d), dtype=complex) for d in self.dims])

    def unit(self) -> "AlgebraElement":
        return AlgebraElement(self, [np.eye(d, dtype=complex) for d in self.dims])

    def scalar(self, z) -> "AlgebraElement":
        return AlgebraElement(self, [z * np.eye(d, dtype=complex) for d in self.dims])

    def from_function(self, values) -> "AlgebraElement":
        """Commutative case: an element of C(X) from its list of values."""
        if not self.is_commutative:
            raise UsageError("from_function requires a commutative algebra")
        return AlgebraElement(self, [np.array([[v]], dtype=complex) for v in values])

    def basis(self) -> list["AlgebraElement"]:
        """Matrix-unit basis, block by block."""
        out = []
        for b, d in enumerate(self.dims):
            for i in range(d):
                for j in range(d):
                    blocks = [np.zeros((dd, dd), dtype=complex) for dd in self.dims]
                    blocks[b][i, j] = 1.0
                    out.append(AlgebraElement(self, blocks))
        return out

    def __eq__(self, other):
        return isinstance(other, CoeffAlgebra) and self.dims == other.dims

    def __repr__(self):
        return f"CoeffAlgebra(dims={list(self.dims)})"


class AlgebraElement:
    """One complex matrix per block."""

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: CoeffAlgebra, blocks):
        self.algebra = algebra
        mats = []
        for d, m in zip(algebra.dims, blocks):
            m = np.asarray(m, dtype=complex)
            if m.shape != (d, d):
                raise UsageError(f"block shape {m.shape} does not match dim {d}")
            mats.append(m)
        if len(mats) != algebra.num_blocks:
            raise UsageError("wrong number of blocks")
        self.blocks = tuple(mats)

    def __add__(self, other):
        return AlgebraElement(self.algebra, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        return AlgebraElement(self.algebra, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return AlgebraElement(self.algebra, [a @ b for a, b in zip(self.blocks, other.blocks)])
        return AlgebraElement(self.algebra, [other * a for a in self.blocks])

    __rmul__ = __mul__

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, [a.conj().T for a in self.blocks])

    def norm(self) -> float:
        """Operator norm: max over blocks of the spectral norm."""
        return max(float(np.linalg.norm(a, 2)) for a in self.blocks)

    def trace_values(self):
        return [complex(np.trace(a)) for a in self.blocks]

    def is_zero(self, tol=1e-12) -> bool:
        return all(np.max(np.abs(a)) <= tol if a.size else True for a in self.blocks)

    def allclose(self, other, tol=1e-9) -> bool:
        return all(np.max(np.abs(a - b)) <= tol for a, b in zip(self.blocks, other.blocks))

    def rep_matrix(self) -> np.ndarray:
        """Block-diagonal matrix of the defining representation on C^rep_dim."""
        d = self.algebra.rep_dim
        out = np.zeros((d, d), dtype=complex)
        pos = 0
        for a in self.blocks:
            k = a.shape[0]
            out[pos:pos + k, pos:pos + k] = a
            pos += k
        return out

    def __repr__(self):
        return f"AlgebraElement({[np.round(b, 4).tolist() for b in self.blocks]})"


@dataclass(frozen=True)
class IdealDescriptor:
    """An ideal of a block algebra: the subset of blocks it contains."""

    blocks: frozenset

    @property
    def is_proper(self):
        return True  # properness is relative to the algebra; see `is_proper_in`

    def is_proper_in(self, algebra: CoeffAlgebra) -> bool:
        return self.blocks != frozenset(range(algebra.num_blocks))

    def is_zero(self) -> bool:
        return not self.blocks

    def __le__(self, other):
        return self.blocks <= other.blocks

    def __repr__(self):
        return f"Ideal({sorted(self.blocks)})"


class AlgebraAutomorphism:
    """Block permutation combined with a per-block unitary conjugation.

    `perm[i]` is the destination block of source block i; the permutation may
    only relate blocks of equal dimension.  apply(a)_{perm[i]} = u_i a_i u_i*.
    """

    def __init__(self, algebra: CoeffAlgebra, perm=None, unitaries=None):
        self.algebra = algebra
        b = algebra.num_blocks
        self.perm = tuple(range(b)) if perm is None else tuple(int(p) for p in perm)
        if sorted(self.perm) != list(range(b)):
            raise UsageError("block map must be a permutation")
        for i, p in enumerate(self.perm):
            if algebra.dims[i] != algebra.dims[p]:
                raise UsageError("permutation maps between blocks of unequal dimension")
        if unitaries is None:
            self.unitaries = tuple(np.eye(d, dtype=complex) for d in algebra.dims)
        else:
            us = []
            for d, u in zip(algebra.dims, unitaries):
                u = np.asarray(u, dtype=complex)
                if np.max(np.abs(u @ u.conj().T - np.eye(d))) > UNITARY_TOL:
                    raise UsageError("conjugator is not unitary within tolerance")
                us.append(u)
            self.unitaries = tuple(us)

    @staticmethod
    def identity(algebra: CoeffAlgebra) -> "AlgebraAutomorphism":
        return AlgebraAutomorphism(algebra)

    @staticmethod
    def from_point_permutation(algebra: CoeffAlgebra, point_map) -> "AlgebraAutomorphism":
        """For C(X): the automorphism f -> f . g^{-1} induced by x -> g.x.

        `point_map[x]` is g.x, so block x of the input lands in block g.x.
        """
        if not algebra.is_commutative:
            raise UsageError("point permutations act on commutative algebras")
        return AlgebraAutomorphism(algebra, perm=tuple(int(p) for p in point_map))

    def apply(self, a: AlgebraElement) -> AlgebraElement:
        out = [None] * self.algebra.num_blocks
        for i, p in enumerate(self.perm):
            u = self.unitaries[i]
            out[p] = u @ a.blocks[i] @ u.conj().T
        return AlgebraElement(self.algebra, out)

    def compose(self, other: "AlgebraAutomorphism") -> "AlgebraAutomorphism":
        """self after other."""
        b = self.algebra.num_blocks
        perm = tuple(self.perm[other.perm[i]] for i in range(b))
        unitaries = tuple(self.unitaries[other.perm[i]] @ other.unitaries[i] for i in range(b))
        return AlgebraAutomorphism(self.algebra, perm=perm, unitaries=unitaries)

    def inverse(self) -> "AlgebraAutomorphism":
        b = self.algebra.num_blocks
        perm = [0] * b
        unitaries = [None] * b
        for i, p in enumerate(self.perm):
            perm[p] = i
            unitaries[p] = self.unitaries[i].conj().T
        return AlgebraAutomorphism(self.algebra, perm=tuple(perm), unitaries=tuple(unitaries))

    def agrees_with(self, other: "AlgebraAutomorphism", tol=1e-9) -> bool:
        """Pointwise equality on the matrix-unit basis."""
        for e in self.algebra.basis():
            if not self.apply(e).allclose(other.apply(e), tol):
                return False
        return True


class AlgebraAction:
    """A map g -> Aut(A).

    For finite groups: one automorphism per element.  For free groups: one
    automorphism per generator, extended along reduced words (free groups
    impose no relations, so any generator images define an action).
    """

    def __init__(self, group: Group, algebra: CoeffAlgebra,
                 per_element=None, per_generator=None):
        self.group = group
        self.algebra = algebra
        self._cache: dict = {}
        if group.kind == "finite":
            if per_element is None:
                per_element = [AlgebraAutomorphism.identity(algebra)] * group.order
            if len(per_element) != group.order:
                raise UsageError("need one automorphism per group element")
            self.per_element = list(per_element)
            self.per_generator = None
        else:
            if per_generator is None:
                per_generator = [AlgebraAutomorphism.identity(algebra)] * group.rank
            if len(per_generator) != group.rank:
                raise UsageError("need one automorphism per free generator")
            self.per_generator = list(per_generator)
            self.per_element = None
        self.is_trivial = self._check_trivial()

    def _check_trivial(self):
        auts = self.per_element if self.per_element is not None else self.per_generator
        ident = AlgebraAutomorphism.identity(self.algebra)
        return all(a.agrees_with(ident) for a in auts)

    @staticmethod
    def trivial(group: Group, algebra: CoeffAlgebra) -> "AlgebraAction":
        if group.kind == "finite":
            return AlgebraAction(group, algebra)
        return AlgebraAction(group, algebra, per_generator=None)

    @staticmethod
    def from_finite_action(action, algebra: Optional[CoeffAlgebra] = None) -> "AlgebraAction":
        """Lift a point action on X to the induced action on C(X)."""
        algebra = algebra or CoeffAlgebra.functions_on_set(action.size)
        per_element = [AlgebraAutomorphism.from_point_permutation(algebra, action.perms[g])
                      for g in range(action.group.order)]
        return AlgebraAction(action.group, algebra, per_element=per_element)

    def automorphism(self, g: GroupElement) -> AlgebraAutomorphism:
        if self.group.kind == "finite":
            return self.per_element[g.index]
        key = g.blocks
        if key in self._cache:
            return self._cache[key]
        out = AlgebraAutomorphism.identity(self.algebra)
        for gen, step in g.letters():
            aut = self.per_generator[gen]
            if step < 0:
                aut = aut.inverse()
            out = out.compose(aut)
        if len(self._cache) < 4096:
            self._cache[key] = out
        return out

    def apply(self, g: GroupElement, a: AlgebraElement) -> AlgebraElement:
        return self.automorphism(g).apply(a)

    def block_permutations(self) -> list[tuple]:
        """Block permutations of the action's generating automorphisms."""
        auts = self.per_element if self.per_element is not None else self.per_generator
        perms = [a.perm for a in auts]
        if self.per_generator is not None:
            perms += [a.inverse().perm for a in auts]
        return perms


# -- ideal lattice -------------------------------------------------------

def _block_orbits(algebra: CoeffAlgebra, action: AlgebraAction) -> list[frozenset]:
    """Orbits of the blocks under the action's block permutations."""
    parent = list(range(algebra.num_blocks))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for perm in action.block_permutations():
        for i, p in enumerate(perm):
            ri, rp = find(i), find(p)
            if ri != rp:
                parent[rp] = ri
    cells: dict[int, set] = {}
    for i in range(algebra.num_blocks):
        cells.setdefault(find(i), set()).add(i)
    return sorted((frozenset(c) for c in cells.values()), key=min)


@dataclass
class IdealLattice:
    ideals: list[IdealDescriptor]
    cover_edges: list[tuple[int, int]]   # (i, j): ideals[i] covered by ideals[j]
    orbit_cells: list[frozenset]


def invariant_ideals(algebra: CoeffAlgebra, action: AlgebraAction) -> IdealLattice:
    """All ideals J with alpha_g(J) <= J, as the full lattice with cover edges.

    Invariant ideals are exactly the unions of block orbits.
    """
    cells = _block_orbits(algebra, action)
    ideals = []
    for r in range(len(cells) + 1):
        for combo in itertools.combinations(range(len(cells)), r):
            blocks = frozenset().union(*(cells[c] for c in combo)) if combo else frozenset()
            ideals.append(IdealDescriptor(frozenset(blocks)))
    ideals.sort(key=lambda j: (len(j.blocks), sorted(j.blocks)))
    edges = []
    for i, a in enumerate(ideals):
        for j, b in enumerate(ideals):
            if a.blocks < b.blocks and not any(
                    a.blocks < c.blocks < b.blocks for c in ideals):
                edges.append((i, j))
    return IdealLattice(ideals=ideals, cover_edges=edges, orbit_cells=cells)


def maximal_invariant_ideals(algebra: CoeffAlgebra, action: AlgebraAction) -> list[IdealDescriptor]:
    """Maximal elements among the proper invariant ideals: complements of one orbit."""
    cells = _block_orbits(algebra, action)
    all_blocks = frozenset(range(algebra.num_blocks))
    return [IdealDescriptor(all_blocks - cell) for cell in cells]


@dataclass
class TraceDescriptor:
    """A tracial state by its weight per block: tau(a) = sum_i w_i tr(a_i)/d_i."""

    weights: tuple

    def evaluate(self, a: AlgebraElement) -> complex:
        return sum(w * np.trace(b) / b.shape[0]
                   for w, b in zip(self.weights, a.blocks))


def invariant_traces(algebra: CoeffAlgebra, action: AlgebraAction) -> list[TraceDescriptor]:
    """Extreme points of the invariant trace simplex: uniform over each block orbit."""
    cells = _block_orbits(algebra, action)
    out = []
    for cell in cells:
        w = [1.0 / len(cell) if i in cell else 0.0 for i in range(algebra.num_blocks)]
        out.append(TraceDescriptor(tuple(w)))
    return out
