"""Exact structure theory for finite models of the reduced crossed product:
the faithful matrix model on l2(G, H), its block decomposition, induced vs
coefficient-filtered ideals and their equality, the maximal-ideal
correspondence report, the trace correspondence, and the per-orbit
decomposition for commutative coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import (AlgebraAction, CoeffAlgebra, IdealDescriptor,
                      TraceDescriptor, _block_orbits, invariant_traces,
                      maximal_invariant_ideals)
from .cocycles import TwistedSystem
from .crossed import CrossedElement
from .errors import ResourceError, UsageError
from .groups import inv
from .rep import TruncatedRep, Window, represent

AMBIENT_CAP = 4096
BASIS_TOL = 1e-10
GAP_TOL = 1e-6
COMMUTANT_TOL = 1e-8
TRACE_TOL = 1e-9


class _SpanBuilder:
    """Orthonormal basis of a matrix subspace under the trace inner product."""

    def __init__(self, tol: float = BASIS_TOL):
        self.tol = tol
        self.vectors: list[np.ndarray] = []
        self.matrices: list[np.ndarray] = []

    def add(self, m: np.ndarray) -> bool:
        v = np.asarray(m, dtype=complex).ravel()
        scale = np.linalg.norm(v)
        if scale <= self.tol:
            return False
        for b in self.vectors:
            v = v - np.vdot(b, v) * b
        n = np.linalg.norm(v)
        if n <= self.tol * max(1.0, scale):
            return False
        self.vectors.append(v / n)
        self.matrices.append(np.asarray(m, dtype=complex))
        return True

    def contains(self, m: np.ndarray) -> bool:
        v = np.asarray(m, dtype=complex).ravel()
        for b in self.vectors:
            v = v - np.vdot(b, v) * b
        return np.linalg.norm(v) <= self.tol * max(1.0, np.linalg.norm(m))

    @property
    def dim(self):
        return len(self.vectors)


def _close_under_products(span: _SpanBuilder, adjoints: bool = True,
                          left_right: Optional[list] = None):
    """Grow the span until it is closed under products (and adjoints), or,
    when `left_right` is given, under multiplication by those matrices on
    both sides (ideal closure)."""
    changed = True
    while changed:
        changed = False
        current = list(span.matrices)
        if left_right is None:
            if adjoints:
                for x in current:
                    changed |= span.add(x.conj().T)
            current = list(span.matrices)
            for x in current:
                for y in current:
                    changed |= span.add(x @ y)
        else:
            for x in current:
                for m in left_right:
                    changed |= span.add(m @ x)
                    changed |= span.add(x @ m)
            if adjoints:
                for x in list(span.matrices):
                    changed |= span.add(x.conj().T)
    return span


class MatrixModel:
    """The crossed product of a finite system realized concretely on
    l2(G, H): generated by the images of the coefficient basis and all
    translation unitaries, with the fiber-at-identity conditional
    expectation."""

    def __init__(self, system: TwistedSystem, cap: int = AMBIENT_CAP):
        if system.group.kind != "finite":
            raise UsageError("matrix models require a finite group")
        self.system = system
        group = system.group
        self.window = Window(group, group.elements(), spec=("full", group.order))
        self.rep = TruncatedRep(system, self.window, cap=max(cap, 1))
        self.ambient_dim = self.rep.dim
        if self.ambient_dim > cap:
            raise ResourceError(
                f"ambient dimension {self.ambient_dim} exceeds cap {cap}")
        d = system.algebra.rep_dim
        self._d = d
        self._e_index = self.window.index[group.identity()]

        self.algebra_generators = [represent(self.rep, CrossedElement.embed(system, a)).dense()
                                   for a in system.algebra.basis()]
        self.unitary_generators = [represent(self.rep, CrossedElement.lam(system, g)).dense()
                                   for g in group.elements()]
        span = _SpanBuilder()
        span.add(np.eye(self.ambient_dim, dtype=complex))
        for m in self.algebra_generators + self.unitary_generators:
            span.add(m)
        _close_under_products(span)
        self._span = span
        self.basis = list(span.matrices)
        self.dimension = span.dim

    # -- element plumbing ---------------------------------------------------
    def represent(self, x: CrossedElement) -> np.ndarray:
        return represent(self.rep, x).dense()

    def contains(self, m: np.ndarray) -> bool:
        return self._span.contains(m)

    def coefficient(self, m: np.ndarray, g) -> np.ndarray:
        """The Fourier coefficient of a model matrix at g, as a rep-space
        block-diagonal matrix (read off the identity fiber, where the entry
        is exactly the coefficient)."""
        d = self._d
        r = self._e_index * d
        c = self.window.index[inv(g)] * d
        return np.array(m[r:r + d, c:c + d])

    def expectation(self, m: np.ndarray) -> np.ndarray:
        """E as a linear map on the model: keep the identity coefficient."""
        a0 = self.coefficient(m, self.system.group.identity())
        coeff = _matrix_to_element(self.system.algebra, a0)
        return self.represent(CrossedElement.embed(self.system, coeff))

    def expectation_is_faithful(self, tol: float = BASIS_TOL) -> bool:
        """E(x*x) = 0 forces x = 0: the form <x,y> = Tr E(x*y) must be
        positive definite on the model."""
        n = self.dimension
        gram = np.zeros((n, n), dtype=complex)
        for i, x in enumerate(self.basis):
            for j, y in enumerate(self.basis):
                gram[i, j] = np.trace(self.expectation(x.conj().T @ y))
        evals = np.linalg.eigvalsh((gram + gram.conj().T) / 2)
        return bool(evals.min() > tol)

    def expectation_is_equivariant(self, tol: float = TRACE_TOL) -> bool:
        """E(lam(g) x lam(g)*) = alpha_g(E(x)) on the basis."""
        for g in self.system.group.elements():
            u = self.unitary_generators[g.index]
            for x in self.basis:
                lhs = self.expectation(u @ x @ u.conj().T)
                a0 = _matrix_to_element(self.system.algebra,
                                        self.coefficient(x, self.system.group.identity()))
                rhs = self.represent(CrossedElement.embed(
                    self.system, self.system.alpha(g, a0)))
                if np.max(np.abs(lhs - rhs)) > tol:
                    return False
        return True


def _matrix_to_element(algebra: CoeffAlgebra, m: np.ndarray):
    """Split a rep-space block-diagonal matrix back into algebra blocks."""
    blocks = []
    pos = 0
    for d in algebra.dims:
        blocks.append(np.array(m[pos:pos + d, pos:pos + d]))
        pos += d
    return algebra.element(blocks)


def matrix_model(system: TwistedSystem, cap: int = AMBIENT_CAP) -> MatrixModel:
    return MatrixModel(system, cap=cap)


@dataclass
class BlockStructure:
    dims: tuple                      # simple-block dimensions
    multiplicities: tuple            # multiplicity of each block in the model space
    projections: list                # minimal central projections (dense)
    indeterminate: bool = False

    @property
    def num_blocks(self):
        return len(self.dims)

    def as_dict(self):
        return {"dims": list(self.dims),
                "multiplicities": list(self.multiplicities),
                "indeterminate": self.indeterminate}


def _central_basis(model: MatrixModel) -> list[np.ndarray]:
    """Basis of the center: model elements commuting with every generator."""
    gens = model.algebra_generators + model.unitary_generators
    n = model.dimension
    amb = model.ambient_dim
    rows = []
    for g in gens:
        block = np.zeros((amb * amb, n), dtype=complex)
        for k, b in enumerate(model.basis):
            block[:, k] = (b @ g - g @ b).ravel()
        rows.append(block)
    system_matrix = np.vstack(rows)
    _, s, vh = np.linalg.svd(system_matrix, full_matrices=False)
    nullity = int(np.sum(s <= COMMUTANT_TOL))
    null_vectors = vh.conj()[n - nullity:] if nullity else []
    out = []
    for v in null_vectors:
        z = sum(c * b for c, b in zip(v, model.basis))
        out.append(z)
    return out


def block_decompose(model: MatrixModel, seed: int = 42, retries: int = 5) -> BlockStructure:
    """Minimal central projections from the eigenprojections of a random
    self-adjoint central element; each block checked simple by computing
    the center of the compressed algebra."""
    center = _central_basis(model)
    m = len(center)
    if m == 0:
        raise UsageError("the model has no center; construction is broken")
    herm = []
    span = _SpanBuilder()
    for z in center:
        for cand in (z + z.conj().T, 1j * (z - z.conj().T)):
            if span.add(cand):
                herm.append(cand)
    if len(herm) != m:
        raise UsageError("center is not spanned by self-adjoint elements")

    amb = model.ambient_dim
    for attempt in range(retries):
        rng = np.random.default_rng(seed + attempt)
        h = sum(float(c) * z for c, z in zip(rng.standard_normal(m), herm))
        evals, evecs = np.linalg.eigh(h)
        clusters = []
        start = 0
        for i in range(1, len(evals) + 1):
            if i == len(evals) or evals[i] - evals[i - 1] > GAP_TOL:
                clusters.append((start, i))
                start = i
        if len(clusters) != m:
            continue
        projections = []
        for a, b in clusters:
            v = evecs[:, a:b]
            projections.append(v @ v.conj().T)
        dims, mults = [], []
        ok = True
        for p in projections:
            comp = _SpanBuilder()
            for x in model.basis:
                comp.add(p @ x @ p)
            k = comp.dim
            d = int(round(np.sqrt(k)))
            if d * d != k or not _is_simple(comp):
                ok = False
                break
            rank = int(round(float(np.real(np.trace(p)))))
            if rank % d != 0:
                ok = False
                break
            dims.append(d)
            mults.append(rank // d)
        if not ok:
            continue
        if sum(d * d for d in dims) != model.dimension:
            continue
        order = sorted(range(len(dims)), key=lambda i: (dims[i], i))
        return BlockStructure(dims=tuple(dims[i] for i in order),
                              multiplicities=tuple(mults[i] for i in order),
                              projections=[projections[i] for i in order])
    return BlockStructure(dims=(), multiplicities=(), projections=[], indeterminate=True)


def _is_simple(comp: _SpanBuilder) -> bool:
    """A compressed block is simple iff its center (within the block) is the
    single central projection."""
    mats = comp.matrices
    k = len(mats)
    amb2 = mats[0].size
    cols = np.zeros((amb2 * k, k), dtype=complex)
    for j, z in enumerate(mats):
        for i, x in enumerate(mats):
            cols[i * amb2:(i + 1) * amb2, j] = (z @ x - x @ z).ravel()
    s = np.linalg.svd(cols, compute_uv=False)
    nullity = int(np.sum(s <= COMMUTANT_TOL)) + max(0, k - len(s))
    return nullity == 1


# -- ideals ----------------------------------------------------------------

@dataclass
class IdealPair:
    induced_blocks: frozenset      # <J> as a set of model blocks
    tilde_blocks: frozenset        # J-tilde as a set of model blocks
    equal: bool
    expectation_recovers: bool     # E(<J>) = J

    def as_dict(self):
        return {"induced_blocks": sorted(self.induced_blocks),
                "tilde_blocks": sorted(self.tilde_blocks),
                "equal": self.equal,
                "expectation_recovers": self.expectation_recovers}


def _require_invariant(system: TwistedSystem, J: IdealDescriptor):
    for perm in system.action.block_permutations():
        if not all(perm[b] in J.blocks for b in J.blocks):
            raise UsageError("ideal is not invariant under the action")


def _span_blocks(span: _SpanBuilder, blocks: BlockStructure, tol=BASIS_TOL) -> frozenset:
    hit = set()
    for k, p in enumerate(blocks.projections):
        for x in span.matrices:
            if np.max(np.abs(p @ x)) > 1e-8:
                hit.add(k)
                break
    return frozenset(hit)


def _ideal_coefficient_in(model: MatrixModel, J: IdealDescriptor,
                          m: np.ndarray, tol=1e-8) -> bool:
    """Every Fourier coefficient of the model matrix lies in J."""
    algebra = model.system.algebra
    for g in model.system.group.elements():
        coeff = _matrix_to_element(algebra, model.coefficient(m, g))
        for b, mat in enumerate(coeff.blocks):
            if b not in J.blocks and np.max(np.abs(mat)) > tol:
                return False
    return True


def ideal_pair(system: TwistedSystem, J: IdealDescriptor,
               model: Optional[MatrixModel] = None,
               blocks: Optional[BlockStructure] = None,
               seed: int = 42) -> IdealPair:
    """<J> (smallest model ideal containing the embedded J, by basis
    saturation) versus the coefficient filter {x : every coefficient in J},
    both as block sets; they must coincide for finite groups."""
    _require_invariant(system, J)
    model = model or matrix_model(system)
    blocks = blocks or block_decompose(model, seed=seed)
    if blocks.indeterminate:
        raise UsageError("block decomposition was indeterminate")
    algebra = system.algebra

    j_units = [a for b, a in _units_by_block(algebra) if b in J.blocks]
    induced = _SpanBuilder()
    for a in j_units:
        induced.add(model.represent(CrossedElement.embed(system, a)))
    _close_under_products(induced, adjoints=True, left_right=model.basis)
    induced_blocks = _span_blocks(induced, blocks)

    tilde = _SpanBuilder()
    for a in j_units:
        for g in system.group.elements():
            x = CrossedElement.embed(system, a).multiply(CrossedElement.lam(system, g))
            tilde.add(model.represent(x))
    tilde_blocks = _span_blocks(tilde, blocks)

    recovers = all(_ideal_coefficient_in(model, J, x) for x in induced.matrices)
    return IdealPair(induced_blocks=induced_blocks, tilde_blocks=tilde_blocks,
                     equal=induced_blocks == tilde_blocks,
                     expectation_recovers=recovers)


def _units_by_block(algebra: CoeffAlgebra):
    units = algebra.basis()
    out = []
    idx = 0
    for b, d in enumerate(algebra.dims):
        for _ in range(d * d):
            out.append((b, units[idx]))
            idx += 1
    return out


# -- reports ----------------------------------------------------------------

@dataclass
class BijectionReport:
    invariant_maximal_count: int
    model_maximal_count: int
    induced_images: list            # block set per invariant maximal ideal
    injective: bool
    surjective: bool
    holds: bool
    explanation: str

    def as_dict(self):
        return {"invariant_maximal_count": self.invariant_maximal_count,
                "model_maximal_count": self.model_maximal_count,
                "induced_images": [sorted(s) for s in self.induced_images],
                "injective": self.injective,
                "surjective": self.surjective,
                "holds": self.holds,
                "explanation": self.explanation}


def bijection_report(system: TwistedSystem, seed: int = 42) -> BijectionReport:
    """Does J -> <J> map maximal invariant ideals of A onto maximal ideals
    of the model, one-to-one?  A mismatch is the expected outcome when the
    averaging hypothesis (DP) is absent (every amenable group), and the
    report says so rather than failing."""
    model = matrix_model(system)
    blocks = block_decompose(model, seed=seed)
    if blocks.indeterminate:
        raise UsageError("block decomposition was indeterminate")
    mi = maximal_invariant_ideals(system.algebra, system.action)
    images = []
    for J in mi:
        pair = ideal_pair(system, J, model=model, blocks=blocks, seed=seed)
        images.append(pair.induced_blocks)
    all_blocks = frozenset(range(blocks.num_blocks))
    model_maximal = [all_blocks - {k} for k in range(blocks.num_blocks)]
    injective = len(set(images)) == len(images)
    surjective = all(any(img == mm for img in images) for mm in model_maximal)
    maximal_images = all(img in model_maximal for img in images)
    holds = injective and surjective and maximal_images
    if holds:
        explanation = "bijection holds"
    else:
        explanation = ("mismatch is the expected negative control: "
                       "hypothesis (DP)/class P absent for this group")
    return BijectionReport(invariant_maximal_count=len(mi),
                           model_maximal_count=blocks.num_blocks,
                           induced_images=images,
                           injective=injective, surjective=surjective,
                           holds=holds, explanation=explanation)


@dataclass
class TraceReport:
    invariant_trace_count: int
    model_trace_count: int
    composed_tracial: bool          # every phi . E is a trace on the model
    injective: bool
    surjective: bool
    holds: bool

    def as_dict(self):
        return {"invariant_trace_count": self.invariant_trace_count,
                "model_trace_count": self.model_trace_count,
                "composed_tracial": self.composed_tracial,
                "injective": self.injective,
                "surjective": self.surjective,
                "holds": self.holds}


def _composed_values(model: MatrixModel, phi: TraceDescriptor):
    """Values of phi . E on the model basis."""
    algebra = model.system.algebra
    vals = []
    for x in model.basis:
        a0 = _matrix_to_element(algebra, model.coefficient(x, model.system.group.identity()))
        vals.append(complex(phi.evaluate(a0)))
    return np.array(vals)


def _block_trace_values(model: MatrixModel, blocks: BlockStructure, k: int):
    """Values of the k-th extreme model trace on the model basis."""
    p = blocks.projections[k]
    rank = float(np.real(np.trace(p)))
    return np.array([complex(np.trace(p @ x)) / rank for x in model.basis])


def trace_correspondence(system: TwistedSystem, seed: int = 42) -> TraceReport:
    """phi -> phi . E from extreme invariant traces of A to traces of the
    model: always injective and tracial; surjective exactly when the model
    has no more extreme traces than A has invariant ones."""
    model = matrix_model(system)
    blocks = block_decompose(model, seed=seed)
    if blocks.indeterminate:
        raise UsageError("block decomposition was indeterminate")
    phis = invariant_traces(system.algebra, system.action)
    composed = [_composed_values(model, phi) for phi in phis]

    tracial = True
    for vals, phi in zip(composed, phis):
        algebra = model.system.algebra
        for x in model.basis:
            for y in model.basis:
                a_xy = _matrix_to_element(algebra, model.coefficient(
                    x @ y, system.group.identity()))
                a_yx = _matrix_to_element(algebra, model.coefficient(
                    y @ x, system.group.identity()))
                if abs(phi.evaluate(a_xy) - phi.evaluate(a_yx)) > TRACE_TOL:
                    tracial = False
    model_traces = [_block_trace_values(model, blocks, k)
                    for k in range(blocks.num_blocks)]
    injective = all(np.max(np.abs(composed[i] - composed[j])) > TRACE_TOL
                    for i in range(len(composed)) for j in range(i + 1, len(composed)))
    surjective = all(any(np.max(np.abs(mt - c)) <= 1e-6 for c in composed)
                     for mt in model_traces)
    return TraceReport(invariant_trace_count=len(phis),
                       model_trace_count=blocks.num_blocks,
                       composed_tracial=tracial,
                       injective=injective, surjective=surjective,
                       holds=injective and surjective and tracial)


# -- orbit decomposition -----------------------------------------------------

@dataclass
class OrbitEntry:
    points: tuple
    stabilizer_order: int
    model_dimension: int
    block_dims: tuple
    morita_consistent: Optional[bool]   # None when the twist makes it informational

    def as_dict(self):
        return {"points": list(self.points),
                "stabilizer_order": self.stabilizer_order,
                "model_dimension": self.model_dimension,
                "block_dims": list(self.block_dims),
                "morita_consistent": self.morita_consistent}


@dataclass
class OrbitReportFull:
    entries: list
    total_dimension: int
    dimensions_add_up: bool
    blocks_match: bool

    def as_dict(self):
        return {"entries": [e.as_dict() for e in self.entries],
                "total_dimension": self.total_dimension,
                "dimensions_add_up": self.dimensions_add_up,
                "blocks_match": self.blocks_match}


def orbit_decomposition(system: TwistedSystem, seed: int = 42) -> OrbitReportFull:
    """For A = C(X): the model splits along the orbits of X, one summand per
    orbit, and block structures concatenate.  For a trivial twist each
    summand's dimension must equal (orbit size)^2 x (stabilizer order)."""
    algebra = system.algebra
    if not algebra.is_commutative:
        raise UsageError("orbit decomposition needs commutative coefficients")
    if system.group.kind != "finite":
        raise UsageError("orbit decomposition needs a finite group")
    model = matrix_model(system)
    blocks = block_decompose(model, seed=seed)
    cells = _block_orbits(algebra, system.action)
    point_maps = [aut.perm for aut in system.action.per_element]

    entries = []
    all_sub_dims = []
    for cell in cells:
        points = tuple(sorted(cell))
        local = {x: i for i, x in enumerate(points)}
        base = points[0]
        stab = sum(1 for pm in point_maps if pm[base] == base)
        sub_algebra = CoeffAlgebra.functions_on_set(len(points))
        sub_perms = []
        for pm in point_maps:
            sub_perms.append(tuple(local[pm[x]] for x in points))
        from .algebra import AlgebraAutomorphism
        sub_action = AlgebraAction(
            system.group, sub_algebra,
            per_element=[AlgebraAutomorphism.from_point_permutation(sub_algebra, p)
                         for p in sub_perms])
        sub_system = TwistedSystem(system.group, sub_algebra, sub_action,
                                   system.cocycle, validate=False)
        sub_model = matrix_model(sub_system)
        sub_blocks = block_decompose(sub_model, seed=seed)
        morita = None
        if system.cocycle.is_trivial:
            index = len(points)
            morita = (sub_model.dimension == index * index * stab)
        entries.append(OrbitEntry(points=points, stabilizer_order=stab,
                                  model_dimension=sub_model.dimension,
                                  block_dims=sub_blocks.dims,
                                  morita_consistent=morita))
        all_sub_dims.extend(sub_blocks.dims)

    dims_ok = sum(e.model_dimension for e in entries) == model.dimension
    blocks_ok = sorted(all_sub_dims) == sorted(blocks.dims)
    return OrbitReportFull(entries=entries, total_dimension=model.dimension,
                           dimensions_add_up=dims_ok, blocks_match=blocks_ok)
