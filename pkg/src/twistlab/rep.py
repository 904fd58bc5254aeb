"""The regular covariant representation on l2(G, H), compressed to finite
windows, with sparse operators and two-sided norm estimation.

Conventions (H = the defining space of the coefficient algebra):
    (pi(a) xi)(h)   = alpha_{h^-1}(a) xi(h)
    (lam(g) xi)(h)  = sigma(h^-1, g) xi(g^-1 h)
A compression P_D rho(x) P_D never over-reports: its largest singular value
is a lower bound for the reduced norm for any window D.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .cocycles import TwistedSystem
from .crossed import CrossedElement
from .errors import ResourceError, UsageError
from .groups import Group, GroupElement, ball, inv, mul

DEFAULT_WINDOW_CAP = 3_000_000
LANCZOS_THRESHOLD = 64


def length_lex_key(w: GroupElement):
    letters = tuple(2 * gen + (0 if s > 0 else 1) for gen, s in w.letters())
    return (len(letters), letters)


class Window:
    """A deterministically ordered finite subset of G indexing the basis."""

    def __init__(self, group: Group, elements: Sequence[GroupElement], spec=None):
        self.group = group
        self.elements = list(elements)
        self.index = {g: i for i, g in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise UsageError("window elements must be distinct")
        if group.identity() not in self.index:
            raise UsageError("window must contain the identity")
        self.spec = spec

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self.index

    @staticmethod
    def ball(group: Group, radius: int, cap: int = DEFAULT_WINDOW_CAP) -> "Window":
        return Window(group, ball(group, radius, cap=cap), spec=("ball", radius))

    @staticmethod
    def reachable_ball(group: Group, support: Iterable[GroupElement], radius: int,
                       cap: int = DEFAULT_WINDOW_CAP) -> "Window":
        """The component of the identity in ball(radius) under left translation
        by the support.

        Compressing to this component is exact for the full-ball compression
        of any operator whose translation graph realizes its norm on the
        identity's component, and is a valid norm lower bound always.
        """
        if group.kind == "finite":
            return Window(group, group.elements(), spec=("ball", radius))
        moves = set()
        for s in support:
            moves.add(s)
            moves.add(inv(s))
        moves = sorted(moves, key=length_lex_key)
        seen = {group.identity()}
        frontier = [group.identity()]
        while frontier:
            nxt = []
            for w in frontier:
                for s in moves:
                    v = mul(s, w)
                    if v not in seen and v.word_length() <= radius:
                        seen.add(v)
                        nxt.append(v)
                        if len(seen) > cap:
                            raise ResourceError(f"window cap {cap} exceeded")
            frontier = nxt
        return Window(group, sorted(seen, key=length_lex_key),
                      spec=("reachable-ball", radius))

    @staticmethod
    def adaptive(group: Group, elements: Iterable[GroupElement], rounds: int = 1,
                 cap: int = DEFAULT_WINDOW_CAP) -> "Window":
        """Union of products of up to `rounds` factors from the given elements
        and their inverses (plus the identity)."""
        gens = set()
        for s in elements:
            gens.add(s)
            gens.add(inv(s))
        current = {group.identity()}
        for _ in range(rounds):
            grown = set(current)
            for w in current:
                for s in gens:
                    grown.add(mul(s, w))
                    if len(grown) > cap:
                        raise ResourceError(f"window cap {cap} exceeded")
            current = grown
        key = (lambda w: length_lex_key(w)) if group.kind == "free" else (lambda w: w.index)
        return Window(group, sorted(current, key=key), spec=("adaptive", rounds))


class TruncatedRep:
    """Basis: window x [0, d) with d the coefficient representation dimension."""

    def __init__(self, system: TwistedSystem, window: Window,
                 cap: int = DEFAULT_WINDOW_CAP):
        if window.group is not system.group:
            raise UsageError("window group does not match the system")
        self.system = system
        self.window = window
        self.coeff_dim = system.algebra.rep_dim
        self.dim = len(window) * self.coeff_dim
        if self.dim > cap:
            raise ResourceError(f"representation dimension {self.dim} exceeds cap {cap}")

    def is_exact_for(self, support: Iterable[GroupElement]) -> bool:
        """True when translation by every support element keeps the window
        inside itself, so compressed arithmetic equals exact arithmetic."""
        return all(mul(inv(s), h) in self.window and mul(s, h) in self.window
                   for s in support for h in self.window.elements)


@dataclass
class SparseOperator:
    """A compressed operator with provenance flags."""

    matrix: sp.csr_matrix
    rep: TruncatedRep
    exact: bool  # stayed inside the exact window (always true for finite G)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def adjoint(self) -> "SparseOperator":
        return SparseOperator(self.matrix.conj().T.tocsr(), self.rep, self.exact)

    def __matmul__(self, other):
        if isinstance(other, SparseOperator):
            return SparseOperator(self.matrix @ other.matrix, self.rep,
                                  self.exact and other.exact)
        return self.matrix @ other

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


def build_rep(system: TwistedSystem, window_spec, cap: int = DEFAULT_WINDOW_CAP) -> TruncatedRep:
    """window_spec: ("ball", R) | ("adaptive", elements, rounds) | a Window."""
    if isinstance(window_spec, Window):
        return TruncatedRep(system, window_spec, cap=cap)
    kind = window_spec[0]
    if kind == "ball":
        return TruncatedRep(system, Window.ball(system.group, window_spec[1], cap=cap), cap=cap)
    if kind == "adaptive":
        elements = window_spec[1]
        rounds = window_spec[2] if len(window_spec) > 2 else 1
        return TruncatedRep(system, Window.adaptive(system.group, elements, rounds, cap=cap),
                            cap=cap)
    raise UsageError(f"unknown window spec {window_spec!r}")


def represent(rep: TruncatedRep, x: CrossedElement, check_exact: bool = False) -> SparseOperator:
    """P_D rho(x) P_D over the window basis.

    Row block h, column block g^-1 h carries sigma(h^-1, g) alpha_{h^-1}(xhat(g)).
    Finite groups are always exact; for free groups the exactness flag is
    computed only on request (it costs |supp| x |window| group products) and
    the result is otherwise conservatively marked compressed.
    """
    if x.system is not rep.system:
        raise UsageError("element and representation systems differ")
    d = rep.coeff_dim
    sys = rep.system
    rows, cols, vals = [], [], []
    scalar = (d == 1)
    for g, a in x.coeffs.items():
        gi = inv(g)
        alpha_cache: dict = {}
        for hi, h in enumerate(rep.window.elements):
            ci = rep.window.index.get(mul(gi, h))
            if ci is None:
                continue
            phase = sys.sigma(inv(h), g)
            if scalar:
                rows.append(hi)
                cols.append(ci)
                vals.append(phase * a.blocks[0][0, 0])
            else:
                block = alpha_cache.get(h)
                if block is None:
                    block = sys.alpha(inv(h), a).rep_matrix()
                    alpha_cache[h] = block
                block = phase * block
                for r in range(d):
                    for c in range(d):
                        v = block[r, c]
                        if v != 0:
                            rows.append(hi * d + r)
                            cols.append(ci * d + c)
                            vals.append(v)
    m = sp.csr_matrix((vals, (rows, cols)), shape=(rep.dim, rep.dim), dtype=complex)
    if sys.group.kind == "finite":
        exact = True
    else:
        exact = rep.is_exact_for(x.support()) if check_exact else False
    return SparseOperator(m, rep, exact)


def lam_matrix(rep: TruncatedRep, g: GroupElement) -> SparseOperator:
    return represent(rep, CrossedElement.lam(rep.system, g))


def pi_matrix(rep: TruncatedRep, a) -> SparseOperator:
    return represent(rep, CrossedElement.embed(rep.system, a))


def proj_matrix(rep: TruncatedRep, subset) -> SparseOperator:
    """P_D for D given as an iterable of group elements or a membership test."""
    member = subset if callable(subset) else (lambda h, S=set(subset): h in S)
    d = rep.coeff_dim
    diag = np.zeros(rep.dim)
    for hi, h in enumerate(rep.window.elements):
        if member(h):
            diag[hi * d:(hi + 1) * d] = 1.0
    return SparseOperator(sp.diags(diag, format="csr", dtype=complex), rep, True)


def mult_operator(rep: TruncatedRep, symbol) -> SparseOperator:
    """M_F for F: window element -> scalar or d x d matrix."""
    d = rep.coeff_dim
    rows, cols, vals = [], [], []
    for hi, h in enumerate(rep.window.elements):
        f = symbol(h)
        f = np.asarray(f, dtype=complex)
        if f.ndim == 0:
            f = f * np.eye(d)
        for r in range(d):
            for c in range(d):
                if f[r, c] != 0:
                    rows.append(hi * d + r)
                    cols.append(hi * d + c)
                    vals.append(f[r, c])
    m = sp.csr_matrix((vals, (rows, cols)), shape=(rep.dim, rep.dim), dtype=complex)
    return SparseOperator(m, rep, True)


@dataclass
class NormEstimate:
    value: float
    converged: bool
    iterations: int
    method: str

    def __float__(self):
        return self.value


def _seed_vector(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def norm_lower(op, tol: float = 1e-8, max_iter: int = 10_000, seed: int = 42,
               method: str = "auto") -> NormEstimate:
    """Largest singular value of the compression: a certified lower bound for
    the reduced norm.

    Power iteration on x*x with a seeded start; Lanczos (same seeding, also a
    Rayleigh-Ritz lower bound) takes over for large problems.  On
    non-convergence the last Rayleigh quotient is returned, still a valid
    lower bound.
    """
    X = op.matrix if isinstance(op, SparseOperator) else sp.csr_matrix(op)
    n = X.shape[0]
    if n == 0 or X.nnz == 0:
        return NormEstimate(0.0, True, 0, "empty")
    Xh = X.conj().T.tocsr()
    if method == "auto":
        method = "lanczos" if n > LANCZOS_THRESHOLD else "power"
    if method == "lanczos":
        v0 = _seed_vector(n, seed)
        try:
            vals = spla.eigsh(spla.LinearOperator(
                (n, n), matvec=lambda v: Xh @ (X @ v), dtype=complex),
                k=1, which="LA", v0=v0, maxiter=max_iter, tol=tol)[0]
            return NormEstimate(float(np.sqrt(max(vals[0].real, 0.0))), True, -1, "lanczos")
        except spla.ArpackNoConvergence as exc:
            if len(exc.eigenvalues):
                return NormEstimate(float(np.sqrt(max(exc.eigenvalues[0].real, 0.0))),
                                    False, max_iter, "lanczos")
            # fall through to power iteration
    v = _seed_vector(n, seed)
    rq_prev = -np.inf
    rq = 0.0
    iterations = 0
    for iterations in range(1, max_iter + 1):
        w = Xh @ (X @ v)
        rq = float(np.real(np.vdot(v, w)))
        nw = np.linalg.norm(w)
        if nw == 0:
            return NormEstimate(0.0, True, iterations, "power")
        v = w / nw
        if abs(rq - rq_prev) <= tol * max(1.0, abs(rq)):
            return NormEstimate(float(np.sqrt(max(rq, 0.0))), True, iterations, "power")
        rq_prev = rq
    return NormEstimate(float(np.sqrt(max(rq, 0.0))), False, iterations, "power")


def norm_upper_l1(x: CrossedElement) -> float:
    return x.l1_norm()


def ball_norm_lower(x: CrossedElement, radius: int, cap: int = DEFAULT_WINDOW_CAP,
                    tol: float = 1e-8, max_iter: int = 10_000, seed: int = 42) -> NormEstimate:
    """Norm lower bound of x compressed to the radius-R ball window, realized
    on the identity's translation component (see Window.reachable_ball)."""
    if not x.coeffs:
        return NormEstimate(0.0, True, 0, "empty")
    window = Window.reachable_ball(x.system.group, x.support(), radius, cap=cap)
    rep = TruncatedRep(x.system, window, cap=cap)
    return norm_lower(represent(rep, x), tol=tol, max_iter=max_iter, seed=seed)


def adaptive_norm_lower(x: CrossedElement, rounds: int = 2, cap: int = DEFAULT_WINDOW_CAP,
                        tol: float = 1e-8, max_iter: int = 10_000, seed: int = 42) -> NormEstimate:
    """Norm lower bound of x on the adaptive window spanned by its support."""
    if not x.coeffs:
        return NormEstimate(0.0, True, 0, "empty")
    window = Window.adaptive(x.system.group, x.support(), rounds=rounds, cap=cap)
    rep = TruncatedRep(x.system, window, cap=cap)
    return norm_lower(represent(rep, x), tol=tol, max_iter=max_iter, seed=seed)
