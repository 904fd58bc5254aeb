"""Averaging processes over group unitaries: the single contraction step
with a Powers triple, its iteration to arbitrary decay, the displacement
average with its 2n/sqrt(N) bound, the finite-dimensional three-projection
norm bound, and the reduction from general to self-adjoint elements.

Every numeric run is monitored: a computed norm lower bound exceeding its
certified analytic bound raises RefutationError (a build-failing event).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .crossed import CrossedElement
from .errors import RefutationError, UsageError
from .groups import GroupElement, inv, mul, power
from .powers import PcomCertificate, PowersTriple, construct_powers_triple
from .rep import NormEstimate, adaptive_norm_lower

CONTRACTION_FACTOR = 0.991
HS_CONSTANT = 5.0 / 6.0 + math.sqrt(2.0) / 9.0   # ~0.990468 < 0.991
REFUTATION_TOL = 1e-6


@dataclass(frozen=True)
class SimpleAveraging:
    """x -> (1/n) sum_i lam(h_i) x lam(h_i)*."""

    conjugators: tuple

    def __post_init__(self):
        if not self.conjugators:
            raise UsageError("a simple averaging step needs at least one conjugator")

    def apply(self, x: CrossedElement) -> CrossedElement:
        sys = x.system
        total = CrossedElement.zero(sys)
        for h in self.conjugators:
            u = CrossedElement.lam(sys, h)
            total = total + u.multiply(x).multiply(u.adjoint())
        return (1.0 / len(self.conjugators)) * total


@dataclass
class AveragingProcess:
    """Composition of simple steps, applied first-to-last."""

    steps: list = field(default_factory=list)

    def apply(self, x: CrossedElement) -> CrossedElement:
        for step in self.steps:
            x = step.apply(x)
        return x

    def extend(self, other: "AveragingProcess") -> "AveragingProcess":
        return AveragingProcess(self.steps + other.steps)

    def __len__(self):
        return len(self.steps)


def apply_averaging(process, x: CrossedElement) -> CrossedElement:
    if isinstance(process, SimpleAveraging):
        return process.apply(x)
    return process.apply(x)


@dataclass
class StepRecord:
    step: int
    terms: int
    norm_lower: Optional[float]
    l1_upper: float
    certified_bound: float


@dataclass
class DecayTrace:
    records: list = field(default_factory=list)
    steps_to_epsilon: Optional[int] = None   # analytic continuation beyond k_max
    epsilon: Optional[float] = None

    def add(self, record: StepRecord):
        if self.records and record.certified_bound > self.records[-1].certified_bound + 1e-12:
            raise RefutationError(
                "certified bound increased along the trace",
                observed=record.certified_bound,
                certified=self.records[-1].certified_bound)
        if (record.norm_lower is not None
                and record.norm_lower > record.certified_bound + REFUTATION_TOL):
            raise RefutationError(
                f"norm lower bound {record.norm_lower} exceeds certified bound "
                f"{record.certified_bound} at step {record.step}",
                observed=record.norm_lower, certified=record.certified_bound)
        self.records.append(record)

    def to_csv(self) -> str:
        lines = ["step,terms,norm_lower,l1_upper,certified_bound"]
        for r in self.records:
            nl = "" if r.norm_lower is None else f"{r.norm_lower:.12g}"
            lines.append(f"{r.step},{r.terms},{nl},{r.l1_upper:.12g},{r.certified_bound:.12g}")
        return "\n".join(lines) + "\n"

    def as_dict(self):
        return {
            "records": [vars(r) for r in self.records],
            "steps_to_epsilon": self.steps_to_epsilon,
            "epsilon": self.epsilon,
        }


def steps_to_reach(epsilon: float, l1: float) -> int:
    """Smallest k with 0.991^k * l1 < epsilon."""
    if l1 <= 0 or l1 < epsilon:
        return 0
    return math.ceil(math.log(epsilon / l1) / math.log(CONTRACTION_FACTOR))


def _require_avg_input(x: CrossedElement, selfadjoint=True):
    if selfadjoint and not x.is_selfadjoint():
        raise UsageError("element must be self-adjoint")
    if not x.expectation().is_zero(1e-12):
        raise UsageError("element must have zero expectation")


def powers_step(x: CrossedElement, triple: PowersTriple, check_projections: bool = True):
    """One contraction: phi(x) = (1/3) sum lam(h_j) x lam(h_j)*, certified to
    shrink the norm by the factor 0.991.

    The compression-level hypothesis p_j rho(x) p_j = 0 (p_j projecting onto
    the translates displaced by the conjugated support) is asserted on an
    adaptive window before averaging.
    """
    _require_avg_input(x)
    if triple.count < 3:
        raise UsageError("a contraction step needs at least three conjugators")
    allowed = set(triple.target) | {inv(f) for f in triple.target}
    if not x.support() <= allowed:
        raise UsageError("support escapes the triple's target family")
    if check_projections and x.coeffs:
        _assert_displaced_corners(x, triple)
    phi = SimpleAveraging(triple.conjugators[:3])
    return phi.apply(x), CONTRACTION_FACTOR


def _assert_displaced_corners(x: CrossedElement, triple: PowersTriple, tol=1e-12):
    from .rep import TruncatedRep, Window, represent, proj_matrix

    window = Window.adaptive(x.system.group, x.support(), rounds=1)
    rep = TruncatedRep(x.system, window)
    X = represent(rep, x)
    for j in range(3):
        h = triple.conjugators[j]
        T = triple.sets[j]
        p = proj_matrix(rep, lambda w, h=h, T=T: mul(h, w) not in T)  # P_{D_j}
        corner = (p.matrix @ X.matrix @ p.matrix)
        if corner.nnz and np.max(np.abs(corner.data)) > tol:
            raise RefutationError(
                f"displaced corner p_{j} x p_{j} is nonzero "
                f"(max {np.max(np.abs(corner.data)):.3g})")


@dataclass
class HsCheckResult:
    passed: bool
    ratio: float
    bound: float = HS_CONSTANT


def hs_bound_check(x: np.ndarray, projections: Sequence[np.ndarray],
                   unitaries: Sequence[np.ndarray], tol: float = 1e-9) -> HsCheckResult:
    """Verify the three-projection averaging bound on concrete matrices:
    given p_j x p_j = 0 and pairwise orthogonal u_j (1 - p_j) u_j*, the
    average of the three conjugates has norm at most (5/6 + sqrt(2)/9) ||x||.

    Hypothesis violations are usage errors, not refutations.
    """
    x = np.asarray(x, dtype=complex)
    n = x.shape[0]
    if len(projections) != 3 or len(unitaries) != 3:
        raise UsageError("need exactly three projections and three unitaries")
    if np.max(np.abs(x - x.conj().T)) > tol:
        raise UsageError("x must be self-adjoint")
    eye = np.eye(n)
    qs = []
    for p, u in zip(projections, unitaries):
        p = np.asarray(p, dtype=complex)
        u = np.asarray(u, dtype=complex)
        if np.max(np.abs(p @ p - p)) > tol or np.max(np.abs(p - p.conj().T)) > tol:
            raise UsageError("p_j must be an orthogonal projection")
        if np.max(np.abs(u @ u.conj().T - eye)) > tol:
            raise UsageError("u_j must be unitary")
        if np.max(np.abs(p @ x @ p)) > tol:
            raise UsageError("hypothesis p_j x p_j = 0 fails")
        qs.append(u @ (eye - p) @ u.conj().T)
    for i in range(3):
        for j in range(i + 1, 3):
            if np.max(np.abs(qs[i] @ qs[j])) > tol:
                raise UsageError("images u_j(1-p_j)u_j* are not pairwise orthogonal")
    y = sum(u @ x @ u.conj().T for u in (np.asarray(u, dtype=complex) for u in unitaries)) / 3.0
    nx = float(np.linalg.norm(x, 2))
    ny = float(np.linalg.norm(y, 2))
    if nx == 0.0:
        return HsCheckResult(passed=True, ratio=0.0)
    ratio = ny / nx
    return HsCheckResult(passed=ny <= HS_CONSTANT * nx + tol, ratio=ratio)


def _split_components(x: CrossedElement):
    """Decompose supp(x) into {s, s^-1} pairs (free groups are torsion-free,
    so the involution-only part is empty) and restrict x accordingly."""
    from .rep import length_lex_key

    remaining = sorted(x.support(), key=length_lex_key)
    seen = set()
    comps = []
    for s in remaining:
        if s in seen:
            continue
        si = inv(s)
        seen.add(s)
        seen.add(si)
        coeffs = {g: x.coeffs[g] for g in ({s, si} & set(x.coeffs))}
        comps.append(CrossedElement(x.system, coeffs))
    return comps


def ph_average(x: CrossedElement, epsilon: float, k_max: int = 4,
               compute_norms: bool = True, norm_rounds: int = 2,
               seed: int = 42, check_projections: bool = True):
    """Iterated contraction following the component-by-component scheme:
    split the support into inverse-closed pairs, contract each k_max times
    with freshly constructed triples, and certify the remaining decay to
    epsilon analytically (0.991^k beats any target eventually).

    Returns (AveragingProcess, DecayTrace).
    """
    _require_avg_input(x)
    if x.system.group.kind != "free":
        raise UsageError("built-in certificates exist only for free groups; "
                         "supply certificates for other groups")
    trace = DecayTrace(epsilon=epsilon)
    process = AveragingProcess()
    if not x.coeffs:
        trace.steps_to_epsilon = 0
        return process, trace
    trace.steps_to_epsilon = steps_to_reach(epsilon, x.l1_norm())

    comps = _split_components(x)
    n = len(comps)
    frozen = [None] * n          # certified bounds of finished components
    step_no = 0
    for j in range(n):
        start_l1 = comps[j].l1_norm()
        for t in range(1, k_max + 1):
            if not comps[j].coeffs:
                break
            triple = construct_powers_triple(x.system.group, sorted(
                comps[j].support(), key=lambda w: (w.word_length(), repr(w))))
            phi = SimpleAveraging(triple.conjugators[:3])
            # precondition sanity on the component actually being contracted
            powers_applied, factor = powers_step(comps[j], triple,
                                                 check_projections=check_projections)
            comps[j] = powers_applied
            for i in range(n):
                if i != j:
                    comps[i] = phi.apply(comps[i])
            process.steps.append(phi)
            step_no += 1
            bounds = []
            for i in range(n):
                if frozen[i] is not None:
                    bounds.append(frozen[i])
                elif i == j:
                    bounds.append(factor ** t * start_l1)
                else:
                    bounds.append(comps[i].l1_norm())
            total = comps[0]
            for comp in comps[1:]:
                total = total + comp
            nl = None
            if compute_norms and total.coeffs:
                nl = adaptive_norm_lower(total, rounds=norm_rounds, seed=seed).value
            trace.add(StepRecord(step=step_no, terms=total.term_count(),
                                 norm_lower=nl, l1_upper=total.l1_norm(),
                                 certified_bound=sum(bounds)))
        frozen[j] = CONTRACTION_FACTOR ** k_max * start_l1 if comps[j].coeffs else 0.0
    return process, trace


def pcom_average(y0: CrossedElement, cert: PcomCertificate, count: int):
    """y_N = (1/N) sum_{j=1..N} lam(g0^-j) y0 lam(g0^-j)*, with the certified
    bound (2n/sqrt(N)) sum_g ||coefficient of g||.

    y0 need not be self-adjoint; its support must lie in the certificate's
    (conjugated) target family.
    """
    if not y0.expectation().is_zero(1e-12):
        raise UsageError("element must have zero expectation")
    if count < 1:
        raise UsageError("need at least one term in the average")
    if not y0.support() <= set(cert.target):
        raise UsageError("support escapes the certificate's target family")
    sys = y0.system
    total = CrossedElement.zero(sys)
    for j in range(1, count + 1):
        u = CrossedElement.lam(sys, power(cert.g0, -j))
        total = total + u.multiply(y0).multiply(u.adjoint())
    y_n = (1.0 / count) * total
    bound = 2.0 * cert.n / math.sqrt(count) * y0.l1_norm()
    return y_n, bound


def pcom_average_checked(y0: CrossedElement, cert: PcomCertificate, count: int,
                         norm_rounds: int = 2, seed: int = 42):
    """pcom_average plus the refutation monitor on the adaptive window."""
    y_n, bound = pcom_average(y0, cert, count)
    nl = adaptive_norm_lower(y_n, rounds=norm_rounds, seed=seed).value if y_n.coeffs else 0.0
    if nl > bound + REFUTATION_TOL:
        raise RefutationError(
            f"norm lower bound {nl} exceeds certified displacement bound {bound}",
            observed=nl, certified=bound)
    return y_n, bound, nl


def dixmier_reduce(y: CrossedElement, epsilon: float, k_max: int = 4,
                   compute_norms: bool = True, seed: int = 42):
    """Reduce a general zero-expectation element: average the real part to
    epsilon/2, push the imaginary part through, average it to epsilon/2.

    Returns (AveragingProcess, DecayTrace) with the traces concatenated.
    """
    if not y.expectation().is_zero(1e-12):
        raise UsageError("element must have zero expectation")
    x1 = y.real_part()
    x2 = y.imag_part()
    psi1, trace1 = ph_average(x1, epsilon / 2, k_max=k_max,
                              compute_norms=compute_norms, seed=seed)
    x2_pushed = psi1.apply(x2)
    # equivariance: E(psi(x2)) = 0 carries over
    psi2, trace2 = ph_average(x2_pushed, epsilon / 2, k_max=k_max,
                              compute_norms=compute_norms, seed=seed)
    combined = AveragingProcess(psi1.steps + psi2.steps)
    trace = DecayTrace(records=trace1.records + [
        StepRecord(step=len(trace1.records) + r.step, terms=r.terms,
                   norm_lower=r.norm_lower, l1_upper=r.l1_upper,
                   certified_bound=r.certified_bound
                   + (trace1.records[-1].certified_bound if trace1.records else 0.0))
        for r in trace2.records
    ], epsilon=epsilon)
    k1 = trace1.steps_to_epsilon or 0
    k2 = trace2.steps_to_epsilon or 0
    trace.steps_to_epsilon = k1 + k2
    return combined, trace
