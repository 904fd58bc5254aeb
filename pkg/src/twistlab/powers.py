"""Combinatorial largeness certificates on free groups: prefix sets,
Powers triples (conjugators h_j with pairwise disjoint large sets T_j),
and displacement certificates for the commensurated-set averaging bound.

Constructors certify their output by a case analysis that only works for
free groups; the ball verifiers are sound falsifiers for any certificate,
including user-supplied ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import UsageError
from .groups import Group, GroupElement, ball, conjugate, inv, mul, power


def starts_with(w: GroupElement, prefix: GroupElement) -> bool:
    """True when the reduced word w begins with the reduced word `prefix`."""
    pb, wb = prefix.blocks, w.blocks
    if len(pb) > len(wb):
        return False
    if not pb:
        return True
    head = len(pb) - 1
    for i in range(head):
        if pb[i] != wb[i]:
            return False
    gen, exp = pb[head]
    wgen, wexp = wb[head]
    return gen == wgen and (exp > 0) == (wexp > 0) and abs(exp) <= abs(wexp)


class PrefixSet:
    """Words beginning with one of the prefixes, plus explicit exceptions,
    optionally complemented."""

    def __init__(self, prefixes: Sequence[GroupElement], complement: bool = False,
                 exceptions: Iterable[GroupElement] = ()):
        self.prefixes = tuple(prefixes)
        for p in self.prefixes:
            if p.is_identity():
                raise UsageError("the empty word is not a usable prefix")
        self.complement = complement
        self.exceptions = frozenset(exceptions)

    def __contains__(self, w: GroupElement) -> bool:
        base = w in self.exceptions or any(starts_with(w, p) for p in self.prefixes)
        return (not base) if self.complement else base

    def disjoint_from(self, other: "PrefixSet") -> bool:
        """Symbolic disjointness; decided by prefix comparison for plain
        prefix-cone unions (no complements, no exceptions)."""
        if self.complement or other.complement or self.exceptions or other.exceptions:
            raise UsageError("symbolic disjointness requires plain prefix sets")
        for p in self.prefixes:
            for q in other.prefixes:
                if starts_with(p, q) or starts_with(q, p):
                    return False
        return True

    def __repr__(self):
        tag = "complement of " if self.complement else ""
        return f"PrefixSet({tag}{list(self.prefixes)!r})"


@dataclass
class PowersTriple:
    conjugators: tuple          # h_1, ..., h_N
    sets: tuple                 # T_1, ..., T_N (PrefixSets, pairwise disjoint)
    target: tuple               # the finite set F the triple was built for

    @property
    def count(self):
        return len(self.conjugators)


@dataclass
class PcomCertificate:
    g0: GroupElement
    shift_set: PrefixSet                 # U
    covers: tuple                        # D_1, ..., D_n
    target: tuple                        # the (conjugated) family F'
    conjugator: GroupElement             # c with F' = c F c^{-1}

    @property
    def n(self):
        return len(self.covers)


def _free_letters_check(group: Group):
    if group.kind != "free" or group.rank < 2:
        raise UsageError("certificate construction needs a free group of rank >= 2; "
                         "supply a certificate for other groups")


def _starts_and_ends_in_a(w: GroupElement) -> bool:
    return bool(w.blocks) and w.blocks[0][0] == 0 and w.blocks[-1][0] == 0


def construct_powers_triple(group: Group, target, count: int = 3) -> PowersTriple:
    """h_j = b^j a^(L+1), T_j = words beginning b^j a^{+-1}, with L the longest
    word in the target family.

    Each h_j f h_j^{-1} reduces to b^j (a-word ... a-word) b^{-j}, so
    translating any word outside T_j lands it inside T_j; disjointness of the
    T_j is immediate from the distinct b-power prefixes.
    """
    _free_letters_check(group)
    target = tuple(target)
    if not target:
        raise UsageError("target family must be nonempty")
    if any(f.is_identity() for f in target):
        raise UsageError("target family must avoid the identity")
    if count < 1:
        raise UsageError("need at least one conjugator")
    a, b = group.generator(0), group.generator(1)
    L = max(f.word_length() for f in target)
    shift = power(a, L + 1)
    conjugators, sets = [], []
    for j in range(1, count + 1):
        bj = power(b, j)
        h = mul(bj, shift)
        # the constructor's case analysis: a^(L+1) f a^-(L+1) keeps a-letters
        # on both ends for every f in the closed family
        for f in tuple(target) + tuple(inv(f) for f in target):
            if not _starts_and_ends_in_a(conjugate(shift, f)):
                raise UsageError(f"conjugation normal form failed for {f!r}")
        t = PrefixSet([mul(bj, a), mul(bj, inv(a))])
        conjugators.append(h)
        sets.append(t)
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if not sets[i].disjoint_from(sets[j]):
                raise UsageError("constructed sets are not symbolically disjoint")
    return PowersTriple(tuple(conjugators), tuple(sets), target)


def verify_largeness(T: PrefixSet, movers, radius: int, group: Group):
    """Falsify m(G \\ T) subset T on the radius-R ball: returns None on pass,
    else the first violating (m, w).

    A pass does not prove largeness (the constructor's symbolic argument
    does); a counterexample disproves it.
    """
    for w in ball(group, radius):
        if w in T:
            continue
        for m in movers:
            if mul(m, w) not in T:
                return (m, w)
    return None


def triple_movers(triple: PowersTriple, j: int):
    """The family h_j S h_j^{-1} (S = target closed under inverses) whose
    largeness T_j certifies."""
    h = triple.conjugators[j]
    closed = set(triple.target) | {inv(f) for f in triple.target}
    return [conjugate(h, f) for f in sorted(closed, key=lambda w: (w.word_length(), repr(w)))]


def construct_pcom(group: Group, target) -> PcomCertificate:
    """U = words starting with a b-letter, D_1 = its complement, g0 = b, n = 1.

    The family is first conjugated by a^(L+1) so that every member starts and
    ends in a-letters; the certificate applies to the conjugated family and
    callers must conjugate their element accordingly (conjugation preserves
    every norm in play).
    """
    _free_letters_check(group)
    target = tuple(target)
    if not target:
        raise UsageError("target family must be nonempty")
    if any(f.is_identity() for f in target):
        raise UsageError("target family must avoid the identity")
    a, b = group.generator(0), group.generator(1)
    if all(_starts_and_ends_in_a(f) for f in target):
        c = group.identity()
        conjugated = target
    else:
        L = max(f.word_length() for f in target)
        c = power(a, L + 1)
        conjugated = tuple(conjugate(c, f) for f in target)
    for f in conjugated:
        if not _starts_and_ends_in_a(f):
            raise UsageError(f"conjugation normal form failed for {f!r}")
    U = PrefixSet([b, inv(b)])
    D1 = PrefixSet([b, inv(b)], complement=True)
    return PcomCertificate(g0=b, shift_set=U, covers=(D1,), target=conjugated, conjugator=c)


def verify_pcom(cert: PcomCertificate, target, radius: int, j_max: int,
                group: Group):
    """Ball falsifier for the three displacement conditions:
      (i)  everything outside U is covered by the D_k,
      (ii) gU and U are disjoint for every g in the family,
      (iii) g0^-j D_k and D_k are disjoint for 1 <= j <= j_max.
    Returns None on pass, else (condition, witness).
    """
    B = ball(group, radius)
    for w in B:
        if w not in cert.shift_set and not any(w in D for D in cert.covers):
            return ("cover", w)
    for g in target:
        for w in B:
            if w in cert.shift_set and mul(g, w) in cert.shift_set:
                return ("shift-disjoint", (g, w))
    for j in range(1, j_max + 1):
        gj = power(cert.g0, -j)
        for k, D in enumerate(cert.covers):
            for w in B:
                if w in D and mul(gj, w) in D:
                    return ("power-disjoint", (j, k, w))
    return None
