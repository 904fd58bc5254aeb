"""Discrete-group arithmetic: finite multiplication-table groups and free
groups with reduced-word elements, plus actions on finite sets.

Free-group words are stored run-length encoded as (generator, exponent)
blocks so that conjugation by long powers stays cheap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ResourceError, UsageError

DEFAULT_BALL_CAP = 3_000_000
EXHAUSTIVE_LAW_CAP = 512

_GEN_NAMES = "abcdefghijklmnopqrstuvwxyz"


def _reduce(blocks: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[tuple[int, int]] = []
    for gen, exp in blocks:
        if exp == 0:
            continue
        if out and out[-1][0] == gen:
            merged = out[-1][1] + exp
            out.pop()
            if merged:
                out.append((gen, merged))
        else:
            out.append((gen, exp))
    return tuple(out)


class Group:
    """A finite group given by its multiplication table, or a free group F_k.

    Finite groups may carry per-element coordinate vectors (for products of
    cyclic groups) which bicharacter cocycles use.
    """

    def __init__(self, kind, *, rank=None, table=None, labels=None, coords=None,
                 validate=True):
        if kind not in ("finite", "free"):
            raise UsageError(f"unknown group kind {kind!r}")
        self.kind = kind
        if kind == "free":
            if rank is None or rank < 1:
                raise UsageError("free group needs rank >= 1")
            self.rank = int(rank)
            self.order = None
            self.labels = tuple(_GEN_NAMES[i] for i in range(self.rank))
            self.coords = None
        else:
            self.table = np.asarray(table, dtype=np.int64)
            n = self.table.shape[0]
            if self.table.shape != (n, n):
                raise UsageError("multiplication table must be square")
            self.order = n
            self.rank = None
            self.labels = tuple(labels) if labels else tuple(str(i) for i in range(n))
            self.coords = None if coords is None else tuple(tuple(c) for c in coords)
            self._law_validated_exhaustively = False
            if validate:
                self._validate_table()

    # -- finite-table law validation ------------------------------------
    def _validate_table(self):
        T = self.table
        n = self.order
        if T.min() < 0 or T.max() >= n:
            raise UsageError("table entries out of range")
        # two-sided identity
        ident = None
        for i in range(n):
            if np.array_equal(T[i], np.arange(n)) and np.array_equal(T[:, i], np.arange(n)):
                ident = i
                break
        if ident is None:
            raise UsageError("table has no two-sided identity")
        self.identity_index = ident
        # inverses
        inv = np.full(n, -1, dtype=np.int64)
        for i in range(n):
            hits = np.where(T[i] == ident)[0]
            if len(hits) == 0 or T[hits[0], i] != ident:
                raise UsageError(f"element {i} has no two-sided inverse")
            inv[i] = hits[0]
        self.inverse_table = inv
        # associativity: exhaustive up to the cap, sampled beyond it
        if n <= EXHAUSTIVE_LAW_CAP:
            left = T[T]                       # left[g,h,k] = T[T[g,h],k]
            right = T[:, T]                   # right[g,h,k] = T[g,T[h,k]]
            if not np.array_equal(left, right):
                g, h, k = np.argwhere(left != right)[0]
                raise UsageError(f"table not associative at ({g},{h},{k})")
            self._law_validated_exhaustively = True
        else:
            rng = np.random.default_rng(0)
            for _ in range(10_000):
                g, h, k = rng.integers(0, n, size=3)
                if T[T[g, h], k] != T[g, T[h, k]]:
                    raise UsageError(f"table not associative at ({g},{h},{k})")
            self._law_validated_exhaustively = False

    # -- constructors ----------------------------------------------------
    @staticmethod
    def free(rank: int) -> "Group":
        return Group("free", rank=rank)

    @staticmethod
    def from_table(table, labels=None, coords=None) -> "Group":
        return Group("finite", table=table, labels=labels, coords=coords)

    @staticmethod
    def cyclic(n: int) -> "Group":
        table = [[(i + j) % n for j in range(n)] for i in range(n)]
        coords = [(i,) for i in range(n)]
        return Group.from_table(table, labels=[str(i) for i in range(n)], coords=coords)

    @staticmethod
    def cyclic_product(moduli: Sequence[int]) -> "Group":
        """Direct product Z_{m1} x ... x Z_{mk}, with coordinates attached."""
        moduli = tuple(int(m) for m in moduli)
        pts = list(itertools.product(*(range(m) for m in moduli)))
        index = {p: i for i, p in enumerate(pts)}
        n = len(pts)
        table = [[0] * n for _ in range(n)]
        for i, p in enumerate(pts):
            for j, q in enumerate(pts):
                table[i][j] = index[tuple((a + b) % m for a, b, m in zip(p, q, moduli))]
        labels = ["".join(map(str, p)) for p in pts]
        g = Group.from_table(table, labels=labels, coords=pts)
        g.moduli = moduli
        return g

    @staticmethod
    def symmetric(n: int) -> "Group":
        """Symmetric group S_n by table; also attaches the natural point action."""
        perms = list(itertools.permutations(range(n)))
        index = {p: i for i, p in enumerate(perms)}
        m = len(perms)
        table = [[0] * m for _ in range(m)]
        for i, p in enumerate(perms):
            for j, q in enumerate(perms):
                # composition: (p*q)(x) = p(q(x))
                table[i][j] = index[tuple(p[q[x]] for x in range(n))]
        g = Group.from_table(table, labels=[str(p) for p in perms])
        g.point_perms = perms
        return g

    # -- elements --------------------------------------------------------
    def identity(self) -> "GroupElement":
        if self.kind == "free":
            return GroupElement(self, blocks=())
        return GroupElement(self, index=self.identity_index)

    def element(self, index: int) -> "GroupElement":
        if self.kind != "finite":
            raise UsageError("index elements exist only for finite groups")
        if not 0 <= index < self.order:
            raise UsageError(f"element index {index} out of range")
        return GroupElement(self, index=index)

    def generator(self, i: int) -> "GroupElement":
        if self.kind != "free":
            raise UsageError("generators are indexed only for free groups")
        if not 0 <= i < self.rank:
            raise UsageError(f"generator index {i} out of range for rank {self.rank}")
        return GroupElement(self, blocks=((i, 1),))

    def word(self, blocks: Iterable[tuple[int, int]]) -> "GroupElement":
        if self.kind != "free":
            raise UsageError("words exist only for free groups")
        blocks = _reduce(blocks)
        for gen, _ in blocks:
            if not 0 <= gen < self.rank:
                raise UsageError(f"generator {gen} out of range")
        return GroupElement(self, blocks=blocks)

    def elements(self):
        if self.kind != "finite":
            raise UsageError("cannot enumerate an infinite group")
        return [GroupElement(self, index=i) for i in range(self.order)]

    def __repr__(self):
        if self.kind == "free":
            return f"Group(free, rank={self.rank})"
        return f"Group(finite, order={self.order})"


class GroupElement:
    """Immutable element of a `Group`: an index (finite) or reduced word (free)."""

    __slots__ = ("group", "index", "blocks", "_hash")

    def __init__(self, group: Group, index: Optional[int] = None,
                 blocks: Optional[tuple] = None):
        self.group = group
        self.index = index
        self.blocks = blocks
        self._hash = None

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return (self.group is other.group and self.index == other.index
                and self.blocks == other.blocks)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((id(self.group), self.index, self.blocks))
        return self._hash

    def is_identity(self) -> bool:
        if self.group.kind == "free":
            return not self.blocks
        return self.index == self.group.identity_index

    def word_length(self) -> int:
        if self.group.kind == "free":
            return sum(abs(e) for _, e in self.blocks)
        raise UsageError("word length is defined for free-group elements")

    def letters(self):
        """Expand the run-length encoding into single (gen, +-1) letters."""
        for gen, exp in self.blocks:
            step = 1 if exp > 0 else -1
            for _ in range(abs(exp)):
                yield (gen, step)

    def __repr__(self):
        if self.group.kind == "finite":
            return f"<{self.group.labels[self.index]}>"
        if not self.blocks:
            return "<e>"
        names = self.group.labels
        parts = []
        for gen, exp in self.blocks:
            parts.append(names[gen] if exp == 1 else f"{names[gen]}^{exp}")
        return "<" + " ".join(parts) + ">"


def _same_group(g: GroupElement, h: GroupElement):
    if g.group is not h.group:
        raise UsageError("operands belong to different groups")


def mul(g: GroupElement, h: GroupElement) -> GroupElement:
    _same_group(g, h)
    if g.group.kind == "finite":
        return GroupElement(g.group, index=int(g.group.table[g.index, h.index]))
    return GroupElement(g.group, blocks=_reduce(g.blocks + h.blocks))


def inv(g: GroupElement) -> GroupElement:
    if g.group.kind == "finite":
        return GroupElement(g.group, index=int(g.group.inverse_table[g.index]))
    return GroupElement(g.group, blocks=tuple((gen, -exp) for gen, exp in reversed(g.blocks)))


def power(g: GroupElement, n: int) -> GroupElement:
    if g.group.kind == "free" and len(g.blocks) == 1:
        gen, exp = g.blocks[0]
        return GroupElement(g.group, blocks=_reduce([(gen, exp * n)]))
    result = g.group.identity()
    base = g if n >= 0 else inv(g)
    for _ in range(abs(n)):
        result = mul(result, base)
    return result


def conjugate(h: GroupElement, g: GroupElement) -> GroupElement:
    """h g h^{-1}."""
    return mul(mul(h, g), inv(h))


def ball_size(rank: int, radius: int) -> int:
    """|B_R| in F_k: 1 + sum_{r<=R} 2k (2k-1)^{r-1}."""
    k2 = 2 * rank
    total = 1
    sphere = k2
    for _ in range(radius):
        total += sphere
        sphere *= k2 - 1
    return total


def ball(group: Group, radius: int, cap: int = DEFAULT_BALL_CAP) -> list[GroupElement]:
    """All reduced words of length <= radius, in length-lexicographic order.

    For finite groups this is simply every element, regardless of radius.
    """
    if radius < 0:
        raise UsageError("ball radius must be nonnegative")
    if group.kind == "finite":
        return group.elements()
    if ball_size(group.rank, radius) > cap:
        raise ResourceError(
            f"ball of radius {radius} in F_{group.rank} has "
            f"{ball_size(group.rank, radius)} nodes (cap {cap})")
    letters = [(g, s) for g in range(group.rank) for s in (1, -1)]
    out = [group.identity()]
    frontier = [group.identity()]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for gen, s in letters:
                if w.blocks and w.blocks[-1][0] == gen and (w.blocks[-1][1] > 0) != (s > 0):
                    continue  # would cancel
                nxt.append(GroupElement(group, blocks=_reduce(w.blocks + ((gen, s),))))
        out.extend(nxt)
        frontier = nxt
    return out


class FiniteAction:
    """Action of a finite group on a finite set {0, ..., m-1}."""

    def __init__(self, group: Group, perms, validate=True):
        if group.kind != "finite":
            raise UsageError("FiniteAction requires a finite group")
        self.group = group
        self.perms = np.asarray(perms, dtype=np.int64)
        if self.perms.shape[0] != group.order:
            raise UsageError("need one permutation per group element")
        self.size = self.perms.shape[1]
        if validate:
            self._validate()

    def _validate(self):
        m = self.size
        ident = np.arange(m)
        for row in self.perms:
            if not np.array_equal(np.sort(row), ident):
                raise UsageError("action rows must be permutations")
        if not np.array_equal(self.perms[self.group.identity_index], ident):
            raise UsageError("identity must act trivially")
        T = self.group.table
        for g in range(self.group.order):
            for h in range(self.group.order):
                if not np.array_equal(self.perms[g][self.perms[h]], self.perms[T[g, h]]):
                    raise UsageError(f"action law fails at (g={g}, h={h})")

    @staticmethod
    def trivial(group: Group, size: int) -> "FiniteAction":
        perms = np.tile(np.arange(size), (group.order, 1))
        return FiniteAction(group, perms)

    def act(self, g: GroupElement, x: int) -> int:
        return int(self.perms[g.index, x])


@dataclass
class OrbitReport:
    orbits: list[list[int]]
    stabilizers: list[list[GroupElement]] = field(repr=False)
    base_points: list[int] = field(default_factory=list)


def orbits(action: FiniteAction) -> OrbitReport:
    """Orbit partition with, per orbit, the stabilizer of its smallest point.

    Cells are ordered by smallest member.
    """
    seen = set()
    cells, stabs, bases = [], [], []
    for x in range(action.size):
        if x in seen:
            continue
        orbit = sorted({int(action.perms[g, x]) for g in range(action.group.order)})
        seen.update(orbit)
        stab = [action.group.element(g) for g in range(action.group.order)
                if action.perms[g, x] == x]
        cells.append(orbit)
        stabs.append(stab)
        bases.append(x)
    return OrbitReport(orbits=cells, stabilizers=stabs, base_points=bases)
