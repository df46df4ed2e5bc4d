"""Finite groups given by full multiplication tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations as _perms
from typing import Iterable, Sequence

__all__ = [
    "GroupError",
    "NotAssociative",
    "NoIdentity",
    "NoInverse",
    "IndexOutOfRange",
    "NotHomomorphism",
    "ParentMismatch",
    "FiniteGroup",
    "Subgroup",
    "GroupMorphism",
    "MorphismReport",
    "group_from_table",
    "group_from_permutations",
    "cyclic_group",
    "direct_product",
    "symmetric_group",
    "dihedral_group",
    "trivial_group",
    "subgroup_generated",
    "subgroup_intersect",
    "all_subgroups",
    "morphism_check",
    "MAX_ORDER",
]

MAX_ORDER = 2**14


class GroupError(ValueError):
    pass


class NotAssociative(GroupError):
    def __init__(self, x, y, z):
        super().__init__(f"table is not associative: ({x}*{y})*{z} != {x}*({y}*{z})")
        self.witness = (x, y, z)


class NoIdentity(GroupError):
    def __init__(self):
        super().__init__("no element acts as a two-sided identity")


class NoInverse(GroupError):
    def __init__(self, x):
        super().__init__(f"element {x} has no inverse")
        self.witness = x


class IndexOutOfRange(GroupError):
    def __init__(self, x, order):
        super().__init__(f"element index {x!r} out of range for a group of order {order}")
        self.witness = x


class NotHomomorphism(GroupError):
    def __init__(self, x, y):
        super().__init__(f"map fails f({x}*{y}) = f({x})*f({y})")
        self.witness = (x, y)


class ParentMismatch(GroupError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    order: int
    mul: tuple
    identity: int
    inv: tuple
    labels: tuple | None = None

    def __len__(self):
        return self.order

    def __iter__(self):
        return iter(range(self.order))

    def m(self, x: int, y: int) -> int:
        return self.mul[x][y]

    def product(self, elements: Iterable[int]) -> int:
        acc = self.identity
        for x in elements:
            acc = self.mul[acc][x]
        return acc

    def is_abelian(self) -> bool:
        return all(self.mul[x][y] == self.mul[y][x] for x in range(self.order) for y in range(x))

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != self.identity:
            y = self.mul[y][x]
            k += 1
        return k

    def label(self, x: int) -> str:
        if self.labels:
            return self.labels[x]
        return str(x)

    def whole(self) -> Subgroup:
        return Subgroup(self, tuple(range(self.order)))

    def trivial(self) -> Subgroup:
        return Subgroup(self, (self.identity,))

    def check(self, x: int) -> int:
        if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < self.order:
            raise IndexOutOfRange(x, self.order)
        return x

    def same_table(self, other: FiniteGroup) -> bool:
        return self.order == other.order and self.mul == other.mul


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup = field(compare=False, repr=False)
    members: tuple

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(set(self.members))))

    def __len__(self):
        return len(self.members)

    def __contains__(self, x):
        return x in self._set

    def __iter__(self):
        return iter(self.members)

    @property
    def _set(self) -> frozenset:
        s = self.__dict__.get("_cached_set")
        if s is None:
            s = frozenset(self.members)
            object.__setattr__(self, "_cached_set", s)
        return s

    def is_closed(self) -> bool:
        G = self.parent
        if G.identity not in self:
            return False
        return all(G.inv[x] in self for x in self.members) and all(
            G.mul[x][y] in self for x in self.members for y in self.members
        )

    def as_group(self) -> tuple[FiniteGroup, GroupMorphism]:
        """The subgroup as a standalone group plus its inclusion morphism."""
        G = self.parent
        index = {x: i for i, x in enumerate(self.members)}
        table = [[index[G.mul[x][y]] for y in self.members] for x in self.members]
        labels = tuple(G.label(x) for x in self.members) if G.labels else None
        H = group_from_table(table, labels=labels, check=False)
        return H, GroupMorphism(H, G, tuple(self.members))


@dataclass(frozen=True, eq=False)
class GroupMorphism:
    domain: FiniteGroup
    codomain: FiniteGroup
    map: tuple

    def __call__(self, x: int) -> int:
        return self.map[x]

    def image(self) -> Subgroup:
        return Subgroup(self.codomain, tuple(set(self.map)))

    def is_injective(self) -> bool:
        return len(set(self.map)) == self.domain.order

    def compose(self, first: GroupMorphism) -> GroupMorphism:
        """self ∘ first"""
        return GroupMorphism(first.domain, self.codomain, tuple(self.map[first.map[x]] for x in range(first.domain.order)))


@dataclass(frozen=True)
class MorphismReport:
    ok: bool
    injective: bool
    surjective: bool


def group_from_table(mul: Sequence[Sequence[int]], labels=None, check: bool = True) -> FiniteGroup:
    n = len(mul)
    if n == 0:
        raise GroupError("empty table")
    if n > MAX_ORDER:
        raise GroupError(f"order {n} exceeds the table bound {MAX_ORDER}")
    rows = []
    for r in mul:
        if len(r) != n:
            raise GroupError("multiplication table must be square")
        row = []
        for x in r:
            if isinstance(x, bool) or not isinstance(x, int) or not 0 <= x < n:
                raise IndexOutOfRange(x, n)
            row.append(x)
        rows.append(tuple(row))
    mul = tuple(rows)
    e = None
    for c in range(n):
        if all(mul[c][x] == x and mul[x][c] == x for x in range(n)):
            e = c
            break
    if e is None:
        raise NoIdentity()
    inv = []
    for x in range(n):
        y = next((y for y in range(n) if mul[x][y] == e), None)
        if y is None or mul[y][x] != e:
            raise NoInverse(x)
        inv.append(y)
    if check:
        for x in range(n):
            mx = mul[x]
            for y in range(n):
                xy = mx[y]
                my = mul[y]
                mxy = mul[xy]
                for z in range(n):
                    if mxy[z] != mx[my[z]]:
                        raise NotAssociative(x, y, z)
    if labels is not None:
        labels = tuple(str(s) for s in labels)
        if len(labels) != n:
            raise GroupError("labels must name every element")
    return FiniteGroup(n, mul, e, tuple(inv), labels)


def _perm_label(p: tuple) -> str:
    seen, cycles = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j + 1)
            j = p[j]
        cycles.append("(" + "".join(str(c) for c in cyc) + ")")
    return "".join(cycles) or "e"


def group_from_permutations(gens: Sequence[Sequence[int]], degree: int | None = None) -> tuple[FiniteGroup, list]:
    """Close permutation generators (0-based image lists) into a table group.

    Returns the group and the list of permutations, element i being perms[i].
    The identity is element 0; the remaining elements appear in BFS order.
    """
    if degree is None:
        degree = max((len(g) for g in gens), default=1)
    gens = [tuple(g) for g in gens]
    for g in gens:
        if sorted(g) != list(range(degree)):
            raise GroupError(f"not a permutation of {degree} points: {list(g)}")
    ident = tuple(range(degree))
    elements = [ident]
    index = {ident: 0}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                # p then g (apply p first)
                q = tuple(g[p[i]] for i in range(degree))
                if q not in index:
                    if len(elements) >= MAX_ORDER:
                        raise GroupError("generated group exceeds the table bound")
                    index[q] = len(elements)
                    elements.append(q)
                    nxt.append(q)
        frontier = nxt
    table = [[index[tuple(b[a[i]] for i in range(degree))] for b in elements] for a in elements]
    labels = [_perm_label(p) for p in elements]
    return group_from_table(table, labels=labels, check=False), elements


def cyclic_group(n: int) -> FiniteGroup:
    return group_from_table([[(i + j) % n for j in range(n)] for i in range(n)], check=False)


def trivial_group() -> FiniteGroup:
    return cyclic_group(1)


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """Element (g, h) has index g*|H| + h."""
    m = H.order
    table = [
        [G.mul[a // m][b // m] * m + H.mul[a % m][b % m] for b in range(G.order * m)]
        for a in range(G.order * m)
    ]
    labels = None
    if G.labels or H.labels:
        labels = [f"({G.label(a // m)},{H.label(a % m)})" for a in range(G.order * m)]
    return group_from_table(table, labels=labels, check=False)


def symmetric_group(n: int) -> tuple[FiniteGroup, list]:
    perms = list(_perms(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(b[a[i]] for i in range(n))] for b in perms] for a in perms]
    return group_from_table(table, labels=[_perm_label(p) for p in perms], check=False), perms


def dihedral_group(n: int) -> tuple[FiniteGroup, list]:
    """Symmetries of the n-gon as permutations of its vertices."""
    r = [(i + 1) % n for i in range(n)]
    s = [(-i) % n for i in range(n)]
    return group_from_permutations([r, s], degree=n)


def subgroup_generated(G: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    gens = [G.check(g) for g in gens]
    members = {G.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.mul[x][g]
                if y not in members:
                    members.add(y)
                    nxt.append(y)
        frontier = nxt
    # finite group: closure under multiplication already contains inverses
    return Subgroup(G, tuple(members))


def subgroup_intersect(S1: Subgroup, S2: Subgroup) -> Subgroup:
    if S1.parent is not S2.parent and not S1.parent.same_table(S2.parent):
        raise ParentMismatch("subgroups live in different groups")
    return Subgroup(S1.parent, tuple(set(S1.members) & set(S2.members)))


def all_subgroups(G: FiniteGroup) -> list[Subgroup]:
    """Every subgroup, by closing under joins of cyclic subgroups.  Small groups only."""
    cyclic = {subgroup_generated(G, [x]).members for x in G}
    found = set(cyclic)
    frontier = set(cyclic)
    while frontier:
        nxt = set()
        for a in frontier:
            for c in cyclic:
                j = subgroup_generated(G, set(a) | set(c)).members
                if j not in found:
                    found.add(j)
                    nxt.add(j)
        frontier = nxt
    return [Subgroup(G, m) for m in sorted(found, key=lambda m: (len(m), m))]


def morphism_check(f: GroupMorphism) -> MorphismReport:
    D, C = f.domain, f.codomain
    if len(f.map) != D.order:
        raise GroupError("morphism map must give an image for every element")
    for y in f.map:
        C.check(y)
    for x in range(D.order):
        fx = f.map[x]
        for y in range(D.order):
            if f.map[D.mul[x][y]] != C.mul[fx][f.map[y]]:
                raise NotHomomorphism(x, y)
    return MorphismReport(True, f.is_injective(), len(set(f.map)) == C.order)
