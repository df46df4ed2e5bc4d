"""Exhaustive search over small triangles with cyclic edges and trivial core."""

from __future__ import annotations

from itertools import product
from typing import Iterator

from .engine import Overflow
from .fixtures import build_triangle
from .groups import (
    FiniteGroup,
    cyclic_group,
    dihedral_group,
    direct_product,
    subgroup_generated,
    symmetric_group,
)
from .triangles import GroupTriangle, _collapse_witness, _enumerate_family

__all__ = ["small_groups", "vertex_types", "cyclic_edge_triangles", "find_collapsing_triangles"]


def small_groups(max_order: int = 8) -> list[tuple[str, FiniteGroup]]:
    """Two-generated groups of order at most 8 (enough for cyclic-edge vertices)."""
    Z = cyclic_group
    out = [(f"Z{n}", Z(n)) for n in range(2, max_order + 1)]
    out += [("Z2xZ2", direct_product(Z(2), Z(2))), ("Z2xZ4", direct_product(Z(2), Z(4)))]
    out += [("S3", symmetric_group(3)[0]), ("D4", dihedral_group(4)[0])]
    return [(n, G) for n, G in out if G.order <= max_order]


def _pair_signature(G: FiniteGroup, x: int, y: int) -> tuple:
    """Multiplication table relabelled by breadth-first order from (x, y).

    Two generating pairs share a signature iff an automorphism carries one to the other.
    """
    seen = {G.identity: 0}
    order = [G.identity]
    k = 0
    while k < len(order):
        for g in (x, y):
            z = G.mul[order[k]][g]
            if z not in seen:
                seen[z] = len(order)
                order.append(z)
        k += 1
    return tuple(tuple(seen[G.mul[a][b]] for b in order) for a in order)


def vertex_types(max_order: int = 8) -> list[tuple]:
    """(name, G, x, y) with <x>, <y> meeting trivially and generating G, up to automorphism."""
    types = []
    for name, G in small_groups(max_order):
        cyc = {g: subgroup_generated(G, [g]).members for g in range(G.order)}
        found = set()
        for x, y in product(range(G.order), repeat=2):
            if G.identity in (x, y) or set(cyc[x]) & set(cyc[y]) != {G.identity}:
                continue
            if len(subgroup_generated(G, [x, y])) != G.order:
                continue
            sig = _pair_signature(G, x, y)
            if sig not in found:
                found.add(sig)
                types.append((name, G, x, y))
    return types


def _powers(G: FiniteGroup, g: int) -> tuple:
    out = [G.identity]
    while True:
        nxt = G.mul[out[-1]][g]
        if nxt == G.identity:
            return tuple(out)
        out.append(nxt)


def cyclic_edge_triangles(max_order: int = 8) -> Iterator[tuple[tuple, GroupTriangle]]:
    """Every minimal fillable triangle built from vertex types, smallest total order first."""
    types = vertex_types(max_order)

    def with_orders(p, q):
        return [t for t in types if t[1].element_order(t[2]) == p and t[1].element_order(t[3]) == q]

    orders = sorted({t[1].element_order(g) for t in types for g in t[2:]})
    combos = []
    for m12, m13, m23 in product(orders, repeat=3):
        for v1 in with_orders(m12, m13):
            for v2 in with_orders(m12, m23):
                for v3 in with_orders(m13, m23):
                    total = v1[1].order + v2[1].order + v3[1].order
                    combos.append((total, (m12, m13, m23), v1, v2, v3))
    combos.sort(key=lambda c: (c[0], c[1], c[2][0], c[3][0], c[4][0], c[2][2:], c[3][2:], c[4][2:]))
    for total, (m12, m13, m23), v1, v2, v3 in combos:
        edges = {
            (0, 1): (cyclic_group(m12), _powers(v1[1], v1[2]), _powers(v2[1], v2[2])),
            (0, 2): (cyclic_group(m13), _powers(v1[1], v1[3]), _powers(v3[1], v3[2])),
            (1, 2): (cyclic_group(m23), _powers(v2[1], v2[3]), _powers(v3[1], v3[3])),
        }
        t = build_triangle([v1[1], v2[1], v3[1]], edges)
        yield (v1[0], v2[0], v3[0], (m12, m13, m23)), t


def find_collapsing_triangles(max_order: int = 8, max_cosets: int = 3000, limit: int = 1):
    """Triangles whose enumerated amalgam identifies two elements of a vertex."""
    hits = []
    for desc, t in cyclic_edge_triangles(max_order):
        try:
            table, maps = _enumerate_family(t, max_cosets)
        except Overflow:
            continue
        w = _collapse_witness(t, maps)
        if w is not None:
            hits.append((desc, t, table.order, w))
            if len(hits) >= limit:
                break
    return hits
