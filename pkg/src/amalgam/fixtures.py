"""Small ready-made triangles used by the tests, the CLI data files and the docs."""

from __future__ import annotations

from .engine import Edge
from .groups import (
    FiniteGroup,
    GroupMorphism,
    cyclic_group,
    direct_product,
    symmetric_group,
    trivial_group,
)
from .triangles import EDGE_KEYS, GroupTriangle

__all__ = ["build_triangle", "z2_cubed_triangle", "s3_triangle", "collapsing_triangle", "padded", "element_of"]


def element_of(G: FiniteGroup, label: str) -> int:
    return G.labels.index(label)


def build_triangle(vertices, edges, core=None, core_maps=None) -> GroupTriangle:
    """edges: key -> (edge group, images in vertex a, images in vertex b).

    With no core given, the core is trivial.
    """
    vertices = tuple(vertices)
    E = {}
    for key in EDGE_KEYS:
        H, a, b = edges[key]
        i, j = key
        E[key] = Edge(H, GroupMorphism(H, vertices[i], tuple(a)), GroupMorphism(H, vertices[j], tuple(b)))
    if core is None:
        core = trivial_group()
        core_maps = {k: (E[k].group.identity,) for k in EDGE_KEYS}
    cm = {k: GroupMorphism(core, E[k].group, tuple(core_maps[k])) for k in EDGE_KEYS}
    t = GroupTriangle(vertices, E, core, cm)
    t.validate()
    return t


def z2_cubed_triangle() -> GroupTriangle:
    """Vertices Z2 x Z2, each edge one of the factors, trivial core."""
    Z2 = cyclic_group(2)
    V = [direct_product(Z2, Z2) for _ in range(3)]
    first, second = (0, 2), (0, 1)
    return build_triangle(
        V,
        {
            (0, 1): (Z2, first, first),
            (0, 2): (Z2, second, first),
            (1, 2): (Z2, second, second),
        },
    )


def s3_triangle() -> GroupTriangle:
    """Vertices S3, edges generated by two different transpositions at each vertex."""
    Z2 = cyclic_group(2)
    V = [symmetric_group(3)[0] for _ in range(3)]
    t12, t13 = element_of(V[0], "(12)"), element_of(V[0], "(13)")
    e = V[0].identity
    return build_triangle(
        V,
        {
            (0, 1): (Z2, (e, t12), (e, t12)),
            (0, 2): (Z2, (e, t13), (e, t12)),
            (1, 2): (Z2, (e, t13), (e, t13)),
        },
    )


def collapsing_triangle() -> GroupTriangle:
    """S3, S3 and Z6 with edges of orders 2, 2, 3: the amalgam has order 6 and (23) = (12) in vertex 2.

    Vertex 1 is generated by (23) and (12), vertex 2 by (23) and (123), and
    vertex 3 is Z6 = <3> x <2>; the edge maps force a collapse.
    """
    S = symmetric_group(3)[0]
    V = [S, symmetric_group(3)[0], cyclic_group(6)]
    e = S.identity
    t23, t12, c = element_of(S, "(23)"), element_of(S, "(12)"), element_of(S, "(123)")
    c2 = S.mul[c][c]
    Z2, Z3 = cyclic_group(2), cyclic_group(3)
    return build_triangle(
        V,
        {
            (0, 1): (Z2, (e, t23), (e, t23)),
            (0, 2): (Z2, (e, t12), (0, 3)),
            (1, 2): (Z3, (e, c, c2), (0, 2, 4)),
        },
    )


def padded(t: GroupTriangle, extra: FiniteGroup) -> GroupTriangle:
    """Same triangle with every vertex replaced by G x extra (edges land in G x 1)."""
    m = extra.order
    V = [direct_product(G, extra) for G in t.vertices]
    shift = extra.identity
    edges = {}
    for key in EDGE_KEYS:
        e = t.edges[key]
        edges[key] = (
            e.group,
            tuple(g * m + shift for g in e.into_a.map),
            tuple(g * m + shift for g in e.into_b.map),
        )
    return build_triangle(V, edges, t.core, {k: f.map for k, f in t.core_maps.items()})
