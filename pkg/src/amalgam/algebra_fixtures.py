"""Ready-made triangles of matrix algebras: the biunitary triangle, the tensor triangle and a degenerate one."""

from __future__ import annotations

from .algebras import (
    StarAlgebra,
    StarMorphism,
    direct_sum,
    matrix_algebra,
    matrix_to_vec,
    scalars,
    tensor,
)
from .linalg import Vec
from .relations import EDGES, AlgebraTriangle
from .scalars import ONE

__all__ = [
    "U_MATRIX",
    "V_MATRIX",
    "BIUNITARY_ORDER",
    "biunitary_triangle",
    "tensor_triangle",
    "diagonal_triangle",
    "slot_embedding",
    "conjugated_embedding",
    "tensor_reference",
    "klein_in_dihedral_family",
]

U_MATRIX = ((1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0), (0, 1, 0, 0))
V_MATRIX = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0))

# edge 12 carries the u letters, edge 23 the v letters, edge 13 the untwisted ones
BIUNITARY_ORDER = ((0, 1), (1, 2), (0, 2))


def slot_embedding(B: StarAlgebra, A: StarAlgebra, slot: str) -> StarMorphism:
    """M_2 into M_2 (x) M_2 as a (x) 1 (slot "first") or 1 (x) a (slot "second")."""
    n, k = A.tensor_dims
    m = int(round(B.dim ** 0.5))
    N = n * k
    images = []
    for i in range(m):
        for j in range(m):
            if slot == "first":
                img = {(i * k + c) * N + (j * k + c): ONE for c in range(k)}
            else:
                img = {(c * k + i) * N + (c * k + j): ONE for c in range(n)}
            images.append(img)
    return StarMorphism(B, A, images)


def conjugated_embedding(f: StarMorphism, w: Vec) -> StarMorphism:
    A = f.codomain
    ws = A.star(w)
    return StarMorphism(f.domain, A, [A.product(w, x, ws) for x in f.images])


def _unit_map(C: StarAlgebra, B: StarAlgebra) -> StarMorphism:
    return StarMorphism(C, B, [dict(B.unit)])


def biunitary_triangle(u=U_MATRIX, v=V_MATRIX) -> AlgebraTriangle:
    """Vertices M_2 (x) M_2; edge 12 = u(M_2 (x) 1)u, edge 23 = v(M_2 (x) 1)v, edge 13 = 1 (x) M_2."""
    V = [matrix_algebra(4, (2, 2)) for _ in range(3)]
    uu, vv = matrix_to_vec(u), matrix_to_vec(v)
    B12, B13, B23 = matrix_algebra(2), matrix_algebra(2), matrix_algebra(2)
    edges = {
        (0, 1): (
            B12,
            conjugated_embedding(slot_embedding(B12, V[0], "first"), uu),
            conjugated_embedding(slot_embedding(B12, V[1], "first"), uu),
        ),
        (0, 2): (B13, slot_embedding(B13, V[0], "second"), slot_embedding(B13, V[2], "second")),
        (1, 2): (
            B23,
            conjugated_embedding(slot_embedding(B23, V[1], "first"), vv),
            conjugated_embedding(slot_embedding(B23, V[2], "first"), vv),
        ),
    }
    C = scalars()
    core_maps = {k: _unit_map(C, edges[k][0]) for k in EDGES}
    return AlgebraTriangle(V, edges, C, core_maps, names={(0, 1): "u", (1, 2): "v", (0, 2): "0"})


def tensor_triangle() -> AlgebraTriangle:
    """Vertex i is the tensor product of the two factors other than i; edge ij is the remaining factor.

    Vertex 1 = A2 (x) A3, vertex 2 = A1 (x) A3, vertex 3 = A1 (x) A2, all factors M_2.
    """
    V = [matrix_algebra(4, (2, 2)) for _ in range(3)]
    A1, A2, A3 = matrix_algebra(2), matrix_algebra(2), matrix_algebra(2)
    edges = {
        (0, 1): (A3, slot_embedding(A3, V[0], "second"), slot_embedding(A3, V[1], "second")),
        (0, 2): (A2, slot_embedding(A2, V[0], "first"), slot_embedding(A2, V[2], "second")),
        (1, 2): (A1, slot_embedding(A1, V[1], "first"), slot_embedding(A1, V[2], "first")),
    }
    C = scalars()
    core_maps = {k: _unit_map(C, edges[k][0]) for k in EDGES}
    return AlgebraTriangle(V, edges, C, core_maps, names={(0, 1): "A3", (0, 2): "A2", (1, 2): "A1"})


def tensor_reference() -> StarAlgebra:
    """A3 (x) A2 (x) A1, the order in which the default family order lists the letters."""
    return tensor(tensor(matrix_algebra(2), matrix_algebra(2)), matrix_algebra(2))


def diagonal_triangle() -> AlgebraTriangle:
    """Vertices M_2, every edge the diagonal C + C: the edge products cannot span a vertex."""
    V = [matrix_algebra(2) for _ in range(3)]
    edges = {}
    for a, b in EDGES:
        D = direct_sum(scalars(), scalars())
        edges[(a, b)] = (
            D,
            StarMorphism(D, V[a], [{0: ONE}, {3: ONE}]),
            StarMorphism(D, V[b], [{0: ONE}, {3: ONE}]),
        )
    C = scalars()
    core_maps = {k: _unit_map(C, edges[k][0]) for k in EDGES}
    return AlgebraTriangle(V, edges, C, core_maps)


def klein_in_dihedral_family(group_triangle=None):
    """Factors C[D4] over the Klein four subgroups C[Z2 x Z2], amalgam B = C[Z2^3].

    Returns (phis, psis, B): phi_i: C[D4] -> C[G_i] keeps the part on the
    Klein subgroup, psi_i: C[Z2^3] -> C[G_i] keeps the part on the image of
    vertex i in the enumerated amalgam of the Z2^3 group triangle.
    """
    from .algebras import group_star_algebra
    from .fixtures import z2_cubed_triangle
    from .fock import group_expectation
    from .groups import GroupMorphism, dihedral_group, subgroup_generated
    from .triangles import realize_triangle

    t = group_triangle if group_triangle is not None else z2_cubed_triangle()
    rep = realize_triangle(t)
    if rep.group is None:
        raise ValueError("the group triangle has no finite realization")
    G = rep.group
    B = group_star_algebra(G)
    D4, _ = dihedral_group(4)
    r = next(g for g in range(D4.order) if D4.element_order(g) == 4)
    r2 = D4.mul[r][r]
    s = next(g for g in range(D4.order) if D4.element_order(g) == 2 and g != r2)
    phis, psis = [], []
    for i, Gi in enumerate(t.vertices):
        Bi = group_star_algebra(Gi)
        A = group_star_algebra(D4)
        # Gi is a Klein four group: send a generating pair to (s, r^2)
        gens = [g for g in range(Gi.order) if g != Gi.identity]
        a, b = gens[0], gens[1]
        images = {}
        for x in range(Gi.order):
            for ea in (0, 1):
                for eb in (0, 1):
                    y = Gi.identity
                    z = D4.identity
                    if ea:
                        y, z = Gi.mul[y][a], D4.mul[z][s]
                    if eb:
                        y, z = Gi.mul[y][b], D4.mul[z][r2]
                    images[y] = z
        f = GroupMorphism(Gi, D4, tuple(images[x] for x in range(Gi.order)))
        assert len(subgroup_generated(D4, [s, r2])) == 4
        phis.append(group_expectation(f, A, Bi))
        psis.append(group_expectation(rep.embeddings[i], B, Bi))
    return phis, psis, B
