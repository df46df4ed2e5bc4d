from itertools import product

import pytest

from amalgam.algebra_fixtures import (
    BIUNITARY_ORDER,
    diagonal_triangle,
    tensor_reference,
    tensor_triangle,
)
from amalgam.algebras import LinearMap, StarMorphism, matrix_algebra, scalars, trace_expectation
from amalgam.fixtures import z2_cubed_triangle
from amalgam.linalg import vadd, vscale
from amalgam.relations import (
    EDGES,
    AlgebraTriangle,
    NotInjective,
    NotSimple,
    SpanDeficient,
    _corner_dim,
    block_sizes,
    build_relation_algebra,
    center,
    check_cstar_triangle_hypotheses,
    discover_rules,
    embed_vertices,
    group_algebra_bridge,
    matrix_units_discovery,
    quotient_algebra,
    rule_is_sound,
)
from amalgam.scalars import ONE, GaussQ
from amalgam.triangles import realize_triangle

U_FAM, V_FAM, ZERO_FAM = (0, 1), (1, 2), (0, 2)


def unit(R, fam, i, j):
    return R.letter(fam, 2 * i + j)


def test_biunitary_rules_sound(biunitary):
    t, rules, R, A = biunitary
    assert len(rules) == 48
    assert all(rule_is_sound(t, r) for r in rules.values())


def test_biunitary_confluent_and_associative(biunitary):
    t, rules, R, A = biunitary
    assert R.check_confluence() > 0
    A.check_associative()
    A.check()
    assert A.dim == 64


def test_biunitary_embeddings(biunitary):
    t, rules, R, A = biunitary
    _, reports = embed_vertices(t, R, A)
    assert [(r["rank"], r["diagrams"]) for r in reports] == [(16, True)] * 3


def test_biunitary_structure(biunitary):
    """The flips commute and the algebra splits as four copies of M4."""
    t, rules, R, A = biunitary
    assert len(center(A)) == 4
    assert block_sizes(A) == [4, 4, 4, 4]
    flips = [vadd(unit(R, f, 0, 1), unit(R, f, 1, 0)) for f in (U_FAM, V_FAM, ZERO_FAM)]
    for x, y in product(flips, repeat=2):
        assert A.mul(x, y) == A.mul(y, x)
    for i, k, r in product(range(2), repeat=3):
        p = A.product(unit(R, U_FAM, i, i), unit(R, V_FAM, k, k), unit(R, ZERO_FAM, r, r))
        assert A.mul(p, p) == p and p
        assert _corner_dim(A, p, p) == 2
    with pytest.raises(NotSimple) as info:
        matrix_units_discovery(A)
    assert info.value.center_dim == 4


def test_biunitary_extra_relations_collapse(biunitary):
    """Forcing minimality of the p(i,k,r) kills vertex 2."""
    t, rules, R, A = biunitary
    kill = [A.product(unit(R, U_FAM, i, i), unit(R, V_FAM, k, k)) for i, k in product(range(2), repeat=2)]
    Q, q = quotient_algebra(A, kill)
    assert Q.dim < A.dim
    with pytest.raises(NotInjective):
        embed_vertices(t, R, A, quotient=q)


def test_commutation_table_relations_hold_in_the_amalgam(biunitary):
    t, rules, R, A = biunitary
    s = lambda i: 1 - i
    for X, Y in ((U_FAM, ZERO_FAM), (V_FAM, U_FAM), (ZERO_FAM, V_FAM)):
        for i, j, k, l in product(range(2), repeat=4):
            lhs = A.mul(unit(R, X, i, j), unit(R, Y, k, l))
            if k != l:
                assert lhs == A.mul(unit(R, Y, k, l), unit(R, X, s(i), s(j)))
            else:
                assert lhs == A.mul(unit(R, Y, k, l), unit(R, X, i, j))
    # e_u(i,i) commutes with all of D23, etc.
    for X, Y in ((U_FAM, V_FAM), (V_FAM, ZERO_FAM), (ZERO_FAM, U_FAM)):
        for i, k, l in product(range(2), repeat=3):
            a, b = unit(R, X, i, i), unit(R, Y, k, l)
            assert A.mul(a, b) == A.mul(b, a)


def test_tensor_triangle_is_m8():
    t = tensor_triangle()
    R, A = build_relation_algebra(t, discover_rules(t))
    assert A.structure_equal(tensor_reference())
    _, reports = embed_vertices(t, R, A)
    assert all(r["rank"] == 16 for r in reports)
    hints = [A.product(*c) for c in product(*([R.letter(f, 0), R.letter(f, 3)] for f in R.families))]
    mu = matrix_units_discovery(A, hints=hints)
    assert mu.n == 8 and mu.star_compatible


def test_span_deficient():
    with pytest.raises(SpanDeficient) as info:
        discover_rules(diagonal_triangle())
    assert info.value.vertex == 0


def test_group_bridge():
    t = z2_cubed_triangle()
    rep = realize_triangle(t)
    out = group_algebra_bridge(t, rep.group, rep.embeddings)
    assert out["dim"] == 8 and out["relation_dim"] == 8
    assert out["generated"] and out["diagrams"] and out["bijective"] and out["structure_equal"]


# C*-triangle hypotheses ------------------------------------------------------------------


def scalar_state(B, weights):
    """x -> (sum weights[i] x_i) 1, a map of B onto its scalars."""
    return LinearMap(B, [vscale(weights.get(i, GaussQ(0)), B.unit) for i in range(B.dim)])


def test_cstar_diagrams_commute_on_tensor_slices():
    t = tensor_triangle()
    B23 = t.edges[(1, 2)][0]
    half = GaussQ(1) / 2
    tau = scalar_state(B23, {0: half, 3: half})
    E12 = trace_expectation(t.vertices[1], "first")
    E13 = trace_expectation(t.vertices[2], "first")
    out = check_cstar_triangle_hypotheses(t, {"E12": E12, "E13": E13, "E123": tau})
    assert out["condition_i"]["diagram"] == "COMMUTES"
    # a state that is not the trace breaks the square, with a witness
    bad = scalar_state(B23, {0: ONE})
    out = check_cstar_triangle_hypotheses(t, {"E12": E12, "E13": E13, "E123": bad})
    assert out["condition_i"]["diagram"] == "FAILS"
    assert out["condition_i"]["witness"]["vertex"] == 2


def test_cstar_degenerate_premise():
    M = [matrix_algebra(2) for _ in range(3)]
    C = scalars()
    B12 = matrix_algebra(2)
    ident = lambda B, V: StarMorphism(B, V, [{i: ONE} for i in range(4)])
    unit_map = lambda V: StarMorphism(C, V, [dict(V.unit)])
    C13, C23 = scalars(), scalars()
    edges = {
        (0, 1): (B12, ident(B12, M[0]), ident(B12, M[1])),
        (0, 2): (C13, StarMorphism(C13, M[0], [dict(M[0].unit)]), StarMorphism(C13, M[2], [dict(M[2].unit)])),
        (1, 2): (C23, StarMorphism(C23, M[1], [dict(M[1].unit)]), StarMorphism(C23, M[2], [dict(M[2].unit)])),
    }
    core_maps = {k: unit_map(edges[k][0]) for k in EDGES}
    t = AlgebraTriangle(M, edges, C, core_maps)
    t.validate()
    out = check_cstar_triangle_hypotheses(t, {})
    assert out["condition_i"]["premise"] == "SATISFIED"
    assert out["condition_i"]["diagram"] == "NOT_PROVIDED"
    assert check_cstar_triangle_hypotheses(tensor_triangle(), {})["condition_i"]["premise"] == "PREMISE_NOT_DECIDABLE"
