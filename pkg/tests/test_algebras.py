from itertools import product

import pytest

from amalgam.algebra_fixtures import U_MATRIX, V_MATRIX
from amalgam.algebras import (
    NotAssociativeAlgebra,
    StarAlgebra,
    SubalgebraSpan,
    biunitary_check,
    commuting_square_check,
    conjugate_expectation,
    direct_sum,
    group_star_algebra,
    matrix_algebra,
    matrix_to_vec,
    nondegeneracy_check,
    permutation_biunitaries,
    span_closure,
    tensor,
    trace_expectation,
    twisted_slice_map,
)
from amalgam.groups import symmetric_group
from amalgam.linalg import vaxpy
from amalgam.scalars import ONE, GaussQ

A = matrix_algebra(4, (2, 2))
U, V = matrix_to_vec(U_MATRIX), matrix_to_vec(V_MATRIX)


def kron(a, b):
    """a (x) b for 2x2 integer matrices, as a vector of A."""
    return matrix_to_vec([[a[i // 2][j // 2] * b[i % 2][j % 2] for j in range(4)] for i in range(4)])


I2 = ((1, 0), (0, 1))


def e(i, j):
    return tuple(tuple(1 if (r, c) == (i, j) else 0 for c in range(2)) for r in range(2))


def test_constructions_are_star_algebras():
    for B in (matrix_algebra(3), tensor(matrix_algebra(2), matrix_algebra(2)), direct_sum(matrix_algebra(2), matrix_algebra(1))):
        B.check()
    G = group_star_algebra(symmetric_group(3)[0])
    G.check()
    assert not G.is_commutative()
    assert tensor(matrix_algebra(2), matrix_algebra(2)).dim == A.dim


def test_non_associative_table_is_rejected():
    # unit 1, a*a = b, b*b = a, a*b = a, b*a = b: (a*a)*a = b but a*(a*a) = a
    table = {0: {k: {k: ONE} for k in range(3)}}
    table[1] = {0: {1: ONE}, 1: {2: ONE}, 2: {1: ONE}}
    table[2] = {0: {2: ONE}, 1: {2: ONE}, 2: {1: ONE}}
    with pytest.raises(NotAssociativeAlgebra):
        StarAlgebra(["1", "a", "b"], table, {0: ONE}, [{k: ONE} for k in range(3)])


def test_biunitaries():
    assert biunitary_check(A, U)["ok"] and biunitary_check(A, V)["ok"]
    found = permutation_biunitaries(2, 2)
    assert (0, 3, 2, 1) in found and (0, 1, 3, 2) in found
    # the enumeration gives 12 (identity included), see the ledger
    assert len(found) == 12


def test_nondegenerate_squares():
    D12 = SubalgebraSpan(A, [A.product(U, kron(e(i, j), I2), U) for i, j in product(range(2), repeat=2)])
    D23 = SubalgebraSpan(A, [A.product(V, kron(e(i, j), I2), V) for i, j in product(range(2), repeat=2)])
    D13 = SubalgebraSpan(A, [kron(I2, e(i, j)) for i, j in product(range(2), repeat=2)])
    assert nondegeneracy_check(A, D12, D13)["ok"]
    assert nondegeneracy_check(A, D23, D13)["ok"]
    assert nondegeneracy_check(A, D12, D23)["ok"]
    assert D12.intersect(D23).dim == 1


def test_expectation_properties():
    E0 = trace_expectation(A, "first")
    Eu = conjugate_expectation(trace_expectation(A, "second"), U)
    for E in (E0, Eu):
        assert E.is_idempotent()
        for i in range(A.dim):
            x = {i: ONE}
            assert E(A.star(x)) == A.star(E(x))
            for b in E.target.basis:
                assert E(A.mul(b, x)) == A.mul(b, E(x))
                assert E(A.mul(x, b)) == A.mul(E(x), b)


def test_commuting_squares():
    E0 = trace_expectation(A, "first")
    Eu = conjugate_expectation(trace_expectation(A, "second"), U)
    Ev = conjugate_expectation(trace_expectation(A, "second"), V)
    assert commuting_square_check(Eu, E0).ok
    assert commuting_square_check(Ev, E0).ok
    # genuine expectations onto D12 and D23 also commute (intersection C)
    r = commuting_square_check(Eu, Ev)
    assert r.ok and r.intersection_dim == 1


def test_literal_formula():
    lit = twisted_slice_map(trace_expectation(A, "second"), U)
    assert not lit.is_idempotent()
    r = commuting_square_check(lit, conjugate_expectation(trace_expectation(A, "second"), V))
    assert not r.ok and r.witness["not_idempotent"] == "E1"
    a = ((GaussQ(2), GaussQ(3)), (GaussQ(5), GaussQ(7)))
    x = A.product(V, kron(a, I2), V)
    # a11 e_u(1,1) + a22 e_u(2,2) with a11 = 2, a22 = 7
    want = vaxpy(vaxpy({}, GaussQ(2), A.product(U, kron(e(0, 0), I2), U)), GaussQ(7), A.product(U, kron(e(1, 1), I2), U))
    assert lit(x) == want


def test_span_closure():
    S = span_closure(A, [kron(e(0, 1), I2)])
    # the unital *-closure of e(1,2) (x) 1 is M2 (x) 1
    assert S.dim == 4
