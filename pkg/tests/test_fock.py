from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amalgam.algebras import group_star_algebra, matrix_algebra, trace_expectation
from amalgam.engine import Edge, TwoFactor, normal_form
from amalgam.fock import (
    DepthExceeded,
    Expectation,
    FactorIndexBad,
    GNSFactor,
    decomposition_audit,
    factor_expectation,
    fock_space,
    free_decomposition,
    free_expectation,
    generalized_reduced_amalgam,
    gns,
    gns_faithful,
    lambda_rep,
    summand_count,
    trace_state,
)
from amalgam.groups import GroupMorphism, cyclic_group, trivial_group
from amalgam.scalars import ONE, GaussQ

small = st.builds(GaussQ, st.integers(-3, 3), st.integers(-2, 2))


def elements(dim):
    return st.lists(small, min_size=dim, max_size=dim).map(lambda cs: {k: c for k, c in enumerate(cs) if c})


def interior(F, coeffs):
    """Combination of basis vectors whose shapes leave room for one more letter."""
    v: dict = {}
    basis = [x for s, x in F.basis() if len(s) < F.depth]
    for c, x in zip(coeffs, basis):
        for s, comp in x.items():
            tgt = v.setdefault(s, {})
            for k, d in comp.items():
                tgt[k] = tgt.get(k, GaussQ(0)) + c * d
    return {s: {k: c for k, c in comp.items() if c} for s, comp in v.items()}


def same(F, v, w):
    return F.is_null(F.sub(v, w))


# free product of two copies of C[Z2] with the trace


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 1), elements(2), elements(2), st.lists(small, min_size=12, max_size=12))
def test_lambda_multiplicative_on_interior(z2_free, i, a, b, coeffs):
    F, states = z2_free
    A = states[i].algebra
    v = interior(F, coeffs)
    assert same(F, F.lam(i, A.mul(a, b), v), F.lam(i, a, F.lam(i, b, v)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 1), elements(2), st.lists(small, min_size=12, max_size=12), st.lists(small, min_size=12, max_size=12))
def test_lambda_adjoint_on_interior(z2_free, i, a, c1, c2):
    F, states = z2_free
    A = states[i].algebra
    v, w = interior(F, c1), interior(F, c2)
    lhs = F.base.tau(F.inner(F.lam(i, a, v), w))
    rhs = F.base.tau(F.inner(v, F.lam(i, A.star(a), w)))
    assert lhs == rhs


def test_z2_free_dimensions(z2_free):
    F, _ = z2_free
    # one line per alternating shape, two shapes of each length
    assert F.dim == 9
    assert all(d == 1 for d in F.shape_dims().values())
    assert F.gram_psd()


def test_alternating_centered_words_vanish(z2_free):
    F, states = z2_free
    g = {1: ONE}
    for n in range(1, F.depth + 1):
        for start in (0, 1):
            word = [((start + k) % 2, g) for k in range(n)]
            assert free_expectation(F, word) == {}


def test_group_words_match_normal_forms(z2_free):
    F, _ = z2_free
    G = cyclic_group(2)
    C = trivial_group()
    inc = GroupMorphism(C, G, (G.identity,))
    two = TwoFactor(G, G, Edge(C, inc, inc))
    checked = 0
    for n in range(1, F.depth + 1):
        for w in product([(0, 1), (1, 1)], repeat=n):
            nf = normal_form(two, list(w))
            expect = {0: ONE} if not nf.reps and nf.core == C.identity else {}
            got = free_expectation(F, [(i, {g: ONE}) for i, g in w])
            assert got == expect
            checked += 1
    assert checked == 30


def test_restriction_to_factor_is_phi(z2_free):
    F, states = z2_free
    for i, phi in enumerate(states):
        for k in range(phi.algebra.dim):
            assert free_expectation(F, [(i, {k: ONE})]) == phi({k: ONE})


def test_depth_exceeded(z2_free):
    F, _ = z2_free
    with pytest.raises(DepthExceeded):
        free_expectation(F, [(0, {1: ONE})] * 5)
    with pytest.raises(FactorIndexBad):
        F.lam(2, {0: ONE}, F.xi())


def test_lambda_rep_unitary_letters(z2_free):
    F, _ = z2_free
    cols, touched = lambda_rep(F, 0, {1: ONE})
    assert len(cols) == F.dim
    # the letter pushes top-length words off the truncation
    assert touched


# factor expectation


def test_factor_expectation_is_identity_on_its_factor(z2_free):
    F, states = z2_free
    for k in range(2):
        assert factor_expectation(F, 0, [(0, {k: ONE})]) == {k: ONE}


def test_factor_expectation_kills_centered_alternating_words(z2_free):
    F, _ = z2_free
    g = {1: ONE}
    assert factor_expectation(F, 0, [(1, g)]) == {}
    assert factor_expectation(F, 0, [(0, g), (1, g)]) == {}
    assert factor_expectation(F, 0, [(0, g), (1, g), (0, g)]) == {}
    assert factor_expectation(F, 0, [(1, g), (1, g), (0, g)]) == g


def test_free_decomposition_reconstructs_moments(z2_free):
    F, _ = z2_free
    g = {1: ONE}
    word = [(0, g), (0, {0: ONE, 1: ONE}), (1, {0: GaussQ(2), 1: ONE})]
    b, terms = free_decomposition(F, word)
    assert b == free_expectation(F, word)
    for c, w in terms:
        assert all(x[0] != y[0] for x, y in zip(w, w[1:]))


# modules and faithfulness


def test_gns_of_trace_on_matrices_is_faithful():
    A = matrix_algebra(2)
    phi = trace_state(A)
    assert gns(phi).dim == 4
    assert gns_faithful(phi)["faithful"]


def test_conditional_expectation_module():
    A = matrix_algebra(4, (2, 2))
    E = trace_expectation(A, "second")
    assert gns_faithful(E)["faithful"]


def test_free_product_over_matrix_base_is_psd():
    A = matrix_algebra(2)
    phi = trace_state(A)
    F = fock_space([GNSFactor(phi), GNSFactor(phi)], phi.base, 3)
    assert F.gram_psd()
    # centered part of M2 has dimension 3
    assert F.shape_dims()[(0,)] == 3
    assert F.shape_dims()[(0, 1)] == 9


# two-level construction on the Klein four inside the dihedral group


def test_klein_audit_matches_count(klein_family):
    phis, psis, B, R = klein_family
    audit = decomposition_audit(R, phis, psis)
    assert audit["ok"]
    assert audit["module_dim"] == summand_count(phis, psis, 2)
    assert all(R.injective)
    assert R.fock.gram_psd()


def test_klein_restriction_and_centered_words(klein_family):
    phis, psis, B, R = klein_family
    F = R.fock
    for i, phi in enumerate(phis):
        for k in range(phi.algebra.dim):
            got = F.apply_word([(i, (0, {k: ONE}))]).get((), {})
            assert got == psis[i].iota(phi({k: ONE}))
    for i, j in ((0, 1), (1, 2), (2, 0)):
        ai = phis[i].kernel_basis()[0]
        aj = phis[j].kernel_basis()[0]
        assert R.expectation([(i, (0, ai)), (j, (0, aj))]) == {}


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2), st.data())
def test_composite_lambda_multiplicative_on_xi(klein_family, i, data):
    phis, psis, B, R = klein_family
    F = R.fock
    A = phis[i].algebra
    a = data.draw(elements(A.dim))
    b = data.draw(elements(A.dim))
    x = data.draw(elements(B.dim))
    y = data.draw(elements(B.dim))
    v = F.xi(x)
    assert same(F, F.lam(i, (0, A.mul(a, b)), v), F.lam(i, (0, a), F.lam(i, (0, b), v)))
    assert same(F, F.lam(i, (1, B.mul(x, y)), v), F.lam(i, (1, x), F.lam(i, (1, y), v)))


def test_subfamily_embeds_isometrically(klein_family):
    phis, psis, B, R = klein_family
    S = generalized_reduced_amalgam(phis[:2], psis[:2], 2)
    big, sub = R.fock, S.fock
    vecs = [v for _, v in sub.basis()]
    for v in vecs:
        for w in vecs:
            assert sub.inner(v, w) == big.inner(v, w)
    for i in range(2):
        a = (0, phis[i].kernel_basis()[0])
        for v in vecs[:12]:
            if max((len(s) for s in v), default=0) < sub.depth:
                assert same(big, sub.lam(i, a, v), big.lam(i, a, v))


def test_trace_state_is_an_expectation():
    G = cyclic_group(2)
    A = group_star_algebra(G)
    phi = trace_state(A)
    assert isinstance(phi, Expectation)
    phi.check()
