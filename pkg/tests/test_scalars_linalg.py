from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from amalgam.linalg import EchelonBasis, ldl_psd, nullspace, rank, solve, span_intersection
from amalgam.scalars import I, ONE, ZERO, GaussQ, format_scalar, parse_scalar

fractions = st.builds(Fraction, st.integers(-60, 60), st.integers(1, 12))
gauss = st.builds(GaussQ, fractions, fractions)


@given(gauss, gauss, gauss)
def test_field_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert (a * b).conj() == a.conj() * b.conj()
    if b:
        assert (a / b) * b == a


@given(gauss)
def test_format_roundtrip(z):
    assert parse_scalar(format_scalar(z)) == z


def test_parse_forms():
    assert parse_scalar("-1/2") == GaussQ(Fraction(-1, 2))
    assert parse_scalar("i") == I
    assert parse_scalar("1/2-3/4*i") == GaussQ(Fraction(1, 2), Fraction(-3, 4))
    assert format_scalar(GaussQ(Fraction(2, 4))) == "1/2"
    assert I * I == -ONE


def test_floats_rejected():
    with pytest.raises(TypeError):
        parse_scalar(0.5)


def test_nullspace_and_solve():
    rows = [{0: ONE, 1: ONE}, {1: ONE, 2: ONE}]
    ns = nullspace(rows, 3)
    assert len(ns) == 1
    v = ns[0]
    for r in rows:
        assert sum((c * v.get(k, ZERO) for k, c in r.items()), ZERO) == ZERO
    x = solve(rows, [GaussQ(2), GaussQ(3)], 3)
    assert x is not None
    assert solve([{0: ONE}, {0: ONE}], [ONE, ZERO], 1) is None
    assert rank([{0: ONE}, {0: GaussQ(2)}, {1: I}]) == 2


def test_echelon_coordinates():
    eb = EchelonBasis(track=True)
    a, b = {0: ONE, 1: ONE}, {1: ONE}
    eb.add(a)
    eb.add(b)
    assert not eb.add({0: GaussQ(3), 1: GaussQ(5)})
    c = eb.coordinates({0: GaussQ(3), 1: GaussQ(5)})
    assert c is not None
    assert eb.coordinates({2: ONE}) is None


def test_span_intersection():
    meet = span_intersection([{0: ONE}, {1: ONE}], [{1: ONE}, {2: ONE}])
    assert len(meet) == 1 and set(meet[0]) == {1}


def test_ldl_psd():
    assert ldl_psd([[GaussQ(2), ONE], [ONE, GaussQ(2)]])[:2] == (True, 2)
    assert ldl_psd([[ONE, ONE], [ONE, ONE]])[:2] == (True, 1)
    assert not ldl_psd([[ONE, GaussQ(2)], [GaussQ(2), ONE]])[0]
    assert ldl_psd([[ONE, I], [-I, ONE]])[:2] == (True, 1)
