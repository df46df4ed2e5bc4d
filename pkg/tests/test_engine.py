from hypothesis import given, settings
from hypothesis import strategies as st

from amalgam.engine import (
    AmalgamWord,
    Edge,
    TwoFactor,
    count_normal_forms,
    enumeration_verdict,
    format_presentation,
    iter_normal_forms,
    normal_form,
    parse_presentation,
    reduce_two_factor,
)
from amalgam.groups import GroupMorphism, cyclic_group, symmetric_group, trivial_group

S3, _ = symmetric_group(3)
Z2 = cyclic_group(2)
T = S3.labels.index("(12)")
# S3 *_Z2 S3 glued along <(12)>, and Z2 * Z2 (infinite dihedral)
AMALGAM = TwoFactor(S3, S3, Edge(Z2, GroupMorphism(Z2, S3, (0, T)), GroupMorphism(Z2, S3, (0, T))))
C = trivial_group()
FREE = TwoFactor(Z2, Z2, Edge(C, GroupMorphism(C, Z2, (0,)), GroupMorphism(C, Z2, (0,))))

letters = st.tuples(st.integers(0, 1), st.integers(0, 5))
words = st.lists(letters, max_size=12)


def inverse(w):
    return [(v, S3.inv[g]) for v, g in reversed(w)]


def fold(w):
    """The homomorphism S3 *_Z2 S3 -> S3 that is the identity on both factors."""
    return S3.product(g for _, g in w)


@settings(max_examples=150, deadline=None)
@given(words)
def test_normal_form_idempotent(w):
    r = reduce_two_factor(AMALGAM, w)
    assert reduce_two_factor(AMALGAM, r) == r
    assert normal_form(AMALGAM, r) == normal_form(AMALGAM, w)


@settings(max_examples=150, deadline=None)
@given(words, words)
def test_normal_form_congruence(w1, w2):
    nf = normal_form(AMALGAM, w1 + w2)
    r1 = list(reduce_two_factor(AMALGAM, w1))
    r2 = list(reduce_two_factor(AMALGAM, w2))
    assert normal_form(AMALGAM, r1 + w2) == nf
    assert normal_form(AMALGAM, w1 + r2) == nf
    assert normal_form(AMALGAM, w1 + inverse(w1)).reps == ()
    # invariant under a homomorphism to a finite group
    assert fold(list(reduce_two_factor(AMALGAM, w1 + w2))) == fold(w1 + w2)


def test_normal_forms_are_distinct_and_counted():
    for n in range(4):
        forms = list(iter_normal_forms(AMALGAM, n))
        assert len(forms) == count_normal_forms(AMALGAM, n)
        for nf in forms:
            assert normal_form(AMALGAM, nf.to_word(AMALGAM)) == nf
        assert len({nf.to_word(AMALGAM) for nf in forms}) == len(forms)


def test_free_product_counts():
    # Z2 * Z2: two reduced words of every positive length
    assert [count_normal_forms(FREE, n) for n in range(5)] == [1, 2, 2, 2, 2]
    assert normal_form(FREE, [(0, 1), (0, 1)]).reps == ()
    assert normal_form(FREE, AmalgamWord(((0, 1), (1, 1), (0, 1)))).length == 3


def test_enumeration_overflow_is_unknown():
    p = parse_presentation("gens: x y\nrel: x x\nrel: y y\n")
    for bound in (3, 10, 500):
        assert enumeration_verdict(p, max_cosets=bound)["verdict"] == "UNKNOWN"
    q = parse_presentation("gens: x y\nrel: x x\nrel: y y\nrel: x y x y x y\n")
    out = enumeration_verdict(q)
    assert out == {"verdict": "FINITE", "index": 6, "max_cosets": 10000, "defined": out["defined"]}
    assert parse_presentation(format_presentation(q)) == q
