import pytest
from hypothesis import given, settings, strategies as st

from branchcalc.engine import (
    Portrait,
    Verdict,
    Witness,
    act,
    compose_portraits,
    confirm_witness,
    decide_equal,
    decide_trivial,
    in_level_stabilizer,
    portrait,
    portrait_to_dot,
    reduce_word,
    rigid_support_witness,
    root_exponent,
    section_at,
    sections,
    sym_mod,
)
from branchcalc.tree import PrimeSequence, VertexPath, iter_level
from branchcalc.words import Word, commutator, conjugate, exponent_sums, multiply, parse_word

from .strategies import short_words, words

SEQ = PrimeSequence([7, 11, 13, 17])


def p(text, level=0):
    return parse_word(text, level, SEQ)


def test_sym_mod():
    assert sym_mod(6, 7) == -1
    assert sym_mod(3, 7) == 3
    assert sym_mod(-4, 7) == 3
    assert sym_mod(14, 7) == 0


def test_reduce():
    assert reduce_word(p("a^7"), SEQ).is_empty()
    assert reduce_word(p("a^5*b*b^-1*a^3"), SEQ) == p("a")
    assert reduce_word(p("a^6"), SEQ) == p("a^-1")
    assert reduce_word(p("b^7"), SEQ) == p("b^7")


def test_root_exponent():
    assert root_exponent(p("a^3*b*a^-1"), SEQ) == 2
    assert root_exponent(p("b^5"), SEQ) == 0
    assert root_exponent(p("[a,b]"), SEQ) == 0


def test_sections():
    assert sections(p("b"), SEQ) == {1: Word.gen("b", 1), 2: Word.gen("a", 1)}
    bracket = commutator(Word.gen("a", 1), Word.gen("b", 1))
    assert sections(p("[b(1),b(2)]"), SEQ) == {2: bracket}
    assert sections(p("[b(1),b(3)]"), SEQ) == {}
    assert sections(p("b(2)"), SEQ) == {2: Word.gen("b", 1), 3: Word.gen("a", 1)}


def test_sections_of_bracket():
    s = sections(p("[a,b]"), SEQ)
    assert s == {1: p("b", 1), 2: p("b^-1*a", 1), 3: p("a^-1", 1)}


def test_sections_reduced_below():
    s = sections(p("b^11"), SEQ)
    assert s == {1: p("b^11", 1)}


def test_act():
    assert act(p("a"), VertexPath((1,)), SEQ) == VertexPath((2,))
    assert act(p("b"), VertexPath((2, 1)), SEQ) == VertexPath((2, 2))
    assert act(p("a^-1"), VertexPath((1, 5)), SEQ) == VertexPath((7, 5))
    for v in iter_level(SEQ, 2):
        assert act(p("a^7"), v, SEQ) == v


def test_section_at():
    assert section_at(p("b"), VertexPath((2,)), SEQ) == p("a", 1)
    assert section_at(p("b"), VertexPath((1, 1)), SEQ) == p("b", 2)
    assert section_at(p("b"), VertexPath((3, 1)), SEQ).is_empty()
    assert section_at(p("b"), VertexPath(), SEQ) == p("b")


def test_portrait_of_b(small):
    got = portrait(Word.gen("b"), 1, small)
    assert got.root_exp == 0
    assert set(got.children) == {1, 2}
    assert got.children[1].residual == Word.gen("b", 1)
    assert got.children[2].residual == Word.gen("a", 1)
    assert got.children[2].root_exp == 1


def test_portrait_of_a(small):
    got = portrait(Word.gen("a"), 1, small)
    assert got == Portrait(0, 1, {}, None)


def test_portrait_of_b_power(small):
    got = portrait(Word.gen("b", 0, 77), 1, small)
    assert got.root_exp == 0
    assert list(got.children) == [1]
    assert got.children[1].residual == Word.gen("b", 1, 77)


def test_portrait_unknown_prime(small):
    got = portrait(Word.gen("b"), 2, small)
    leaf = got.children[1].children[1]
    assert leaf.root_exp is None
    assert leaf.to_dict()["rootExp"] is None


def test_portrait_to_dict(small):
    d = portrait(Word.gen("b"), 1, small).to_dict()
    assert d["rootExp"] == "0"
    assert list(d["children"]) == ["1", "2"]
    assert d["children"]["2"]["residual"] == "a"
    assert d["residual"] is None


def test_portrait_to_dot(small):
    dot = portrait(Word.gen("b"), 1, small)
    text = portrait_to_dot(dot)
    assert text.startswith("digraph portrait {")
    assert text.count("->") == 2
    assert text.rstrip().endswith("}")


def test_portrait_depth_validation(small):
    with pytest.raises(ValueError):
        portrait(Word.gen("b"), -1, small)


@settings(max_examples=60, deadline=None)
@given(words(), words(), st.integers(0, 3))
def test_portrait_is_multiplicative(u, v, depth):
    left = compose_portraits(portrait(u, depth, SEQ), portrait(v, depth, SEQ), depth, SEQ)
    assert left == portrait(multiply(u, v), depth, SEQ)


def test_decide_trivial_examples():
    assert decide_trivial(p("a^7"), SEQ).is_trivial
    assert decide_trivial(p("[b(1),b(3)]"), SEQ).is_trivial
    assert decide_trivial(Word.identity(), SEQ).is_trivial
    verdict = decide_trivial(p("[a,b]"), SEQ)
    assert verdict.is_nontrivial
    assert verdict.witness == Witness(VertexPath((1,)), "abelian")
    assert confirm_witness(p("[a,b]"), verdict.witness, SEQ)


def test_decide_trivial_abelian_witness():
    verdict = decide_trivial(p("b"), SEQ)
    assert verdict.witness == Witness(VertexPath(), "abelian")
    assert confirm_witness(p("b"), verdict.witness, SEQ)


def test_confirm_witness_rejects_wrong_vertices():
    assert confirm_witness(p("a"), Witness(VertexPath(), "root"), SEQ)
    assert not confirm_witness(p("b"), Witness(VertexPath(), "root"), SEQ)
    assert not confirm_witness(p("b"), Witness(VertexPath((3,)), "abelian"), SEQ)


def test_decide_trivial_budget():
    verdict = decide_trivial(p("[b(1),b(2)]"), SEQ, budget=1)
    assert verdict.verdict is Verdict.UNKNOWN
    assert "budget" in verdict.note
    with pytest.raises(ValueError):
        decide_trivial(p("a"), SEQ, budget=0)


def test_decide_trivial_exhausted(small):
    verdict = decide_trivial(parse_word("[b(1),b(2)]", 0, small), small)
    assert verdict.is_unknown
    assert "Level 2" in verdict.note


def test_root_witness():
    w = p("[a,b(2)]")
    verdict = decide_trivial(w, SEQ)
    assert verdict.is_nontrivial
    assert confirm_witness(w, verdict.witness, SEQ)


def test_decide_equal():
    assert decide_equal(p("a*b"), p("b^(a^6)*a"), SEQ).is_trivial
    assert decide_equal(p("a"), p("b"), SEQ).is_nontrivial
    w = p("[a,b]*b(3)")
    assert decide_equal(w, w, SEQ).is_trivial


def test_to_dict():
    d = decide_trivial(p("[a,b]"), SEQ).to_dict()
    assert d["verdict"] == "nontrivial"
    assert d["witness"] == {"vertex": "1", "reason": "abelian"}


def test_in_level_stabilizer():
    assert in_level_stabilizer(p("b"), 1, SEQ)
    assert not in_level_stabilizer(p("a"), 1, SEQ)
    assert in_level_stabilizer(p("[a,b]"), 1, SEQ)
    assert not in_level_stabilizer(p("[a,b]"), 2, SEQ)
    assert in_level_stabilizer(p("b^77"), 2, SEQ)


def test_rigid_support_witness(small):
    b77 = Word.gen("b", 0, 77)
    assert rigid_support_witness(b77, VertexPath((1,)), small).is_trivial
    verdict = rigid_support_witness(Word.gen("b"), VertexPath((1,)), small)
    assert verdict.is_nontrivial
    assert verdict.witness.vertex == VertexPath((2,))
    assert rigid_support_witness(Word.identity(), VertexPath((3, 4)), small).is_trivial


@settings(max_examples=50, deadline=None)
@given(words())
def test_act_is_a_bijection(x):
    images = {act(x, v, SEQ) for v in iter_level(SEQ, 2)}
    assert len(images) == 77


@settings(max_examples=80, deadline=None)
@given(words(max_size=8), st.sampled_from(list(iter_level(SEQ, 2))))
def test_moving_words_are_never_trivial(x, v):
    verdict = decide_trivial(x, SEQ, budget=2000)
    if act(x, v, SEQ) != v:
        assert not verdict.is_trivial
    if verdict.is_trivial:
        alpha, beta = exponent_sums(x)
        assert alpha % 7 == 0 and beta == 0


@settings(max_examples=80, deadline=None)
@given(words(max_size=8))
def test_witnesses_confirm(x):
    verdict = decide_trivial(x, SEQ, budget=2000)
    if verdict.is_nontrivial:
        assert confirm_witness(x, verdict.witness, SEQ)


@settings(max_examples=50, deadline=None)
@given(short_words(), short_words())
def test_conjugates_of_relators_are_trivial(u, v):
    relator = p("[b(1),b(3)]")
    assert decide_trivial(conjugate(relator, u), SEQ).is_trivial
    assert decide_trivial(multiply(u, p("a^7"), v, ~v, ~u), SEQ).is_trivial
