import pytest
from hypothesis import given

from branchcalc.engine import decide_equal
from branchcalc.errors import LevelMismatchError, WordRangeError, WordSyntaxError
from branchcalc.tree import PrimeSequence
from branchcalc.words import (
    FreeWord2,
    Word,
    b_at,
    canonical_ba_form,
    commutator,
    conjugate,
    exponent_sums,
    free_commutator,
    free_conjugate,
    free_power,
    invert,
    multiply,
    parse_word,
    power,
    render_word,
    substitute,
    word_algebra,
)

from .strategies import words

A = Word.gen("a")
B = Word.gen("b")
DESK = PrimeSequence([7, 11, 13])


def w(*pairs):
    return Word.of(0, pairs)


def test_parse_commutator():
    assert parse_word("[a,b]") == w(("a", -1), ("b", -1), ("a", 1), ("b", 1))


def test_parse_b_index(small):
    assert parse_word("b(2)", 0, small) == w(("a", -1), ("b", 1), ("a", 1))
    assert parse_word("b(1)", 0, small) == B


def test_parse_misc():
    assert parse_word("b^0").is_empty()
    assert parse_word("1").is_empty()
    assert parse_word("a^-2*b") == w(("a", -2), ("b", 1))
    assert parse_word(" a * a ") == w(("a", 2))
    assert parse_word("b^(a^6)") == w(("a", -6), ("b", 1), ("a", 6))
    assert parse_word("(a*b)^2") == w(("a", 1), ("b", 1), ("a", 1), ("b", 1))
    assert parse_word("a", level=2).level == 2


def test_parse_errors(small):
    with pytest.raises(WordSyntaxError) as info:
        parse_word("a*")
    assert info.value.position == 2
    with pytest.raises(WordSyntaxError):
        parse_word("")
    with pytest.raises(WordSyntaxError):
        parse_word("[a,b")
    with pytest.raises(WordSyntaxError):
        parse_word("c")
    with pytest.raises(WordRangeError):
        parse_word("b(8)", 0, small)
    with pytest.raises(WordRangeError):
        parse_word("b(0)", 0, small)
    assert parse_word("b(11)", 1, small).level == 1


def test_render():
    assert render_word(Word.identity()) == "1"
    assert render_word(w(("a", 2), ("b", -1))) == "a^2*b^-1"
    assert str(w(("b", 1), ("a", 1))) == "b*a"


@given(words())
def test_render_parse_round_trip(x):
    assert parse_word(render_word(x)) == x


def test_algebra():
    assert multiply(A, invert(A)).is_empty()
    assert conjugate(B, A) == w(("a", -1), ("b", 1), ("a", 1))
    assert commutator(B, B).is_empty()
    assert word_algebra("power", A, 3) == w(("a", 3))
    with pytest.raises(ValueError):
        word_algebra("divide", A, B)
    with pytest.raises(LevelMismatchError):
        multiply(A, Word.gen("a", 1))


def test_operators():
    assert A * B == w(("a", 1), ("b", 1))
    assert ~(A * B) == w(("b", -1), ("a", -1))
    assert (A * B) ** 2 == power(A * B, 2)
    assert (A * B) ** -1 == ~(A * B)
    assert (A * B) ** 0 == Word.identity()


@given(words(), words())
def test_inverse_of_product(x, y):
    assert invert(multiply(x, y)) == multiply(invert(y), invert(x))
    assert multiply(x, invert(x)).is_empty()


def test_b_at():
    assert b_at(1) == B
    assert b_at(3) == conjugate(B, power(A, 2))


def test_canonical_form(desk):
    form = canonical_ba_form(B, desk)
    assert (form.alpha, form.factors) == (0, ((1, 1),))
    form = canonical_ba_form(parse_word("b*a*b"), desk)
    assert (form.alpha, form.factors) == (1, ((1, 1), (7, 1)))
    form = canonical_ba_form(parse_word("a^3"), desk)
    assert (form.alpha, form.factors) == (3, ())
    form = canonical_ba_form(parse_word("b(3)^2*b(3)^-2"), desk)
    assert form.factors == ()


@given(words(max_size=14))
def test_canonical_form_reassembles(u):
    form = canonical_ba_form(u, DESK)
    assert decide_equal(form.to_word(), u, DESK).is_trivial
    assert canonical_ba_form(form.to_word(), DESK) == form


def test_left_factors(desk):
    form = canonical_ba_form(parse_word("b*a*b"), desk)
    assert form.left_factors() == ((2, 1), (1, 1))


def test_exponent_sums():
    assert exponent_sums(parse_word("a*b*a*b^-1")) == (2, 0)
    assert exponent_sums(parse_word("[a,b]")) == (0, 0)
    assert exponent_sums(parse_word("b^77")) == (0, 77)


def test_free_words():
    x, y = FreeWord2.x(), FreeWord2.y()
    c = free_commutator(x, y)
    assert str(c) == "[x,y]"
    assert c.letters() == "x^-1*y^-1*x*y"
    assert str(free_conjugate(c, x)) == "[x,y]^x"
    assert str(free_commutator(c, free_conjugate(c, x))) == "[[x,y],[x,y]^x]"
    assert str(free_power(free_conjugate(c, x), 3)) == "([x,y]^x)^3"
    assert free_commutator(x, x).is_identity()
    assert free_power(x, 1) is x


def test_free_word_equality_ignores_expression():
    x, y = FreeWord2.x(), FreeWord2.y()
    assert free_conjugate(y, x) == FreeWord2(x.element**-1 * y.element * x.element)


def test_substitute():
    c = free_commutator(FreeWord2.x(), FreeWord2.y())
    assert substitute(c, A, B) == commutator(A, B)
    assert substitute(free_power(FreeWord2.x(), -2), A * B, B) == w(("b", -1), ("a", -1)) ** 2
