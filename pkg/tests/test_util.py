import json

from branchcalc.util import dump_json, make_rng, parallel_map, random_word
from branchcalc.words import Word


def square(x):
    return x * x


def test_parallel_map_keeps_order():
    items = list(range(20))
    assert parallel_map(square, items) == [x * x for x in items]
    assert parallel_map(square, items, n_jobs=2) == [x * x for x in items]
    assert parallel_map(square, []) == []


def test_random_word_is_seeded():
    first = random_word(make_rng(3), 12)
    second = random_word(make_rng(3), 12)
    assert first == second
    assert first.length() <= 12
    assert random_word(make_rng(0), 0) == Word.identity()
    assert random_word(make_rng(0), 5, level=2).level == 2


def test_dump_json_big_ints():
    text = dump_json({"small": 5, "big": 2**60, "flag": True, "list": [-(2**70), None]})
    assert json.loads(text) == {
        "small": 5,
        "big": str(2**60),
        "flag": True,
        "list": [str(-(2**70)), None],
    }
    assert json.loads(dump_json({"big": 2**60}, big_ints_as_strings=False)) == {"big": 2**60}
    assert " " not in dump_json({"a": [1, 2]})
