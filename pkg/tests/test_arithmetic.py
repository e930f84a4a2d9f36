from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
import sympy  # type: ignore
from hypothesis import given, strategies as st

from branchcalc import arithmetic
from branchcalc.arithmetic import (
    check_free_subgroup_hypothesis,
    check_growth_hypothesis,
    is_probable_prime,
    mod_solve,
    next_prime,
    validate_sequence,
)
from branchcalc.errors import DomainError
from branchcalc.tree import PrimeSequence


def test_small_primes():
    assert is_probable_prime(11)
    assert not is_probable_prime(91)
    assert not is_probable_prime(1)
    assert not is_probable_prime(0)
    assert [n for n in range(60) if is_probable_prime(n)] == list(sympy.primerange(0, 60))


@given(st.integers(0, 10**6))
def test_agrees_with_sympy(n):
    assert is_probable_prime(n) == sympy.isprime(n)


@given(st.integers(2**64, 2**200))
def test_large_agrees_with_sympy(n):
    assert is_probable_prime(n) == sympy.isprime(n)


def test_carmichael_numbers():
    for n in (561, 1105, 1729, 2465, 2821, 6601, 8911):
        assert not is_probable_prime(n)


def test_next_prime():
    assert next_prime(7) == 11
    assert next_prime(0) == 2
    assert next_prime(2) == 3
    assert next_prime(13) == 17


def test_next_prime_large():
    p = next_prime(175**21)
    assert p > 175**21
    assert p == sympy.nextprime(175**21)
    assert is_probable_prime(p)
    assert sympy.isprime(p)


def test_validate_sequence():
    assert validate_sequence([7, 11, 13]).passed
    dup = validate_sequence([7, 7, 11])
    assert not dup.passed
    assert any("duplicate" in f for f in dup.failures())
    low = validate_sequence([5, 11])
    assert not low.passed
    assert low.failures() == ["l_0=5 < 7"]
    composite = validate_sequence([7, 9])
    assert "l_1=9 is not prime" in composite.failures()


def test_validate_empty():
    with pytest.raises(ValueError):
        validate_sequence([])


def test_growth_hypothesis_fails_at_seven():
    report = check_growth_hypothesis(PrimeSequence([7, 11]), 0)
    assert not report.satisfied
    assert report.lhs == 6 * 25**5
    assert report.rhs == 68**5


def test_growth_hypothesis_holds_at_151():
    report = check_growth_hypothesis(PrimeSequence([151, 157]), 0)
    assert report.satisfied
    assert report.evaluable
    assert report.lhs == 150 * 25**5


def test_growth_hypothesis_zero_exponent():
    report = check_growth_hypothesis(PrimeSequence([7]), 0, coefficient=Fraction(0))
    assert report.satisfied


def test_growth_hypothesis_level_one_needs_huge_prime():
    report = check_growth_hypothesis(PrimeSequence([151, 157]), 1)
    assert report.evaluable
    assert not report.satisfied


def test_growth_report_serialises_at_level_one():
    d = check_growth_hypothesis(PrimeSequence([151, 157]), 1).to_dict()
    assert d["evaluable"]
    assert not d["satisfied"]
    assert d["lhs"] is None and d["rhs"] is None
    assert d["lhsDigits"] == 9924
    assert d["rhsDigits"] == 13006
    assert d["note"] == "(l_1-1)^1 * 25^7097 vs 68^7097"


def test_growth_report_keeps_short_integers():
    d = check_growth_hypothesis(PrimeSequence([7, 11]), 0).to_dict()
    assert d["lhs"] == str(6 * 25**5)
    assert d["rhsDigits"] == len(str(68**5))


def test_free_subgroup_hypothesis():
    seq = PrimeSequence([7, next_prime(175**21)])
    report = check_free_subgroup_hypothesis(seq, 1)
    assert report.satisfied
    assert report.rhs == 175**21
    assert not check_free_subgroup_hypothesis(PrimeSequence([7, 11]), 1).satisfied


def test_free_subgroup_hypothesis_not_evaluable():
    report = check_free_subgroup_hypothesis(PrimeSequence([7, 11]), 1, digit_budget=10)
    assert not report.evaluable
    assert not report.satisfied
    assert "not evaluable" in report.note
    assert report.to_dict()["rhs"] is None


def test_free_subgroup_hypothesis_starts_at_one():
    with pytest.raises(ValueError):
        check_free_subgroup_hypothesis(PrimeSequence([7, 11]), 0)


def test_mod_solve():
    assert mod_solve(2, 3, 7) == 5
    assert mod_solve(1, 4, 11) == 4
    with pytest.raises(DomainError, match="non-invertible"):
        mod_solve(0, 1, 7)
    with pytest.raises(DomainError, match="no shift"):
        mod_solve(3, 14, 7)


@given(st.integers(1, 100), st.integers(1, 100))
def test_mod_solve_solves(t, q):
    l = 101
    m = mod_solve(t, q, l)
    assert 1 <= m < l
    assert (m * t - q) % l == 0


def test_constants():
    assert arithmetic.E_UPPER > Fraction(27182818, 10**7)


def trial_division(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def test_agrees_with_trial_division():
    assert all(is_probable_prime(n) == trial_division(n) for n in range(5000))


FREE_THRESHOLD = 175**21
LEVEL_ONE_PRIMES = [
    11,
    13,
    sympy.prevprime(FREE_THRESHOLD),
    sympy.nextprime(FREE_THRESHOLD),
    sympy.nextprime(2 * FREE_THRESHOLD),
]


@pytest.mark.parametrize("smaller,larger", list(combinations(LEVEL_ONE_PRIMES, 2)))
def test_free_subgroup_hypothesis_is_monotone(smaller, larger):
    low = check_free_subgroup_hypothesis(PrimeSequence([7, smaller]), 1)
    high = check_free_subgroup_hypothesis(PrimeSequence([7, larger]), 1)
    assert low.rhs == high.rhs == FREE_THRESHOLD
    assert not low.satisfied or high.satisfied


def test_free_subgroup_threshold_is_sharp():
    assert not check_free_subgroup_hypothesis(PrimeSequence([7, LEVEL_ONE_PRIMES[2]]), 1).satisfied
    assert check_free_subgroup_hypothesis(PrimeSequence([7, LEVEL_ONE_PRIMES[3]]), 1).satisfied


def sieve(limit):
    flags = np.ones(limit, dtype=bool)
    flags[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return flags


@pytest.mark.slow
def test_agrees_with_sieve_below_a_million():
    flags = sieve(10**6)
    mismatches = [n for n in range(10**6) if is_probable_prime(n) != bool(flags[n])]
    assert mismatches == []
