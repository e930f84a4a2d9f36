"""Number theory used by the tree model: primality, prime search, modular
solving and the two sufficient conditions on the defining sequence."""
from typing import Any, Dict, List, Sequence, TYPE_CHECKING
from dataclasses import dataclass, field
from fractions import Fraction
import math
import random

from .errors import DomainError

if TYPE_CHECKING:
    from .tree import PrimeSequence

# Rational stand-in for e. 2.72 > e, so a passing check is sound.
E_UPPER = Fraction(68, 25)
GROWTH_RATIO = Fraction(47, 5)
DEFAULT_DIGIT_BUDGET = 10**6
DEFAULT_ROUNDS = 40
# Integers longer than this are reported by digit count only.
MAX_PRINTED_DIGITS = 4000

# Deterministic Miller-Rabin bases; correct for every n < 3.3 * 10^24.
_SMALL_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _strong_probable_prime(n: int, base: int, d: int, r: int) -> bool:
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(r - 1):
        x = pow(x, 2, n)
        if x == n - 1:
            return True
    return False


def is_probable_prime(n: int, rounds: int = DEFAULT_ROUNDS) -> bool:
    if n < 2:
        return False
    for p in _SMALL_BASES:
        if n % p == 0:
            return n == p
    r, d = 0, n - 1
    while d % 2 == 0:
        r += 1
        d //= 2
    if n < 2**64:
        return all(_strong_probable_prime(n, a, d, r) for a in _SMALL_BASES)
    # Witnesses are seeded by n itself so repeated calls agree.
    rng = random.Random(n)
    for _ in range(max(rounds, 1)):
        a = rng.randrange(2, n - 1)
        if not _strong_probable_prime(n, a, d, r):
            return False
    return True


def next_prime(n: int, rounds: int = DEFAULT_ROUNDS) -> int:
    if n < 2:
        return 2
    candidate = n + 1
    if candidate > 2 and candidate % 2 == 0:
        candidate += 1
    while not is_probable_prime(candidate, rounds):
        candidate += 2
    return candidate


@dataclass(frozen=True)
class IndexCheck:
    index: int
    value: int
    is_prime: bool
    at_least_seven: bool
    distinct: bool

    @property
    def passed(self) -> bool:
        return self.is_prime and self.at_least_seven and self.distinct


@dataclass(frozen=True)
class SequenceReport:
    entries: List[IndexCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.entries) and all(e.passed for e in self.entries)

    def failures(self) -> List[str]:
        out = []
        for e in self.entries:
            if not e.is_prime:
                out.append(f"l_{e.index}={e.value} is not prime")
            if not e.at_least_seven:
                out.append(f"l_{e.index}={e.value} < 7")
            if not e.distinct:
                out.append(f"l_{e.index}={e.value} is a duplicate")
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "entries": [
                {
                    "index": e.index,
                    "value": str(e.value),
                    "prime": e.is_prime,
                    "atLeastSeven": e.at_least_seven,
                    "distinct": e.distinct,
                }
                for e in self.entries
            ],
            "failures": self.failures(),
        }


def validate_sequence(values: Sequence[int], rounds: int = DEFAULT_ROUNDS) -> SequenceReport:
    if not values:
        raise ValueError("Cannot validate an empty sequence.")
    counts: Dict[int, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return SequenceReport(
        [
            IndexCheck(
                index=i,
                value=v,
                is_prime=is_probable_prime(v, rounds),
                at_least_seven=v >= 7,
                distinct=counts[v] == 1,
            )
            for i, v in enumerate(values)
        ]
    )


@dataclass(frozen=True)
class HypothesisReport:
    index: int
    satisfied: bool
    lhs: Any
    rhs: Any
    note: str
    evaluable: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "satisfied": self.satisfied,
            "evaluable": self.evaluable,
            "lhs": _printable(self.lhs),
            "rhs": _printable(self.rhs),
            "lhsDigits": _digit_count(self.lhs),
            "rhsDigits": _digit_count(self.rhs),
            "note": self.note,
        }


def _digit_count(n: Any) -> Any:
    if n is None:
        return None
    n = abs(int(n))
    if n < 10:
        return 1
    digits = int(n.bit_length() * math.log10(2))
    while 10**digits <= n:
        digits += 1
    return digits


def _printable(n: Any) -> Any:
    if n is None or _digit_count(n) > MAX_PRINTED_DIGITS:
        return None
    return str(n)


def _level_size(seq: "PrimeSequence", i: int) -> int:
    return math.prod(seq.prime(j) for j in range(i))


def _digits(base: int, exponent: int) -> float:
    if base <= 1 or exponent <= 0:
        return 1.0
    return exponent * math.log10(base)


def check_growth_hypothesis(
    seq: "PrimeSequence",
    i: int,
    digit_budget: int = DEFAULT_DIGIT_BUDGET,
    coefficient: Fraction = Fraction(5),
) -> HypothesisReport:
    """Sufficient check of ``log(l_i - 1) >= 5 (47/5)^i m_i``.

    With X = P/Q the inequality ``l_i - 1 >= (68/25)^X`` is compared exactly as
    ``(l_i - 1)^Q * 25^P >= 68^P``.
    """
    l_i = seq.prime(i)
    x = Fraction(coefficient) * GROWTH_RATIO**i * _level_size(seq, i)
    p, q = x.numerator, x.denominator
    if p == 0:
        return HypothesisReport(i, l_i - 1 >= 1, l_i - 1, 1, "exponent is zero")
    digits = max(
        _digits(l_i - 1, q) + _digits(E_UPPER.denominator, p),
        _digits(E_UPPER.numerator, p),
    )
    if digits > digit_budget:
        return HypothesisReport(
            i,
            False,
            None,
            None,
            f"not evaluable: about {int(digits)} digits exceeds budget {digit_budget}",
            evaluable=False,
        )
    lhs = (l_i - 1) ** q * E_UPPER.denominator**p
    rhs = E_UPPER.numerator**p
    note = f"(l_{i}-1)^{q} * 25^{p} vs 68^{p}"
    return HypothesisReport(i, lhs >= rhs, lhs, rhs, note)


def check_free_subgroup_hypothesis(
    seq: "PrimeSequence", i: int, digit_budget: int = DEFAULT_DIGIT_BUDGET
) -> HypothesisReport:
    if i < 1:
        raise ValueError("The free-subgroup hypothesis starts at level 1.")
    l_i = seq.prime(i)
    base = 25 * seq.prime(i - 1)
    exponent = 3 * _level_size(seq, i)
    digits = _digits(base, exponent)
    if digits > digit_budget:
        return HypothesisReport(
            i,
            False,
            l_i,
            None,
            f"not evaluable: threshold has about {int(digits)} digits, budget {digit_budget}",
            evaluable=False,
        )
    threshold = base**exponent
    return HypothesisReport(i, l_i >= threshold, l_i, threshold, f"({base})^{exponent}")


def mod_solve(t: int, q: int, l: int) -> int:
    """Return the m in [1, l-1] with m * t = q (mod l)."""
    if t % l == 0:
        raise DomainError(f"{t} is non-invertible modulo {l}")
    if q % l == 0:
        raise DomainError("no shift requested")
    return pow(t, -1, l) * q % l
