"""Abelianisations, spine counts, named generators and the identity suite."""
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
from dataclasses import dataclass

from .engine import (
    DEFAULT_BUDGET,
    TriState,
    act,
    decide_equal,
    decide_trivial,
    portrait,
    reduce_word,
    rigid_support_witness,
    sections,
)
from .errors import DomainError, SequenceExhausted
from .tree import PrimeSequence, VertexPath, child_index, level_size, sorted_paths
from .util import make_rng, parallel_map, random_word
from .words import (
    CanonicalBA,
    Word,
    b_at,
    canonical_ba_form,
    commutator,
    conjugate,
    exponent_sums,
    invert,
    multiply,
    power,
    render_word,
)

# Level-2 orbits are only enumerated up to this many vertices.
ORBIT_LIMIT = 10**4
SUBADDITIVITY_PAIRS = 500


@dataclass(frozen=True)
class AbelianImage:
    a_part: int
    b_part: int

    def to_dict(self) -> Dict[str, Any]:
        return {"a": str(self.a_part), "b": str(self.b_part)}


def ab_G(w: Word, seq: PrimeSequence) -> AbelianImage:
    """Image in G_n^ab = C_{l_n} x C_inf."""
    alpha, beta = exponent_sums(w)
    return AbelianImage(alpha % seq.prime(w.level), beta)


def ab_B(w: Word, seq: PrimeSequence) -> Tuple[int, ...]:
    form = canonical_ba_form(w, seq)
    if form.alpha != 0:
        raise DomainError(f"{render_word(w)} is not in B: rooted part a^{form.alpha}")
    vector = [0] * form.valency
    for i, e in form.factors:
        vector[i - 1] += e
    return tuple(vector)


@dataclass(frozen=True)
class SpineEstimate:
    count: int
    form: CanonicalBA

    def to_dict(self) -> Dict[str, Any]:
        return {"spines": self.count, "canonical": self.form.to_dict()}


def spine_estimate(w: Word, seq: PrimeSequence) -> SpineEstimate:
    """Number of b-factors in the canonical B x| A form, an upper bound on the spine count."""
    form = canonical_ba_form(w, seq)
    return SpineEstimate(len(form.factors), form)


def n_generators(seq: PrimeSequence, level: int = 0) -> List[Word]:
    """b(2)^-1 b(1), b(3)^-1 b(2), ..., b(1)^-1 b(l_n)."""
    l = seq.prime(level)
    return [
        multiply(invert(b_at(child_index(i + 1, l), level)), b_at(i, level))
        for i in range(1, l + 1)
    ]


@dataclass(frozen=True)
class CheckResult:
    check: str
    status: str
    details: Dict[str, Any]

    def to_dict(self) -> Dict[str, Any]:
        return {"check": self.check, "status": self.status, "details": self.details}


def _status(verdicts: Sequence[TriState]) -> str:
    """Every verdict is expected to be Trivial; Unknown only ever downgrades."""
    if any(v.is_nontrivial for v in verdicts):
        return "fail"
    if any(v.is_unknown for v in verdicts):
        return "inconclusive"
    return "pass"


def _sections_match(
    w: Word, expected: Dict[int, Word], seq: PrimeSequence, budget: int
) -> List[TriState]:
    actual = sections(w, seq)
    verdicts = []
    for k in sorted(set(actual) | set(expected)):
        level = w.level + 1
        verdicts.append(
            decide_equal(
                actual.get(k, Word.identity(level)), expected.get(k, Word.identity(level)), seq, budget
            )
        )
    return verdicts


def _bracket(level: int) -> Word:
    return commutator(Word.gen("a", level), Word.gen("b", level))


def check_commutator_table(seq: PrimeSequence, depth: int, budget: int, seed: int) -> CheckResult:
    l0 = seq.prime(0)
    verdicts: List[TriState] = []
    failures = []
    for i in range(1, l0 + 1):
        for j in range(1, l0 + 1):
            w = commutator(b_at(i), b_at(j))
            if j == child_index(i + 1, l0):
                expected = {j: _bracket(1)}
            elif i == child_index(j + 1, l0):
                expected = {i: invert(_bracket(1))}
            else:
                expected = {}
            case = _sections_match(w, expected, seq, budget)
            if _status(case) != "pass":
                failures.append([i, j])
            verdicts.extend(case)
    return CheckResult(
        "commutator_table", _status(verdicts), {"cases": l0 * l0, "failures": failures}
    )


def check_power_shape(seq: PrimeSequence, depth: int, budget: int, seed: int) -> CheckResult:
    """b^{m_{n+1}} has the single section b_n^{m_{n+1}} on level n, at 1.1...1."""
    details: Dict[str, Any] = {}
    ok = True
    for n in (1, 2):
        if n >= depth or n >= len(seq):
            continue
        m = level_size(seq, n + 1)
        p = portrait(Word.gen("b", 0, m), n, seq)
        node = p
        path: List[int] = []
        while node.children:
            if len(node.children) != 1:
                break
            k, node = next(iter(node.children.items()))
            path.append(k)
        good = (
            path == [1] * n
            and node.residual is not None
            and node.residual == reduce_word(Word.gen("b", n, m), seq)
            and node.root_exp == 0
        )
        ok = ok and good
        details[f"level{n}"] = {"m": str(m), "vertex": ".".join(map(str, path)), "ok": good}
    return CheckResult("power_shape", "pass" if ok and details else "fail", details)


def check_b2_sections(seq: PrimeSequence, depth: int, budget: int, seed: int) -> CheckResult:
    w = b_at(2)
    actual = sections(w, seq)
    expected = {2: Word.gen("b", 1), 3: Word.gen("a", 1)}
    return CheckResult(
        "b2_sections",
        "pass" if actual == expected else "fail",
        {"sections": {str(k): render_word(v) for k, v in actual.items()}},
    )


def orbit(v: VertexPath, seq: PrimeSequence, level: int = 0) -> List[VertexPath]:
    gens = [Word.gen(s, level, e) for s in "ab" for e in (1, -1)]
    seen = {v}
    frontier = [v]
    while frontier:
        following = []
        for u in frontier:
            for g in gens:
                x = act(g, u, seq)
                if x not in seen:
                    seen.add(x)
                    following.append(x)
        frontier = following
    return sorted_paths(seen)


def check_transitivity(seq: PrimeSequence, depth: int, budget: int, seed: int) -> CheckResult:
    details: Dict[str, Any] = {}
    ok = True
    for n in (1, 2):
        if n > depth or n > len(seq) or level_size(seq, n) > ORBIT_LIMIT:
            continue
        size = len(orbit(VertexPath((1,) * n), seq))
        details[f"level{n}"] = {"orbit": size, "expected": level_size(seq, n)}
        ok = ok and size == level_size(seq, n)
    return CheckResult("transitivity", "pass" if ok and details else "fail", details)


def check_spine_subadditivity(
    seq: PrimeSequence, depth: int, budget: int, seed: int
) -> CheckResult:
    rng = make_rng(seed)
    bad = []
    for _ in range(SUBADDITIVITY_PAIRS):
        u = random_word(rng, int(rng.integers(0, 13)))
        v = random_word(rng, int(rng.integers(0, 13)))
        su = spine_estimate(u, seq).count
        sv = spine_estimate(v, seq).count
        if spine_estimate(multiply(u, v), seq).count > su + sv:
            bad.append([render_word(u), render_word(v), "product"])
        if spine_estimate(conjugate(u, v), seq).count > su + 2 * sv:
            bad.append([render_word(u), render_word(v), "conjugate"])
    return CheckResult(
        "spine_subadditivity",
        "fail" if bad else "pass",
        {"pairs": SUBADDITIVITY_PAIRS, "violations": bad[:10]},
    )


def check_far_commute(seq: PrimeSequence, depth: int, budget: int, seed: int) -> CheckResult:
    l0 = seq.prime(0)
    verdicts = []
    for i in range(1, l0 + 1):
        for k in range(i + 1, l0 + 1):
            if (k - i) % l0 in (1, l0 - 1):
                continue
            verdicts.append(decide_trivial(commutator(b_at(i), b_at(k)), seq, budget))
    return CheckResult("far_commute", _status(verdicts), {"pairs": len(verdicts)})


def check_rigid_powers(seq: PrimeSequence, depth: int, budget: int, seed: int) -> CheckResult:
    l0, l1 = seq.prime(0), seq.prime(1)
    verdicts = [
        rigid_support_witness(power(b_at(k), l1), VertexPath((k,)), seq, budget)
        for k in range(1, l0 + 1)
    ]
    return CheckResult("rigid_powers", _status(verdicts), {"power": l1, "vertices": l0})


def check_level_one_copy(seq: PrimeSequence, depth: int, budget: int, seed: int) -> CheckResult:
    """On v_{3j+2} the sections of b(3j+1) and b(3j+2) are a_1 and b_1."""
    l0 = seq.prime(0)
    ok = True
    vertices = []
    for j in range(0, l0):
        v = 3 * j + 2
        if v > l0:
            break
        vertices.append(v)
        ok = ok and sections(b_at(3 * j + 1), seq).get(v) == Word.gen("a", 1)
        ok = ok and sections(b_at(3 * j + 2), seq).get(v) == Word.gen("b", 1)
    return CheckResult("level_one_copy", "pass" if ok else "fail", {"vertices": vertices})


def check_derived_generators(
    seq: PrimeSequence, depth: int, budget: int, seed: int
) -> CheckResult:
    lhs = commutator(b_at(2), b_at(1))
    rhs = commutator(
        multiply(invert(b_at(4)), b_at(2)), multiply(invert(b_at(2)), b_at(1))
    )
    verdict = decide_equal(lhs, rhs, seq, budget)
    return CheckResult("derived_generators", _status([verdict]), verdict.to_dict())


def check_n1_sections(seq: PrimeSequence, depth: int, budget: int, seed: int) -> CheckResult:
    gens = n_generators(seq, 1)
    base = commutator(b_at(1), b_at(2))
    verdicts = []
    for j in range(1, min(seq.prime(1), 12) + 1):
        w = conjugate(base, power(b_at(1), j - 1))
        verdicts.append(
            decide_equal(sections(w, seq).get(2, Word.identity(1)), gens[j - 1], seq, budget)
        )
    return CheckResult("n1_sections", _status(verdicts), {"generators": len(verdicts)})


CHECKS: Dict[str, Callable[[PrimeSequence, int, int, int], CheckResult]] = {
    "commutator_table": check_commutator_table,
    "power_shape": check_power_shape,
    "b2_sections": check_b2_sections,
    "transitivity": check_transitivity,
    "spine_subadditivity": check_spine_subadditivity,
    "far_commute": check_far_commute,
    "rigid_powers": check_rigid_powers,
    "level_one_copy": check_level_one_copy,
    "derived_generators": check_derived_generators,
    "n1_sections": check_n1_sections,
}


def _run_check(job: Tuple[str, PrimeSequence, int, int, int]) -> CheckResult:
    name, seq, depth, budget, seed = job
    try:
        return CHECKS[name](seq, depth, budget, seed)
    except SequenceExhausted as e:
        return CheckResult(name, "inconclusive", {"error": str(e)})


def run_identity_suite(
    seq: PrimeSequence,
    depth: int = 3,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    n_jobs: int = 1,
    progress: bool = False,
    checks: Optional[Sequence[str]] = None,
) -> List[CheckResult]:
    names = list(CHECKS) if checks is None else list(checks)
    for name in names:
        if name not in CHECKS:
            raise ValueError(f"Check '{name}' not recognized.")
    jobs = [(name, seq, depth, budget, seed) for name in names]
    return parallel_map(_run_check, jobs, n_jobs, progress, desc="identities")


def suite_passed(results: Sequence[CheckResult]) -> bool:
    return all(r.status == "pass" for r in results)


def suite_to_dicts(results: Sequence[CheckResult]) -> List[Dict[str, Any]]:
    return [r.to_dict() for r in results]
