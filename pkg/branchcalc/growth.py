"""Desk-scale growth: Cayley balls, weak-composition words, abelian witnesses."""
from typing import Any, Dict, FrozenSet, Iterator, List, Sequence, Tuple
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
import math

import pandas as pd  # type: ignore

from .engine import DEFAULT_BUDGET, Portrait, decide_equal, decide_trivial, portrait, reduce_word
from .errors import DomainError
from .group_maps import ab_B
from .tree import PrimeSequence, VertexPath
from .util import parallel_map
from .words import Word, b_at, commutator, exponent_sums, multiply, power, render_word

MAX_RADIUS = 10
KEY_DEPTHS = (2, 3, 4)

Key = FrozenSet[Tuple[Any, ...]]


def _collect(node: Portrait, path: VertexPath, out: List[Tuple[Any, ...]]) -> None:
    if node.residual is not None:
        b_sum = exponent_sums(node.residual)[1]
        if node.root_exp or b_sum:
            out.append((path.coords, node.root_exp, b_sum))
        return
    if node.root_exp:
        out.append((path.coords, node.root_exp))
    for k, child in node.children.items():
        _collect(child, path.child(k), out)


def invariant_key(w: Word, seq: PrimeSequence, depth: int) -> Key:
    """Root exponents down to ``depth`` plus abelian images of the cut sections.

    Equal elements always get equal keys.
    """
    entries: List[Tuple[Any, ...]] = []
    _collect(portrait(w, depth, seq), VertexPath(), entries)
    return frozenset(entries)


def _key_job(job: Tuple[Word, PrimeSequence, int]) -> Key:
    return invariant_key(*job)


class Deduper:
    """Keeps one representative per element, bucketed by invariant keys."""

    def __init__(self, seq: PrimeSequence, budget: int) -> None:
        self.seq = seq
        self.budget = budget
        self.depths = [d for d in KEY_DEPTHS if d <= len(seq)] or [1]
        self.reps: List[Word] = []
        self.buckets: Dict[Key, List[int]] = {}
        self._deep: Dict[Tuple[int, int], Key] = {}
        self.unresolved = 0

    def keys(self, words: Sequence[Word], n_jobs: int = 1, progress: bool = False) -> List[Key]:
        jobs = [(w, self.seq, self.depths[0]) for w in words]
        return parallel_map(_key_job, jobs, n_jobs, progress, desc="keys")

    def _deep_key(self, index: int, depth: int) -> Key:
        if (index, depth) not in self._deep:
            self._deep[index, depth] = invariant_key(self.reps[index], self.seq, depth)
        return self._deep[index, depth]

    def add(self, w: Word, key: Key) -> bool:
        """Insert w unless an equal element is already present."""
        deep: Dict[int, Key] = {}
        unknown = False
        for j in self.buckets.get(key, []):
            collision = True
            for d in self.depths[1:]:
                if d not in deep:
                    deep[d] = invariant_key(w, self.seq, d)
                if self._deep_key(j, d) != deep[d]:
                    collision = False
                    break
            if not collision:
                continue
            verdict = decide_equal(w, self.reps[j], self.seq, self.budget)
            if verdict.is_trivial:
                return False
            if verdict.is_unknown:
                unknown = True
        if unknown:
            self.unresolved += 1
        self.reps.append(w)
        self.buckets.setdefault(key, []).append(len(self.reps) - 1)
        return True


@dataclass(frozen=True)
class BallCensus:
    radius: int
    sizes: List[int] = field(default_factory=list)
    unresolved: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {"radius": self.radius, "sizes": self.sizes, "unresolved": self.unresolved}


def ball_sizes(
    seq: PrimeSequence,
    max_radius: int,
    budget: int = DEFAULT_BUDGET,
    n_jobs: int = 1,
    progress: bool = False,
) -> BallCensus:
    if not 0 <= max_radius <= MAX_RADIUS:
        raise ValueError(f"Radius must lie in [0, {MAX_RADIUS}].")
    gens = [Word.gen(s, 0, e) for s in "ab" for e in (1, -1)]
    dedup = Deduper(seq, budget)
    identity = Word.identity(0)
    dedup.add(identity, dedup.keys([identity])[0])
    sphere = [identity]
    sizes = [1]
    for _ in range(max_radius):
        candidates = [reduce_word(multiply(s, g), seq) for s in sphere for g in gens]
        keys = dedup.keys(candidates, n_jobs, progress)
        sphere = [w for w, key in zip(candidates, keys) if dedup.add(w, key)]
        sizes.append(sizes[-1] + len(sphere))
    return BallCensus(max_radius, sizes, dedup.unresolved)


def census_to_csv(census: BallCensus, path: Path) -> None:
    df = pd.DataFrame({"radius": range(len(census.sizes)), "size": census.sizes})
    df.to_csv(path, index=False)


def composition_words(l: int, level: int = 0) -> Iterator[Word]:
    """a^q0 b a^q1 b ... b a^q_{l-1} for every weak composition (q_0..q_{l-1}) of l."""
    if l < 1:
        raise ValueError("Need at least one part.")
    slots = 2 * l - 1
    for bars in combinations(range(slots), l - 1):
        parts = []
        prev = -1
        for bar in bars + (slots,):
            parts.append(bar - prev - 1)
            prev = bar
        pairs: List[Tuple[str, int]] = [("a", parts[0])]
        for q in parts[1:]:
            pairs.extend([("b", 1), ("a", q)])
        yield Word.of(level, pairs)


def lower_bound_value(l: int) -> int:
    """Ceiling of 2^(l-1) (l-1)^(l/2-2), computed exactly."""
    if l < 5:
        raise DomainError(f"The bound needs l >= 5, got {l}.")
    # Square of the bound is the integer 4^(l-1) (l-1)^(l-4).
    square = 4 ** (l - 1) * (l - 1) ** (l - 4)
    root = math.isqrt(square)
    return root if root * root == square else root + 1


def check_words_length_prop(
    seq: PrimeSequence,
    i: int = 0,
    budget: int = DEFAULT_BUDGET,
    n_jobs: int = 1,
    progress: bool = False,
) -> Dict[str, Any]:
    l = seq.prime(i)
    if l < 5:
        raise DomainError(f"l_{i}={l} is below 5.")
    words = list(composition_words(l, i))
    dedup = Deduper(seq, budget)
    keys = dedup.keys(words, n_jobs, progress)
    distinct = sum(dedup.add(w, key) for w, key in zip(words, keys))
    bound = lower_bound_value(l)
    if dedup.unresolved:
        status = "inconclusive"
    else:
        status = "pass" if distinct >= bound else "fail"
    return {
        "level": i,
        "l": l,
        "candidates": len(words),
        "distinct": distinct,
        "bound": bound,
        "margin": distinct - bound,
        "unresolved": dedup.unresolved,
        "status": status,
    }


def abelian_witness(
    seq: PrimeSequence, rank: int, budget: int = DEFAULT_BUDGET
) -> Dict[str, Any]:
    """b(1)^{l_1}, ..., b(rank)^{l_1}: pairwise commuting, each of infinite order."""
    l0, l1 = seq.prime(0), seq.prime(1)
    if not 1 <= rank <= l0:
        raise DomainError(f"Rank must lie in [1, {l0}].")
    words = [power(b_at(i), l1) for i in range(1, rank + 1)]
    commuting = []
    for i, j in combinations(range(rank), 2):
        verdict = decide_trivial(commutator(words[i], words[j]), seq, budget)
        commuting.append({"pair": [i + 1, j + 1], "verdict": verdict.verdict.value})
    images = [ab_B(w, seq) for w in words]
    nonzero = [any(v) for v in images]
    verdicts = [c["verdict"] for c in commuting]
    if "nontrivial" in verdicts or not all(nonzero):
        status = "fail"
    elif "unknown" in verdicts:
        status = "inconclusive"
    else:
        status = "pass"
    return {
        "rank": rank,
        "words": [render_word(w) for w in words],
        "commuting": commuting,
        "abB": [[str(x) for x in v] for v in images],
        "status": status,
    }

