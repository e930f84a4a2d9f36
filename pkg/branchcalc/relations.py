"""Relations between two elements.

Given g1, g2 the commutator chain c_0 = g1, c_1 = [g1, g2],
c_i = [c_{i-1}, c_{i-1}^{c_{i-2}}] pushes the pair into ever deeper rigid
stabilizers. The top of the chain is then repeatedly replaced by
[c, c^{h^m}], where h is a chain element rooted at the parent of the first
remaining decoration and m shifts the spines of c off themselves, until c
itself is trivial. The accumulated free word in x, y is the relation.
"""
from typing import Any, Dict, Iterable, List, Optional, Tuple
from dataclasses import dataclass, field, replace
import warnings

from .arithmetic import mod_solve
from .engine import (
    DEFAULT_BUDGET,
    act,
    decide_trivial,
    in_level_stabilizer,
    reduce_word,
    root_exponent,
    section_at,
    sections,
)
from .errors import DomainError, RelationError, SequenceExhausted
from .group_maps import spine_estimate
from .tree import PrimeSequence, VertexPath, child_index, render_vertex
from .words import (
    FreeWord2,
    Word,
    canonical_ba_form,
    commutator,
    conjugate,
    free_commutator,
    free_conjugate,
    free_power,
    power,
    render_word,
    substitute,
)

DEFAULT_MAX_ROUNDS = 64
# Conjugator powers beyond this are not expanded into concrete words.
MAX_CONJUGATOR_POWER = 10**4


@dataclass(frozen=True)
class ChainEntry:
    symbolic: FreeWord2
    concrete: Word


@dataclass(frozen=True)
class CommutatorChain:
    entries: Tuple[ChainEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> ChainEntry:
        return self.entries[i]

    @property
    def top(self) -> int:
        return len(self.entries) - 1


def commutator_chain(g1: Word, g2: Word, k: int, seq: PrimeSequence) -> CommutatorChain:
    if k < 1:
        raise ValueError("The chain needs k >= 1.")
    x, y = FreeWord2.x(), FreeWord2.y()
    entries = [
        ChainEntry(x, reduce_word(g1, seq)),
        ChainEntry(free_commutator(x, y), reduce_word(commutator(g1, g2), seq)),
    ]
    for _ in range(2, k + 1):
        prev, prev2 = entries[-1], entries[-2]
        entries.append(
            ChainEntry(
                free_commutator(prev.symbolic, free_conjugate(prev.symbolic, prev2.symbolic)),
                reduce_word(
                    commutator(prev.concrete, conjugate(prev.concrete, prev2.concrete)), seq
                ),
            )
        )
    return CommutatorChain(tuple(entries))


def choose_k(g1: Word, g2: Word, seq: PrimeSequence) -> int:
    """Smallest k >= 1 with spines(g1) + spines(g2) <= 5^k."""
    s0 = spine_estimate(g1, seq).count + spine_estimate(g2, seq).count
    k = 1
    while 5**k < s0:
        k += 1
    return k


@dataclass(frozen=True)
class Decoration:
    vertex: VertexPath
    kind: str
    section: Word
    detail: Dict[str, Any] = field(default_factory=dict, compare=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "vertex": render_vertex(self.vertex),
            "kind": self.kind,
            "section": render_word(self.section),
            **self.detail,
        }


def classify(section: Word, seq: PrimeSequence) -> Tuple[str, Dict[str, Any]]:
    form = canonical_ba_form(section, seq)
    if form.alpha == 0 and not form.factors:
        return "trivial", {}
    if form.alpha != 0:
        return "rooted", {"q": str(form.alpha), "tail": [[i, str(e)] for i, e in form.factors]}
    if len(form.factors) == 1 and form.factors[0][0] == 1:
        return "pure_b_power", {"t": str(form.factors[0][1])}
    return "recurse", {}


def decorations(
    w: Word, seq: PrimeSequence, budget: int = DEFAULT_BUDGET
) -> Tuple[List[Decoration], bool]:
    """Leaves of the decoration tree of w in (level, vertex) order, plus an incomplete flag.

    Sections proven trivial are pruned; recurse-kind sections are expanded.
    """
    word = reduce_word(w, seq)
    if word.is_empty():
        return [], False
    if root_exponent(word, seq):
        kind, detail = classify(word, seq)
        return [Decoration(VertexPath(), kind, word, detail)], False
    found: List[Decoration] = []
    incomplete = False
    expanded = 0
    stack: List[Tuple[VertexPath, Word]] = [(VertexPath(), word)]
    while stack:
        if expanded >= budget:
            incomplete = True
            break
        path, current = stack.pop()
        expanded += 1
        try:
            children = sections(current, seq)
            for k in sorted(children, reverse=True):
                child, vertex = children[k], path.child(k)
                verdict = decide_trivial(child, seq, budget)
                if verdict.is_trivial:
                    continue
                kind, detail = classify(child, seq)
                if kind == "recurse":
                    stack.append((vertex, child))
                elif kind != "trivial":
                    found.append(Decoration(vertex, kind, child, detail))
        except SequenceExhausted:
            incomplete = True
    return sorted(found, key=lambda d: (d.vertex.level, d.vertex.coords)), incomplete


def find_shift(n: Iterable[int], l: int) -> int:
    """Smallest q in [1, l-1] with (N + q) and N disjoint mod l."""
    residues = {x % l for x in n}
    if not residues:
        raise ValueError("find_shift needs a non-empty set.")
    for q in range(1, l):
        if all((s + q) % l not in residues for s in residues):
            size = len(residues)
            if size >= 2 and size * size < l and q >= size * size:
                raise RelationError(f"shift {q} breaks the bound {size * size}")
            return q
    raise RelationError("no shift available", {"N": sorted(residues), "l": str(l)})


@dataclass(frozen=True)
class RelationState:
    symbolic: FreeWord2
    concrete: Word
    chain: CommutatorChain
    shifts: Tuple[Dict[str, Any], ...] = ()


def _candidates(chain: CommutatorChain) -> List[Tuple[str, FreeWord2, Word]]:
    top = chain.top
    h, h2 = chain[top - 1], chain[top - 2]
    return [
        (f"c_{top - 1}", h.symbolic, h.concrete),
        (
            f"c_{top - 1}^c_{top - 2}",
            free_conjugate(h.symbolic, h2.symbolic),
            conjugate(h.concrete, h2.concrete),
        ),
    ]


def _small_power(t: int, q: int, l: int) -> int:
    m = mod_solve(t, q, l)
    return m - l if m > l // 2 else m


def _fallback_power(t: int, support: set, l: int) -> Optional[int]:
    """Smallest |m| whose shift m*t keeps the support off itself."""
    for size in range(1, MAX_CONJUGATOR_POWER + 1):
        for m in (size, -size):
            q = (m * t) % l
            if q and all((s + q) % l not in support for s in support):
                return m
    return None


def eliminate(
    state: RelationState, target: Decoration, seq: PrimeSequence, budget: int = DEFAULT_BUDGET
) -> RelationState:
    if target.kind == "trivial":
        raise ValueError("Trivial decorations need no elimination.")
    if target.vertex.level == 0:
        raise RelationError("decoration at the root", {"decoration": target.to_dict()})
    v = target.vertex.parent()
    l = seq.prime(v.level)
    tried = []
    usable = []
    for name, h_sym, h in _candidates(state.chain):
        fixes = act(h, v, seq) == v
        local_h = section_at(h, v, seq)
        t = root_exponent(local_h, seq) if fixes else 0
        single = len(canonical_ba_form(local_h, seq).factors) == 1
        tried.append({"candidate": name, "fixes": fixes, "t": str(t), "singleSpine": single})
        if fixes and t:
            usable.append((not single, len(usable), (name, h_sym, h, t, single)))
    # A section of shape a^t * (one spine) is preferred; any rooted one still shifts.
    chosen = min(usable)[2] if usable else None
    if chosen is None:
        raise RelationError(
            "no conjugator is rooted at the parent vertex",
            {"vertex": render_vertex(v), "candidates": tried, "decoration": target.to_dict()},
        )
    name, h_sym, h, t, single = chosen

    local = section_at(state.concrete, v, seq)
    n = set(sections(local, seq))
    support = {x % l for x in n} | {child_index(x + 1, l) % l for x in n}
    try:
        q = find_shift(support, l)
        m = _small_power(t, q, l)
    except (RelationError, DomainError) as e:
        raise RelationError(
            f"prime too small at level {v.level}",
            {"vertex": render_vertex(v), "N": sorted(n), "l": str(l), "cause": str(e)},
        )
    fallback = False
    if abs(m) > MAX_CONJUGATOR_POWER:
        small = _fallback_power(t, support, l)
        if small is None:
            raise RelationError(
                f"conjugator power {m} too large at level {v.level}",
                {"vertex": render_vertex(v), "t": str(t), "q": str(q)},
            )
        m, q, fallback = small, (small * t) % l, True

    conj_sym = free_power(h_sym, m)
    symbolic = free_commutator(state.symbolic, free_conjugate(state.symbolic, conj_sym))
    concrete = reduce_word(
        commutator(state.concrete, conjugate(state.concrete, power(h, m))), seq
    )
    verdict = decide_trivial(section_at(concrete, target.vertex, seq), seq, budget)
    if verdict.is_nontrivial:
        raise RelationError(
            "section survived elimination",
            {"decoration": target.to_dict(), "verdict": verdict.to_dict()},
        )
    before = spine_estimate(state.concrete, seq).count
    after = spine_estimate(concrete, seq).count
    within = after <= 5 * l * before
    if not within:
        warnings.warn(f"Spine estimate grew from {before} to {after} at {render_vertex(v)}")
    if verdict.is_unknown:
        warnings.warn(
            f"Could not confirm elimination at {render_vertex(target.vertex)}: {verdict.note}"
        )
    shift = {
        "level": v.level,
        "vertex": render_vertex(v),
        "N": sorted(n),
        "q": str(q),
        "t": str(t),
        "m": str(m),
        "conjugator": name,
        "shape": "a^t*spine" if single else "general",
        "spinesBefore": before,
        "spinesAfter": after,
        "spineBound": within,
    }
    if fallback:
        shift["fallback"] = True
    return replace(state, symbolic=symbolic, concrete=concrete, shifts=state.shifts + (shift,))


def _verify(
    w: FreeWord2, g1: Word, g2: Word, seq: PrimeSequence, budget: int, depth: int
) -> Dict[str, Any]:
    value = substitute(w, g1, g2)
    verdict = decide_trivial(value, seq, budget)
    if verdict.is_nontrivial:
        raise RelationError(
            "relation does not vanish", {"w": str(w), "verdict": verdict.to_dict()}
        )
    out: Dict[str, Any] = {"depth": depth, "verdict": verdict.verdict.value}
    if verdict.is_unknown:
        out["stabilizer"] = in_level_stabilizer(value, depth, seq)
        warnings.warn(f"Relation only verified up to level {depth}: {verdict.note}")
    return out


def find_relation(
    g1: Word,
    g2: Word,
    seq: PrimeSequence,
    budget: int = DEFAULT_BUDGET,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    depth: int = 3,
) -> Tuple[FreeWord2, Dict[str, Any]]:
    x, y = FreeWord2.x(), FreeWord2.y()
    if decide_trivial(commutator(g1, g2), seq, budget).is_trivial:
        w = free_commutator(x, y)
        report = {
            "w": str(w),
            "letters": w.letters(),
            "rounds": 0,
            "shifts": [],
            "verification": _verify(w, g1, g2, seq, budget, depth),
        }
        return w, report

    s0 = spine_estimate(g1, seq).count + spine_estimate(g2, seq).count
    k = choose_k(g1, g2, seq)
    chain = commutator_chain(g1, g2, k + 1, seq)
    spines = [spine_estimate(e.concrete, seq).count for e in chain.entries]
    state = RelationState(chain[chain.top].symbolic, chain[chain.top].concrete, chain)
    per_round = []
    rounds = 0
    while True:
        found, incomplete = decorations(state.concrete, seq, budget)
        per_round.append(len(found))
        if not found:
            if incomplete:
                warnings.warn("Decoration search stopped early; relying on verification.")
            break
        if rounds >= max_rounds:
            raise RelationError(
                f"{max_rounds} rounds exhausted",
                {"remaining": [d.to_dict() for d in found[:20]], "shifts": list(state.shifts)},
            )
        state = eliminate(state, found[0], seq, budget)
        rounds += 1

    w = state.symbolic
    if w.is_identity():
        raise RelationError("relation reduced to the empty word", {"shifts": list(state.shifts)})
    report = {
        "w": str(w),
        "letters": w.letters(),
        "rounds": rounds,
        "shifts": list(state.shifts),
        "verification": _verify(w, g1, g2, seq, budget, depth),
        "k": k,
        "chainIndex": chain.top,
        "spines": spines,
        "spineBound": all(s <= 5**i * s0 for i, s in enumerate(spines)),
        "decorationsPerRound": per_round,
    }
    return w, report
