"""Words as automorphisms of the tree.

Action is on the right and words are read left to right, so the section law
is ``section_v(uw) = section_v(u) * section_{v.u}(w)``. The rooted generator
a_n sends child k to k+1 and b_n = (b_{n+1}, a_{n+1}, 1, ..., 1)_n.
"""
from typing import Any, Dict, List, Optional, Tuple
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

from .errors import SequenceExhausted
from .tree import PrimeSequence, VertexPath, child_index, render_vertex
from .words import Word, exponent_sums, invert, merge_letters, multiply, render_word

DEFAULT_BUDGET = 100_000


def sym_mod(e: int, l: int) -> int:
    """Representative of e mod l in (-l/2, l/2]."""
    r = e % l
    return r - l if r > l // 2 else r


@lru_cache(maxsize=1 << 16)
def _reduce(w: Word, l: int) -> Word:
    stack: List[List[Any]] = []
    for x in w.letters:
        e = sym_mod(x.exponent, l) if x.symbol == "a" else x.exponent
        if e == 0:
            continue
        if stack and stack[-1][0] == x.symbol:
            stack[-1][1] += e
            if x.symbol == "a":
                stack[-1][1] = sym_mod(stack[-1][1], l)
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([x.symbol, e])
    return Word(w.level, merge_letters((s, e) for s, e in stack))


def reduce_word(w: Word, seq: PrimeSequence) -> Word:
    """Free product normal form: a-exponents reduced mod l_n, adjacent letters merged."""
    return _reduce(w, seq.prime(w.level))


def _known_prime(seq: PrimeSequence, n: int) -> Optional[int]:
    try:
        return seq.prime(n)
    except SequenceExhausted:
        return None


@lru_cache(maxsize=1 << 16)
def _sections(w: Word, l: int, l_next: Optional[int]) -> Tuple[Tuple[int, Word], ...]:
    buckets: Dict[int, List[Tuple[str, int]]] = {}
    p = 0
    for x in w.letters:
        if x.symbol == "a":
            p += x.exponent
            continue
        buckets.setdefault(child_index(1 - p, l), []).append(("b", x.exponent))
        buckets.setdefault(child_index(2 - p, l), []).append(("a", x.exponent))
    out = []
    for k in sorted(buckets):
        section = Word.of(w.level + 1, buckets[k])
        if l_next is not None:
            section = _reduce(section, l_next)
        if not section.is_empty():
            out.append((k, section))
    return tuple(out)


def sections(w: Word, seq: PrimeSequence) -> Dict[int, Word]:
    """Sparse map child index -> section word at level n+1; identity sections omitted.

    Child sections are reduced mod l_{n+1} when that prime is known.
    """
    return dict(_sections(w, seq.prime(w.level), _known_prime(seq, w.level + 1)))


def root_exponent(w: Word, seq: PrimeSequence) -> int:
    return exponent_sums(w)[0] % seq.prime(w.level)


def section_at(w: Word, v: VertexPath, seq: PrimeSequence) -> Word:
    current = w
    for k in v.coords:
        current = sections(current, seq).get(k, Word.identity(current.level + 1))
        if current.is_empty():
            return Word.identity(w.level + v.level)
    return current


def act(w: Word, v: VertexPath, seq: PrimeSequence) -> VertexPath:
    """Image of v under w."""
    coords = []
    current = w
    for k in v.coords:
        l = seq.prime(current.level)
        coords.append(child_index(k + root_exponent(current, seq), l))
        current = sections(current, seq).get(k, Word.identity(current.level + 1))
    return VertexPath(tuple(coords))


@dataclass(frozen=True)
class Portrait:
    level: int
    root_exp: Optional[int]
    children: Dict[int, "Portrait"] = field(default_factory=dict)
    residual: Optional[Word] = None

    def is_identity(self) -> bool:
        if self.residual is not None:
            return self.residual.is_empty()
        return not self.root_exp and not self.children

    def to_dict(self) -> Dict[str, Any]:
        return {
            "level": self.level,
            "rootExp": None if self.root_exp is None else str(self.root_exp),
            "children": {str(k): self.children[k].to_dict() for k in sorted(self.children)},
            "residual": None if self.residual is None else render_word(self.residual),
        }


def portrait(w: Word, depth: int, seq: PrimeSequence) -> Portrait:
    if depth < 0:
        raise ValueError("Portrait depth must be non-negative.")
    l = _known_prime(seq, w.level)
    word = _reduce(w, l) if l is not None else w
    root = exponent_sums(word)[0] % l if l is not None else None
    if depth == 0:
        return Portrait(w.level, root, {}, word)
    children = {}
    for k, s in sections(word, seq).items():
        child = portrait(s, depth - 1, seq)
        if not child.is_identity():
            children[k] = child
    return Portrait(w.level, root, children, None)


def _identity_portrait(level: int, depth: int) -> Portrait:
    if depth == 0:
        return Portrait(level, 0, {}, Word.identity(level))
    return Portrait(level, 0, {}, None)


def compose_portraits(p: Portrait, q: Portrait, depth: int, seq: PrimeSequence) -> Portrait:
    """Portrait of the product uv from portraits of u and v of the same depth."""
    l = _known_prime(seq, p.level)
    if depth == 0:
        word = multiply(p.residual, q.residual)
        if l is not None:
            word = _reduce(word, l)
            return Portrait(p.level, exponent_sums(word)[0] % l, {}, word)
        return Portrait(p.level, None, {}, word)
    if l is None or p.root_exp is None or q.root_exp is None:
        raise SequenceExhausted(p.level, len(seq))
    shift = p.root_exp
    keys = set(p.children) | {child_index(k - shift, l) for k in q.children}
    children = {}
    for c in sorted(keys):
        left = p.children.get(c, _identity_portrait(p.level + 1, depth - 1))
        right = q.children.get(child_index(c + shift, l), _identity_portrait(p.level + 1, depth - 1))
        child = compose_portraits(left, right, depth - 1, seq)
        if not child.is_identity():
            children[c] = child
    return Portrait(p.level, (p.root_exp + q.root_exp) % l, children, None)


def portrait_to_dot(p: Portrait, name: str = "portrait") -> str:
    lines = [f"digraph {name} {{", "  node [shape=box];"]
    counter = [0]

    def visit(node: Portrait, label: str) -> str:
        ident = f"n{counter[0]}"
        counter[0] += 1
        text = f"{label}\\nrootExp={node.root_exp}"
        if node.residual is not None:
            text += f"\\n{render_word(node.residual)}"
        lines.append(f'  {ident} [label="{text}"];')
        for k in sorted(node.children):
            child = visit(node.children[k], str(k))
            lines.append(f'  {ident} -> {child} [label="{k}"];')
        return ident

    visit(p, "root")
    lines.append("}")
    return "\n".join(lines)


class Verdict(Enum):
    TRIVIAL = "trivial"
    NONTRIVIAL = "nontrivial"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Witness:
    vertex: VertexPath
    reason: str  # "root": the section at vertex moves a child; "abelian": non-zero b-sum

    def to_dict(self) -> Dict[str, Any]:
        return {"vertex": render_vertex(self.vertex), "reason": self.reason}


@dataclass(frozen=True)
class TriState:
    verdict: Verdict
    witness: Optional[Witness] = None
    visited: int = 0
    note: str = ""

    @property
    def is_trivial(self) -> bool:
        return self.verdict is Verdict.TRIVIAL

    @property
    def is_nontrivial(self) -> bool:
        return self.verdict is Verdict.NONTRIVIAL

    @property
    def is_unknown(self) -> bool:
        return self.verdict is Verdict.UNKNOWN

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "visited": self.visited,
            "note": self.note,
        }


def _decide(w: Word, seq: PrimeSequence, budget: int, base: VertexPath) -> TriState:
    stack: List[Tuple[VertexPath, Word]] = [(base, w)]
    visited = 0
    incomplete = ""
    while stack:
        path, word = stack.pop()
        if visited >= budget:
            return TriState(Verdict.UNKNOWN, None, visited, f"budget {budget} spent")
        visited += 1
        try:
            word = reduce_word(word, seq)
            if word.is_empty():
                continue
            if root_exponent(word, seq):
                return TriState(Verdict.NONTRIVIAL, Witness(path, "root"), visited)
            if exponent_sums(word)[1]:
                return TriState(Verdict.NONTRIVIAL, Witness(path, "abelian"), visited)
            children = sections(word, seq)
        except SequenceExhausted as e:
            incomplete = str(e)
            continue
        for k in sorted(children, reverse=True):
            stack.append((path.child(k), children[k]))
    if incomplete:
        return TriState(Verdict.UNKNOWN, None, visited, incomplete)
    return TriState(Verdict.TRIVIAL, None, visited)


def decide_trivial(w: Word, seq: PrimeSequence, budget: int = DEFAULT_BUDGET) -> TriState:
    """Budgeted word problem.

    Empty words are trivial; a non-zero root exponent or a non-zero b-exponent
    sum (b has infinite order in the abelianisation) is a proof of
    non-triviality; otherwise every non-identity section is examined.
    """
    if budget < 1:
        raise ValueError("Budget must be at least 1.")
    return _decide(w, seq, budget, VertexPath())


def decide_equal(u: Word, v: Word, seq: PrimeSequence, budget: int = DEFAULT_BUDGET) -> TriState:
    return decide_trivial(multiply(u, invert(v)), seq, budget)


def confirm_witness(w: Word, witness: Witness, seq: PrimeSequence) -> bool:
    """Re-check a witness independently of the search.

    Root witnesses are replayed through ``act``: the image of the first child of
    the witness vertex must differ from it. Abelian witnesses move no vertex at
    a bounded depth, so they are re-checked on the section at the vertex
    instead: its b-exponent sum must be non-zero.
    """
    if witness.reason == "root":
        target = witness.vertex.child(1)
        return act(w, target, seq) != target
    return exponent_sums(section_at(w, witness.vertex, seq))[1] != 0


def in_level_stabilizer(w: Word, n: int, seq: PrimeSequence) -> bool:
    """Exact: every root exponent on levels 0..n-1 of the sparse expansion is zero."""
    frontier = [w]
    for _ in range(n):
        following = []
        for word in frontier:
            word = reduce_word(word, seq)
            if word.is_empty():
                continue
            if root_exponent(word, seq):
                return False
            following.extend(sections(word, seq).values())
        frontier = following
    return True


def rigid_support_witness(
    w: Word, u: VertexPath, seq: PrimeSequence, budget: int = DEFAULT_BUDGET
) -> TriState:
    """Decide whether w is trivial outside the subtree at u, i.e. lies in rst_G(u)."""
    current = w
    spent = 0
    unknown = ""
    path = VertexPath()
    for k in u.coords:
        current = reduce_word(current, seq)
        if current.is_empty():
            break
        spent += 1
        if root_exponent(current, seq):
            return TriState(Verdict.NONTRIVIAL, Witness(path, "root"), spent)
        children = sections(current, seq)
        for c in sorted(children):
            if c == k:
                continue
            sub = _decide(children[c], seq, max(budget - spent, 1), path.child(c))
            spent += sub.visited
            if sub.is_nontrivial:
                return TriState(Verdict.NONTRIVIAL, sub.witness, spent)
            if sub.is_unknown:
                unknown = sub.note
        current = children.get(k, Word.identity(current.level + 1))
        path = path.child(k)
    if unknown:
        return TriState(Verdict.UNKNOWN, None, spent, unknown)
    return TriState(Verdict.TRIVIAL, None, spent)
