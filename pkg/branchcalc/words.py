"""Level-tagged words in a_n, b_n: grammar, printing, free normal forms,
the B x| A canonical form and two-letter free words."""
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, TYPE_CHECKING
from dataclasses import dataclass, field

from sympy.combinatorics.free_groups import free_group  # type: ignore

from .errors import LevelMismatchError, WordRangeError, WordSyntaxError
from .tree import child_index

if TYPE_CHECKING:
    from .tree import PrimeSequence

SYMBOLS = ("a", "b")


@dataclass(frozen=True)
class Letter:
    symbol: str
    exponent: int

    def __post_init__(self) -> None:
        if self.symbol not in SYMBOLS:
            raise ValueError(f"Unknown generator {self.symbol!r}")
        if self.exponent == 0:
            raise ValueError("Letters carry non-zero exponents.")


def merge_letters(pairs: Iterable[Tuple[str, int]]) -> Tuple[Letter, ...]:
    """Merge adjacent equal symbols and drop zero exponents."""
    stack: List[List[Any]] = []
    for symbol, exponent in pairs:
        if exponent == 0:
            continue
        if stack and stack[-1][0] == symbol:
            stack[-1][1] += exponent
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([symbol, exponent])
    return tuple(Letter(s, e) for s, e in stack)


@dataclass(frozen=True)
class Word:
    level: int
    letters: Tuple[Letter, ...] = ()

    @classmethod
    def of(cls, level: int, pairs: Iterable[Tuple[str, int]]) -> "Word":
        return cls(level, merge_letters(pairs))

    @classmethod
    def identity(cls, level: int = 0) -> "Word":
        return cls(level, ())

    @classmethod
    def gen(cls, symbol: str, level: int = 0, exponent: int = 1) -> "Word":
        return cls.of(level, [(symbol, exponent)])

    def pairs(self) -> List[Tuple[str, int]]:
        return [(x.symbol, x.exponent) for x in self.letters]

    def is_empty(self) -> bool:
        return not self.letters

    def length(self) -> int:
        return sum(abs(x.exponent) for x in self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __pow__(self, k: int) -> "Word":
        return power(self, k)

    def __str__(self) -> str:
        return render_word(self)


def _same_level(words: Sequence[Word]) -> int:
    levels = {w.level for w in words}
    if len(levels) > 1:
        raise LevelMismatchError(f"Operands live on levels {sorted(levels)}.")
    return words[0].level


def multiply(*words: Word) -> Word:
    if not words:
        raise ValueError("multiply needs at least one operand")
    level = _same_level(words)
    return Word.of(level, [p for w in words for p in w.pairs()])


def invert(w: Word) -> Word:
    return Word.of(w.level, [(s, -e) for s, e in reversed(w.pairs())])


def power(w: Word, k: int) -> Word:
    if k < 0:
        return power(invert(w), -k)
    if len(w.letters) == 1:
        x = w.letters[0]
        return Word.of(w.level, [(x.symbol, x.exponent * k)])
    result = Word.identity(w.level)
    base = w
    while k:
        if k & 1:
            result = multiply(result, base)
        base = multiply(base, base)
        k >>= 1
    return result


def conjugate(x: Word, y: Word) -> Word:
    """x^y = y^-1 x y."""
    return multiply(invert(y), x, y)


def commutator(u: Word, v: Word) -> Word:
    """[u, v] = u^-1 v^-1 u v."""
    return multiply(invert(u), invert(v), u, v)


_ALGEBRA = {
    "multiply": multiply,
    "invert": invert,
    "conjugate": conjugate,
    "commutator": commutator,
    "power": power,
}


def word_algebra(op: str, *operands: Any) -> Word:
    if op not in _ALGEBRA:
        raise ValueError(f"Operation '{op}' not recognized.")
    return _ALGEBRA[op](*operands)


def b_at(i: int, level: int = 0) -> Word:
    """b(i) = b^(a^(i-1)) = a^-(i-1) b a^(i-1)."""
    return Word.of(level, [("a", -(i - 1)), ("b", 1), ("a", i - 1)])


# Grammar:
#   expr    := term ('*' term)*
#   term    := atom ('^' (integer | '(' expr ')'))*
#   atom    := 'a' | 'b' | 'b' '(' integer ')' | '1' | '(' expr ')' | '[' expr ',' expr ']'
class _Parser:
    def __init__(self, text: str, level: int, valency: Optional[int]) -> None:
        self.text = text
        self.pos = 0
        self.level = level
        self.valency = valency

    def _skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expect(self, ch: str) -> None:
        if self._peek() != ch:
            found = self._peek() or "end of input"
            raise WordSyntaxError(f"Expected '{ch}' but found '{found}'", self.pos)
        self.pos += 1

    def _integer(self) -> int:
        self._skip()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] in "+-":
            self.pos += 1
        digits = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits:
            raise WordSyntaxError("Expected an integer", start)
        return int(self.text[start : self.pos])

    def parse(self) -> Word:
        if not self._peek():
            raise WordSyntaxError("Empty word; write 1 for the identity", self.pos)
        w = self.expr()
        if self._peek():
            raise WordSyntaxError(f"Unexpected '{self._peek()}'", self.pos)
        return w

    def expr(self) -> Word:
        w = self.term()
        while self._peek() == "*":
            self.pos += 1
            w = multiply(w, self.term())
        return w

    def term(self) -> Word:
        w = self.atom()
        while self._peek() == "^":
            self.pos += 1
            if self._peek() == "(":
                self.pos += 1
                conj = self.expr()
                self._expect(")")
                w = conjugate(w, conj)
            else:
                w = power(w, self._integer())
        return w

    def atom(self) -> Word:
        ch = self._peek()
        start = self.pos
        if ch == "a":
            self.pos += 1
            return Word.gen("a", self.level)
        if ch == "b":
            self.pos += 1
            if self._peek() == "(":
                self.pos += 1
                i = self._integer()
                self._expect(")")
                if i < 1 or (self.valency is not None and i > self.valency):
                    bound = self.valency if self.valency is not None else "l_n"
                    raise WordRangeError(f"b({i}) at position {start} is outside [1..{bound}]")
                return b_at(i, self.level)
            return Word.gen("b", self.level)
        if ch == "1":
            self.pos += 1
            return Word.identity(self.level)
        if ch == "(":
            self.pos += 1
            w = self.expr()
            self._expect(")")
            return w
        if ch == "[":
            self.pos += 1
            u = self.expr()
            self._expect(",")
            v = self.expr()
            self._expect("]")
            return commutator(u, v)
        raise WordSyntaxError(f"Unexpected '{ch or 'end of input'}'", self.pos)


def parse_word(text: str, level: int = 0, seq: Optional["PrimeSequence"] = None) -> Word:
    valency = seq.prime(level) if seq is not None else None
    return _Parser(text, level, valency).parse()


def render_word(w: Word) -> str:
    if not w.letters:
        return "1"
    return "*".join(
        x.symbol if x.exponent == 1 else f"{x.symbol}^{x.exponent}" for x in w.letters
    )


def exponent_sums(w: Word) -> Tuple[int, int]:
    alpha = sum(x.exponent for x in w.letters if x.symbol == "a")
    beta = sum(x.exponent for x in w.letters if x.symbol == "b")
    return alpha, beta


@dataclass(frozen=True)
class CanonicalBA:
    """g = prod b(i_j)^(e_j) * a^alpha, indices in [1..valency]."""

    level: int
    valency: int
    alpha: int
    factors: Tuple[Tuple[int, int], ...]

    def left_factors(self) -> Tuple[Tuple[int, int], ...]:
        """Indices for the mirrored placement g = a^alpha * prod b(i)^e."""
        return tuple((child_index(i + self.alpha, self.valency), e) for i, e in self.factors)

    def to_word(self) -> Word:
        pairs: List[Tuple[str, int]] = []
        for i, e in self.factors:
            pairs.extend([("a", -(i - 1)), ("b", e), ("a", i - 1)])
        pairs.append(("a", self.alpha))
        return Word.of(self.level, pairs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "level": self.level,
            "alpha": str(self.alpha),
            "factors": [[i, str(e)] for i, e in self.factors],
            "leftFactors": [[i, str(e)] for i, e in self.left_factors()],
        }


def canonical_ba_form(w: Word, seq: "PrimeSequence") -> CanonicalBA:
    """Single left-to-right scan: with running a-prefix p, b^e becomes b(1 - p)^e."""
    valency = seq.prime(w.level)
    p = 0
    stack: List[List[int]] = []
    for x in w.letters:
        if x.symbol == "a":
            p += x.exponent
            continue
        index = child_index(1 - p, valency)
        if stack and stack[-1][0] == index:
            stack[-1][1] += x.exponent
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([index, x.exponent])
    return CanonicalBA(w.level, valency, p % valency, tuple((i, e) for i, e in stack))


_FREE, _X, _Y = free_group("x, y")
_EXPRESSION_LIMIT = 400


@dataclass(frozen=True)
class FreeWord2:
    """A freely reduced word in x, y with an optional nested display form."""

    element: Any = field(compare=True)
    expression: Optional[str] = field(default=None, compare=False)
    atomic: bool = field(default=False, compare=False)

    @classmethod
    def x(cls) -> "FreeWord2":
        return cls(_X, "x", True)

    @classmethod
    def y(cls) -> "FreeWord2":
        return cls(_Y, "y", True)

    def syllables(self) -> List[Tuple[str, int]]:
        return [(str(s), int(e)) for s, e in self.element.array_form]

    def is_identity(self) -> bool:
        return bool(self.element.is_identity)

    def letters(self) -> str:
        if self.is_identity():
            return "1"
        return "*".join(s if e == 1 else f"{s}^{e}" for s, e in self.syllables())

    def __str__(self) -> str:
        return self.expression if self.expression is not None else self.letters()


def _wrap(w: FreeWord2) -> Optional[str]:
    if w.expression is None:
        return None
    return w.expression if w.atomic else f"({w.expression})"


def _limited(expression: Optional[str]) -> Optional[str]:
    if expression is None or len(expression) > _EXPRESSION_LIMIT:
        return None
    return expression


def free_commutator(u: FreeWord2, v: FreeWord2) -> FreeWord2:
    expr = None
    if u.expression is not None and v.expression is not None:
        expr = _limited(f"[{u.expression},{v.expression}]")
    return FreeWord2(u.element.commutator(v.element), expr, True)


def free_conjugate(u: FreeWord2, v: FreeWord2) -> FreeWord2:
    """u^v = v^-1 u v."""
    left, right = _wrap(u), _wrap(v)
    expr = None if left is None or right is None else _limited(f"{left}^{right}")
    return FreeWord2(v.element**-1 * u.element * v.element, expr, False)


def free_power(u: FreeWord2, k: int) -> FreeWord2:
    if k == 1:
        return u
    base = _wrap(u)
    expr = None if base is None else _limited(f"{base}^{k}")
    return FreeWord2(u.element**k, expr, False)


def substitute(fw: FreeWord2, g1: Word, g2: Word) -> Word:
    """Evaluate fw at x = g1, y = g2."""
    level = _same_level([g1, g2])
    pairs: List[Tuple[str, int]] = []
    for symbol, e in fw.syllables():
        pairs.extend(power(g1 if symbol == "x" else g2, e).pairs())
    return Word.of(level, pairs)
