from typing import Iterable, Iterator, List, Tuple
from dataclasses import dataclass
from itertools import product
import math
import threading
import warnings

from .arithmetic import DEFAULT_ROUNDS, next_prime, validate_sequence
from .errors import LevelMismatchError, SequenceError, SequenceExhausted

# Refuse to list a level with more vertices than this.
MAX_ENUMERATION = 10**6


class PrimeSequence:
    """The valencies l_0, l_1, ... of the tree, validated on construction.

    Levels past the explicit values are only available with ``auto_extend``;
    each new entry is the next prime above the current maximum.
    """

    def __init__(
        self, values: Iterable[int], auto_extend: bool = False, rounds: int = DEFAULT_ROUNDS
    ) -> None:
        values = [int(v) for v in values]
        if not values:
            raise SequenceError("A prime sequence needs at least one entry.")
        report = validate_sequence(values, rounds)
        if not report.passed:
            raise SequenceError("; ".join(report.failures()))
        self._values: List[int] = values
        self._provenance: List[str] = ["explicit"] * len(values)
        self.auto_extend = auto_extend
        self.rounds = rounds
        self._lock = threading.Lock()

    def __getstate__(self):
        state = self.__dict__.copy()
        del state["_lock"]
        return state

    def __setstate__(self, state) -> None:
        self.__dict__.update(state)
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._values)

    def __repr__(self) -> str:
        return f"PrimeSequence({self._values}, auto_extend={self.auto_extend})"

    @property
    def values(self) -> Tuple[int, ...]:
        return tuple(self._values)

    @property
    def provenance(self) -> Tuple[str, ...]:
        return tuple(self._provenance)

    def prime(self, n: int) -> int:
        if n < 0:
            raise ValueError(f"Negative level {n}.")
        if n < len(self._values):
            return self._values[n]
        if not self.auto_extend:
            raise SequenceExhausted(n, len(self._values))
        with self._lock:
            while len(self._values) <= n:
                value = next_prime(max(self._values), self.rounds)
                warnings.warn(f"Extending prime sequence with l_{len(self._values)}={value}")
                self._values.append(value)
                self._provenance.append("auto-extended")
        return self._values[n]

    def to_dict(self) -> dict:
        return {
            "values": [str(v) for v in self._values],
            "provenance": list(self._provenance),
            "autoExtend": self.auto_extend,
        }


@dataclass(frozen=True, order=True)
class VertexPath:
    coords: Tuple[int, ...] = ()

    @property
    def level(self) -> int:
        return len(self.coords)

    def child(self, k: int) -> "VertexPath":
        return VertexPath(self.coords + (k,))

    def parent(self) -> "VertexPath":
        if not self.coords:
            raise ValueError("The root has no parent.")
        return VertexPath(self.coords[:-1])

    def prefix(self, n: int) -> "VertexPath":
        return VertexPath(self.coords[:n])

    def __str__(self) -> str:
        return render_vertex(self)


def level_size(seq: PrimeSequence, n: int) -> int:
    """m_n, the number of vertices on level n."""
    if n < 0:
        raise ValueError(f"Negative level {n}.")
    return math.prod(seq.prime(i) for i in range(n))


def wreath_order(seq: PrimeSequence, n: int) -> int:
    """Order of A_{n-1} wr ... wr A_0, the image of G acting on level n."""
    return math.prod(seq.prime(i) ** level_size(seq, i) for i in range(n))


def is_valid_path(seq: PrimeSequence, v: VertexPath, start: int = 0) -> bool:
    """Coordinates of v, read as a path below a vertex on level ``start``."""
    return all(1 <= k <= seq.prime(start + i) for i, k in enumerate(v.coords))


def check_path(seq: PrimeSequence, v: VertexPath, start: int = 0) -> VertexPath:
    if not is_valid_path(seq, v, start):
        raise ValueError(f"Vertex {render_vertex(v)} is outside the tree.")
    return v


def vertex_order(u: VertexPath, v: VertexPath) -> int:
    """Lexicographic comparison of two vertices on the same level."""
    if u.level != v.level:
        raise LevelMismatchError(f"Vertices on levels {u.level} and {v.level}.")
    return (u.coords > v.coords) - (u.coords < v.coords)


def iter_level(seq: PrimeSequence, n: int) -> Iterator[VertexPath]:
    size = level_size(seq, n)
    if size > MAX_ENUMERATION:
        raise ValueError(f"Level {n} has {size} vertices; refusing to enumerate.")
    ranges = [range(1, seq.prime(i) + 1) for i in range(n)]
    for coords in product(*ranges):
        yield VertexPath(tuple(coords))


def parse_vertex(text: str) -> VertexPath:
    text = text.strip()
    if text in ("", "root", "-"):
        return VertexPath()
    try:
        coords = tuple(int(x) for x in text.split("."))
    except ValueError:
        raise ValueError(f'Could not read vertex "{text}"; use dot separated indices like 2.1')
    if any(k < 1 for k in coords):
        raise ValueError(f'Vertex "{text}" has an index below 1.')
    return VertexPath(coords)


def render_vertex(v: VertexPath) -> str:
    return ".".join(str(k) for k in v.coords) if v.coords else "root"


def child_index(offset: int, valency: int) -> int:
    """Map an integer to the representative range [1..valency]."""
    r = offset % valency
    return valency if r == 0 else r


def sorted_paths(paths: Iterable[VertexPath]) -> List[VertexPath]:
    """Order by (level, coordinates)."""
    return sorted(paths, key=lambda p: (p.level, p.coords))
