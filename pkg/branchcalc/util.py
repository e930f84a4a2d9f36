from typing import Any, Callable, Iterable, List, Sequence, TypeVar
import json

import numpy as np  # type: ignore
from joblib import Parallel, delayed  # type: ignore
from tqdm import tqdm  # type: ignore

from .words import Word

T = TypeVar("T")

_SAFE_INT = 2**53


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_word(rng: np.random.Generator, length: int, level: int = 0) -> Word:
    """Uniform product of ``length`` letters from {a, a^-1, b, b^-1}."""
    symbols = rng.integers(0, 2, size=length)
    signs = rng.choice([-1, 1], size=length)
    return Word.of(level, [("ab"[int(s)], int(e)) for s, e in zip(symbols, signs)])


def parallel_map(
    func: Callable[..., T],
    items: Sequence[Any],
    n_jobs: int = 1,
    progress: bool = False,
    desc: str = "",
) -> List[T]:
    """Apply func to every item, in input order."""
    it: Iterable[Any] = tqdm(items, desc=desc) if progress else items
    if len(items) <= 1 or n_jobs == 1:
        return [func(x) for x in it]
    return list(Parallel(n_jobs=n_jobs)(delayed(func)(x) for x in it))


def _stringify(obj: Any) -> Any:
    # Integers past the exact range of a double are written as decimal strings.
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)):
        return str(int(obj)) if abs(int(obj)) > _SAFE_INT else int(obj)
    if isinstance(obj, dict):
        return {str(k): _stringify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_stringify(v) for v in obj]
    return obj


def dump_json(obj: Any, big_ints_as_strings: bool = True) -> str:
    if big_ints_as_strings:
        obj = _stringify(obj)
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)
