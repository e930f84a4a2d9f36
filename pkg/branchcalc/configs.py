from typing import Any, Callable, Dict, Mapping, Optional
import argparse
import json
import os
from pathlib import Path

from .arithmetic import DEFAULT_DIGIT_BUDGET, DEFAULT_ROUNDS, next_prime
from .errors import ConfigError, SequenceError
from .tree import PrimeSequence

Config = Mapping[str, Any]

CONFIG_ENV = "BRANCHCALC_CONFIG"

default_config = argparse.Namespace(
    sequence=["7", "11", "13"],
    default_depth=3,
    default_budget=100_000,
    auto_extend=False,
    seed=0,
    threads=1,
    max_rounds=64,
    digit_budget=DEFAULT_DIGIT_BUDGET,
    mr_rounds=DEFAULT_ROUNDS,
    max_radius=10,
    progress=False,
)


def _desk() -> Config:
    return {"sequence": ["7", "11", "13"]}


def _small() -> Config:
    return {"sequence": ["7", "11"]}


def _relation() -> Config:
    # Second prime is large enough for the free-subgroup hypothesis at level 1.
    return {
        "sequence": ["7", str(next_prime(175**21))],
        "auto_extend": True,
        "default_budget": 1_000_000,
    }


def _deep() -> Config:
    return {"sequence": ["7", "11", "13", "17", "19"]}


def _growth151() -> Config:
    return {"sequence": ["151", "157"]}


PRESETS: Dict[str, Callable[[], Config]] = {
    "desk": _desk,
    "small": _small,
    "deep": _deep,
    "relation": _relation,
    "growth151": _growth151,
}


def read_config_file(path: Path) -> Config:
    try:
        with path.open() as fo:
            data = json.load(fo)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f'Could not read config "{path}": {e}')
    if not isinstance(data, dict):
        raise ConfigError(f'Config "{path}" must hold a JSON object.')
    unknown = set(data) - set(vars(default_config))
    if unknown:
        raise ConfigError(f"Unknown config keys: {sorted(unknown)}")
    return data


def _positive(cfg: argparse.Namespace, name: str) -> None:
    value = getattr(cfg, name)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"{name} must be a positive integer, got {value!r}")


def load_config(
    preset: Optional[str] = None,
    path: Optional[Path] = None,
    overrides: Optional[Config] = None,
) -> argparse.Namespace:
    """Defaults, then preset, then config file, then explicit overrides.

    The result carries a validated ``seq`` (PrimeSequence) next to the raw keys.
    """
    merged: Dict[str, Any] = dict(vars(default_config))
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"Preset '{preset}' not recognized.")
        merged.update(PRESETS[preset]())
    if path is None and os.environ.get(CONFIG_ENV):
        path = Path(os.environ[CONFIG_ENV])
    if path is not None:
        merged.update(read_config_file(path))
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    cfg = argparse.Namespace(**merged)
    for name in ("default_depth", "default_budget", "threads", "max_rounds", "mr_rounds"):
        _positive(cfg, name)
    try:
        values = [int(str(x)) for x in cfg.sequence]
    except ValueError:
        raise ConfigError(f"Sequence entries must be decimal integers: {cfg.sequence}")
    try:
        cfg.seq = PrimeSequence(values, auto_extend=bool(cfg.auto_extend), rounds=cfg.mr_rounds)
    except SequenceError as e:
        raise ConfigError(f"Invalid sequence: {e}")
    cfg.sequence = [str(v) for v in values]
    return cfg
