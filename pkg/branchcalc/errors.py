from typing import Any, Dict, Optional


class WordSyntaxError(ValueError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


class WordRangeError(ValueError):
    pass


class LevelMismatchError(ValueError):
    pass


class SequenceError(ValueError):
    pass


class SequenceExhausted(LookupError):
    """A level beyond a sequence that may not be extended was requested."""

    def __init__(self, level: int, length: int) -> None:
        super().__init__(
            f"Level {level} requested but the sequence has only {length} primes "
            "and auto extension is off."
        )
        self.level = level


class ConfigError(ValueError):
    pass


class DomainError(ValueError):
    pass


class RelationError(RuntimeError):
    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics if diagnostics is not None else {}
