"""Exception types shared across the pipeline."""

from __future__ import annotations


class ConfigError(ValueError):
    """A tunable is outside its valid range. ``field`` names the offending setting."""

    def __init__(self, field: str, message: str, line: int | None = None) -> None:
        self.field = field
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{field}: {message}")


class TimeOrderError(ValueError):
    """A timestamp arrived earlier than (or equal to) one already consumed."""

    def __init__(self, t_ms: float, last_ms: float) -> None:
        self.t_ms = t_ms
        self.last_ms = last_ms
        super().__init__(f"timestamp {t_ms:g} ms is not after previous {last_ms:g} ms")
