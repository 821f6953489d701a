"""Three-valued verdict domain for runtime monitors."""

from __future__ import annotations

import enum


class Verdict3(enum.Enum):
    """Monitoring verdict: definitely satisfied, definitely violated, or undecided."""

    TOP = "top"
    BOT = "bot"
    UNKNOWN = "unknown"

    @property
    def is_definite(self) -> bool:
        return self is not Verdict3.UNKNOWN

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]

    def __str__(self) -> str:
        return self.value


_SYMBOLS = {
    Verdict3.TOP: "⊤",
    Verdict3.BOT: "⊥",
    Verdict3.UNKNOWN: "?",
}
