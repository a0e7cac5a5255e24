"""Reduce a dual (positive, negative) score to one value on the -5..+5 scale.

The positive strength wins when it outweighs the negative one and vice
versa. Balanced scores are neutral (0) when weak, and unclassifiable
when both sides are strong (p = -n with p >= 4); unclassifiable is
modeled as ``None`` and serialized as the literal string "undefined".
"""

from __future__ import annotations

from enum import Enum

from .engine import SentimentScore

UNDEFINED_LITERAL = "undefined"

# p = -n pairs that cannot be classified
UNDEFINED_THRESHOLD = 4


class Polarity(Enum):
    POSITIVE = "positive"
    NEUTRAL = "neutral"
    NEGATIVE = "negative"
    UNDEFINED = "undefined"


def combine(score: SentimentScore) -> int | None:
    """Combined sentiment of a dual score; ``None`` means unclassifiable."""
    p, n = score.positive, score.negative
    if not (1 <= p <= 5 and -5 <= n <= -1):
        raise ValueError(f"dual score ({p}, {n}) outside contract, scorer bug?")
    total = p + n
    if total > 0:
        return p
    if total < 0:
        return n
    return None if p >= UNDEFINED_THRESHOLD else 0


def polarity_class(combined: int | None) -> Polarity:
    """Polarity bucket of a combined sentiment."""
    if combined is None:
        return Polarity.UNDEFINED
    if combined > 0:
        return Polarity.POSITIVE
    if combined < 0:
        return Polarity.NEGATIVE
    return Polarity.NEUTRAL


def format_combined(combined: int | None) -> str:
    """Serialized form: the integer, or "undefined"."""
    return UNDEFINED_LITERAL if combined is None else str(combined)


def parse_combined(text: str) -> int | None:
    """Inverse of :func:`format_combined`."""
    if text == UNDEFINED_LITERAL:
        return None
    value = int(text)
    if not -5 <= value <= 5:
        raise ValueError(f"combined sentiment {value} outside [-5, 5]")
    return value
