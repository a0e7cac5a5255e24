"""Sentiment lexicon model and plain-text dictionary loading.

A lexicon bundles four dictionaries: scored sentiment terms, booster
words, scored emoticons, and a slang-to-canonical lookup table. Each
dictionary lives in its own UTF-8 text file with one ``term<TAB>value``
entry per line; blank lines and ``#`` comments are ignored. A JSON
manifest names the file for each role so dictionaries can be swapped
without code changes.

Word terms (sentiment, boosters, slang) are lowercased on load because
the scorer looks tokens up by their lowercased normalized form.
Emoticons are kept verbatim and matched on the raw surface.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterator, Mapping

log = logging.getLogger(__name__)

MAX_TERM_SCORE = 5
MAX_BOOST = 2

MANIFEST_ROLES = ("sentiment", "boosters", "emoticons", "slang")


class LexiconError(ValueError):
    """Malformed lexicon input. Carries the offending line number if known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Lexicon:
    """Immutable dictionaries used by the scorer.

    Sentiment and emoticon scores are integers in [-5,-1] or [1,5];
    booster values are integers in [-2,2]. A term may not appear in
    both the sentiment and booster dictionaries.
    """

    sentiment_terms: Mapping[str, int] = field(default_factory=dict)
    boosters: Mapping[str, int] = field(default_factory=dict)
    emoticons: Mapping[str, int] = field(default_factory=dict)
    slang: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for mapping in (self.sentiment_terms, self.boosters, self.emoticons, self.slang):
            if any(not term for term in mapping):
                raise LexiconError("empty terms are not allowed")
        for term, score in self.sentiment_terms.items():
            _check_score(f"sentiment term {term!r}", score)
        for term, boost in self.boosters.items():
            _check_boost(f"booster {term!r}", boost)
        for face, score in self.emoticons.items():
            _check_score(f"emoticon {face!r}", score)
        for term, target in self.slang.items():
            if not target:
                raise LexiconError(f"slang {term!r} maps to an empty term")
        overlap = sorted(set(self.sentiment_terms) & set(self.boosters))
        if overlap:
            raise LexiconError(
                f"terms present in both sentiment and booster dictionaries: {overlap}"
            )


def _check_score(what: str, score: int) -> None:
    if score == 0 or abs(score) > MAX_TERM_SCORE:
        raise LexiconError(f"{what} has score {score}, expected [-5,-1] or [1,5]")


def _check_boost(what: str, boost: int) -> None:
    if abs(boost) > MAX_BOOST:
        raise LexiconError(f"{what} has boost {boost}, expected [-2,2]")


def _iter_entries(stream: IO[str], role: str) -> Iterator[tuple[int, str, str]]:
    """Yield (line number, term, value) for each data line of a dictionary file."""
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise LexiconError(
                f"{role}: expected 'term<TAB>value', got {line!r}", line=lineno
            )
        term, value = parts[0].strip(), parts[1].strip()
        if not term:
            raise LexiconError(f"{role}: empty term", line=lineno)
        yield lineno, term, value


def _parse_scored(stream: IO[str], role: str, check) -> dict[str, int]:
    entries: dict[str, int] = {}
    for lineno, term, value in _iter_entries(stream, role):
        try:
            score = int(value)
        except ValueError:
            raise LexiconError(
                f"{role}: non-integer score {value!r} for {term!r}", line=lineno
            ) from None
        try:
            check(f"{role} term {term!r}", score)
        except LexiconError as exc:
            raise LexiconError(str(exc), line=lineno) from None
        if term in entries:
            log.warning(
                "%s: duplicate term %r at line %d, last entry wins", role, term, lineno
            )
        entries[term] = score
    return entries


def _parse_slang(stream: IO[str]) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, term, value in _iter_entries(stream, "slang"):
        if not value:
            raise LexiconError(f"slang: empty target for {term!r}", line=lineno)
        if term in entries:
            log.warning(
                "slang: duplicate term %r at line %d, last entry wins", term, lineno
            )
        entries[term] = value
    return entries


def load_lexicon(
    sentiment: IO[str] | None = None,
    boosters: IO[str] | None = None,
    emoticons: IO[str] | None = None,
    slang: IO[str] | None = None,
) -> Lexicon:
    """Build a Lexicon from up to four readable text streams.

    Missing streams yield empty dictionaries; an entirely empty lexicon
    is valid and scores every text (1, -1).
    """
    return Lexicon(
        sentiment_terms=_lower_keys(
            _parse_scored(sentiment, "sentiment", _check_score) if sentiment else {}
        ),
        boosters=_lower_keys(
            _parse_scored(boosters, "boosters", _check_boost) if boosters else {}
        ),
        emoticons=_parse_scored(emoticons, "emoticons", _check_score)
        if emoticons
        else {},
        slang={k.lower(): v.lower() for k, v in (_parse_slang(slang) if slang else {}).items()},
    )


def _lower_keys(entries: dict[str, int]) -> dict[str, int]:
    return {k.lower(): v for k, v in entries.items()}


def load_lexicon_manifest(path: str | Path) -> Lexicon:
    """Load a lexicon from a JSON manifest mapping roles to file names.

    File names are resolved relative to the manifest's directory. All
    four roles (sentiment, boosters, emoticons, slang) must be named.
    """
    manifest_path = Path(path)
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise LexiconError(f"manifest {manifest_path}: invalid JSON ({exc})") from None
    if not isinstance(manifest, dict):
        raise LexiconError(f"manifest {manifest_path}: expected a JSON object")
    missing = [role for role in MANIFEST_ROLES if role not in manifest]
    if missing:
        raise LexiconError(f"manifest {manifest_path}: missing roles {missing}")
    base = manifest_path.parent
    streams: dict[str, IO[str]] = {}
    try:
        for role in MANIFEST_ROLES:
            streams[role] = (base / manifest[role]).open(encoding="utf-8")
        return load_lexicon(
            sentiment=streams["sentiment"],
            boosters=streams["boosters"],
            emoticons=streams["emoticons"],
            slang=streams["slang"],
        )
    finally:
        for stream in streams.values():
            stream.close()


def builtin_lexicon_manifest() -> Path:
    """Path of the seed lexicon manifest shipped with the package."""
    from importlib.resources import files

    return Path(str(files("reviewsent") / "data" / "manifest.json"))


def load_builtin_lexicon() -> Lexicon:
    """Load the small seed lexicon shipped with the package."""
    return load_lexicon_manifest(builtin_lexicon_manifest())
