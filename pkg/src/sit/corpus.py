"""Source-sentence ingestion: tokenization, POS tagging, candidate selection.

Tagging is lexicon-driven so the whole pipeline stays deterministic and
offline; pre-tagged CoNLL-U input (see :mod:`sit.structures`) can override it.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import CorpusError

# Marks split off the edges of whitespace-separated chunks. Hyphens and
# apostrophes are deliberately absent: compounds and contractions stay whole.
_EDGE_PUNCT = set('.,!?;:"()')


class PosTag(Enum):
    NOUN = "NOUN"
    ADJ = "ADJ"
    VERB = "VERB"
    ADV = "ADV"
    DET = "DET"
    PRON = "PRON"
    ADP = "ADP"
    NUM = "NUM"
    CONJ = "CONJ"
    PART = "PART"
    PUNCT = "PUNCT"
    OTHER = "OTHER"


# Candidate positions for substitution are restricted to these tags.
CANDIDATE_TAGS = frozenset({PosTag.NOUN, PosTag.ADJ})


@dataclass(frozen=True)
class Token:
    text: str
    index: int

    def __post_init__(self):
        if not self.text or any(ch.isspace() for ch in self.text):
            raise ValueError(f"token text must be non-empty without whitespace: {self.text!r}")


@dataclass(frozen=True)
class TaggedSentence:
    tokens: tuple[Token, ...]
    tags: tuple[PosTag, ...]
    raw: str

    def __post_init__(self):
        if len(self.tokens) != len(self.tags):
            raise ValueError("tokens and tags must be parallel")

    @property
    def texts(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)


class PosLexicon:
    """Case-insensitive word -> tag map; unknown words resolve to OTHER."""

    def __init__(self, entries: dict[str, PosTag] | None = None):
        self._entries = {w.lower(): t for w, t in (entries or {}).items()}

    def lookup(self, word: str) -> PosTag:
        return self._entries.get(word.lower(), PosTag.OTHER)

    def __len__(self) -> int:
        return len(self._entries)

    @classmethod
    def from_file(cls, path: str | Path) -> "PosLexicon":
        """Load a two-column TSV (``word<TAB>TAG``).

        Lines starting with ``#`` are ignored; duplicate words keep the last
        entry.
        """
        entries: dict[str, PosTag] = {}
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise CorpusError(f"cannot read lexicon {path}: {exc}") from exc
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise CorpusError(f"lexicon {path} line {lineno}: expected 'word<TAB>TAG'")
            word, tag_name = parts[0].strip(), parts[1].strip()
            try:
                tag = PosTag[tag_name]
            except KeyError:
                raise CorpusError(f"lexicon {path} line {lineno}: unknown tag {tag_name!r}") from None
            entries[word.lower()] = tag
        return cls(entries)


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens.

    Whitespace separates chunks; the edge punctuation marks .,!?;:"() are
    peeled off both ends of each chunk into their own tokens. Hyphenated
    words and contractions survive intact.
    """
    out: list[str] = []
    for chunk in text.split():
        lead: list[str] = []
        trail: list[str] = []
        while chunk and chunk[0] in _EDGE_PUNCT:
            lead.append(chunk[0])
            chunk = chunk[1:]
        while chunk and chunk[-1] in _EDGE_PUNCT:
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        out.extend(lead)
        if chunk:
            out.append(chunk)
        out.extend(reversed(trail))
    return [Token(text=t, index=i) for i, t in enumerate(out)]


def detokenize(tokens: list[Token] | tuple[Token, ...]) -> str:
    """Render tokens back to a sentence string (single spaces).

    This is the canonical surface sent to translators for originals and
    variants alike, so both sides of a comparison get identical treatment.
    """
    return " ".join(t.text for t in tokens)


def _is_pure_punct(text: str) -> bool:
    return all(unicodedata.category(ch).startswith("P") for ch in text)


def tag_sentence(tokens: list[Token], lexicon: PosLexicon, raw: str | None = None) -> TaggedSentence:
    """Tag each token via the lexicon; pure punctuation is always PUNCT."""
    tags = []
    for tok in tokens:
        if _is_pure_punct(tok.text):
            tags.append(PosTag.PUNCT)
        else:
            tags.append(lexicon.lookup(tok.text))
    if raw is None:
        raw = detokenize(tokens)
    return TaggedSentence(tokens=tuple(tokens), tags=tuple(tags), raw=raw)


def select_candidates(sentence: TaggedSentence) -> list[int]:
    """Positions eligible for substitution (nouns and adjectives), ascending."""
    return [i for i, tag in enumerate(sentence.tags) if tag in CANDIDATE_TAGS]


@dataclass
class LoadedCorpus:
    """Kept sentences plus the count of lines dropped by the length filter."""

    sentences: list[str] = field(default_factory=list)
    filtered: int = 0


def load_corpus(path: str | Path, max_words: int = 35) -> LoadedCorpus:
    """Read one sentence per line, dropping blanks and over-long lines.

    Lines whose whitespace-separated word count exceeds ``max_words`` are
    dropped and counted in ``filtered``. Word count is taken on the raw line,
    before any tokenization.
    """
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from exc
    result = LoadedCorpus()
    for lineno, raw_line in enumerate(data.split(b"\n"), start=1):
        try:
            line = raw_line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorpusError(f"corpus {path} line {lineno}: invalid UTF-8 ({exc})") from exc
        line = line.rstrip("\r")
        if not line.strip():
            continue
        if len(line.split()) > max_words:
            result.filtered += 1
            continue
        result.sentences.append(line)
    return result
