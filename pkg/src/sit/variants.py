"""Similar-sentence generation by single-token masked substitution.

For each noun/adjective position in a tagged sentence, the backend proposes
replacement tokens for the masked slot; survivors of the POS / identity /
single-token filters become variants. Backends are pluggable: an offline
dictionary table and an HTTP client for a masked-language-model service share
one interface.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Protocol, Sequence

import requests

from .corpus import PosLexicon, TaggedSentence, Token, detokenize, select_candidates
from .errors import BackendError, CorpusError, ProtocolError, VariantGenerationError


@dataclass(frozen=True)
class MaskedQuery:
    tokens: tuple[str, ...]
    mask_index: int
    top_k: int

    def __post_init__(self):
        if not 0 <= self.mask_index < len(self.tokens):
            raise ValueError(f"mask_index {self.mask_index} out of range for {len(self.tokens)} tokens")


@dataclass(frozen=True)
class Candidate:
    token: str
    score: float | None = None  # None marks an unscored backend


@dataclass(frozen=True)
class Variant:
    sentence_tokens: tuple[str, ...]
    source_position: int
    original_token: str
    replacement_token: str
    backend_score: float | None = None

    @property
    def text(self) -> str:
        return " ".join(self.sentence_tokens)


class SubstitutionBackend(Protocol):
    def substitute(self, query: MaskedQuery) -> list[Candidate]: ...


class DictionaryBackend:
    """Deterministic table-driven backend; lookup is case-insensitive."""

    def __init__(self, table: Mapping[str, Sequence[str]]):
        self._table = {w.lower(): list(reps) for w, reps in table.items()}

    def substitute(self, query: MaskedQuery) -> list[Candidate]:
        word = query.tokens[query.mask_index]
        replacements = self._table.get(word.lower(), [])
        return [Candidate(token=r) for r in replacements[: max(query.top_k, 0)]]

    @classmethod
    def from_file(cls, path: str | Path) -> "DictionaryBackend":
        return cls(load_substitution_table(path))


def load_substitution_table(path: str | Path) -> dict[str, list[str]]:
    """Load a TSV of ``word<TAB>comma-separated replacements``."""
    table: dict[str, list[str]] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read dictionary {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise CorpusError(f"dictionary {path} line {lineno}: expected 'word<TAB>replacements'")
        table[parts[0].strip()] = [r.strip() for r in parts[1].split(",") if r.strip()]
    return table


class MlmBackend:
    """HTTP client for the masked-substitution service.

    POST {endpoint}/substitute with {"tokens", "mask_index", "top_k"};
    expects {"candidates": [{"token", "score"}]} with scores descending.
    In-flight requests are bounded so one backend instance can be shared
    by concurrent generators.
    """

    def __init__(self, endpoint: str, *, attempts: int = 3, backoff: float = 0.5,
                 timeout: float = 30.0, max_in_flight: int = 4,
                 session: requests.Session | None = None):
        self.endpoint = endpoint.rstrip("/")
        self.attempts = attempts
        self.backoff = backoff
        self.timeout = timeout
        self._gate = threading.Semaphore(max_in_flight)
        self._session = session or requests.Session()

    def substitute(self, query: MaskedQuery) -> list[Candidate]:
        payload = {
            "tokens": list(query.tokens),
            "mask_index": query.mask_index,
            "top_k": query.top_k,
        }
        last_error: Exception | None = None
        for attempt in range(self.attempts):
            if attempt:
                time.sleep(self.backoff * (2 ** (attempt - 1)))
            try:
                with self._gate:
                    resp = self._session.post(
                        f"{self.endpoint}/substitute", json=payload, timeout=self.timeout
                    )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if resp.status_code in (429,) or resp.status_code >= 500:
                last_error = BackendError(f"substitution service returned {resp.status_code}")
                continue
            if resp.status_code != 200:
                raise BackendError(
                    f"substitution service returned {resp.status_code}: {resp.text[:200]}"
                )
            return self._parse(resp)
        raise BackendError(
            f"substitution service unavailable after {self.attempts} attempts: {last_error}"
        )

    def _parse(self, resp: requests.Response) -> list[Candidate]:
        try:
            body = resp.json()
            items = body["candidates"]
            return [Candidate(token=it["token"], score=float(it["score"])) for it in items]
        except (ValueError, KeyError, TypeError) as exc:
            raise ProtocolError(
                f"malformed substitution response: {exc}; payload excerpt: {resp.text[:200]!r}"
            ) from exc


@dataclass(frozen=True)
class PositionFailure:
    position: int
    error: str


@dataclass
class VariantBatch:
    variants: list[Variant] = field(default_factory=list)
    failures: list[PositionFailure] = field(default_factory=list)


def generate_variants(sentence: TaggedSentence, backend: SubstitutionBackend,
                      k: int, lexicon: PosLexicon) -> VariantBatch:
    """Generate up to k variants per candidate position.

    Backend candidates are filtered to same-POS (under the lexicon),
    non-identity (case-insensitive), single-token replacements; the first k
    survivors per position each yield one Variant. Backend failures skip the
    position and are recorded; if every position fails, the sentence fails.
    """
    if k < 1:
        raise ValueError("k must be positive")
    texts = sentence.texts
    batch = VariantBatch()
    positions = select_candidates(sentence)
    for position in positions:
        query = MaskedQuery(tokens=texts, mask_index=position, top_k=k)
        try:
            candidates = backend.substitute(query)
        except (BackendError, ProtocolError) as exc:
            batch.failures.append(PositionFailure(position=position, error=str(exc)))
            continue
        original = texts[position]
        original_tag = sentence.tags[position]
        kept = 0
        for cand in candidates:
            if kept >= k:
                break
            token = cand.token
            if not token or any(ch.isspace() for ch in token):
                continue
            if token.casefold() == original.casefold():
                continue
            if lexicon.lookup(token) is not original_tag:
                continue
            new_tokens = texts[:position] + (token,) + texts[position + 1:]
            batch.variants.append(Variant(
                sentence_tokens=new_tokens,
                source_position=position,
                original_token=original,
                replacement_token=token,
                backend_score=cand.score,
            ))
            kept += 1
    if positions and len(batch.failures) == len(positions):
        raise VariantGenerationError(
            f"all {len(positions)} candidate positions failed for: {detokenize(list(sentence.tokens))!r}"
        )
    return batch


def variant_tokens(sentence_tokens: Sequence[str]) -> list[Token]:
    """Wrap plain strings back into indexed tokens."""
    return [Token(text=t, index=i) for i, t in enumerate(sentence_tokens)]
