"""Fill-mask model backends.

Two implementations of the same small interface: a bundled deterministic
unigram model (no downloads, pinned name/version, suitable for golden-file
tests) and a transformers fill-mask pipeline for real deployments. Both
return candidates already cleaned to whole tokens: no whitespace, no subword
continuation markers, duplicates merged.
"""

from __future__ import annotations

import os
import zlib
from dataclasses import dataclass

BUILTIN_MODEL = "builtin-unigram"
BUILTIN_VERSION = "1.0"

# Frequency table for the bundled model. Counts are invented but fixed;
# they only need to be stable and to produce strictly positive scores.
_UNIGRAMS = {
    "time": 98, "year": 93, "people": 90, "way": 87, "day": 85, "man": 82,
    "thing": 80, "woman": 77, "life": 75, "child": 72, "world": 70,
    "school": 67, "state": 65, "family": 62, "student": 60, "group": 58,
    "country": 56, "problem": 54, "hand": 52, "part": 50, "place": 48,
    "case": 46, "week": 44, "company": 42, "system": 40, "program": 38,
    "question": 36, "work": 34, "number": 32, "night": 30, "point": 28,
    "home": 26, "water": 24, "room": 22, "mother": 20, "area": 18,
    "money": 16, "story": 14, "fact": 12, "month": 10, "book": 9,
    "eye": 8, "job": 7, "word": 6, "house": 5, "turn": 4, "fork": 3,
    "bend": 2, "corner": 2, "river": 2, "road": 2, "village": 1,
}
_TOTAL = sum(_UNIGRAMS.values())


@dataclass(frozen=True)
class Candidate:
    token: str
    score: float


class UnigramModel:
    """Deterministic context-salted unigram scorer.

    The base probability is the unigram frequency; a small CRC32-derived
    bonus keyed on (left neighbor, right neighbor, candidate) makes the
    ranking context-sensitive while staying bit-stable across processes.
    """

    name = f"{BUILTIN_MODEL}/{BUILTIN_VERSION}"

    def predict(self, tokens: list[str], mask_index: int, top_k: int) -> list[Candidate]:
        left = tokens[mask_index - 1] if mask_index > 0 else ""
        right = tokens[mask_index + 1] if mask_index + 1 < len(tokens) else ""
        scored = []
        for word, count in _UNIGRAMS.items():
            key = f"{left}\x00{right}\x00{word}".encode("utf-8")
            bonus = (zlib.crc32(key) % 1000) / 1000.0
            score = (count + bonus) / (_TOTAL + 1)
            scored.append(Candidate(token=word, score=score))
        scored.sort(key=lambda c: (-c.score, c.token))
        return scored[:top_k]


class TransformersModel:
    """fill-mask pipeline wrapper; cleans subwords down to whole tokens."""

    def __init__(self, model_name: str):
        from transformers import pipeline

        self._pipe = pipeline("fill-mask", model=model_name)
        self.name = model_name
        self._mask = self._pipe.tokenizer.mask_token

    def predict(self, tokens: list[str], mask_index: int, top_k: int) -> list[Candidate]:
        if top_k == 0:
            return []
        masked = list(tokens)
        masked[mask_index] = self._mask
        # over-fetch: whitespace/subword filtering below can drop entries
        raw = self._pipe(" ".join(masked), top_k=max(top_k * 4, 8))
        merged: dict[str, float] = {}
        for entry in raw:
            token = entry["token_str"].strip()
            if not token or any(ch.isspace() for ch in token):
                continue
            if token.startswith("##"):
                continue
            merged[token] = merged.get(token, 0.0) + float(entry["score"])
        cleaned = [Candidate(token=t, score=min(s, 1.0)) for t, s in merged.items()]
        cleaned.sort(key=lambda c: (-c.score, c.token))
        return cleaned[:top_k]


def load_model(name: str | None = None):
    """Resolve a backend from an explicit name or MLM_SIDECAR_MODEL."""
    resolved = name or os.environ.get("MLM_SIDECAR_MODEL", BUILTIN_MODEL)
    if resolved == BUILTIN_MODEL:
        return UnigramModel()
    return TransformersModel(resolved)
