"""Translation collection.

A neutral HTTP translator contract (POST /translate) plus a deterministic
word-for-word mock with taxonomy-labeled fault injection. Results are cached
by exact text so reruns are free and byte-stable; the batch runner dedupes
in-batch repeats, bounds concurrency, and paces requests.
"""

from __future__ import annotations

import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

import requests

from .errors import CacheError, CorpusError, FaultConfigError, ProtocolError


@dataclass(frozen=True)
class TranslationRequest:
    text: str
    source_lang: str
    target_lang: str
    engine: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("request text must be nonempty")
        if not self.source_lang or not self.target_lang or self.source_lang == self.target_lang:
            raise ValueError("language codes must be nonempty and distinct")

    @property
    def key(self) -> tuple[str, str, str, str]:
        return (self.engine, self.source_lang, self.target_lang, self.text)


@dataclass(frozen=True)
class TranslationPair:
    source: str
    target: str
    engine: str
    from_cache: bool = False


@dataclass(frozen=True)
class FailedTranslation:
    request: TranslationRequest
    error: str
    attempts: int


class FaultKind(Enum):
    UNDER_TRANSLATION = "UNDER_TRANSLATION"
    OVER_TRANSLATION = "OVER_TRANSLATION"
    INCORRECT_MODIFICATION = "INCORRECT_MODIFICATION"
    WORD_MISTRANSLATION = "WORD_MISTRANSLATION"
    UNCLEAR_LOGIC = "UNCLEAR_LOGIC"


@dataclass(frozen=True)
class FaultSpec:
    """One deliberate corruption, applied when ``target_text`` is translated.

    ``detail`` names the source token to corrupt (first occurrence) for
    UNDER/OVER/INCORRECT_MODIFICATION; for WORD_MISTRANSLATION it is
    ``token=wrong_target``; UNCLEAR_LOGIC ignores it.
    """

    kind: FaultKind
    target_text: str
    detail: str = ""


def read_word_map(path: str | Path) -> dict[str, str]:
    """Load a two-column TSV (``word<TAB>value``), used for word lexicons.

    Blank lines and ``#`` comments are skipped; duplicate words keep the
    last entry.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read lexicon {path}: {exc}") from exc
    table: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 2:
            raise CorpusError(f"lexicon {path} line {lineno}: expected 'word<TAB>value'")
        table[parts[0].strip()] = parts[1].strip()
    return table


def _find_token(tokens: list[str], name: str, text: str) -> int:
    try:
        return tokens.index(name)
    except ValueError:
        raise FaultConfigError(f"fault names token {name!r} absent from text {text!r}") from None


def mock_translate(text: str, lexicon: Mapping[str, str],
                   faults: Sequence[FaultSpec] = ()) -> str:
    """Word-for-word mapping with at most one injected fault.

    Fault-free output maps token i of the source to lexicon[token i]
    (identity for unknown words), so structure invariance holds exactly and
    injected faults are the only detectable signal.
    """
    source = text.split()
    mapped = [lexicon.get(tok, lexicon.get(tok.lower(), tok)) for tok in source]
    applicable = [f for f in faults if f.target_text == text]
    if len(applicable) > 1:
        raise FaultConfigError(f"multiple faults target the same text: {text!r}")
    if applicable:
        fault = applicable[0]
        kind = fault.kind
        if kind is FaultKind.UNDER_TRANSLATION:
            i = _find_token(source, fault.detail, text)
            del mapped[i]
        elif kind is FaultKind.OVER_TRANSLATION:
            i = _find_token(source, fault.detail, text)
            mapped.insert(i, mapped[i])
        elif kind is FaultKind.WORD_MISTRANSLATION:
            name, sep, wrong = fault.detail.partition("=")
            if not sep:
                raise FaultConfigError(
                    f"WORD_MISTRANSLATION detail must be 'token=wrong_target', got {fault.detail!r}"
                )
            i = _find_token(source, name, text)
            mapped[i] = wrong
        elif kind is FaultKind.INCORRECT_MODIFICATION:
            i = _find_token(source, fault.detail, text)
            if i == 0:
                raise FaultConfigError(
                    f"INCORRECT_MODIFICATION needs a left neighbor; {fault.detail!r} is first in {text!r}"
                )
            mapped[i - 1], mapped[i] = mapped[i], mapped[i - 1]
        elif kind is FaultKind.UNCLEAR_LOGIC:
            if mapped:
                mapped.append(mapped.pop(0))
    return " ".join(mapped)


class MockTranslator:
    """Translator-protocol wrapper around :func:`mock_translate`."""

    engine = "mock"

    def __init__(self, lexicon: Mapping[str, str], faults: Sequence[FaultSpec] = ()):
        seen: set[str] = set()
        for f in faults:
            if f.target_text in seen:
                raise FaultConfigError(f"multiple faults target the same text: {f.target_text!r}")
            seen.add(f.target_text)
        self._lexicon = dict(lexicon)
        self._faults = list(faults)

    def translate(self, text: str, source_lang: str, target_lang: str) -> str:
        return mock_translate(text, self._lexicon, self._faults)


class TranslationError(Exception):
    """Engine-level failure after retries; carries the attempt count."""

    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts


class HttpTranslator:
    """Generic engine client: POST {base_url}/translate -> {"translation"}.

    Retries timeouts, 429s and 5xx with exponential backoff (3 attempts,
    starting at 500 ms); other failures surface immediately. The API key, if
    configured, is sent in ``api_key_header`` and read from SIT_API_KEY
    unless given explicitly.
    """

    def __init__(self, base_url: str, engine: str = "http", *,
                 api_key_header: str | None = None, api_key: str | None = None,
                 attempts: int = 3, backoff: float = 0.5, timeout: float = 30.0,
                 session: requests.Session | None = None):
        self.base_url = base_url.rstrip("/")
        self.engine = engine
        self.attempts = attempts
        self.backoff = backoff
        self.timeout = timeout
        self._session = session or requests.Session()
        self._headers = {}
        if api_key_header:
            key = api_key if api_key is not None else os.environ.get("SIT_API_KEY", "")
            self._headers[api_key_header] = key

    def translate(self, text: str, source_lang: str, target_lang: str) -> str:
        payload = {"text": text, "source_lang": source_lang, "target_lang": target_lang}
        last_error = "no attempt made"
        attempt = 0
        for attempt in range(1, self.attempts + 1):
            if attempt > 1:
                time.sleep(self.backoff * (2 ** (attempt - 2)))
            try:
                resp = self._session.post(
                    f"{self.base_url}/translate", json=payload,
                    headers=self._headers, timeout=self.timeout,
                )
            except requests.RequestException as exc:
                last_error = f"request failed: {exc}"
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = f"engine returned {resp.status_code}"
                continue
            if resp.status_code != 200:
                raise TranslationError(f"engine returned {resp.status_code}: {resp.text[:200]}", attempt)
            try:
                return resp.json()["translation"]
            except (ValueError, KeyError, TypeError) as exc:
                raise ProtocolError(
                    f"malformed translation response: {exc}; payload excerpt: {resp.text[:200]!r}"
                ) from exc
        raise TranslationError(last_error, attempt)


class RateLimiter:
    """Min-interval pacing; None disables limiting."""

    def __init__(self, per_second: float | None):
        self._interval = 1.0 / per_second if per_second else 0.0
        self._lock = threading.Lock()
        self._last = 0.0

    def acquire(self):
        if not self._interval:
            return
        with self._lock:
            now = time.monotonic()
            wait = self._last + self._interval - now
            if wait > 0:
                time.sleep(wait)
            self._last = time.monotonic()


class TranslationCache:
    """Exact-text translation memory persisted as a JSON array.

    Reads are lock-free dict lookups; writes serialize on a lock. ``store``
    writes atomically (temp file then rename), so the last writer wins and
    the file stays valid JSON.
    """

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self._entries: dict[tuple[str, str, str, str], dict] = {}
        self._lock = threading.Lock()

    @classmethod
    def load(cls, path: str | Path) -> "TranslationCache":
        cache = cls(path)
        p = Path(path)
        if not p.exists():
            return cache
        try:
            records = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CacheError(f"corrupt cache {path}: {exc.msg} at byte offset {exc.pos}") from exc
        for rec in records:
            key = (rec["engine"], rec["source_lang"], rec["target_lang"], rec["text"])
            cache._entries[key] = rec
        return cache

    def get(self, request: TranslationRequest) -> str | None:
        rec = self._entries.get(request.key)
        return rec["target"] if rec is not None else None

    def put(self, request: TranslationRequest, target: str):
        with self._lock:
            self._entries[request.key] = {
                "engine": request.engine,
                "source_lang": request.source_lang,
                "target_lang": request.target_lang,
                "text": request.text,
                "target": target,
                "ts": time.time(),
            }

    def __len__(self) -> int:
        return len(self._entries)

    def store(self, path: str | Path | None = None):
        p = Path(path) if path is not None else self.path
        if p is None:
            raise ValueError("no cache path configured")
        with self._lock:
            records = [self._entries[k] for k in sorted(self._entries)]
            tmp = p.with_suffix(p.suffix + ".tmp")
            tmp.write_text(json.dumps(records, ensure_ascii=False, indent=1), encoding="utf-8")
            os.replace(tmp, p)


@dataclass
class BatchResult:
    results: list[TranslationPair | FailedTranslation] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    @property
    def pairs(self) -> list[TranslationPair]:
        return [r for r in self.results if isinstance(r, TranslationPair)]

    @property
    def failures(self) -> list[FailedTranslation]:
        return [r for r in self.results if isinstance(r, FailedTranslation)]


def translate_batch(requests_in: Sequence[TranslationRequest], translator,
                    cache: TranslationCache | None = None, *,
                    concurrency: int = 4,
                    rate_per_second: float | None = None) -> BatchResult:
    """Translate a batch, cache-first, preserving input order.

    Duplicate texts within the batch trigger one engine call. Per-request
    failures become FailedTranslation records in place; cache write problems
    degrade to warnings in diagnostics.
    """
    result = BatchResult()
    limiter = RateLimiter(rate_per_second)
    outcomes: dict[tuple[str, str, str, str], TranslationPair | FailedTranslation] = {}
    misses: list[TranslationRequest] = []
    for req in requests_in:
        if req.key in outcomes or any(m.key == req.key for m in misses):
            continue
        cached = cache.get(req) if cache is not None else None
        if cached is not None:
            outcomes[req.key] = TranslationPair(
                source=req.text, target=cached, engine=req.engine, from_cache=True
            )
        else:
            misses.append(req)

    def run_one(req: TranslationRequest) -> TranslationPair | FailedTranslation:
        limiter.acquire()
        try:
            target = translator.translate(req.text, req.source_lang, req.target_lang)
        except TranslationError as exc:
            return FailedTranslation(request=req, error=str(exc), attempts=exc.attempts)
        except Exception as exc:
            return FailedTranslation(request=req, error=str(exc), attempts=1)
        return TranslationPair(source=req.text, target=target, engine=req.engine)

    if misses:
        with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
            for req, outcome in zip(misses, pool.map(run_one, misses)):
                outcomes[req.key] = outcome
                if isinstance(outcome, TranslationPair) and cache is not None:
                    cache.put(req, outcome.target)
                if isinstance(outcome, FailedTranslation):
                    result.diagnostics.append(
                        f"translation failed after {outcome.attempts} attempts: {outcome.error}"
                    )
    if cache is not None and cache.path is not None and misses:
        try:
            cache.store()
        except OSError as exc:
            result.diagnostics.append(f"warning: cache write failed: {exc}")
    for req in requests_in:
        result.results.append(outcomes[req.key])
    return result
