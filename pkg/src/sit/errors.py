"""Exception types shared across the harness."""


class SitError(Exception):
    """Base class for all harness errors."""


class CorpusError(SitError):
    """Corpus or lexicon file could not be loaded."""


class BackendError(SitError):
    """A substitution backend was unreachable or failed."""


class ProtocolError(SitError):
    """A service replied with a payload that violates the wire contract."""


class VariantGenerationError(SitError):
    """Every candidate position of a sentence failed to produce variants."""


class CacheError(SitError):
    """Translation cache file is unreadable or corrupt."""


class FaultConfigError(SitError):
    """A fault specification does not match the text it targets."""


class PtbParseError(SitError):
    """Malformed bracketed constituency tree.

    ``offset`` is the 1-based character position at which parsing failed.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class ConlluParseError(SitError):
    """Malformed CoNLL-U input; ``line`` is the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class AdapterError(SitError):
    """External parser subprocess failed or broke its output contract."""


class MetricMismatchError(SitError):
    """Two representations of different kinds were compared."""


class UndefinedAccuracyError(SitError):
    """Accuracy is undefined because the issue list is empty."""
