"""Issue detection.

Scores every variant against its original by structural distance, keeps the
ones strictly farther than the threshold, and reports at most one issue per
original containing the k farthest survivors. The ordering rule is total
(distance descending, then substitution position, then replacement token),
so identical inputs always produce identical reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .gateway import TranslationPair
from .metrics import Distance, Metric, distance, kind_for_metric, metric_for_kind
from .structures import StructureRepr
from .variants import Variant

DEFAULT_THRESHOLDS = {
    Metric.RAW_LEVENSHTEIN: 10,
    Metric.CONSTITUENCY_L1: 4,
    Metric.DEPENDENCY_L1: 4,
}
HIGH_PRECISION_THRESHOLD = 15
DEFAULT_REPORT_K = 3


def default_threshold(metric: Metric) -> int:
    return DEFAULT_THRESHOLDS[metric]


@dataclass(frozen=True)
class VariantInput:
    """One variant ready for scoring: sentence, translation, representation."""

    variant: Variant
    pair: TranslationPair
    representation: StructureRepr


@dataclass(frozen=True)
class OriginalInput:
    """One original with everything detection needs, id = corpus line."""

    case_id: int
    pair: TranslationPair
    representation: StructureRepr
    variants: tuple[VariantInput, ...]


@dataclass(frozen=True)
class ScoredVariant:
    variant: Variant
    pair: TranslationPair
    dist: Distance

    @property
    def order_key(self) -> tuple[int, int, str]:
        return (-self.dist.value, self.variant.source_position, self.variant.replacement_token)


@dataclass(frozen=True)
class Issue:
    original_id: int
    original: TranslationPair
    reported: tuple[ScoredVariant, ...]
    metric: Metric
    threshold: int

    def __post_init__(self):
        if self.threshold < 0:
            raise ValueError("threshold cannot be negative")
        if not self.reported:
            raise ValueError("an issue must report at least one variant")
        for sv in self.reported:
            if sv.dist.value <= self.threshold:
                raise ValueError("reported variants must lie strictly above the threshold")
        keys = [sv.order_key for sv in self.reported]
        if keys != sorted(keys):
            raise ValueError("reported variants must be sorted farthest-first")


@dataclass(frozen=True)
class DetectionConfig:
    metric: Metric
    threshold: int
    top_k: int = DEFAULT_REPORT_K

    def __post_init__(self):
        if self.threshold < 0:
            raise ValueError("threshold cannot be negative")
        if self.top_k < 1:
            raise ValueError("top_k must be positive")


def score_variants(original_repr: StructureRepr,
                   variants: Sequence[VariantInput]) -> list[ScoredVariant]:
    """Distance of each variant's target from the original's target.

    The returned list is already in reporting order, so thresholding at any
    level keeps a prefix and sweeps can reuse one scoring pass.
    """
    scored = [
        ScoredVariant(variant=v.variant, pair=v.pair,
                      dist=distance(original_repr, v.representation))
        for v in variants
    ]
    scored.sort(key=lambda sv: sv.order_key)
    return scored


def detect_scored(case_id: int, original: TranslationPair,
                  scored: Sequence[ScoredVariant], metric: Metric,
                  threshold: int, k: int) -> Issue | None:
    if k < 1:
        raise ValueError("k must be positive")
    if threshold < 0:
        raise ValueError("threshold cannot be negative")
    survivors = [sv for sv in scored if sv.dist.value > threshold]
    if not survivors:
        return None
    return Issue(
        original_id=case_id,
        original=original,
        reported=tuple(survivors[:k]),
        metric=metric,
        threshold=threshold,
    )


def detect(original: OriginalInput, threshold: int, k: int) -> Issue | None:
    """Score, filter strictly above threshold, keep the k farthest.

    Returns None when nothing survives; an original with no variants can
    never produce an issue.
    """
    if not original.variants:
        return None
    scored = score_variants(original.representation, original.variants)
    metric = metric_for_kind(original.representation.kind)
    return detect_scored(original.case_id, original.pair, scored, metric,
                         threshold, k)


@dataclass
class DetectionResult:
    issues: list[Issue] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


def run_detection(originals: Sequence[OriginalInput],
                  config: DetectionConfig) -> DetectionResult:
    """Map detection over originals in corpus order.

    Originals without variants are untestable and land in diagnostics
    instead of the issue list; every emitted issue keeps its corpus id.
    """
    result = DetectionResult()
    expected_kind = kind_for_metric(config.metric)
    for original in originals:
        if original.representation.kind is not expected_kind:
            raise ValueError(
                f"original {original.case_id} has {original.representation.kind.value} "
                f"representation but config requests {config.metric.value}"
            )
        if not original.variants:
            result.diagnostics.append(
                f"original {original.case_id} has no variants; untestable"
            )
            continue
        issue = detect(original, config.threshold, config.top_k)
        if issue is not None:
            result.issues.append(issue)
    return result
