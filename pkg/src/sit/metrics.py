"""Distances between target-sentence representations.

Three metrics, one per representation: character edit distance on raw
strings, and L1 label-count differences on constituency or dependency
relation multisets. All values are raw non-negative integers; thresholds
elsewhere operate on these unnormalized values.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from . import kernels
from .errors import MetricMismatchError
from .structures import RelationMultiset, ReprKind, StructureRepr


class Metric(Enum):
    RAW_LEVENSHTEIN = "raw"
    CONSTITUENCY_L1 = "constituency"
    DEPENDENCY_L1 = "dependency"


_KIND_TO_METRIC = {
    ReprKind.RAW: Metric.RAW_LEVENSHTEIN,
    ReprKind.CONSTITUENCY: Metric.CONSTITUENCY_L1,
    ReprKind.DEPENDENCY: Metric.DEPENDENCY_L1,
}

_METRIC_TO_KIND = {m: k for k, m in _KIND_TO_METRIC.items()}


def metric_for_kind(kind: ReprKind) -> Metric:
    return _KIND_TO_METRIC[kind]


def kind_for_metric(metric: Metric) -> ReprKind:
    return _METRIC_TO_KIND[metric]


@dataclass(frozen=True)
class Distance:
    value: int
    metric: Metric

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("distance cannot be negative")


def levenshtein(a: str, b: str) -> int:
    """Exact character edit distance over Unicode scalar values."""
    if a == b:
        return 0
    return kernels.levenshtein_codepoints(kernels.codepoints(a), kernels.codepoints(b))


def relation_distance(m1: RelationMultiset, m2: RelationMultiset) -> int:
    """Sum over the label union of absolute count differences."""
    total = 0
    for label in m1.counts.keys() | m2.counts.keys():
        total += abs(m1.counts.get(label, 0) - m2.counts.get(label, 0))
    return total


def distance(repr1: StructureRepr, repr2: StructureRepr) -> Distance:
    """Dispatch to the metric matching the shared representation kind."""
    if repr1.kind is not repr2.kind:
        raise MetricMismatchError(
            f"cannot compare {repr1.kind.value} representation with {repr2.kind.value}"
        )
    if repr1.kind is ReprKind.RAW:
        value = levenshtein(repr1.value, repr2.value)
    else:
        value = relation_distance(repr1.value, repr2.value)
    return Distance(value=value, metric=metric_for_kind(repr1.kind))
