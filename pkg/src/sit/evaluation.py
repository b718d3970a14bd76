"""Accuracy evaluation, threshold sweeps, and the fault-injection loop.

Top-k accuracy is the fraction of reported issues whose original pair or
top-k reported variants are marked buggy. Labels normally come from a file;
the fault-injection experiment derives them from its own fault plan instead,
giving exact ground truth without human annotation.

Accuracy values are exact rationals. A report with zero issues has no
defined accuracy (the definition divides by the issue count), so zero-issue
points carry an explicit undefined marker rather than a made-up number.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import PosLexicon, TaggedSentence
from .detector import (DetectionConfig, Issue, OriginalInput, ScoredVariant,
                       VariantInput, detect_scored, run_detection, score_variants)
from .errors import FaultConfigError, UndefinedAccuracyError
from .gateway import FaultKind, FaultSpec, MockTranslator, TranslationPair
from .metrics import Metric, kind_for_metric, metric_for_kind
from .structures import ReprKind, StructureRepr, StubParser
from .variants import DictionaryBackend, Variant, generate_variants


@dataclass(frozen=True)
class IssueLabel:
    """Ground truth for one issue: which reported positions are buggy.

    Position 0 is the original pair; position j >= 1 is the j-th reported
    variant.
    """

    issue_id: int
    buggy_positions: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "buggy_positions", frozenset(self.buggy_positions))
        if any(p < 0 for p in self.buggy_positions):
            raise ValueError("buggy positions cannot be negative")


def load_labels(path: str | Path) -> list[IssueLabel]:
    """Read a JSON array of {"issue_id", "buggy_positions"} records."""
    records = json.loads(Path(path).read_text(encoding="utf-8"))
    return [
        IssueLabel(issue_id=int(rec["issue_id"]),
                   buggy_positions=frozenset(int(p) for p in rec["buggy_positions"]))
        for rec in records
    ]


@dataclass(frozen=True)
class AccuracyReport:
    k: int
    issue_count: int
    buggy_count: int
    accuracy: Fraction

    def __post_init__(self):
        if self.accuracy != Fraction(self.buggy_count, self.issue_count):
            raise ValueError("accuracy must equal buggy_count/issue_count exactly")


def _is_buggy(positions: frozenset[int], k: int, reported_count: int) -> bool:
    checkable = min(k, reported_count)
    if 0 in positions:
        return True
    return any(1 <= p <= checkable for p in positions)


def topk_accuracy_from_counts(issue_ids: Sequence[int],
                              reported_counts: Sequence[int],
                              labels: Sequence[IssueLabel], k: int) -> AccuracyReport:
    if k < 1:
        raise ValueError("k must be positive")
    if not issue_ids:
        raise UndefinedAccuracyError("accuracy is undefined when no issues were reported")
    by_id = {label.issue_id: label.buggy_positions for label in labels}
    buggy = 0
    for issue_id, reported in zip(issue_ids, reported_counts):
        positions = by_id.get(issue_id, frozenset())
        if _is_buggy(positions, k, reported):
            buggy += 1
    total = len(issue_ids)
    return AccuracyReport(k=k, issue_count=total, buggy_count=buggy,
                          accuracy=Fraction(buggy, total))


def topk_accuracy(issues: Sequence[Issue], labels: Sequence[IssueLabel],
                  k: int) -> AccuracyReport:
    """Fraction of issues with a buggy sentence among {original, top-k variants}.

    An issue with no label record counts as not buggy. A labeled position
    beyond what the issue actually reported cannot count: only sentences a
    reader would see can be credited.
    """
    return topk_accuracy_from_counts(
        [issue.original_id for issue in issues],
        [len(issue.reported) for issue in issues],
        labels, k,
    )


@dataclass(frozen=True)
class SweepPoint:
    """One sweep row; accuracy is None when the point reported no issues."""

    threshold: int
    issue_count: int
    top1_accuracy: Fraction | None


def threshold_sweep(originals: Sequence[OriginalInput], thresholds: Sequence[int],
                    labels: Sequence[IssueLabel], k: int = 1) -> list[SweepPoint]:
    """Detection at each threshold over fixed inputs, distances computed once.

    Scored variant lists are sorted farthest-first, so the survivors at any
    threshold are a prefix and label positions stay aligned across points.
    """
    if list(thresholds) != sorted(set(thresholds)):
        raise ValueError("thresholds must be strictly ascending")
    if any(t < 0 for t in thresholds):
        raise ValueError("thresholds cannot be negative")
    scored_cache: list[tuple[OriginalInput, list[ScoredVariant]]] = [
        (orig, score_variants(orig.representation, orig.variants))
        for orig in originals
    ]
    points: list[SweepPoint] = []
    for threshold in thresholds:
        issues = []
        for orig, scored in scored_cache:
            if not scored:
                continue
            metric = metric_for_kind(orig.representation.kind)
            issue = detect_scored(orig.case_id, orig.pair, scored, metric,
                                  threshold, k)
            if issue is not None:
                issues.append(issue)
        if issues:
            accuracy = topk_accuracy(issues, labels, k).accuracy
        else:
            accuracy = None
        points.append(SweepPoint(threshold=threshold, issue_count=len(issues),
                                 top1_accuracy=accuracy))
    return points


# ---------------------------------------------------------------------------
# Fault-injection experiment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlannedFault:
    """One fault assigned to a specific variant of a specific original."""

    original_id: int
    position: int
    replacement: str
    kind: FaultKind
    detail: str = ""


def load_fault_plan(path: str | Path) -> list[PlannedFault]:
    """Read a JSON array of fault assignments."""
    records = json.loads(Path(path).read_text(encoding="utf-8"))
    plan = []
    for rec in records:
        try:
            kind = FaultKind(rec["kind"])
        except ValueError:
            raise FaultConfigError(f"unknown fault kind {rec['kind']!r}") from None
        plan.append(PlannedFault(
            original_id=int(rec["original_id"]),
            position=int(rec["position"]),
            replacement=str(rec["replacement"]),
            kind=kind,
            detail=str(rec.get("detail", "")),
        ))
    return plan


@dataclass(frozen=True)
class ExperimentReport:
    metric: Metric
    threshold: int
    k: int
    seed: int
    issue_count: int
    faulted_count: int
    recall: Fraction
    precision: Fraction | None
    accuracy_report: AccuracyReport | None
    issues: tuple[Issue, ...]
    labels: tuple[IssueLabel, ...]


def _represent(target: str, kind: ReprKind, parser: StubParser) -> StructureRepr:
    if kind is ReprKind.RAW:
        return StructureRepr.raw(target)
    multiset = parser.parse(target)
    if kind is ReprKind.CONSTITUENCY:
        return StructureRepr.constituency(multiset)
    return StructureRepr.dependency(multiset)


def resolve_fault_plan(plan: Sequence[PlannedFault],
                       variants_by_original: Mapping[int, Sequence[Variant]]) -> list[FaultSpec]:
    """Turn variant coordinates into concrete fault targets.

    A plan entry must name an existing (original, position, replacement)
    variant; anything else is a configuration error.
    """
    specs = []
    for fault in plan:
        candidates = variants_by_original.get(fault.original_id, ())
        match = next(
            (v for v in candidates
             if v.source_position == fault.position
             and v.replacement_token == fault.replacement),
            None,
        )
        if match is None:
            raise FaultConfigError(
                f"fault plan names variant (original {fault.original_id}, "
                f"position {fault.position}, replacement {fault.replacement!r}) "
                "which was never generated"
            )
        specs.append(FaultSpec(kind=fault.kind, target_text=match.text, detail=fault.detail))
    return specs


def build_mock_inputs(sentences: Sequence[TaggedSentence],
                      substitution_table: Mapping[str, Sequence[str]],
                      plan: Sequence[PlannedFault], kind: ReprKind, *,
                      pos_lexicon: PosLexicon,
                      translation_lexicon: Mapping[str, str] | None = None,
                      relation_lexicon: Mapping[str, str] | None = None,
                      gen_k: int = 5) -> tuple[list[OriginalInput], set[str]]:
    """Run generation, mock translation, and representation.

    Returns detection-ready inputs plus the set of variant source texts that
    carry a planned fault.
    """
    backend = DictionaryBackend(substitution_table)
    parser = StubParser(relation_lexicon)
    lexicon = dict(translation_lexicon or {})

    variants_by_original: dict[int, list[Variant]] = {}
    for case_id, sentence in enumerate(sentences):
        batch = generate_variants(sentence, backend, gen_k, pos_lexicon)
        variants_by_original[case_id] = list(batch.variants)

    fault_specs = resolve_fault_plan(plan, variants_by_original)
    translator = MockTranslator(lexicon, fault_specs)
    faulted_texts = {spec.target_text for spec in fault_specs}

    originals: list[OriginalInput] = []
    for case_id, sentence in enumerate(sentences):
        source = " ".join(sentence.texts)
        target = translator.translate(source, "src", "tgt")
        original_pair = TranslationPair(source=source, target=target, engine="mock")
        variant_inputs = []
        for variant in variants_by_original[case_id]:
            v_target = translator.translate(variant.text, "src", "tgt")
            variant_inputs.append(VariantInput(
                variant=variant,
                pair=TranslationPair(source=variant.text, target=v_target, engine="mock"),
                representation=_represent(v_target, kind, parser),
            ))
        originals.append(OriginalInput(
            case_id=case_id,
            pair=original_pair,
            representation=_represent(target, kind, parser),
            variants=tuple(variant_inputs),
        ))
    return originals, faulted_texts


def fault_injection_experiment(sentences: Sequence[TaggedSentence],
                               substitution_table: Mapping[str, Sequence[str]],
                               plan: Sequence[PlannedFault],
                               metric: Metric, threshold: int, k: int, seed: int,
                               *,
                               pos_lexicon: PosLexicon,
                               translation_lexicon: Mapping[str, str] | None = None,
                               relation_lexicon: Mapping[str, str] | None = None,
                               gen_k: int = 5) -> ExperimentReport:
    """Closed-loop pipeline over the mock translator with known ground truth.

    Runs generation, translation, representation, and detection, then scores
    the detector against the plan itself: recall is the fraction of faulted
    originals whose issue surfaced the faulty variant in the top k, precision
    the fraction of issues that contain a faulted variant.
    """
    kind = kind_for_metric(metric)
    originals, faulted_texts = build_mock_inputs(
        sentences, substitution_table, plan, kind,
        pos_lexicon=pos_lexicon,
        translation_lexicon=translation_lexicon,
        relation_lexicon=relation_lexicon,
        gen_k=gen_k,
    )
    faulted_ids = {fault.original_id for fault in plan}

    detection = run_detection(originals, DetectionConfig(metric=metric,
                                                         threshold=threshold,
                                                         top_k=k))
    issues = detection.issues

    labels = []
    for issue in issues:
        buggy = frozenset(
            j for j, sv in enumerate(issue.reported, start=1)
            if sv.variant.text in faulted_texts
        )
        labels.append(IssueLabel(issue_id=issue.original_id, buggy_positions=buggy))

    hit_ids = set()
    issues_by_id = {issue.original_id: issue for issue in issues}
    for fault in plan:
        issue = issues_by_id.get(fault.original_id)
        if issue is None:
            continue
        if any(sv.variant.source_position == fault.position
               and sv.variant.replacement_token == fault.replacement
               for sv in issue.reported[:k]):
            hit_ids.add(fault.original_id)
    recall = Fraction(len(hit_ids), len(faulted_ids)) if faulted_ids else Fraction(1)

    if issues:
        true_positives = sum(
            1 for issue in issues
            if any(sv.variant.text in faulted_texts for sv in issue.reported)
        )
        precision = Fraction(true_positives, len(issues))
        accuracy_report = topk_accuracy(issues, labels, k)
    else:
        precision = None
        accuracy_report = None

    return ExperimentReport(
        metric=metric,
        threshold=threshold,
        k=k,
        seed=seed,
        issue_count=len(issues),
        faulted_count=len(faulted_ids),
        recall=recall,
        precision=precision,
        accuracy_report=accuracy_report,
        issues=tuple(issues),
        labels=tuple(labels),
    )
