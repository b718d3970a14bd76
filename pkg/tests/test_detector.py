import random

import pytest

from sit.detector import (DEFAULT_REPORT_K, DEFAULT_THRESHOLDS,
                          HIGH_PRECISION_THRESHOLD, DetectionConfig, Issue,
                          OriginalInput, ScoredVariant, VariantInput,
                          default_threshold, detect, detect_scored,
                          run_detection, score_variants)
from sit.gateway import TranslationPair
from sit.metrics import Distance, Metric
from sit.structures import RelationMultiset, StructureRepr
from sit.variants import Variant


def scored(dist, position=1, replacement="x"):
    variant = Variant(
        sentence_tokens=("w",) * (position + 1) + (replacement,),
        source_position=position,
        original_token="orig",
        replacement_token=replacement,
    )
    pair = TranslationPair(source=variant.text, target=f"t{dist}", engine="mock")
    return ScoredVariant(variant=variant, pair=pair,
                         dist=Distance(value=dist, metric=Metric.RAW_LEVENSHTEIN))


ORIGINAL = TranslationPair(source="s", target="t", engine="mock")


class TestDetectScored:
    def test_filter_and_sort(self):
        variants = [scored(2, 0, "a"), scored(5, 1, "b"), scored(7, 2, "c"), scored(1, 3, "d")]
        issue = detect_scored(0, ORIGINAL, sorted(variants, key=lambda s: s.order_key),
                              Metric.RAW_LEVENSHTEIN, threshold=4, k=2)
        assert [sv.dist.value for sv in issue.reported] == [7, 5]

    def test_nothing_above_threshold(self):
        variants = sorted([scored(2), scored(5, 2, "b"), scored(7, 3, "c")],
                          key=lambda s: s.order_key)
        assert detect_scored(0, ORIGINAL, variants, Metric.RAW_LEVENSHTEIN, 10, 2) is None

    def test_tie_break_prefers_lower_position(self):
        variants = sorted([scored(5, 3, "z"), scored(5, 1, "z")],
                          key=lambda s: s.order_key)
        issue = detect_scored(0, ORIGINAL, variants, Metric.RAW_LEVENSHTEIN, 0, 1)
        assert issue.reported[0].variant.source_position == 1

    def test_tie_break_replacement_lexicographic(self):
        variants = sorted([scored(5, 1, "zebra"), scored(5, 1, "apple")],
                          key=lambda s: s.order_key)
        issue = detect_scored(0, ORIGINAL, variants, Metric.RAW_LEVENSHTEIN, 0, 2)
        assert [sv.variant.replacement_token for sv in issue.reported] == ["apple", "zebra"]

    def test_distance_equal_to_threshold_not_reported(self):
        variants = [scored(4)]
        assert detect_scored(0, ORIGINAL, variants, Metric.RAW_LEVENSHTEIN, 4, 1) is None

    def test_k_and_threshold_validated(self):
        with pytest.raises(ValueError):
            detect_scored(0, ORIGINAL, [], Metric.RAW_LEVENSHTEIN, 0, 0)
        with pytest.raises(ValueError):
            detect_scored(0, ORIGINAL, [], Metric.RAW_LEVENSHTEIN, -1, 1)


class TestIssueInvariants:
    def test_reported_must_be_nonempty(self):
        with pytest.raises(ValueError):
            Issue(original_id=0, original=ORIGINAL, reported=(),
                  metric=Metric.RAW_LEVENSHTEIN, threshold=0)

    def test_reported_must_exceed_threshold(self):
        with pytest.raises(ValueError):
            Issue(original_id=0, original=ORIGINAL, reported=(scored(3),),
                  metric=Metric.RAW_LEVENSHTEIN, threshold=3)

    def test_reported_must_be_sorted(self):
        with pytest.raises(ValueError):
            Issue(original_id=0, original=ORIGINAL,
                  reported=(scored(5, 1, "a"), scored(7, 1, "b")),
                  metric=Metric.RAW_LEVENSHTEIN, threshold=0)


def make_original(case_id, original_target, variant_targets):
    def rep(text):
        return StructureRepr.raw(text)

    variants = []
    for i, target in enumerate(variant_targets):
        variant = Variant(sentence_tokens=("src", f"v{i}"), source_position=1,
                          original_token="o", replacement_token=f"v{i}")
        variants.append(VariantInput(
            variant=variant,
            pair=TranslationPair(source=variant.text, target=target, engine="mock"),
            representation=rep(target),
        ))
    return OriginalInput(
        case_id=case_id,
        pair=TranslationPair(source="src o", target=original_target, engine="mock"),
        representation=rep(original_target),
        variants=tuple(variants),
    )


class TestDetect:
    def test_distance_computed_against_original_target(self):
        original = make_original(0, "aaaa", ["aaaa", "aaab", "zzzz"])
        issue = detect(original, threshold=0, k=3)
        assert [sv.dist.value for sv in issue.reported] == [4, 1]

    def test_no_variants_means_no_issue(self):
        original = make_original(0, "aaaa", [])
        assert detect(original, 0, 3) is None


class TestRunDetection:
    def test_untestable_original_in_diagnostics(self):
        originals = [make_original(0, "aaaa", []), make_original(1, "aaaa", ["ab"])]
        config = DetectionConfig(metric=Metric.RAW_LEVENSHTEIN, threshold=0, top_k=1)
        result = run_detection(originals, config)
        assert [i.original_id for i in result.issues] == [1]
        assert "original 0" in result.diagnostics[0]

    def test_clean_corpus_reports_nothing(self):
        originals = [make_original(i, "same", ["same", "same"]) for i in range(20)]
        config = DetectionConfig(metric=Metric.RAW_LEVENSHTEIN, threshold=0, top_k=3)
        result = run_detection(originals, config)
        assert result.issues == []
        assert result.diagnostics == []

    def test_representation_kind_must_match_metric(self):
        original = make_original(0, "aaaa", ["ab"])
        config = DetectionConfig(metric=Metric.DEPENDENCY_L1, threshold=0, top_k=1)
        with pytest.raises(ValueError, match="raw representation"):
            run_detection([original], config)

    def test_monotone_in_threshold(self):
        rng = random.Random(2024)
        originals = [
            make_original(i, "base", ["base" + "x" * rng.randrange(8) for _ in range(6)])
            for i in range(30)
        ]
        previous = None
        for threshold in range(0, 10):
            config = DetectionConfig(metric=Metric.RAW_LEVENSHTEIN,
                                     threshold=threshold, top_k=3)
            ids = {i.original_id for i in run_detection(originals, config).issues}
            if previous is not None:
                assert ids <= previous
            previous = ids


class TestDefaults:
    def test_default_thresholds(self):
        assert default_threshold(Metric.DEPENDENCY_L1) == 4
        assert default_threshold(Metric.CONSTITUENCY_L1) == 4
        assert default_threshold(Metric.RAW_LEVENSHTEIN) == 10
        assert HIGH_PRECISION_THRESHOLD == 15
        assert DEFAULT_REPORT_K == 3
        assert set(DEFAULT_THRESHOLDS) == set(Metric)


class TestScoreVariants:
    def test_output_is_presorted(self):
        original = make_original(0, "aaaa", ["ab", "aaaa", "zzzz"])
        scored_list = score_variants(original.representation, original.variants)
        keys = [sv.order_key for sv in scored_list]
        assert keys == sorted(keys)
