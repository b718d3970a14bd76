"""Structure-invariance testing for machine translation.

Similar source sentences, differing in a single same-POS word, should
translate to structurally near-identical target sentences. The pipeline
generates such variants, collects translations, represents each target as a
raw string or a syntactic label multiset, and reports the variants whose
structure drifts farthest from the original's.
"""

from .corpus import (CANDIDATE_TAGS, LoadedCorpus, PosLexicon, PosTag,
                     TaggedSentence, Token, detokenize, load_corpus,
                     select_candidates, tag_sentence, tokenize)
from .detector import (DEFAULT_REPORT_K, DEFAULT_THRESHOLDS,
                       HIGH_PRECISION_THRESHOLD, DetectionConfig,
                       DetectionResult, Issue, OriginalInput, ScoredVariant,
                       VariantInput, default_threshold, detect, detect_scored,
                       run_detection, score_variants)
from .errors import (AdapterError, BackendError, CacheError, ConlluParseError,
                     CorpusError, FaultConfigError, MetricMismatchError,
                     ProtocolError, PtbParseError, SitError,
                     UndefinedAccuracyError, VariantGenerationError)
from .evaluation import (AccuracyReport, ExperimentReport, IssueLabel,
                         PlannedFault, SweepPoint, fault_injection_experiment,
                         load_fault_plan, load_labels, threshold_sweep,
                         topk_accuracy, topk_accuracy_from_counts)
from .gateway import (BatchResult, FailedTranslation, FaultKind, FaultSpec,
                      HttpTranslator, MockTranslator, TranslationCache,
                      TranslationError, TranslationPair, TranslationRequest,
                      mock_translate, read_word_map, translate_batch)
from .metrics import (Distance, Metric, distance, kind_for_metric, levenshtein,
                      metric_for_kind, relation_distance)
from .structures import (AdapterSpec, ConstituencyTree, DependencyEdge,
                         DependencyGraph, DependencyNode, RelationMultiset,
                         ReprKind, StructureRepr, StubParser,
                         constituency_multiset, dependency_multiset,
                         parse_conllu, parse_ptb, run_adapter, serialize_ptb,
                         tagged_sentence_from_graph)
from .variants import (Candidate, DictionaryBackend, MaskedQuery, MlmBackend,
                       PositionFailure, Variant, VariantBatch,
                       generate_variants, load_substitution_table)

__version__ = "0.1.0"
