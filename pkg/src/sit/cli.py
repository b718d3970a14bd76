"""Command-line pipeline front end.

Stages write restartable artifacts: ``generate`` emits variants.jsonl,
``translate`` emits translations.jsonl (and updates the cache), ``detect``
emits report.json and report.md, ``evaluate`` prints accuracy for a labeled
report, ``sweep`` emits sweep.csv across thresholds, and ``experiment`` runs
the closed-loop fault-injection pipeline against the mock translator.

Exit codes: 0 success, 2 config or input error, 3 translation or backend
failure, 4 representation failure.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from pathlib import Path

from .corpus import PosLexicon, load_corpus, tag_sentence, tokenize
from .detector import (DEFAULT_REPORT_K, DetectionConfig, OriginalInput,
                       VariantInput, default_threshold, run_detection)
from .errors import (AdapterError, BackendError, CacheError, ConlluParseError,
                     CorpusError, FaultConfigError, MetricMismatchError,
                     ProtocolError, PtbParseError, SitError,
                     UndefinedAccuracyError, VariantGenerationError)
from .evaluation import (fault_injection_experiment, load_fault_plan, load_labels,
                         threshold_sweep, topk_accuracy_from_counts)
from .gateway import (FaultSpec, HttpTranslator, MockTranslator, TranslationCache,
                      TranslationPair, TranslationRequest, read_word_map,
                      translate_batch)
from .metrics import Metric
from .reporting import (RunConfig, build_report, read_jsonl, render_accuracy,
                        sha256_file, write_jsonl, write_report_json,
                        write_report_md, write_sweep_csv)
from .structures import (AdapterSpec, ReprKind, StructureRepr, StubParser,
                         constituency_multiset, dependency_multiset, parse_conllu,
                         parse_ptb, run_adapter)
from .variants import (DictionaryBackend, MlmBackend, Variant, generate_variants,
                       load_substitution_table)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TRANSLATION = 3
EXIT_REPRESENTATION = 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _require_file(path: str | None, what: str) -> Path:
    if path is None:
        raise CliError(f"missing required path for {what}", EXIT_CONFIG)
    p = Path(path)
    if not p.exists():
        raise CliError(f"{what} not found: {path}", EXIT_CONFIG)
    return p


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _parse_thresholds(spec: str) -> list[int]:
    spec = spec.strip()
    if ".." in spec:
        lo_text, _, hi_text = spec.partition("..")
        lo, hi = int(lo_text), int(hi_text)
        if hi < lo:
            raise ValueError(f"empty threshold range {spec!r}")
        return list(range(lo, hi + 1))
    return [int(part) for part in spec.split(",") if part.strip()]


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    corpus_path = _require_file(args.corpus, "corpus")
    lexicon = PosLexicon.from_file(_require_file(args.lexicon, "POS lexicon"))
    if args.backend == "dictionary":
        backend = DictionaryBackend.from_file(_require_file(args.dict, "substitution dictionary"))
    else:
        if not args.mlm_url:
            raise CliError("--mlm-url is required with --backend mlm", EXIT_CONFIG)
        backend = MlmBackend(args.mlm_url)
    corpus = load_corpus(corpus_path, max_words=args.max_words)
    out = _out_dir(args)

    rows = []
    produced = 0
    errors = []
    for original_id, raw in enumerate(corpus.sentences):
        sentence = tag_sentence(tokenize(raw), lexicon, raw=raw)
        source = " ".join(sentence.texts)
        try:
            batch = generate_variants(sentence, backend, args.gen_k, lexicon)
        except VariantGenerationError as exc:
            errors.append(f"original {original_id}: {exc}")
            rows.append({"original_id": original_id, "source": source, "variants": []})
            continue
        for failure in batch.failures:
            errors.append(f"original {original_id} position {failure.position}: {failure.error}")
        produced += len(batch.variants)
        rows.append({
            "original_id": original_id,
            "source": source,
            "variants": [
                {
                    "position": v.source_position,
                    "original_token": v.original_token,
                    "replacement": v.replacement_token,
                    "text": v.text,
                    "score": v.backend_score,
                }
                for v in batch.variants
            ],
        })
    write_jsonl(out / "variants.jsonl", rows)
    for message in errors:
        print(f"warning: {message}", file=sys.stderr)
    if corpus.filtered:
        print(f"note: {corpus.filtered} over-length sentences filtered", file=sys.stderr)
    if errors and produced == 0 and corpus.sentences:
        raise CliError("variant generation failed for every sentence", EXIT_TRANSLATION)
    print(f"wrote {out / 'variants.jsonl'} ({len(rows)} originals, {produced} variants)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# translate
# ---------------------------------------------------------------------------


def _resolve_faults(plan_path: str, variant_rows: list[dict]) -> list[FaultSpec]:
    plan = load_fault_plan(plan_path)
    by_original = {
        row["original_id"]: {
            (v["position"], v["replacement"]): v["text"] for v in row["variants"]
        }
        for row in variant_rows
    }
    specs = []
    for fault in plan:
        text = by_original.get(fault.original_id, {}).get((fault.position, fault.replacement))
        if text is None:
            raise FaultConfigError(
                f"fault plan names variant (original {fault.original_id}, position "
                f"{fault.position}, replacement {fault.replacement!r}) which was never generated"
            )
        specs.append(FaultSpec(kind=fault.kind, target_text=text, detail=fault.detail))
    return specs


def cmd_translate(args) -> int:
    variant_rows = read_jsonl(_require_file(args.variants, "variants file"))
    if args.translator == "mock":
        lexicon = read_word_map(_require_file(args.mock_lexicon, "mock translation lexicon"))
        faults = _resolve_faults(args.fault_plan, variant_rows) if args.fault_plan else []
        translator = MockTranslator(lexicon, faults)
    else:
        if not args.engine_url:
            raise CliError("--engine-url is required with --translator http", EXIT_CONFIG)
        translator = HttpTranslator(args.engine_url, engine="http",
                                    api_key_header=args.api_key_header)
    cache = TranslationCache.load(args.cache) if args.cache else None
    out = _out_dir(args)

    requests_in = []
    meta = []
    for row in variant_rows:
        requests_in.append(TranslationRequest(
            text=row["source"], source_lang=args.source_lang,
            target_lang=args.target_lang, engine=translator.engine))
        meta.append({"original_id": row["original_id"], "role": "original",
                     "position": None, "original_token": None, "replacement": None})
        for v in row["variants"]:
            requests_in.append(TranslationRequest(
                text=v["text"], source_lang=args.source_lang,
                target_lang=args.target_lang, engine=translator.engine))
            meta.append({"original_id": row["original_id"], "role": "variant",
                         "position": v["position"], "original_token": v["original_token"],
                         "replacement": v["replacement"]})
    if not requests_in:
        write_jsonl(out / "translations.jsonl", [])
        print(f"wrote {out / 'translations.jsonl'} (0 requests)")
        return EXIT_OK

    batch = translate_batch(requests_in, translator, cache,
                            concurrency=args.concurrency)
    for note in batch.diagnostics:
        print(f"warning: {note}", file=sys.stderr)

    rows = []
    successes = 0
    for request_meta, outcome in zip(meta, batch.results):
        if isinstance(outcome, TranslationPair):
            successes += 1
            rows.append({
                **request_meta,
                "source": outcome.source,
                "target": outcome.target,
                "engine": outcome.engine,
                "from_cache": outcome.from_cache,
            })
    write_jsonl(out / "translations.jsonl", rows)
    if successes == 0:
        raise CliError("every translation request failed", EXIT_TRANSLATION)
    print(f"wrote {out / 'translations.jsonl'} ({successes}/{len(requests_in)} translated)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# detect
# ---------------------------------------------------------------------------


def _group_rows(rows: list[dict]) -> tuple[list[dict], list[str]]:
    """Group translation rows per original, preserving corpus order."""
    groups: dict[int, dict] = {}
    order: list[int] = []
    for row in rows:
        oid = row["original_id"]
        if oid not in groups:
            groups[oid] = {"original": None, "variants": []}
            order.append(oid)
        if row["role"] == "original":
            groups[oid]["original"] = row
        else:
            groups[oid]["variants"].append(row)
    diagnostics = []
    cases = []
    for oid in order:
        group = groups[oid]
        if group["original"] is None:
            diagnostics.append(f"original {oid} has no translation; skipped")
            continue
        cases.append({"original_id": oid, **group})
    return cases, diagnostics


def _representations(targets: list[str], metric: Metric, args) -> list[StructureRepr]:
    kind = {"raw": ReprKind.RAW, "constituency": ReprKind.CONSTITUENCY,
            "dependency": ReprKind.DEPENDENCY}[metric.value]
    if kind is ReprKind.RAW:
        return [StructureRepr.raw(t) for t in targets]
    if args.parser == "stub":
        relations = read_word_map(args.relation_lexicon) if args.relation_lexicon else None
        parser = StubParser(relations)
        wrap = (StructureRepr.constituency if kind is ReprKind.CONSTITUENCY
                else StructureRepr.dependency)
        return [wrap(parser.parse(t)) for t in targets]
    if args.parser == "preparsed":
        path = _require_file(args.preparsed, "pre-parsed file")
        text = path.read_text(encoding="utf-8")
        if kind is ReprKind.CONSTITUENCY:
            lines = [ln for ln in text.splitlines() if ln.strip()]
            reprs = [StructureRepr.constituency(constituency_multiset(parse_ptb(ln)))
                     for ln in lines]
        else:
            graphs = parse_conllu(text)
            reprs = [StructureRepr.dependency(dependency_multiset(g)) for g in graphs]
        if len(reprs) != len(targets):
            raise CliError(
                f"pre-parsed file holds {len(reprs)} parses for {len(targets)} sentences",
                EXIT_REPRESENTATION)
        return reprs
    if args.parser == "adapter":
        if not args.adapter_cmd:
            raise CliError("--adapter-cmd is required with --parser adapter", EXIT_CONFIG)
        spec = AdapterSpec(command=tuple(shlex.split(args.adapter_cmd)), mode=kind)
        return run_adapter(targets, spec)
    raise CliError(f"--parser {args.parser} requires a structural metric", EXIT_CONFIG)


def _metric_from_args(args) -> Metric:
    return Metric(args.metric)


def cmd_detect(args) -> int:
    translations_path = _require_file(args.translations, "translations file")
    rows = read_jsonl(translations_path)
    metric = _metric_from_args(args)
    threshold = args.threshold if args.threshold is not None else default_threshold(metric)
    out = _out_dir(args)

    cases, diagnostics = _group_rows(rows)
    ordered_targets: list[str] = []
    for case in cases:
        ordered_targets.append(case["original"]["target"])
        ordered_targets.extend(v["target"] for v in case["variants"])
    reprs = _representations(ordered_targets, metric, args)

    originals = []
    cursor = 0
    engines = set()
    for case in cases:
        original_row = case["original"]
        engines.add(original_row["engine"])
        original_repr = reprs[cursor]
        cursor += 1
        variant_inputs = []
        for v in case["variants"]:
            engines.add(v["engine"])
            variant = Variant(
                sentence_tokens=tuple(v["source"].split()),
                source_position=v["position"],
                original_token=v["original_token"],
                replacement_token=v["replacement"],
                backend_score=None,
            )
            variant_inputs.append(VariantInput(
                variant=variant,
                pair=TranslationPair(source=v["source"], target=v["target"],
                                     engine=v["engine"], from_cache=v["from_cache"]),
                representation=reprs[cursor],
            ))
            cursor += 1
        originals.append(OriginalInput(
            case_id=case["original_id"],
            pair=TranslationPair(source=original_row["source"],
                                 target=original_row["target"],
                                 engine=original_row["engine"],
                                 from_cache=original_row["from_cache"]),
            representation=original_repr,
            variants=tuple(variant_inputs),
        ))

    config = DetectionConfig(metric=metric, threshold=threshold, top_k=args.report_k)
    result = run_detection(originals, config)
    diagnostics.extend(result.diagnostics)

    run_config = RunConfig(
        corpus=None, lexicon=None, backend=None, dictionary=None, mlm_url=None,
        translator=None, engine_url=None, cache=None,
        source_lang=args.source_lang, target_lang=args.target_lang,
        parser=args.parser, adapter_cmd=args.adapter_cmd, preparsed=args.preparsed,
        metric=metric.value, threshold=threshold,
        gen_k=args.gen_k, report_k=args.report_k, out_dir=None, seed=args.seed,
    )
    digests = {"translations_sha256": sha256_file(translations_path)}
    if args.parser == "preparsed" and args.preparsed:
        digests["preparsed_sha256"] = sha256_file(args.preparsed)
    engine = engines.pop() if len(engines) == 1 else "mixed"
    report = build_report(run_config, result.issues, diagnostics, engine, digests)
    write_report_json(out / "report.json", report)
    write_report_md(out / "report.md", report)
    print(f"wrote {out / 'report.json'} ({report['issue_count']} issues)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# evaluate / sweep / experiment
# ---------------------------------------------------------------------------


def cmd_evaluate(args) -> int:
    report_path = _require_file(args.report, "report file")
    labels = load_labels(_require_file(args.labels, "labels file"))
    report = json.loads(report_path.read_text(encoding="utf-8"))
    issues = report["issues"]
    try:
        accuracy = topk_accuracy_from_counts(
            [issue["original_id"] for issue in issues],
            [len(issue["reported"]) for issue in issues],
            labels, args.k,
        )
    except UndefinedAccuracyError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from exc
    print(render_accuracy(accuracy))
    return EXIT_OK


def cmd_sweep(args) -> int:
    translations_path = _require_file(args.translations, "translations file")
    rows = read_jsonl(translations_path)
    metric = _metric_from_args(args)
    try:
        thresholds = _parse_thresholds(args.thresholds)
    except ValueError as exc:
        raise CliError(f"bad --thresholds: {exc}", EXIT_CONFIG) from exc
    labels = load_labels(_require_file(args.labels, "labels file")) if args.labels else []
    out = _out_dir(args)

    cases, _ = _group_rows(rows)
    ordered_targets: list[str] = []
    for case in cases:
        ordered_targets.append(case["original"]["target"])
        ordered_targets.extend(v["target"] for v in case["variants"])
    reprs = _representations(ordered_targets, metric, args)

    originals = []
    cursor = 0
    for case in cases:
        original_repr = reprs[cursor]
        cursor += 1
        variant_inputs = []
        for v in case["variants"]:
            variant = Variant(
                sentence_tokens=tuple(v["source"].split()),
                source_position=v["position"],
                original_token=v["original_token"],
                replacement_token=v["replacement"],
                backend_score=None,
            )
            variant_inputs.append(VariantInput(
                variant=variant,
                pair=TranslationPair(source=v["source"], target=v["target"],
                                     engine=v["engine"], from_cache=v["from_cache"]),
                representation=reprs[cursor],
            ))
            cursor += 1
        originals.append(OriginalInput(
            case_id=case["original_id"],
            pair=TranslationPair(source=case["original"]["source"],
                                 target=case["original"]["target"],
                                 engine=case["original"]["engine"],
                                 from_cache=case["original"]["from_cache"]),
            representation=original_repr,
            variants=tuple(variant_inputs),
        ))

    points = threshold_sweep(originals, thresholds, labels, k=args.k)
    write_sweep_csv(out / "sweep.csv", points)
    print(f"wrote {out / 'sweep.csv'} ({len(points)} thresholds)")
    return EXIT_OK


def cmd_experiment(args) -> int:
    corpus_path = _require_file(args.corpus, "corpus")
    lexicon = PosLexicon.from_file(_require_file(args.lexicon, "POS lexicon"))
    substitution_table = load_substitution_table(
        _require_file(args.dict, "substitution dictionary"))
    plan = load_fault_plan(_require_file(args.fault_plan, "fault plan"))
    translation_lexicon = read_word_map(
        _require_file(args.mock_lexicon, "mock translation lexicon"))
    relation_lexicon = (read_word_map(_require_file(args.relation_lexicon, "relation lexicon"))
                        if args.relation_lexicon else None)
    metric = _metric_from_args(args)
    threshold = args.threshold if args.threshold is not None else default_threshold(metric)
    out = _out_dir(args)

    corpus = load_corpus(corpus_path, max_words=args.max_words)
    sentences = [tag_sentence(tokenize(raw), lexicon, raw=raw) for raw in corpus.sentences]
    report = fault_injection_experiment(
        sentences, substitution_table, plan, metric, threshold,
        args.report_k, args.seed,
        pos_lexicon=lexicon,
        translation_lexicon=translation_lexicon,
        relation_lexicon=relation_lexicon,
        gen_k=args.gen_k,
    )
    payload = {
        "metric": report.metric.value,
        "threshold": report.threshold,
        "k": report.k,
        "seed": report.seed,
        "issue_count": report.issue_count,
        "faulted_count": report.faulted_count,
        "recall": str(report.recall),
        "precision": str(report.precision) if report.precision is not None else None,
        "accuracy": (render_accuracy(report.accuracy_report)
                     if report.accuracy_report is not None else None),
        "issue_ids": [issue.original_id for issue in report.issues],
    }
    path = out / "experiment.json"
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {path}")
    print(f"issues: {report.issue_count}  recall: {report.recall}  "
          f"precision: {report.precision if report.precision is not None else 'NA'}")
    if report.accuracy_report is not None:
        print(render_accuracy(report.accuracy_report))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--gen-k", type=int, default=5,
                        help="variants requested per candidate position")
    parser.add_argument("--report-k", type=int, default=DEFAULT_REPORT_K,
                        help="variants reported per issue")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sit",
        description="Detect machine-translation errors by comparing the "
                    "structures of translations of similar sentences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate similar-sentence variants")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lexicon", required=True, help="POS lexicon TSV")
    p.add_argument("--backend", choices=["dictionary", "mlm"], default="dictionary")
    p.add_argument("--dict", help="substitution dictionary TSV")
    p.add_argument("--mlm-url", help="masked-substitution service URL")
    p.add_argument("--max-words", type=int, default=35)
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("translate", help="collect translations for originals and variants")
    p.add_argument("--variants", required=True, help="variants.jsonl from generate")
    p.add_argument("--translator", choices=["http", "mock"], default="http")
    p.add_argument("--engine-url")
    p.add_argument("--api-key-header", default="X-Api-Key")
    p.add_argument("--mock-lexicon", help="word map TSV for the mock translator")
    p.add_argument("--fault-plan", help="fault plan JSON for the mock translator")
    p.add_argument("--cache", help="translation cache JSON path")
    p.add_argument("--source-lang", default="en")
    p.add_argument("--target-lang", default="zh")
    p.add_argument("--concurrency", type=int, default=4)
    _add_common(p)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("detect", help="score variants and report issues")
    p.add_argument("--translations", required=True, help="translations.jsonl from translate")
    p.add_argument("--parser", choices=["adapter", "preparsed", "stub"], default="stub")
    p.add_argument("--adapter-cmd", help="external parser command line")
    p.add_argument("--preparsed", help="pre-parsed trees or CoNLL-U, one parse per translation")
    p.add_argument("--relation-lexicon", help="token relation TSV for the stub parser")
    p.add_argument("--metric", choices=["raw", "constituency", "dependency"],
                   default="dependency")
    p.add_argument("--threshold", type=int, default=None,
                   help="report variants strictly farther than this (default per metric)")
    p.add_argument("--source-lang", default="en")
    p.add_argument("--target-lang", default="zh")
    _add_common(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("evaluate", help="top-k accuracy of a labeled report")
    p.add_argument("--report", required=True, help="report.json from detect")
    p.add_argument("--labels", required=True, help="labels JSON")
    p.add_argument("--k", type=int, default=1)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="issue counts and accuracy across thresholds")
    p.add_argument("--translations", required=True)
    p.add_argument("--parser", choices=["adapter", "preparsed", "stub"], default="stub")
    p.add_argument("--adapter-cmd")
    p.add_argument("--preparsed")
    p.add_argument("--relation-lexicon")
    p.add_argument("--metric", choices=["raw", "constituency", "dependency"],
                   default="dependency")
    p.add_argument("--thresholds", required=True,
                   help="ascending list: '0..20' or '0,4,15'")
    p.add_argument("--labels", help="labels JSON (optional)")
    p.add_argument("--k", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("experiment", help="closed-loop fault-injection run")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--dict", required=True)
    p.add_argument("--fault-plan", required=True)
    p.add_argument("--mock-lexicon", required=True)
    p.add_argument("--relation-lexicon")
    p.add_argument("--metric", choices=["raw", "constituency", "dependency"],
                   default="dependency")
    p.add_argument("--threshold", type=int, default=None)
    p.add_argument("--max-words", type=int, default=35)
    _add_common(p)
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (CorpusError, FaultConfigError, CacheError, UndefinedAccuracyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BackendError, ProtocolError, VariantGenerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRANSLATION
    except (AdapterError, PtbParseError, ConlluParseError, MetricMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REPRESENTATION
    except SitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entrypoint():
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
