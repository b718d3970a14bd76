"""Artifact serialization: JSONL stages, issue reports, sweep CSV.

report.json is the machine interface and is fully deterministic: keys are
sorted, inputs are referenced by content digest, and no clock values appear,
so identical inputs produce byte-identical files. The Markdown report is the
human view and carries the generation time.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .detector import Issue
from .evaluation import AccuracyReport, SweepPoint

SCHEMA_VERSION = "1"
UNDEFINED_MARKER = "NA"


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run's output, for hashing and reports."""

    corpus: str | None = None
    lexicon: str | None = None
    backend: str | None = None
    dictionary: str | None = None
    mlm_url: str | None = None
    translator: str | None = None
    engine_url: str | None = None
    cache: str | None = None
    source_lang: str = "en"
    target_lang: str = "zh"
    parser: str | None = None
    adapter_cmd: str | None = None
    preparsed: str | None = None
    metric: str | None = None
    threshold: int | None = None
    gen_k: int = 5
    report_k: int = 3
    out_dir: str | None = None
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def config_hash(config: RunConfig) -> str:
    canonical = json.dumps(config.to_dict(), sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_jsonl(path: str | Path, rows: Iterable[dict]):
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n")


def read_jsonl(path: str | Path) -> list[dict]:
    rows = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                rows.append(json.loads(line))
    return rows


def issue_to_dict(issue: Issue) -> dict:
    return {
        "original_id": issue.original_id,
        "source": issue.original.source,
        "target": issue.original.target,
        "metric": issue.metric.value,
        "threshold": issue.threshold,
        "reported": [
            {
                "rank": rank,
                "position": sv.variant.source_position,
                "original_token": sv.variant.original_token,
                "replacement": sv.variant.replacement_token,
                "source": sv.pair.source,
                "target": sv.pair.target,
                "distance": sv.dist.value,
            }
            for rank, sv in enumerate(issue.reported, start=1)
        ],
    }


def build_report(config: RunConfig, issues: Sequence[Issue],
                 diagnostics: Sequence[str], engine: str,
                 input_digests: dict[str, str]) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "config_hash": config_hash(config),
        "engine": engine,
        "metric": config.metric,
        "threshold": config.threshold,
        "report_k": config.report_k,
        "inputs": dict(sorted(input_digests.items())),
        "issue_count": len(issues),
        "issues": [issue_to_dict(issue) for issue in issues],
        "diagnostics": list(diagnostics),
    }


def write_report_json(path: str | Path, report: dict):
    Path(path).write_text(
        json.dumps(report, sort_keys=True, ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )


def write_report_md(path: str | Path, report: dict, now: datetime | None = None):
    """Human-readable issue listing: original pair first, then each variant."""
    stamp = (now or datetime.now(timezone.utc)).isoformat(timespec="seconds")
    lines = [
        "# Translation issue report",
        "",
        f"- generated: {stamp}",
        f"- engine: {report['engine']}",
        f"- metric: {report['metric']}",
        f"- threshold: {report['threshold']}",
        f"- issues: {report['issue_count']}",
        f"- config hash: {report['config_hash']}",
        "",
    ]
    for number, issue in enumerate(report["issues"], start=1):
        lines.append(f"## Issue {number} (original sentence {issue['original_id']})")
        lines.append("")
        lines.append("Original pair:")
        lines.append("")
        lines.append(f"> {issue['source']}")
        lines.append(f"> {issue['target']}")
        lines.append("")
        for entry in issue["reported"]:
            lines.append(
                f"Variant {entry['rank']} (distance {entry['distance']}, "
                f"position {entry['position']}: "
                f"{entry['original_token']} -> {entry['replacement']}):"
            )
            lines.append("")
            lines.append(f"> {entry['source']}")
            lines.append(f"> {entry['target']}")
            lines.append("")
    if report["diagnostics"]:
        lines.append("## Diagnostics")
        lines.append("")
        for note in report["diagnostics"]:
            lines.append(f"- {note}")
        lines.append("")
    Path(path).write_text("\n".join(lines), encoding="utf-8")


def format_fraction(value: Fraction | None) -> str:
    if value is None:
        return UNDEFINED_MARKER
    return repr(value.numerator / value.denominator)


def write_sweep_csv(path: str | Path, points: Sequence[SweepPoint]):
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["threshold", "issue_count", "top1_accuracy"])
        for point in points:
            writer.writerow([point.threshold, point.issue_count,
                             format_fraction(point.top1_accuracy)])


def render_accuracy(report: AccuracyReport) -> str:
    """Render like ``top-1 accuracy: 70.0% (70/100)``."""
    percent = report.accuracy * 100
    return (
        f"top-{report.k} accuracy: {percent.numerator / percent.denominator:.1f}% "
        f"({report.buggy_count}/{report.issue_count})"
    )
