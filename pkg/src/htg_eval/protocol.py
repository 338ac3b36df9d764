"""Experiment orchestration: scaling plans, comparison reports, utility deltas.

The orchestrator never launches training jobs; it prepares nested
sub-manifests for the scaling protocol, ingests per-step error rates, and
renders deterministic method-comparison artifacts. All rendered outputs are
byte-reproducible for identical inputs, and reports embed the convention
metadata and input digests needed for honest cross-toolkit comparison.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .data_model import DatasetManifest, save_manifest
from .errors import SchemaError, SplitViolation
from .text_metrics import CerReport

# Canonical comparison-table column order; extra metrics follow alphabetically.
CANONICAL_METRICS = ("FID", "KID", "HWD", "HTG_HTR", "HTG_style", "HTG_OOV")


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class ScalingPlan:
    """Nested sample-id prefixes of sizes step, 2*step, ..., total."""

    sizes: list[int]
    order: list[str]
    step: int
    seed: int
    split_name: str

    def subsets(self) -> list[list[str]]:
        return [self.order[:size] for size in self.sizes]


def scaling_subsets(manifest: DatasetManifest, step: int = 5000, seed: int = 0) -> ScalingPlan:
    """Shuffle once (seeded), then take nested prefixes; the last one is the
    full set regardless of divisibility."""
    if step < 1:
        raise SchemaError("step must be >= 1")
    total = len(manifest)
    if total == 0:
        raise SchemaError("manifest is empty")
    rng = np.random.default_rng(seed)
    ids = manifest.ids
    order = [ids[i] for i in rng.permutation(total)]
    sizes = list(range(step, total, step))
    sizes.append(total)
    return ScalingPlan(sizes=sizes, order=order, step=step, seed=seed, split_name=manifest.split_name)


def write_plan_manifests(plan: ScalingPlan, manifest: DatasetManifest, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for size, subset in zip(plan.sizes, plan.subsets()):
        sub = manifest.subset(subset, f"{plan.split_name}-{size}")
        path = out / f"subset_{size:06d}.jsonl"
        save_manifest(sub, path)
        paths.append(path)
    return paths


@dataclass
class ScalingCurve:
    """(training size, CER percent) rows plus a monotonicity diagnostic."""

    rows: list[tuple[int, float]]
    n_increases: int

    def to_json_bytes(self) -> bytes:
        payload = {
            "curve": [{"size": s, "cer_percent": c} for s, c in self.rows],
            "n_increases": self.n_increases,
        }
        return (json.dumps(payload, sort_keys=True) + "\n").encode("utf-8")

    def to_csv_bytes(self) -> bytes:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["size", "cer_percent"])
        for size, cer_percent in self.rows:
            writer.writerow([size, _fmt(cer_percent)])
        return buf.getvalue().encode("utf-8")


def scaling_curve(step_results: Sequence[tuple[int, float]]) -> ScalingCurve:
    """Validate and package per-step results; counts CER increases, which
    signal the instabilities weak generators show as data is added."""
    sizes = [s for s, _ in step_results]
    if len(set(sizes)) != len(sizes):
        raise SchemaError("duplicate sizes in scaling results")
    if sizes != sorted(sizes):
        raise SchemaError("sizes must be strictly increasing")
    cers = [c for _, c in step_results]
    n_increases = sum(1 for prev, cur in zip(cers, cers[1:]) if cur > prev)
    return ScalingCurve(rows=[(int(s), float(c)) for s, c in step_results], n_increases=n_increases)


Value = Union[float, int, str]


@dataclass
class MetricReport:
    """method -> metric -> value, with conventions and input digests."""

    values: dict[str, dict[str, Value]]
    metadata: dict = field(default_factory=dict)
    input_digests: dict[str, str] = field(default_factory=dict)


def build_report(
    entries: Union[Mapping[str, Mapping[str, Value]], Iterable[tuple[str, str, Value]]],
    metadata: Optional[dict] = None,
    input_digests: Optional[Mapping[str, str]] = None,
) -> MetricReport:
    """Assemble a comparison report from (method, metric, value) entries.

    Duplicate entries with equal values collapse; conflicting duplicates are
    a SchemaError, as is an empty report.
    """
    if isinstance(entries, Mapping):
        flat = [(m, k, v) for m, row in entries.items() for k, v in row.items()]
    else:
        flat = list(entries)
    if not flat:
        raise SchemaError("report has no metric values")
    values: dict[str, dict[str, Value]] = {}
    for method, metric, value in flat:
        row = values.setdefault(method, {})
        if metric in row and row[metric] != value:
            raise SchemaError(
                f"conflicting values for {method}/{metric}: {row[metric]!r} vs {value!r}"
            )
        row[metric] = value
    return MetricReport(
        values=values,
        metadata=dict(metadata or {}),
        input_digests=dict(input_digests or {}),
    )


def _fmt(value: Value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return format(value, ".6g")
    return str(value)


def render_report(report: MetricReport, fmt: str = "json") -> bytes:
    """Deterministic JSON (sorted keys) or a markdown comparison table.

    Markdown columns follow the canonical order FID, KID, HWD, HTG_HTR,
    HTG_style, HTG_OOV; other metrics are appended alphabetically and
    missing cells render as "-".
    """
    if fmt == "json":
        payload = {
            "values": report.values,
            "metadata": report.metadata,
            "input_digests": report.input_digests,
        }
        return (json.dumps(payload, sort_keys=True) + "\n").encode("utf-8")
    if fmt == "markdown":
        present = {m for row in report.values.values() for m in row}
        columns = [m for m in CANONICAL_METRICS if m in present]
        columns += sorted(present - set(CANONICAL_METRICS))
        lines = ["| Method | " + " | ".join(columns) + " |"]
        lines.append("|" + " --- |" * (len(columns) + 1))
        for method, row in report.values.items():
            cells = [_fmt(row[m]) if m in row else "-" for m in columns]
            lines.append(f"| {method} | " + " | ".join(cells) + " |")
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise SchemaError(f"unknown report format {fmt!r}")


@dataclass
class UtilityComparison:
    """CER-percent deltas of training variants against a baseline."""

    baseline_percent: float
    variants: dict[str, dict]
    split_digest: str

    def to_json_bytes(self) -> bytes:
        payload = {
            "baseline_cer_percent": self.baseline_percent,
            "split_digest": self.split_digest,
            "variants": self.variants,
        }
        return (json.dumps(payload, sort_keys=True) + "\n").encode("utf-8")

    def to_markdown_bytes(self) -> bytes:
        lines = [
            "| Variant | CER % | Delta | Improved |",
            "| --- | --- | --- | --- |",
            f"| baseline | {_fmt(self.baseline_percent)} | 0 | - |",
        ]
        for name, row in self.variants.items():
            lines.append(
                f"| {name} | {_fmt(row['cer_percent'])} | {_fmt(row['delta'])} "
                f"| {'yes' if row['improved'] else 'no'} |"
            )
        return ("\n".join(lines) + "\n").encode("utf-8")


def utility_comparison(
    baseline: CerReport, variants: Mapping[str, CerReport]
) -> UtilityComparison:
    """Compare variant CERs against the baseline over an identical test split.

    A negative delta is an improvement (the variant's added training data
    helped). Reports over different splits are incomparable and rejected.
    """
    result: dict[str, dict] = {}
    for name, report in variants.items():
        if report.split_digest != baseline.split_digest:
            raise SplitViolation(f"variant {name!r} was computed over a different test split")
        delta = 100.0 * (report.micro_cer - baseline.micro_cer)
        result[name] = {
            "cer_percent": 100.0 * report.micro_cer,
            "delta": delta,
            "improved": delta < 0,
        }
    return UtilityComparison(
        baseline_percent=100.0 * baseline.micro_cer,
        variants=result,
        split_digest=baseline.split_digest,
    )
