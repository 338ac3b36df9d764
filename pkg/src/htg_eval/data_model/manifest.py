"""Manifest and prediction-log ingestion, lexicon partitioning, style splits.

File formats (all JSON Lines, UTF-8):
  manifest       {"sample_id", "image_path", "transcript", "writer_id", "vocab_tag"}
  transcription  {"sample_id", "reference", "hypothesis"}
  style log      {"sample_id", "true_label", "predicted_label"}
"""

from __future__ import annotations

import json
import math
import unicodedata
import warnings
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..errors import SchemaError
from .types import (
    DatasetManifest,
    SampleEntry,
    StylePredictionRecord,
    TranscriptionRecord,
    VocabTag,
)


def _iter_jsonl(path) -> Iterable[tuple[int, dict]]:
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
            if not isinstance(obj, dict):
                raise SchemaError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, obj


def _require(obj: dict, key: str, path, lineno: int):
    if key not in obj:
        raise SchemaError(f"{path}:{lineno}: missing required field {key!r}")
    return obj[key]


def load_manifest(path, split_name: str | None = None) -> DatasetManifest:
    """Load and validate a JSONL manifest; populates the lexicon cache."""
    path = Path(path)
    samples = []
    for lineno, obj in _iter_jsonl(path):
        tag_raw = obj.get("vocab_tag")
        if tag_raw is None:
            tag = VocabTag.UNSET
        else:
            try:
                tag = VocabTag(tag_raw)
            except ValueError:
                raise SchemaError(f"{path}:{lineno}: bad vocab_tag {tag_raw!r}") from None
        writer_id = _require(obj, "writer_id", path, lineno)
        if not isinstance(writer_id, int) or isinstance(writer_id, bool):
            raise SchemaError(f"{path}:{lineno}: writer_id must be an integer")
        samples.append(
            SampleEntry(
                sample_id=str(_require(obj, "sample_id", path, lineno)),
                transcript=str(_require(obj, "transcript", path, lineno)),
                writer_id=writer_id,
                image_path=obj.get("image_path"),
                vocab_tag=tag,
            )
        )
    manifest = DatasetManifest(split_name or path.stem, samples)
    manifest.lexicon  # populate the cache eagerly
    return manifest


def save_manifest(manifest: DatasetManifest, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in manifest.samples:
            fh.write(
                json.dumps(
                    {
                        "sample_id": e.sample_id,
                        "image_path": e.image_path,
                        "transcript": e.transcript,
                        "writer_id": e.writer_id,
                        "vocab_tag": None if e.vocab_tag is VocabTag.UNSET else e.vocab_tag.value,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_transcriptions(path) -> list[TranscriptionRecord]:
    records = []
    for lineno, obj in _iter_jsonl(path):
        records.append(
            TranscriptionRecord(
                sample_id=str(_require(obj, "sample_id", path, lineno)),
                reference=str(_require(obj, "reference", path, lineno)),
                hypothesis=str(_require(obj, "hypothesis", path, lineno)),
            )
        )
    return records


def save_transcriptions(records: Sequence[TranscriptionRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(
                json.dumps(
                    {
                        "sample_id": r.sample_id,
                        "reference": r.reference,
                        "hypothesis": r.hypothesis,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_style_predictions(path) -> list[StylePredictionRecord]:
    records = []
    for lineno, obj in _iter_jsonl(path):
        true_label = _require(obj, "true_label", path, lineno)
        predicted = _require(obj, "predicted_label", path, lineno)
        if not isinstance(true_label, int) or not isinstance(predicted, int):
            raise SchemaError(f"{path}:{lineno}: labels must be integers")
        records.append(
            StylePredictionRecord(
                sample_id=str(_require(obj, "sample_id", path, lineno)),
                true_label=true_label,
                predicted_label=predicted,
            )
        )
    return records


def save_style_predictions(records: Sequence[StylePredictionRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(
                json.dumps(
                    {
                        "sample_id": r.sample_id,
                        "true_label": r.true_label,
                        "predicted_label": r.predicted_label,
                    }
                )
                + "\n"
            )


def load_id_list(path) -> list[str]:
    with open(path, "r", encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def save_id_list(ids: Sequence[str], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for sample_id in ids:
            fh.write(sample_id + "\n")


def partition_lexicon(
    train_lexicon: Iterable[str], candidates: Sequence[str]
) -> tuple[list[str], list[str]]:
    """Split candidate words into in-vocabulary and out-of-vocabulary lists.

    Membership is exact codepoint equality after NFC normalization;
    comparison is case-sensitive. Input order is preserved in both outputs.
    """
    lexicon = {unicodedata.normalize("NFC", w) for w in train_lexicon}
    if not lexicon:
        raise SchemaError("train lexicon must be non-empty")
    iv: list[str] = []
    oov: list[str] = []
    for word in candidates:
        if unicodedata.normalize("NFC", word) in lexicon:
            iv.append(word)
        else:
            oov.append(word)
    return iv, oov


def make_style_split(
    manifest: DatasetManifest, train_fraction: float, seed: int
) -> tuple[list[str], list[str]]:
    """Per-writer stratified split for the style-classifier protocol.

    For each writer, floor(train_fraction * n) samples go to train and the
    remainder to eval; draws are seeded and the result is a pure function of
    (manifest, train_fraction, seed). A writer with a single sample goes to
    train with a warning.
    """
    if not 0.0 < train_fraction < 1.0:
        raise SchemaError("train_fraction must lie strictly between 0 and 1")
    by_writer: dict[int, list[str]] = {}
    for e in manifest.samples:
        by_writer.setdefault(e.writer_id, []).append(e.sample_id)

    rng = np.random.default_rng(seed)
    train_ids: list[str] = []
    eval_ids: list[str] = []
    for writer in sorted(by_writer):
        ids = by_writer[writer]
        if len(ids) == 1:
            warnings.warn(
                f"writer {writer} has a single sample; placed in train",
                stacklevel=2,
            )
            train_ids.extend(ids)
            continue
        order = rng.permutation(len(ids))
        n_train = math.floor(train_fraction * len(ids))
        train_ids.extend(ids[k] for k in order[:n_train])
        eval_ids.extend(ids[k] for k in order[n_train:])
    return train_ids, eval_ids
