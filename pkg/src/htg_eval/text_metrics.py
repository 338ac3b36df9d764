"""Edit-distance machinery and the recognition-side protocol metrics.

Error rates are micro-averaged: total edit operations divided by total
reference length (codepoints for the character rate, whitespace-split
tokens for the word rate). Comparison is case- and punctuation-sensitive
after NFC normalization. A macro (per-record mean) variant is exposed for
comparison but the micro value is the reported convention.
"""

from __future__ import annotations

import hashlib
import unicodedata
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Collection, Sequence

import numpy as np

from ._kernels import levenshtein_counts
from .data_model import DatasetManifest, TranscriptionRecord, VocabTag
from .errors import EmptyReference, NoRecords, SplitViolation, VocabViolation


@dataclass(frozen=True)
class EditStats:
    """Substitution/insertion/deletion counts for one aligned pair."""

    substitutions: int
    insertions: int
    deletions: int
    reference_length: int

    @property
    def distance(self) -> int:
        return self.substitutions + self.insertions + self.deletions

    @property
    def error_rate(self) -> float:
        if self.reference_length == 0:
            raise EmptyReference("error rate undefined for empty reference")
        return self.distance / self.reference_length


def _codes(text: str) -> np.ndarray:
    return np.fromiter((ord(c) for c in text), dtype=np.int32, count=len(text))


def levenshtein(reference: str, hypothesis: str) -> tuple[int, EditStats]:
    """Minimal edit distance over Unicode codepoints after NFC.

    The S/I/D decomposition breaks ties substitution-first, then insertion,
    then deletion, so S+I+D always equals the distance.
    """
    ref = unicodedata.normalize("NFC", reference)
    hyp = unicodedata.normalize("NFC", hypothesis)
    dist, subs, ins, dels = levenshtein_counts(_codes(ref), _codes(hyp))
    return int(dist), EditStats(subs, ins, dels, len(ref))


def _token_stats(reference: str, hypothesis: str) -> EditStats:
    ref_tokens = unicodedata.normalize("NFC", reference).split()
    hyp_tokens = unicodedata.normalize("NFC", hypothesis).split()
    if not ref_tokens:
        raise EmptyReference("reference has no word tokens")
    vocab: dict[str, int] = {}
    for tok in ref_tokens + hyp_tokens:
        vocab.setdefault(tok, len(vocab))
    a = np.asarray([vocab[t] for t in ref_tokens], dtype=np.int32)
    b = np.asarray([vocab[t] for t in hyp_tokens], dtype=np.int32)
    _, subs, ins, dels = levenshtein_counts(a, b)
    return EditStats(subs, ins, dels, len(ref_tokens))


@dataclass
class CerReport:
    """Micro-averaged error rate with per-record stats and a split digest."""

    micro_cer: float
    per_record: list[EditStats]
    n_records: int
    split_digest: str
    unit: str = "char"

    @property
    def macro_cer(self) -> float:
        return float(np.mean([s.error_rate for s in self.per_record]))

    def to_dict(self) -> dict:
        return {
            "unit": self.unit,
            "micro_cer": self.micro_cer,
            "macro_cer": self.macro_cer,
            "n_records": self.n_records,
            "total_edits": sum(s.distance for s in self.per_record),
            "total_reference_length": sum(s.reference_length for s in self.per_record),
            "split_digest": self.split_digest,
            "averaging": "micro (total edits / total reference length)",
        }


def split_digest(ids: Collection[str]) -> str:
    """Identity of a record set's split: SHA-256 over its sorted sample ids."""
    blob = "\n".join(sorted(ids)).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def _aggregate(records, stats, unit: str) -> CerReport:
    total_edits = sum(s.distance for s in stats)
    total_len = sum(s.reference_length for s in stats)
    return CerReport(
        micro_cer=total_edits / total_len,
        per_record=stats,
        n_records=len(stats),
        split_digest=split_digest([r.sample_id for r in records]),
        unit=unit,
    )


def cer(records: Sequence[TranscriptionRecord], threads: int = 1) -> CerReport:
    """Character error rate, micro-averaged over the record set."""
    if not records:
        raise NoRecords("no transcription records")
    for r in records:
        if not r.reference:
            raise EmptyReference(f"sample {r.sample_id!r}: empty reference")

    def one(r: TranscriptionRecord) -> EditStats:
        return levenshtein(r.reference, r.hypothesis)[1]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            stats = list(pool.map(one, records))
    else:
        stats = [one(r) for r in records]
    return _aggregate(records, stats, "char")


def wer(records: Sequence[TranscriptionRecord], threads: int = 1) -> CerReport:
    """Word error rate; tokens are runs of non-whitespace.

    For single-word records this degenerates to exact-match error.
    """
    if not records:
        raise NoRecords("no transcription records")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            stats = list(pool.map(lambda r: _token_stats(r.reference, r.hypothesis), records))
    else:
        stats = [_token_stats(r.reference, r.hypothesis) for r in records]
    return _aggregate(records, stats, "word")


def htg_htr(
    records: Sequence[TranscriptionRecord], test_ids: Collection[str], threads: int = 1
) -> float:
    """Recognition-side score: CER percent of a synthetic-trained recognizer
    evaluated on the declared real test split.

    Every record must belong to the declared split; anything else is a
    protocol violation, not a metric value.
    """
    allowed = set(test_ids)
    for r in records:
        if r.sample_id not in allowed:
            raise SplitViolation(f"sample {r.sample_id!r} is not in the declared test split")
    return 100.0 * cer(records, threads=threads).micro_cer


def htg_oov(
    records: Sequence[TranscriptionRecord],
    manifest: DatasetManifest,
    threads: int = 1,
) -> float:
    """CER percent over a generated out-of-vocabulary set.

    Every record's reference word must be tagged OOV in the manifest.
    """
    tags = {e.sample_id: e.vocab_tag for e in manifest.samples}
    for r in records:
        tag = tags.get(r.sample_id)
        if tag is None:
            raise VocabViolation(f"sample {r.sample_id!r} is not in the manifest")
        if tag is not VocabTag.OOV:
            raise VocabViolation(f"sample {r.sample_id!r} is tagged {tag.value}, expected OOV")
    return 100.0 * cer(records, threads=threads).micro_cer


@dataclass
class FilterSummary:
    threshold: float
    n_kept: int
    n_dropped: int

    @property
    def kept_fraction(self) -> float:
        total = self.n_kept + self.n_dropped
        return self.n_kept / total if total else 0.0

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "n_kept": self.n_kept,
            "n_dropped": self.n_dropped,
            "kept_fraction": self.kept_fraction,
        }


def filter_by_cer(
    records: Sequence[TranscriptionRecord], threshold: float = 0.0
) -> tuple[list[str], list[str], FilterSummary]:
    """Keep records whose per-record CER is at most the threshold.

    The default threshold 0 keeps exactly the records whose hypothesis
    equals the reference. Input order is preserved.
    """
    kept: list[str] = []
    dropped: list[str] = []
    for r in records:
        if not r.reference:
            raise EmptyReference(f"sample {r.sample_id!r}: empty reference")
        dist, stats = levenshtein(r.reference, r.hypothesis)
        if dist / stats.reference_length <= threshold:
            kept.append(r.sample_id)
        else:
            dropped.append(r.sample_id)
    return kept, dropped, FilterSummary(threshold, len(kept), len(dropped))
