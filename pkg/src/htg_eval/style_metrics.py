"""Writer-style evaluation: classification accuracy with split enforcement.

The writer-identification classifier itself is external; this module owns
the split-integrity checks, the accuracy computation, and the confusion
breakdown. Predicted labels outside the set of true writer labels count as
errors and are tallied separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, Sequence

from .data_model import StylePredictionRecord
from .errors import NoRecords, SplitViolation


@dataclass
class StyleReport:
    accuracy: float
    per_writer: dict[int, float]
    confusion: dict[tuple[int, int], int]
    n_records: int
    unknown_predictions: int

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "n_records": self.n_records,
            "unknown_predictions": self.unknown_predictions,
            "per_writer": {str(w): acc for w, acc in sorted(self.per_writer.items())},
            "confusion": [
                {"true": t, "predicted": p, "count": c}
                for (t, p), c in sorted(self.confusion.items())
            ],
        }


def style_accuracy(records: Sequence[StylePredictionRecord]) -> StyleReport:
    """Exact-match accuracy with per-writer breakdown and confusion counts."""
    if not records:
        raise NoRecords("no style prediction records")
    known = {r.true_label for r in records}
    confusion: dict[tuple[int, int], int] = {}
    totals: dict[int, int] = {}
    hits: dict[int, int] = {}
    unknown = 0
    for r in records:
        key = (r.true_label, r.predicted_label)
        confusion[key] = confusion.get(key, 0) + 1
        totals[r.true_label] = totals.get(r.true_label, 0) + 1
        if r.predicted_label == r.true_label:
            hits[r.true_label] = hits.get(r.true_label, 0) + 1
        elif r.predicted_label not in known:
            unknown += 1
    n_correct = sum(hits.values())
    return StyleReport(
        accuracy=n_correct / len(records),
        per_writer={w: hits.get(w, 0) / totals[w] for w in totals},
        confusion=confusion,
        n_records=len(records),
        unknown_predictions=unknown,
    )


def htg_style(records: Sequence[StylePredictionRecord], eval_ids: Collection[str]) -> float:
    """Style-imitation score: accuracy percent over the held-out eval split.

    Records outside the declared eval split mean the classifier may have
    seen those samples during training; that is a protocol violation.
    """
    allowed = set(eval_ids)
    for r in records:
        if r.sample_id not in allowed:
            raise SplitViolation(f"sample {r.sample_id!r} is not in the declared eval split")
    return 100.0 * style_accuracy(records).accuracy
