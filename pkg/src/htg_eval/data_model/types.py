"""Domain types shared by all metric modules.

All containers validate their invariants at construction and are immutable
afterwards (arrays are marked read-only), so instances are safe to share
across concurrent readers.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from ..errors import (
    AlignmentError,
    DuplicateId,
    EmptyReference,
    NonFiniteData,
    SchemaError,
    ShapeError,
)


class VocabTag(str, Enum):
    IV = "IV"
    OOV = "OOV"
    UNSET = "UNSET"


def _frozen_f64(data, *, what: str) -> np.ndarray:
    arr = np.array(data, dtype=np.float64)
    if not np.isfinite(arr).all():
        raise NonFiniteData(f"{what} contains NaN or Inf")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class SampleEntry:
    sample_id: str
    transcript: str
    writer_id: int
    image_path: Optional[str] = None
    vocab_tag: VocabTag = VocabTag.UNSET

    def __post_init__(self):
        if not self.sample_id:
            raise SchemaError("sample_id must be non-empty")
        if not self.transcript:
            raise SchemaError(f"sample {self.sample_id!r}: transcript must be non-empty")
        if not isinstance(self.writer_id, int) or self.writer_id < 0:
            raise SchemaError(
                f"sample {self.sample_id!r}: writer_id must be a non-negative integer"
            )


@dataclass
class DatasetManifest:
    """A declarative split description: samples plus a derived lexicon."""

    split_name: str
    samples: list[SampleEntry]
    _lexicon: Optional[frozenset[str]] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        seen: set[str] = set()
        for entry in self.samples:
            if entry.sample_id in seen:
                raise DuplicateId(f"duplicate sample_id {entry.sample_id!r}")
            seen.add(entry.sample_id)

    @property
    def lexicon(self) -> frozenset[str]:
        """Distinct transcripts, NFC-normalized (cached)."""
        if self._lexicon is None:
            self._lexicon = frozenset(
                unicodedata.normalize("NFC", e.transcript) for e in self.samples
            )
        return self._lexicon

    @property
    def ids(self) -> list[str]:
        return [e.sample_id for e in self.samples]

    def by_id(self) -> dict[str, SampleEntry]:
        return {e.sample_id: e for e in self.samples}

    def subset(self, ids: Sequence[str], split_name: str) -> "DatasetManifest":
        index = self.by_id()
        missing = [i for i in ids if i not in index]
        if missing:
            raise SchemaError(f"unknown sample ids in subset: {missing[:5]}")
        return DatasetManifest(split_name, [index[i] for i in ids])

    def __len__(self) -> int:
        return len(self.samples)


@dataclass
class FeatureMatrix:
    """N x D embedding matrix with row-aligned sample ids."""

    ids: list[str]
    data: np.ndarray

    def __post_init__(self):
        self.data = _frozen_f64(self.data, what="feature matrix")
        if self.data.ndim != 2 or self.data.shape[0] < 1 or self.data.shape[1] < 1:
            raise ShapeError(f"feature matrix must be 2-D non-empty, got {self.data.shape}")
        if len(self.ids) != self.data.shape[0]:
            raise AlignmentError(
                f"{len(self.ids)} ids vs {self.data.shape[0]} feature rows"
            )

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


@dataclass
class LogitMatrix:
    """N x K class scores; rows are probabilities when the flag says so."""

    ids: list[str]
    logits: np.ndarray
    is_probability: bool

    def __post_init__(self):
        self.logits = _frozen_f64(self.logits, what="logit matrix")
        if self.logits.ndim != 2:
            raise ShapeError(f"logit matrix must be 2-D, got {self.logits.shape}")
        if len(self.ids) != self.logits.shape[0]:
            raise AlignmentError(
                f"{len(self.ids)} ids vs {self.logits.shape[0]} logit rows"
            )
        if self.is_probability:
            if (self.logits < 0).any() or (self.logits > 1).any():
                raise SchemaError("probability entries must lie in [0, 1]")
            sums = self.logits.sum(axis=1)
            if np.abs(sums - 1.0).max() > 1e-6:
                raise SchemaError("probability rows must sum to 1 within 1e-6")

    @property
    def n_classes(self) -> int:
        return self.logits.shape[1]


@dataclass
class LayerFeatureMap:
    """One layer's N x C x H x W activation tensor with its mixing weight."""

    layer_name: str
    maps: np.ndarray
    weight: float = 1.0

    def __post_init__(self):
        self.maps = _frozen_f64(self.maps, what=f"layer {self.layer_name!r} maps")
        if self.maps.ndim != 4:
            raise ShapeError(
                f"layer {self.layer_name!r}: maps must be 4-D (N,C,H,W), got {self.maps.shape}"
            )
        if not np.isfinite(self.weight) or self.weight < 0:
            raise SchemaError(f"layer {self.layer_name!r}: weight must be finite and >= 0")


@dataclass
class LayerFeatureMapSet:
    ids: list[str]
    layers: list[LayerFeatureMap]

    def __post_init__(self):
        n = len(self.ids)
        for layer in self.layers:
            if layer.maps.shape[0] != n:
                raise AlignmentError(
                    f"layer {layer.layer_name!r} has {layer.maps.shape[0]} samples, expected {n}"
                )

    @property
    def n(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class TranscriptionRecord:
    sample_id: str
    reference: str
    hypothesis: str

    def __post_init__(self):
        if not self.reference:
            raise EmptyReference(f"sample {self.sample_id!r}: empty reference")


@dataclass(frozen=True)
class StylePredictionRecord:
    sample_id: str
    true_label: int
    predicted_label: int

    def __post_init__(self):
        if self.true_label < 0 or self.predicted_label < 0:
            raise SchemaError(f"sample {self.sample_id!r}: labels must be >= 0")


@dataclass
class GrayImage:
    """Grayscale image with explicit dynamic range [0, max_intensity]."""

    pixels: np.ndarray
    max_intensity: float = 255.0

    def __post_init__(self):
        self.pixels = _frozen_f64(self.pixels, what="image")
        if self.pixels.ndim != 2 or self.pixels.size == 0:
            raise ShapeError(f"image must be 2-D non-empty, got {self.pixels.shape}")
        if self.max_intensity <= 0:
            raise SchemaError("max_intensity must be positive")
        if (self.pixels < 0).any() or (self.pixels > self.max_intensity).any():
            raise SchemaError(f"pixels must lie in [0, {self.max_intensity}]")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]
