"""Deterministic desk-scale fixture generation.

Produces synthetic word images (procedural glyph strokes, parameterized per
writer), aligned low-dimensional feature vectors, and prediction logs with
controllable error rates. Everything derives from a single seed through
numpy's PCG64 stream, so equal seeds give byte-identical files.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import SchemaError
from .htgf import write_feature_matrix
from .images import save_gray_png
from .manifest import save_manifest, save_style_predictions, save_transcriptions
from .types import (
    DatasetManifest,
    FeatureMatrix,
    GrayImage,
    SampleEntry,
    StylePredictionRecord,
    TranscriptionRecord,
    VocabTag,
)

_VOCAB = (
    "the and for are but not you all can had her was one our out day get has him "
    "his how man new now old see two way who boy did its let put say she too use "
    "move word time work house water sound place world small found still between "
    "name very through form sentence great think help line turn cause same mean"
).split()

_ASCENDER = 0.0  # glyph-box y of ascender top
_DESCENDER = 1.3  # glyph-box y of descender bottom


def _diamond(cx, cy, rx, ry):
    return [
        ((cx, cy - ry), (cx + rx, cy)),
        ((cx + rx, cy), (cx, cy + ry)),
        ((cx, cy + ry), (cx - rx, cy)),
        ((cx - rx, cy), (cx, cy - ry)),
    ]


_BOWL = _diamond(0.5, 0.65, 0.4, 0.35)

_GLYPHS: dict[str, list] = {
    "a": _BOWL + [((0.9, 0.3), (0.9, 1.0))],
    "b": [((0.1, 0.0), (0.1, 1.0))] + _diamond(0.5, 0.65, 0.4, 0.35),
    "c": [
        ((0.9, 0.4), (0.5, 0.3)),
        ((0.5, 0.3), (0.1, 0.65)),
        ((0.1, 0.65), (0.5, 1.0)),
        ((0.5, 1.0), (0.9, 0.9)),
    ],
    "d": [((0.9, 0.0), (0.9, 1.0))] + _BOWL,
    "e": [
        ((0.1, 0.65), (0.9, 0.65)),
        ((0.9, 0.65), (0.5, 0.3)),
        ((0.5, 0.3), (0.1, 0.65)),
        ((0.1, 0.65), (0.5, 1.0)),
        ((0.5, 1.0), (0.9, 0.9)),
    ],
    "f": [((0.7, 0.0), (0.4, 0.1)), ((0.4, 0.1), (0.4, 1.0)), ((0.1, 0.4), (0.7, 0.4))],
    "g": _diamond(0.5, 0.6, 0.35, 0.3)
    + [((0.85, 0.3), (0.85, 1.2)), ((0.85, 1.2), (0.4, 1.3))],
    "h": [
        ((0.1, 0.0), (0.1, 1.0)),
        ((0.1, 0.6), (0.5, 0.3)),
        ((0.5, 0.3), (0.9, 0.6)),
        ((0.9, 0.6), (0.9, 1.0)),
    ],
    "i": [((0.5, 0.3), (0.5, 1.0)), ((0.5, 0.05), (0.5, 0.12))],
    "j": [((0.6, 0.3), (0.6, 1.2)), ((0.6, 1.2), (0.2, 1.3)), ((0.6, 0.05), (0.6, 0.12))],
    "k": [
        ((0.1, 0.0), (0.1, 1.0)),
        ((0.8, 0.3), (0.1, 0.65)),
        ((0.35, 0.55), (0.9, 1.0)),
    ],
    "l": [((0.5, 0.0), (0.5, 1.0))],
    "m": [
        ((0.1, 0.3), (0.1, 1.0)),
        ((0.1, 0.45), (0.3, 0.3)),
        ((0.3, 0.3), (0.5, 0.45)),
        ((0.5, 0.45), (0.5, 1.0)),
        ((0.5, 0.45), (0.7, 0.3)),
        ((0.7, 0.3), (0.9, 0.45)),
        ((0.9, 0.45), (0.9, 1.0)),
    ],
    "n": [
        ((0.1, 0.3), (0.1, 1.0)),
        ((0.1, 0.5), (0.5, 0.3)),
        ((0.5, 0.3), (0.9, 0.5)),
        ((0.9, 0.5), (0.9, 1.0)),
    ],
    "o": _BOWL,
    "p": [((0.1, 0.3), (0.1, 1.3))] + _BOWL,
    "q": _BOWL + [((0.9, 0.3), (0.9, 1.3))],
    "r": [((0.2, 0.3), (0.2, 1.0)), ((0.2, 0.55), (0.6, 0.3)), ((0.6, 0.3), (0.9, 0.45))],
    "s": [
        ((0.9, 0.35), (0.5, 0.3)),
        ((0.5, 0.3), (0.15, 0.45)),
        ((0.15, 0.45), (0.85, 0.8)),
        ((0.85, 0.8), (0.5, 1.0)),
        ((0.5, 1.0), (0.1, 0.9)),
    ],
    "t": [((0.5, 0.05), (0.5, 0.95)), ((0.5, 0.95), (0.8, 1.0)), ((0.15, 0.3), (0.85, 0.3))],
    "u": [
        ((0.1, 0.3), (0.1, 0.85)),
        ((0.1, 0.85), (0.5, 1.0)),
        ((0.5, 1.0), (0.9, 0.85)),
        ((0.9, 0.3), (0.9, 1.0)),
    ],
    "v": [((0.1, 0.3), (0.5, 1.0)), ((0.5, 1.0), (0.9, 0.3))],
    "w": [
        ((0.1, 0.3), (0.3, 1.0)),
        ((0.3, 1.0), (0.5, 0.5)),
        ((0.5, 0.5), (0.7, 1.0)),
        ((0.7, 1.0), (0.9, 0.3)),
    ],
    "x": [((0.1, 0.3), (0.9, 1.0)), ((0.9, 0.3), (0.1, 1.0))],
    "y": [((0.1, 0.3), (0.5, 1.0)), ((0.9, 0.3), (0.35, 1.3))],
    "z": [((0.1, 0.3), (0.9, 0.3)), ((0.9, 0.3), (0.1, 1.0)), ((0.1, 1.0), (0.9, 1.0))],
}

# Unknown characters render as a box so arbitrary transcripts stay drawable.
_FALLBACK = [
    ((0.1, 0.3), (0.9, 0.3)),
    ((0.9, 0.3), (0.9, 1.0)),
    ((0.9, 1.0), (0.1, 1.0)),
    ((0.1, 1.0), (0.1, 0.3)),
]


@dataclass
class WriterStyle:
    slant: float
    thickness: float
    x_scale: float
    wobble_amp: float
    wobble_freq: float
    ink_level: float


@dataclass
class FixtureDataset:
    manifest: DatasetManifest
    images: dict[str, GrayImage]
    features: FeatureMatrix
    transcriptions: list[TranscriptionRecord]
    style_predictions: list[StylePredictionRecord]


def _writer_style(rng: np.random.Generator) -> WriterStyle:
    return WriterStyle(
        slant=float(rng.uniform(-0.25, 0.35)),
        thickness=float(rng.uniform(0.7, 2.0)),
        x_scale=float(rng.uniform(0.85, 1.15)),
        wobble_amp=float(rng.uniform(0.0, 1.2)),
        wobble_freq=float(rng.uniform(0.1, 0.5)),
        ink_level=float(rng.uniform(0.0, 70.0)),
    )


def render_word(word: str, style: WriterStyle, rng: np.random.Generator) -> GrayImage:
    """Rasterize a word from glyph stroke skeletons; white page, dark ink."""
    scale_y = 20.0
    char_w = 13.0 * style.x_scale
    top = 4.0
    height = int(top + scale_y * _DESCENDER + 6)
    width = int(8 + char_w * len(word) + 8)
    ink = np.zeros((height, width))

    stamp = _stamp_offsets(style.thickness)
    x0 = 8.0 + rng.uniform(-1.0, 1.0)
    baseline = top + scale_y  # y of the glyph-box 1.0 line
    for ci, ch in enumerate(word):
        segs = _GLYPHS.get(ch.lower(), _FALLBACK)
        cx = x0 + ci * char_w + rng.uniform(-0.5, 0.5)
        for (ax, ay), (bx, by) in segs:
            ja = rng.uniform(-0.02, 0.02, size=4)
            pa = (cx + (ax + ja[0]) * char_w, top + (ay + ja[1]) * scale_y)
            pb = (cx + (bx + ja[2]) * char_w, top + (by + ja[3]) * scale_y)
            _draw_segment(ink, pa, pb, style, baseline, stamp)

    page = 255.0 - np.clip(ink, 0.0, 1.0) * (255.0 - style.ink_level)
    return GrayImage(np.round(page), max_intensity=255.0)


def _stamp_offsets(radius: float) -> np.ndarray:
    r = int(np.ceil(radius))
    grid = [
        (dy, dx)
        for dy in range(-r, r + 1)
        for dx in range(-r, r + 1)
        if dx * dx + dy * dy <= radius * radius + 0.25
    ]
    return np.asarray(grid, dtype=np.int64)


def _draw_segment(ink, pa, pb, style: WriterStyle, baseline: float, stamp) -> None:
    length = float(np.hypot(pb[0] - pa[0], pb[1] - pa[1]))
    n = max(2, int(length * 3))
    ts = np.linspace(0.0, 1.0, n)
    xs = pa[0] + (pb[0] - pa[0]) * ts
    ys = pa[1] + (pb[1] - pa[1]) * ts
    xs = xs + style.slant * (baseline - ys)
    xs = xs + style.wobble_amp * np.sin(style.wobble_freq * ys + 0.7)
    yi = np.round(ys).astype(np.int64)
    xi = np.round(xs).astype(np.int64)
    h, w = ink.shape
    for dy, dx in stamp:
        yy = np.clip(yi + dy, 0, h - 1)
        xx = np.clip(xi + dx, 0, w - 1)
        ink[yy, xx] = 1.0


def image_descriptor(image: GrayImage) -> np.ndarray:
    """20-d descriptor: 4x4 ink-fraction grid plus global ink statistics."""
    inkness = 1.0 - image.pixels / image.max_intensity
    h, w = inkness.shape
    cells = []
    ys = np.linspace(0, h, 5).astype(int)
    xs = np.linspace(0, w, 5).astype(int)
    for i in range(4):
        for j in range(4):
            cell = inkness[ys[i] : ys[i + 1], xs[j] : xs[j + 1]]
            cells.append(cell.mean() if cell.size else 0.0)
    total = inkness.sum()
    if total > 0:
        yy, xx = np.mgrid[0:h, 0:w]
        cy = float((yy * inkness).sum() / total) / h
        cx = float((xx * inkness).sum() / total) / w
    else:
        cy = cx = 0.5
    return np.array(cells + [inkness.mean(), float(inkness.std()), cy, cx])


def _random_word(rng: np.random.Generator, lexicon: set[str]) -> str:
    while True:
        n = int(rng.integers(4, 9))
        word = "".join(string.ascii_lowercase[k] for k in rng.integers(0, 26, size=n))
        if word not in lexicon:
            return word


def _corrupt(word: str, rate: float, rng: np.random.Generator) -> str:
    if rate <= 0:
        return word
    out = []
    for ch in word:
        if rng.random() < rate:
            repl = ch
            while repl == ch:
                repl = string.ascii_lowercase[int(rng.integers(0, 26))]
            out.append(repl)
        else:
            out.append(ch)
    return "".join(out)


def generate_fixture_dataset(
    n_writers: int,
    n_samples: int,
    seed: int,
    hypothesis_error_rate: float = 0.0,
    style_error_rate: float = 0.0,
    oov_fraction: float = 0.0,
    split_name: str = "fixture",
) -> FixtureDataset:
    """Build a fully aligned synthetic dataset (see module docstring)."""
    if n_writers < 2:
        raise SchemaError("need at least 2 writers")
    if n_samples < n_writers:
        raise SchemaError("need at least one sample per writer")

    rng = np.random.default_rng(seed)
    styles = [_writer_style(rng) for _ in range(n_writers)]
    vocab_set = set(_VOCAB)

    samples: list[SampleEntry] = []
    images: dict[str, GrayImage] = {}
    feats = []
    transcriptions: list[TranscriptionRecord] = []
    style_predictions: list[StylePredictionRecord] = []

    for i in range(n_samples):
        writer = i % n_writers
        sample_id = f"w{writer:03d}-s{i:05d}"
        if rng.random() < oov_fraction:
            word = _random_word(rng, vocab_set)
            tag = VocabTag.OOV
        else:
            word = _VOCAB[int(rng.integers(0, len(_VOCAB)))]
            tag = VocabTag.IV
        image = render_word(word, styles[writer], rng)
        images[sample_id] = image
        feats.append(image_descriptor(image))
        samples.append(
            SampleEntry(
                sample_id=sample_id,
                transcript=word,
                writer_id=writer,
                image_path=f"images/{sample_id}.png",
                vocab_tag=tag,
            )
        )
        transcriptions.append(
            TranscriptionRecord(
                sample_id=sample_id,
                reference=word,
                hypothesis=_corrupt(word, hypothesis_error_rate, rng),
            )
        )
        predicted = writer
        if style_error_rate > 0 and rng.random() < style_error_rate:
            predicted = int(rng.integers(0, n_writers - 1))
            if predicted >= writer:
                predicted += 1
        style_predictions.append(
            StylePredictionRecord(sample_id=sample_id, true_label=writer, predicted_label=predicted)
        )

    manifest = DatasetManifest(split_name, samples)
    features = FeatureMatrix(ids=[s.sample_id for s in samples], data=np.vstack(feats))
    return FixtureDataset(manifest, images, features, transcriptions, style_predictions)


def write_fixture_dataset(fixture: FixtureDataset, out_dir) -> dict[str, Path]:
    """Write every fixture artifact under out_dir; returns the path map."""
    out = Path(out_dir)
    (out / "images").mkdir(parents=True, exist_ok=True)
    paths = {
        "manifest": out / "manifest.jsonl",
        "features": out / "features.htgf",
        "transcriptions": out / "transcriptions.jsonl",
        "style": out / "style.jsonl",
        "images_dir": out / "images",
    }
    save_manifest(fixture.manifest, paths["manifest"])
    write_feature_matrix(paths["features"], fixture.features)
    save_transcriptions(fixture.transcriptions, paths["transcriptions"])
    save_style_predictions(fixture.style_predictions, paths["style"])
    for sample_id, image in fixture.images.items():
        save_gray_png(out / "images" / f"{sample_id}.png", image.pixels)
    return paths
