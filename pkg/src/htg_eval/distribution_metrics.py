"""Feature-space distances between real and generated sets.

Implements the Frechet distance between Gaussian summaries, the unbiased
squared-MMD kernel distance, the Inception-style score, the perceptual
layer-map distance, and the per-writer mean-feature distance, plus the
shared linear algebra (Gaussian summaries and the PSD matrix square root).

Conventions that shift values are recorded in report metadata:
covariance is unbiased (1/(N-1)); the kernel distance defaults to the
polynomial kernel (x.y/D + 1)^3; the writer distance aggregates each
writer's vectors by their arithmetic mean.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
import scipy.linalg

from .data_model import DatasetManifest, FeatureMatrix, LayerFeatureMapSet, LogitMatrix
from .errors import (
    AlignmentError,
    InsufficientSamples,
    NumericalError,
    SchemaError,
    ShapeError,
    WriterMismatch,
)

_FID_NEGATIVE_TOLERANCE = 1e-6


@dataclass
class GaussianSummary:
    """Mean vector and covariance of a feature set (Frechet sufficient stats)."""

    mu: np.ndarray
    sigma: np.ndarray
    n: int

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=np.float64).reshape(-1)
        self.sigma = np.asarray(self.sigma, dtype=np.float64)
        d = self.mu.shape[0]
        if self.sigma.shape != (d, d):
            raise ShapeError(f"sigma shape {self.sigma.shape} does not match mu dim {d}")
        if np.abs(self.sigma - self.sigma.T).max(initial=0.0) > 1e-9:
            raise ShapeError("sigma must be symmetric within 1e-9")

    @property
    def dim(self) -> int:
        return self.mu.shape[0]


@dataclass(frozen=True)
class KernelSpec:
    """Polynomial kernel (gamma x.y + coef0)^degree; gamma defaults to 1/D."""

    kind: str = "polynomial"
    degree: int = 3
    gamma: Optional[float] = None
    coef0: float = 1.0

    def __post_init__(self):
        if self.kind != "polynomial":
            raise SchemaError(f"unsupported kernel kind {self.kind!r}")
        if self.degree < 1:
            raise SchemaError("kernel degree must be >= 1")
        if self.gamma is not None and self.gamma <= 0:
            raise SchemaError("kernel gamma must be positive")

    def gram(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        gamma = self.gamma if self.gamma is not None else 1.0 / x.shape[1]
        return (gamma * (x @ y.T) + self.coef0) ** self.degree

    def metadata(self, dim: int) -> dict:
        return {
            "kind": self.kind,
            "degree": self.degree,
            "gamma": self.gamma if self.gamma is not None else 1.0 / dim,
            "coef0": self.coef0,
        }


def gaussian_summary(features: FeatureMatrix) -> GaussianSummary:
    """Column mean and unbiased sample covariance, symmetrized."""
    x = features.data
    if x.shape[0] < 2:
        raise InsufficientSamples(f"need >= 2 samples for a covariance, got {x.shape[0]}")
    mu = x.mean(axis=0)
    centered = x - mu
    sigma = centered.T @ centered / (x.shape[0] - 1)
    sigma = (sigma + sigma.T) / 2.0
    return GaussianSummary(mu=mu, sigma=sigma, n=x.shape[0])


def matrix_sqrt_psd(m: np.ndarray, clamp_eps: float = 1e-10) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition.

    Eigenvalues below clamp_eps are clamped to zero; the result must
    multiply back to m within a small Frobenius residual, otherwise the
    input was not (numerically) PSD and a NumericalError is raised.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got {m.shape}")
    if np.abs(m - m.T).max(initial=0.0) > 1e-6:
        raise ShapeError("matrix is not symmetric within 1e-6")
    try:
        eigvals, eigvecs = scipy.linalg.eigh((m + m.T) / 2.0)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    eigvals = np.where(eigvals < clamp_eps, 0.0, eigvals)
    root = (eigvecs * np.sqrt(eigvals)) @ eigvecs.T
    root = (root + root.T) / 2.0
    residual = np.linalg.norm(root @ root - m)
    if residual > 1e-6 * (1.0 + np.linalg.norm(m)):
        raise NumericalError(
            f"matrix square root residual {residual:.3e} exceeds tolerance; input not PSD?"
        )
    return root


def fid(real: GaussianSummary, gen: GaussianSummary) -> float:
    """Frechet distance between two Gaussian summaries.

    Uses the symmetric-product form sqrt(sqrt(Sr) Sg sqrt(Sr)), which equals
    the trace term of the raw product but stays in symmetric territory.
    """
    if real.dim != gen.dim:
        raise ShapeError(f"dimension mismatch: {real.dim} vs {gen.dim}")
    diff = real.mu - gen.mu
    sqrt_r = matrix_sqrt_psd(real.sigma)
    inner = sqrt_r @ gen.sigma @ sqrt_r
    covmean = matrix_sqrt_psd((inner + inner.T) / 2.0)
    value = float(diff @ diff + np.trace(real.sigma) + np.trace(gen.sigma) - 2.0 * np.trace(covmean))
    if value < -_FID_NEGATIVE_TOLERANCE:
        raise NumericalError(f"FID evaluated to {value}, beyond -{_FID_NEGATIVE_TOLERANCE}")
    return max(value, 0.0)


def kid(
    real: FeatureMatrix, gen: FeatureMatrix, kernel: Optional[KernelSpec] = None
) -> float:
    """Unbiased squared-MMD estimate; may be slightly negative by design."""
    if real.dim != gen.dim:
        raise ShapeError(f"dimension mismatch: {real.dim} vs {gen.dim}")
    m, n = real.n, gen.n
    if m < 2 or n < 2:
        raise InsufficientSamples("KID needs at least 2 samples on each side")
    k = kernel or KernelSpec()
    x, y = real.data, gen.data
    k_xx = k.gram(x, x)
    k_yy = k.gram(y, y)
    k_xy = k.gram(x, y)
    sum_xx = (k_xx.sum() - np.trace(k_xx)) / (m * (m - 1))
    sum_yy = (k_yy.sum() - np.trace(k_yy)) / (n * (n - 1))
    sum_xy = k_xy.sum() / (m * n)
    return float(sum_xx + sum_yy - 2.0 * sum_xy)


def kid_subsets(
    real: FeatureMatrix,
    gen: FeatureMatrix,
    kernel: Optional[KernelSpec] = None,
    n_subsets: int = 10,
    subset_size: int = 100,
    seed: int = 0,
) -> tuple[float, float]:
    """Mean and stddev of KID over seeded random size-b blocks of each side."""
    if n_subsets < 1:
        raise SchemaError("n_subsets must be >= 1")
    size = min(subset_size, real.n, gen.n)
    if size < 2:
        raise InsufficientSamples("subset size must be >= 2")
    rng = np.random.default_rng(seed)
    values = []
    for _ in range(n_subsets):
        ri = rng.choice(real.n, size=size, replace=False)
        gi = rng.choice(gen.n, size=size, replace=False)
        values.append(
            kid(
                FeatureMatrix([real.ids[i] for i in ri], real.data[ri]),
                FeatureMatrix([gen.ids[i] for i in gi], gen.data[gi]),
                kernel,
            )
        )
    arr = np.asarray(values)
    return float(arr.mean()), float(arr.std())


def inception_score(logits: LogitMatrix, n_splits: int = 1) -> tuple[float, float]:
    """exp(mean KL(p(y|x) || p(y))) per split; returns (mean, stddev).

    Rows are softmaxed unless already probabilities; 0 log 0 counts as 0.
    """
    n = logits.logits.shape[0]
    if n_splits < 1 or n < n_splits:
        raise SchemaError(f"need 1 <= n_splits <= N, got {n_splits} for N={n}")
    if logits.is_probability:
        p = logits.logits
        sums = p.sum(axis=1)
        if np.abs(sums - 1.0).max() > 1e-6:
            raise SchemaError("probability rows must sum to 1 within 1e-6")
    else:
        z = logits.logits - logits.logits.max(axis=1, keepdims=True)
        e = np.exp(z)
        p = e / e.sum(axis=1, keepdims=True)

    scores = []
    for chunk in np.array_split(p, n_splits):
        marginal = chunk.mean(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(chunk > 0, np.log(chunk) - np.log(marginal), 0.0)
        kl = (np.where(chunk > 0, chunk, 0.0) * ratio).sum(axis=1)
        scores.append(float(np.exp(kl.mean())))
    arr = np.asarray(scores)
    return float(arr.mean()), float(arr.std())


def lpips(a: LayerFeatureMapSet, b: LayerFeatureMapSet) -> np.ndarray:
    """Per-pair perceptual distance over channel-unit-normalized layer maps."""
    if a.ids != b.ids:
        raise AlignmentError("layer map sets have different id tables")
    names_a = [layer.layer_name for layer in a.layers]
    names_b = [layer.layer_name for layer in b.layers]
    if names_a != names_b:
        raise ShapeError(f"layer names differ: {names_a} vs {names_b}")
    total = np.zeros(a.n)
    for la, lb in zip(a.layers, b.layers):
        if la.maps.shape != lb.maps.shape:
            raise ShapeError(
                f"layer {la.layer_name!r}: shapes differ {la.maps.shape} vs {lb.maps.shape}"
            )
        if la.weight == 0.0 and lb.weight == 0.0:
            continue
        ua = _unit_normalize(la.maps)
        ub = _unit_normalize(lb.maps)
        sq = ((ua - ub) ** 2).sum(axis=1)  # N x H x W
        h, w = sq.shape[1], sq.shape[2]
        total += la.weight * sq.reshape(sq.shape[0], -1).sum(axis=1) / (h * w)
    return total


def _unit_normalize(maps: np.ndarray, eps: float = 1e-10) -> np.ndarray:
    norms = np.sqrt((maps * maps).sum(axis=1, keepdims=True))
    return maps / (norms + eps)


@dataclass
class WriterFeatureTable:
    """writer_id -> feature vectors (shared dimension)."""

    vectors: dict[int, np.ndarray]

    def __post_init__(self):
        dims = set()
        for writer, arr in list(self.vectors.items()):
            arr = np.asarray(arr, dtype=np.float64)
            if arr.ndim == 1:
                arr = arr.reshape(1, -1)
            if arr.shape[0] < 1:
                raise SchemaError(f"writer {writer}: needs at least one vector")
            self.vectors[writer] = arr
            dims.add(arr.shape[1])
        if len(dims) > 1:
            raise ShapeError(f"inconsistent feature dimensions: {sorted(dims)}")

    @classmethod
    def from_features(
        cls, features: FeatureMatrix, manifest: DatasetManifest
    ) -> "WriterFeatureTable":
        writer_of = {e.sample_id: e.writer_id for e in manifest.samples}
        grouped: dict[int, list[np.ndarray]] = {}
        for i, sample_id in enumerate(features.ids):
            if sample_id not in writer_of:
                raise AlignmentError(f"feature id {sample_id!r} missing from manifest")
            grouped.setdefault(writer_of[sample_id], []).append(features.data[i])
        return cls({w: np.vstack(vecs) for w, vecs in grouped.items()})


def hwd(real: WriterFeatureTable, gen: WriterFeatureTable) -> float:
    """Mean Euclidean distance between per-writer mean feature vectors."""
    if set(real.vectors) != set(gen.vectors):
        only_real = sorted(set(real.vectors) - set(gen.vectors))[:5]
        only_gen = sorted(set(gen.vectors) - set(real.vectors))[:5]
        raise WriterMismatch(f"writer sets differ (real-only {only_real}, gen-only {only_gen})")
    writers = sorted(real.vectors)
    total = 0.0
    for w in writers:
        diff = real.vectors[w].mean(axis=0) - gen.vectors[w].mean(axis=0)
        total += float(np.linalg.norm(diff))
    return total / len(writers)


def conventions_metadata(kernel: Optional[KernelSpec] = None, dim: Optional[int] = None) -> dict:
    """Report metadata describing the value-shifting conventions in use."""
    meta = {
        "covariance": "unbiased (1/(N-1))",
        "hwd_writer_aggregation": "mean feature vector",
        "fid_matrix_sqrt": "symmetric-product eigendecomposition, eigenvalue clamp 1e-10",
    }
    if kernel is not None and dim is not None:
        meta["kid_kernel"] = kernel.metadata(dim)
    return meta


def subset_features(features: FeatureMatrix, ids: Sequence[str]) -> FeatureMatrix:
    """Row subset of a feature matrix by sample id (order follows ids)."""
    index: Mapping[str, int] = {s: i for i, s in enumerate(features.ids)}
    missing = [s for s in ids if s not in index]
    if missing:
        raise AlignmentError(f"ids missing from feature matrix: {missing[:5]}")
    rows = [index[s] for s in ids]
    return FeatureMatrix(list(ids), features.data[rows])
