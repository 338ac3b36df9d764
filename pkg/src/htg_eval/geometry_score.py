"""Topology-based set comparison via witness-complex persistence.

Pipeline: landmark subsets are drawn from the point cloud, the relaxed
witness filtration is built on landmark simplices up to dimension 2 (a
simplex enters at the largest relaxation of its edges; an edge's relaxation
is the smallest slack over witnesses relative to each witness's
second-nearest landmark), its boundary matrix is reduced to the
one-dimensional persistence barcode, and the barcode is converted into the
distribution of "time with exactly i holes" over [0, alpha_max] with
alpha_max = gamma * (max landmark-to-witness distance). Averaging that
distribution over seeded landmark draws and summing squared differences
between two clouds gives the final score:

    score(X1, X2) = sum_i (mean_rlt(i, X1) - mean_rlt(i, X2))^2

Repeats are independent (seeded as seed + repeat index) and accumulated in
repeat order, so results are deterministic and parallel-safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from ._kernels import witness_edge_times
from .data_model import FeatureMatrix
from .errors import InsufficientSamples, SchemaError, ShapeError

Points = Union[FeatureMatrix, np.ndarray]


@dataclass(frozen=True)
class GsParams:
    i_max: int = 100
    n_landmarks: int = 64
    gamma: float = 1.0 / 128.0
    n_repeats: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.i_max < 1:
            raise SchemaError("i_max must be >= 1")
        if self.n_landmarks < 2:
            raise SchemaError("need at least 2 landmarks")
        if self.gamma <= 0:
            raise SchemaError("gamma must be positive")
        if self.n_repeats < 1:
            raise SchemaError("n_repeats must be >= 1")

    def metadata(self) -> dict:
        return {
            "i_max": self.i_max,
            "n_landmarks": self.n_landmarks,
            "gamma": self.gamma,
            "n_repeats": self.n_repeats,
            "seed": self.seed,
            "witness_relaxation": "second-nearest-landmark slack",
        }


@dataclass
class PersistenceBarcode:
    """H1 intervals over the filtration parameter, clipped to [0, alpha_max].

    Zero-length pairs (a cycle filled the instant it appears) are dropped:
    no hole ever exists at any parameter value for such pairs.
    """

    intervals: list[tuple[float, float]]
    alpha_max: float

    def __post_init__(self):
        for birth, death in self.intervals:
            if not (0.0 <= birth <= death <= self.alpha_max):
                raise SchemaError(f"bad interval ({birth}, {death}) for alpha_max {self.alpha_max}")


@dataclass
class RltDistribution:
    """values[i] = fraction of [0, alpha_max] with exactly i live holes."""

    values: np.ndarray
    alpha_max: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if (self.values < 0).any():
            raise SchemaError("relative living times must be non-negative")
        if self.values.sum() > 1.0 + 1e-9:
            raise SchemaError("relative living times must sum to at most 1")


def _as_points(points: Points) -> np.ndarray:
    if isinstance(points, FeatureMatrix):
        return points.data
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"point cloud must be 2-D, got shape {arr.shape}")
    return arr


def _witness_distances(points: np.ndarray, landmarks: Sequence[int]) -> np.ndarray:
    """W x L Euclidean distances from every witness to every landmark."""
    lm = points[list(landmarks)]
    sq = ((points[:, None, :] - lm[None, :, :]) ** 2).sum(axis=2)
    return np.sqrt(np.maximum(sq, 0.0))


def h1_persistence_pairs(
    edge_times: np.ndarray, alpha_max: float
) -> tuple[list[tuple[float, float]], int]:
    """Raw H1 pairing of the truncated filtration.

    Returns (intervals, n_cycle_edges) where intervals includes zero-length
    pairs and uses inf for cycles that never die within the truncation.
    Low-level; most callers want witness_persistence_h1.
    """
    n_l = edge_times.shape[0]
    iu, ju = np.triu_indices(n_l, k=1)
    times = edge_times[iu, ju]
    live = times <= alpha_max
    iu, ju, times = iu[live], ju[live], times[live]
    order = np.lexsort((ju, iu, times))
    iu, ju, times = iu[order], ju[order], times[order]
    n_edges = len(times)

    # Union-find: an edge that joins two components is a tree edge, the
    # rest create independent 1-cycles.
    parent = list(range(n_l))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    is_cycle = np.zeros(n_edges, dtype=bool)
    for e in range(n_edges):
        ra, rb = find(int(iu[e])), find(int(ju[e]))
        if ra == rb:
            is_cycle[e] = True
        else:
            parent[ra] = rb
    n_cycles = int(is_cycle.sum())
    if n_cycles == 0:
        return [], 0

    edge_index = {(int(iu[e]), int(ju[e])): e for e in range(n_edges)}

    # Triangles: vertex triples whose three edges all entered. Enumerated
    # from the live-edge adjacency, entry time = max of the edge times.
    adj = np.zeros((n_l, n_l), dtype=bool)
    adj[iu, ju] = True
    adj[ju, iu] = True
    tris: list[tuple[float, int, int, int]] = []
    for e in range(n_edges):
        a, b = int(iu[e]), int(ju[e])
        common = np.nonzero(adj[a] & adj[b])[0]
        for c in common:
            c = int(c)
            if c <= b:
                continue
            t = max(
                times[e],
                times[edge_index[(min(a, c), max(a, c))]],
                times[edge_index[(b, c)]],
            )
            if t <= alpha_max:
                tris.append((t, a, b, c))
    tris.sort()

    # Column reduction over GF(2); columns are triangles (int bitsets over
    # edge indices), lows always land on cycle edges.
    low_owner: dict[int, int] = {}
    death_of: dict[int, float] = {}
    for t, a, b, c in tris:
        col = (
            (1 << edge_index[(a, b)])
            | (1 << edge_index[(min(a, c), max(a, c))])
            | (1 << edge_index[(b, c)])
        )
        while col:
            lw = col.bit_length() - 1
            owner = low_owner.get(lw)
            if owner is None:
                low_owner[lw] = col
                death_of[lw] = t
                break
            col ^= owner

    intervals = []
    for e in np.nonzero(is_cycle)[0]:
        e = int(e)
        intervals.append((float(times[e]), death_of.get(e, np.inf)))
    return intervals, n_cycles


def _barcode_from_distances(dist_wl: np.ndarray, alpha_max: float) -> PersistenceBarcode:
    second_nearest = np.ascontiguousarray(np.partition(dist_wl, 1, axis=1)[:, 1])
    edge_times = witness_edge_times(np.ascontiguousarray(dist_wl), second_nearest)
    raw, _ = h1_persistence_pairs(edge_times, alpha_max)
    intervals = [
        (birth, min(death, alpha_max)) for birth, death in raw if min(death, alpha_max) > birth
    ]
    intervals.sort()
    return PersistenceBarcode(intervals=intervals, alpha_max=alpha_max)


def _check_landmarks(landmarks: Sequence[int]) -> list[int]:
    lm = list(landmarks)
    if len(set(lm)) != len(lm):
        raise SchemaError("landmark indices must be distinct")
    if len(lm) < 3:
        raise InsufficientSamples("persistence needs at least 3 landmarks")
    return lm


def witness_persistence_h1(
    points: Points, landmarks: Sequence[int], alpha_max: float
) -> PersistenceBarcode:
    """H1 barcode of the relaxed witness filtration, truncated at alpha_max."""
    pts = _as_points(points)
    lm = _check_landmarks(landmarks)
    if alpha_max <= 0:
        raise SchemaError("alpha_max must be positive")
    return _barcode_from_distances(_witness_distances(pts, lm), alpha_max)


def rlt(points: Points, landmarks: Sequence[int], params: GsParams) -> RltDistribution:
    """Relative living times for one landmark draw.

    alpha_max is gamma times the largest landmark-to-witness distance; the
    barcode's event points partition [0, alpha_max] into spans with a fixed
    hole count, and each span's length accrues to its count's entry. Counts
    at or above i_max are truncated (their mass is dropped).
    """
    pts = _as_points(points)
    lm = _check_landmarks(landmarks)
    dist_wl = _witness_distances(pts, lm)
    alpha_max = params.gamma * float(dist_wl.max())
    values = np.zeros(params.i_max)
    if alpha_max <= 0.0:
        # All points coincide: zero holes for the whole (degenerate) sweep.
        values[0] = 1.0
        return RltDistribution(values=values, alpha_max=alpha_max)

    barcode = _barcode_from_distances(dist_wl, alpha_max)
    events: list[tuple[float, int]] = [(0.0, 0), (alpha_max, 0)]
    for birth, death in barcode.intervals:
        events.append((birth, +1))
        events.append((death, -1))
    events.sort()
    count = 0
    prev = 0.0
    for pos, delta in events:
        if pos > prev:
            if count < params.i_max:
                values[count] += (pos - prev) / alpha_max
            prev = pos
        count += delta
    return RltDistribution(values=values, alpha_max=alpha_max)


def mrlt(points: Points, params: GsParams) -> np.ndarray:
    """Mean relative living times over seeded uniform landmark draws."""
    pts = _as_points(points)
    n = pts.shape[0]
    if n < params.n_landmarks:
        raise InsufficientSamples(
            f"need at least n_landmarks={params.n_landmarks} points, got {n}"
        )
    acc = np.zeros(params.i_max)
    for repeat in range(params.n_repeats):
        rng = np.random.default_rng(params.seed + repeat)
        landmarks = rng.choice(n, size=params.n_landmarks, replace=False)
        acc += rlt(pts, landmarks, params).values
    return acc / params.n_repeats


def geometry_score(
    x1: Points, x2: Points, params: GsParams, params2: Optional[GsParams] = None
) -> float:
    """Sum of squared differences of the two clouds' mean relative living times."""
    m1 = mrlt(x1, params)
    m2 = mrlt(x2, params2 if params2 is not None else params)
    diff = m1 - m2
    return float(np.dot(diff, diff))
