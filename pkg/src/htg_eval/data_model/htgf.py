"""HTGF v1 tensor interchange container.

Layout (little-endian throughout):

    bytes 0-3   magic ``HTGF``
    u32         version (= 1)
    u32         rank r
    r * u32     dims, dims[0] = N (sample count)
    u32         id-table byte length
    bytes       id table: N sample ids, newline-separated UTF-8
    f32 * prod(dims)   payload, row-major
    u8          (logit files only) 1 = probabilities, 0 = raw logits

Feature files end exactly at the payload; logit files carry exactly one
trailing flag byte. Anything else is a FormatError.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Mapping

import numpy as np

from ..errors import AlignmentError, FormatError, NonFiniteData
from .types import FeatureMatrix, LayerFeatureMap, LayerFeatureMapSet, LogitMatrix

MAGIC = b"HTGF"
VERSION = 1


def write_htgf(path, ids, array, probability_flag: bool | None = None) -> None:
    """Serialize an id-aligned float tensor; dims come from the array shape."""
    arr = np.ascontiguousarray(np.asarray(array), dtype="<f4")
    if arr.ndim < 1 or arr.shape[0] != len(ids):
        raise AlignmentError(f"{len(ids)} ids vs leading dim {arr.shape}")
    if not np.isfinite(arr).all():
        raise NonFiniteData("refusing to write NaN/Inf payload")
    id_blob = "\n".join(ids).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, arr.ndim))
        fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
        fh.write(struct.pack("<I", len(id_blob)))
        fh.write(id_blob)
        fh.write(arr.tobytes())
        if probability_flag is not None:
            fh.write(struct.pack("<B", 1 if probability_flag else 0))


def _read_htgf(path, with_flag: bool) -> tuple[list[str], np.ndarray, int]:
    blob = Path(path).read_bytes()
    if blob[:4] != MAGIC:
        raise FormatError(f"{path}: bad magic {blob[:4]!r}")
    if len(blob) < 12:
        raise FormatError(f"{path}: truncated header")
    version, rank = struct.unpack_from("<II", blob, 4)
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if rank < 1:
        raise FormatError(f"{path}: rank must be >= 1")
    offset = 12
    if len(blob) < offset + 4 * rank + 4:
        raise FormatError(f"{path}: truncated dims")
    dims = struct.unpack_from(f"<{rank}I", blob, offset)
    offset += 4 * rank
    (id_len,) = struct.unpack_from("<I", blob, offset)
    offset += 4
    if len(blob) < offset + id_len:
        raise FormatError(f"{path}: truncated id table")
    ids = blob[offset : offset + id_len].decode("utf-8").split("\n")
    offset += id_len
    if len(ids) != dims[0]:
        raise AlignmentError(f"{path}: {len(ids)} ids but leading dim is {dims[0]}")
    count = int(np.prod(dims, dtype=np.int64))
    payload_len = 4 * count
    expected = offset + payload_len + (1 if with_flag else 0)
    if len(blob) < expected:
        raise FormatError(f"{path}: truncated payload")
    if len(blob) > expected:
        raise FormatError(f"{path}: {len(blob) - expected} trailing bytes")
    data = np.frombuffer(blob, dtype="<f4", count=count, offset=offset).reshape(dims)
    if not np.isfinite(data).all():
        raise NonFiniteData(f"{path}: payload contains NaN or Inf")
    flag = blob[-1] if with_flag else 0
    return ids, data, flag


def load_feature_matrix(path) -> FeatureMatrix:
    ids, data, _ = _read_htgf(path, with_flag=False)
    if data.ndim != 2:
        raise FormatError(f"{path}: feature matrix must be rank 2, got rank {data.ndim}")
    return FeatureMatrix(ids=ids, data=data)


def load_logits(path) -> LogitMatrix:
    ids, data, flag = _read_htgf(path, with_flag=True)
    if data.ndim != 2:
        raise FormatError(f"{path}: logit matrix must be rank 2, got rank {data.ndim}")
    if flag not in (0, 1):
        raise FormatError(f"{path}: probability flag must be 0 or 1, got {flag}")
    return LogitMatrix(ids=ids, logits=data, is_probability=bool(flag))


def load_tensor(path) -> tuple[list[str], np.ndarray]:
    """Raw rank-r load, no trailing flag (used for layer map files)."""
    ids, data, _ = _read_htgf(path, with_flag=False)
    return ids, data


def load_layer_maps(
    paths: Mapping[str, object], weights: Mapping[str, float] | None = None
) -> LayerFeatureMapSet:
    """Assemble per-layer rank-4 HTGF files into one aligned map set."""
    if not paths:
        raise FormatError("no layer files given")
    layers = []
    ref_ids: list[str] | None = None
    for name, path in paths.items():
        ids, data = load_tensor(path)
        if data.ndim != 4:
            raise FormatError(f"{path}: layer maps must be rank 4, got rank {data.ndim}")
        if ref_ids is None:
            ref_ids = ids
        elif ids != ref_ids:
            raise AlignmentError(f"{path}: id table differs from first layer")
        weight = 1.0 if weights is None else float(weights.get(name, 1.0))
        layers.append(LayerFeatureMap(layer_name=name, maps=data, weight=weight))
    assert ref_ids is not None
    return LayerFeatureMapSet(ids=ref_ids, layers=layers)


def write_feature_matrix(path, fm: FeatureMatrix) -> None:
    write_htgf(path, fm.ids, fm.data)


def write_logits(path, lm: LogitMatrix) -> None:
    write_htgf(path, lm.ids, lm.logits, probability_flag=lm.is_probability)
