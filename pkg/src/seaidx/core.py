"""Core series handling: z-normalization, Euclidean distance, binary dataset I/O.

A data series is a fixed-length 1-D float array; a dataset is an (n, m)
row-major array of such series.  On disk a dataset is a flat float32
little-endian payload (``<name>.bin``) next to a human-readable key=value
sidecar (``<name>.meta``).  Distances and statistics accumulate in float64
regardless of the storage dtype.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

STD_FLOOR = 1e-12  # below the float32 noise floor; treated as constant

PAYLOAD_DTYPE = np.dtype("<f4")


class ConstantSeries(ValueError):
    """Series has (numerically) zero variance and cannot be z-normalized."""


class LengthMismatch(ValueError):
    """Two series of different lengths were combined."""


class SizeMismatch(ValueError):
    """Payload file size disagrees with the sidecar's n*m*itemsize."""


class MalformedMeta(ValueError):
    """Sidecar file is missing required keys or has unparsable values."""


def znormalize(series) -> np.ndarray:
    """Shift/scale a series to mean 0 and population stddev 1 (float64).

    Raises ConstantSeries when the population stddev is below 1e-12; the
    caller decides whether to drop or replace such a series.
    """
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise LengthMismatch(f"expected a 1-D series of length >= 2, got shape {x.shape}")
    std = float(x.std())
    if std < STD_FLOOR:
        raise ConstantSeries(f"population stddev {std:.3e} < {STD_FLOOR:.0e}")
    return (x - x.mean()) / std


def znormalize_rows(data) -> np.ndarray:
    """Row-wise znormalize for an (n, m) array; returns float64."""
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2:
        raise LengthMismatch(f"expected an (n, m) array, got shape {x.shape}")
    std = x.std(axis=1)
    bad = np.flatnonzero(std < STD_FLOOR)
    if bad.size:
        raise ConstantSeries(f"{bad.size} constant series (first at row {bad[0]})")
    return (x - x.mean(axis=1, keepdims=True)) / std[:, None]


def euclidean(a, b) -> float:
    """Euclidean distance with float64 accumulation."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise LengthMismatch(f"shape {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def euclidean_to_rows(data, query) -> np.ndarray:
    """Distances from one query to every row of an (n, m) array (float64)."""
    q = np.asarray(query, dtype=np.float64)
    d = np.asarray(data)
    if d.ndim != 2 or d.shape[1] != q.shape[0]:
        raise LengthMismatch(f"rows of shape {d.shape} vs query {q.shape}")
    diff = d - q  # broadcasts and upcasts to float64
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


@dataclass
class Dataset:
    """An immutable collection of n equal-length series.

    ``data`` is coerced to a read-only float32 C-contiguous (n, m) array;
    concurrent readers are safe.
    """

    data: np.ndarray
    znormalized: bool = False
    seed: int | None = None

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float32)
        if arr.ndim != 2:
            raise LengthMismatch(f"dataset must be (n, m), got shape {arr.shape}")
        if arr.shape[1] < 2:
            raise LengthMismatch(f"need m >= 2, got {arr.shape}")
        arr.setflags(write=False)
        self.data = arr

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def m(self) -> int:
        return self.data.shape[1]

    def znormalize(self) -> "Dataset":
        return Dataset(znormalize_rows(self.data), znormalized=True, seed=self.seed)


def meta_path_for(payload_path) -> Path:
    return Path(payload_path).with_suffix(".meta")


def write_meta(path, fields: dict) -> None:
    lines = "".join(f"{k}={v}\n" for k, v in fields.items() if v is not None)
    Path(path).write_text(lines)


def read_meta(path) -> dict:
    meta = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MalformedMeta(f"cannot read sidecar {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise MalformedMeta(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        meta[key.strip()] = value.strip()
    return meta


def _meta_int(meta: dict, key: str, path) -> int:
    if key not in meta:
        raise MalformedMeta(f"{path}: missing required key {key!r}")
    try:
        return int(meta[key])
    except ValueError as exc:
        raise MalformedMeta(f"{path}: key {key!r} is not an integer: {meta[key]!r}") from exc


def read_payload(payload_path, n: int, row_width: int, dtype) -> np.ndarray:
    """Load a flat little-endian payload and check its size against n rows."""
    dtype = np.dtype(dtype)
    path = Path(payload_path)
    expected = n * row_width * dtype.itemsize
    actual = path.stat().st_size
    if actual != expected:
        raise SizeMismatch(f"{path}: payload is {actual} bytes, sidecar implies {expected}")
    data = np.fromfile(path, dtype=dtype).reshape(n, row_width)
    return data


def save_dataset(dataset: Dataset, payload_path, meta_path=None) -> None:
    payload_path = Path(payload_path)
    meta_path = meta_path_for(payload_path) if meta_path is None else Path(meta_path)
    dataset.data.astype(PAYLOAD_DTYPE, copy=False).tofile(payload_path)
    write_meta(
        meta_path,
        {
            "n": dataset.n,
            "m": dataset.m,
            "znormalized": int(dataset.znormalized),
            "seed": dataset.seed,
        },
    )


def load_dataset(payload_path, meta_path=None) -> Dataset:
    payload_path = Path(payload_path)
    meta_path = meta_path_for(payload_path) if meta_path is None else Path(meta_path)
    meta = read_meta(meta_path)
    n = _meta_int(meta, "n", meta_path)
    m = _meta_int(meta, "m", meta_path)
    znormalized = bool(_meta_int(meta, "znormalized", meta_path))
    seed = _meta_int(meta, "seed", meta_path) if "seed" in meta else None
    data = read_payload(payload_path, n, m, PAYLOAD_DTYPE)
    return Dataset(data, znormalized=znormalized, seed=seed)
