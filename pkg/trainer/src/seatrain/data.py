"""Engine file formats: binary datasets, sample indices, embedding exports.

The trainer talks to the search engine exclusively through its on-disk
formats: float32-LE payloads with key=value sidecars, uint64-LE sample
index files, and summary files whose sidecar carries source_m/scaled.
Exports are written atomically (temp file + rename) so a concurrent
reader never sees a partial file.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".meta")


def _read_meta(path: Path) -> dict:
    meta = {}
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        meta[key.strip()] = value.strip()
    return meta


def load_dataset(path) -> tuple[np.ndarray, dict]:
    """Read an (n, m) float32 dataset; returns (data, meta)."""
    path = Path(path)
    if path.suffix != ".bin":
        path = path.with_suffix(".bin") if path.suffix == "" else path
    meta = _read_meta(_sidecar(path))
    n, m = int(meta["n"]), int(meta["m"])
    expected = n * m * 4
    actual = path.stat().st_size
    if actual != expected:
        raise ValueError(f"{path}: payload {actual} bytes, sidecar implies {expected}")
    data = np.fromfile(path, dtype="<f4").reshape(n, m)
    return data, meta


def load_sample(path) -> np.ndarray:
    """Read a uint64-LE sample index file."""
    path = Path(path)
    if path.suffix == "":
        path = path.with_suffix(".idx")
    meta = _read_meta(_sidecar(path))
    indices = np.fromfile(path, dtype="<u8").astype(np.int64)
    if indices.size != int(meta["n_prime"]):
        raise ValueError(f"{path}: {indices.size} indices, sidecar says {meta['n_prime']}")
    return indices


def _atomic_write(payload: bytes, path: Path) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(payload)
    os.replace(tmp, path)


def _write_meta_atomic(fields: dict, path: Path) -> None:
    text = "".join(f"{k}={v}\n" for k, v in fields.items() if v is not None)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def save_embeddings(values: np.ndarray, path, source_m: int, kind: str) -> None:
    """Write SoS-scaled embeddings in the engine's summary format."""
    path = Path(path)
    values = np.ascontiguousarray(values, dtype="<f4")
    _atomic_write(values.tobytes(), path)
    _write_meta_atomic(
        {"n": values.shape[0], "m": values.shape[1], "source_m": source_m,
         "scaled": 1, "kind": kind},
        _sidecar(path),
    )


def save_reconstructions(values: np.ndarray, path) -> None:
    """Write reconstructed series in the engine's dataset format."""
    path = Path(path)
    values = np.ascontiguousarray(values, dtype="<f4")
    _atomic_write(values.tobytes(), path)
    _write_meta_atomic(
        {"n": values.shape[0], "m": values.shape[1], "znormalized": 1},
        _sidecar(path),
    )
