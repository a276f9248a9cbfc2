"""Sortable bit-interleaved SAX keys and dataset sampling strategies.

An interleaved key places all most-significant bits across a SAX word
before all second bits, and so on, so that lexicographic order on keys
reflects symbol significance.  Equal-interval sampling over that sorted
order spreads a sample across the whole key space in one pass plus a sort;
the uniform-random sampler is the baseline.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import meta_path_for, read_meta, read_payload, write_meta, _meta_int
from .summarization import MAX_BITS, BadBits, paa_rows, sax_from_paa


class BadSampleSize(ValueError):
    """Sample size outside 1..n."""


INDEX_DTYPE = np.dtype("<u8")


def invsax_keys(symbols, bits: int) -> np.ndarray:
    """Interleaved sort keys for (n, l) SAX words, packed into bytes.

    Bit i (0 = most significant) of symbol j lands at key position
    i*l + j; the (n, ceil(l*bits/8)) uint8 rows compare lexicographically
    exactly as the underlying bit strings do (tail padding is zero).
    """
    symbols = np.asarray(symbols, dtype=np.uint8)
    if symbols.ndim != 2:
        raise BadBits(f"expected (n, l) symbols, got shape {symbols.shape}")
    if not 1 <= bits <= MAX_BITS:
        raise BadBits(f"bits must be in 1..{MAX_BITS}, got {bits}")
    n, l = symbols.shape
    bitmat = np.empty((n, l * bits), dtype=np.uint8)
    for i in range(bits):
        bitmat[:, i * l : (i + 1) * l] = (symbols >> (bits - 1 - i)) & 1
    return np.packbits(bitmat, axis=1)


def invsax(symbols, bits: int) -> bytes:
    """Interleaved key of a single SAX word as a comparable byte string."""
    word = np.asarray(symbols, dtype=np.uint8)
    return invsax_keys(word[None, :], bits)[0].tobytes()


def sax_from_invsax(key, l: int, bits: int) -> np.ndarray:
    """De-interleave a key back into its SAX word (exact round trip)."""
    raw = np.frombuffer(bytes(key), dtype=np.uint8)
    bitmat = np.unpackbits(raw)[: l * bits]
    symbols = np.zeros(l, dtype=np.uint8)
    for i in range(bits):
        symbols = (symbols << 1) | bitmat[i * l : (i + 1) * l]
    return symbols


def invsax_order(symbols, bits: int) -> np.ndarray:
    """Stable sort order of SAX words by interleaved key (ties keep index order)."""
    keys = invsax_keys(symbols, bits)
    # np.lexsort's primary key is the LAST of the sequence
    return np.lexsort(tuple(keys[:, c] for c in range(keys.shape[1] - 1, -1, -1)))


def sax_words_for(dataset, l: int, bits: int) -> np.ndarray:
    """PAA then SAX of every series of a dataset (or raw (n, m) array)."""
    data = dataset.data if hasattr(dataset, "data") else np.asarray(dataset)
    return sax_from_paa(paa_rows(data, l), bits)


def seasam(dataset, n_prime: int, l: int = 16, bits: int = 8) -> np.ndarray:
    """Equal-interval sample over the interleaved-key sorted order.

    SAX-transforms every series, sorts identifiers by interleaved key
    (stable, ties by index), then takes every floor(n/n')-th rank starting
    at rank 0, truncated to n' picks.  Deterministic for a fixed dataset.
    Returns the chosen identifiers sorted ascending.
    """
    data = dataset.data if hasattr(dataset, "data") else np.asarray(dataset)
    n = data.shape[0]
    if not 1 <= n_prime <= n:
        raise BadSampleSize(f"need 1 <= n' <= {n}, got {n_prime}")
    order = invsax_order(sax_words_for(data, l, bits), bits)
    stride = n // n_prime
    chosen = order[::stride][:n_prime]
    return np.sort(chosen).astype(np.int64)


def uniform_sample(dataset, n_prime: int, seed: int) -> np.ndarray:
    """Seeded uniform sample without replacement, sorted ascending."""
    data = dataset.data if hasattr(dataset, "data") else np.asarray(dataset)
    n = data.shape[0]
    if not 1 <= n_prime <= n:
        raise BadSampleSize(f"need 1 <= n' <= {n}, got {n_prime}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    chosen = rng.choice(n, size=n_prime, replace=False)
    return np.sort(chosen).astype(np.int64)


@dataclass
class SampleSet:
    """A sorted, duplicate-free set of series identifiers plus provenance."""

    indices: np.ndarray
    strategy: str
    seed: int | None = None

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.ndim != 1 or idx.size < 1:
            raise BadSampleSize(f"indices must be a non-empty vector, got shape {idx.shape}")
        if np.any(np.diff(idx) <= 0):
            raise BadSampleSize("indices must be strictly increasing")
        if idx[0] < 0:
            raise BadSampleSize("indices must be non-negative")
        self.indices = idx

    @property
    def n_prime(self) -> int:
        return int(self.indices.size)


def save_sample(sample: SampleSet, payload_path, meta_path=None) -> None:
    """Write indices as raw little-endian uint64 plus a provenance sidecar."""
    payload_path = Path(payload_path)
    meta_path = meta_path_for(payload_path) if meta_path is None else Path(meta_path)
    sample.indices.astype(INDEX_DTYPE).tofile(payload_path)
    write_meta(
        meta_path,
        {"n_prime": sample.n_prime, "strategy": sample.strategy, "seed": sample.seed},
    )


def load_sample(payload_path, meta_path=None) -> SampleSet:
    payload_path = Path(payload_path)
    meta_path = meta_path_for(payload_path) if meta_path is None else Path(meta_path)
    meta = read_meta(meta_path)
    n_prime = _meta_int(meta, "n_prime", meta_path)
    seed = _meta_int(meta, "seed", meta_path) if "seed" in meta else None
    indices = read_payload(payload_path, n_prime, 1, INDEX_DTYPE)[:, 0]
    return SampleSet(indices.astype(np.int64), meta.get("strategy", "unknown"), seed)
