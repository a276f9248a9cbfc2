"""Lower-dimensional series representations and their distances.

Covers PAA segment means, SAX symbolization against standard-Gaussian
equal-probability breakpoints, iSAX cardinality reduction, the classic
region MINDIST lower bound, a truncated-DFT baseline embedding, and the
sum-of-squares-preserving scaling that turns any raw embedding into an
engine-ready summary (per-series SoS equal to the source length).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy.special import ndtri

from .core import (
    SizeMismatch,
    meta_path_for,
    read_meta,
    read_payload,
    write_meta,
    _meta_int,
)

MAX_BITS = 8
EMBED_STD_FLOOR = 1e-12


class BadSegmentCount(ValueError):
    """Requested segment count is outside 1..m."""


class ShapeMismatch(ValueError):
    """Summaries with incompatible shapes or source lengths were combined."""


class BadBits(ValueError):
    """Bits per symbol outside 1..8, or a reduction above the source bits."""


class DegenerateEmbedding(ValueError):
    """Embedding is (numerically) constant; scaling it is meaningless."""


class BadBudget(ValueError):
    """DFT coefficient budget must be even and within the series length."""


_BREAKPOINTS: dict[int, np.ndarray] = {}
_REGION_TABLES: list = []


def breakpoints(bits: int) -> np.ndarray:
    """The 2^bits - 1 ascending N(0,1) equal-probability thresholds."""
    if not 1 <= bits <= MAX_BITS:
        raise BadBits(f"bits must be in 1..{MAX_BITS}, got {bits}")
    cached = _BREAKPOINTS.get(bits)
    if cached is None:
        card = 1 << bits
        cached = ndtri(np.arange(1, card) / card)
        cached.setflags(write=False)
        _BREAKPOINTS[bits] = cached
    return cached


def _region_tables() -> tuple[np.ndarray, np.ndarray]:
    """(lower, upper) edge tables indexed by [level, symbol], level 0..8.

    Level 0 is the single all-of-R region (an unsplit word contributes
    nothing to MINDIST).  Slots with symbol >= 2^level are NaN so that an
    out-of-range lookup poisons the result instead of passing silently.
    """
    if not _REGION_TABLES:
        card = 1 << MAX_BITS
        lower = np.full((MAX_BITS + 1, card), np.nan)
        upper = np.full((MAX_BITS + 1, card), np.nan)
        lower[0, 0], upper[0, 0] = -np.inf, np.inf
        for level in range(1, MAX_BITS + 1):
            bp = breakpoints(level)
            lower[level, : 1 << level] = np.concatenate(([-np.inf], bp))
            upper[level, : 1 << level] = np.concatenate((bp, [np.inf]))
        lower.setflags(write=False)
        upper.setflags(write=False)
        _REGION_TABLES.extend((lower, upper))
    return _REGION_TABLES[0], _REGION_TABLES[1]


def segment_bounds(m: int, l: int) -> np.ndarray:
    """Start offsets of the l PAA segments (long segments first when l∤m)."""
    if not 1 <= l <= m:
        raise BadSegmentCount(f"need 1 <= l <= m, got l={l}, m={m}")
    sizes = np.full(l, m // l, dtype=np.int64)
    sizes[: m % l] += 1
    starts = np.zeros(l, dtype=np.int64)
    np.cumsum(sizes[:-1], out=starts[1:])
    return starts


def paa(series, l: int) -> np.ndarray:
    """Piecewise aggregate approximation: per-segment means (float64)."""
    x = np.asarray(series, dtype=np.float64)
    return paa_rows(x[None, :], l)[0]


def paa_rows(data, l: int) -> np.ndarray:
    """PAA of every row of an (n, m) array."""
    x = np.asarray(data, dtype=np.float64)
    n, m = x.shape
    if not 1 <= l <= m:
        raise BadSegmentCount(f"need 1 <= l <= m, got l={l}, m={m}")
    if m % l == 0:
        return x.reshape(n, l, m // l).mean(axis=2)
    starts = segment_bounds(m, l)
    sums = np.add.reduceat(x, starts, axis=1)
    sizes = np.diff(np.append(starts, m))
    return sums / sizes


def paa_distance(a, b, source_length: int) -> float:
    """sqrt(m/l)-scaled Euclidean distance between two PAA vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeMismatch(f"shape {a.shape} vs {b.shape}")
    scale = np.sqrt(source_length / a.shape[-1])
    return float(scale * np.sqrt(np.sum((a - b) ** 2)))


def sax_from_paa(paa_values, bits: int) -> np.ndarray:
    """Quantize PAA (or any unit-scale summary) values into SAX symbols.

    A value exactly on a breakpoint maps to the higher symbol; larger
    values never map to smaller symbols.  Works elementwise on any shape.
    """
    bp = breakpoints(bits)
    return np.searchsorted(bp, np.asarray(paa_values), side="right").astype(np.uint8)


def reduce_cardinality(symbols, bits: int, per_symbol_bits) -> np.ndarray:
    """Keep each symbol's most-significant per_symbol_bits[j] bits."""
    symbols = np.asarray(symbols, dtype=np.uint8)
    target = np.asarray(per_symbol_bits, dtype=np.int64)
    target = np.broadcast_to(target, symbols.shape)
    if not 1 <= bits <= MAX_BITS:
        raise BadBits(f"bits must be in 1..{MAX_BITS}, got {bits}")
    if np.any(target < 0) or np.any(target > bits):
        raise BadBits(f"per-symbol bits must be in 0..{bits}")
    return (symbols >> (bits - target)).astype(np.uint8)


def mindist(query_paa, symbols, per_symbol_bits, bits: int, source_length: int) -> float:
    """Lower bound on the distance from a query to any series in a SAX region.

    Per segment: distance from the query PAA value to the nearest edge of
    the symbol's breakpoint interval (zero inside), combined as
    sqrt(m/l) * sqrt(sum of squares).
    """
    q = np.asarray(query_paa, dtype=np.float64)
    symbols = np.asarray(symbols, dtype=np.int64)
    if q.shape != symbols.shape:
        raise ShapeMismatch(f"query {q.shape} vs word {symbols.shape}")
    return float(mindist_batch(q, symbols[None, :], per_symbol_bits, bits, source_length)[0])


def mindist_batch(query_paa, symbols, per_symbol_bits, bits: int,
                  source_length: int) -> np.ndarray:
    """mindist against many SAX regions at once: (c, l) symbols/levels."""
    q = np.asarray(query_paa, dtype=np.float64)
    symbols = np.asarray(symbols, dtype=np.int64)
    levels = np.broadcast_to(np.asarray(per_symbol_bits, dtype=np.int64), symbols.shape)
    if np.any(levels < 0) or np.any(levels > bits) or bits > MAX_BITS:
        raise BadBits(f"per-symbol bits must be in 0..{bits} with bits <= {MAX_BITS}")
    lower, upper = _region_tables()
    lo = lower[levels, symbols]
    hi = upper[levels, symbols]
    gap = np.maximum(0.0, np.maximum(lo - q, q - hi))
    scale = np.sqrt(source_length / q.shape[-1])
    return scale * np.sqrt(np.einsum("ij,ij->i", gap, gap))


def dea_scale(embedding, source_length: int) -> np.ndarray:
    """Z-normalize a raw embedding and scale it by sqrt(m/l).

    The output's per-series sum of squares equals the source length m, so
    summing over a dataset of n embeddings gives n*m, matching the SoS of
    the z-normalized source series.  Accepts a single l-vector or an
    (n, l) block.  Raises DegenerateEmbedding for constant rows (the bad
    local optimum where all summaries collapse to one point).
    """
    e = np.asarray(embedding, dtype=np.float64)
    single = e.ndim == 1
    rows = e[None, :] if single else e
    if rows.ndim != 2:
        raise ShapeMismatch(f"expected l-vector or (n, l) block, got shape {e.shape}")
    l = rows.shape[1]
    std = rows.std(axis=1)
    if np.any(std < EMBED_STD_FLOOR):
        bad = int(np.flatnonzero(std < EMBED_STD_FLOOR)[0])
        raise DegenerateEmbedding(f"constant embedding (row {bad}, stddev {std[bad]:.3e})")
    scaled = (rows - rows.mean(axis=1, keepdims=True)) / std[:, None]
    scaled *= np.sqrt(source_length / l)
    return scaled[0] if single else scaled


def unit_scale(values, scaled: bool, source_length: int) -> np.ndarray:
    """Summary values at unit (PAA-like) scale, ready for SAX quantization.

    SoS-scaled embeddings carry a sqrt(m/l) factor that would saturate the
    Gaussian breakpoints; dividing it out restores per-series unit stddev.
    """
    values = np.asarray(values, dtype=np.float64)
    if not scaled:
        return values
    return values / np.sqrt(source_length / values.shape[-1])


def dft_summarize(series, l: int) -> np.ndarray:
    """First l/2 post-DC DFT coefficients flattened as (re, im) pairs."""
    x = np.asarray(series, dtype=np.float64)
    return dft_summarize_rows(x[None, :], l)[0]


def dft_summarize_rows(data, l: int) -> np.ndarray:
    x = np.asarray(data, dtype=np.float64)
    n, m = x.shape
    if l < 2 or l % 2 != 0 or l > m:
        raise BadBudget(f"coefficient budget must be even and in 2..m, got l={l}, m={m}")
    spectrum = np.fft.rfft(x, axis=1)[:, 1 : l // 2 + 1]
    out = np.empty((n, l), dtype=np.float64)
    out[:, 0::2] = spectrum.real
    out[:, 1::2] = spectrum.imag
    return out


def dft_reconstruct(coeffs, m: int) -> np.ndarray:
    """Invert dft_summarize: zero DC, given coefficients, zeros above."""
    c = np.asarray(coeffs, dtype=np.float64)
    single = c.ndim == 1
    rows = c[None, :] if single else c
    l = rows.shape[1]
    spectrum = np.zeros((rows.shape[0], m // 2 + 1), dtype=np.complex128)
    spectrum[:, 1 : l // 2 + 1] = rows[:, 0::2] + 1j * rows[:, 1::2]
    out = np.fft.irfft(spectrum, n=m, axis=1)
    return out[0] if single else out


# --- summary / SAX file formats ------------------------------------------

SUMMARY_DTYPE = np.dtype("<f4")


def save_summaries(values, payload_path, source_length: int, scaled: bool,
                   kind: str | None = None, meta_path=None) -> None:
    """Write an (n, l) summary block in the dataset binary format.

    Sidecar carries n, m=l plus source_m and scaled; ``kind`` is a purely
    informational extra key.
    """
    values = np.ascontiguousarray(values, dtype=SUMMARY_DTYPE)
    payload_path = Path(payload_path)
    meta_path = meta_path_for(payload_path) if meta_path is None else Path(meta_path)
    values.tofile(payload_path)
    write_meta(
        meta_path,
        {
            "n": values.shape[0],
            "m": values.shape[1],
            "source_m": source_length,
            "scaled": int(scaled),
            "kind": kind,
        },
    )


def load_summaries(payload_path, meta_path=None) -> tuple[np.ndarray, dict]:
    """Read a summary block; returns (values, meta) with parsed meta ints."""
    payload_path = Path(payload_path)
    meta_path = meta_path_for(payload_path) if meta_path is None else Path(meta_path)
    meta = read_meta(meta_path)
    n = _meta_int(meta, "n", meta_path)
    l = _meta_int(meta, "m", meta_path)
    info = {
        "n": n,
        "l": l,
        "source_m": _meta_int(meta, "source_m", meta_path),
        "scaled": bool(_meta_int(meta, "scaled", meta_path)),
        "kind": meta.get("kind"),
    }
    values = read_payload(payload_path, n, l, SUMMARY_DTYPE)
    return values, info


def save_sax(symbols, bits: int, payload_path, meta_path=None) -> None:
    """Write an (n, l) SAX word block: raw uint8 symbols, row-major."""
    symbols = np.ascontiguousarray(symbols, dtype=np.uint8)
    payload_path = Path(payload_path)
    meta_path = meta_path_for(payload_path) if meta_path is None else Path(meta_path)
    symbols.tofile(payload_path)
    write_meta(meta_path, {"n": symbols.shape[0], "l": symbols.shape[1], "bits": bits})


def load_sax(payload_path, meta_path=None) -> tuple[np.ndarray, int]:
    payload_path = Path(payload_path)
    meta_path = meta_path_for(payload_path) if meta_path is None else Path(meta_path)
    meta = read_meta(meta_path)
    n = _meta_int(meta, "n", meta_path)
    l = _meta_int(meta, "l", meta_path)
    bits = _meta_int(meta, "bits", meta_path)
    symbols = read_payload(payload_path, n, l, np.uint8)
    if symbols.size and int(symbols.max()) >= 1 << bits:
        raise SizeMismatch(f"{payload_path}: symbol exceeds cardinality 2^{bits}")
    return symbols, bits
