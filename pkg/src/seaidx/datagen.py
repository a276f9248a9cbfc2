"""Seeded synthetic dataset generators.

Random walks (cumulative sums of N(0,1) steps) and amplified-spectrum
series (inverse DFT of a random conjugate-symmetric spectrum whose first K
components are amplified), both z-normalized per series.  Every series is
generated from its own Philox stream keyed by (seed, domain) with the
series index in the counter's high word, so generation is order-independent
and reproducible; queries use a disjoint domain so they never collide with
base series drawn from the same seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, znormalize_rows

DOMAIN_BASE = 0
DOMAIN_QUERY = 1

KINDS = ("randwalk", "f5", "f10", "fseries")


@dataclass
class GenSpec:
    kind: str
    n: int
    m: int
    seed: int = 0
    amplified: int = 0      # fseries: number of leading components amplified
    amp: float = 10.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "f5":
            self.amplified = 5
        elif self.kind == "f10":
            self.amplified = 10
        if self.n < 0 or self.m < 2:
            raise ValueError(f"need n >= 0 and m >= 2, got n={self.n}, m={self.m}")
        if self.kind != "randwalk" and not 0 <= self.amplified < self.m / 2:
            raise ValueError(f"need K < m/2, got K={self.amplified}, m={self.m}")


def series_stream(seed: int, domain: int, index: int) -> np.random.Generator:
    """Counter-based per-series stream: Philox key=(seed, domain), counter high word=index."""
    bitgen = np.random.Philox(key=np.array([seed, domain], dtype=np.uint64),
                              counter=np.array([0, 0, 0, index], dtype=np.uint64))
    return np.random.Generator(bitgen)


def _randwalk_row(rng: np.random.Generator, m: int) -> np.ndarray:
    return np.cumsum(rng.standard_normal(m))


def _fseries_row(rng: np.random.Generator, m: int, amplified: int, amp: float) -> np.ndarray:
    nfreq = m // 2 + 1
    re = rng.standard_normal(nfreq)
    im = rng.standard_normal(nfreq)
    spectrum = re + 1j * im
    spectrum[0] = 0.0  # DC vanishes after z-normalization anyway
    if m % 2 == 0:
        spectrum[-1] = spectrum[-1].real
    if amplified:
        spectrum[1 : amplified + 1] *= amp
    return np.fft.irfft(spectrum, n=m)


def generate(spec: GenSpec, domain: int = DOMAIN_BASE) -> Dataset:
    raw = np.empty((spec.n, spec.m), dtype=np.float64)
    for i in range(spec.n):
        rng = series_stream(spec.seed, domain, i)
        if spec.kind == "randwalk":
            raw[i] = _randwalk_row(rng, spec.m)
        else:
            raw[i] = _fseries_row(rng, spec.m, spec.amplified, spec.amp)
    if spec.n == 0:
        return Dataset(raw, znormalized=True, seed=spec.seed)
    return Dataset(znormalize_rows(raw), znormalized=True, seed=spec.seed)


def gen_randwalk(n: int, m: int, seed: int) -> Dataset:
    """n random-walk series of length m, z-normalized."""
    return generate(GenSpec("randwalk", n, m, seed))


def gen_fseries(n: int, m: int, amplified: int, amp: float, seed: int) -> Dataset:
    """n amplified-spectrum series (first `amplified` components x amp)."""
    return generate(GenSpec("fseries", n, m, seed, amplified=amplified, amp=amp))


def gen_queries(spec: GenSpec, n_q: int, seed: int | None = None) -> Dataset:
    """Query set from the same distribution, drawn from a disjoint stream."""
    qspec = GenSpec(spec.kind, n_q, spec.m, spec.seed if seed is None else seed,
                    amplified=spec.amplified, amp=spec.amp)
    return generate(qspec, domain=DOMAIN_QUERY)
