"""Quality measures for summarizations and samplers.

Implements the average distance-difference, reconstruction RMS, and
nearest-neighbor coverage measures, the analytic and Monte Carlo moments
of the pairwise-distance (chi) distribution for ideal Gaussian series,
and the distinct-leaf coverage experiment comparing samplers against an
index built over the full dataset.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .core import euclidean_to_rows
from .sampling import seasam, uniform_sample


class BadK(ValueError):
    """Neighborhood size outside 1..base size."""


class ShapeMismatch(ValueError):
    """Original/reconstruction or pair blocks with incompatible shapes."""


@dataclass
class MetricReport:
    metric: str
    value: float
    n_samples: int
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_samples <= 0:
            raise ValueError("n_samples must be positive")

    def line(self) -> str:
        extra = "".join(f" {k}={v}" for k, v in self.config.items())
        return f"metric={self.metric} value={self.value:.6g} n={self.n_samples}{extra}"


def reports_to_csv(reports, path) -> None:
    keys = sorted({k for r in reports for k in r.config})
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "value", "n"] + keys)
        for r in reports:
            writer.writerow([r.metric, repr(r.value), r.n_samples]
                            + [r.config.get(k, "") for k in keys])


def random_partners(indices, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Pair every index with another uniformly drawn index from the same set."""
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size < 2:
        raise ValueError("need at least 2 indices to form pairs")
    rng = np.random.Generator(np.random.Philox(key=seed))
    offsets = rng.integers(1, idx.size, size=idx.size)
    partners = idx[(np.arange(idx.size) + offsets) % idx.size]
    return idx, partners


def avg_distance_diff(series_a, series_b, summ_a, summ_b,
                      summary_scale: float = 1.0) -> float:
    """Mean |d'(E_i, E_j) - d(S_i, S_j)| over aligned pair blocks.

    summary_scale is the sqrt(m/l) factor for PAA and unscaled embeddings;
    SoS-scaled embeddings carry the factor in their values (pass 1.0).
    """
    series_a = np.asarray(series_a, dtype=np.float64)
    series_b = np.asarray(series_b, dtype=np.float64)
    summ_a = np.asarray(summ_a, dtype=np.float64)
    summ_b = np.asarray(summ_b, dtype=np.float64)
    if series_a.shape != series_b.shape or summ_a.shape != summ_b.shape \
            or series_a.shape[0] != summ_a.shape[0]:
        raise ShapeMismatch("pair blocks must align row-wise")
    d = np.sqrt(((series_a - series_b) ** 2).sum(axis=1))
    dp = summary_scale * np.sqrt(((summ_a - summ_b) ** 2).sum(axis=1))
    return float(np.abs(dp - d).mean())


def reconstruction_rms(original, reconstructed) -> float:
    """Mean over series of sqrt((1/m) * sum((p_i - p'_i)^2))."""
    orig = np.asarray(original, dtype=np.float64)
    recon = np.asarray(reconstructed, dtype=np.float64)
    if orig.shape != recon.shape:
        raise ShapeMismatch(f"shape {orig.shape} vs {recon.shape}")
    return float(np.sqrt(((orig - recon) ** 2).mean(axis=1)).mean())


def nn_coverage(base_series, query_series, k: int, base_summaries,
                query_summaries) -> float:
    """Fraction of true k-nearest neighbors kept in the summarization space.

    |kNN_d(S) ∩ kNN_d'(E)| / k averaged over queries; ties broken by
    ascending id in both spaces.
    """
    base = np.asarray(base_series, dtype=np.float64)
    queries = np.atleast_2d(np.asarray(query_series, dtype=np.float64))
    base_summ = np.asarray(base_summaries, dtype=np.float64)
    query_summ = np.atleast_2d(np.asarray(query_summaries, dtype=np.float64))
    n = base.shape[0]
    if not 1 <= k <= n:
        raise BadK(f"need 1 <= k <= {n}, got {k}")
    total = 0.0
    for q, qs in zip(queries, query_summ):
        true_knn = np.argsort(euclidean_to_rows(base, q), kind="stable")[:k]
        summ_knn = np.argsort(euclidean_to_rows(base_summ, qs), kind="stable")[:k]
        total += np.intersect1d(true_knn, summ_knn).size / k
    return total / queries.shape[0]


# --- pairwise-distance (chi) moments --------------------------------------

@dataclass
class ChiStats:
    m: int
    scale: float
    mean: float
    variance: float

    def __post_init__(self):
        if self.variance <= 0:
            raise ValueError("variance must be positive")


def _gamma_ratio(m: int) -> float:
    # Gamma((m+1)/2) / Gamma(m/2) via log-gamma; overflows if taken directly
    return float(np.exp(gammaln((m + 1) / 2) - gammaln(m / 2)))


def chi_stats_analytic(m: int, scale: float = 1.0) -> ChiStats:
    """Moments of the distance between two i.i.d. N(0,1) series of length m.

    The unscaled distance is chi_m with per-coordinate sigma sqrt(2):
    mean = 2 * Gamma((m+1)/2)/Gamma(m/2), variance = 4*(m/2 - ratio^2);
    scaling the series by c scales the mean by c and the variance by c^2.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    r = _gamma_ratio(m)
    return ChiStats(m=m, scale=scale, mean=scale * 2.0 * r,
                    variance=scale * scale * 4.0 * (m / 2.0 - r * r))


def chi_raw_moment(m: int, k: int, scale: float = 1.0) -> float:
    """E[X^k] for the scaled pair distance (X = scale * sqrt(2) * chi_m)."""
    log_mom = (k / 2.0) * np.log(2.0) + gammaln((m + k) / 2) - gammaln(m / 2)
    return float((scale * np.sqrt(2.0)) ** k * np.exp(log_mom))


def chi_stats_stderr(m: int, scale: float, n_pairs: int) -> tuple[float, float]:
    """Analytic standard errors of the Monte Carlo mean and variance."""
    mu = chi_raw_moment(m, 1, scale)
    m2 = chi_raw_moment(m, 2, scale)
    m3 = chi_raw_moment(m, 3, scale)
    m4 = chi_raw_moment(m, 4, scale)
    var = m2 - mu * mu
    mu4 = m4 - 4 * m3 * mu + 6 * m2 * mu * mu - 3 * mu ** 4
    se_mean = np.sqrt(var / n_pairs)
    se_var = np.sqrt(max(mu4 - var * var, 0.0) / n_pairs)
    return float(se_mean), float(se_var)


def chi_stats_montecarlo(m: int, scale: float = 1.0, n_pairs: int = 100_000,
                         seed: int = 0) -> ChiStats:
    """Empirical distance moments between i.i.d. N(0,1) series pairs."""
    if n_pairs < 1000:
        raise ValueError(f"need at least 1000 pairs, got {n_pairs}")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n_pairs, m))
    a -= rng.standard_normal((n_pairs, m))
    dists = scale * np.sqrt(np.einsum("ij,ij->i", a, a))
    return ChiStats(m=m, scale=scale, mean=float(dists.mean()),
                    variance=float(dists.var(ddof=1)))


# --- sampler leaf coverage -------------------------------------------------

def leaf_coverage(tree, indices) -> int:
    """Distinct leaves of a full-dataset tree hit by a sample."""
    assignments = tree.leaf_assignments()
    return int(np.unique(assignments[np.asarray(indices, dtype=np.int64)]).size)


def leaf_coverage_experiment(tree, dataset, sample_sizes, seeds,
                             l: int = 16, bits: int = 8) -> list[MetricReport]:
    """Distinct-leaf coverage of equal-interval vs uniform samples.

    The equal-interval sampler is deterministic, so the seeds drive the
    uniform baseline only.  One report per (strategy, n', seed).
    """
    assignments = tree.leaf_assignments()
    reports = []
    for n_prime in sample_sizes:
        idx = seasam(dataset, n_prime, l=l, bits=bits)
        cov = int(np.unique(assignments[idx]).size)
        reports.append(MetricReport("leaf_coverage", cov, n_prime,
                                    {"strategy": "seasam", "n_prime": n_prime}))
        for seed in seeds:
            idx = uniform_sample(dataset, n_prime, seed)
            cov = int(np.unique(assignments[idx]).size)
            reports.append(MetricReport("leaf_coverage", cov, n_prime,
                                        {"strategy": "uniform", "n_prime": n_prime,
                                         "seed": seed}))
    return reports
