"""Training objective: pair-distance preservation plus reconstruction.

The pair term compares each series pair's distance (scaled by 1/sqrt(m))
against the distance of their z-normalized embeddings (scaled by
1/sqrt(l)); the reconstruction term is the 1/sqrt(m)-scaled distance
between a series and its reconstruction.  These scalings keep both
distance distributions at the same stable level regardless of length.
Partner embeddings must be detached by the caller so pair gradients flow
through one encoder path only.
"""

from __future__ import annotations

import math

import torch


class ShapeMismatch(ValueError):
    """Loss inputs with inconsistent row counts or widths."""


def pair_distances(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    if a.shape != b.shape:
        raise ShapeMismatch(f"shape {tuple(a.shape)} vs {tuple(b.shape)}")
    return ((a - b) ** 2).sum(dim=-1).sqrt()


def compression_loss(series_a, series_b, emb_a, emb_b, scaled: bool = True):
    """Mean |d(S_i, S_j)/sqrt(m) - d(E_i, E_j)/sqrt(l)| over pairs.

    Embeddings may carry the sqrt(m/l) SoS factor; it is divided out so
    the term always sees z-normalized (unit stddev) embeddings.  With
    scaled=False the raw unscaled distances are compared (ablation).
    """
    if series_a.shape[0] != emb_a.shape[0]:
        raise ShapeMismatch(f"{series_a.shape[0]} series vs {emb_a.shape[0]} embeddings")
    m = series_a.shape[-1]
    l = emb_a.shape[-1]
    d_series = pair_distances(series_a, series_b)
    d_emb = pair_distances(emb_a, emb_b)
    if not scaled:
        return (d_series - d_emb).abs().mean()
    unscale = math.sqrt(m / l)  # embeddings arrive SoS-scaled
    return (d_series / math.sqrt(m) - d_emb / unscale / math.sqrt(l)).abs().mean()


def reconstruction_loss(series, reconstructions, scaled: bool = True):
    """Mean d(S_i, reconstruction_i), scaled by 1/sqrt(m) unless ablated."""
    d = pair_distances(series, reconstructions)
    if not scaled:
        return d.mean()
    return d.mean() / math.sqrt(series.shape[-1])


def combined_loss(series, partners, emb, partner_emb, reconstructions,
                  alpha: float, scaled: bool = True):
    """Pair term + alpha * reconstruction term; partner_emb must be detached."""
    lc = compression_loss(series, partners, emb, partner_emb, scaled=scaled)
    lr = reconstruction_loss(series, reconstructions, scaled=scaled)
    return lc + alpha * lr, lc, lr
