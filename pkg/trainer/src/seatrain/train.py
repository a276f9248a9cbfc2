"""Training loops: fixed-sample training and the composite-sampler variant.

Both run mini-batched SGD with a linearly decaying learning rate and a
per-epoch random partner for every training series (partners are encoded
without gradients).  The composite variant periodically refreshes the
training set from a candidate pool so reconstruction-error values are
represented uniformly, and reweights within-batch pairs so the selected
pair distances match a pre-estimated global distance histogram.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import torch

from .losses import combined_loss, compression_loss, pair_distances, reconstruction_loss
from .models import Autoencoder, SeanetConfig


class Divergence(RuntimeError):
    """Loss became non-finite; reports the offending epoch."""


@dataclass
class TrainHistory:
    val_lc: list = field(default_factory=list)      # index 0 = before training
    train_loss: list = field(default_factory=list)
    train_lc: list = field(default_factory=list)
    train_lr: list = field(default_factory=list)
    lr: list = field(default_factory=list)

    def lines(self):
        yield f"epoch=0 val_lc={self.val_lc[0]:.6f}"
        for e in range(len(self.train_loss)):
            yield (f"epoch={e + 1} loss={self.train_loss[e]:.6f} "
                   f"lc={self.train_lc[e]:.6f} lr_term={self.train_lr[e]:.6f} "
                   f"val_lc={self.val_lc[e + 1]:.6f} step={self.lr[e]:.6f}")


def _lr_at(cfg: SeanetConfig, epoch: int) -> float:
    # linear decay from cfg.lr to cfg.lr_final across the run
    if cfg.epochs <= 1:
        return cfg.lr
    frac = epoch / (cfg.epochs - 1)
    return cfg.lr + (cfg.lr_final - cfg.lr) * frac


def _partner_indices(rng: np.random.Generator, n: int) -> np.ndarray:
    offsets = rng.integers(1, n, size=n)
    return (np.arange(n) + offsets) % n


def validation_lc(model: Autoencoder, val: torch.Tensor, seed: int = 0,
                  batch: int = 512) -> float:
    """Pair-distance error on a fixed pairing of the validation split."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    partners = _partner_indices(rng, val.shape[0])
    model.eval()
    total, count = 0.0, 0
    with torch.no_grad():
        for start in range(0, val.shape[0], batch):
            sl = slice(start, min(start + batch, val.shape[0]))
            a = val[sl]
            b = val[partners[sl]]
            lc = compression_loss(a, b, model.encoder(a), model.encoder(b),
                                  scaled=model.cfg.sos_scaling)
            total += float(lc) * a.shape[0]
            count += a.shape[0]
    model.train()
    return total / count


def encode_all(model: Autoencoder, data: torch.Tensor, batch: int = 512):
    """DEAs and reconstructions for a whole dataset (eval mode, no grads)."""
    model.eval()
    deas, recons = [], []
    with torch.no_grad():
        for start in range(0, data.shape[0], batch):
            dea, recon = model(data[start : start + batch])
            deas.append(dea)
            recons.append(recon)
    model.train()
    return torch.cat(deas), torch.cat(recons)


def reconstruction_errors(model: Autoencoder, data: torch.Tensor,
                          batch: int = 512) -> np.ndarray:
    """Per-series scaled reconstruction distance (the sampler's signal)."""
    _, recons = encode_all(model, data, batch)
    d = pair_distances(data, recons) / math.sqrt(data.shape[-1])
    return d.cpu().numpy()


def _epoch(model, optimizer, train, rng, cfg, pair_picker=None) -> tuple[float, float, float]:
    n = train.shape[0]
    order = rng.permutation(n)
    partners = _partner_indices(rng, n)
    sums = np.zeros(3)
    batches = 0
    for start in range(0, n, cfg.batch_series):
        idx = order[start : start + cfg.batch_series]
        if idx.size < 2:
            continue
        batch = train[idx]
        with torch.no_grad():
            partner_emb = model.encoder(train[partners[idx]])
        optimizer.zero_grad()
        emb, recon = model(batch)
        if pair_picker is None:
            loss, lc, lr_term = combined_loss(batch, train[partners[idx]], emb,
                                              partner_emb, recon, cfg.alpha,
                                              scaled=cfg.sos_scaling)
        else:
            pair_a, pair_b = pair_picker(batch, rng)
            with torch.no_grad():
                emb_b = model.encoder(batch[pair_b])
            lc = compression_loss(batch[pair_a], batch[pair_b], emb[pair_a],
                                  emb_b, scaled=cfg.sos_scaling)
            lr_term = reconstruction_loss(batch, recon, scaled=cfg.sos_scaling)
            loss = lc + cfg.alpha * lr_term
        if not torch.isfinite(loss):
            raise Divergence("non-finite loss")
        loss.backward()
        optimizer.step()
        sums += (loss.item(), lc.item(), lr_term.item())
        batches += 1
    return tuple(sums / max(batches, 1))


def train(model: Autoencoder, train_data, val_data, cfg: SeanetConfig,
          seed: int = 0, checkpoint_path=None, log=None) -> TrainHistory:
    """Mini-batched SGD over a fixed training set.

    Tracks the validation pair error before training (epoch 0) and after
    every epoch; raises Divergence with the offending epoch if the loss
    leaves the finite range.  Saves a checkpoint at the end when a path
    is given.
    """
    torch.manual_seed(seed)
    train_t = torch.as_tensor(np.ascontiguousarray(train_data), dtype=torch.float32)
    val_t = torch.as_tensor(np.ascontiguousarray(val_data), dtype=torch.float32)
    rng = np.random.Generator(np.random.Philox(key=seed))
    optimizer = torch.optim.SGD(model.parameters(), lr=cfg.lr)
    history = TrainHistory()
    history.val_lc.append(validation_lc(model, val_t, seed=seed))
    model.train()
    for epoch in range(cfg.epochs):
        step = _lr_at(cfg, epoch)
        for group in optimizer.param_groups:
            group["lr"] = step
        try:
            loss, lc, lr_term = _epoch(model, optimizer, train_t, rng, cfg)
        except Divergence as exc:
            raise Divergence(f"epoch {epoch + 1}: {exc}") from exc
        history.train_loss.append(loss)
        history.train_lc.append(lc)
        history.train_lr.append(lr_term)
        history.lr.append(step)
        history.val_lc.append(validation_lc(model, val_t, seed=seed))
        if log is not None:
            log(f"epoch={epoch + 1} loss={loss:.6f} val_lc={history.val_lc[-1]:.6f} "
                f"step={step:.6f}")
    if checkpoint_path is not None:
        save_checkpoint(model, cfg, checkpoint_path)
    return history


# --- composite sampling ----------------------------------------------------

def estimate_distance_histogram(data: torch.Tensor, n_pairs: int, bins: int,
                                seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Global pair-distance histogram (density form) from random pairs."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    n = data.shape[0]
    i = rng.integers(0, n, size=n_pairs)
    j = (i + rng.integers(1, n, size=n_pairs)) % n
    with torch.no_grad():
        d = pair_distances(data[i], data[j]).cpu().numpy()
    counts, edges = np.histogram(d, bins=bins)
    return counts / max(d.size, 1), edges


def inverse_frequency_weights(values: np.ndarray, bins: int,
                              clip: float) -> np.ndarray:
    """Weights that flatten the value histogram: w ∝ 1/frequency(value).

    Weights are normalized to mean 1 and clipped so no item outweighs the
    uniform draw by more than `clip`, bounding the gradient variance.
    """
    counts, edges = np.histogram(values, bins=bins)
    which = np.clip(np.searchsorted(edges, values, side="right") - 1, 0, bins - 1)
    weights = 1.0 / counts[which]
    weights = weights / weights.mean()
    return np.minimum(weights, clip)


def draw_uniform_over_errors(errors: np.ndarray, size: int,
                             rng: np.random.Generator, bins: int = 64,
                             clip: float = 100.0, replace: bool = False) -> np.ndarray:
    """Indices drawn so the selected error values are uniformly represented.

    Equally-sized picks per occupied error bin rather than per item: rare
    error levels are drawn far above their frequency.  Drawing everything
    (size == pool, no replacement) returns the whole pool.
    """
    n = errors.size
    if not replace and size >= n:
        return np.arange(n)
    weights = inverse_frequency_weights(errors, bins, clip)
    p = weights / weights.sum()
    return rng.choice(n, size=size, replace=replace, p=p)


def match_distance_histogram(distances: np.ndarray, target_density: np.ndarray,
                             edges: np.ndarray, size: int,
                             rng: np.random.Generator,
                             clip: float = 100.0) -> np.ndarray:
    """Pick pairs whose distance distribution matches the target histogram.

    Importance reweighting: target density over the proposal (within-batch)
    density, both over the target's bin grid; out-of-range distances fall
    into the edge bins.
    """
    bins = target_density.size
    which = np.clip(np.searchsorted(edges, distances, side="right") - 1, 0, bins - 1)
    proposal_counts = np.bincount(which, minlength=bins)
    proposal = proposal_counts / max(distances.size, 1)
    ratio = np.zeros(bins)
    occupied = proposal > 0
    ratio[occupied] = target_density[occupied] / proposal[occupied]
    weights = ratio[which]
    if weights.sum() <= 0:
        weights = np.ones_like(weights)
    weights = weights / weights.mean()
    weights = np.minimum(weights, clip)
    p = weights / weights.sum()
    return rng.choice(distances.size, size=size, replace=True, p=p)


def seasame_train(model: Autoencoder, data, candidate_indices, cfg: SeanetConfig,
                  n_prime: int, val_data, seed: int = 0,
                  checkpoint_path=None, log=None) -> TrainHistory:
    """Training with periodic error-uniform resampling and matched pairs.

    candidate_indices is the (deterministic) equal-interval sample of size
    n'_c >= n'; every resample draws n' series from it with inverse
    reconstruction-error-frequency weights.  Within each mini-batch, all
    pair distances are computed and batch_pairs pairs are drawn to match
    the pre-estimated global distance histogram.
    """
    candidates = np.asarray(candidate_indices, dtype=np.int64)
    if n_prime > candidates.size:
        raise ValueError(f"n'={n_prime} exceeds the candidate pool {candidates.size}")
    torch.manual_seed(seed)
    data_t = torch.as_tensor(np.ascontiguousarray(data), dtype=torch.float32)
    val_t = torch.as_tensor(np.ascontiguousarray(val_data), dtype=torch.float32)
    rng = np.random.Generator(np.random.Philox(key=seed))
    target_density, edges = estimate_distance_histogram(
        data_t, n_pairs=4096, bins=cfg.hist_bins, seed=seed)

    def pick_pairs(batch: torch.Tensor, rng_: np.random.Generator):
        nb = batch.shape[0]
        with torch.no_grad():
            diff = batch.unsqueeze(1) - batch.unsqueeze(0)
            dmat = diff.pow(2).sum(-1).sqrt().cpu().numpy()
        a, b = np.triu_indices(nb, k=1)
        chosen = match_distance_histogram(dmat[a, b], target_density, edges,
                                          min(cfg.batch_pairs, a.size), rng_,
                                          clip=cfg.weight_clip)
        return a[chosen], b[chosen]

    optimizer = torch.optim.SGD(model.parameters(), lr=cfg.lr)
    history = TrainHistory()
    history.val_lc.append(validation_lc(model, val_t, seed=seed))
    model.train()
    train_t = None
    for epoch in range(cfg.epochs):
        if epoch % cfg.resample_every == 0:
            errors = reconstruction_errors(model, data_t[candidates])
            picked = draw_uniform_over_errors(errors, n_prime, rng,
                                              bins=cfg.hist_bins,
                                              clip=cfg.weight_clip)
            train_t = data_t[candidates[picked]]
            if log is not None:
                log(f"epoch={epoch + 1} resample n_prime={n_prime} "
                    f"err_min={errors.min():.4f} err_max={errors.max():.4f}")
        step = _lr_at(cfg, epoch)
        for group in optimizer.param_groups:
            group["lr"] = step
        try:
            loss, lc, lr_term = _epoch(model, optimizer, train_t, rng, cfg,
                                       pair_picker=pick_pairs)
        except Divergence as exc:
            raise Divergence(f"epoch {epoch + 1}: {exc}") from exc
        history.train_loss.append(loss)
        history.train_lc.append(lc)
        history.train_lr.append(lr_term)
        history.lr.append(step)
        history.val_lc.append(validation_lc(model, val_t, seed=seed))
        if log is not None:
            log(f"epoch={epoch + 1} loss={loss:.6f} val_lc={history.val_lc[-1]:.6f} "
                f"step={step:.6f}")
    if checkpoint_path is not None:
        save_checkpoint(model, cfg, checkpoint_path)
    return history


def save_checkpoint(model: Autoencoder, cfg: SeanetConfig, path) -> None:
    from dataclasses import asdict

    torch.save({"state_dict": model.state_dict(), "config": asdict(cfg)}, path)


def load_checkpoint(path, builder) -> Autoencoder:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    cfg = SeanetConfig(**payload["config"])
    model = builder(cfg)
    model.load_state_dict(payload["state_dict"])
    return model
