"""Autoencoder architectures for sum-of-squares-preserving series embeddings.

The convolutional encoder stacks dilated full-preactivation residual
blocks (dilation of block i is 2^i) over an m-channel latent, max-pools
across channels, and reduces dimensionality with two linear layers.  Its
final layer is a parameter-free normalization that z-normalizes each
embedding and scales it by sqrt(m/l), so every embedding carries the sum
of squares of its z-normalized source series by construction.  The
transformer variant replaces the pooling with per-position tokens, a
learnable embedding token, and stacked self-attention blocks.  The decoder
mirrors the encoder behind a Tanh-activated linear adapter and ends with a
plain z-normalization (reconstructions live in z-normalized space).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
from torch import nn


class BadConfig(ValueError):
    """Architecture hyperparameters out of range."""


RESBLOCKS_BY_LENGTH = {96: 5, 128: 6, 256: 7}


@dataclass
class SeanetConfig:
    m: int
    l: int = 16
    k: int | None = None            # ResBlock count; defaults by length
    kernel_size: int = 3
    k2: int = 0                     # TransBlock count (transformer encoder)
    heads: int = 8
    ff_multiple: int = 4
    alpha: float = 1.0              # loss balance between pair and reconstruction
    lr: float = 1e-2
    lr_final: float = 1e-5
    batch_series: int = 256
    batch_pairs: int = 256
    epochs: int = 30
    sos_scaling: bool = True        # ablation flag: disable the SoS framework
    resample_every: int = 10        # composite-sampler refresh cadence (epochs)
    hist_bins: int = 64
    weight_clip: float = 100.0

    def __post_init__(self):
        if self.k is None:
            self.k = RESBLOCKS_BY_LENGTH.get(self.m, max(1, round(math.log2(self.m)) - 2))
        if self.m < 4 or self.l < 2 or self.l > self.m:
            raise BadConfig(f"need 4 <= l <= m, got m={self.m}, l={self.l}")
        if self.k < 1 or self.k2 < 0:
            raise BadConfig(f"need k >= 1 and k2 >= 0, got k={self.k}, k2={self.k2}")
        if self.alpha < 0:
            raise BadConfig(f"alpha must be >= 0, got {self.alpha}")
        if self.k2 and self.m % self.heads:
            raise BadConfig(f"token width {self.m} must divide into {self.heads} heads")

    @property
    def dilations(self) -> list[int]:
        return [2 ** i for i in range(self.k)]


class SosNorm(nn.Module):
    """Parameter-free per-sample z-normalization times a fixed scale."""

    def __init__(self, scale: float = 1.0):
        super().__init__()
        self.scale = scale

    def forward(self, x):
        mean = x.mean(dim=-1, keepdim=True)
        std = x.std(dim=-1, unbiased=False, keepdim=True).clamp_min(1e-8)
        return (x - mean) / std * self.scale

    def extra_repr(self) -> str:
        return f"scale={self.scale:.4f}"


class DilatedResBlock(nn.Module):
    """Full-preactivation residual block: (norm -> relu -> conv) twice."""

    def __init__(self, channels: int, kernel_size: int, dilation: int):
        super().__init__()
        self.dilation = dilation
        pad = dilation * (kernel_size - 1) // 2
        self.norm1 = nn.BatchNorm1d(channels)
        self.conv1 = nn.Conv1d(channels, channels, kernel_size,
                               padding=pad, dilation=dilation)
        self.norm2 = nn.BatchNorm1d(channels)
        self.conv2 = nn.Conv1d(channels, channels, kernel_size,
                               padding=pad, dilation=dilation)

    def forward(self, x):
        h = self.conv1(torch.relu(self.norm1(x)))
        h = self.conv2(torch.relu(self.norm2(h)))
        return x + h


def _conv_stem(cfg: SeanetConfig) -> nn.Sequential:
    pad = (cfg.kernel_size - 1) // 2
    layers = [nn.Conv1d(1, cfg.m, cfg.kernel_size, padding=pad)]
    layers += [DilatedResBlock(cfg.m, cfg.kernel_size, d) for d in cfg.dilations]
    return nn.Sequential(*layers)


class SeanetEncoder(nn.Module):
    def __init__(self, cfg: SeanetConfig):
        super().__init__()
        self.cfg = cfg
        self.stem = _conv_stem(cfg)
        self.linear1 = nn.Linear(cfg.m, cfg.m)
        self.linear2 = nn.Linear(cfg.m, cfg.l)
        self.norm = SosNorm(math.sqrt(cfg.m / cfg.l)) if cfg.sos_scaling else nn.Identity()

    def forward(self, x):
        h = self.stem(x.unsqueeze(1))
        v = h.max(dim=1).values            # pool across channels, one value per position
        v = self.linear2(torch.relu(self.linear1(v)))
        return self.norm(v)


class TransBlock(nn.Module):
    """Multi-headed self-attention plus a feedforward layer (post-norm)."""

    def __init__(self, width: int, heads: int, ff_multiple: int):
        super().__init__()
        self.attn = nn.MultiheadAttention(width, heads, batch_first=True)
        self.norm1 = nn.LayerNorm(width)
        self.ff = nn.Sequential(nn.Linear(width, ff_multiple * width), nn.ReLU(),
                                nn.Linear(ff_multiple * width, width))
        self.norm2 = nn.LayerNorm(width)

    def forward(self, tokens):
        attended, _ = self.attn(tokens, tokens, tokens, need_weights=False)
        tokens = self.norm1(tokens + attended)
        return self.norm2(tokens + self.ff(tokens))


class SeatransEncoder(nn.Module):
    """Convolutional stem, per-position tokens + embedding token, attention."""

    def __init__(self, cfg: SeanetConfig):
        super().__init__()
        if cfg.k2 < 1:
            raise BadConfig("transformer encoder needs k2 >= 1")
        self.cfg = cfg
        self.stem = _conv_stem(cfg)
        self.emb_token = nn.Parameter(torch.randn(cfg.m) * 0.02)
        self.positions = nn.Parameter(torch.randn(cfg.m + 1, cfg.m) * 0.02)
        self.blocks = nn.Sequential(*[TransBlock(cfg.m, cfg.heads, cfg.ff_multiple)
                                      for _ in range(cfg.k2)])
        self.linear1 = nn.Linear(cfg.m, cfg.m)
        self.linear2 = nn.Linear(cfg.m, cfg.l)
        self.norm = SosNorm(math.sqrt(cfg.m / cfg.l)) if cfg.sos_scaling else nn.Identity()

    def forward(self, x):
        h = self.stem(x.unsqueeze(1))          # (B, channels, m)
        tokens = h.transpose(1, 2)             # one token per position
        emb = self.emb_token.expand(tokens.shape[0], 1, -1)
        tokens = torch.cat([emb, tokens], dim=1) + self.positions
        tokens = self.blocks(tokens)
        v = self.linear2(torch.relu(self.linear1(tokens[:, 0])))
        return self.norm(v)


class SeanetDecoder(nn.Module):
    def __init__(self, cfg: SeanetConfig):
        super().__init__()
        self.cfg = cfg
        self.adapter = nn.Linear(cfg.l, cfg.m)  # Tanh-activated dimensionality adapter
        self.linear = nn.Linear(cfg.m, cfg.m)
        pad = (cfg.kernel_size - 1) // 2
        self.stem = _conv_stem(cfg)
        self.conv_out = nn.Conv1d(cfg.m, 1, cfg.kernel_size, padding=pad)
        self.norm = SosNorm(1.0) if cfg.sos_scaling else nn.Identity()

    def forward(self, e):
        v = self.linear(torch.tanh(self.adapter(e)))
        h = self.stem(v.unsqueeze(1))
        r = self.conv_out(h).squeeze(1)
        return self.norm(r)


class Autoencoder(nn.Module):
    def __init__(self, encoder: nn.Module, decoder: nn.Module, cfg: SeanetConfig):
        super().__init__()
        self.encoder = encoder
        self.decoder = decoder
        self.cfg = cfg

    def forward(self, x):
        dea = self.encoder(x)
        return dea, self.decoder(dea)


def build_seanet(cfg: SeanetConfig) -> Autoencoder:
    """Convolutional encoder + mirrored decoder."""
    return Autoencoder(SeanetEncoder(cfg), SeanetDecoder(cfg), cfg)


def build_seatrans(cfg: SeanetConfig) -> Autoencoder:
    """Transformer encoder (k2 attention blocks) + the regular decoder.

    k2 = 0 degenerates to the plain convolutional encoder.
    """
    if cfg.k2 == 0:
        return build_seanet(cfg)
    return Autoencoder(SeatransEncoder(cfg), SeanetDecoder(cfg), cfg)


def parameter_count(module: nn.Module) -> int:
    return sum(p.numel() for p in module.parameters())
