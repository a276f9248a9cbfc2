"""Export trained embeddings and reconstructions in the engine's formats."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch

from .data import save_embeddings, save_reconstructions
from .models import Autoencoder
from .train import encode_all


def export_dea(model: Autoencoder, data, out_dir, stem: str = "dea",
               kind: str = "seanet") -> tuple[Path, Path]:
    """Embed a whole dataset and write <stem>.bin/.meta plus reconstructions.

    Validates the structural guarantee before writing: each embedding has
    per-series sum of squares equal to the source length within 1e-3.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    data_t = torch.as_tensor(np.ascontiguousarray(data), dtype=torch.float32)
    deas, recons = encode_all(model, data_t)
    deas = deas.cpu().numpy().astype(np.float64)
    m = data_t.shape[1]
    if model.cfg.sos_scaling:
        sos = (deas ** 2).sum(axis=1)
        worst = float(np.abs(sos - m).max()) / m
        if worst > 1e-3:
            raise ValueError(f"embedding SoS drifted from {m} by {worst:.2e} relative")
    dea_path = out_dir / f"{stem}.bin"
    save_embeddings(deas, dea_path, source_m=m, kind=kind)
    recon_path = out_dir / f"{stem}_recon.bin"
    save_reconstructions(recons.cpu().numpy(), recon_path)
    return dea_path, recon_path
