"""seatrain: autoencoder trainer for SoS-preserving series embeddings."""

from .data import load_dataset, load_sample, save_embeddings, save_reconstructions
from .export import export_dea
from .losses import (
    ShapeMismatch,
    combined_loss,
    compression_loss,
    pair_distances,
    reconstruction_loss,
)
from .models import (
    Autoencoder,
    BadConfig,
    DilatedResBlock,
    SeanetConfig,
    SeanetEncoder,
    SeatransEncoder,
    SosNorm,
    TransBlock,
    build_seanet,
    build_seatrans,
    parameter_count,
)
from .train import (
    Divergence,
    TrainHistory,
    draw_uniform_over_errors,
    encode_all,
    estimate_distance_histogram,
    inverse_frequency_weights,
    load_checkpoint,
    match_distance_histogram,
    reconstruction_errors,
    save_checkpoint,
    seasame_train,
    train,
    validation_lc,
)

__version__ = "0.1.0"
