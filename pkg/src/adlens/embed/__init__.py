"""Joint graph-embedding model: encoders, trainer, serialization."""

from adlens.embed.encoders import (
    ENCODER_KINDS,
    MEAN_POOL,
    RECURRENT,
    BiLstmEncoder,
    MeanPoolEncoder,
    create_encoder,
)
from adlens.embed.model import EmbeddingModel, TrainConfig
from adlens.embed.trainer import Adam, draw_negatives, epoch_loss, init_model, pair_loss, train
from adlens.embed.wordvec import WordVectors, synthetic_vectors

__all__ = [
    "ENCODER_KINDS",
    "MEAN_POOL",
    "RECURRENT",
    "BiLstmEncoder",
    "MeanPoolEncoder",
    "create_encoder",
    "EmbeddingModel",
    "TrainConfig",
    "Adam",
    "draw_negatives",
    "epoch_loss",
    "init_model",
    "pair_loss",
    "train",
    "WordVectors",
    "synthetic_vectors",
]
