"""Hyperbolic emotion analysis in products of Poincare discs."""

__version__ = "0.1.0"

from .attention import AttentionParams, attention_weights, message_representation, pool_messages
from .barycenter import SolverOptions, batch_barycenters, conformal_barycenter
from .contrastive import TrainConfig, contrastive_loss, sample_pairs, train_attention
from .corpus import (
    EmotionCatalog,
    PreprocessConfig,
    Preprocessor,
    build_cooccurrence,
    build_similarity,
    load_instances,
    split_holdout,
)
from .disc import (
    MoebiusTransform,
    busemann_energy,
    disc_distance,
    multidisc_distance,
    poisson_score,
)
from .errors import (
    DataError,
    DimensionError,
    DomainError,
    EmbolicError,
    NonConvergenceError,
    NonFiniteError,
    UndefinedDirectionError,
)
from .glove import GloveConfig, WordEmbeddingTable, fit_disc, fit_embeddings
from .inference import (
    TrainedModel,
    accuracy,
    assemble_model,
    confidence_report,
    emotion_cooccurrence,
    evaluate,
    score_message,
)
from .sampling import MoebiusDistribution, make_rng, sample

__all__ = [
    "AttentionParams",
    "DataError",
    "DimensionError",
    "DomainError",
    "EmbolicError",
    "EmotionCatalog",
    "GloveConfig",
    "MoebiusDistribution",
    "MoebiusTransform",
    "NonConvergenceError",
    "NonFiniteError",
    "PreprocessConfig",
    "Preprocessor",
    "SolverOptions",
    "TrainConfig",
    "TrainedModel",
    "UndefinedDirectionError",
    "WordEmbeddingTable",
    "accuracy",
    "assemble_model",
    "attention_weights",
    "batch_barycenters",
    "build_cooccurrence",
    "build_similarity",
    "busemann_energy",
    "confidence_report",
    "conformal_barycenter",
    "contrastive_loss",
    "disc_distance",
    "emotion_cooccurrence",
    "evaluate",
    "fit_disc",
    "fit_embeddings",
    "load_instances",
    "make_rng",
    "message_representation",
    "multidisc_distance",
    "poisson_score",
    "pool_messages",
    "sample",
    "sample_pairs",
    "score_message",
    "split_holdout",
    "train_attention",
]
