"""Model assembly, scoring and evaluation.

After training, each disc's pooled training points are moved so that their
unweighted barycenter (the epicenter) sits at the origin. Every emotion gets a
boundary direction per disc, the argument of the squared-modulus-weighted
resultant of its corrected points. A message scores against each emotion with
the Poisson kernel, averaged over discs; probabilities are a softmax of
``score / T``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .attention import AttentionParams, pool_messages
from .barycenter import conformal_barycenter
from .corpus import EmotionCatalog, build_similarity, normalize_rows
from .disc import MoebiusTransform, check_disc, moebius_apply, poisson_score, wrap_angle
from .errors import DataError, DimensionError, DomainError, UndefinedDirectionError
from .glove import GloveConfig, WordEmbeddingTable, fit_disc

log = logging.getLogger(__name__)

DEFAULT_TEMPERATURE = 0.05
DEFAULT_THRESHOLD = 0.20
RESULTANT_FLOOR = 1e-12


def compute_epicenter(points):
    """Unweighted conformal barycenter of one disc's pooled training points."""
    return conformal_barycenter(np.asarray(points, dtype=np.complex128).ravel())


def correction_for(epicenter):
    """The ``theta = 0`` isometry sending ``epicenter`` to the origin."""
    return MoebiusTransform(complex(epicenter), 0.0)


def fit_class_directions(points, labels, n_emotions):
    """Boundary angle per emotion: ``arg sum r^2 exp(i phi)`` over the class.

    Args:
        points: corrected disc points (n,).
        labels: emotion index per point.
        n_emotions: number of emotions E.

    Returns:
        float array (E,) of angles in [0, 2 pi).

    Raises:
        UndefinedDirectionError: if an emotion has no points or its resultant
            has modulus below 1e-12.
    """
    z = np.atleast_1d(check_disc(points, "points"))
    labels = np.asarray(labels)
    if labels.shape != z.shape:
        raise DataError("points and labels differ in length")
    # r^2 exp(i phi) = |z| z
    contrib = np.abs(z) * z
    out = np.empty(n_emotions)
    for e in range(n_emotions):
        sel = labels == e
        if not np.any(sel):
            raise UndefinedDirectionError(f"emotion {e} has no training points")
        res = np.sum(contrib[sel])
        if abs(res) < RESULTANT_FLOOR:
            raise UndefinedDirectionError(
                f"emotion {e}: resultant modulus {abs(res):.3g} is below {RESULTANT_FLOOR}"
            )
        out[e] = wrap_angle(np.angle(res))
    return out


def softmax_scores(scores, temperature=DEFAULT_TEMPERATURE):
    """Row-wise ``softmax(scores / temperature)``."""
    if not temperature > 0:
        raise DomainError("temperature must be positive")
    x = np.asarray(scores, dtype=np.float64) / temperature
    x = x - np.max(x, axis=-1, keepdims=True)
    e = np.exp(x)
    return e / np.sum(e, axis=-1, keepdims=True)


@dataclass
class ScoreVector:
    scores: np.ndarray
    probs: np.ndarray


@dataclass
class TrainedModel:
    table: WordEmbeddingTable
    attention: AttentionParams
    corrections: list
    directions: np.ndarray  # (k, E)
    catalog: EmotionCatalog
    temperature: float = DEFAULT_TEMPERATURE
    config_echo: dict = field(default_factory=dict)

    def __post_init__(self):
        self.directions = np.atleast_2d(np.asarray(self.directions, dtype=np.float64))
        k = self.table.k
        if self.attention.k != k or len(self.corrections) != k or self.directions.shape[0] != k:
            raise DimensionError("model components disagree on the number of discs")
        if self.directions.shape[1] != len(self.catalog):
            raise DimensionError("directions and emotion catalog differ in size")
        if not self.temperature > 0:
            raise DomainError("temperature must be positive")

    @property
    def k(self):
        return self.table.k

    def pool(self, token_lists):
        """Pooled points (M, k) and empty-message flags."""
        return pool_messages(self.attention, [self.table.points(t) for t in token_lists], self.k)

    def correct(self, pooled):
        """Apply each disc's correction to pooled points (M, k)."""
        pooled = np.asarray(pooled, dtype=np.complex128)
        out = np.empty_like(pooled)
        for d, g in enumerate(self.corrections):
            out[..., d] = moebius_apply(g, pooled[..., d])
        return out

    def represent(self, token_lists):
        """Corrected points (M, k) and empty flags; empty messages stay at the origin."""
        pooled, empty = self.pool(token_lists)
        corrected = self.correct(pooled)
        corrected[empty] = 0.0
        return corrected, empty

    def scores(self, corrected, discs=None):
        """Disc-averaged Poisson scores (M, E) of corrected points (M, k)."""
        corrected = np.atleast_2d(corrected)
        discs = range(self.k) if discs is None else list(discs)
        if not discs:
            raise DataError("at least one disc is required")
        total = 0.0
        for d in discs:
            total = total + poisson_score(corrected[:, d, None], self.directions[d][None, :])
        return total / len(discs)

    def score_tokens(self, token_lists, discs=None):
        corrected, empty = self.represent(token_lists)
        scores = self.scores(corrected, discs)
        return scores, softmax_scores(scores, self.temperature), empty


def score_message(model, words):
    """ScoreVector of one message given its word points (n, k); empty gives uniform."""
    words = np.asarray(words, dtype=np.complex128).reshape(-1, model.k)
    pooled, empty = pool_messages(model.attention, [words], model.k)
    corrected = model.correct(pooled)
    corrected[empty] = 0.0
    scores = model.scores(corrected)[0]
    return ScoreVector(scores, softmax_scores(scores, model.temperature))


def assemble_model(table, attention, token_lists, labels, catalog, temperature=DEFAULT_TEMPERATURE,
                   config_echo=None):  # fmt: skip
    """Fit corrections and class directions from the training messages.

    Messages without in-vocabulary tokens are ignored.
    """
    pooled, empty = pool_messages(attention, [table.points(t) for t in token_lists], table.k)
    labels = np.asarray(labels)[~empty]
    pooled = pooled[~empty]
    if pooled.shape[0] == 0:
        raise DataError("no training message has an in-vocabulary token")
    corrections, directions = [], []
    for d in range(table.k):
        g = correction_for(compute_epicenter(pooled[:, d]))
        corrections.append(g)
        try:
            directions.append(fit_class_directions(moebius_apply(g, pooled[:, d]), labels, len(catalog)))
        except UndefinedDirectionError as exc:
            raise UndefinedDirectionError(f"disc {d}: {exc}") from exc
    return TrainedModel(table, attention, corrections, np.array(directions), catalog,
                        temperature, dict(config_echo or {}))  # fmt: skip


# --------------------------------------------------------------------------
# evaluation


def ranked(probs):
    """Emotion indices by decreasing probability; ties go to the lower index."""
    return np.argsort(-np.asarray(probs, dtype=np.float64), axis=-1, kind="stable")


@dataclass(frozen=True)
class AccuracyReport:
    n: int
    top1: float
    top3: float
    top5: float


def accuracy(probs, labels):
    """Top-1/3/5 accuracy of probability rows (n, E) against true labels."""
    probs = np.atleast_2d(probs)
    labels = np.asarray(labels)
    if probs.shape[0] == 0:
        raise DataError("empty evaluation set")
    order = ranked(probs)
    # position of the true label in the ranking
    pos = np.argmax(order == labels[:, None], axis=1)
    hits = [float(np.mean(pos < m)) for m in (1, 3, 5)]
    return AccuracyReport(int(labels.size), *hits)


def evaluate(model, token_lists, labels, discs=None):
    """AccuracyReport of ``model`` on a labeled test set, optionally on a disc subset."""
    _, probs, _ = model.score_tokens(token_lists, discs)
    return accuracy(probs, labels)


@dataclass(frozen=True)
class ConfidenceReport:
    threshold: float
    secure_correct: int
    secure_wrong: int
    insecure: int

    @property
    def n(self):
        return self.secure_correct + self.secure_wrong + self.insecure


def categorize(top_prob, correct, threshold=DEFAULT_THRESHOLD):
    """``"secure_correct"``, ``"secure_wrong"`` or ``"insecure"``."""
    if top_prob < threshold:
        return "insecure"
    return "secure_correct" if correct else "secure_wrong"


def confidence_report(probs, labels, threshold=DEFAULT_THRESHOLD):
    """Split predictions by top probability against ``threshold`` and correctness."""
    probs = np.atleast_2d(probs)
    labels = np.asarray(labels)
    top = ranked(probs)[:, 0]
    counts = {"secure_correct": 0, "secure_wrong": 0, "insecure": 0}
    for row, t, y in zip(probs, top, labels):
        counts[categorize(row[t], t == y, threshold)] += 1
    return ConfidenceReport(float(threshold), **counts)


def emotion_cooccurrence(top5, n_emotions):
    """Symmetric count matrix of emotions sharing a top-5 list.

    Args:
        top5: iterable of index lists (distinct indices per list).
        n_emotions: E.
    """
    counts = np.zeros((n_emotions, n_emotions), dtype=np.int64)
    for row in top5:
        idx = np.unique(np.asarray(row, dtype=np.intp))
        counts[np.ix_(idx, idx)] += 1
    return counts


def emotion_map(counts, cfg=GloveConfig()):
    """Embed emotions in one disc from their co-occurrence counts.

    Rows are L2-normalized (all-zero rows dropped), turned into a similarity
    matrix and fitted like word embeddings.

    Returns:
        (points, kept) where ``kept`` lists the embedded emotion indices.
    """
    rows, kept = normalize_rows(counts)
    if kept.size == 0:
        raise DataError("co-occurrence matrix is all zero")
    fit = fit_disc(build_similarity(rows), cfg)
    return fit.points, kept
