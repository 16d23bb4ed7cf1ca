"""Attention pooling of word embeddings into one multi-disc point per message.

Each word's ``k`` complex coordinates are flattened to ``2k`` reals
``(re_1, im_1, ..., re_k, im_k)`` and projected to one logit; a softmax over
the message's words gives weights, shared by all discs, for a weighted
conformal barycenter in each disc.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .barycenter import SolverOptions, batch_barycenters
from .errors import DataError, DimensionError

# pooled points must be stable to well below the finite-difference step
POOL_OPTIONS = SolverOptions(grad_tolerance=1e-11, max_iterations=500)


@dataclass
class AttentionParams:
    projection: np.ndarray
    bias: float = 0.0

    def __post_init__(self):
        self.projection = np.asarray(self.projection, dtype=np.float64).ravel()
        self.bias = float(self.bias)
        if self.projection.size % 2 or self.projection.size == 0:
            raise DimensionError("projection length must be 2k with k >= 1")
        if not (np.all(np.isfinite(self.projection)) and np.isfinite(self.bias)):
            raise DataError("attention parameters must be finite")

    @property
    def k(self):
        return self.projection.size // 2

    def as_vector(self):
        return np.append(self.projection, self.bias)

    @classmethod
    def from_vector(cls, vec):
        vec = np.asarray(vec, dtype=np.float64)
        return cls(vec[:-1].copy(), float(vec[-1]))

    @classmethod
    def initial(cls, k, rng):
        """Projection ~ 0.01 * N(0, 1), bias 0."""
        return cls(0.01 * rng.standard_normal(2 * k), 0.0)


def flatten(words):
    """(n, k) complex -> (n, 2k) real with interleaved real/imaginary parts."""
    words = np.asarray(words, dtype=np.complex128)
    return np.stack([words.real, words.imag], axis=-1).reshape(*words.shape[:-1], -1)


def _softmax(logits, mask=None):
    if mask is not None:
        logits = np.where(mask, logits, -np.inf)
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=-1, keepdims=True)


def attention_weights(params, words):
    """Softmax attention weights of a message's words.

    Args:
        params: projection and bias.
        words: complex array (n, k) of the message's word embeddings.

    Raises:
        DataError: for an empty message.
    """
    words = np.asarray(words, dtype=np.complex128)
    if words.ndim != 2 or words.shape[0] == 0:
        raise DataError("attention needs a nonempty (n, k) message")
    if words.shape[1] != params.k:
        raise DimensionError(f"message has {words.shape[1]} discs, params expect {params.k}")
    logits = flatten(words) @ params.projection + params.bias
    return _softmax(logits)


def message_representation(params, words, opts=POOL_OPTIONS):
    """Pooled multi-disc point (k,) of one nonempty message."""
    w = attention_weights(params, words)
    words = np.asarray(words, dtype=np.complex128)
    k = words.shape[1]
    return batch_barycenters(words.T, np.broadcast_to(w, (k, w.size)), opts)


def pad_messages(messages, k):
    """Pack messages into (M, L, k) points with a validity mask (M, L).

    Padding slots hold the origin; empty messages get an all-False mask row.
    """
    m = len(messages)
    width = max([len(msg) for msg in messages] + [1])
    points = np.zeros((m, width, k), dtype=np.complex128)
    mask = np.zeros((m, width), dtype=bool)
    for i, msg in enumerate(messages):
        n = len(msg)
        if n:
            msg = np.asarray(msg, dtype=np.complex128)
            if msg.shape[1] != k:
                raise DimensionError(f"message {i} has {msg.shape[1]} discs, expected {k}")
            points[i, :n] = msg
            mask[i, :n] = True
    return points, mask


def pool_padded(param_vectors, points, mask, opts=POOL_OPTIONS):
    """Pool padded messages under several parameter vectors in one solver call.

    Args:
        param_vectors: array (P, 2k + 1) of flattened parameters.
        points: complex array (M, L, k) from :func:`pad_messages`.
        mask: bool array (M, L).

    Returns:
        complex array (P, M, k); messages with an empty mask sit at the origin.
    """
    pv = np.atleast_2d(np.asarray(param_vectors, dtype=np.float64))
    n_params = pv.shape[0]
    m, width, k = points.shape
    out = np.zeros((n_params, m, k), dtype=np.complex128)
    live = np.flatnonzero(mask.any(axis=1))
    if live.size == 0:
        return out
    pts, msk = points[live], mask[live]
    logits = np.einsum("mlf,pf->pml", flatten(pts), pv[:, :-1]) + pv[:, -1][:, None, None]
    weights = _softmax(logits, msk[None, :, :])
    # rows ordered (param, message, disc)
    rows_z = np.broadcast_to(
        np.transpose(pts, (0, 2, 1))[None], (n_params, live.size, k, width)
    ).reshape(-1, width)
    rows_w = np.broadcast_to(weights[:, :, None, :], (n_params, live.size, k, width)).reshape(
        -1, width
    )
    pooled = batch_barycenters(rows_z, rows_w, opts).reshape(n_params, live.size, k)
    out[:, live] = pooled
    return out


def pool_messages(params, messages, k, opts=POOL_OPTIONS):
    """Pooled points (M, k) and an ``empty`` flag per message.

    Messages with no in-vocabulary words map to the origin of every disc.
    """
    points, mask = pad_messages(messages, k)
    pooled = pool_padded(params.as_vector()[None], points, mask, opts)[0]
    return pooled, ~mask.any(axis=1)
