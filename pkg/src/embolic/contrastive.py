"""Contrastive training of the attention layer.

The loss of a batch of pooled points ``b_1..b_B`` is

    mean_{(i,j) in P} rho(b_i, b_j) - mean_{(i,j) in N} rho(b_i, b_j)
        - lambda * mean_i log(1 - mean_disc |b_i|^2)

with ``rho`` the multi-disc distance, ``P`` same-label pairs and ``N``
different-label pairs. Word embeddings stay frozen; the ``2k + 1`` attention
parameters move by gradient steps whose gradient is estimated with central
finite differences, all perturbed parameter sets pooled in one solver call.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from .attention import AttentionParams, pad_messages, pool_padded
from .disc import disc_distance
from .errors import DataError, DomainError, NonFiniteError
from .sampling import make_rng

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 64
    epochs: int = 50
    learning_rate: float = 0.05
    lambda_boundary: float = 0.01
    pairs_per_batch: int = 64
    fd_step: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 2:
            raise DomainError("batch_size must be at least 2")
        if self.epochs < 0:
            raise DomainError("epochs must be nonnegative")
        if not self.learning_rate > 0:
            raise DomainError("learning_rate must be positive")
        if not self.lambda_boundary >= 0:
            raise DomainError("lambda_boundary must be nonnegative")
        if self.pairs_per_batch < 1:
            raise DomainError("pairs_per_batch must be at least 1")
        if not self.fd_step > 0:
            raise DomainError("fd_step must be positive")

    def to_dict(self):
        return asdict(self)


@dataclass
class PairSet:
    positives: list = field(default_factory=list)
    negatives: list = field(default_factory=list)


def sample_pairs(labels, cap, rng):
    """Draw up to ``cap`` positive and ``cap`` negative index pairs ``(i, j)``, ``i < j``.

    Pairs are drawn uniformly without replacement from the eligible ones and
    returned in lexicographic order. ``cap`` may be a :class:`TrainConfig`.
    """
    if isinstance(cap, TrainConfig):
        cap = cap.pairs_per_batch
    labels = np.asarray(labels)
    n = labels.size
    if n < 2:
        raise DataError("pair sampling needs at least two instances")
    i, j = np.triu_indices(n, k=1)
    same = labels[i] == labels[j]
    out = []
    for sel in (same, ~same):
        ii, jj = i[sel], j[sel]
        if ii.size > cap:
            pick = np.sort(rng.choice(ii.size, size=cap, replace=False))
            ii, jj = ii[pick], jj[pick]
        out.append([(int(a), int(b)) for a, b in zip(ii, jj)])
    return PairSet(out[0], out[1])


def _pair_arrays(pairs):
    def arr(p):
        return np.asarray(p, dtype=np.intp).reshape(-1, 2)

    return arr(pairs.positives), arr(pairs.negatives)


def _batched_loss(b, pos, neg, lam):
    # b: (P, B, k) pooled points for P parameter sets
    total = np.zeros(b.shape[0])
    if len(pos):
        total += np.mean(disc_distance(b[:, pos[:, 0]], b[:, pos[:, 1]]).mean(axis=-1), axis=1)
    if len(neg):
        total -= np.mean(disc_distance(b[:, neg[:, 0]], b[:, neg[:, 1]]).mean(axis=-1), axis=1)
    if lam:
        sq = np.mean(np.abs(b) ** 2, axis=-1)
        total -= lam * np.mean(np.log1p(-sq), axis=1)
    return total


def contrastive_loss(barycenters, pairs, lam):
    """Loss of pooled multi-disc points ``(B, k)`` under ``pairs``.

    Empty positive or negative sets drop their term.
    """
    b = np.asarray(barycenters, dtype=np.complex128)
    if b.ndim != 2:
        raise DataError("barycenters must have shape (B, k)")
    pos, neg = _pair_arrays(pairs)
    for p in (pos, neg):
        if p.size and (p.min() < 0 or p.max() >= b.shape[0]):
            raise DataError("pair index out of range")
    return float(_batched_loss(b[None], pos, neg, lam)[0])


def fd_gradient(vec, points, mask, pairs, lam, h):
    """Loss at ``vec`` and its central finite-difference gradient.

    Args:
        vec: flattened parameters (2k + 1,).
        points, mask: padded batch from :func:`embolic.attention.pad_messages`.
        pairs: PairSet over batch positions.
        lam: boundary weight.
        h: difference step.
    """
    vec = np.asarray(vec, dtype=np.float64)
    n = vec.size
    shifts = np.concatenate([np.zeros((1, n)), h * np.eye(n), -h * np.eye(n)])
    pooled = pool_padded(vec + shifts, points, mask)
    pos, neg = _pair_arrays(pairs)
    losses = _batched_loss(pooled, pos, neg, lam)
    grad = (losses[1 : n + 1] - losses[n + 1 :]) / (2.0 * h)
    return float(losses[0]), grad


def stratified_order(labels, rng):
    """Seeded epoch order that interleaves labels two at a time.

    Each label's instances are shuffled, then consecutive pairs are dealt
    round-robin over the labels so that any batch of four or more instances
    holds same-label pairs.
    """
    labels = np.asarray(labels)
    queues = []
    for lab in np.unique(labels):
        idx = np.flatnonzero(labels == lab)
        queues.append(list(rng.permutation(idx)))
    order = []
    while any(queues):
        for q in queues:
            order.extend(q[:2])
            del q[:2]
    return np.asarray(order, dtype=np.intp)


@dataclass
class TrainResult:
    params: AttentionParams
    trace: list = field(default_factory=list)  # (epoch, batch, loss)
    dropped: int = 0

    def epoch_means(self):
        epochs = sorted({e for e, _, _ in self.trace})
        return [float(np.mean([l for e, _, l in self.trace if e == ep])) for ep in epochs]

    def trace_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["epoch", "batch", "loss"])
        for e, b, loss in self.trace:
            writer.writerow([e, b, repr(float(loss))])
        return buf.getvalue()


def train_attention(token_lists, labels, table, cfg=TrainConfig()):
    """Fit attention parameters on labeled token lists.

    Messages with no in-vocabulary token carry no signal and are left out.

    Args:
        token_lists: preprocessed tokens per training message.
        labels: emotion index per message.
        table: frozen :class:`embolic.glove.WordEmbeddingTable`.
        cfg: training configuration.

    Returns:
        TrainResult with the final parameters and the per-batch loss trace.

    Raises:
        DataError: if fewer than two messages are usable.
        NonFiniteError: if a batch loss is not finite.
    """
    if len(token_lists) != len(labels):
        raise DataError("token lists and labels differ in length")
    k = table.k
    messages = [table.points(t) for t in token_lists]
    keep = [i for i, m in enumerate(messages) if len(m)]
    dropped = len(messages) - len(keep)
    if dropped:
        log.info("dropping %d training messages without in-vocabulary tokens", dropped)
    if len(keep) < 2:
        raise DataError("training needs at least two messages with in-vocabulary tokens")
    messages = [messages[i] for i in keep]
    labels = np.asarray(labels)[keep]
    points, mask = pad_messages(messages, k)

    rng = make_rng(cfg.seed)
    params = AttentionParams.initial(k, rng)
    vec = params.as_vector()
    trace = []
    for epoch in range(cfg.epochs):
        order = stratified_order(labels, rng)
        for b, start in enumerate(range(0, order.size, cfg.batch_size)):
            idx = order[start : start + cfg.batch_size]
            if idx.size < 2:
                continue
            pairs = sample_pairs(labels[idx], cfg.pairs_per_batch, rng)
            loss, grad = fd_gradient(
                vec, points[idx], mask[idx], pairs, cfg.lambda_boundary, cfg.fd_step
            )
            if not (np.isfinite(loss) and np.all(np.isfinite(grad))):
                raise NonFiniteError(f"non-finite loss in epoch {epoch}, batch {b}")
            trace.append((epoch, b, loss))
            vec = vec - cfg.learning_rate * grad
        if trace:
            log.debug("epoch %d: last batch loss %.6f", epoch, trace[-1][2])
    return TrainResult(AttentionParams.from_vector(vec), trace, dropped)
