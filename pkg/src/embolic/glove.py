"""Hyperbolic GloVe: factorize a similarity matrix into Poincare disc points.

Minimizes

    E(U) = sum_ij (s_ij - g(d(u_i, u_j)))^2 - lambda * sum_i log(1 - |u_i|^2),
    g(x) = 2 exp(-alpha x) / (1 + exp(-alpha x)),

by full-batch Riemannian gradient descent started from a concentrated Moebius
sample around the origin. The energy and its gradient are computed by the
compiled kernel when available.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _backend
from .disc import RETRACT_RADIUS, check_disc, one_minus_sq, retract
from .errors import DataError, DomainError, EmbolicError, NonFiniteError
from .sampling import MoebiusDistribution, make_rng, sample

log = logging.getLogger(__name__)

ARMIJO = 1e-4
MIN_STEP = 1e-20
MAX_STEP = 1e6


@dataclass(frozen=True)
class GloveConfig:
    alpha: float = 1.0
    lambda_reg: float = 0.01
    init_concentration: float = 10.0
    learning_rate: float = 0.05
    epochs: int = 300
    seed: int = 0
    backtrack_factor: float = 0.5

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError("alpha must be positive")
        if not self.lambda_reg >= 0:
            raise DomainError("lambda_reg must be nonnegative")
        if not self.init_concentration > 1:
            raise DomainError("init_concentration must exceed 1")
        if not self.learning_rate > 0:
            raise DomainError("learning_rate must be positive")
        if self.epochs < 0:
            raise DomainError("epochs must be nonnegative")
        if not 0 < self.backtrack_factor < 1:
            raise DomainError("backtrack_factor must lie in (0, 1)")

    def to_dict(self):
        return asdict(self)


def link(alpha, x):
    """Similarity assigned to distance ``x``: 1 at zero, decreasing to 0."""
    x = np.asarray(x, dtype=np.float64)
    out = 2.0 * np.exp(-np.logaddexp(0.0, alpha * x))
    if out.ndim == 0:
        return float(out)
    return out


def _validate(S, U):
    S = np.asarray(S, dtype=np.float64)
    U = np.atleast_1d(check_disc(U, "U"))
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] != U.shape[0]:
        raise DataError(f"similarity shape {S.shape} does not match {U.shape[0]} points")
    return S, U


def glove_objective(S, U, cfg):
    """Energy of the configuration ``U`` (both ``(i, j)`` and ``(j, i)`` counted)."""
    S, U = _validate(S, U)
    energy, _ = _backend.core.glove_objective(S, U, cfg.alpha, cfg.lambda_reg, False)
    return float(energy)


def glove_gradient(S, U, cfg, i=None):
    """Euclidean gradient of :func:`glove_objective`.

    Returns the full complex gradient array, or ``(d/d re, d/d im)`` of word
    ``i`` when an index is given.
    """
    S, U = _validate(S, U)
    _, grad = _backend.core.glove_objective(S, U, cfg.alpha, cfg.lambda_reg, True)
    if i is None:
        return grad
    return np.array([grad[i].real, grad[i].imag])


@dataclass
class DiscFit:
    points: np.ndarray
    trace: list = field(default_factory=list)
    stalled: bool = False


def fit_disc(S, cfg, seed=None):
    """Embed the rows of ``S`` in one disc.

    Each epoch takes one Riemannian gradient step (Euclidean gradient scaled by
    ``(1 - |u|^2)^2 / 4``) accepted by Armijo backtracking; trial steps follow
    Barzilai-Borwein after the first, which starts at ``cfg.learning_rate``.
    Points crossing ``1 - 2e-7`` are pulled back radially.

    Returns:
        DiscFit with the points and the objective after every accepted step.

    Raises:
        NonFiniteError: if the objective becomes NaN or infinite.
    """
    S = np.asarray(S, dtype=np.float64)
    n = S.shape[0]
    if S.ndim != 2 or S.shape != (n, n) or n == 0:
        raise DataError(f"similarity matrix must be square and nonempty, got {S.shape}")
    rng = make_rng(cfg.seed if seed is None else seed)
    u = sample(MoebiusDistribution(0j, cfg.init_concentration), n, rng)
    kernel = _backend.core.glove_objective

    energy, grad = kernel(S, u, cfg.alpha, cfg.lambda_reg, True)
    if not np.isfinite(energy):
        raise NonFiniteError("initial objective is not finite")
    trace = [float(energy)]
    t = cfg.learning_rate
    shrink = cfg.backtrack_factor
    stalled = False
    for epoch in range(cfg.epochs):
        c = one_minus_sq(u) ** 2 / 4.0
        rg = c * grad
        gsq = float(np.sum(c * np.abs(grad) ** 2))
        if gsq == 0.0:
            break
        while True:
            trial = retract(u - t * rg, RETRACT_RADIUS)
            e_new, _ = kernel(S, trial, cfg.alpha, cfg.lambda_reg, False)
            if not np.isfinite(e_new):
                raise NonFiniteError(
                    f"objective not finite at epoch {epoch} (step {t:.3e}, "
                    f"max modulus {float(np.abs(trial).max()):.9f})"
                )
            if e_new <= energy - ARMIJO * t * gsq:
                break
            t *= shrink
            if t < MIN_STEP:
                stalled = True
                break
        if stalled:
            log.info("line search stalled at epoch %d, objective %.6g", epoch, energy)
            break
        energy, grad_new = kernel(S, trial, cfg.alpha, cfg.lambda_reg, True)
        rg_new = one_minus_sq(trial) ** 2 / 4.0 * grad_new
        s_vec = trial - u
        sy = float(np.sum(np.real(np.conj(s_vec) * (rg_new - rg))))
        t = float(np.sum(np.abs(s_vec) ** 2)) / sy if sy > 0 else t / shrink
        t = min(max(t, MIN_STEP * 1e3), MAX_STEP)
        u, grad = trial, grad_new
        trace.append(float(energy))
    return DiscFit(u, trace, stalled)


@dataclass
class WordEmbeddingTable:
    """Token to multi-disc point map; ``discs`` has shape (k, |V|)."""

    vocab: list
    discs: np.ndarray

    def __post_init__(self):
        self.discs = np.atleast_2d(np.asarray(self.discs, dtype=np.complex128))
        if self.discs.shape[1] != len(self.vocab):
            raise DataError("embedding table: vocab and disc arrays differ in length")
        self._index = {w: i for i, w in enumerate(self.vocab)}

    @property
    def k(self):
        return self.discs.shape[0]

    def points(self, tokens):
        """Multi-disc points (n, k) of the in-vocabulary tokens, in order."""
        idx = [self._index[t] for t in tokens if t in self._index]
        return self.discs[:, idx].T.copy()

    def to_json(self):
        return {
            "vocab": list(self.vocab),
            "discs": [[[float(z.real), float(z.imag)] for z in disc] for disc in self.discs],
        }

    @classmethod
    def from_json(cls, obj):
        discs = np.array(
            [[complex(re, im) for re, im in disc] for disc in obj["discs"]],
            dtype=np.complex128,
        ).reshape(len(obj["discs"]), len(obj["vocab"]))
        return cls(list(obj["vocab"]), discs)


def fit_embeddings(S, vocab, k=3, cfg=GloveConfig()):
    """Run :func:`fit_disc` ``k`` times with seeds ``seed, seed + 1, ...``."""
    if k < 1:
        raise DomainError("k must be at least 1")
    discs = []
    for d in range(k):
        try:
            fit = fit_disc(S, cfg, seed=cfg.seed + d)
        except EmbolicError as exc:
            raise type(exc)(f"disc {d}: {exc}") from exc
        log.info("disc %d: objective %.6g after %d steps", d, fit.trace[-1], len(fit.trace) - 1)
        discs.append(fit.points)
    return WordEmbeddingTable(list(vocab), np.array(discs))
