"""Weighted conformal barycenters in the Poincare disc.

The barycenter of points ``z_i`` with weights ``w_i`` is the unique minimizer of

    H(a) = -sum_i w_i log[(1 - |a|^2)(1 - |z_i|^2) / |1 - conj(a) z_i|^2]

(weights normalized to sum one). It is found by Riemannian gradient descent
under the metric ``4|dz|^2 / (1 - |z|^2)^2`` with Armijo backtracking, started
from the Euclidean weighted mean. Solves run in the compiled kernel when it is
available; see :mod:`embolic._backend`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .disc import RETRACT_RADIUS, check_disc, one_minus_sq
from .errors import DataError, DomainError, NonConvergenceError

ARMIJO = 1e-4


@dataclass(frozen=True)
class SolverOptions:
    grad_tolerance: float = 1e-8
    max_iterations: int = 500
    initial_step: float = 0.1
    backtrack_factor: float = 0.5

    def __post_init__(self):
        if not (self.grad_tolerance > 0 and self.initial_step > 0 and self.max_iterations > 0):
            raise DomainError("solver options must be strictly positive")
        if not 0 < self.backtrack_factor < 1:
            raise DomainError("backtrack_factor must lie in (0, 1)")


DEFAULT_OPTIONS = SolverOptions()


def normalize_weights(points, weights=None):
    """Validate a configuration and return ``(points, weights)`` with weights summing to one.

    Zero-weight points are dropped.
    """
    z = np.atleast_1d(check_disc(points, "points"))
    if z.ndim != 1 or z.size == 0:
        raise DataError("a configuration needs a nonempty 1-d list of points")
    if weights is None:
        return z, np.full(z.size, 1.0 / z.size)
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != z.shape:
        raise DataError(f"{z.size} points but {w.size} weights")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise DataError("weights must be finite and nonnegative")
    keep = w > 0
    if not np.any(keep):
        raise DataError("all weights are zero")
    z, w = z[keep], w[keep]
    return z, w / np.sum(w)


def potential(points, a, weights=None):
    """Value of the barycenter potential at ``a`` (normalized weights)."""
    z, w = normalize_weights(points, weights)
    a = check_disc(a, "a")
    return float(
        -np.log(one_minus_sq(a))
        - np.sum(w * np.log(one_minus_sq(z)))
        + np.sum(w * np.log(np.abs(1.0 - np.conj(a) * z) ** 2))
    )


def potential_gradient(points, a, weights=None):
    """Euclidean gradient of :func:`potential` at ``a`` as ``(d/d re, d/d im)``."""
    z, w = normalize_weights(points, weights)
    a = check_disc(a, "a")
    g = 2.0 * a / one_minus_sq(a) - 2.0 * np.sum(w * z / (1.0 - np.conj(a) * z))
    return np.array([g.real, g.imag])


def riemannian_grad_norm(points, a, weights=None):
    g = potential_gradient(points, a, weights)
    return float(np.hypot(*g) * one_minus_sq(a) ** 2 / 4.0)


def _canonical_rows(points, weights):
    # sort each row by (re, im, w) so the result ignores input order
    order = np.lexsort((weights, points.imag, points.real), axis=-1)
    return (
        np.take_along_axis(points, order, axis=-1),
        np.take_along_axis(weights, order, axis=-1),
    )


def batch_barycenters(points, weights, opts=DEFAULT_OPTIONS, init=None):
    """Barycenters of many configurations packed as padded rows.

    Args:
        points: complex array (M, L); every entry must be a valid disc point.
        weights: nonnegative array (M, L); padding carries weight zero. Rows
            are normalized here.
        opts: solver options.
        init: optional starting points (M,); defaults to the Euclidean
            weighted mean of each row, which lies in the disc by convexity.

    Returns:
        complex array (M,) of barycenters.

    Raises:
        NonConvergenceError: if any row misses the gradient tolerance.
    """
    z = check_disc(np.atleast_2d(points), "points")
    w = np.asarray(weights, dtype=np.float64).reshape(z.shape)
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise DataError("weights must be finite and nonnegative")
    totals = w.sum(axis=1, keepdims=True)
    if np.any(totals <= 0):
        raise DataError("a configuration has all weights zero")
    z, w = _canonical_rows(z, w / totals)
    a, gnorm, _ = _backend.core.barycenter_batch(
        z,
        w,
        opts.grad_tolerance,
        opts.max_iterations,
        opts.initial_step,
        opts.backtrack_factor,
        ARMIJO,
        RETRACT_RADIUS,
        None if init is None else check_disc(np.atleast_1d(init), "init"),
    )
    bad = gnorm > opts.grad_tolerance
    if np.any(bad):
        rows = np.flatnonzero(bad)
        raise NonConvergenceError(
            f"barycenter did not converge for {rows.size} configuration(s); "
            f"worst gradient norm {float(gnorm.max()):.3e}",
            iterate=a[rows],
            grad_norm=gnorm[rows],
        )
    return a


def conformal_barycenter(points, weights=None, opts=DEFAULT_OPTIONS, init=None):
    """Weighted conformal barycenter of a single configuration."""
    z, w = normalize_weights(points, weights)
    start = None if init is None else [init]
    return complex(batch_barycenters(z[None, :], w[None, :], opts, start)[0])
