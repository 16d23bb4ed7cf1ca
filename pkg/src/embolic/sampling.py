"""Moebius probability distributions on the disc.

The density with mean ``a`` and concentration ``s > 1`` is

    ((s - 1) / pi) * [(1 - |z|^2)(1 - |a|^2) / |1 - conj(a) z|^2]^s

with respect to ``dA / (1 - |z|^2)^2``. Draws are made at mean 0 by inverse-CDF
sampling of the radius and a uniform angle, then carried to ``a`` by the
isometry ``g_a`` (``theta = 0``), which maps 0 to ``a``.

All randomness goes through ``numpy.random.Generator(PCG64(seed))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .disc import MoebiusTransform, check_disc, moebius_apply, one_minus_sq, retract
from .errors import DomainError

RNG_ALGORITHM = "numpy-PCG64"


def make_rng(seed):
    """Seeded generator; identical seeds give identical streams."""
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass(frozen=True)
class MoebiusDistribution:
    mean: complex = 0j
    concentration: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "mean", check_disc(self.mean, "mean"))
        if not self.concentration > 1:
            raise DomainError(f"concentration must exceed 1, got {self.concentration}")


def density(dist, z):
    """Density of ``dist`` at ``z`` against the measure ``dA / (1 - |z|^2)^2``."""
    z = check_disc(z)
    a = dist.mean
    s = dist.concentration
    ratio = one_minus_sq(z) * one_minus_sq(a) / np.abs(1.0 - np.conj(a) * z) ** 2
    out = (s - 1.0) / math.pi * ratio**s
    if np.ndim(out) == 0:
        return float(out)
    return out


def radial_cdf(s, R):
    """Probability that a draw at mean 0 lands within Euclidean radius ``R``."""
    if not s > 1:
        raise DomainError(f"concentration must exceed 1, got {s}")
    R = np.asarray(R, dtype=np.float64)
    if np.any(R < 0) or np.any(R >= 1):
        raise DomainError("radius must lie in [0, 1)")
    out = -np.expm1((s - 1.0) * np.log1p(-R * R))
    if out.ndim == 0:
        return float(out)
    return out


def radius_from_uniform(s, kappa):
    """Inverse of :func:`radial_cdf` applied to uniforms ``kappa`` in [0, 1)."""
    kappa = np.asarray(kappa, dtype=np.float64)
    # 1 - (1 - kappa)^(1/(s-1)), computed without cancellation
    inner = -np.expm1(np.log1p(-kappa) / (s - 1.0))
    return np.sqrt(inner)


def sample(dist, n, rng):
    """Draw ``n`` points from ``dist``.

    Args:
        dist: the distribution.
        n: number of draws, at least one.
        rng: a ``numpy.random.Generator`` (see :func:`make_rng`).

    Returns:
        complex array of shape (n,).
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    if not dist.concentration > 1:
        raise DomainError("concentration must exceed 1")
    gamma = rng.random(n)
    kappa = rng.random(n)
    radius = radius_from_uniform(dist.concentration, kappa)
    # keep extreme draws admissible for low concentrations
    radius = np.minimum(radius, 1.0 - 4e-7)
    z = radius * np.exp(2j * math.pi * gamma)
    if dist.mean == 0:
        return z
    return retract(moebius_apply(MoebiusTransform(dist.mean, 0.0), z))
