"""Arithmetic of the Poincare disc and of products of discs.

Points are complex numbers (Python ``complex`` or numpy ``complex128`` arrays)
with modulus strictly below ``1 - EPS_BOUNDARY``. A multi-disc point is a
complex array whose last axis has length ``k``. Boundary directions are plain
angles in radians, stored reduced to ``[0, 2*pi)``.

All functions are pure and broadcast over numpy arrays.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError

EPS_BOUNDARY = 1e-7
MAX_RADIUS = 1.0 - EPS_BOUNDARY
# retracted iterates land strictly inside the admissible region
RETRACT_RADIUS = 1.0 - 2.0 * EPS_BOUNDARY

TWO_PI = 2.0 * math.pi


def check_disc(z, name="z"):
    """Return ``z`` as complex (scalar or array) after validating the disc invariant.

    Raises:
        DomainError: if any modulus is ``>= 1 - EPS_BOUNDARY`` or not finite.
    """
    arr = np.asarray(z, dtype=np.complex128)
    r = np.abs(arr)
    if not np.all(np.isfinite(r)):
        raise DomainError(f"{name} contains non-finite coordinates")
    if np.any(r >= MAX_RADIUS):
        raise DomainError(
            f"{name} has modulus {float(np.max(r)):.17g} >= 1 - {EPS_BOUNDARY:g}"
        )
    if arr.ndim == 0:
        return complex(arr)
    return arr


def disc_point(re, im=0.0):
    """Build a validated disc point from its real and imaginary parts."""
    return check_disc(complex(re, im))


def one_minus_sq(z):
    """``1 - |z|^2`` computed as ``(1 - |z|)(1 + |z|)``."""
    r = np.abs(z)
    return (1.0 - r) * (1.0 + r)


def retract(z, radius=RETRACT_RADIUS):
    """Radially pull points with modulus ``>= radius`` back onto the circle of that radius."""
    arr = np.asarray(z, dtype=np.complex128)
    r = np.abs(arr)
    scale = np.where(r >= radius, radius / np.where(r > 0, r, 1.0), 1.0)
    out = arr * scale
    if out.ndim == 0:
        return complex(out)
    return out


def wrap_angle(psi):
    """Reduce angles to ``[0, 2*pi)``."""
    out = np.mod(psi, TWO_PI)
    # np.mod can return exactly 2*pi for tiny negative inputs
    out = np.where(out >= TWO_PI, 0.0, out)
    if np.ndim(out) == 0:
        return float(out)
    return out


def circular_difference(psi1, psi2):
    """Unsigned angular distance ``min(|d|, 2*pi - |d|)`` in ``[0, pi]``."""
    d = np.abs(wrap_angle(np.asarray(psi1) - np.asarray(psi2)))
    out = np.minimum(d, TWO_PI - d)
    if np.ndim(out) == 0:
        return float(out)
    return out


def _arccosh1p(x):
    # arccosh(1 + x) without the cancellation of forming 1 + x first
    return np.log1p(x + np.sqrt(x * (x + 2.0)))


def disc_distance(z1, z2):
    """Hyperbolic distance between disc points.

    Evaluates ``arccosh(1 + |z1 - z2|^2 / (2 (1 - |z1|^2)(1 - |z2|^2)))``.

    Raises:
        DomainError: if either argument leaves the disc.
    """
    z1 = check_disc(z1, "z1")
    z2 = check_disc(z2, "z2")
    num = np.abs(z1 - z2) ** 2
    den = 2.0 * (one_minus_sq(z1) * one_minus_sq(z2))
    out = _arccosh1p(num / den)
    if np.ndim(out) == 0:
        return float(out)
    return out


def multidisc_distance(z, xi):
    """Mean of the per-disc distances between two multi-disc points.

    The last axis indexes discs; leading axes broadcast.

    Raises:
        DimensionError: if the disc counts differ.
    """
    z = np.asarray(z, dtype=np.complex128)
    xi = np.asarray(xi, dtype=np.complex128)
    if z.ndim == 0 or xi.ndim == 0:
        raise DimensionError("multi-disc points need a trailing disc axis")
    if z.shape[-1] != xi.shape[-1]:
        raise DimensionError(f"disc counts differ: {z.shape[-1]} != {xi.shape[-1]}")
    out = np.mean(disc_distance(z, xi), axis=-1)
    if np.ndim(out) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class MoebiusTransform:
    """Disc automorphism ``z -> exp(i*theta) * (a - z) / (1 - conj(a) * z)``."""

    a: complex = 0j
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", check_disc(self.a, "a"))
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))

    def __call__(self, z):
        return moebius_apply(self, z)

    def inverse(self):
        return moebius_inverse(self)

    def matrix(self):
        """2x2 complex matrix acting by linear fractional transformation."""
        rot = cmath.exp(1j * self.theta)
        return np.array(
            [[-rot, rot * self.a], [-self.a.conjugate(), 1.0]], dtype=np.complex128
        )

    def compose(self, other):
        """Transform equal to ``self(other(z))``."""
        return moebius_from_matrix(self.matrix() @ other.matrix())


def moebius_apply(g, z):
    """Apply ``g`` to disc point(s) ``z``; the image stays in the disc."""
    z = check_disc(z)
    rot = cmath.exp(1j * g.theta) if g.theta else 1.0
    out = rot * (g.a - z) / (1.0 - g.a.conjugate() * z)
    if np.ndim(out) == 0:
        return complex(out)
    return out


def moebius_inverse(g):
    """Inverse transform, again written in the ``(a, theta)`` normal form."""
    if g.theta == 0.0:
        return MoebiusTransform(g.a, 0.0)
    return MoebiusTransform(g.a * cmath.exp(1j * g.theta), -g.theta)


def moebius_from_matrix(m):
    """Read ``(a, theta)`` off a matrix ``[[A, B], [C, D]]`` of a disc automorphism."""
    m = np.asarray(m, dtype=np.complex128)
    A, B, D = m[0, 0], m[0, 1], m[1, 1]
    a = complex(-B / A)
    theta = cmath.phase(-A / D)
    return MoebiusTransform(a, theta)


def moebius_from_points(z, w):
    """Refit the disc automorphism sending three points ``z`` to ``w``.

    Uses the determinant form of the unique linear fractional map through three
    point pairs, then normalizes to ``(a, theta)``.
    """
    (p1, p2, p3), (q1, q2, q3) = z, w
    det = np.linalg.det
    A = det(np.array([[p1 * q1, q1, 1], [p2 * q2, q2, 1], [p3 * q3, q3, 1]]))
    B = det(np.array([[p1 * q1, p1, q1], [p2 * q2, p2, q2], [p3 * q3, p3, q3]]))
    C = det(np.array([[p1, q1, 1], [p2, q2, 1], [p3, q3, 1]]))
    D = det(np.array([[p1 * q1, p1, 1], [p2 * q2, p2, 1], [p3 * q3, p3, 1]]))
    return moebius_from_matrix(np.array([[A, B], [C, D]]))


def poisson_score(z, psi):
    """Poisson kernel of the disc point ``z`` against the boundary direction ``psi``.

    ``(1 - r^2) / (1 - 2 r cos(psi - phi) + r^2)`` for ``z = r exp(i phi)``; the
    denominator is evaluated as ``(1 - r)^2 + 4 r sin^2((psi - phi) / 2)``.
    """
    z = check_disc(z)
    r = np.abs(z)
    phi = np.angle(z)
    half = 0.5 * (np.asarray(psi) - phi)
    den = (1.0 - r) ** 2 + 4.0 * r * np.sin(half) ** 2
    out = one_minus_sq(z) / den
    if np.ndim(out) == 0:
        return float(out)
    return out


def busemann_energy(z, psi):
    """Busemann alignment energy; its exponential is :func:`poisson_score`."""
    out = np.log(poisson_score(z, psi))
    if np.ndim(out) == 0:
        return float(out)
    return out
