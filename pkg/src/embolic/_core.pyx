# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: batched barycenter solves and the GloVe energy.

Same contracts as ``_core_py``; see that module for argument documentation.
"""

import numpy as np

from libc.math cimport log, log1p, sqrt, tanh, hypot

cdef double MIN_STEP = 1e-20
cdef double MAX_STEP = 1e6


cdef inline double _oms(double re, double im) nogil:
    cdef double r = hypot(re, im)
    return (1.0 - r) * (1.0 + r)


cdef inline void _retract(double *re, double *im, double radius) nogil:
    cdef double r = hypot(re[0], im[0])
    if r >= radius:
        re[0] *= radius / r
        im[0] *= radius / r


cdef void _gradient(double are, double aim, const double[::1] zre, const double[::1] zim,
                    const double[::1] w, Py_ssize_t n, double *gre, double *gim) nogil:
    cdef Py_ssize_t i
    cdef double sre = 0.0, sim = 0.0, ure, uim, den, nre, nim
    cdef double oma = _oms(are, aim)
    for i in range(n):
        if w[i] == 0.0:
            continue
        # u = 1 - conj(a) z
        ure = 1.0 - (are * zre[i] + aim * zim[i])
        uim = -(are * zim[i] - aim * zre[i])
        den = ure * ure + uim * uim
        # z / u
        nre = (zre[i] * ure + zim[i] * uim) / den
        nim = (zim[i] * ure - zre[i] * uim) / den
        sre += w[i] * nre
        sim += w[i] * nim
    gre[0] = 2.0 * are / oma - 2.0 * sre
    gim[0] = 2.0 * aim / oma - 2.0 * sim


cdef double _delta_potential(double are, double aim, double dre, double dim,
                             const double[::1] zre, const double[::1] zim,
                             const double[::1] w, Py_ssize_t n) nogil:
    cdef Py_ssize_t i
    cdef double oma = _oms(are, aim)
    cdef double total = -log1p(-(2.0 * (are * dre + aim * dim) + dre * dre + dim * dim) / oma)
    cdef double ure, uim, dure, duim, u2, rel
    for i in range(n):
        if w[i] == 0.0:
            continue
        ure = 1.0 - (are * zre[i] + aim * zim[i])
        uim = -(are * zim[i] - aim * zre[i])
        # du = -conj(d) z
        dure = -(dre * zre[i] + dim * zim[i])
        duim = -(dre * zim[i] - dim * zre[i])
        u2 = ure * ure + uim * uim
        rel = (2.0 * (ure * dure + uim * duim) + dure * dure + duim * duim) / u2
        total += w[i] * log1p(rel)
    return total


def barycenter_batch(points, weights, double tol, long max_iter, double step,
                     double shrink, double armijo, double radius, init=None):
    z = np.ascontiguousarray(points, dtype=np.complex128)
    cdef double[:, ::1] zre = np.ascontiguousarray(z.real)
    cdef double[:, ::1] zim = np.ascontiguousarray(z.imag)
    cdef double[:, ::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t m = zre.shape[0], n = zre.shape[1], row, i
    out = np.empty(m, dtype=np.complex128)
    gnorm_out = np.empty(m, dtype=np.float64)
    iters_out = np.zeros(m, dtype=np.int64)
    cdef double complex[::1] out_v = out
    cdef double[::1] gn_v = gnorm_out
    cdef long long[::1] it_v = iters_out
    cdef double are, aim, gre, gim, c, rgre, rgim, gnorm, gsq, t, tre, tim, dh
    cdef double sre, sim, yre, yim, sy
    cdef long it
    cdef bint accepted
    cdef bint has_init = init is not None
    start = np.zeros(m, dtype=np.complex128)
    if has_init:
        start[:] = np.asarray(init, dtype=np.complex128).reshape(m)
    cdef double[::1] sre0 = np.ascontiguousarray(start.real)
    cdef double[::1] sim0 = np.ascontiguousarray(start.imag)
    with nogil:
        for row in range(m):
            are = 0.0
            aim = 0.0
            if has_init:
                are = sre0[row]
                aim = sim0[row]
            else:
                for i in range(n):
                    are += w[row, i] * zre[row, i]
                    aim += w[row, i] * zim[row, i]
            _retract(&are, &aim, radius)
            _gradient(are, aim, zre[row], zim[row], w[row], n, &gre, &gim)
            c = _oms(are, aim)
            c = c * c / 4.0
            rgre = c * gre
            rgim = c * gim
            gnorm = hypot(rgre, rgim)
            gsq = c * (gre * gre + gim * gim)
            t = step
            it = 0
            while it < max_iter and gnorm > tol:
                accepted = False
                while True:
                    tre = are - t * rgre
                    tim = aim - t * rgim
                    _retract(&tre, &tim, radius)
                    dh = _delta_potential(are, aim, tre - are, tim - aim,
                                          zre[row], zim[row], w[row], n)
                    if dh <= -armijo * t * gsq:
                        accepted = True
                        break
                    t *= shrink
                    if t < MIN_STEP:
                        break
                if not accepted:
                    break
                sre = tre - are
                sim = tim - aim
                are = tre
                aim = tim
                it += 1
                _gradient(are, aim, zre[row], zim[row], w[row], n, &gre, &gim)
                c = _oms(are, aim)
                c = c * c / 4.0
                yre = c * gre - rgre
                yim = c * gim - rgim
                rgre = c * gre
                rgim = c * gim
                # Barzilai-Borwein trial step for the next iteration
                sy = sre * yre + sim * yim
                if sy > 0.0:
                    t = (sre * sre + sim * sim) / sy
                else:
                    t /= shrink
                if t < MIN_STEP * 1e3:
                    t = MIN_STEP * 1e3
                elif t > MAX_STEP:
                    t = MAX_STEP
                gnorm = hypot(rgre, rgim)
                gsq = c * (gre * gre + gim * gim)
            out_v[row].real = are
            out_v[row].imag = aim
            gn_v[row] = gnorm
            it_v[row] = it
    return out, gnorm_out, iters_out


def glove_objective(S, u, double alpha, double lam, bint need_grad=True):
    cdef double[:, ::1] s = np.ascontiguousarray(S, dtype=np.float64)
    uc = np.ascontiguousarray(u, dtype=np.complex128)
    cdef double[::1] ure = np.ascontiguousarray(uc.real)
    cdef double[::1] uim = np.ascontiguousarray(uc.imag)
    cdef Py_ssize_t v = ure.shape[0], i, j
    grad = np.zeros(v, dtype=np.complex128)
    cdef double[::1] gre = np.zeros(v)
    cdef double[::1] gim = np.zeros(v)
    cdef double[::1] A = np.empty(v)
    cdef double energy = 0.0, reg = 0.0
    cdef double dre, dim, d2, den, q, root, dist, th, rij, rji, gp, coef, fi, fj
    with nogil:
        for i in range(v):
            A[i] = _oms(ure[i], uim[i])
            reg += log(A[i])
            # diagonal: distance zero, link value one
            rij = s[i, i] - 1.0
            energy += rij * rij
        for i in range(v):
            for j in range(i + 1, v):
                dre = ure[i] - ure[j]
                dim = uim[i] - uim[j]
                d2 = dre * dre + dim * dim
                den = A[i] * A[j]
                q = d2 / (2.0 * den)
                root = sqrt(q * (q + 2.0))
                dist = log1p(q + root)
                th = tanh(0.5 * alpha * dist)
                rij = s[i, j] - (1.0 - th)
                rji = s[j, i] - (1.0 - th)
                energy += rij * rij + rji * rji
                if need_grad and root > 0.0:
                    gp = -0.5 * alpha * (1.0 - th * th)
                    coef = -2.0 * (rij + rji) * gp / root
                    fi = d2 / (A[i] * den)
                    fj = d2 / (A[j] * den)
                    gre[i] += coef * (dre / den + fi * ure[i])
                    gim[i] += coef * (dim / den + fi * uim[i])
                    gre[j] += coef * (-dre / den + fj * ure[j])
                    gim[j] += coef * (-dim / den + fj * uim[j])
    energy -= lam * reg
    if not need_grad:
        return energy, None
    for i in range(v):
        grad[i] = complex(gre[i] + 2.0 * lam * ure[i] / A[i],
                          gim[i] + 2.0 * lam * uim[i] / A[i])
    return energy, grad
