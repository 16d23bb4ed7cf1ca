"""Pure numpy implementations of the hot kernels.

Mirrors ``_core.pyx`` one to one; used when the compiled extension is missing
or ``EMBOLIC_BACKEND=python`` is set.
"""

import numpy as np

MIN_STEP = 1e-20
MAX_STEP = 1e6


def _one_minus_sq(z):
    r = np.abs(z)
    return (1.0 - r) * (1.0 + r)


def _retract(z, radius):
    r = np.abs(z)
    over = r >= radius
    if np.any(over):
        z = z.copy()
        z[over] *= radius / r[over]
    return z


def _gradient(a, z, w):
    # Euclidean gradient of the potential, as a complex number per row
    a_c = np.conj(a)[:, None]
    s = np.sum(w * z / (1.0 - a_c * z), axis=1)
    return 2.0 * a / _one_minus_sq(a) - 2.0 * s


def _delta_potential(a, d, z, w):
    # H(a + d) - H(a) from relative changes, free of cancellation
    oma = _one_minus_sq(a)
    self_term = -np.log1p(-(2.0 * np.real(np.conj(a) * d) + np.abs(d) ** 2) / oma)
    u = 1.0 - np.conj(a)[:, None] * z
    du = -np.conj(d)[:, None] * z
    rel = (2.0 * np.real(np.conj(u) * du) + np.abs(du) ** 2) / np.abs(u) ** 2
    return self_term + np.sum(w * np.log1p(rel), axis=1)


def barycenter_batch(points, weights, tol, max_iter, step, shrink, armijo, radius, init=None):
    """Solve many weighted conformal barycenter problems at once.

    Args:
        points: complex array (M, L); padded entries must carry zero weight.
        weights: float array (M, L), each row summing to one.
        tol: Riemannian gradient norm at which a row is converged.
        max_iter: iteration budget per row.
        step: first trial step length.
        shrink: backtracking factor in (0, 1).
        armijo: sufficient-decrease constant.
        radius: retraction radius.
        init: optional complex array (M,) of starting points; defaults to the
            Euclidean weighted mean of each row.

    Returns:
        (a, grad_norm, iterations) arrays of length M.
    """
    z = np.ascontiguousarray(points, dtype=np.complex128)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    m = z.shape[0]
    if init is None:
        a = np.sum(w * z, axis=1)
    else:
        a = np.array(init, dtype=np.complex128).reshape(m)
    a = _retract(a, radius)
    g = _gradient(a, z, w)
    c = _one_minus_sq(a) ** 2 / 4.0
    rg = c * g
    gnorm = np.abs(rg)
    gsq = c * np.abs(g) ** 2
    t = np.full(m, float(step))
    iters = np.zeros(m, dtype=np.int64)
    stalled = np.zeros(m, dtype=bool)

    for _ in range(max_iter):
        active = np.flatnonzero((gnorm > tol) & ~stalled)
        if active.size == 0:
            break
        a_prev = a.copy()
        pending = active
        accepted = []
        while pending.size:
            trial = _retract(a[pending] - t[pending] * rg[pending], radius)
            dh = _delta_potential(a[pending], trial - a[pending], z[pending], w[pending])
            ok = dh <= -armijo * t[pending] * gsq[pending]
            good = pending[ok]
            a[good] = trial[ok]
            accepted.append(good)
            bad = pending[~ok]
            t[bad] *= shrink
            tiny = t[bad] < MIN_STEP
            stalled[bad[tiny]] = True
            pending = bad[~tiny]
        done = np.concatenate(accepted)
        if done.size:
            iters[done] += 1
            g_new = _gradient(a[done], z[done], w[done])
            c_new = _one_minus_sq(a[done]) ** 2 / 4.0
            rg_new = c_new * g_new
            # Barzilai-Borwein trial step for the next iteration
            s_vec = a[done] - a_prev[done]
            y_vec = rg_new - rg[done]
            sy = np.real(np.conj(s_vec) * y_vec)
            ss = np.abs(s_vec) ** 2
            with np.errstate(divide="ignore", invalid="ignore"):
                bb = np.where(sy > 0.0, ss / sy, t[done] / shrink)
            t[done] = np.clip(bb, MIN_STEP * 1e3, MAX_STEP)
            rg[done] = rg_new
            gnorm[done] = np.abs(rg_new)
            gsq[done] = c_new * np.abs(g_new) ** 2
    return a, gnorm, iters


def glove_objective(S, u, alpha, lam, need_grad=True):
    """Objective and Euclidean gradient of the hyperbolic GloVe energy.

    Args:
        S: float array (V, V) of target similarities.
        u: complex array (V,) of disc points.
        alpha: link steepness.
        lam: boundary penalty weight.
        need_grad: skip the gradient when False.

    Returns:
        (objective, gradient) with gradient a complex array (V,) or None.
    """
    S = np.asarray(S, dtype=np.float64)
    u = np.asarray(u, dtype=np.complex128)
    A = _one_minus_sq(u)
    diff = u[:, None] - u[None, :]
    d2 = diff.real**2 + diff.imag**2
    den = A[:, None] * A[None, :]
    q = d2 / (2.0 * den)
    root = np.sqrt(q * (q + 2.0))
    dist = np.log1p(q + root)
    th = np.tanh(0.5 * alpha * dist)
    res = S - (1.0 - th)
    energy = float(np.sum(res * res) - lam * np.sum(np.log(A)))
    if not need_grad:
        return energy, None
    gprime = -0.5 * alpha * (1.0 - th * th)
    with np.errstate(divide="ignore", invalid="ignore"):
        coef = np.where(root > 0.0, -2.0 * (res + res.T) * gprime / root, 0.0)
    dq = diff / den + d2 * (u / A)[:, None] / den
    grad = np.sum(coef * dq, axis=1) + 2.0 * lam * u / A
    return energy, grad
