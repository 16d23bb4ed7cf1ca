import os
import subprocess
import sys

import numpy as np
import pytest

from embolic import _backend

from .conftest import random_disc

pytestmark = pytest.mark.skipif(
    len(_backend.available()) < 2, reason="compiled extension not built"
)

ARGS = (1e-11, 500, 0.1, 0.5, 1e-4, 1 - 1e-9)


def problem(rng, m=200, n=6):
    pts = random_disc(rng, m * n, 0.97).reshape(m, n)
    w = rng.random((m, n))
    w[:, -2:] *= rng.random((m, 1)) < 0.5  # some padded rows
    return pts, w / w.sum(axis=1, keepdims=True)


class TestAgreement:
    def test_barycenters(self, rng):
        pts, w = problem(rng)
        a_c, g_c, _ = _backend.load("cython").barycenter_batch(pts, w, *ARGS)
        a_p, g_p, _ = _backend.load("python").barycenter_batch(pts, w, *ARGS)
        np.testing.assert_allclose(a_c, a_p, atol=1e-9)
        assert g_c.max() <= 1e-11 and g_p.max() <= 1e-11

    def test_barycenters_init(self, rng):
        pts, w = problem(rng, m=20)
        init = random_disc(rng, 20, 0.5)
        a_c = _backend.load("cython").barycenter_batch(pts, w, *ARGS, init=init)[0]
        a_p = _backend.load("python").barycenter_batch(pts, w, *ARGS, init=init)[0]
        np.testing.assert_allclose(a_c, a_p, atol=1e-9)

    def test_glove_objective(self, rng):
        V = 40
        S = rng.random((V, V))
        S = (S + S.T) / 2
        u = random_disc(rng, V, 0.9)
        f_c, g_c = _backend.load("cython").glove_objective(S, u, 1.0, 0.01)
        f_p, g_p = _backend.load("python").glove_objective(S, u, 1.0, 0.01)
        assert f_c == pytest.approx(f_p, rel=1e-12)
        np.testing.assert_allclose(g_c, g_p, rtol=1e-10, atol=1e-12)
        assert _backend.load("cython").glove_objective(S, u, 1.0, 0.01, need_grad=False)[1] is None


class TestSelection:
    def _name(self, value):
        env = dict(os.environ, EMBOLIC_BACKEND=value)
        cmd = [sys.executable, "-c", "from embolic import _backend; print(_backend.NAME)"]
        return subprocess.run(cmd, env=env, capture_output=True, text=True, check=True).stdout.strip()

    def test_env_override(self):
        assert self._name("python") == "python"
        assert self._name("cython") == "cython"
        assert self._name("") == "cython"
