import math

import numpy as np
import pytest

from embolic.disc import disc_distance
from embolic.errors import DataError, DomainError
from embolic.glove import (
    GloveConfig,
    WordEmbeddingTable,
    fit_disc,
    fit_embeddings,
    glove_gradient,
    glove_objective,
    link,
)
from embolic.sampling import MoebiusDistribution, make_rng, sample

from .conftest import random_disc


def brute_objective(S, u, alpha, lam):
    total = 0.0
    for i in range(len(u)):
        for j in range(len(u)):
            g = 2 * math.exp(-alpha * disc_distance(u[i], u[j]))
            g /= 1 + math.exp(-alpha * disc_distance(u[i], u[j]))
            total += (S[i, j] - g) ** 2
    return total - lam * sum(math.log(1 - abs(x) ** 2) for x in u)


def random_instance(rng, n):
    m = rng.random((n, 4)) * (rng.random((n, 4)) > 0.3) + 1e-3
    m /= np.linalg.norm(m, axis=1, keepdims=True)
    return np.clip(m @ m.T, 0, 1), random_disc(rng, n, 0.9)


def planted_instance(seed=0, n=12, alpha=1.0):
    """Points from a Moebius sample capped at radius 0.6 and their exact similarities."""
    u = sample(MoebiusDistribution(0j, 3.0), n, make_rng(seed))
    u = np.where(np.abs(u) > 0.6, 0.6 * u / np.abs(u), u)
    return u, link(alpha, disc_distance(u[:, None], u[None, :]))


class TestLink:
    def test_values(self):
        assert link(2.5, 0.0) == 1.0
        assert link(1.0, math.log(3)) == pytest.approx(0.5, rel=1e-15)
        assert link(1.0, 800.0) == pytest.approx(0.0, abs=1e-300)

    def test_monotone(self):
        x = np.linspace(0, 20, 1000)
        assert np.all(np.diff(link(0.7, x)) < 0)


class TestConfig:
    @pytest.mark.parametrize(
        "kw", [{"alpha": 0}, {"lambda_reg": -1}, {"init_concentration": 1}, {"epochs": -1}, {"learning_rate": 0}]
    )
    def test_rejects(self, kw):
        with pytest.raises(DomainError):
            GloveConfig(**kw)


class TestObjective:
    def test_identity_similarity_at_origin(self, backend):
        n = 7
        assert glove_objective(np.eye(n), np.zeros(n, complex), GloveConfig()) == pytest.approx(n * (n - 1))

    def test_coincident_pair(self, backend):
        cfg = GloveConfig(lambda_reg=0.3)
        u = np.array([0.4 + 0.2j, 0.4 + 0.2j])
        expected = -2 * 0.3 * math.log(1 - abs(u[0]) ** 2)
        assert glove_objective(np.ones((2, 2)), u, cfg) == pytest.approx(expected, rel=1e-14)

    def test_matches_brute_force(self, backend, rng):
        for _ in range(10):
            S, u = random_instance(rng, 6)
            cfg = GloveConfig(alpha=0.5 + rng.random(), lambda_reg=rng.random())
            ref = brute_objective(S, u, cfg.alpha, cfg.lambda_reg)
            assert glove_objective(S, u, cfg) == pytest.approx(ref, rel=1e-12)

    def test_nonnegative_without_penalty(self, backend, rng):
        S, u = random_instance(rng, 10)
        assert glove_objective(S, u, GloveConfig(lambda_reg=0.0)) >= 0

    def test_shape_mismatch(self, backend):
        with pytest.raises(DataError):
            glove_objective(np.eye(3), np.zeros(2, complex), GloveConfig())


class TestGradient:
    def test_finite_differences(self, backend, rng):
        h = 1e-6
        for _ in range(50):
            n = int(rng.integers(2, 9))
            S, u = random_instance(rng, n)
            cfg = GloveConfig(alpha=0.5 + 1.5 * rng.random(), lambda_reg=0.1 * rng.random())
            i = int(rng.integers(n))
            g = glove_gradient(S, u, cfg, i)
            fd = np.empty(2)
            for c, step in enumerate((h, 1j * h)):
                up, dn = u.copy(), u.copy()
                up[i] += step
                dn[i] -= step
                fd[c] = (glove_objective(S, up, cfg) - glove_objective(S, dn, cfg)) / (2 * h)
            assert np.linalg.norm(g - fd) <= 1e-5 * np.linalg.norm(g)

    def test_mirror_symmetry(self, backend):
        S = np.array([[1.0, 0.3], [0.3, 1.0]])
        g = glove_gradient(S, np.array([-0.4, 0.4], complex), GloveConfig())
        assert g[0] == pytest.approx(-g[1], abs=1e-15)

    def test_single_word_pulled_to_origin(self, backend, rng):
        for u in random_disc(rng, 20, 0.9):
            g = glove_gradient(np.ones((1, 1)), np.array([u]), GloveConfig(lambda_reg=0.1), 0)
            # descent direction -g points at the origin
            assert np.dot(g, [u.real, u.imag]) > 0
            assert abs(math.atan2(g[1], g[0]) - math.atan2(u.imag, u.real)) % (2 * math.pi) < 1e-9


class TestFit:
    def test_monotone_trace(self, backend, rng):
        S, _ = random_instance(rng, 15)
        fit = fit_disc(S, GloveConfig(epochs=200, seed=3))
        assert np.all(np.diff(fit.trace) <= 0)
        assert fit.trace[-1] < fit.trace[0]

    def test_single_word_goes_to_origin(self, backend):
        fit = fit_disc(np.ones((1, 1)), GloveConfig(epochs=300, seed=5))
        assert abs(fit.points[0]) < 1e-3

    def test_planted_recovery(self, backend):
        u, S = planted_instance(0)
        cfg = GloveConfig(alpha=1.0, lambda_reg=1e-4, epochs=3000, seed=42)
        fit = fit_disc(S, cfg)
        assert fit.trace[-1] <= 1e-3
        assert np.all(np.diff(fit.trace) <= 0)

    def test_penalty_shrinks_radius(self, backend, rng):
        S, _ = random_instance(rng, 12)
        lo = fit_disc(S, GloveConfig(lambda_reg=0.01, seed=1)).points
        hi = fit_disc(S, GloveConfig(lambda_reg=1.0, seed=1)).points
        assert np.abs(hi).max() < np.abs(lo).max()

    def test_deterministic(self, backend, rng):
        S, _ = random_instance(rng, 8)
        a = fit_disc(S, GloveConfig(epochs=50, seed=9))
        b = fit_disc(S, GloveConfig(epochs=50, seed=9))
        np.testing.assert_array_equal(a.points, b.points)

    def test_rejects_non_square(self):
        with pytest.raises(DataError):
            fit_disc(np.ones((2, 3)), GloveConfig())


class TestEmbeddings:
    def test_single_disc_is_fit_disc(self, rng):
        S, _ = random_instance(rng, 6)
        cfg = GloveConfig(epochs=40, seed=4)
        table = fit_embeddings(S, list("abcdef"), 1, cfg)
        np.testing.assert_array_equal(table.discs[0], fit_disc(S, cfg).points)

    def test_discs_differ(self, rng):
        S, _ = random_instance(rng, 6)
        table = fit_embeddings(S, list("abcdef"), 3, GloveConfig(epochs=40))
        assert table.k == 3
        assert np.abs(table.discs[0] - table.discs[1]).max() > 1e-3

    def test_points_and_json(self):
        table = WordEmbeddingTable(["a", "b"], np.array([[0.1, 0.2j], [-0.3, 0.4 + 0.1j]]))
        np.testing.assert_array_equal(table.points(["b", "zzz", "a"]), [[0.2j, 0.4 + 0.1j], [0.1, -0.3]])
        assert table.points(["zzz"]).shape == (0, 2)
        back = WordEmbeddingTable.from_json(table.to_json())
        assert back.vocab == table.vocab
        np.testing.assert_array_equal(back.discs, table.discs)

    def test_rejects_bad_k(self):
        with pytest.raises(DomainError):
            fit_embeddings(np.ones((1, 1)), ["a"], 0)
