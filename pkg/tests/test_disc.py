import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from embolic.disc import (
    MAX_RADIUS,
    RETRACT_RADIUS,
    MoebiusTransform,
    busemann_energy,
    check_disc,
    circular_difference,
    disc_distance,
    moebius_apply,
    moebius_from_points,
    moebius_inverse,
    multidisc_distance,
    poisson_score,
    retract,
    wrap_angle,
)
from embolic.errors import DimensionError, DomainError

from .conftest import random_disc


def artanh_distance(z1, z2):
    """Independent oracle through the pseudo-chordal form.

    The implemented formula satisfies cosh d = 1 + (cosh D - 1) / 4 where
    D = 2 artanh |(z1 - z2) / (1 - conj(z1) z2)| is the curvature -1 distance.
    """
    t = abs((z1 - z2) / (1 - z1.conjugate() * z2))
    # cosh D - 1 = 2 t^2 / (1 - t^2), and cosh d - 1 = 2 sinh^2(d / 2)
    x = 0.5 * t * t / (1.0 - t * t)
    return 2.0 * math.asinh(math.sqrt(x / 2.0))


disc_points = st.builds(
    lambda r, t: r * cmath.exp(1j * t),
    st.floats(0.0, 0.95),
    st.floats(0.0, 2 * math.pi),
)
transforms = st.builds(MoebiusTransform, disc_points, st.floats(0.0, 2 * math.pi))


class TestValidation:
    def test_rejects_boundary(self):
        with pytest.raises(DomainError):
            check_disc(1.0)
        with pytest.raises(DomainError):
            check_disc(MAX_RADIUS)
        with pytest.raises(DomainError):
            check_disc(np.array([0.1, np.nan]))

    def test_accepts_interior(self):
        assert check_disc(0.5j) == 0.5j
        assert check_disc(MAX_RADIUS - 1e-9) == MAX_RADIUS - 1e-9

    def test_retract(self):
        z = retract(np.array([0.5, 2.0, -3j]))
        np.testing.assert_allclose(np.abs(z), [0.5, RETRACT_RADIUS, RETRACT_RADIUS])
        assert np.angle(z[2]) == pytest.approx(-math.pi / 2)

    def test_wrap_angle(self):
        assert wrap_angle(-0.5) == pytest.approx(2 * math.pi - 0.5)
        assert wrap_angle(2 * math.pi) == 0.0
        assert circular_difference(0.1, 2 * math.pi - 0.1) == pytest.approx(0.2)


class TestDistance:
    def test_known_value(self):
        assert disc_distance(0, 0.5) == pytest.approx(math.acosh(7 / 6), abs=1e-15)
        # arccosh(7/6) = log((7 + sqrt(13)) / 6)
        assert disc_distance(0, 0.5) == pytest.approx(math.log((7 + math.sqrt(13)) / 6), abs=1e-15)

    def test_zero_on_diagonal(self, rng):
        z = random_disc(rng, 50)
        np.testing.assert_array_equal(disc_distance(z, z), 0.0)

    def test_matches_artanh_form(self, rng):
        z1, z2 = random_disc(rng, 500), random_disc(rng, 500)
        ref = [artanh_distance(a, b) for a, b in zip(z1, z2)]
        np.testing.assert_allclose(disc_distance(z1, z2), ref, rtol=1e-10, atol=1e-12)

    def test_small_separation_accurate(self):
        # log1p form keeps relative accuracy where arccosh(1 + x) cancels
        d = disc_distance(0.3, 0.3 + 1e-9)
        assert d == pytest.approx(artanh_distance(0.3, 0.3 + 1e-9), rel=1e-6)

    def test_symmetry(self, rng):
        a, b = random_disc(rng, 10_000), random_disc(rng, 10_000)
        np.testing.assert_array_equal(disc_distance(a, b), disc_distance(b, a))

    @pytest.mark.xfail(
        strict=True,
        reason="arccosh(1 + |z1-z2|^2 / (2(1-|z1|^2)(1-|z2|^2))) is not a metric: "
        "collinear points near the boundary violate the triangle inequality",
    )
    def test_triangle_inequality(self, rng):
        a, b, c = (random_disc(rng, 10_000) for _ in range(3))
        slack = disc_distance(a, b) + disc_distance(b, c) - disc_distance(a, c)
        assert slack.min() >= -1e-9

    def test_triangle_counterexample(self):
        r = 0.99
        assert disc_distance(-r, 0) + disc_distance(0, r) < disc_distance(-r, r) - 0.5

    def test_domain_error(self):
        with pytest.raises(DomainError):
            disc_distance(0, 1.0)

    @settings(max_examples=200, deadline=None)
    @given(transforms, disc_points, disc_points)
    def test_isometry(self, g, z1, z2):
        assert abs(disc_distance(g(z1), g(z2)) - disc_distance(z1, z2)) <= 1e-9


class TestMultiDisc:
    def test_mean_of_discs(self):
        z = np.array([0.0, 0.2j])
        xi = np.array([0.5, 0.2j])
        assert multidisc_distance(z, xi) == pytest.approx(math.acosh(7 / 6) / 2)

    def test_single_disc_reduces(self):
        assert multidisc_distance([0.1], [0.4j]) == disc_distance(0.1, 0.4j)

    def test_identity(self):
        assert multidisc_distance([0.3, -0.2j, 0.1], [0.3, -0.2j, 0.1]) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            multidisc_distance([0.1, 0.2], [0.1])


class TestMoebius:
    def test_maps_origin_and_mean(self):
        g = MoebiusTransform(0.3 - 0.4j, 0.0)
        assert g(0) == pytest.approx(0.3 - 0.4j)
        assert abs(g(0.3 - 0.4j)) < 1e-16

    def test_formula(self):
        g = MoebiusTransform(0.2 + 0.1j, 1.3)
        z = -0.4 + 0.5j
        ref = cmath.exp(1.3j) * (g.a - z) / (1 - g.a.conjugate() * z)
        assert g(z) == pytest.approx(ref, abs=1e-15)

    def test_involution(self, rng):
        a, z = random_disc(rng, 1000), random_disc(rng, 1000)
        for ai, zi in zip(a, z):
            g = MoebiusTransform(ai, 0.0)
            assert abs(g(g(zi)) - zi) <= 1e-12

    def test_inverse_examples(self):
        g = MoebiusTransform(0.5j, 0.0)
        assert moebius_inverse(g) == g
        rot = moebius_inverse(MoebiusTransform(0, 1.0))
        assert rot.a == 0
        assert rot.theta == pytest.approx(2 * math.pi - 1.0)

    def test_inverse_round_trip(self, rng):
        a, z = random_disc(rng, 1000), random_disc(rng, 1000)
        theta = 2 * math.pi * rng.random(1000)
        err = max(
            abs(moebius_apply(moebius_inverse(MoebiusTransform(ai, t)), moebius_apply(MoebiusTransform(ai, t), zi)) - zi)
            for ai, t, zi in zip(a, theta, z)
        )
        assert err <= 1e-12

    def test_image_stays_in_disc(self, rng):
        g = MoebiusTransform(0.9 + 0.1j, 2.0)
        assert np.abs(g(random_disc(rng, 1000, 0.999))).max() < 1

    def test_composition(self, rng):
        for _ in range(100):
            g1 = MoebiusTransform(complex(random_disc(rng, 1)[0]), rng.random() * 6)
            g2 = MoebiusTransform(complex(random_disc(rng, 1)[0]), rng.random() * 6)
            probes = np.array([0.1, 0.3j, -0.2 - 0.2j])
            refit = moebius_from_points(probes, g1(g2(probes)))
            z = random_disc(rng, 20)
            np.testing.assert_allclose(refit(z), g1(g2(z)), atol=1e-10)
            np.testing.assert_allclose(g1.compose(g2)(z), g1(g2(z)), atol=1e-10)


class TestPoisson:
    def test_examples(self):
        assert poisson_score(0, 1.234) == 1.0
        assert poisson_score(0.5, 0.0) == pytest.approx(3.0, abs=1e-12)
        assert poisson_score(0.5, math.pi) == pytest.approx(1 / 3, abs=1e-12)
        assert poisson_score(0.5j, math.pi / 2) == pytest.approx(3.0, abs=1e-12)

    def test_printed_formula(self, rng):
        z = random_disc(rng, 200)
        psi = 2 * math.pi * rng.random(200)
        r, phi = np.abs(z), np.angle(z)
        ref = (1 - r**2) / (1 - 2 * r * np.cos(psi - phi) + r**2)
        np.testing.assert_allclose(poisson_score(z, psi), ref, rtol=1e-12)

    def test_busemann(self):
        assert busemann_energy(0, 2.0) == 0.0
        assert busemann_energy(0.5, 0.0) == pytest.approx(math.log(3))

    def test_busemann_exp_consistency(self, rng):
        z = random_disc(rng, 500)
        psi = 2 * math.pi * rng.random(500)
        np.testing.assert_allclose(np.exp(busemann_energy(z, psi)), poisson_score(z, psi), rtol=1e-14)

    def test_quadrature_normalization(self, rng):
        psi = 2 * math.pi * np.arange(4096) / 4096
        for z in random_disc(rng, 100, 0.9):
            assert abs(np.mean(poisson_score(z, psi)) - 1.0) <= 1e-6

    def test_monotone_in_angle(self):
        d = np.linspace(0.01, math.pi - 0.01, 200)
        s = poisson_score(0.6, d)
        assert np.all(np.diff(s) < 0)
