import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import beta as beta_fn

from bergball.ball_geometry import (GUARD, BallPoint, ball_integrate, bergman_distance, mobius_coords,
                                    mobius_involution, radial_integrate, radial_rule, refine, sphere_rule,
                                    tanh2_distance)
from bergball.errors import DomainError
from bergball.exact_sphere import sphere_monomial_integral
from bergball.spectral import spherical_function


def random_point(n, rng, radius=0.9):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return BallPoint(v / np.linalg.norm(v) * radius * rng.uniform(0.05, 1))


def test_ball_point():
    z = BallPoint.of(0.3, 0.4j)
    assert z.n == 2
    assert abs(z.norm_sq - 0.25) < 1e-15
    with pytest.raises(DomainError):
        BallPoint.of(0.8, 0.6)


def test_distance_examples():
    z = BallPoint.of(0.1 + 0.2j, -0.3)
    assert bergman_distance(z, z) == 0
    assert bergman_distance(BallPoint.of(0, 0), BallPoint.of(0.6, 0)) == pytest.approx(math.log(2), rel=1e-14)


def test_distance_symmetric_and_monotone():
    rng = np.random.default_rng(0)
    for _ in range(10):
        z, w = random_point(3, rng), random_point(3, rng)
        assert bergman_distance(z, w) == pytest.approx(bergman_distance(w, z), rel=1e-12)
    origin = BallPoint.of(0, 0)
    ds = [bergman_distance(origin, BallPoint.of(r, 0)) for r in np.linspace(0.01, 0.99, 50)]
    assert all(b > a for a, b in zip(ds, ds[1:]))


def test_mobius_examples_and_involution():
    rng = np.random.default_rng(1)
    for n in (2, 3):
        a = random_point(n, rng)
        assert np.allclose(mobius_involution(a, BallPoint(np.zeros(n))).coords, a.coords, atol=1e-15)
        assert np.allclose(mobius_involution(a, a).coords, 0, atol=1e-15)
        z = random_point(n, rng)
        back = mobius_involution(a, mobius_involution(a, z))
        assert np.max(np.abs(back.coords - z.coords)) < 1e-13


def test_mobius_is_isometry():
    rng = np.random.default_rng(2)
    for _ in range(10):
        a, z, w = (random_point(2, rng, 0.8) for _ in range(3))
        d0 = bergman_distance(z, w)
        d1 = bergman_distance(mobius_involution(a, z), mobius_involution(a, w))
        assert abs(d1 - d0) <= 1e-12 * max(1.0, d0)


def test_tanh2_distance_from_origin():
    w = BallPoint.of(0.3, 0.4j)
    assert tanh2_distance(BallPoint.of(0, 0), w) == pytest.approx(0.25, rel=1e-15)


def test_mobius_coords_vectorized():
    rng = np.random.default_rng(3)
    a = random_point(2, rng).coords
    pts = np.stack([random_point(2, rng).coords for _ in range(6)]).reshape(2, 3, 2)
    out = mobius_coords(a, pts)
    assert out.shape == pts.shape
    assert np.allclose(out[1, 2], mobius_coords(a, pts[1, 2]))


def test_radial_rule_beta_values():
    rule = radial_rule(2, 1.5, 8)
    assert np.sum(rule.weights) == pytest.approx(1 / 8.75, rel=1e-14)
    assert np.sum(rule.weights * rule.nodes) == pytest.approx(beta_fn(3, 2.5), rel=1e-14)
    assert rule.weight_exponents == (1, 1.5)
    assert np.all(rule.weights > 0)
    assert np.all(rule.nodes <= 1 - GUARD)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.floats(-0.9, 5), st.integers(2, 20))
def test_radial_rule_polynomial_exactness(n, gamma, points):
    rule = radial_rule(n, gamma, points)
    for j in (0, points, 2 * points - 1):
        exact = beta_fn(n + j, gamma + 1)
        assert np.sum(rule.weights * rule.nodes ** j) == pytest.approx(exact, rel=1e-13)


def test_random_polynomial_exactness():
    rng = np.random.default_rng(4)
    points, n, gamma = 10, 3, 0.7
    coeffs = rng.normal(size=2 * points)
    rule = radial_rule(n, gamma, points)
    exact = sum(c * beta_fn(n + j, gamma + 1) for j, c in enumerate(coeffs))
    got = np.sum(rule.weights * np.polynomial.polynomial.polyval(rule.nodes, coeffs))
    assert abs(got - exact) <= 1e-13 * np.sum(np.abs(coeffs))


def test_radial_rule_validation():
    with pytest.raises(ValueError):
        radial_rule(2, -1.0)
    with pytest.raises(ValueError):
        radial_rule(0, 1.0)


def test_adaptive_rule_on_endpoint_singular_integrand():
    rule = radial_rule(2, -0.5, 16, adaptive=True)
    assert np.all(rule.nodes <= 1 - GUARD)
    f = lambda t: np.exp(t) * np.cos(3 * t)
    val, err = radial_integrate(f, rule, tol=1e-12, full_output=True)
    ref = np.sum(radial_rule(2, -0.5, 60).weights * f(radial_rule(2, -0.5, 60).nodes))
    assert abs(val - ref) < 1e-11
    assert err < 1e-10


def test_adaptive_tolerance_halving_within_estimate():
    # spherical functions against the m = 0 symbol weight
    n, nu = 2, 3.5
    for lam in (0.5, 2.0):
        f = np.vectorize(lambda t: spherical_function(n, lam, t).real)
        rule = radial_rule(n, 2 * nu - n - 1, 12, adaptive=True)
        v1, e1 = radial_integrate(f, rule, tol=1e-9, full_output=True)
        v2, _ = radial_integrate(f, rule, tol=5e-10, full_output=True)
        assert abs(v2 - v1) <= max(e1, 1e-15)


def test_refine_doubles_points():
    rule = radial_rule(2, 0.5, 8)
    assert refine(rule).points == 16


def test_ball_integrate_examples():
    rule = radial_rule(2, 0.0, 10)
    assert ball_integrate(lambda t: np.ones_like(t), {((0, 0), (0, 0)): 1}, rule) == pytest.approx(1, rel=1e-14)
    # |z_1|^2 integrates to (1/2) * 2 * B(3, 1) = 1/3
    val = ball_integrate(lambda t: np.ones_like(t), {((1, 0), (1, 0)): 1}, rule)
    assert val == pytest.approx(1 / 3, rel=1e-14)
    # |Phi_00|^2 at n = 2, nu = 2: kappa^2 = 3, weight (1-t)^(2 nu - n - 1)
    rule = radial_rule(2, 1.0, 10)
    assert ball_integrate(lambda t: 3 * np.ones_like(t), {((0, 0), (0, 0)): 1}, rule) == pytest.approx(1, rel=1e-14)


def test_sphere_rule_moments():
    for n in (2, 3):
        sph = sphere_rule(n, 8, 12)
        assert np.sum(sph.weights) == pytest.approx(1, rel=1e-14)
        assert np.allclose(np.linalg.norm(sph.points, axis=1), 1)
        alpha = (2,) + (1,) * (n - 1)
        vals = np.prod(np.abs(sph.points) ** (2 * np.array(alpha)), axis=1)
        assert np.dot(sph.weights, vals) == pytest.approx(float(sphere_monomial_integral(alpha, alpha)), rel=1e-13)
        assert abs(np.dot(sph.weights, sph.points[:, 0] * np.conj(sph.points[:, 1]))) < 1e-15
