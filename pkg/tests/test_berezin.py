import math

import numpy as np
import pytest
from scipy.special import gamma

from bergball.ball_geometry import mobius_coords, radial_rule, sphere_rule
from bergball.berezin import (Observable, berezin_apply, berezin_apply_m0, berezin_kernel, c_const,
                              c_const_m0, kernel_mass, radial_profile)
from bergball.eigenspace import SpaceParams, normalization_factor
from bergball.errors import DomainError
from bergball.orthopoly import jacobi_at_one, jacobi_eval


def bump(w):
    b = np.array([0.2 - 0.1j, 0.3] + [0] * (w.shape[-1] - 2))
    return 1.0 / (1.0 + np.sum(np.abs(w - b) ** 2, axis=-1)) + np.real(w[..., 0] * np.conj(w[..., 1]))


def test_c_const_examples():
    assert c_const(SpaceParams(2, 2.0, 0)) == pytest.approx(3, rel=1e-14)
    assert c_const_m0(2.0, 2) == pytest.approx(3, rel=1e-14)
    for n, nu in ((2, 3.5), (3, 4.25)):
        p = SpaceParams(n, nu, 0)
        assert c_const(p) == pytest.approx(normalization_factor(p), rel=1e-14)


def test_c_const_times_profile_mass_is_one():
    # c * n * int t^(n-1) (1-t)^(beta-1) P_m(1-2t)^2 dt = 1
    p = SpaceParams(2, 3.5, 1)
    rule = radial_rule(p.n, p.beta - 1, 30)
    mass = c_const(p) * p.n * np.sum(rule.weights * jacobi_eval(p.m, p.jacobi, 1 - 2 * rule.nodes) ** 2)
    assert mass == pytest.approx(1, rel=1e-13)


def test_radial_profile_examples():
    p = SpaceParams(2, 3.5, 1)
    assert radial_profile(p, 0.0) == pytest.approx(4, rel=1e-14)
    half = radial_profile(p, 0.5)
    assert half == pytest.approx(0.5 ** (2 * (p.nu - p.m)) * jacobi_eval(1, p.jacobi, 0.0) ** 2, rel=1e-14)
    assert np.all(radial_profile(p, np.linspace(0, 0.999, 200)) >= 0)
    with pytest.raises(DomainError):
        radial_profile(p, 1.0)


def test_berezin_kernel_examples():
    p = SpaceParams(3, 4.25, 1)
    rng = np.random.default_rng(0)
    z = rng.normal(size=3) * 0.2 + 1j * rng.normal(size=3) * 0.2
    w = rng.normal(size=3) * 0.2 + 1j * rng.normal(size=3) * 0.2
    a = rng.normal(size=3) * 0.2 + 1j * rng.normal(size=3) * 0.2
    assert berezin_kernel(p, z, z) == pytest.approx(c_const(p) * jacobi_at_one(p.m, p.n - 1) ** 2, rel=1e-13)
    assert berezin_kernel(p, z, w) == pytest.approx(berezin_kernel(p, w, z), rel=1e-12)
    moved = berezin_kernel(p, mobius_coords(a, z), mobius_coords(a, w))
    assert moved == pytest.approx(berezin_kernel(p, z, w), rel=1e-12)


def test_apply_constant_and_positivity():
    p = SpaceParams(2, 3.5, 1)
    one = lambda w: np.ones(w.shape[:-1])
    for z in (np.zeros(2), np.array([0.3, 0]), np.array([0, 0.5])):
        assert berezin_apply(p, one, z) == pytest.approx(1, abs=1e-8)
        assert berezin_apply(p, lambda w: np.abs(w[..., 0]) ** 2, z) >= 0


def test_apply_error_estimate():
    p = SpaceParams(2, 3.5, 1)
    val, err = berezin_apply(p, bump, np.array([0.1, 0.2j]), full_output=True)
    assert np.isfinite(val) and err < 1e-6


def test_contraction():
    p = SpaceParams(2, 3.5, 1)
    family = [lambda w, k=k: np.cos(k * np.real(w[..., 0]) + np.imag(w[..., 1])) for k in (1, 3, 5)]
    for phi in family:
        for z in (np.zeros(2), np.array([0.4, 0.2j])):
            assert abs(berezin_apply(p, phi, z)) <= 1 + 1e-12


def test_m0_form_matches_general_form():
    p = SpaceParams(2, 3.5, 0)
    z = np.array([0.2, -0.3j])
    assert berezin_apply_m0(3.5, 2, bump, z) == pytest.approx(berezin_apply(p, bump, z), rel=1e-12)
    assert berezin_apply_m0(3.5, 2, lambda w: np.ones(w.shape[:-1]), z) == pytest.approx(1, abs=1e-12)
    with pytest.raises(DomainError):
        berezin_apply_m0(1.0, 2, bump, z)


def test_m0_radial_beta_oracle():
    # B[1 - |w|^2](0) = c n B(n, 2 nu - n + 1) at m = 0
    nu, n = 3.5, 2
    val = berezin_apply_m0(nu, n, lambda w: 1 - np.sum(np.abs(w) ** 2, axis=-1), np.zeros(n))
    beta = gamma(n) * gamma(2 * nu - n + 1) / gamma(2 * nu + 1)
    assert val == pytest.approx(c_const_m0(nu, n) * n * beta, rel=1e-8)


def test_radial_reduction_at_origin():
    p = SpaceParams(3, 4.25, 1)
    f = lambda t: np.exp(-2 * t) * np.cos(t)
    val = berezin_apply(p, lambda w: f(np.sum(np.abs(w) ** 2, axis=-1)), np.zeros(3))
    rule = radial_rule(p.n, p.beta - 1, 40)
    ref = c_const(p) * p.n * np.sum(rule.weights * jacobi_eval(p.m, p.jacobi, 1 - 2 * rule.nodes) ** 2
                                    * f(rule.nodes))
    assert val == pytest.approx(ref, rel=1e-10)


def test_equivariance():
    p = SpaceParams(2, 3.5, 1)
    rng = np.random.default_rng(1)
    z = np.array([0.1 + 0.2j, -0.3])
    for _ in range(3):
        a = rng.normal(size=2) + 1j * rng.normal(size=2)
        a *= 0.4 / np.linalg.norm(a)
        left = berezin_apply(p, lambda w: bump(mobius_coords(a, w)), z)
        right = berezin_apply(p, bump, mobius_coords(a, z))
        assert abs(left - right) < 1e-6


def test_kernel_mass():
    p = SpaceParams(2, 3.5, 1)
    for z in (np.zeros(2), np.array([0.3, 0]), np.array([0, 0.5])):
        assert kernel_mass(p, z) == pytest.approx(1, abs=1e-8)


def test_observable_hints():
    p = SpaceParams(2, 3.5, 1)
    obs = Observable(bump, "polynomial")
    assert berezin_apply(p, obs, np.zeros(2)) == pytest.approx(berezin_apply(p, bump, np.zeros(2)))
    with pytest.raises(DomainError):
        berezin_apply(p, Observable(bump, "unbounded"), np.zeros(2))
    with pytest.raises(ValueError):
        Observable(bump, "wild")


def test_apply_rejects_wrong_rule_and_outside_point():
    p = SpaceParams(2, 3.5, 1)
    with pytest.raises(ValueError):
        berezin_apply(p, bump, np.zeros(2), rule=radial_rule(2, 0.0, 10))
    with pytest.raises(DomainError):
        berezin_apply(p, bump, np.array([1.0, 0]))


def test_custom_sphere_rule():
    p = SpaceParams(2, 3.5, 1)
    z = np.array([0.3, 0.1])
    coarse = berezin_apply(p, bump, z, sphere=sphere_rule(2, 6, 10))
    fine = berezin_apply(p, bump, z, sphere=sphere_rule(2, 14, 28))
    assert abs(coarse - fine) < 1e-5
