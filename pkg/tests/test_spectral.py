import math

import mpmath
import numpy as np
import pytest
from scipy.special import gamma

from bergball.berezin import c_const
from bergball.eigenspace import SpaceParams
from bergball.spectral import (AUDIT_SCALE, constant_audit, gamma_coeffs, i_k_closed, i_k_quad,
                               koornwinder_integral_quad, koornwinder_rhs, lambda_from_laplace,
                               spherical_function, spherical_transform_quad, symbol_3f2, symbol_peetre,
                               symbol_quad, symbol_sample, symbol_wilson, _c_3f2)
from bergball.scalar_kernels import gamma_abs_sq

ORACLE_SETS = [(2, 3.5, 0), (2, 3.5, 1), (2, 3.5, 2), (3, 4.25, 1)]
LAMBDAS = [0.5, 1.0, 2.0, 5.0]


def test_lambda_from_laplace():
    assert lambda_from_laplace(-4 - 9, 2) == pytest.approx(3)
    assert lambda_from_laplace(0.0, 2) == pytest.approx(-2j)


def test_spherical_function_basics():
    assert spherical_function(2, 1.3, np.zeros(2)) == pytest.approx(1)
    z = np.array([0.4, 0.3j])
    for lam in (0.0, 0.7, 2.5):
        assert spherical_function(3, lam, np.append(z, 0.1)) == pytest.approx(
            spherical_function(3, -lam, np.append(z, 0.1)), rel=1e-12)


def test_spherical_function_matches_mpmath():
    n, lam, t = 2, 1.1, 0.49
    a = (1j * lam + n) / 2
    ref = complex((1 - t) ** a * mpmath.hyp2f1(a, a, n, t))
    assert spherical_function(n, lam, np.array([0.7, 0])) == pytest.approx(ref, rel=1e-12)


def test_spherical_transform_at_constant_eigenfunction():
    p = SpaceParams(2, 2.0, 0)
    assert spherical_transform_quad(p, -2j) == pytest.approx(1 / 3, rel=1e-10)
    q = SpaceParams(2, 3.5, 1)
    assert spherical_transform_quad(q, -2j) == pytest.approx(1 / c_const(q), rel=1e-10)


def test_spherical_transform_even_and_positive():
    p = SpaceParams(2, 3.5, 1)
    for lam in LAMBDAS:
        v = spherical_transform_quad(p, lam)
        assert v > 0
        assert spherical_transform_quad(p, -lam) == pytest.approx(v, rel=1e-11)


def test_spherical_transform_error_estimate():
    val, err = spherical_transform_quad(SpaceParams(3, 4.25, 1), 2.0, full_output=True)
    assert err < 1e-10 * abs(val)


@pytest.mark.parametrize("n, nu, m", ORACLE_SETS)
def test_wilson_matches_quadrature(n, nu, m):
    p = SpaceParams(n, nu, m)
    for lam in LAMBDAS:
        assert symbol_wilson(p, lam) == pytest.approx(symbol_quad(p, lam), rel=1e-8)


@pytest.mark.parametrize("n, nu, m", ORACLE_SETS)
def test_symbol_fixes_constants(n, nu, m):
    p = SpaceParams(n, nu, m)
    assert symbol_wilson(p, lambda_from_laplace(0.0, n)) == pytest.approx(1, abs=1e-8)


def test_symbol_even_and_positive():
    p = SpaceParams(2, 3.5, 2)
    for lam in (0.3, 1.7, 4.0):
        v = symbol_wilson(p, lam)
        assert v > 0 and symbol_wilson(p, -lam) == pytest.approx(v, rel=1e-13)


def test_literal_constants_are_doubled():
    p = SpaceParams(2, 3.5, 1)
    for lam in LAMBDAS:
        assert symbol_wilson(p, lam, literal=True) == pytest.approx(2 * symbol_wilson(p, lam), rel=1e-14)


def test_peetre_examples():
    assert symbol_peetre(2.0, 2, 0.0) == pytest.approx(2 / 3, rel=1e-12)
    assert symbol_peetre(3.5, 3, -3j) == pytest.approx(1, rel=1e-12)
    assert symbol_peetre(3.5, 2, 1.2) == pytest.approx(symbol_peetre(3.5, 2, -1.2), rel=1e-14)


def test_m0_triple_agreement():
    for nu in (2.0, 3.5):
        p = SpaceParams(2, nu, 0)
        for lam in (0.0, 1.0, 3.0):
            q, w, pe = symbol_quad(p, lam), symbol_wilson(p, lam), symbol_peetre(nu, 2, lam)
            assert w == pytest.approx(pe, rel=1e-10)
            assert q == pytest.approx(pe, rel=1e-8)


def test_lambda_zero_floor():
    p = SpaceParams(2, 3.5, 1)
    assert symbol_quad(p, 0.0) == pytest.approx(symbol_wilson(p, 0.0), rel=1e-9)


KOORNWINDER = [
    (1.0, 0.0, 3.0, 2.5, 1.2),
    (1.0, 0.0, 5.0, 1.0, 0.7),
    (2.0, 0.5, 4.0, 3.0, 1.5),
    (0.5, 1.5, 2.0, 4.0, 0.3),
    (3.0, -0.5, 1.0, 6.0, 2.5),
    (1.0, 0.0, 6.0, 3.0, 2.0),
]


@pytest.mark.parametrize("alpha, beta, delta, mu, lam", KOORNWINDER)
@pytest.mark.parametrize("k", [0, 1, 2])
def test_koornwinder_closed_form(alpha, beta, delta, mu, lam, k):
    lhs = koornwinder_integral_quad(alpha, beta, delta, mu, k, lam)
    assert lhs == pytest.approx(koornwinder_rhs(alpha, beta, delta, mu, k, lam), rel=1e-7)
    assert koornwinder_rhs(alpha, beta, delta, mu, k, lam, literal=True) == pytest.approx(2 * lhs, rel=1e-7)


def test_koornwinder_against_mpmath_integral():
    alpha, beta, delta, mu, k, lam = 1.0, 0.0, 3.0, 2.5, 0, 1.2
    a1 = (alpha + beta + 1 + 1j * lam) / 2
    a2 = (alpha + beta + 1 - 1j * lam) / 2

    def integrand(t):
        return (mpmath.cosh(t) ** (-alpha + beta - delta - mu - 1) * mpmath.sinh(t) ** (2 * alpha + 1)
                * mpmath.re(mpmath.hyp2f1(a1, a2, alpha + 1, -mpmath.sinh(t) ** 2)))

    ref = float(mpmath.quad(integrand, [0, 1, 4, mpmath.inf]))
    assert koornwinder_integral_quad(alpha, beta, delta, mu, k, lam) == pytest.approx(ref, rel=1e-8)


def test_koornwinder_validity():
    with pytest.raises(ValueError):
        koornwinder_integral_quad(-1.5, 0, 1, 1, 0, 1.0)


def test_i_k_closed():
    p = SpaceParams(2, 3.5, 1)
    B = 2 * (p.nu - p.m)
    lam = 1.0
    literal0 = 2 * p.n * gamma(p.n) / gamma(B) ** 2 * gamma_abs_sq(B - p.n / 2, lam / 2)
    assert i_k_closed(p, 0, lam, literal=True) == pytest.approx(literal0, rel=1e-13)
    for k in range(3):
        assert i_k_closed(p, k, lam) == pytest.approx(i_k_quad(p, k, lam), rel=1e-7)
        assert i_k_closed(p, k, 1.7) == pytest.approx(i_k_closed(p, k, -1.7), rel=1e-14)
    with pytest.raises(ValueError):
        i_k_closed(p, 3, lam)


def test_gamma_coeffs_m0():
    p = SpaceParams(2, 2.0, 0)
    assert gamma_coeffs(p, literal=True) == pytest.approx([1 / 3])
    assert gamma_coeffs(p) == pytest.approx([1 / (gamma(2) * gamma(4))])
    assert len(gamma_coeffs(SpaceParams(2, 3.5, 2))) == 5


def test_3f2_diagnostic_is_finite():
    p = SpaceParams(2, 3.5, 1)
    for j in range(3):
        assert np.isfinite(_c_3f2(p, j))
    val = symbol_3f2(p, 1.0)
    assert np.isfinite(val)
    sample = symbol_sample(p, 1.0)
    assert np.isfinite(sample.rel_gap_quad_f32)


def test_symbol_sample_fields():
    p = SpaceParams(2, 2.0, 0)
    s = symbol_sample(p, 0.5)
    assert s.quad_value > 0
    assert s.peetre_value == pytest.approx(s.quad_value, rel=1e-8)
    assert s.audit_scale == pytest.approx(AUDIT_SCALE, rel=1e-8)
    assert s.rel_gap_quad_wilson < 1e-8
    assert symbol_sample(SpaceParams(2, 3.5, 1), 0.5).peetre_value is None


def test_audit_m0():
    report = constant_audit(SpaceParams(2, 2.0, 0), LAMBDAS)
    assert report.fitted_scale == pytest.approx(0.5, rel=1e-8)
    assert report.audited_residual < 1e-8
    assert report.idempotent_scale == pytest.approx(1, abs=1e-10)
    assert report.normalization_at_constant == pytest.approx(1, abs=1e-8)
    assert report.passed
    text = report.render()
    assert "fitted scale" in text and "status: PASS" in text


def test_audit_chooses_b_by_residual():
    report = constant_audit(SpaceParams(2, 3.5, 1), LAMBDAS)
    assert report.chosen_b == 2.0
    assert report.residuals_by_b[2.0] < 1e-8 < report.residuals_by_b[0.0]
    assert report.gram_diag_dev < 1e-10


def test_audit_needs_four_points():
    with pytest.raises(ValueError):
        constant_audit(SpaceParams(2, 2.0, 0), [0.5, 1.0])
