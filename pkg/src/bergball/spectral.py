"""Spectral symbol of the Berezin transform as a function of the Laplacian.

The radial quadrature of the spherical transform of the Berezin profile is
the reference value; the Wilson-polynomial closed form, the Peetre m = 0 form
and the older 3F2 form are all compared against it.

Spectral parameter convention: Delta phi_lambda = -(lambda^2 + n^2) phi_lambda,
so a Laplace eigenvalue delta corresponds to lambda^2 = -delta - n^2 and the
constant function (delta = 0) to lambda = -i n.

Constant audit. Direct evaluation of Koornwinder's integral shows that the
closed form of :func:`koornwinder_rhs` with ``literal=True`` is exactly twice
the integral; the default (audited) right side carries the factor 1/2. With
the Jacobi family P_k^{(n-1, 2(nu-m))} produced by the linearization, the
Koornwinder parameters are delta = 2(nu-m), mu' = 2(nu-m)-n-1, which puts the
Wilson parameters at (2(nu-m)-n/2, 1+n/2, n/2, n/2). :func:`constant_audit`
re-derives the scale and the choice of b from the quadrature alone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln, loggamma

from .ball_geometry import _coords, radial_integrate, radial_rule
from .berezin import c_const
from .eigenspace import SpaceParams, gram_matrix
from .errors import AuditError, DegenerateParameterError, DivergenceError, ConvergenceError
from .orthopoly import JacobiParams, WilsonParams, jacobi_eval, linearization_coeffs, wilson_eval
from .scalar_kernels import gamma_pair, gauss_2f1, hyp_3f2_unit, richardson_at_zero

__all__ = [
    "SymbolSample",
    "AuditReport",
    "AUDIT_SCALE",
    "spherical_function",
    "spherical_transform_quad",
    "koornwinder_integral_quad",
    "koornwinder_rhs",
    "i_k_quad",
    "i_k_closed",
    "gamma_coeffs",
    "wilson_params",
    "symbol_wilson",
    "symbol_peetre",
    "symbol_3f2",
    "symbol_quad",
    "lambda_from_laplace",
    "symbol_sample",
    "constant_audit",
]

AUDIT_SCALE = 0.5
QUAD_TOL = 1e-12
QUAD_POINTS = 16


def lambda_from_laplace(delta: float, n: int) -> complex:
    """Spectral parameter for a Laplace eigenvalue: lambda^2 = -delta - n^2.

    Real for delta <= -n^2; on (-n^2, 0] it is -i sqrt(delta + n^2), so the
    constant function maps to -i n.
    """
    s = -delta - n * n
    if s >= 0:
        return complex(math.sqrt(s))
    return complex(0.0, -math.sqrt(-s))


def _with_degeneracy_fallback(fn, lam: complex, eps: float = 1e-6):
    """fn(lam), or a symmetric Richardson estimate when the 2F1 connection
    formula hits an integer parameter difference (lambda = 0 among others)."""
    try:
        return fn(lam)
    except DegenerateParameterError:
        return richardson_at_zero(lambda d: fn(lam + d), eps)


# --------------------------------------------------------------- spherical

def spherical_function(n: int, lam: complex, z) -> complex:
    """phi_lambda(z) = (1-|z|^2)^{(i lambda+n)/2} 2F1(a, a; n; |z|^2), a = (i lambda+n)/2.

    Evaluated in the Pfaff form 2F1((n+i lambda)/2, (n-i lambda)/2; n; t/(t-1)).
    For real lambda the value is real; an imaginary part above 1e-12 raises.
    """
    t = float(np.sum(np.abs(_coords(z)) ** 2)) if not np.isscalar(z) else float(z)
    if not 0 <= t < 1:
        raise ValueError("point outside the ball")
    lam = complex(lam)

    def fn(l):
        return complex(gauss_2f1((n + 1j * l) / 2, (n - 1j * l) / 2, n, t / (t - 1)))

    val = _with_degeneracy_fallback(fn, lam)
    if lam.imag == 0:
        if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
            raise ArithmeticError(f"spherical function not real: {val}")
        return complex(val.real)
    return val


def _hyp_radial(t_exp: float, w_exp: float, poly, a: complex, b: complex, c: float,
                tol: float = QUAD_TOL, full_output: bool = False):
    """int_0^1 t^t_exp (1-t)^w_exp poly(t) 2F1(a, b; c; t/(t-1)) dt.

    The 2F1 decays like (1-t)^min(Re a, Re b) at t = 1; that power is moved into
    the weight so the adaptive rule sees a bounded, slowly oscillating integrand.
    """
    decay = min(a.real, b.real)
    rule = radial_rule(t_exp + 1, w_exp + decay, QUAD_POINTS, adaptive=True)

    def f(t):
        x = t / (t - 1)
        return poly(t) * np.exp(-decay * np.log1p(-t)) * gauss_2f1(a, b, c, x)

    return radial_integrate(f, rule, tol=tol, full_output=full_output)


def spherical_transform_quad(params: SpaceParams, lam: complex, tol: float = QUAD_TOL,
                             full_output: bool = False):
    """Spherical transform of h(xi) = (1-|xi|^2)^{2(nu-m)} P_m(1-2|xi|^2)^2:

    n int_0^1 t^(n-1) (1-t)^(beta-1) P_m^{(n-1,beta)}(1-2t)^2
      2F1((n+i lambda)/2, (n-i lambda)/2; n; t/(t-1)) dt,  beta = 2(nu-m)-n.
    """
    n, m = params.n, params.m
    jp = params.jacobi
    poly = lambda t: jacobi_eval(m, jp, 1 - 2 * t) ** 2

    def fn(l):
        a, b = (n + 1j * l) / 2, (n - 1j * l) / 2
        v, e = _hyp_radial(n - 1, params.beta - 1, poly, a, b, n, tol, True)
        return complex(n * v), n * e

    lam = complex(lam)
    try:
        val, err = fn(lam)
    except DegenerateParameterError:
        val = richardson_at_zero(lambda d: fn(lam + d)[0])
        err = 1e-9 * abs(val)
    val = val.real if lam.imag == 0 or lam.real == 0 else val
    return (val, err) if full_output else val


def symbol_quad(params: SpaceParams, lam: complex, tol: float = QUAD_TOL):
    """c * (spherical transform by quadrature): the reference symbol value."""
    return c_const(params) * spherical_transform_quad(params, lam, tol)


def i_k_quad(params: SpaceParams, k: int, lam: complex, tol: float = QUAD_TOL):
    """n int t^(n-1) (1-t)^(beta-1) P_k^{(n-1, 2(nu-m))}(1-2t) 2F1(...; t/(t-1)) dt."""
    n = params.n
    jp = JacobiParams(n - 1, 2 * (params.nu - params.m))
    poly = lambda t: jacobi_eval(k, jp, 1 - 2 * t)
    fn = lambda l: complex(n * _hyp_radial(n - 1, params.beta - 1, poly,
                                           (n + 1j * l) / 2, (n - 1j * l) / 2, n, tol))
    val = _with_degeneracy_fallback(fn, complex(lam))
    return val.real if complex(lam).imag == 0 else val


# --------------------------------------------------------------- Koornwinder

def koornwinder_integral_quad(alpha: float, beta: float, delta: float, mu_prime: float,
                              k: int, lam: float, tol: float = QUAD_TOL) -> float:
    """int_0^inf cosh^{-alpha+beta-delta-mu'-1} t sinh^{2 alpha+1} t P_k^{(alpha,delta)}(1-2 tanh^2 t)
    2F1((alpha+beta+1+i lambda)/2, (alpha+beta+1-i lambda)/2; alpha+1; -sinh^2 t) dt.

    With u = tanh^2 t it becomes
    1/2 int_0^1 u^alpha (1-u)^g P_k^{(alpha,delta)}(1-2u) 2F1(...; u/(u-1)) du,
    g = (delta + mu' - alpha - beta - 2)/2.
    """
    if not (alpha > -1 and delta > -1 and delta + mu_prime > -1):
        raise ValueError("parameters outside alpha, delta > -1, delta + mu' > -1")
    g = (delta + mu_prime - alpha - beta - 2) / 2
    jp = JacobiParams(alpha, delta)
    poly = lambda u: jacobi_eval(k, jp, 1 - 2 * u)
    fn = lambda l: complex(0.5 * _hyp_radial(alpha, g, poly, (alpha + beta + 1 + 1j * l) / 2,
                                             (alpha + beta + 1 - 1j * l) / 2, alpha + 1, tol))
    return _with_degeneracy_fallback(fn, complex(lam)).real


def koornwinder_rhs(alpha: float, beta: float, delta: float, mu_prime: float,
                    k: int, lam: complex, literal: bool = False) -> float:
    """Gamma x Wilson closed form of the Koornwinder integral.

    ``literal=True`` gives the usual normalization of the identity, which is twice
    the integral; the default includes the factor 1/2.
    """
    s = delta + mu_prime + 1
    num = math.gamma(alpha + 1) * (-1) ** k * gamma_pair(s / 2, complex(lam) / 2)
    den = (math.factorial(k) * math.gamma((alpha + beta + delta + mu_prime + 2) / 2 + k)
           * math.gamma((alpha - beta + delta + mu_prime + 2) / 2 + k))
    wp = WilsonParams(s / 2, (delta - mu_prime + 1) / 2, (alpha + beta + 1) / 2, (alpha - beta + 1) / 2)
    val = num / den * wilson_eval(k, _t_of(lam), wp)
    val = val if literal else AUDIT_SCALE * val
    return _real_if_close(val)


def _t_of(lam) -> float | complex:
    t = complex(lam) ** 2 / 4
    return t.real if abs(t.imag) <= 1e-15 * max(1.0, abs(t)) else t


def _real_if_close(v):
    v = complex(v)
    return v.real if abs(v.imag) <= 1e-13 * max(1.0, abs(v)) else v


# --------------------------------------------------------------- Wilson form

def wilson_params(params: SpaceParams, b: float | None = None) -> WilsonParams:
    """(2(nu-m) - n/2, b, n/2, n/2); b defaults to 1 + n/2."""
    n = params.n
    b = 1 + n / 2 if b is None else b
    return WilsonParams(2 * (params.nu - params.m) - n / 2, b, n / 2, n / 2)


def i_k_closed(params: SpaceParams, k: int, lam: complex, literal: bool = False,
               b: float | None = None):
    """Closed form of :func:`i_k_quad`:

    n Gamma(n) (-1)^k / (k! Gamma^2(2(nu-m)+k)) |Gamma(2(nu-m) - n/2 + i lambda/2)|^2 W_k(lambda^2/4).

    ``literal=True`` doubles it (2n in place of n), reproducing the classical
    normalization of the Koornwinder closed form.
    """
    if not 0 <= k <= 2 * params.m:
        raise ValueError("k must lie in 0..2m")
    n, B = params.n, 2 * (params.nu - params.m)
    wp = wilson_params(params, b)
    pref = n * math.gamma(n) * (-1) ** k * math.exp(-gammaln(k + 1) - 2 * gammaln(B + k))
    val = pref * gamma_pair(wp.a, complex(lam) / 2) * wilson_eval(k, _t_of(lam), wp)
    return _real_if_close(val if not literal else 2 * val)


def gamma_coeffs(params: SpaceParams, literal: bool = False) -> list[float]:
    """gamma_k = c * A_k * n! (-1)^k / (k! Gamma^2(2(nu-m)+k)), k = 0..2m.

    ``literal=True`` returns twice these values (the classical normalization).
    """
    n, B = params.n, 2 * (params.nu - params.m)
    c = c_const(params)
    A = linearization_coeffs(params)
    scale = 1.0 if literal else AUDIT_SCALE
    return [scale * 2 * c * A[k] * math.factorial(n) * (-1) ** k
            * math.exp(-gammaln(k + 1) - 2 * gammaln(B + k)) for k in range(2 * params.m + 1)]


def symbol_wilson(params: SpaceParams, lam: complex, literal: bool = False,
                  b: float | None = None):
    """|Gamma(2(nu-m) - n/2 + i lambda/2)|^2 sum_k gamma_k W_k(lambda^2/4; a, b, n/2, n/2).

    Complex ``lam`` uses the continuation Gamma(x+iy)Gamma(x-iy) and the
    polynomial W_k at negative argument.
    """
    wp = wilson_params(params, b)
    t = _t_of(lam)
    coeffs = gamma_coeffs(params, literal)
    parts = [g * wilson_eval(k, t, wp) for k, g in enumerate(coeffs)]
    total = complex(sum(parts)) if any(isinstance(p, complex) for p in parts) else math.fsum(parts)
    return _real_if_close(gamma_pair(wp.a, complex(lam) / 2) * total)


def symbol_peetre(nu: float, n: int, lam: complex):
    """|Gamma(alpha + 1 + n/2 + i lambda/2)|^2 / (Gamma(alpha+1) Gamma(alpha+n+1)), alpha = 2 nu - n - 1."""
    if not 2 * nu > n:
        raise ValueError("need 2 nu > n")
    al = 2 * nu - n - 1
    return _real_if_close(gamma_pair(al + 1 + n / 2, complex(lam) / 2)
                          * math.exp(-gammaln(al + 1) - gammaln(al + n + 1)))


def _c_3f2(params: SpaceParams, j: int) -> float:
    nu, n, m = params.nu, params.n, params.m
    lead = (params.beta * math.gamma(n + m) * (-1) ** j * math.gamma(n + j)
            / (math.factorial(m) * math.gamma(2 * nu - n - m + 1) * math.gamma(2 * nu - n)))
    inner = 0.0
    for p in range(max(0, j - m), min(m, j) + 1):
        inner += (math.factorial(m) ** 2 * math.gamma(2 * nu - m) * math.gamma(2 * nu - m + j - p)
                  / (math.factorial(j - p) * math.factorial(m + p - j) * math.factorial(p)
                     * math.factorial(m - p) * math.gamma(n + j - p) * math.gamma(n + p)))
    return lead * inner


def symbol_3f2(params: SpaceParams, lam: complex, doubled: bool = False) -> complex:
    """The older 3F2 expression, for comparison only.

    sum_j C_j Gamma(2(nu-m) - (n - i lambda)/2) / Gamma(2(nu-m) + j + A)
      3F2(A, n+j, A; (nu-m) + j + A, n; 1),  A = (n + i lambda)/2.

    ``doubled=True`` uses 2(nu-m) in the first lower parameter. The value is
    complex in general; callers record it, never assert it.
    """
    n, B = params.n, 2 * (params.nu - params.m)
    A = (n + 1j * complex(lam)) / 2
    shift = B if doubled else B / 2
    total = 0j
    for j in range(2 * params.m + 1):
        g = np.exp(loggamma(B - (n - 1j * complex(lam)) / 2) - loggamma(B + j + A))
        total += _c_3f2(params, j) * g * hyp_3f2_unit(A, n + j, A, shift + j + A, n)
    return complex(total)


# --------------------------------------------------------------- records

@dataclass(frozen=True)
class SymbolSample:
    """One spectral parameter: reference, closed forms and their gaps."""

    lam: complex
    quad_value: float
    wilson_value: float
    peetre_value: float | None = None
    f32_value: complex | None = None
    audit_scale: float = float("nan")

    @property
    def rel_gap_quad_wilson(self) -> float:
        return abs(self.wilson_value - self.quad_value) / abs(self.quad_value)

    @property
    def rel_gap_quad_f32(self) -> float:
        if self.f32_value is None:
            return float("nan")
        return abs(self.f32_value - self.quad_value) / abs(self.quad_value)


def symbol_sample(params: SpaceParams, lam: float, literal: bool = False,
                  with_f32: bool = True) -> SymbolSample:
    q = symbol_quad(params, lam)
    w = symbol_wilson(params, lam, literal=literal)
    w_lit = w if literal else symbol_wilson(params, lam, literal=True)
    p = symbol_peetre(params.nu, params.n, lam) if params.m == 0 else None
    f = None
    if with_f32:
        try:
            f = symbol_3f2(params, lam)
        except (DivergenceError, ConvergenceError):
            f = complex("nan")
    return SymbolSample(lam, q, w, p, f, q / w_lit)


@dataclass
class AuditReport:
    """Outcome of :func:`constant_audit`; ``render`` gives the text report."""

    params: SpaceParams
    lambdas: list
    quad: list
    fitted_scale: float
    chosen_b: float
    residuals_by_b: dict
    audited_residual: float
    idempotent_scale: float
    gamma_literal: list
    gamma_audited: list
    f32_gaps: list = field(default_factory=list)
    f32_doubled_gaps: list = field(default_factory=list)
    gram_diag_dev: float = float("nan")
    normalization_at_constant: float = float("nan")

    @property
    def passed(self) -> bool:
        return self.audited_residual <= 1e-8

    def render(self) -> str:
        p = self.params
        g = lambda x: f"{x:.17g}"
        lines = [
            f"constant audit for n={p.n} nu={g(p.nu)} m={p.m}",
            f"lambda grid: {' '.join(g(float(np.real(l))) for l in self.lambdas)}",
            f"fitted scale s (literal Wilson vs quadrature): {g(self.fitted_scale)}",
            f"audit scale in use: {g(AUDIT_SCALE)}",
        ]
        for b, r in sorted(self.residuals_by_b.items()):
            lines.append(f"candidate b={g(b)}: post-fit max relative residual {r:.3e}")
        lines += [
            f"chosen b: {g(self.chosen_b)}",
            f"audited max relative residual: {self.audited_residual:.3e}",
            f"refit on audited constants: s = {g(self.idempotent_scale)}",
            f"audited symbol at the constant eigenfunction: {g(self.normalization_at_constant)}",
            f"kappa Gram diagonal max deviation (p <= 3): {self.gram_diag_dev:.3e}",
            "k, gamma_k literal, gamma_k audited",
        ]
        for k, (a, b) in enumerate(zip(self.gamma_literal, self.gamma_audited)):
            lines.append(f"  {k}, {g(a)}, {g(b)}")
        if self.f32_gaps:
            lines.append("lambda, 3F2 rel gap (literal), 3F2 rel gap (2(nu-m) variant)")
            for lam, a, b in zip(self.lambdas, self.f32_gaps, self.f32_doubled_gaps):
                lines.append(f"  {g(float(np.real(lam)))}, {a:.6e}, {b:.6e}")
        lines.append("status: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def _fit_scale(model: Sequence[float], target: Sequence[float]) -> float:
    x, y = np.asarray(model, float), np.asarray(target, float)
    return float(np.dot(x, y) / np.dot(x, x))


def _max_rel(model, target) -> float:
    x, y = np.asarray(model, float), np.asarray(target, float)
    return float(np.max(np.abs(x - y) / np.abs(y)))


def constant_audit(params: SpaceParams, lambda_grid: Sequence[float],
                   with_f32: bool = True, gram_p_max: int = 3) -> AuditReport:
    """Fit the literal Wilson form to the quadrature symbol.

    A single scale s minimizes sum (s * wilson_literal - c * quad)^2 for each
    candidate Wilson parameter b in {1 + n/2, 1 - n/2}; the smaller post-fit
    residual wins (ties go to 1 + n/2, as happens at m = 0 where W_0 = 1).
    """
    lams = [float(l) for l in lambda_grid]
    if len(lams) < 4:
        raise ValueError("the audit needs at least 4 grid points")
    n = params.n
    quad = [symbol_quad(params, l) for l in lams]
    residuals, scales = {}, {}
    for b in (1 + n / 2, 1 - n / 2):
        lit = [symbol_wilson(params, l, literal=True, b=b) for l in lams]
        s = _fit_scale(lit, quad)
        scales[b] = s
        residuals[b] = _max_rel([s * v for v in lit], quad)
    best = 1 + n / 2 if residuals[1 + n / 2] <= residuals[1 - n / 2] + 1e-14 else 1 - n / 2
    if residuals[best] > 1e-6:
        raise AuditError(f"no Wilson parameterization fits the quadrature (best residual {residuals[best]:.3e})")
    audited = [symbol_wilson(params, l, b=best) for l in lams]
    report = AuditReport(
        params=params,
        lambdas=lams,
        quad=quad,
        fitted_scale=scales[best],
        chosen_b=best,
        residuals_by_b=residuals,
        audited_residual=_max_rel(audited, quad),
        idempotent_scale=_fit_scale(audited, quad),
        gamma_literal=gamma_coeffs(params, literal=True),
        gamma_audited=gamma_coeffs(params),
        normalization_at_constant=float(np.real(symbol_wilson(params, -1j * n, b=best))),
    )
    if with_f32:
        for l, q in zip(lams, quad):
            for doubled, sink in ((False, report.f32_gaps), (True, report.f32_doubled_gaps)):
                try:
                    sink.append(abs(symbol_3f2(params, l, doubled) - q) / abs(q))
                except (DivergenceError, ConvergenceError):
                    sink.append(float("nan"))
    if gram_p_max >= 0:
        gram, _ = gram_matrix(params, gram_p_max)
        report.gram_diag_dev = float(np.max(np.abs(np.diag(gram) - 1)))
    return report
