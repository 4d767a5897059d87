"""Acceptance checks shared by the ``verify`` command and the test suite.

Each check returns a :class:`Check` with a pass flag, the worst measured
deviation and the tolerance it was held to.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .ball_geometry import BallPoint, mobius_coords
from .berezin import berezin_apply, kernel_mass
from .eigenspace import (BasisIndex, SpaceParams, apply_H_fd, apply_laplacian_fd, cs_overlap_abs2,
                         eigenvalue, gram_matrix, kernel_closed, kernel_truncated,
                         normalization_factor, overlap_from_tanh2, phi_eval)
from .errors import AdmissibilityError
from .exact_sphere import addition_kernel_check, build_harmonic_basis, harmonic_dimension
from .orthopoly import chebyshev_points, linearization_coeffs, linearization_oracle, linearization_residual
from .spectral import (constant_audit, koornwinder_integral_quad, koornwinder_rhs, spherical_function,
                       symbol_3f2, symbol_peetre, symbol_quad, symbol_wilson)

__all__ = ["Check", "CHECKS", "run_checks", "LAMBDA_GRID", "SYMBOL_PARAMS",
           "KOORNWINDER_SETS", "smooth_observable", "random_ball_points"]

LAMBDA_GRID = (0.5, 1.0, 2.0, 5.0)
SYMBOL_PARAMS = ((2, 3.5, 0), (2, 3.5, 1), (2, 3.5, 2), (3, 4.25, 1))
# (alpha, beta, delta, mu'), all with alpha, delta > -1 and delta + mu' > -1
KOORNWINDER_SETS = (
    (1.0, 0.0, 3.0, 2.5),
    (1.0, 0.0, 5.0, 1.0),
    (2.0, 0.5, 4.0, 3.0),
    (0.5, 1.5, 2.0, 4.0),
    (3.0, -0.5, 1.0, 6.0),
    (1.0, 0.0, 6.0, 3.0),
)
KOORNWINDER_LAMBDAS = (1.2, 0.7, 1.5, 0.3, 2.5, 2.0)


@dataclass
class Check:
    name: str
    passed: bool
    worst: float
    tol: float
    detail: str = ""
    warnings: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: worst {self.worst:.3e} (tol {self.tol:.0e}) {self.detail}".rstrip()


def random_ball_points(n: int, count: int, radius: float, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        out.append(v / np.linalg.norm(v) * radius * rng.uniform(0.2, 1.0))
    return out


def smooth_observable(w: np.ndarray) -> np.ndarray:
    """A bounded smooth test function on the ball."""
    b = np.zeros(w.shape[-1], dtype=complex)
    b[0] = 0.2 - 0.1j
    if w.shape[-1] > 1:
        b[1] = 0.3
    val = 1.0 / (1.0 + np.sum(np.abs(w - b) ** 2, axis=-1))
    if w.shape[-1] > 1:
        val = val + np.real(w[..., 0] * np.conj(w[..., 1]))
    return val


def _rel(a, b) -> float:
    return abs(a - b) / abs(b)


# ------------------------------------------------------------------ checks

def check_symbol(param_sets=SYMBOL_PARAMS, lambdas=LAMBDA_GRID, literal: bool = False) -> Check:
    worst, tol = 0.0, 1e-8
    for n, nu, m in param_sets:
        p = SpaceParams(n, nu, m)
        for lam in lambdas:
            worst = max(worst, _rel(symbol_wilson(p, lam, literal=literal), symbol_quad(p, lam)))
    return Check("symbol: Wilson form vs quadrature", worst <= tol, worst, tol,
                 f"{len(param_sets)} parameter sets x {len(lambdas)} lambdas")


def check_peetre(nus=(3.5, 2.0), n: int = 2, lambdas=LAMBDA_GRID) -> Check:
    worst = 0.0
    for nu in nus:
        p = SpaceParams(n, nu, 0)
        for lam in lambdas:
            q, w, pe = symbol_quad(p, lam), symbol_wilson(p, lam), symbol_peetre(nu, n, lam)
            worst = max(worst, _rel(w, q), _rel(pe, q), _rel(w, pe))
    exact = abs(symbol_peetre(2, 2, 0) - 2 / 3)
    ok = worst <= 1e-8 and exact <= 1e-12
    return Check("m=0: quadrature, Wilson and Peetre forms agree", ok, worst, 1e-8,
                 f"Peetre(n=2, nu=2, 0) - 2/3 = {exact:.1e}")


def check_koornwinder(sets=KOORNWINDER_SETS, ks=(0, 1, 2)) -> Check:
    worst, tol = 0.0, 1e-7
    literal_ratio = []
    for (al, be, de, mu), lam in zip(sets, KOORNWINDER_LAMBDAS):
        for k in ks:
            lhs = koornwinder_integral_quad(al, be, de, mu, k, lam)
            worst = max(worst, _rel(lhs, koornwinder_rhs(al, be, de, mu, k, lam)))
            literal_ratio.append(koornwinder_rhs(al, be, de, mu, k, lam, literal=True) / lhs)
    return Check("Koornwinder integral vs Gamma x Wilson closed form", worst <= tol, worst, tol,
                 f"literal/quadrature ratio in [{min(literal_ratio):.12g}, {max(literal_ratio):.12g}]")


def admissible_grid(n_max: int = 4, nu_max: float = 6.0, m_max: int = 2, step: Fraction = Fraction(1, 4)):
    for n in range(2, n_max + 1):
        nu = Fraction(n, 2) + step
        while nu <= nu_max:
            for m in range(m_max + 1):
                try:
                    yield SpaceParams(n, nu, m)
                except AdmissibilityError:
                    pass
            nu += step


def check_linearization() -> Check:
    worst, mismatches, count = 0.0, 0, 0
    samples = chebyshev_points(15)
    for p in admissible_grid():
        fp = SpaceParams(p.n, float(p.nu), p.m)
        worst = max(worst, linearization_residual(fp, samples))
        if linearization_coeffs(p, exact=True) != linearization_oracle(p):
            mismatches += 1
        count += 1
    ok = worst <= 1e-10 and mismatches == 0
    return Check("linearization identity", ok, worst, 1e-10,
                 f"{count} parameter sets; exact coefficient mismatches: {mismatches}")


def check_orthonormality(p_max: int = 3) -> Check:
    off, diag = 0.0, 0.0
    for n in (2, 3):
        for nu in (3.5, 4.25):
            for m in (0, 1, 2):
                try:
                    p = SpaceParams(n, nu, m)
                except AdmissibilityError:
                    continue
                g, _ = gram_matrix(p, p_max)
                d = np.diag(np.diag(g))
                off = max(off, float(np.max(np.abs(g - d))))
                diag = max(diag, float(np.max(np.abs(np.diag(g) - 1))))
    ok = off <= 1e-10 and diag <= 1e-10
    return Check("orthonormality of the Phi basis", ok, max(off, diag), 1e-10,
                 f"off-diagonal {off:.1e}, diagonal {diag:.1e}")


def check_kernel(param_sets=((2, 3.5, 1), (3, 4.25, 1)), p_max: int = 40) -> Check:
    worst, var = 0.0, 0.0
    for n, nu, m in param_sets:
        p = SpaceParams(n, nu, m)
        zs = random_ball_points(n, 10, 0.6, seed=11)
        ws = random_ball_points(n, 10, 0.6, seed=12)
        for z, w in zip(zs, ws):
            closed = kernel_closed(p, z, w)
            worst = max(worst, abs(kernel_truncated(p, z, w, p_max) - closed) / abs(closed))
        diag = [kernel_closed(p, z, z).real for z in random_ball_points(n, 20, 0.95, seed=13)]
        N = normalization_factor(p)
        var = max(var, (max(diag) - min(diag)) / N, max(abs(d - N) for d in diag) / N)
    ok = worst <= 1e-8 and var <= 1e-11
    return Check("reproducing kernel: truncated sum vs closed form", ok, worst, 1e-8,
                 f"diagonal relative variation {var:.1e}")


def check_identity_resolution(params=(2, 3.5, 1)) -> Check:
    p = SpaceParams(*params)
    formula_exact = overlap_from_tanh2(p, 0.0) == 1.0
    pts = random_ball_points(p.n, 20, 0.9, seed=21)
    numeric = max(abs(cs_overlap_abs2(p, z, z) - 1) for z in pts)
    bases = [np.zeros(p.n, complex), np.eye(p.n)[0] * 0.3, np.eye(p.n)[1 % p.n] * 0.5]
    one = lambda w: np.ones(w.shape[:-1])
    b1 = max(abs(berezin_apply(p, one, z) - 1) for z in bases)
    mass = max(abs(kernel_mass(p, z) - 1) for z in bases)
    ok = formula_exact and numeric <= 1e-12 and b1 <= 1e-8 and mass <= 1e-8
    return Check("normalization: overlap(z,z) = 1, B[1] = 1, kernel mass 1", ok, max(b1, mass), 1e-8,
                 f"formula exact: {formula_exact}; overlap numeric {numeric:.1e}; "
                 f"B[1] {b1:.1e}; mass {mass:.1e}")


def check_eigen(params=(2, 3.5, 1), lambdas=(0.7, 1.3)) -> Check:
    p = SpaceParams(*params)
    z = BallPoint.of(*([0.2, 0.1 + 0.05j] + [0.05] * (p.n - 2)))
    eps = eigenvalue(p)
    worst = 0.0
    for q in range(p.m + 1):
        for pp in range(3):
            for j in sorted({1, harmonic_dimension(p.n, pp, q)}):
                f = lambda x, i=BasisIndex(pp, q, j): phi_eval(p, i, x)
                worst = max(worst, _rel(apply_H_fd(p.nu, f, z), eps * f(z)))
    for lam in lambdas:
        f = lambda x, l=lam: spherical_function(p.n, l, x)
        worst = max(worst, _rel(apply_laplacian_fd(f, z), -(lam ** 2 + p.n ** 2) * f(z)))
    tol = 1e-5
    return Check("finite-difference eigenchecks", worst <= tol, worst, tol,
                 f"H_nu eigenvalue {eps:g}; Laplacian on spherical functions")


def check_invariance(params=(2, 3.5, 1), count: int = 3) -> Check:
    p = SpaceParams(*params)
    rng = np.random.default_rng(31)
    z = np.array([0.1 + 0.2j, -0.3] + [0.0] * (p.n - 2))
    worst = 0.0
    for _ in range(count):
        a = rng.normal(size=p.n) + 1j * rng.normal(size=p.n)
        a *= rng.uniform(0.2, 0.5) / np.linalg.norm(a)
        left = berezin_apply(p, lambda w, a=a: smooth_observable(mobius_coords(a, w)), z)
        right = berezin_apply(p, smooth_observable, mobius_coords(a, z))
        worst = max(worst, abs(left - right))
    tol = 1e-6
    return Check("Berezin transform commutes with automorphisms", worst <= tol, worst, tol,
                 f"{count} random involutions")


def check_harmonic(seed: int = 41) -> Check:
    bad = []
    for n in (2, 3, 4):
        for p in range(7):
            for q in range(7 - p):
                if build_harmonic_basis(n, p, q).dimension != harmonic_dimension(n, p, q):
                    bad.append((n, p, q))
    rng = np.random.default_rng(seed)
    spread = 0.0
    for n, p, q in ((2, 1, 1), (2, 2, 0), (3, 2, 1), (4, 1, 2)):
        basis = build_harmonic_basis(n, p, q)
        vals = []
        for _ in range(20):
            th = rng.normal(size=n) + 1j * rng.normal(size=n)
            th /= np.linalg.norm(th)
            vals.append(addition_kernel_check(basis, th))
        spread = max(spread, max(vals) - min(vals), max(abs(v - basis.dimension) for v in vals))
    ok = not bad and spread <= 1e-12
    return Check("harmonic spaces: dimensions and addition kernel", ok, spread, 1e-12,
                 f"dimension mismatches: {bad or 'none'}")


def check_diagnostic(params=(2, 2.0, 0), lambdas=LAMBDA_GRID) -> Check:
    """The 3F2 column and the audit report exist; audited residual within 1e-8."""
    p = SpaceParams(*params)
    report = constant_audit(p, lambdas)
    f32 = [symbol_3f2(p, lam) for lam in lambdas]
    produced = bool(report.render()) and all(np.isfinite(v) for v in f32)
    ok = produced and report.audited_residual <= 1e-8
    return Check("diagnostic record: audit report and 3F2 column", ok, report.audited_residual, 1e-8,
                 f"fitted scale at m=0: {report.fitted_scale:.12g}; "
                 f"max 3F2 gap {max(report.f32_gaps):.3g}")


CHECKS: list[tuple[str, Callable[[], Check]]] = [
    ("1", check_symbol),
    ("2", check_peetre),
    ("3", check_koornwinder),
    ("4", check_linearization),
    ("5", check_orthonormality),
    ("6", check_kernel),
    ("7", check_identity_resolution),
    ("8", check_eigen),
    ("9", check_invariance),
    ("10", check_harmonic),
    ("11", check_diagnostic),
]


def run_checks(selected=None) -> list[Check]:
    return [fn() for key, fn in CHECKS if selected is None or key in selected]
