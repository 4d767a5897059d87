"""Jacobi and Wilson polynomials, and the linearization of a squared Jacobi
polynomial into the family ``P_k^{(n-1, 2(nu-m))}``.

Evaluation routines are generic over the number type: pass ``Fraction``
parameters and arguments to get exact rationals, floats or numpy arrays for
floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .scalar_kernels import compensated_sum, kampe_de_feriet_2221, pochhammer
from ._linalg import solve_exact

if TYPE_CHECKING:
    from .eigenspace import SpaceParams

__all__ = [
    "JacobiParams",
    "WilsonParams",
    "jacobi_eval",
    "jacobi_at_one",
    "wilson_eval",
    "linearization_coeffs",
    "linearization_oracle",
    "linearization_residual",
    "chebyshev_points",
]


@dataclass(frozen=True)
class JacobiParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise ValueError(f"Jacobi parameters must exceed -1, got {self.alpha}, {self.beta}")


@dataclass(frozen=True)
class WilsonParams:
    a: float
    b: float
    c: float
    d: float

    def as_tuple(self):
        return (self.a, self.b, self.c, self.d)


def jacobi_eval(m: int, params: JacobiParams, x):
    """P_m^{(alpha, beta)}(x) by the three-term recurrence.

    Works elementwise on arrays and exactly on ``Fraction`` input.
    """
    if m < 0:
        raise ValueError("degree must be nonnegative")
    a, b = params.alpha, params.beta
    if isinstance(x, np.ndarray):
        p0 = np.ones_like(x, dtype=np.result_type(x, float))
    else:
        p0 = x ** 0
    if m == 0:
        return p0
    p1 = (a + 1) + (a + b + 2) * (x - 1) / 2
    for k in range(2, m + 1):
        s = 2 * k + a + b
        c1 = 2 * k * (k + a + b) * (s - 2)
        c2 = (s - 1) * (a * a - b * b)
        c3 = (s - 1) * s * (s - 2)
        c4 = 2 * (k + a - 1) * (k + b - 1) * s
        p0, p1 = p1, ((c2 + c3 * x) * p1 - c4 * p0) / c1
    return p1


def jacobi_at_one(m: int, alpha):
    """P_m^{(alpha, beta)}(1) = Gamma(m+alpha+1) / (m! Gamma(alpha+1)), any beta."""
    if not alpha > -1:
        raise ValueError("alpha must exceed -1")
    # (alpha+1)_m / m! keeps rationals exact
    return pochhammer(alpha + 1, m) / (Fraction(math.factorial(m))
                                       if isinstance(alpha, (int, Fraction)) else math.factorial(m))


def wilson_eval(k: int, t, params: WilsonParams):
    """Wilson polynomial W_k(t; a, b, c, d) with ``t`` standing for x^2.

    The terminating 4F3 is summed in a denominator-free form::

        sum_j (-k)_j (k+a+b+c+d-1)_j / j! * prod_{i<j} ((a+i)^2 + t)
              * (a+b+j)_{k-j} (a+c+j)_{k-j} (a+d+j)_{k-j}

    which is a polynomial in ``t`` and therefore valid for negative ``t`` too.
    """
    if k < 0:
        raise ValueError("degree must be nonnegative")
    a, b, c, d = params.as_tuple()
    s = a + b + c + d
    terms = []
    prod_t = t ** 0
    for j in range(k + 1):
        coef = pochhammer(-k, j) * pochhammer(k + s - 1, j)
        coef = coef / (Fraction(math.factorial(j)) if isinstance(coef, (int, Fraction)) else math.factorial(j))
        tail = pochhammer(a + b + j, k - j) * pochhammer(a + c + j, k - j) * pochhammer(a + d + j, k - j)
        terms.append(coef * tail * prod_t)
        prod_t = prod_t * ((a + j) ** 2 + t)
    if isinstance(t, np.ndarray):
        return np.sum(terms, axis=0)
    return compensated_sum(terms)


def _family(params: "SpaceParams", exact: bool):
    nu = Fraction(params.nu) if exact else float(params.nu)
    n, m = params.n, params.m
    beta = 2 * (nu - m) - n
    return nu, n, m, beta


def linearization_coeffs(params: "SpaceParams", exact: bool = False) -> list:
    """Coefficients A_k, k = 0..2m, with

    ``P_m^{(n-1, beta)}(u)^2 = sum_k A_k P_k^{(n-1, 2(nu-m))}(u)``, beta = 2(nu-m)-n,

    from the closed form that carries a terminating F^{2:2}_{2:1} Kampe de
    Feriet factor at unit arguments. ``exact=True`` returns Fractions (nu is
    converted exactly from its binary value).
    """
    nu, n, m, _ = _family(params, exact)
    B = 2 * (nu - m)
    one = Fraction(1) if exact else 1.0
    out = []
    for k in range(2 * m + 1):
        num = (pochhammer(B + n, k) * pochhammer(n, 2 * m) * (2 * k + B + n) * (-1) ** k
               * math.factorial(2 * m) * pochhammer(B, 2 * m) ** 2)
        den = (pochhammer(n, k) * pochhammer(B + n, 2 * m + k + 1) * math.factorial(m) ** 2
               * math.factorial(2 * m - k) * pochhammer(B, m) ** 2)
        kdf = kampe_de_feriet_2221(
            a=(-2 * m + k, -2 * nu - k - n),
            b=(-m, -n - m + 1),
            c=(-m, -m - n + 1),
            d=(-2 * m, -2 * m - n + 1),
            kappa=(1 - 2 * nu,),
            rho=(1 - 2 * nu,),
            x=1, y=1,
        )
        out.append(one * num / den * kdf)
    return out


def linearization_oracle(params: "SpaceParams") -> list[Fraction]:
    """The same A_k from an exact square linear system.

    Both sides of the linearization identity are matched at 2m+1 distinct
    rational nodes and the Vandermonde-like system is solved over Q. Needs no
    hypergeometric machinery, so it validates :func:`linearization_coeffs`.
    """
    nu, n, m, beta = _family(params, exact=True)
    size = 2 * m + 1
    nodes = [Fraction(2 * i - size + 1, size) for i in range(size)]
    target = JacobiParams(n - 1, 2 * (nu - m))
    source = JacobiParams(n - 1, beta)
    mat = [[jacobi_eval(k, target, u) for k in range(size)] for u in nodes]
    rhs = [jacobi_eval(m, source, u) ** 2 for u in nodes]
    return solve_exact(mat, rhs)


def chebyshev_points(count: int) -> np.ndarray:
    """First-kind Chebyshev nodes on [-1, 1]."""
    k = np.arange(count)
    return np.cos(np.pi * (k + 0.5) / count)


def linearization_residual(params: "SpaceParams", u_samples: Sequence, coeffs=None):
    """max_u |P_m(u)^2 - sum_k A_k P_k(u)| / (1 + |P_m(u)^2|) over the samples.

    Exact when both the samples and ``coeffs`` are rational.
    """
    exact = coeffs is not None and all(isinstance(c, Fraction) for c in coeffs) and \
        all(isinstance(u, (int, Fraction)) for u in u_samples)
    if coeffs is None:
        coeffs = linearization_coeffs(params)
    nu, n, m, beta = _family(params, exact)
    target = JacobiParams(n - 1, 2 * (nu - m))
    source = JacobiParams(n - 1, beta)
    worst = Fraction(0) if exact else 0.0
    for u in u_samples:
        if not exact and not -1 <= float(u) <= 1:
            raise ValueError("samples must lie in [-1, 1]")
        lhs = jacobi_eval(m, source, u) ** 2
        rhs = compensated_sum([coeffs[k] * jacobi_eval(k, target, u) for k in range(len(coeffs))])
        worst = max(worst, abs(lhs - rhs) / (1 + abs(lhs)))
    return worst
