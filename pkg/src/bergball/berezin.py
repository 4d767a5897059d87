"""Berezin transform of A_m^{2,nu}(B^n).

B[phi](z) = c int_B sech^{4(nu-m)} d(z,w) P_m(1 - 2 tanh^2 d(z,w))^2 phi(w) d mu_n(w).

Application substitutes w = phi_z(u). The kernel then depends on |u| only and
d mu_n is invariant, so

B[phi](z) = c n int_0^1 t^(n-1) (1-t)^(beta-1) P_m(1-2t)^2 <phi o phi_z>(t) dt,

where <.>(t) is the sphere average over |u|^2 = t. The radial factor uses a
Gauss-Jacobi rule for the weight t^(n-1) (1-t)^(beta-1), the sphere average a
product rule (see :func:`bergball.ball_geometry.sphere_rule`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .ball_geometry import (SphereRule, QuadratureRule, _coords, mobius_coords, radial_rule,
                            refine, sphere_rule, tanh2_distance)
from .eigenspace import SpaceParams
from .errors import ConvergenceError, DomainError
from .orthopoly import jacobi_eval

__all__ = [
    "Observable",
    "c_const",
    "c_const_m0",
    "radial_profile",
    "berezin_kernel",
    "berezin_apply",
    "berezin_apply_m0",
    "kernel_mass",
    "default_sphere_rule",
]

_HINTS = ("bounded", "polynomial", "unbounded")


@dataclass(frozen=True)
class Observable:
    """A function on the ball, vectorized over points of shape (..., n).

    ``hint`` is the growth class near the boundary; only ``"bounded"`` and
    ``"polynomial"`` (polynomial in z, zbar, hence bounded on the ball) are
    accepted for quadrature.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    hint: str = "bounded"

    def __post_init__(self):
        if self.hint not in _HINTS:
            raise ValueError(f"hint must be one of {_HINTS}")

    def __call__(self, w: np.ndarray) -> np.ndarray:
        return self.fn(w)


def _as_observable(phi) -> Observable:
    obs = phi if isinstance(phi, Observable) else Observable(phi)
    if obs.hint == "unbounded":
        raise DomainError("unbounded observables are not integrable by this quadrature")
    return obs


def c_const(params: SpaceParams) -> float:
    """Gamma(n) m! (2(nu-m)-n) Gamma(2nu-m) / (n! Gamma(n+m) Gamma(2nu-m-n+1))."""
    nu, n, m = params.nu, params.n, params.m
    return params.beta * math.exp(gammaln(n) + gammaln(m + 1) + gammaln(2 * nu - m)
                                  - gammaln(n + 1) - gammaln(n + m) - gammaln(2 * nu - m - n + 1))


def c_const_m0(nu: float, n: int) -> float:
    """(2nu-n) Gamma(2nu) / (n! Gamma(2nu-n+1))."""
    return (2 * nu - n) * math.exp(gammaln(2 * nu) - gammaln(n + 1) - gammaln(2 * nu - n + 1))


def radial_profile(params: SpaceParams, s):
    """h(xi) = (1-s)^{2(nu-m)} P_m^{(n-1, beta)}(1-2s)^2 with s = |xi|^2."""
    s = np.asarray(s, dtype=float)
    if np.any((s < 0) | (s >= 1)):
        raise DomainError("profile argument must lie in [0, 1)")
    out = (1 - s) ** (2 * (params.nu - params.m)) * jacobi_eval(params.m, params.jacobi, 1 - 2 * s) ** 2
    return out if out.ndim else float(out)


def berezin_kernel(params: SpaceParams, z, w) -> float:
    """c h(tanh^2 d(z, w)), the density against d mu_n(w)."""
    return c_const(params) * radial_profile(params, tanh2_distance(z, w))


def default_sphere_rule(n: int) -> SphereRule:
    return sphere_rule(n, 10, 20) if n == 2 else sphere_rule(n, 6, 12)


def _sphere_means(phi: Observable, z: np.ndarray, t: np.ndarray, sphere: SphereRule) -> np.ndarray:
    """<phi(phi_z(sqrt(t) theta))>_theta for every radial node."""
    u = np.sqrt(t)[:, None, None] * sphere.points[None, :, :]
    w = mobius_coords(z, u)
    return np.asarray(phi(w)) @ sphere.weights


def _apply(profile_poly, c: float, gamma: float, n: int, phi, z, rule, sphere, full_output):
    obs = _as_observable(phi)
    zc = _coords(z)
    if not float(np.sum(np.abs(zc) ** 2)) < 1:
        raise DomainError("base point outside the ball")
    sphere = default_sphere_rule(n) if sphere is None else sphere
    rule = radial_rule(n, gamma, 24) if rule is None else rule
    if rule.n != n or abs(rule.gamma - gamma) > 1e-14:
        raise ValueError(f"rule must carry the weight t^(n-1) (1-t)^{gamma}")

    def integral(r: QuadratureRule, sph: SphereRule):
        vals = profile_poly(r.nodes) * _sphere_means(obs, zc, r.nodes, sph)
        return c * n * np.sum(r.weights * vals)

    fine_rule = refine(rule)
    fine = integral(fine_rule, sphere)
    err = float(abs(fine - integral(rule, sphere)))
    if full_output and sphere.phase_points > 4 and sphere.simplex_points > 2:
        # a coarser sphere rule bounds the angular error as well
        coarse = sphere_rule(n, sphere.simplex_points - 2, sphere.phase_points - 4)
        err = max(err, float(abs(fine - integral(fine_rule, coarse))))
    if not np.isfinite(fine):
        raise ConvergenceError("non-finite Berezin quadrature value")
    val = fine.real if np.isrealobj(fine) or abs(np.imag(fine)) == 0 else fine
    return (val, err) if full_output else val


def berezin_apply(params: SpaceParams, phi, z, rule: QuadratureRule | None = None,
                  sphere: SphereRule | None = None, full_output: bool = False):
    """B[phi](z). ``rule`` must use the weight t^(n-1) (1-t)^(beta-1).

    The value comes from the refined radial rule. With ``full_output`` the
    error estimate is the larger of the radial refinement difference and the
    difference against a coarser sphere rule.
    """
    poly = lambda t: jacobi_eval(params.m, params.jacobi, 1 - 2 * t) ** 2
    return _apply(poly, c_const(params), params.beta - 1, params.n, phi, z, rule, sphere, full_output)


def berezin_apply_m0(nu: float, n: int, phi, z, rule: QuadratureRule | None = None,
                     sphere: SphereRule | None = None, full_output: bool = False):
    """m = 0 transform with kernel cosh^{-4 nu} d(z, w) and its own constant."""
    if not 2 * nu > n:
        raise DomainError("need 2 nu > n")
    return _apply(lambda t: np.ones_like(t), c_const_m0(nu, n), 2 * nu - n - 1, n, phi, z,
                  rule, sphere, full_output)


def kernel_mass(params: SpaceParams, z, radial_points: int = 40,
                simplex_points: int = 24, phase_points: int = 48) -> float:
    """int_B kernel(z, w) d mu_n(w) by cubature directly in w = sqrt(t) theta.

    Uses the explicit form sech^2 d(z,w) = (1-|z|^2)(1-|w|^2)/|1-<w,z>|^2, not the
    Mobius substitution, so it checks :func:`berezin_apply` independently.
    """
    zc = _coords(z)
    n = params.n
    tz = float(np.sum(np.abs(zc) ** 2))
    rule = radial_rule(n, params.beta - 1, radial_points)
    sph = sphere_rule(n, simplex_points, phase_points)
    e = 2 * (params.nu - params.m)
    c = c_const(params)
    total = 0.0
    for t, wt in zip(rule.nodes, rule.weights):
        w = math.sqrt(t) * sph.points
        denom = np.abs(1 - w @ np.conj(zc)) ** 2
        sech2 = (1 - tz) * (1 - t) / denom
        # (1-t)^{e} (1-t)^{-n-1} = (1-t)^{beta-1} is in the rule weight
        dens = ((1 - tz) / denom) ** e * jacobi_eval(params.m, params.jacobi, 1 - 2 * (1 - sech2)) ** 2
        total += wt * float(np.dot(sph.weights, dens))
    return c * n * total
