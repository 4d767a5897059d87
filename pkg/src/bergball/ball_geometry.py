"""Geometry of the unit ball of C^n with its Bergman metric, plus the radial
and spherical quadrature used for ball integrals.

Conventions: <z, w> = sum z_j conj(w_j); mu is normalized Lebesgue measure
(mu(B) = 1), sigma the normalized surface measure, and the radial variable is
t = |z|^2, so that d mu = n t^(n-1) dt d sigma.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy.special import roots_jacobi

from .errors import ConvergenceError, DomainError
from .exact_sphere import sphere_monomial_integral

__all__ = [
    "BallPoint",
    "QuadratureRule",
    "SphereRule",
    "GUARD",
    "inner",
    "bergman_distance",
    "tanh2_distance",
    "mobius_involution",
    "mobius_coords",
    "radial_rule",
    "refine",
    "radial_integrate",
    "ball_integrate",
    "sphere_rule",
]

GUARD = 1e-12


@dataclass(frozen=True, eq=False)
class BallPoint:
    """A point of the open unit ball; ``norm_sq`` is cached at construction."""

    coords: np.ndarray
    norm_sq: float = field(init=False)

    def __post_init__(self):
        c = np.array(self.coords, dtype=complex).reshape(-1)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)
        ns = float(np.sum(c.real ** 2 + c.imag ** 2))
        if not ns < 1.0:
            raise DomainError(f"point with |z|^2 = {ns} is not inside the unit ball")
        object.__setattr__(self, "norm_sq", ns)

    @classmethod
    def of(cls, *coords) -> "BallPoint":
        return cls(np.asarray(coords, dtype=complex))

    @property
    def n(self) -> int:
        return self.coords.size

    def __repr__(self) -> str:
        return f"BallPoint({list(self.coords)})"


def _coords(z) -> np.ndarray:
    return z.coords if isinstance(z, BallPoint) else np.asarray(z, dtype=complex)


def inner(z, w) -> complex:
    return complex(np.sum(_coords(z) * np.conj(_coords(w))))


def mobius_coords(a, z) -> np.ndarray:
    """phi_a applied to an array of points with shape (..., n).

    phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>) with s_a = sqrt(1 - |a|^2),
    P_a the orthogonal projection onto C a and Q_a = I - P_a.
    """
    a = _coords(a)
    z = np.asarray(_coords(z), dtype=complex)
    aa = float(np.vdot(a, a).real)
    if aa == 0.0:
        return -z
    za = z @ np.conj(a)
    proj = za[..., None] * a / aa
    s = math.sqrt(1.0 - aa)
    return (a - proj - s * (z - proj)) / (1.0 - za)[..., None]


def mobius_involution(a: BallPoint, z: BallPoint) -> BallPoint:
    """The involutive ball automorphism exchanging ``a`` and the origin."""
    return BallPoint(mobius_coords(a, z))


def tanh2_distance(z, w) -> float:
    """tanh^2 of the Bergman distance, computed as |phi_z(w)|^2."""
    v = mobius_coords(z, w)
    return float(np.sum(v.real ** 2 + v.imag ** 2))


def bergman_distance(z: BallPoint, w: BallPoint) -> float:
    """d(z, w) = arccosh sqrt(|1 - <z,w>|^2 / ((1-|z|^2)(1-|w|^2)))."""
    z, w = BallPoint(_coords(z)), BallPoint(_coords(w))
    cosh2 = abs(1 - inner(z, w)) ** 2 / ((1 - z.norm_sq) * (1 - w.norm_sq))
    if cosh2 < 1 - GUARD:
        raise DomainError(f"cosh^2 of the distance fell below 1: {cosh2}")
    # artanh|phi_z(w)| is the same quantity without the cancellation near d = 0
    return math.atanh(math.sqrt(min(tanh2_distance(z, w), 1.0 - 1e-300)))


# ----------------------------------------------------------------- radial rules

@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Rule for int_0^1 f(t) t^(n-1) (1-t)^gamma dt: sum weights * f(nodes).

    Non-adaptive rules are single Gauss-Jacobi rules. Adaptive rules are
    composite: geometric panels [1-2^-k, 1-2^-(k+1)] clustering at t = 1 with
    Gauss-Legendre nodes, and a terminal Gauss-Jacobi panel carrying the
    (1-t)^gamma singularity. ``refine`` doubles the points per panel.
    """

    nodes: np.ndarray
    weights: np.ndarray
    n: float
    gamma: float
    points: int
    adaptive: bool = False
    budget: int = 4
    panels: int = 0

    @property
    def weight_exponents(self) -> tuple[float, float]:
        return (self.n - 1, self.gamma)


def _gauss_jacobi_unit(points: int, a: float, b: float):
    """Nodes/weights on [0,1] for weight (1-t)^a t^b."""
    x, w = roots_jacobi(points, a, b)
    return (1 + x) / 2, w / 2 ** (a + b + 1)


def _composite(n: int, gamma: float, points: int):
    term_pts = max(8, points // 2 + 4)
    u, wu = _gauss_jacobi_unit(term_pts, gamma, 0.0)  # u = (1-t)/delta, weight u^gamma
    # the terminal panel ends where its smallest node respects the guard band
    panels = min(40, int(math.floor(math.log2(u.min() / GUARD))))
    delta = 2.0 ** -panels
    xl, wl = np.polynomial.legendre.leggauss(points)
    xl, wl = (1 + xl) / 2, wl / 2
    # first panel [0, 1/2] carries t^(n-1) exactly, which may be fractional
    s, ws = _gauss_jacobi_unit(points, 0.0, n - 1)
    t = s / 2
    nodes, weights = [t], [ws * 0.5 ** n * (1 - t) ** gamma]
    lo = 0.5
    for k in range(1, panels):
        hi = 1.0 - 2.0 ** -(k + 1)
        t = lo + (hi - lo) * xl
        nodes.append(t)
        weights.append((hi - lo) * wl * t ** (n - 1) * (1 - t) ** gamma)
        lo = hi
    t = 1.0 - delta * u
    nodes.append(t)
    weights.append(delta ** (gamma + 1) * wu * t ** (n - 1))
    return np.concatenate(nodes), np.concatenate(weights), panels


def radial_rule(n: float, gamma: float, points: int = 64, adaptive: bool = False,
                budget: int = 4) -> QuadratureRule:
    """Quadrature for the radial weight t^(n-1) (1-t)^gamma on (0, 1).

    Non-adaptive: Gauss-Jacobi, exact for polynomials of degree 2*points-1.
    """
    if not gamma > -1:
        raise ValueError(f"weight exponent gamma={gamma} must exceed -1")
    if not n > 0 or points < 1:
        raise ValueError("n and points must be positive")
    if adaptive:
        nodes, weights, panels = _composite(n, gamma, points)
    else:
        nodes, weights = _gauss_jacobi_unit(points, gamma, n - 1)
        panels = 1
    if np.any(nodes > 1 - GUARD):
        raise ValueError("rule violates the endpoint guard band; use fewer points")
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes, weights, n, float(gamma), points, adaptive, budget, panels)


def refine(rule: QuadratureRule) -> QuadratureRule:
    """Same rule family with twice the points per panel."""
    return radial_rule(rule.n, rule.gamma, 2 * rule.points, rule.adaptive,
                       max(rule.budget - 1, 0))


def radial_integrate(f: Callable[[np.ndarray], np.ndarray], rule: QuadratureRule,
                     tol: float = 1e-12, full_output: bool = False):
    """sum_i w_i f(t_i); adaptive rules refine until successive values agree.

    ``f`` is called once per rule with the full node array. The returned error
    estimate is the last refinement difference (0 for fixed rules).
    """
    val = np.sum(rule.weights * f(rule.nodes))
    err = 0.0
    if rule.adaptive:
        cur = rule
        for _ in range(rule.budget + 1):
            nxt = refine(cur)
            new = np.sum(nxt.weights * f(nxt.nodes))
            err = float(abs(new - val))
            val, cur = new, nxt
            if err <= tol * max(abs(val), 1e-300):
                break
        else:
            raise ConvergenceError(f"adaptive radial rule stalled: estimate {err:.3g}")
    return (val, err) if full_output else val


def ball_integrate(radial_part: Callable[[np.ndarray], np.ndarray],
                   spherical_part: Mapping, rule: QuadratureRule, n: int | None = None):
    """int_B radial(|z|^2) * (1-|z|^2)^gamma * Q(z) d mu for a polynomial Q.

    ``spherical_part`` maps ``(alpha, beta)`` exponent pairs to coefficients of
    z^alpha zbar^beta; the angular factor of every monomial is exact and the
    radial factor uses ``rule`` (whose weight supplies t^(n-1) (1-t)^gamma).
    """
    n = rule.n if n is None else n
    by_degree: dict[int, complex] = {}
    for (alpha, beta), coef in spherical_part.items():
        ang = sphere_monomial_integral(alpha, beta)
        if ang:
            deg = sum(alpha) + sum(beta)
            by_degree[deg] = by_degree.get(deg, 0) + coef * float(ang)
    total = 0.0
    for deg, ang in sorted(by_degree.items()):
        total += ang * n * radial_integrate(lambda t: radial_part(t) * t ** (deg / 2), rule)
    return total


# --------------------------------------------------------------- sphere rules

@dataclass(frozen=True, eq=False)
class SphereRule:
    """Cubature on the unit sphere of C^n for the normalized measure."""

    points: np.ndarray   # (N, n) complex
    weights: np.ndarray  # (N,), sum 1
    simplex_points: int = 0
    phase_points: int = 0


def sphere_rule(n: int, simplex_points: int = 12, phase_points: int = 24) -> SphereRule:
    """Product rule theta_j = sqrt(s_j) e^{i phi_j}.

    (|theta_1|^2, ..., |theta_n|^2) is uniform on the simplex; it is sampled by
    stick breaking with Gauss-Jacobi factors, and each phase by the trapezoid
    rule. Exact for z^alpha zbar^beta whenever |alpha_j - beta_j| < phase_points
    and the simplex polynomial degree is below 2 * simplex_points.
    """
    s_axes = []
    for k in range(1, n):
        x, w = _gauss_jacobi_unit(simplex_points, n - k - 1, 0.0)  # Beta(1, n-k)
        s_axes.append((x, w / w.sum()))
    grids = np.meshgrid(*[a[0] for a in s_axes], indexing="ij") if s_axes else []
    wgrid = np.ones(1)
    for _, w in s_axes:
        wgrid = np.multiply.outer(wgrid, w)
    wgrid = wgrid.reshape(-1)
    frac = [g.reshape(-1) for g in grids]
    rest = np.ones_like(wgrid)
    s = []
    for x in frac:
        s.append(rest * x)
        rest = rest * (1 - x)
    s.append(rest)
    mod = np.sqrt(np.stack(s, axis=-1))  # (S, n)
    phases = 2 * np.pi * np.arange(phase_points) / phase_points
    ph = np.stack(np.meshgrid(*([phases] * n), indexing="ij"), axis=-1).reshape(-1, n)
    pts = (mod[:, None, :] * np.exp(1j * ph)[None, :, :]).reshape(-1, n)
    wts = np.repeat(wgrid, ph.shape[0]) / ph.shape[0]
    return SphereRule(pts, wts, simplex_points, phase_points)
