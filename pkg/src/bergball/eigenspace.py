"""Generalized Bergman spaces A_m^{2,nu}(B^n).

Admissibility, eigenvalues, the orthonormal basis Phi_{p,q}^j, the
reproducing kernel in closed and truncated (bilinear sum) forms, coherent
state overlaps, Poisson kernels and a finite-difference application of the
magnetic Schrodinger operator H_nu.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np
from scipy.special import gammaln

from .ball_geometry import BallPoint, _coords, mobius_coords, radial_rule, tanh2_distance
from .errors import AdmissibilityError, DomainError
from .exact_sphere import HarmonicBasis, build_harmonic_basis, harmonic_dimension, pairing_matrix
from .orthopoly import JacobiParams, jacobi_at_one, jacobi_eval

__all__ = [
    "SpaceParams",
    "BasisIndex",
    "eigenvalue",
    "kappa",
    "phi_eval",
    "kernel_constant",
    "kernel_closed",
    "kernel_truncated",
    "normalization_factor",
    "cs_overlap_abs2",
    "overlap_from_tanh2",
    "poisson_kernel",
    "apply_H_fd",
    "apply_laplacian_fd",
    "basis_indices",
    "gram_matrix",
    "BasisProvider",
]

BasisProvider = Callable[[int, int, int], HarmonicBasis]


@dataclass(frozen=True)
class SpaceParams:
    """(n, nu, m) with 2 nu > n and 0 <= m, beta = 2(nu - m) - n > 0."""

    n: int
    nu: float
    m: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise AdmissibilityError(f"n must be an integer >= 2, got {self.n}")
        if int(self.m) != self.m or self.m < 0:
            raise AdmissibilityError(f"m must be a nonnegative integer, got {self.m}")
        if not 2 * self.nu > self.n:
            raise AdmissibilityError(f"need 2*nu > n, got nu={self.nu}, n={self.n}")
        if self.m > math.floor(self.nu - self.n / 2):
            raise AdmissibilityError(f"m={self.m} exceeds floor(nu - n/2)")
        if not self.beta > 0:
            # m = nu - n/2 exactly leaves a non-normalizable radial factor
            raise AdmissibilityError(f"2(nu-m)-n must be positive, got {self.beta}")

    @property
    def beta(self) -> float:
        return 2 * (self.nu - self.m) - self.n

    @property
    def jacobi(self) -> JacobiParams:
        """The (n-1, 2(nu-m)-n) family shared by kernel, overlap and symbol."""
        return JacobiParams(self.n - 1, self.beta)


@dataclass(frozen=True)
class BasisIndex:
    p: int
    q: int
    j: int

    def check(self, params: SpaceParams) -> None:
        if self.p < 0 or not 0 <= self.q <= params.m:
            raise IndexError(f"need p >= 0 and 0 <= q <= m, got {self}")
        d = harmonic_dimension(params.n, self.p, self.q)
        if not 1 <= self.j <= d:
            raise IndexError(f"j={self.j} outside 1..{d}")


def eigenvalue(params: SpaceParams) -> float:
    nu, n, m = params.nu, params.n, params.m
    return 4 * nu * (2 * m + n) - 4 * m * (m + n)


def kappa(params: SpaceParams, p: int, q: int) -> float:
    """Normalization of Phi_{p,q}; q <= m."""
    nu, n, m = params.nu, params.n, params.m
    if not 0 <= q <= m or p < 0:
        raise IndexError("need p >= 0 and 0 <= q <= m")
    log_inv = (math.log(n) + gammaln(2 * nu - m - n - q + 1) + gammaln(p + n + m)
               - gammaln(m - q + 1) - math.log(params.beta) - gammaln(2 * nu - m + p))
    return math.exp(-0.5 * log_inv)


def _radial_factor(params: SpaceParams, p: int, q: int, t) -> np.ndarray:
    """kappa (1-t)^(nu-m) P_{m-q}^{(n+p+q-1, beta)}(1-2t)."""
    jp = JacobiParams(params.n + p + q - 1, params.beta)
    t = np.asarray(t, dtype=float)
    return kappa(params, p, q) * (1 - t) ** (params.nu - params.m) * jacobi_eval(params.m - q, jp, 1 - 2 * t)


def phi_eval(params: SpaceParams, idx: BasisIndex, z,
             basis_provider: BasisProvider = build_harmonic_basis):
    """Phi_{p,q,j}(z); ``z`` may be an array of points with shape (..., n)."""
    idx.check(params)
    zc = _coords(z)
    if zc.shape[-1] != params.n:
        raise ValueError("point dimension does not match n")
    t = np.sum(np.abs(zc) ** 2, axis=-1)
    if not np.all(t < 1):
        raise DomainError("point outside the ball")
    basis = basis_provider(params.n, idx.p, idx.q)
    out = _radial_factor(params, idx.p, idx.q, t) * basis.evaluate(zc)[..., idx.j - 1]
    return complex(out) if np.ndim(out) == 0 else out


def kernel_constant(params: SpaceParams) -> float:
    """(2(nu-m)-n) Gamma(2nu-m) / (n! Gamma(2nu-m-n+1))."""
    nu, n, m = params.nu, params.n, params.m
    return params.beta * math.exp(gammaln(2 * nu - m) - gammaln(n + 1) - gammaln(2 * nu - m - n + 1))


def normalization_factor(params: SpaceParams) -> float:
    """N = K(z, z), independent of z."""
    return kernel_constant(params) * jacobi_at_one(params.m, params.n - 1)


def kernel_closed(params: SpaceParams, z, w):
    """Closed form of the reproducing kernel as a function of d(z, w).

    ``w`` may be an array of points with shape (..., n); the result then has
    shape (...).
    """
    zc, wc = _coords(z), _coords(w)
    u = np.conj(wc) @ zc
    th2 = mobius_coords(zc, wc)
    th2 = np.sum(th2.real ** 2 + th2.imag ** 2, axis=-1)
    # ((1 - conj u)/(1 - u))^nu on the principal branch; |arg(1-u)| < pi/2
    phase = np.exp(-2j * params.nu * np.angle(1 - u))
    radial = (1 - th2) ** (params.nu - params.m) * jacobi_eval(params.m, params.jacobi, 1 - 2 * th2)
    out = kernel_constant(params) * phase * radial
    return complex(out) if np.ndim(out) == 0 else out


def basis_indices(params: SpaceParams, p_max: int) -> Iterator[BasisIndex]:
    for p in range(p_max + 1):
        for q in range(params.m + 1):
            for j in range(1, harmonic_dimension(params.n, p, q) + 1):
                yield BasisIndex(p, q, j)


KERNEL_GUARD = 0.8


def kernel_truncated(params: SpaceParams, z, w, p_max: int,
                     basis_provider: BasisProvider = build_harmonic_basis,
                     full_output: bool = False):
    """Partial bilinear sum sum_{p<=p_max, q<=m, j} Phi(z) conj Phi(w).

    With ``full_output`` also returns a tail estimate: the last p-shell
    contribution extrapolated geometrically with the ratio of the last two.
    """
    if p_max < 0:
        raise ValueError("p_max must be nonnegative")
    zc, wc = _coords(z), _coords(w)
    if max(np.linalg.norm(zc), np.linalg.norm(wc)) > KERNEL_GUARD:
        raise DomainError(f"truncated kernel needs |z|, |w| <= {KERNEL_GUARD}")
    tz, tw = float(np.sum(np.abs(zc) ** 2)), float(np.sum(np.abs(wc) ** 2))
    shells = []
    for p in range(p_max + 1):
        shell = 0j
        for q in range(params.m + 1):
            basis = basis_provider(params.n, p, q)
            hz, hw = basis.evaluate(zc), basis.evaluate(wc)
            ang = np.sum(hz * np.conj(hw))
            shell += _radial_factor(params, p, q, tz) * _radial_factor(params, p, q, tw) * ang
        shells.append(shell)
    total = complex(math.fsum(s.real for s in shells) + 1j * math.fsum(s.imag for s in shells))
    if not full_output:
        return total
    last = abs(shells[-1])
    prev = abs(shells[-2]) if len(shells) > 1 else 0.0
    r = last / prev if prev > 0 else 0.0
    tail = last * r / (1 - r) if r < 1 else math.inf
    return total, tail


def overlap_from_tanh2(params: SpaceParams, th2: float) -> float:
    """sech^{4(nu-m)} d * (P_m(1 - 2 tanh^2 d) / P_m(1))^2 as a function of tanh^2 d."""
    ratio = jacobi_eval(params.m, params.jacobi, 1 - 2 * th2) / jacobi_at_one(params.m, params.n - 1)
    return float((1 - th2) ** (2 * (params.nu - params.m)) * ratio ** 2)


def cs_overlap_abs2(params: SpaceParams, z, w) -> float:
    """|<z, nu, m | w, nu, m>|^2 = |K(z,w)|^2 / (K(z,z) K(w,w)), exactly 1 at d = 0."""
    return overlap_from_tanh2(params, tanh2_distance(_coords(z), _coords(w)))


def poisson_kernel(nu: float, lam: complex, z, theta) -> complex:
    """Poisson kernel P_lambda^nu(z, theta), eigenfunction of H_nu with
    eigenvalue lambda^2 + 4 nu^2 + n^2; the first exponent is (i lambda + n)/2."""
    zc, th = _coords(z), _coords(theta)
    n = zc.size
    u = complex(np.sum(zc * np.conj(th)))
    if abs(1 - u) < 1e-15:
        raise DomainError("Poisson kernel is singular at <z, theta> = 1")
    t = float(np.sum(np.abs(zc) ** 2))
    base = (1 - t) / abs(1 - u) ** 2
    return complex(np.exp((1j * lam + n) / 2 * math.log(base)) * np.exp(-2j * nu * np.angle(1 - u)))


# ------------------------------------------------------- finite differences

def _h_once(nu: float, f: Callable, zc: np.ndarray, h: float) -> complex:
    n = zc.size
    x0 = np.concatenate([zc.real, zc.imag])
    dim = 2 * n

    def F(x):
        return complex(f(BallPoint(x[:n] + 1j * x[n:])))

    f0 = F(x0)
    eye = np.eye(dim) * h
    grad = np.empty(dim, complex)
    hess = np.empty((dim, dim), complex)
    for i in range(dim):
        fp, fm = F(x0 + eye[i]), F(x0 - eye[i])
        grad[i] = (fp - fm) / (2 * h)
        hess[i, i] = (fp - 2 * f0 + fm) / h ** 2
        for j in range(i + 1, dim):
            hess[i, j] = hess[j, i] = (F(x0 + eye[i] + eye[j]) - F(x0 + eye[i] - eye[j])
                                       - F(x0 - eye[i] + eye[j]) + F(x0 - eye[i] - eye[j])) / (4 * h * h)
    # d^2/(dz_i dzbar_j) = (f_xixj + f_yiyj + i (f_xiyj - f_yixj)) / 4
    xx, yy = hess[:n, :n], hess[n:, n:]
    xy, yx = hess[:n, n:], hess[n:, :n]
    dzdzb = (xx + yy + 1j * (xy - yx)) / 4
    t = float(np.sum(np.abs(zc) ** 2))
    lap = np.sum((np.eye(n) - np.outer(zc, np.conj(zc))) * dzdzb)
    # z_j d/dz_j - zbar_j d/dzbar_j = -i (x_j d/dy_j - y_j d/dx_j)
    rot = -1j * np.sum(zc.real * grad[n:] - zc.imag * grad[:n])
    return -4 * (1 - t) * (lap + nu * rot + nu ** 2 * f0) + 4 * nu ** 2 * f0


def apply_H_fd(nu: float, f: Callable, z, h: float = 1e-3) -> complex:
    """H_nu f at z by central differences in the 2n real coordinates.

    ``f`` receives a BallPoint. Steps h and h/2 are combined by Richardson
    extrapolation, removing the O(h^2) term.
    """
    zc = _coords(z)
    if h <= 0 or h > 0.05:
        raise ValueError(f"step {h} outside (0, 0.05]")
    if 1 - np.linalg.norm(zc) <= 4 * h * math.sqrt(2):
        raise DomainError("point too close to the boundary for the stencil")
    a1 = _h_once(nu, f, zc, h)
    a2 = _h_once(nu, f, zc, h / 2)
    return complex((4 * a2 - a1) / 3)


def apply_laplacian_fd(f: Callable, z, h: float = 1e-3) -> complex:
    """Laplace-Beltrami operator 4(1-|z|^2) sum (delta_ij - z_i zbar_j) d_i dbar_j.

    H_0 is its negative, so this is -apply_H_fd(0, ...).
    """
    return -apply_H_fd(0.0, f, z, h)


# ------------------------------------------------------------- Gram matrix

def gram_matrix(params: SpaceParams, p_max: int, points: int = 64,
                basis_provider: BasisProvider = build_harmonic_basis):
    """Gram matrix of Phi over p <= p_max, q <= m, all j, in L^2(d mu_n).

    Angular pairings are exact; the radial factor, a polynomial in t against
    t^(n-1) (1-t)^(beta-1), uses a Gauss-Jacobi rule. Returns (matrix, indices).
    """
    idx = list(basis_indices(params, p_max))
    rule = radial_rule(params.n, params.beta - 1, points)
    t = rule.nodes
    n = params.n
    groups = [(p, q) for p in range(p_max + 1) for q in range(params.m + 1)]
    offsets, off = {}, 0
    for g in groups:
        offsets[g] = off
        off += harmonic_dimension(n, *g)
    gram = np.zeros((len(idx), len(idx)), dtype=complex)
    for ga in groups:
        ba = basis_provider(n, *ga)
        ra = _radial_factor(params, *ga, t) / (1 - t) ** (params.nu - params.m)
        for gb in groups:
            if sum(ga) != sum(gb):
                continue  # different homogeneity degree: exact angular zero
            bb = basis_provider(n, *gb)
            ang = pairing_matrix(ba, bb)
            if not any(any(row) for row in ang):
                continue
            ang_f = np.array([[float(v) / math.sqrt(ba.sq_norms[i] * bb.sq_norms[k])
                               for k, v in enumerate(row)] for i, row in enumerate(ang)])
            rb = _radial_factor(params, *gb, t) / (1 - t) ** (params.nu - params.m)
            # (1-t)^{2(nu-m)} (1-t)^{-n-1} = (1-t)^{beta-1}, supplied by the rule
            rad = n * np.sum(rule.weights * t ** sum(ga) * ra * rb)
            sa, sb = offsets[ga], offsets[gb]
            gram[sa:sa + ba.dimension, sb:sb + bb.dimension] = rad * ang_f
    return gram, idx
