"""Scalar special functions: Pochhammer symbols, gamma moduli, Gauss 2F1 on the
real line, 3F2 at unit argument and terminating Kampe de Feriet double sums.

Everything here is a pure function. Float accumulations go through
Neumaier-compensated sums; integer and ``Fraction`` inputs stay exact where the
operation is a finite sum.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .errors import (
    ConvergenceError,
    DegenerateParameterError,
    DivergenceError,
    DomainError,
    NonTerminatingError,
    PoleError,
)

__all__ = [
    "SeriesControl",
    "DEFAULT_CONTROL",
    "X_SWITCH",
    "CompensatedSum",
    "compensated_sum",
    "nonpositive_integer",
    "pochhammer",
    "gamma_abs_sq",
    "gamma_pair",
    "gauss_2f1",
    "hyp_3f2_unit",
    "kampe_de_feriet_2221",
    "richardson_at_zero",
]

# Direct-series upper limit on [0, 1); beyond it we go through 1 - x.
X_SWITCH = 0.5


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the infinite hypergeometric sums."""

    rel_tol: float = 1e-14
    max_terms: int = 100_000
    tiny_threshold: float = 1e-300

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")


DEFAULT_CONTROL = SeriesControl()


class CompensatedSum:
    """Neumaier running sum for real or complex floats."""

    __slots__ = ("_s", "_c")

    def __init__(self, start=0.0):
        self._s = start
        self._c = 0.0 * start

    def add(self, v):
        s = self._s
        t = s + v
        # real and imaginary parts are compensated independently
        if isinstance(t, complex) or isinstance(s, complex) or isinstance(v, complex):
            s, v, t = complex(s), complex(v), complex(t)
            self._c += complex(_two_sum_err(s.real, v.real, t.real),
                               _two_sum_err(s.imag, v.imag, t.imag))
        else:
            self._c += _two_sum_err(s, v, t)
        self._s = t

    @property
    def value(self):
        return self._s + self._c


def _two_sum_err(s, v, t):
    if abs(s) >= abs(v):
        return (s - t) + v
    return (v - t) + s


def compensated_sum(terms):
    """Sum an iterable; exact for int/Fraction, compensated for floats."""
    terms = list(terms)
    if all(_is_exact(t) for t in terms):
        return sum(terms, Fraction(0))
    if any(isinstance(t, complex) for t in terms):
        return complex(math.fsum(complex(t).real for t in terms),
                       math.fsum(complex(t).imag for t in terms))
    return math.fsum(terms)


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def nonpositive_integer(v) -> int | None:
    """Return ``N`` if ``v == -N`` for an integer ``N >= 0``, else None."""
    if isinstance(v, bool):
        return None
    if isinstance(v, int):
        return -v if v <= 0 else None
    if isinstance(v, Fraction):
        return -int(v) if v.denominator == 1 and v <= 0 else None
    z = complex(v)
    if z.imag != 0.0 or z.real > 0 or z.real != math.floor(z.real):
        return None
    return int(-z.real)


def pochhammer(x, k: int):
    """Rising factorial ``x (x+1) ... (x+k-1)``.

    Integer-valued floats are multiplied as Python ints and rounded once, so
    the result is exact whenever it fits in a double. On float overflow the
    infinite result is returned and a ``RuntimeWarning`` is issued.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if isinstance(x, float) and x.is_integer():
        out = 1
        xi = int(x)
        for i in range(k):
            out *= xi + i
        try:
            return float(out)
        except OverflowError:
            warnings.warn("pochhammer overflow", RuntimeWarning, stacklevel=2)
            return math.copysign(math.inf, out)
    out = 1
    for i in range(k):
        out = out * (x + i)
    if isinstance(out, float) and math.isinf(out):
        warnings.warn("pochhammer overflow", RuntimeWarning, stacklevel=2)
    return out


def gamma_abs_sq(x: float, y: float) -> float:
    """``|Gamma(x + iy)|^2`` through the complex log-gamma."""
    if y == 0 and nonpositive_integer(x) is not None:
        raise PoleError(f"Gamma has a pole at {x}")
    return math.exp(2.0 * special.loggamma(complex(x, y)).real)


def gamma_pair(x, y):
    """``Gamma(x + iy) Gamma(x - iy)`` for complex ``y``.

    Equals :func:`gamma_abs_sq` for real ``y``; for imaginary ``y`` this is the
    analytic continuation used when the spectral parameter is imaginary.
    """
    y = complex(y)
    if y.imag == 0.0:
        return gamma_abs_sq(float(x), y.real)
    z1, z2 = complex(x) + 1j * y, complex(x) - 1j * y
    for z in (z1, z2):
        if nonpositive_integer(z) is not None:
            raise PoleError(f"Gamma has a pole at {z}")
    val = complex(special.gamma(z1) * special.gamma(z2))
    if abs(val.imag) <= 1e-14 * abs(val):
        return val.real
    return val


# ---------------------------------------------------------------- 2F1


def _series_2f1(a, b, c, x, control: SeriesControl, terminating: bool = False):
    """Direct Gauss series on an array of real arguments, |x| <= 1/2 in practice."""
    x = np.asarray(x, dtype=float)
    s = np.ones(x.shape, dtype=complex)
    comp = np.zeros(x.shape, dtype=complex)
    term = np.ones(x.shape, dtype=complex)
    small_run = 0
    for k in range(control.max_terms):
        term = term * ((a + k) * (b + k) / ((c + k) * (k + 1))) * x
        t = s + term
        big = np.abs(s) >= np.abs(term)
        comp += np.where(big, (s - t) + term, (term - t) + s)
        s = t
        mag = np.abs(term)
        if not np.any(mag > 0):
            return s + comp
        ref = np.maximum(np.abs(s), control.tiny_threshold)
        if not terminating and np.all(mag <= control.rel_tol * ref):
            small_run += 1
            if small_run >= 2:
                return s + comp
        else:
            small_run = 0
    raise ConvergenceError(f"2F1 series did not converge in {control.max_terms} terms")


def _connection_2f1(a, b, c, w, control: SeriesControl):
    """F(a,b;c;x) for x <= -1 written in w = 1/(1-x) in (0, 1/2]."""
    d = a - b
    if nonpositive_integer(d) is not None or nonpositive_integer(-d) is not None:
        raise DegenerateParameterError(
            "a - b is an integer; perturb the parameters and extrapolate")
    w = np.asarray(w, dtype=float)
    gc = special.gamma(c)
    g1 = gc * special.gamma(b - a) * special.rgamma(b) * special.rgamma(c - a)
    g2 = gc * special.gamma(a - b) * special.rgamma(a) * special.rgamma(c - b)
    logw = np.log(w)
    t1 = g1 * np.exp(a * logw) * _series_2f1(a, c - b, a - b + 1, w, control)
    t2 = g2 * np.exp(b * logw) * _series_2f1(b, c - a, b - a + 1, w, control)
    return t1 + t2


def gauss_2f1(a, b, c, x, control: SeriesControl = DEFAULT_CONTROL):
    """Gauss hypergeometric function for real ``x < 1``.

    Region map: direct series on ``[0, 1/2]``; Pfaff's transformation on
    ``(-1, 0)``; the ``1/(1-x)`` connection formula for ``x <= -1``; and
    Pfaff followed by the connection formula on ``(1/2, 1)``. Terminating
    parameter sets are summed as polynomials everywhere.

    ``x`` may be a scalar or an array; the return value has the same shape and
    complex dtype.
    """
    a, b, c = complex(a), complex(b), complex(c)
    # Pfaff treats a and b asymmetrically; a fixed order keeps F(a,b) == F(b,a) bitwise
    if (b.real, b.imag) < (a.real, a.imag):
        a, b = b, a
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    if np.any(xs >= 1.0):
        raise DomainError("gauss_2f1 is defined here only for x < 1")

    deg = [d for d in (nonpositive_integer(a), nonpositive_integer(b)) if d is not None]
    cpole = nonpositive_integer(c)
    if cpole is not None and (not deg or min(deg) >= cpole):
        raise PoleError("c is a nonpositive integer and the series does not terminate first")

    out = np.empty(xs.shape, dtype=complex)
    if deg:
        budget = SeriesControl(control.rel_tol, min(deg) + 2, control.tiny_threshold)
        out[:] = _series_2f1(a, b, c, xs, budget, terminating=True) if min(deg) > 0 else 1.0
        return out[0] if scalar else out

    zero = xs == 0.0
    direct = (xs > 0.0) & (xs <= X_SWITCH)
    pfaff = (xs > -1.0) & (xs < 0.0)
    conn = xs <= -1.0
    upper = xs > X_SWITCH
    out[zero] = 1.0
    if direct.any():
        out[direct] = _series_2f1(a, b, c, xs[direct], control)
    if pfaff.any():
        xp = xs[pfaff]
        out[pfaff] = np.exp(-b * np.log1p(-xp)) * _series_2f1(b, c - a, c, xp / (xp - 1.0), control)
    if conn.any():
        out[conn] = _connection_2f1(a, b, c, 1.0 / (1.0 - xs[conn]), control)
    if upper.any():
        xu = xs[upper]
        # Pfaff maps (1/2, 1) onto (-inf, -1); the connection variable is 1 - x
        pre = np.exp(-b * np.log1p(-xu))
        out[upper] = pre * _connection_2f1(b, c - a, c, 1.0 - xu, control)
    return out[0] if scalar else out


def richardson_at_zero(fn: Callable[[float], complex], eps: float = 1e-6):
    """Estimate ``fn(0)`` for an even function evaluable only off zero.

    Uses symmetric samples at ``+-eps`` and ``+-eps/2`` and one Richardson
    step on the ``eps**2`` error term. Accuracy is limited to roughly
    ``1e-16 / eps`` by cancellation inside ``fn`` (about 1e-10 at the default).
    """
    f1 = 0.5 * (fn(eps) + fn(-eps))
    f2 = 0.5 * (fn(0.5 * eps) + fn(-0.5 * eps))
    return (4.0 * f2 - f1) / 3.0


# ---------------------------------------------------------------- 3F2(1)


def hyp_3f2_unit(a1, a2, a3, b1, b2, control: SeriesControl = DEFAULT_CONTROL,
                 full_output: bool = False):
    """3F2(a1, a2, a3; b1, b2; 1).

    Terminating sums are evaluated exactly (ints/Fractions) or with
    compensated accumulation. Convergent non-terminating sums (Re s > 0 with
    s = b1 + b2 - a1 - a2 - a3) are summed directly and the partial sums,
    taken at doubling lengths, are Richardson-extrapolated on the known
    algebraic tail ``N**-(s+k)``.

    With ``full_output`` the pair ``(value, error_estimate)`` is returned.
    """
    nums = (a1, a2, a3)
    dens = (b1, b2)
    deg = [d for d in map(nonpositive_integer, nums) if d is not None]
    if deg:
        N = min(deg)
        for bb in dens:
            p = nonpositive_integer(bb)
            if p is not None and p < N:
                raise PoleError("denominator parameter vanishes before termination")
        terms = []
        t = Fraction(1) if all(_is_exact(v) for v in nums + dens) else 1.0
        terms.append(t)
        for j in range(N):
            t = t * (a1 + j) * (a2 + j) * (a3 + j) / ((b1 + j) * (b2 + j) * (j + 1))
            terms.append(t)
        val = compensated_sum(terms)
        return (val, 0.0) if full_output else val

    s = complex(b1) + complex(b2) - complex(a1) - complex(a2) - complex(a3)
    if s.real <= 0:
        raise DivergenceError(f"3F2 at unit argument diverges (Re s = {s.real:.6g} <= 0)")
    for bb in dens:
        if nonpositive_integer(bb) is not None:
            raise PoleError("denominator parameter is a nonpositive integer")

    a1, a2, a3, b1, b2 = map(complex, (a1, a2, a3, b1, b2))
    acc = CompensatedSum(1.0 + 0j)
    term = 1.0 + 0j
    checkpoints = []
    n_next = 64
    j = 0
    while j < control.max_terms:
        term = term * (a1 + j) * (a2 + j) * (a3 + j) / ((b1 + j) * (b2 + j) * (j + 1))
        acc.add(term)
        j += 1
        if j == n_next:
            checkpoints.append(acc.value)
            ref = abs(acc.value)
            # tail of an algebraically decaying series ~ |term| * j / Re(s)
            if abs(term) * j / s.real <= control.rel_tol * ref:
                return (acc.value, abs(term) * j / s.real) if full_output else acc.value
            if len(checkpoints) >= 8:
                break
            n_next *= 2
    if len(checkpoints) < 3:
        raise ConvergenceError("3F2 budget too small for extrapolation")

    table = [list(checkpoints)]
    for k in range(len(checkpoints) - 1):
        r = 2.0 ** (-(s + k))
        prev = table[-1]
        table.append([(prev[i + 1] - r * prev[i]) / (1 - r) for i in range(len(prev) - 1)])
    best = table[-1][-1]
    err = abs(table[-1][-1] - table[-2][-1])
    if full_output:
        return best, err
    return best


# ---------------------------------------------------------------- Kampe de Feriet


def _prod_poch(params: Sequence, k: int):
    out = 1
    for p in params:
        out = out * pochhammer(p, k)
    return out


def kampe_de_feriet_2221(a: Sequence, b: Sequence, c: Sequence, d: Sequence,
                         kappa: Sequence, rho: Sequence, x=1, y=1):
    """Terminating Kampe de Feriet double series.

    ``sum_{q,s} [a]_{q+s} [b]_q [c]_s / ([d]_{q+s} [kappa]_q [rho]_s) x^q/q! y^s/s!``
    where ``[p]_k`` is the product of Pochhammer symbols over a parameter list.
    The joint numerator list ``a`` must contain a nonpositive integer ``-N``;
    the sum then runs over ``q + s <= N``. Exact when every parameter and both
    arguments are ints or Fractions.
    """
    bounds = [nonpositive_integer(v) for v in a]
    bounds = [v for v in bounds if v is not None]
    if not bounds:
        raise NonTerminatingError("no joint numerator parameter is a nonpositive integer")
    N = min(bounds)
    exact = all(_is_exact(v) for v in (*a, *b, *c, *d, *kappa, *rho, x, y))
    terms = []
    for total in range(N + 1):
        head_num = _prod_poch(a, total)
        head_den = _prod_poch(d, total)
        if head_num == 0:
            continue
        if head_den == 0:
            raise PoleError("joint denominator vanishes inside the summation range")
        for q in range(total + 1):
            s = total - q
            num = _prod_poch(b, q) * _prod_poch(c, s)
            if num == 0:
                continue
            den = _prod_poch(kappa, q) * _prod_poch(rho, s)
            if den == 0:
                raise PoleError("kappa/rho denominator vanishes inside the summation range")
            fq, fs = math.factorial(q), math.factorial(s)
            if exact:
                t = Fraction(head_num * num) / Fraction(head_den * den * fq * fs) * Fraction(x) ** q * Fraction(y) ** s
            else:
                t = head_num * num / (head_den * den * fq * fs) * x ** q * y ** s
            terms.append(t)
    if not terms:
        return Fraction(0) if exact else 0.0
    return compensated_sum(terms)
