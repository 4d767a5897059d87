"""Bidegree harmonic spaces H(p, q) on the unit sphere of C^n, built exactly.

A basis polynomial is stored as a sparse primitive integer row over the
monomials ``z^alpha zbar^beta`` with ``|alpha| = p`` and ``|beta| = q``. Rows
are pairwise orthogonal in L^2(d sigma) (normalized surface measure) and their
squared norms are exact rationals; the irrational normalization is applied
only when evaluating in floating point.

The Laplacian and the sphere inner product both preserve the torus weight
``alpha - beta``, so the nullspace and the Gram-Schmidt pass run block by
block over weight classes.
"""
from __future__ import annotations

import io
import math
import random
import struct
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from ._linalg import integer_row, nullspace_int
from .errors import CapacityError, DomainError

__all__ = [
    "MultiIndex",
    "HarmonicBasis",
    "harmonic_dimension",
    "sphere_monomial_integral",
    "build_harmonic_basis",
    "eval_harmonic",
    "addition_kernel_check",
    "sphere_pairing",
    "pairing_matrix",
    "laplacian_image",
    "reorthogonalize",
    "save_basis",
    "load_basis",
    "MAX_MONOMIALS",
]

MAX_MONOMIALS = 250_000


class MultiIndex(tuple):
    """Exponent vector of a monomial; ``degree`` is the entry sum."""

    def __new__(cls, entries):
        entries = tuple(int(e) for e in entries)
        if any(e < 0 for e in entries):
            raise ValueError("multi-index entries must be nonnegative")
        return super().__new__(cls, entries)

    @property
    def degree(self) -> int:
        return sum(self)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def harmonic_dimension(n: int, p: int, q: int) -> int:
    """dim H(p, q) = (p+q+n-1)(p+n-2)!(q+n-2)! / (p! q! (n-1)! (n-2)!)."""
    if n < 2:
        raise DomainError("harmonic spaces are defined here for n >= 2")
    if p < 0 or q < 0:
        raise ValueError("bidegrees must be nonnegative")
    f = math.factorial
    num = (p + q + n - 1) * f(p + n - 2) * f(q + n - 2)
    den = f(p) * f(q) * f(n - 1) * f(n - 2)
    return num // den


def sphere_monomial_integral(alpha: Sequence[int], beta: Sequence[int]) -> Fraction:
    """Integral of z^alpha zbar^beta against the normalized sphere measure."""
    if len(alpha) != len(beta):
        raise ValueError("multi-indices must have the same length")
    if tuple(alpha) != tuple(beta):
        return Fraction(0)
    n = len(alpha)
    num = math.factorial(n - 1)
    for a in alpha:
        num *= math.factorial(a)
    return Fraction(num, math.factorial(n - 1 + sum(alpha)))


def _pair(mon_a, mon_b) -> Fraction:
    """<z^a1 zbar^b1, z^a2 zbar^b2> in L^2(d sigma)."""
    (a1, b1), (a2, b2) = mon_a, mon_b
    return sphere_monomial_integral(
        tuple(x + y for x, y in zip(a1, b2)), tuple(x + y for x, y in zip(b1, a2)))


@dataclass(frozen=True, eq=False)
class HarmonicBasis:
    """Exact orthogonal basis of H(p, q).

    ``monomials[c]`` is the ``(alpha, beta)`` pair labelling column ``c``;
    ``rows[j]`` is a tuple of ``(column, integer coefficient)`` pairs and
    ``sq_norms[j]`` its exact squared L^2(d sigma) norm.
    """

    n: int
    p: int
    q: int
    monomials: tuple
    rows: tuple
    sq_norms: tuple

    @property
    def dimension(self) -> int:
        return len(self.rows)

    @property
    def coeffs(self) -> list[list[Fraction]]:
        """Dense exact coefficient matrix (rows x monomials)."""
        out = [[Fraction(0)] * len(self.monomials) for _ in self.rows]
        for j, row in enumerate(self.rows):
            for c, v in row:
                out[j][c] = Fraction(v)
        return out

    @cached_property
    def _float_data(self):
        exps_a = np.array([m[0] for m in self.monomials], dtype=int).reshape(len(self.monomials), self.n)
        exps_b = np.array([m[1] for m in self.monomials], dtype=int).reshape(len(self.monomials), self.n)
        mat = np.zeros((len(self.rows), len(self.monomials)))
        for j, row in enumerate(self.rows):
            scale = 1.0 / math.sqrt(self.sq_norms[j])
            for c, v in row:
                mat[j, c] = float(v) * scale
        return exps_a, exps_b, mat

    def monomial_values(self, z) -> np.ndarray:
        """Values of every column monomial at points ``z`` of shape (..., n)."""
        exps_a, exps_b, _ = self._float_data
        z = np.asarray(z, dtype=complex)
        zz = z[..., None, :]
        return np.prod(zz ** exps_a * np.conj(zz) ** exps_b, axis=-1)

    def evaluate(self, z) -> np.ndarray:
        """All L^2(d sigma)-normalized basis functions at ``z``: shape (..., d)."""
        _, _, mat = self._float_data
        return self.monomial_values(z) @ mat.T


@lru_cache(maxsize=None)
def _monomials(n: int, p: int, q: int) -> tuple:
    alphas = list(_compositions(p, n))
    betas = list(_compositions(q, n))
    return tuple((a, b) for a in alphas for b in betas)


def laplacian_image(n: int, p: int, q: int, row) -> dict:
    """Apply sum_j d^2/(dz_j dzbar_j) to a sparse row; result keyed by monomial."""
    mons = _monomials(n, p, q)
    out: dict = defaultdict(int)
    for c, v in row:
        a, b = mons[c]
        for j in range(n):
            if a[j] and b[j]:
                ta = a[:j] + (a[j] - 1,) + a[j + 1:]
                tb = b[:j] + (b[j] - 1,) + b[j + 1:]
                out[(ta, tb)] += v * a[j] * b[j]
    return {k: v for k, v in out.items() if v != 0}


def _gram_schmidt(vectors: list[list[int]], cols: list[int], mons) -> list[tuple[list[int], Fraction]]:
    """Exact unnormalized Gram-Schmidt of integer vectors supported on ``cols``."""
    gram = [[_pair(mons[a], mons[b]) for b in cols] for a in cols]

    def ip(u, v):
        return sum((u[i] * gram[i][k] * v[k] for i in range(len(cols)) if u[i]
                    for k in range(len(cols)) if v[k]), Fraction(0))

    done: list[tuple[list, Fraction]] = []
    for vec in vectors:
        w = [Fraction(x) for x in vec]
        for u, nu in done:
            f = ip(w, u) / nu
            if f:
                w = [wi - f * ui for wi, ui in zip(w, u)]
        w = integer_row(w)
        done.append((w, ip(w, w)))
    return done


@lru_cache(maxsize=None)
def build_harmonic_basis(n: int, p: int, q: int, max_monomials: int = MAX_MONOMIALS) -> HarmonicBasis:
    """Exact orthogonal basis of H(p, q) from the Laplacian nullspace."""
    if n < 2:
        raise DomainError("harmonic spaces are defined here for n >= 2")
    mons = _monomials(n, p, q)
    if len(mons) > max_monomials:
        raise CapacityError(f"{len(mons)} monomials exceed the bound {max_monomials}")
    blocks: dict = defaultdict(list)
    for c, (a, b) in enumerate(mons):
        blocks[tuple(x - y for x, y in zip(a, b))].append(c)

    rows, norms = [], []
    for weight in sorted(blocks, reverse=True):
        cols = blocks[weight]
        targets: dict = {}
        entries = []
        for local, c in enumerate(cols):
            img = laplacian_image(n, p, q, [(c, 1)])
            for key, v in img.items():
                targets.setdefault(key, len(targets))
                entries.append((targets[key], local, v))
        mat = [[0] * len(cols) for _ in range(len(targets))]
        for r, c, v in entries:
            mat[r][c] = v
        null = nullspace_int(mat, len(cols))
        for vec, sq in _gram_schmidt(null, cols, mons):
            rows.append(tuple((cols[i], v) for i, v in enumerate(vec) if v))
            norms.append(sq)
    return HarmonicBasis(n, p, q, mons, tuple(rows), tuple(norms))


def _as_coords(z) -> np.ndarray:
    coords = getattr(z, "coords", z)
    return np.asarray(coords, dtype=complex)


def eval_harmonic(basis: HarmonicBasis, j: int, z) -> complex:
    """Normalized basis function h^j (1-based ``j``) at a point of C^n."""
    if not 1 <= j <= basis.dimension:
        raise IndexError(f"basis index {j} outside 1..{basis.dimension}")
    return complex(basis.evaluate(_as_coords(z))[j - 1])


def addition_kernel_check(basis: HarmonicBasis, theta) -> float:
    """sum_j |h^j(theta)|^2 on the unit sphere; equals dim H(p, q)."""
    th = _as_coords(theta)
    if abs(np.linalg.norm(th) - 1.0) > 1e-14:
        raise DomainError("theta must lie on the unit sphere")
    vals = basis.evaluate(th)
    return math.fsum(np.abs(vals) ** 2)


def _row_pairing(ba: HarmonicBasis, ra, bb: HarmonicBasis, rb) -> Fraction:
    if ba.n != bb.n:
        raise ValueError("bases live in different dimensions")
    total = Fraction(0)
    by_weight: dict = defaultdict(list)
    for c, v in rb:
        a, b = bb.monomials[c]
        by_weight[tuple(x - y for x, y in zip(a, b))].append((bb.monomials[c], v))
    for c, v in ra:
        a, b = ba.monomials[c]
        for mon, w in by_weight.get(tuple(x - y for x, y in zip(a, b)), ()):
            total += v * w * _pair(ba.monomials[c], mon)
    return total


def sphere_pairing(ba: HarmonicBasis, ja: int, bb: HarmonicBasis, jb: int) -> Fraction:
    """Exact <row ja of ba, row jb of bb> in L^2(d sigma) (unnormalized rows, 1-based)."""
    return _row_pairing(ba, ba.rows[ja - 1], bb, bb.rows[jb - 1])


def pairing_matrix(ba: HarmonicBasis, bb: HarmonicBasis) -> list[list[Fraction]]:
    return [[_row_pairing(ba, ra, bb, rb) for rb in bb.rows] for ra in ba.rows]


def reorthogonalize(basis: HarmonicBasis, seed: int = 0) -> HarmonicBasis:
    """Another exact orthogonal basis of the same space.

    Rows are mixed by a random unimodular integer matrix (so weight blocks get
    blended) and re-orthogonalized with the full sphere inner product.
    """
    rng = random.Random(seed)
    d = basis.dimension
    dense = [[0] * len(basis.monomials) for _ in range(d)]
    for j, row in enumerate(basis.rows):
        for c, v in row:
            dense[j][c] = v
    order = list(range(d))
    rng.shuffle(order)
    mixed = []
    for i, j in enumerate(order):
        vec = list(dense[j])
        for k in order[i + 1:]:
            f = rng.randint(-3, 3)
            if f:
                vec = [x + f * y for x, y in zip(vec, dense[k])]
        mixed.append(vec)

    def ip(u, v):
        return _row_pairing(basis, [(c, x) for c, x in enumerate(u) if x],
                            basis, [(c, x) for c, x in enumerate(v) if x])

    done = []
    for vec in mixed:
        w = [Fraction(x) for x in vec]
        for u, nu in done:
            f = ip(w, u) / nu
            if f:
                w = [wi - f * ui for wi, ui in zip(w, u)]
        w = integer_row(w)
        done.append((w, ip(w, w)))
    rows = tuple(tuple((c, v) for c, v in enumerate(w) if v) for w, _ in done)
    return HarmonicBasis(basis.n, basis.p, basis.q, basis.monomials, rows,
                         tuple(sq for _, sq in done))


# ------------------------------------------------------------ cache file

_MAGIC = b"HPQB"
_VERSION = 1


def _write_int(buf: io.BufferedIOBase, v: int) -> None:
    raw = v.to_bytes((v.bit_length() + 8) // 8 or 1, "big", signed=True)
    buf.write(struct.pack(">I", len(raw)))
    buf.write(raw)


def _read_int(buf: io.BufferedIOBase) -> int:
    (length,) = struct.unpack(">I", buf.read(4))
    return int.from_bytes(buf.read(length), "big", signed=True)


def save_basis(basis: HarmonicBasis, path) -> None:
    """Versioned binary layout: magic, version, (n, p, q, d), then the dense
    row-major numerator/denominator pairs, then the squared norms."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack(">HIIII", _VERSION, basis.n, basis.p, basis.q, basis.dimension))
        for row in basis.coeffs:
            for v in row:
                _write_int(fh, v.numerator)
                _write_int(fh, v.denominator)
        for sq in basis.sq_norms:
            _write_int(fh, sq.numerator)
            _write_int(fh, sq.denominator)


def load_basis(path) -> HarmonicBasis:
    with open(Path(path), "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError("not a harmonic basis cache file")
        version, n, p, q, d = struct.unpack(">HIIII", fh.read(18))
        if version != _VERSION:
            raise ValueError(f"unsupported cache version {version}")
        mons = _monomials(n, p, q)
        rows = []
        for _ in range(d):
            row = []
            for c in range(len(mons)):
                num, den = _read_int(fh), _read_int(fh)
                if num:
                    v = Fraction(num, den)
                    if v.denominator != 1:
                        raise ValueError("cache rows must be integer vectors")
                    row.append((c, int(v)))
            rows.append(tuple(row))
        norms = []
        for _ in range(d):
            num, den = _read_int(fh), _read_int(fh)
            norms.append(Fraction(num, den))
    return HarmonicBasis(n, p, q, mons, tuple(rows), tuple(norms))
