"""Exact linear algebra over Q(sqrt(d)) and over the integers.

Matrices are lists of rows.  Field routines accept anything supporting the
field operations plus ``is_zero`` (i.e. :class:`~cylred.scalars.Scalar`);
integer routines work on Python ints.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

import numpy as np

from .scalars import Scalar, embed

Vec = list  # list[Scalar]
Mat = list  # list[list[Scalar]]


def zeros(n: int) -> Vec:
    return [Scalar(0)] * n


def as_scalars(rows) -> Mat:
    return [[Scalar.coerce(x) for x in row] for row in rows]


def dot(x: Sequence[Scalar], y: Sequence[Scalar]) -> Scalar:
    acc = Scalar(0)
    for a, b in zip(x, y):
        if not (a.is_zero() or b.is_zero()):
            acc = acc + a * b
    return acc


def vadd(x, y) -> Vec:
    return [a + b for a, b in zip(x, y)]


def vsub(x, y) -> Vec:
    return [a - b for a, b in zip(x, y)]


def vscale(c, x) -> Vec:
    c = Scalar.coerce(c)
    return [c * a for a in x]


def is_zero_vec(x) -> bool:
    return all(a.is_zero() for a in x)


def matvec(m: Mat, x) -> Vec:
    return [dot(row, x) for row in m]


def transpose(m: Mat, ncols: int | None = None) -> Mat:
    if not m:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*m)]


def to_float(m) -> np.ndarray:
    return np.array([[embed(x) for x in row] for row in m], dtype=float)


def vec_to_float(x) -> np.ndarray:
    return np.array([embed(a) for a in x], dtype=float)


def rref(m: Mat) -> tuple[Mat, list[int]]:
    """Reduced row echelon form with the zero rows removed, and pivot columns.

    Unique for the row space, so it doubles as the canonical subspace basis.
    """
    rows = [list(r) for r in m]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if not rows[i][c].is_zero()), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inv()
        rows[r] = [inv * x for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(m: Mat) -> int:
    return len(rref(m)[1]) if m else 0


def nullspace(m: Mat, ncols: int) -> Mat:
    """Basis of ``{x : m x = 0}`` (rows of the result)."""
    if not m:
        return [[Scalar(1) if i == j else Scalar(0) for j in range(ncols)] for i in range(ncols)]
    red, pivots = rref(m)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = zeros(ncols)
        v[f] = Scalar(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(m: Mat, b, ncols: int) -> Vec | None:
    """One solution of ``m x = b`` or ``None`` if inconsistent."""
    aug = [list(row) + [bi] for row, bi in zip(m, b)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = zeros(ncols)
    for row, p in zip(red, pivots):
        x[p] = row[ncols]
    return x


def span_basis(vectors: Mat) -> Mat:
    """Canonical (rref) basis of the span."""
    if not vectors:
        return []
    return rref(vectors)[0]


def in_span(basis: Mat, x) -> bool:
    if is_zero_vec(x):
        return True
    if not basis:
        return False
    return rank(list(basis) + [list(x)]) == rank(basis)


def orthogonal_complement(basis: Mat, n: int) -> Mat:
    """Basis of the Euclidean orthogonal complement (the annihilator, under
    the standard identification of R^n with its dual)."""
    return span_basis(nullspace(basis, n)) if basis else span_basis(nullspace([], n))


def project_off(basis: Mat, x) -> Vec:
    """Orthogonal projection of ``x`` onto the complement of span(basis)."""
    if not basis:
        return list(x)
    gram = [[dot(u, v) for v in basis] for u in basis]
    rhs = [dot(u, x) for u in basis]
    coeffs = solve(gram, rhs, len(basis))
    out = list(x)
    for c, u in zip(coeffs, basis):
        out = vsub(out, vscale(c, u))
    return out


def intersect(a: Mat, b: Mat, n: int) -> Mat:
    """Basis of span(a) ∩ span(b)."""
    if not a or not b:
        return []
    ca = orthogonal_complement(a, n)
    cb = orthogonal_complement(b, n)
    eqs = ca + cb
    if not eqs:
        return span_basis([[Scalar(int(i == j)) for j in range(n)] for i in range(n)])
    return span_basis(nullspace(eqs, n))


def inverse(m: Mat) -> Mat:
    n = len(m)
    aug = [list(row) + [Scalar(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


# -- integer lattices --------------------------------------------------------

def _clear_denominators(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], int]:
    den = 1
    for row in rows:
        for x in row:
            den = lcm(den, Fraction(x).denominator)
    return [[int(Fraction(x) * den) for x in row] for row in rows], den


def hnf(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row Hermite normal form of the lattice spanned by integer rows.

    Zero rows dropped; pivots positive; entries above a pivot reduced into
    ``[0, pivot)``.  Canonical for the lattice.
    """
    return hnf_with_transform(rows)[0]


def hnf_with_transform(rows: Sequence[Sequence[int]]):
    """HNF plus a unimodular ``U`` with ``U @ rows`` = [H; 0].

    Returns ``(H, U, k)`` where ``H`` has ``k`` rows and the last
    ``len(rows) - k`` rows of ``U`` span the integer left kernel.
    """
    a = [list(map(int, r)) for r in rows]
    m = len(a)
    if m == 0:
        return [], [], 0
    n = len(a[0])
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        # gcd-eliminate column c below row r
        while True:
            nz = [i for i in range(r, m) if a[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[p] = a[p], a[r]
            u[r], u[p] = u[p], u[r]
            done = True
            for i in range(r + 1, m):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if r < m and a[r][c] != 0:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
                u[r] = [-x for x in u[r]]
            for i in range(r):
                q = a[i][c] // a[r][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
            r += 1
            if r == m:
                break
    return a[:r], u, r


def integer_kernel(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[list[int]]:
    """Saturated Z-basis of ``{z in Z^ncols : rows @ z = 0}`` in HNF."""
    if not rows:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    ints, _ = _clear_denominators(rows)
    cols = [[ints[i][j] for i in range(len(ints))] for j in range(ncols)]
    _, u, k = hnf_with_transform(cols)
    ker = u[k:]
    return hnf(ker) if ker else []


def rational_hnf(rows: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Canonical basis of the Z-module spanned by rational rows."""
    if not rows:
        return []
    ints, den = _clear_denominators(rows)
    return [[Fraction(x, den) for x in row] for row in hnf(ints)]


def content(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def determinant(m: Mat) -> Scalar:
    """Exact determinant by Gaussian elimination over the field."""
    a = [list(r) for r in m]
    n = len(a)
    det = Scalar(1)
    for c in range(n):
        p = next((i for i in range(c, n) if not a[i][c].is_zero()), None)
        if p is None:
            return Scalar(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det = det * a[c][c]
        inv = a[c][c].inv()
        for i in range(c + 1, n):
            if not a[i][c].is_zero():
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det
