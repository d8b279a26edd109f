"""Closed subgroups of R^n with entries in Q(sqrt(d)), and cylinder quotients.

The closure of a finitely generated subgroup is computed as its double
annihilator ``H** = {x : <x, y> in Z for all y in H*}``.  Both dual
computations are exact: writing vectors in rational coordinates
``a + b sqrt(d)`` turns every irrational pairing constraint into a pair of
rational ones, so integrality is decided with integer lattices and the rest
with exact kernels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np

from . import linalg as la
from .scalars import Scalar, format_scalar, parse_scalar


class NotClosedError(ValueError):
    pass


# -- rational coordinates ----------------------------------------------------

def _field_of(vectors: Iterable[Sequence[Scalar]]) -> int:
    d = 0
    for v in vectors:
        for x in v:
            if x.b != 0:
                if d and d != x.d:
                    raise ValueError("vectors from different quadratic fields")
                d = x.d
    return d


def to_rational_coords(v: Sequence[Scalar]) -> list[Fraction]:
    return [x.a for x in v] + [x.b for x in v]


def from_rational_coords(c: Sequence[Fraction], d: int) -> list[Scalar]:
    n = len(c) // 2
    if d == 0:
        if any(c[n:]):
            raise ValueError("irrational coordinates in a rational model")
        return [Scalar(a) for a in c[:n]]
    return [Scalar(c[i], c[n + i], d) for i in range(n)]


def _is_integer(x: Scalar) -> bool:
    return x.b == 0 and x.a.denominator == 1


# -- subgroup types ----------------------------------------------------------

@dataclass(frozen=True)
class GeneratedSubgroup:
    """Z-span of finitely many covectors (possibly redundant, possibly zero)."""

    n: int
    generators: tuple = ()

    def __post_init__(self):
        gens = tuple(tuple(Scalar.coerce(x) for x in g) for g in self.generators)
        for g in gens:
            if len(g) != self.n:
                raise ValueError(f"generator of length {len(g)} in R^{self.n}")
        object.__setattr__(self, "generators", gens)

    @property
    def d(self) -> int:
        return _field_of(self.generators)

    def nonzero(self) -> list[list[Scalar]]:
        return [list(g) for g in self.generators if not la.is_zero_vec(g)]

    def as_float(self) -> np.ndarray:
        return la.to_float(self.generators) if self.generators else np.zeros((0, self.n))

    def __str__(self):
        return "\n".join("(" + ", ".join(format_scalar(x) for x in g) + ")" for g in self.generators)


@dataclass(frozen=True)
class ClosedSubgroup:
    """``V ⊕ Λ``: a subspace plus a lattice kept orthogonal to it.

    Instances built through :meth:`make` are canonical (rref ``V``, ``Λ``
    projected off ``V`` and put in Hermite normal form in rational
    coordinates), so equal subgroups compare equal field by field.
    """

    n: int
    V_basis: tuple = ()
    Lambda_basis: tuple = ()
    d: int = 0

    @classmethod
    def make(cls, n: int, V, Lam, d: int | None = None) -> "ClosedSubgroup":
        V = [list(map(Scalar.coerce, v)) for v in V]
        Lam = [list(map(Scalar.coerce, v)) for v in Lam]
        if d is None:
            d = _field_of(V + Lam)
        Vb = la.span_basis(V)
        proj = [la.project_off(Vb, v) for v in Lam]
        proj = [p for p in proj if not la.is_zero_vec(p)]
        hn = la.rational_hnf([to_rational_coords(p) for p in proj])
        Lb = [from_rational_coords(row, d) for row in hn]
        if Lb and la.rank(Lb) != len(Lb):
            raise NotClosedError("lattice part is not discrete modulo V")
        return cls(n, tuple(map(tuple, Vb)), tuple(map(tuple, Lb)), d)

    @classmethod
    def trivial(cls, n: int) -> "ClosedSubgroup":
        return cls(n)

    @property
    def dim_V(self) -> int:
        return len(self.V_basis)

    @property
    def rank_Lambda(self) -> int:
        return len(self.Lambda_basis)

    def is_discrete(self) -> bool:
        return not self.V_basis

    def contains(self, x: Sequence[Scalar]) -> bool:
        """Exact membership: the Λ-coordinates of x's projection off V are integers."""
        x = [Scalar.coerce(a) for a in x]
        p = la.project_off([list(v) for v in self.V_basis], x)
        if la.is_zero_vec(p):
            return True
        if not self.Lambda_basis:
            return False
        cols = la.transpose([list(v) for v in self.Lambda_basis])
        c = la.solve(cols, p, len(self.Lambda_basis))
        return c is not None and all(_is_integer(ci) for ci in c)

    def contains_subgroup(self, other: "ClosedSubgroup") -> bool:
        V = [list(v) for v in self.V_basis]
        if any(not la.in_span(V, v) for v in other.V_basis):
            return False
        return all(self.contains(l) for l in other.Lambda_basis)

    def generating_set(self) -> GeneratedSubgroup:
        """Finite generators whose closure is this subgroup."""
        gens = [list(l) for l in self.Lambda_basis]
        if self.V_basis:
            if self.d == 0:
                raise ValueError("a nonzero subspace has no finite generating set over Q")
            r = Scalar(0, 1, self.d)
            for v in self.V_basis:
                gens.append(list(v))
                gens.append([r * x for x in v])
        return GeneratedSubgroup(self.n, tuple(map(tuple, gens)))

    def float_bases(self) -> tuple[np.ndarray, np.ndarray]:
        V = la.to_float(self.V_basis) if self.V_basis else np.zeros((0, self.n))
        L = la.to_float(self.Lambda_basis) if self.Lambda_basis else np.zeros((0, self.n))
        return V, L

    def distance(self, points: np.ndarray) -> np.ndarray:
        """Euclidean distance of float points (rows) to the subgroup."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        V, L = self.float_bases()
        if len(V):
            q, _ = np.linalg.qr(V.T)
            pts = pts - (pts @ q) @ q.T
            L = L - (L @ q) @ q.T
        if not len(L):
            return np.linalg.norm(pts, axis=1)
        L = _lll_float(L)
        coeffs, *_ = np.linalg.lstsq(L.T, pts.T, rcond=None)
        base = np.round(coeffs.T)
        k = len(L)
        offsets = np.array(np.meshgrid(*[[-1, 0, 1]] * k, indexing="ij")).reshape(k, -1).T
        best = np.full(len(pts), np.inf)
        for off in offsets:
            r = pts - (base + off) @ L
            best = np.minimum(best, np.linalg.norm(r, axis=1))
        return best

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "V": [[format_scalar(x) for x in v] for v in self.V_basis],
            "Lambda": [[format_scalar(x) for x in v] for v in self.Lambda_basis],
        }

    def __str__(self):
        fmt = lambda v: "(" + ", ".join(format_scalar(x) for x in v) + ")"
        V = ", ".join(fmt(v) for v in self.V_basis) or "0"
        L = ", ".join(fmt(v) for v in self.Lambda_basis) or "0"
        return f"V = span{{{V}}}, Lambda = Z{{{L}}}"


def _lll_float(B: np.ndarray, delta: float = 0.75) -> np.ndarray:
    """Small LLL on float rows; only used for nearest-point searches."""
    B = np.array(B, dtype=float)
    k = 1
    n = len(B)

    def gso(B):
        Q = np.zeros_like(B)
        mu = np.zeros((n, n))
        for i in range(n):
            v = B[i].copy()
            for j in range(i):
                mu[i, j] = B[i] @ Q[j] / (Q[j] @ Q[j])
                v -= mu[i, j] * Q[j]
            Q[i] = v
        return Q, mu

    Q, mu = gso(B)
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k, j])
            if q:
                B[k] -= q * B[j]
                Q, mu = gso(B)
        if Q[k] @ Q[k] >= (delta - mu[k, k - 1] ** 2) * (Q[k - 1] @ Q[k - 1]):
            k += 1
        else:
            B[[k, k - 1]] = B[[k - 1, k]]
            Q, mu = gso(B)
            k = max(k - 1, 1)
    return B


# -- duality and closure -----------------------------------------------------

def _dual_of(n: int, W: list, gens: list, d: int) -> ClosedSubgroup:
    """``{y : y ⊥ W, <y, g> in Z for every generator g}``."""
    W = la.span_basis(W)
    gp = [la.project_off(W, g) for g in gens]
    gp = [g for g in gp if not la.is_zero_vec(g)]
    if not gp:
        return ClosedSubgroup.make(n, la.orthogonal_complement(W, n), [], d)

    # Z-basis of the generated group, through its rational coordinates
    ells = la.rational_hnf([to_rational_coords(g) for g in gp])
    A_cols = [from_rational_coords(row, d) for row in ells]  # r vectors in K^n
    r = len(A_cols)
    A = la.transpose(A_cols)  # n x r

    # Z^r ∩ im(A^T) = Z^r ∩ (ker A)^⊥, using rational and irrational parts
    ker = la.nullspace(A, r)
    cons = []
    for k in ker:
        p = [x.a for x in k]
        q = [x.b for x in k]
        if any(p):
            cons.append(p)
        if any(q):
            cons.append(q)
    Z = la.integer_kernel(cons, r)

    S = la.span_basis(A_cols)
    M = [[la.dot(a, s) for s in S] for a in A_cols]  # r x t, equals A^T C^T
    ys = []
    for z in Z:
        c = la.solve(M, [Scalar(zi) for zi in z], len(S))
        if c is None:
            raise ArithmeticError("inconsistent dual system")
        y = la.zeros(n)
        for ci, s in zip(c, S):
            y = la.vadd(y, la.vscale(ci, s))
        ys.append(y)
    sub = la.orthogonal_complement(S + W, n) if (S + W) else la.orthogonal_complement([], n)
    return ClosedSubgroup.make(n, sub, ys, d)


def annihilator_dual(G: GeneratedSubgroup | ClosedSubgroup) -> ClosedSubgroup:
    if isinstance(G, ClosedSubgroup):
        return _dual_of(G.n, [list(v) for v in G.V_basis], [list(v) for v in G.Lambda_basis], G.d)
    return _dual_of(G.n, [], G.nonzero(), G.d)


def closure(G: GeneratedSubgroup) -> ClosedSubgroup:
    """Topological closure of the Z-span of ``G``'s generators."""
    if discreteness_test(G):
        return ClosedSubgroup.make(G.n, [], G.nonzero(), G.d)
    return annihilator_dual(annihilator_dual(G))


def closed_sum(H: ClosedSubgroup, subspace: Sequence[Sequence[Scalar]]) -> ClosedSubgroup:
    """Closure of ``H + subspace``."""
    W = [list(v) for v in H.V_basis] + [list(map(Scalar.coerce, v)) for v in subspace]
    d = _field_of(W + [list(v) for v in H.Lambda_basis])
    dual = _dual_of(H.n, W, [list(v) for v in H.Lambda_basis], d)
    return annihilator_dual(dual)


def preimage(M: Sequence[Sequence[Scalar]], H: ClosedSubgroup) -> ClosedSubgroup:
    """``{u in R^m : M u in H}`` for an exact ``n x m`` matrix ``M``."""
    M = la.as_scalars(M)
    m = len(M[0])
    Mt = la.transpose(M)
    dual = annihilator_dual(H)
    img_sub = [la.matvec(Mt, list(v)) for v in dual.V_basis]
    img_gen = [la.matvec(Mt, list(v)) for v in dual.Lambda_basis]
    d = _field_of([list(r) for r in M]) or H.d
    return _dual_of(m, [v for v in img_sub if not la.is_zero_vec(v)], img_gen, d)


def discreteness_test(G: GeneratedSubgroup) -> bool:
    """Q-rank of the rational coordinates equals the real rank."""
    gens = G.nonzero()
    if not gens:
        return True
    q_rank = len(la.rational_hnf([to_rational_coords(g) for g in gens]))
    return q_rank == la.rank(gens)


def lie_of(H: ClosedSubgroup) -> list[list[Scalar]]:
    return [list(v) for v in H.V_basis]


def annihilator_in_g(V: Sequence[Sequence[Scalar]], n: int) -> list[list[Scalar]]:
    """Annihilator of a subspace of g* inside g (exact)."""
    return la.orthogonal_complement([list(v) for v in V], n)


# -- cylinders ---------------------------------------------------------------

@dataclass(frozen=True)
class CylinderPoint:
    free: np.ndarray
    angles: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "free", np.asarray(self.free, dtype=float))
        object.__setattr__(self, "angles", np.mod(np.asarray(self.angles, dtype=float), 1.0))

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.free, self.angles])

    def to_json(self) -> dict:
        return {"free": self.free.tolist(), "angles": self.angles.tolist()}


def wrap(x):
    """Representative of ``x mod 1`` in ``[-1/2, 1/2)``."""
    return np.mod(np.asarray(x) + 0.5, 1.0) - 0.5


@dataclass(frozen=True)
class Cylinder:
    """``R^n / H`` for a closed ``H = V ⊕ Λ``, with adapted coordinates.

    Free coordinates are the components along ``W = (V + span Λ)^⊥``; angle
    coordinates are the Λ-coefficients of the projection onto ``span Λ``,
    taken mod 1.  ``scale`` divides the lattice part, for holonomy groups
    measured in units such as ``2π``.
    """

    subgroup: ClosedSubgroup
    scale: float = 1.0
    W_basis: tuple = field(init=False)
    free_map: np.ndarray = field(init=False, repr=False)
    angle_map: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        H = self.subgroup
        n = H.n
        V = [list(v) for v in H.V_basis]
        L = [list(v) for v in H.Lambda_basis]
        W = la.orthogonal_complement(V + L, n) if (V + L) else la.orthogonal_complement([], n)
        object.__setattr__(self, "W_basis", tuple(map(tuple, W)))
        object.__setattr__(self, "free_map", _coefficient_map(W, n))
        object.__setattr__(self, "angle_map", _coefficient_map(L, n) / self.scale)

    @property
    def n(self) -> int:
        return self.subgroup.n

    @property
    def free_rank(self) -> int:
        return len(self.W_basis)

    @property
    def torus_rank(self) -> int:
        return self.subgroup.rank_Lambda

    def project(self, mu) -> CylinderPoint:
        mu = _floatvec(mu)
        return CylinderPoint(self.free_map @ mu, self.angle_map @ mu)

    def lift_coords(self, mu) -> np.ndarray:
        """Unreduced coordinates (angles not taken mod 1)."""
        mu = _floatvec(mu)
        return np.concatenate([self.free_map @ mu, self.angle_map @ mu])

    def tangent_project(self, nu) -> np.ndarray:
        return self.lift_coords(nu)

    def tangent_matrix(self) -> np.ndarray:
        return np.vstack([self.free_map, self.angle_map])

    def add(self, p: CylinderPoint, q: CylinderPoint) -> CylinderPoint:
        return CylinderPoint(p.free + q.free, p.angles + q.angles)

    def sub(self, p: CylinderPoint, q: CylinderPoint) -> CylinderPoint:
        return CylinderPoint(p.free - q.free, p.angles - q.angles)

    def zero(self) -> CylinderPoint:
        return CylinderPoint(np.zeros(self.free_rank), np.zeros(self.torus_rank))

    def distance(self, p: CylinderPoint, q: CylinderPoint) -> float:
        df = np.max(np.abs(p.free - q.free), initial=0.0)
        da = np.max(np.abs(wrap(p.angles - q.angles)), initial=0.0)
        return float(max(df, da))

    def unwrapped_difference(self, p: CylinderPoint, q: CylinderPoint) -> np.ndarray:
        return np.concatenate([p.free - q.free, wrap(p.angles - q.angles)])


def _coefficient_map(basis: list, n: int) -> np.ndarray:
    """Float matrix sending x to the coefficients of its orthogonal projection
    onto span(basis), expressed in that basis (exact until the last step)."""
    if not basis:
        return np.zeros((0, n))
    gram = [[la.dot(u, v) for v in basis] for u in basis]
    ginv = la.inverse(gram)
    rows = []
    for i in range(len(basis)):
        row = la.zeros(n)
        for j, b in enumerate(basis):
            row = la.vadd(row, la.vscale(ginv[i][j], b))
        rows.append(row)
    return la.to_float(rows)


def _floatvec(x) -> np.ndarray:
    if len(x) and isinstance(x[0], Scalar):
        return la.vec_to_float(x)
    return np.asarray(x, dtype=float)


# -- rationalization of numeric generators -----------------------------------

def rationalize(x: float, d: int, tol: float = 1e-6, maxcoeff: int = 1000) -> Scalar:
    """Nearest small-height element of Q(sqrt(d)) to ``x`` (integer relation search)."""
    if abs(x) <= tol:
        return Scalar(0)
    basis = [mpmath.mpf(x), mpmath.mpf(1)]
    if d:
        basis.append(mpmath.sqrt(d))
    with mpmath.workdps(30):
        rel = mpmath.pslq(basis, tol=tol, maxcoeff=maxcoeff, maxsteps=10_000)
    if rel is None or rel[0] == 0:
        raise ValueError(f"no relation for {x!r} in Q(sqrt({d})) at tolerance {tol}")
    p = rel[0]
    a = Fraction(-rel[1], p)
    b = Fraction(-rel[2], p) if d else Fraction(0)
    s = Scalar(a, b, d)
    if abs(float(s) - x) > tol:
        raise ValueError(f"relation for {x!r} misses by more than {tol}")
    return s


def rationalize_vector(v: Sequence[float], d: int, tol: float = 1e-6) -> list[Scalar]:
    return [rationalize(float(x), d, tol) for x in v]


def parse_generator_line(line: str, d: int | None = None) -> list[Scalar]:
    """``(s1, s2, ...)`` or whitespace/semicolon separated Scalar strings."""
    body = line.strip()
    if body[:1] in "([" and body[-1:] in ")]":
        body = body[1:-1]
    parts = [p for p in (body.split(",") if "," in body else body.replace(";", " ").split()) if p.strip()]
    return [parse_scalar(p.strip(), d) for p in parts]


def intersect_closed(A: ClosedSubgroup, B: ClosedSubgroup) -> ClosedSubgroup:
    """``A ∩ B``, as the dual of ``A* + B*``."""
    if A.n != B.n:
        raise ValueError("ambient dimensions differ")
    Ad, Bd = annihilator_dual(A), annihilator_dual(B)
    W = [list(v) for v in Ad.V_basis + Bd.V_basis]
    L = [list(v) for v in Ad.Lambda_basis + Bd.Lambda_basis]
    d = A.d or B.d
    return _dual_of(A.n, W, L, d)


def subgroup_index(P: ClosedSubgroup, Q: ClosedSubgroup) -> int | None:
    """``[P : Q]`` for closed ``Q ⊂ P``; ``None`` when infinite."""
    if not P.contains_subgroup(Q):
        raise ValueError("Q is not contained in P")
    if Q.dim_V != P.dim_V or Q.rank_Lambda != P.rank_Lambda:
        return None
    if not P.Lambda_basis:
        return 1
    cols = la.transpose([list(v) for v in P.Lambda_basis])
    rows = []
    for q in Q.Lambda_basis:
        c = la.solve(cols, la.project_off([list(v) for v in P.V_basis], list(q)), P.rank_Lambda)
        rows.append(c)
    det = la.determinant(rows)
    return abs(int(det.a))
