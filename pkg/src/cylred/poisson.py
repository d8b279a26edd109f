"""Affine Lie–Poisson brackets on g*, the projected bracket on the cylinder,
the Chu map, characteristic distributions and symplectic leaves.

Sign convention: ``{f,g}±^Σ(μ) = ±<μ,[df,dg]> ∓ Σ(df,dg)``.  The bracket
that descends to ``g*/H̄`` and makes K a Poisson map is the ``+`` bracket
with the cocycle ``-Ψ``; for magnetic models ``Ψ = -Σ``, so it is ``{·,·}₊^Σ``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from . import linalg as la
from .lie import LieAlgebra, TwoCocycle
from .models import MagneticCotangentModel, SymplecticModel
from .momentum import MomentumMapInstance, PreconditionError, numerical_rank
from .scalars import Scalar
from .subgroups import ClosedSubgroup, CylinderPoint, closed_sum

BRACKET_SIGN = +1


# -- polynomial observables on g* -------------------------------------------

class PolyObservable:
    """Polynomial in the linear coordinates of g* with exact coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict | None = None):
        self.n = n
        self.terms = {k: Scalar.coerce(v) for k, v in (terms or {}).items() if not Scalar.coerce(v).is_zero()}

    @classmethod
    def constant(cls, n, c) -> "PolyObservable":
        return cls(n, {(0,) * n: c})

    @classmethod
    def coordinate(cls, n, i) -> "PolyObservable":
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): Scalar(1)})

    @classmethod
    def monomial(cls, exps, c=1) -> "PolyObservable":
        return cls(len(exps), {tuple(exps): c})

    def __add__(self, other):
        if not isinstance(other, PolyObservable):
            other = PolyObservable.constant(self.n, other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Scalar(0)) + v
        return PolyObservable(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return PolyObservable(self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, PolyObservable):
            c = Scalar.coerce(other)
            return PolyObservable(self.n, {k: v * c for k, v in self.terms.items()})
        out: dict = {}
        for (k1, v1), (k2, v2) in product(self.terms.items(), other.terms.items()):
            k = tuple(a + b for a, b in zip(k1, k2))
            out[k] = out.get(k, Scalar(0)) + v1 * v2
        return PolyObservable(self.n, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, PolyObservable) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def derivative(self, i) -> "PolyObservable":
        out = {}
        for k, v in self.terms.items():
            if k[i]:
                kk = list(k)
                kk[i] -= 1
                out[tuple(kk)] = v * k[i]
        return PolyObservable(self.n, out)

    def grad(self) -> list["PolyObservable"]:
        return [self.derivative(i) for i in range(self.n)]

    def __call__(self, mu) -> Scalar:
        mu = [Scalar.coerce(x) for x in mu]
        acc = Scalar(0)
        for k, v in self.terms.items():
            t = v
            for x, e in zip(mu, k):
                if e:
                    t = t * x ** e
            acc = acc + t
        return acc

    def grad_at(self, mu) -> list[Scalar]:
        return [g(mu) for g in self.grad()]

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, v in sorted(self.terms.items()):
            mon = "*".join(f"mu{i + 1}^{e}" if e > 1 else f"mu{i + 1}" for i, e in enumerate(k) if e)
            parts.append(f"({v})" + (f"*{mon}" if mon else ""))
        return " + ".join(parts)


def _coord_brackets(alg: LieAlgebra, sigma: TwoCocycle, sign: int):
    n = alg.dim
    P = {}
    for i in range(n):
        for j in range(n):
            lin = {tuple(int(k == l) for l in range(n)): alg.c[i][j][k] * sign for k in range(n)}
            p = PolyObservable(n, lin) + PolyObservable.constant(n, -sign * sigma.matrix[i][j])
            P[i, j] = p
    return P


def bracket_poly(alg: LieAlgebra, sigma: TwoCocycle, f: PolyObservable, g: PolyObservable,
                 sign: int = BRACKET_SIGN) -> PolyObservable:
    """``{f, g}±^Σ`` as a polynomial (exact)."""
    P = _coord_brackets(alg, sigma, sign)
    df, dg = f.grad(), g.grad()
    out = PolyObservable(f.n)
    for i in range(f.n):
        if df[i].is_zero():
            continue
        for j in range(f.n):
            if dg[j].is_zero() or P[i, j].is_zero():
                continue
            out = out + df[i] * dg[j] * P[i, j]
    return out


def affine_lp_bracket(alg: LieAlgebra, sigma: TwoCocycle, f: PolyObservable, g: PolyObservable,
                      mu, sign: int = BRACKET_SIGN) -> Scalar:
    """``±<μ,[df,dg]> ∓ Σ(df,dg)`` at an exact point."""
    mu = [Scalar.coerce(x) for x in mu]
    df, dg = f.grad_at(mu), g.grad_at(mu)
    return la.dot(mu, alg.bracket(df, dg)) * sign - sigma(df, dg) * sign


def affine_bracket_grads(alg_c: np.ndarray, sigma: np.ndarray, df, dg, mu, sign: int = BRACKET_SIGN) -> float:
    """Float version from gradients; ``alg_c[i,j,k]`` structure constants."""
    br = np.einsum("i,j,ijk->k", df, dg, alg_c)
    return float(sign * (mu @ br) - sign * (df @ sigma @ dg))


# -- cylinder observables ----------------------------------------------------

@dataclass(frozen=True)
class CylTerm:
    coeff: float
    free_exps: tuple
    freqs: tuple
    kind: str  # "cos" or "sin"


class CylObservable:
    """Sum of ``c · Π x_i^{k_i} · trig(2π <n, θ>)`` over free coordinates
    ``x`` and angles ``θ`` (integer frequencies ``n``)."""

    def __init__(self, a: int, b: int, terms: Sequence[CylTerm]):
        self.a, self.b = a, b
        for t in terms:
            if len(t.free_exps) != a or len(t.freqs) != b or t.kind not in ("cos", "sin"):
                raise ValueError(f"bad term {t}")
            if any(int(k) != k for k in t.freqs):
                raise PreconditionError("angle frequencies must be integers for H̄-invariance")
        self.terms = list(terms)

    @classmethod
    def constant(cls, a, b, c) -> "CylObservable":
        return cls(a, b, [CylTerm(float(c), (0,) * a, (0,) * b, "cos")])

    @classmethod
    def random(cls, a, b, rng, nterms: int = 3, max_deg: int = 2, max_freq: int = 2) -> "CylObservable":
        terms = []
        for _ in range(nterms):
            terms.append(CylTerm(
                float(rng.normal()),
                tuple(int(x) for x in rng.integers(0, max_deg + 1, size=a)),
                tuple(int(x) for x in rng.integers(-max_freq, max_freq + 1, size=b)),
                "cos" if rng.random() < 0.5 else "sin",
            ))
        return cls(a, b, terms)

    def value(self, x, theta):
        """Works on complex input (for complex-step derivatives)."""
        total = 0
        for t in self.terms:
            mono = 1
            for xi, k in zip(x, t.free_exps):
                mono = mono * xi ** k
            phase = 2 * np.pi * sum(n * th for n, th in zip(t.freqs, theta))
            trig = np.cos(phase) if t.kind == "cos" else np.sin(phase)
            total = total + t.coeff * mono * trig
        return total

    def __call__(self, p: CylinderPoint) -> float:
        return float(np.real(self.value(p.free, p.angles)))

    def grad(self, x, theta) -> tuple[np.ndarray, np.ndarray]:
        gx = np.zeros(self.a)
        gt = np.zeros(self.b)
        x = np.asarray(x, float)
        theta = np.asarray(theta, float)
        for t in self.terms:
            k = np.array(t.free_exps, dtype=float)
            mono = float(np.prod(x ** k)) if self.a else 1.0
            phase = 2 * np.pi * float(np.dot(t.freqs, theta)) if self.b else 0.0
            c, s = np.cos(phase), np.sin(phase)
            trig, dtrig = (c, -s) if t.kind == "cos" else (s, c)
            for i in range(self.a):
                if k[i]:
                    kk = k.copy()
                    kk[i] -= 1
                    gx[i] += t.coeff * k[i] * float(np.prod(x ** kk)) * trig
            gt += t.coeff * mono * dtrig * 2 * np.pi * np.asarray(t.freqs, dtype=float)
        return gx, gt


def pullback(inst: MomentumMapInstance, f: CylObservable, mu) -> float:
    C = inst.cylinder
    mu = np.asarray(mu)
    return f.value(C.free_map @ mu, C.angle_map @ mu)


def pullback_grad(inst: MomentumMapInstance, f: CylObservable, mu) -> np.ndarray:
    """``δ(f∘π_C)/δμ``."""
    C = inst.cylinder
    mu = np.asarray(mu, dtype=float)
    gx, gt = f.grad(C.free_map @ mu, C.angle_map @ mu)
    return C.free_map.T @ gx + C.angle_map.T @ gt


def check_invariant(inst: MomentumMapInstance, f: CylObservable, mu, tol: float = 1e-9) -> float:
    """Max change of the pullback under the H̄ basis (V and Λ directions)."""
    H = inst.subgroup
    V, L = H.float_bases()
    base = pullback(inst, f, mu)
    worst = 0.0
    for h in list(V * 0.731) + list(L * inst.cylinder.scale):
        worst = max(worst, abs(pullback(inst, f, np.asarray(mu) + h) - base))
    if worst > tol:
        raise PreconditionError(f"observable is not H̄-invariant (change {worst:.3g})")
    return worst


# -- Chu map -----------------------------------------------------------------

@dataclass
class ChuValue:
    matrix: np.ndarray
    exact: list | None = None
    shortcut: bool = False

    def __call__(self, xi, eta) -> float:
        return float(np.asarray(xi) @ self.matrix @ np.asarray(eta))


def chu_map(model: SymplecticModel, m=None) -> ChuValue:
    """``Ψ(m)(ξ,η) = ω(ξ_M, η_M)``; constant ``-Σ`` for magnetic models."""
    if isinstance(model, MagneticCotangentModel):
        return ChuValue(model.chu(), model.chu_exact(), shortcut=m is None)
    if m is None:
        raise ValueError("toy models need a phase point for the Chu map")
    return ChuValue(model.chu(m))


def chu_assembled(model: SymplecticModel, m) -> np.ndarray:
    """Ψ assembled from ``omega()`` and ``generator()`` one pair at a time."""
    n = model.alg_dim
    E = np.eye(n)
    W = model.omega(m)
    return np.array([[model.generator(E[i], m) @ W @ model.generator(E[j], m) for j in range(n)]
                     for i in range(n)])


def _structure_array(model: SymplecticModel) -> np.ndarray:
    n = model.alg_dim
    if isinstance(model, MagneticCotangentModel):
        c = model.cocycle.algebra.c
        return np.array([[[float(c[i][j][k]) for k in range(n)] for j in range(n)] for i in range(n)])
    return np.zeros((n, n, n))


def projected_bracket(inst: MomentumMapInstance, f: CylObservable, g: CylObservable, mu,
                      m=None, check: bool = True) -> float:
    """``{f,g}(π_C μ) = Ψ(m)(δ(f∘π_C)/δμ, δ(g∘π_C)/δμ)``.

    Without a phase point the magnetic constant-Chu shortcut is used."""
    if check:
        check_invariant(inst, f, mu)
        check_invariant(inst, g, mu)
    psi = chu_map(inst.model, m)
    return psi(pullback_grad(inst, f, mu), pullback_grad(inst, g, mu))


def projected_bracket_via_affine(inst: MomentumMapInstance, f: CylObservable, g: CylObservable, mu) -> float:
    """The same bracket as ``{·,·}₊`` with cocycle ``-Ψ`` on the pullbacks."""
    psi = chu_map(inst.model, None if isinstance(inst.model, MagneticCotangentModel) else inst.ref)
    df, dg = pullback_grad(inst, f, mu), pullback_grad(inst, g, mu)
    return affine_bracket_grads(_structure_array(inst.model), -psi.matrix, df, dg, np.asarray(mu, float), +1)


# -- characteristic distribution and leaves ---------------------------------

def _n_images(inst: MomentumMapInstance, mu=None) -> list[list[Scalar]]:
    """``ad*_ξ μ - Σ(ξ,·)`` for ξ over a basis of n (Abelian: ``Σ(·,ξ)``)."""
    model = inst.model
    nb = inst.n_basis()
    if isinstance(model, MagneticCotangentModel):
        out = []
        for xi in nb:
            v = [-x for x in model.cocycle.row(xi)]
            if mu is not None and not model.cocycle.algebra.is_abelian:
                v = la.vadd(v, model.cocycle.algebra.ad_star(xi, mu))
            out.append(v)
        return out
    raise ValueError("exact characteristic distribution needs a magnetic model")


@dataclass
class CharacteristicDistribution:
    directions: list  # exact covectors, projected off V
    tangent: np.ndarray  # rows: the same directions in cylinder tangent coordinates
    dim: int


def characteristic_distribution(inst: MomentumMapInstance, mu=None) -> CharacteristicDistribution:
    V = [list(v) for v in inst.subgroup.V_basis]
    imgs = [la.project_off(V, v) for v in _n_images(inst, mu)]
    dirs = la.span_basis([v for v in imgs if not la.is_zero_vec(v)])
    T = np.array([inst.cylinder.tangent_project(la.vec_to_float(v)) for v in dirs]) if dirs else \
        np.zeros((0, inst.cylinder.free_rank + inst.cylinder.torus_rank))
    return CharacteristicDistribution(dirs, T, len(dirs))


def characteristic_rank_bruteforce(inst: MomentumMapInstance) -> int:
    """Rank of the projected generator matrix (float)."""
    imgs = _n_images(inst)
    if not imgs:
        return 0
    M = np.array([inst.cylinder.tangent_project(la.vec_to_float(v)) for v in imgs])
    return numerical_rank(M, 1e-9)


@dataclass
class LeafReport:
    base: CylinderPoint
    directions: list
    dim: int
    orbit_closure: ClosedSubgroup

    def contains(self, inst: MomentumMapInstance, mu_base, mu_other, tol: float = 1e-9) -> bool:
        diff = np.asarray(mu_other, float) - np.asarray(mu_base, float)
        return bool(self.orbit_closure.distance(diff)[0] <= tol)


def symplectic_leaf(inst: MomentumMapInstance, mu) -> LeafReport:
    """Leaf through ``π_C(μ)``: ``π_C(μ + {Σ(·,ξ) : ξ ∈ n})``."""
    E = characteristic_distribution(inst, mu)
    orbit = closed_sum(inst.subgroup, E.directions) if E.directions else inst.subgroup
    return LeafReport(inst.cylinder.project(np.asarray(mu, float)), E.directions, E.dim, orbit)


def leaf_form(inst: MomentumMapInstance, xi, eta, m=None) -> float:
    return chu_map(inst.model, m)(xi, eta)


def leaf_form_matrix(inst: MomentumMapInstance, m=None) -> np.ndarray:
    nb = inst.n_basis()
    if not nb:
        return np.zeros((0, 0))
    N = la.to_float(nb)
    return N @ chu_map(inst.model, m).matrix @ N.T


def leaf_form_nondegenerate(inst: MomentumMapInstance, tol: float = 1e-10) -> tuple[int, int]:
    """(rank of the leaf form on n, leaf dimension); equal iff nondegenerate."""
    return numerical_rank(leaf_form_matrix(inst), tol), characteristic_distribution(inst).dim


# -- K is a Poisson map ------------------------------------------------------

def _complex_grad(F, m, h: float = 1e-20) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    g = np.empty(len(m))
    for k in range(len(m)):
        e = np.zeros(len(m), dtype=complex)
        e[k] = 1j * h
        g[k] = np.imag(F(m + e)) / h
    return g


def _lifted(inst: MomentumMapInstance, f: CylObservable):
    C = inst.cylinder
    model = inst.model

    def F(m):
        n = model.alg_dim
        mu = m[n:] - model.sigma @ m[:n] + inst.nu0
        return f.value(C.free_map @ mu, C.angle_map @ mu)

    return F


def verify_poisson_map_K(inst: MomentumMapInstance, f: CylObservable, g: CylObservable, m) -> float:
    """``|{f∘K, g∘K}_M(m) - {f,g}(K(m))|``; the left side uses Hamiltonian
    vector fields of ω and complex-step gradients."""
    if not inst.closed_form:
        raise ValueError("Poisson-map check implemented for magnetic models")
    model = inst.model
    m = np.asarray(m, dtype=float)
    gF = _complex_grad(_lifted(inst, f), m)
    gG = _complex_grad(_lifted(inst, g), m)
    XF = np.linalg.solve(model.omega(m).T, gF)
    XG = np.linalg.solve(model.omega(m).T, gG)
    lhs = XF @ model.omega(m) @ XG
    rhs = projected_bracket(inst, f, g, inst.J(m), m, check=False)
    return float(abs(lhs - rhs))
