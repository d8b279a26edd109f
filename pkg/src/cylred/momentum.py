"""Cylinder-valued momentum maps and their companions.

For a magnetic model ``K(u, η) = π_C(η - Σ(·,u) + ν₀)`` in closed form.  For
toy models ``K(m) = π_C(ν₀ - μ̃(m))`` where ``μ̃`` is the horizontal lift along
the straight chart segment from a reference point; the minus sign turns the
lift into a momentum map for ``dK^ξ = i_{ξ_M} ω``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import null_space, subspace_angles

from . import linalg as la
from .holonomy import LoopPath, estimate_holonomy_generators, holonomy_generators, horizontal_lift
from .lie import UnsupportedModelError
from .models import ChartFunction, MagneticCotangentModel, SymplecticModel
from .scalars import Scalar
from .subgroups import (ClosedSubgroup, Cylinder, CylinderPoint, GeneratedSubgroup, annihilator_in_g,
                        closure, discreteness_test)


class PreconditionError(ValueError):
    pass


class NoGroupValuedMomentumMap(ValueError):
    pass


@dataclass
class MomentumMapInstance:
    model: SymplecticModel
    generators: GeneratedSubgroup
    subgroup: ClosedSubgroup
    cylinder: Cylinder
    nu0: np.ndarray
    approximate: bool = False
    ref: np.ndarray | None = None
    lift_steps: int = 64

    @property
    def n(self) -> int:
        return self.model.alg_dim

    @property
    def closed_form(self) -> bool:
        return isinstance(self.model, MagneticCotangentModel) and not self.approximate

    def J(self, m) -> np.ndarray:
        """A g*-valued local representative of K at ``m``."""
        m = np.asarray(m, dtype=float)
        if self.closed_form:
            u, eta = self.model.split(m)
            return eta - self.model.sigma @ u + self.nu0
        ref = np.zeros(self.model.chart_dim) if self.ref is None else self.ref
        _, mus = horizontal_lift(self.model, LoopPath.straight(ref, m), np.zeros(self.n), self.lift_steps)
        return self.nu0 - mus[-1]

    def J_batch(self, ms) -> np.ndarray:
        ms = np.atleast_2d(np.asarray(ms, dtype=float))
        if self.closed_form:
            n = self.n
            return ms[:, n:] - ms[:, :n] @ self.model.sigma.T + self.nu0
        return np.array([self.J(m) for m in ms])

    def K(self, m) -> CylinderPoint:
        return self.cylinder.project(self.J(m))

    def K_coords(self, ms) -> tuple[np.ndarray, np.ndarray]:
        """Batch K: (free, angles) arrays."""
        mu = self.J_batch(ms)
        C = self.cylinder
        return mu @ C.free_map.T, np.mod(mu @ C.angle_map.T, 1.0)

    def representative(self, p: CylinderPoint) -> np.ndarray:
        """Some μ with ``π_C(μ) = p``."""
        C = self.cylinder
        W = la.to_float(C.W_basis) if C.W_basis else np.zeros((0, self.n))
        L = la.to_float(self.subgroup.Lambda_basis) if self.subgroup.Lambda_basis else np.zeros((0, self.n))
        return p.free @ W + C.scale * (p.angles @ L)

    def tangent_to_dual(self, dfree, dangles) -> np.ndarray:
        C = self.cylinder
        W = la.to_float(C.W_basis) if C.W_basis else np.zeros((0, self.n))
        L = la.to_float(self.subgroup.Lambda_basis) if self.subgroup.Lambda_basis else np.zeros((0, self.n))
        return np.asarray(dfree) @ W + C.scale * (np.asarray(dangles) @ L)

    def n_basis(self) -> list[list[Scalar]]:
        return annihilator_in_g(self.subgroup.V_basis, self.n)


def build_instance(model: SymplecticModel, nu0=None, steps: int = 2000, tol: float = 1e-6,
                   ref=None) -> MomentumMapInstance:
    if isinstance(model, MagneticCotangentModel):
        gens = holonomy_generators(model)
        approx = False
    else:
        gens = estimate_holonomy_generators(model, steps, tol)
        approx = True
    H = closure(gens)
    C = Cylinder(H, model.holonomy_scale)
    nu0 = np.zeros(model.alg_dim) if nu0 is None else np.asarray(
        [float(x) for x in nu0], dtype=float)
    ref = None if ref is None else np.asarray(ref, dtype=float)
    return MomentumMapInstance(model, gens, H, C, nu0, approx, ref)


# -- cocycle and actions -----------------------------------------------------

def _require_abelian(inst: MomentumMapInstance):
    m = inst.model
    if isinstance(m, MagneticCotangentModel) and not m.cocycle.algebra.is_abelian:
        raise UnsupportedModelError("group-level actions need an Abelian group")


def sigma_cocycle(inst: MomentumMapInstance, u) -> CylinderPoint:
    """Non-equivariance cocycle ``σ(g) = K(g·m) - Ad*K(m)``; Abelian and
    closed form: ``π_C(-Σ(·,u))`` (the ``ν₀`` terms cancel)."""
    _require_abelian(inst)
    u = np.asarray(u, dtype=float)
    if inst.closed_form:
        return inst.cylinder.project(-inst.model.sigma @ u)
    m = np.zeros(inst.model.chart_dim) if inst.ref is None else inst.ref
    return inst.cylinder.sub(inst.K(inst.model.act(u, m)), inst.K(m))


def projected_coadjoint(inst: MomentumMapInstance, u, p: CylinderPoint) -> CylinderPoint:
    _require_abelian(inst)
    return p


def affine_action(inst: MomentumMapInstance, u, p: CylinderPoint) -> CylinderPoint:
    """``Θ_g(p) = 𝒜d*_{g⁻¹} p + σ(g)``."""
    return inst.cylinder.add(projected_coadjoint(inst, u, p), sigma_cocycle(inst, u))


def infinitesimal_affine_generator(inst: MomentumMapInstance, xi, mu, h: float = 1e-6) -> np.ndarray:
    """Central difference of ``t ↦ Θ_{exp tξ}(π_C μ)`` at 0 (unwrapped coordinates)."""
    C = inst.cylinder
    p = C.project(mu)
    xi = np.asarray(xi, dtype=float)
    a = affine_action(inst, h * xi, p)
    b = affine_action(inst, -h * xi, p)
    return C.unwrapped_difference(a, b) / (2 * h)


# -- Noether -----------------------------------------------------------------

def subalgebra_basis(inst: MomentumMapInstance, invariance: str) -> np.ndarray:
    if invariance == "G":
        return np.eye(inst.n)
    if invariance == "N":
        nb = inst.n_basis()
        return la.to_float(nb) if nb else np.zeros((0, inst.n))
    raise ValueError(f"invariance must be 'G' or 'N', got {invariance!r}")


def check_invariance(inst: MomentumMapInstance, H: ChartFunction, invariance: str,
                     rng=None, samples: int = 8, tol: float = 1e-10) -> float:
    rng = np.random.default_rng(0) if rng is None else rng
    B = subalgebra_basis(inst, invariance)
    worst = 0.0
    for _ in range(samples):
        m = inst.model.random_point(rng)
        g = H.grad(m)
        Gm = inst.model.generator_matrix(m)
        for xi in B:
            worst = max(worst, abs(float(g @ (Gm @ xi))))
    if worst > tol:
        raise PreconditionError(f"Hamiltonian is not {invariance}-invariant (derivative {worst:.3g})")
    return worst


def flow(model: SymplecticModel, H: ChartFunction, m0, T: float, steps: int, every: int = 1):
    """RK4 trajectory of ``X_H``; returns sampled points."""
    h = T / steps
    m = np.asarray(m0, dtype=float).copy()
    X = lambda x: model.hamiltonian_vector(x, H.grad(x))
    out = [m.copy()]
    for i in range(steps):
        k1 = X(m)
        k2 = X(m + h / 2 * k1)
        k3 = X(m + h / 2 * k2)
        k4 = X(m + h * k3)
        m = m + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if (i + 1) % every == 0:
            out.append(m.copy())
    return np.array(out)


def noether_drift(inst: MomentumMapInstance, H: ChartFunction, invariance: str, m0,
                  T: float = 10.0, steps: int = 10_000, rng=None) -> float:
    """Max cylinder distance of ``K(m(t))`` from ``K(m0)`` along the flow of ``H``."""
    check_invariance(inst, H, invariance, rng)
    traj = flow(inst.model, H, m0, T, steps, every=max(1, steps // 1000))
    C = inst.cylinder
    k0 = inst.K(m0)
    return max(C.distance(inst.K(m), k0) for m in traj)


# -- kernel and range --------------------------------------------------------

def K_jacobian(inst: MomentumMapInstance, m, h: float = 1e-6) -> np.ndarray:
    """Central differences in unwrapped cylinder coordinates."""
    m = np.asarray(m, dtype=float)
    C = inst.cylinder
    cols = []
    for j in range(len(m)):
        e = np.zeros_like(m)
        e[j] = h
        cols.append(C.unwrapped_difference(inst.K(m + e), inst.K(m - e)) / (2 * h))
    k = C.free_rank + C.torus_rank
    return np.array(cols).T if k else np.zeros((0, len(m)))


def numerical_rank(A: np.ndarray, tol: float = 1e-6) -> int:
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def kernel_of(A: np.ndarray, ncols: int, tol: float = 1e-6) -> np.ndarray:
    """Orthonormal basis (columns) of ker A."""
    if A.size == 0:
        return np.eye(ncols)
    return null_space(A, rcond=tol)


def omega_complement(model: SymplecticModel, m, X: np.ndarray) -> np.ndarray:
    """Columns spanning ``{v : ω(x, v) = 0 for all columns x of X}``."""
    if X.size == 0 or X.shape[1] == 0:
        return np.eye(model.chart_dim)
    return null_space(X.T @ model.omega(m), rcond=1e-10)


def max_angle(A: np.ndarray, B: np.ndarray) -> float:
    """Largest principal angle; subspaces of different dimension give inf,
    two zero subspaces give 0."""
    ra = 0 if A.size == 0 else A.shape[1]
    rb = 0 if B.size == 0 else B.shape[1]
    if ra != rb:
        return float("inf")
    if ra == 0:
        return 0.0
    return float(np.max(subspace_angles(A, B)))


def orth(A: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    if A.size == 0 or A.shape[1] == 0:
        return np.zeros((A.shape[0] if A.ndim == 2 else 0, 0))
    from scipy.linalg import orth as _orth
    return _orth(A, rcond=tol)


def intersect_spaces(A: np.ndarray, B: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis of span(A) ∩ span(B) (columns)."""
    n = A.shape[0]
    if A.shape[1] == 0 or B.shape[1] == 0:
        return np.zeros((n, 0))
    A, B = orth(A), orth(B)
    N = null_space(np.hstack([A, -B]), rcond=tol)
    if N.size == 0:
        return np.zeros((n, 0))
    return orth(A @ N[: A.shape[1]])


@dataclass
class KernelRangeReport:
    rank: int
    expected_rank: int
    kernel_dim: int
    max_angle: float
    free_action: bool
    flagged: bool
    note: str = ""

    def to_json(self):
        return dict(self.__dict__)


def kernel_range_check(inst: MomentumMapInstance, m, h: float = 1e-6, tol: float = 1e-5) -> KernelRangeReport:
    model = inst.model
    m = np.asarray(m, dtype=float)
    D = K_jacobian(inst, m, h)
    rank = numerical_rank(D)
    ker = kernel_of(D, model.chart_dim)
    nb = inst.n_basis()
    Gm = model.generator_matrix(m)
    X = Gm @ (la.to_float(nb).T if nb else np.zeros((inst.n, 0)))
    n_perp = omega_complement(model, m, X)
    ang = max_angle(ker, n_perp)
    # isotropy algebra of m and the rank predicted by the bifurcation lemma
    g_m = null_space(Gm, rcond=1e-10)
    ann = null_space(g_m.T) if g_m.size else np.eye(inst.n)
    V = la.to_float(inst.subgroup.V_basis).T if inst.subgroup.V_basis else np.zeros((inst.n, 0))
    expected = ann.shape[1] - intersect_spaces(ann, V).shape[1]
    free = g_m.size == 0 or g_m.shape[1] == 0
    flagged = rank != expected or ang > tol
    note = "" if free else "non-free action: isotropy branch is untested scaffolding"
    return KernelRangeReport(rank, expected, ker.shape[1], ang, free, flagged, note)


# -- restriction -------------------------------------------------------------

class RestrictedModel(SymplecticModel):
    """Same manifold, action restricted to the coordinate subalgebra ``S``."""

    def __init__(self, parent: SymplecticModel, S: Sequence[int]):
        self.parent = parent
        self.S = list(S)
        self.name = f"{parent.name}|{self.S}"
        self.chart_dim = parent.chart_dim
        self.alg_dim = len(self.S)
        self.d = parent.d
        self.holonomy_scale = parent.holonomy_scale

    def omega(self, m=None):
        return self.parent.omega(m)

    def generator_matrix(self, m=None):
        return self.parent.generator_matrix(m)[:, self.S]

    @property
    def periods(self):
        return self.parent.periods

    def group_kernel(self):
        out = []
        for ell in self.parent.group_kernel():
            nz = [i for i, x in enumerate(ell) if not x.is_zero()]
            if set(nz) <= set(self.S):
                out.append([ell[i] for i in self.S])
        return out

    def act(self, u, m):
        full = np.zeros(self.parent.alg_dim)
        full[self.S] = u
        return self.parent.act(full, m)


@dataclass
class RestrictionReport:
    instance: MomentumMapInstance
    pullback_contained: bool
    max_K_error: float
    subgroup: ClosedSubgroup


def restrict_to_subalgebra(inst: MomentumMapInstance, S: Sequence[int], samples: int = 20,
                           steps: int = 2000, rng=None) -> RestrictionReport:
    """Restricted instance with holonomy estimated from the restricted
    connection; checks ``i*(H_g) ⊂ H_h`` and ``K_h = ī*∘K_g``."""
    rng = np.random.default_rng(0) if rng is None else rng
    S = sorted(set(S))
    sub = RestrictedModel(inst.model, S)
    gens = estimate_holonomy_generators(sub, steps)
    H = closure(gens)
    C = Cylinder(H, inst.model.holonomy_scale)
    ref = np.zeros(inst.model.chart_dim) if inst.ref is None else inst.ref
    nu0 = inst.J(ref)[S]
    rinst = MomentumMapInstance(sub, gens, H, C, nu0, True, ref)
    pulled = [[g[i] for i in S] for g in inst.generators.generators]
    contained = all(H.contains(p) for p in pulled)
    err = 0.0
    for _ in range(samples):
        m = inst.model.random_point(rng)
        direct = rinst.K(m)
        via = C.project(inst.representative(inst.K(m))[S])
        err = max(err, C.distance(direct, via))
    return RestrictionReport(rinst, contained, err, H)


# -- group-valued momentum map ----------------------------------------------

@dataclass
class GroupValuedReport:
    T_basis: list
    holonomy_in_kernel_image: bool
    kernel_image_in_holonomy: bool
    strict: bool
    residual: float
    samples: int


def group_valued_J(inst: MomentumMapInstance, B=None, samples: int = 100, h: float = 1e-6,
                   rng=None) -> GroupValuedReport:
    """``J = f̄⁻¹∘K`` with ``f(ξ) = (ξ, ·)_B``; needs the holonomy to be closed."""
    rng = np.random.default_rng(0) if rng is None else rng
    n = inst.n
    if not discreteness_test(inst.generators):
        raise NoGroupValuedMomentumMap(
            "holonomy group is not closed, so no group-valued momentum map is constructed")
    Bx = la.as_scalars(B) if B is not None else [[Scalar(int(i == j)) for j in range(n)] for i in range(n)]
    Binv = la.inverse(Bx)
    Hgens = [list(g) for g in inst.generators.generators]
    T_basis = ClosedSubgroup.make(n, [], [la.matvec(Binv, g) for g in Hgens]).Lambda_basis
    fker = ClosedSubgroup.make(n, [], [la.matvec(Bx, l) for l in inst.model.group_kernel()])
    Hclosed = inst.subgroup
    fwd = all(fker.contains(g) for g in Hgens)
    back = all(Hclosed.contains(v) for v in fker.Lambda_basis)
    Bf = la.to_float(Bx)
    Binvf = la.to_float(Binv)
    C = inst.cylinder
    worst = 0.0
    for _ in range(samples):
        m = inst.model.random_point(rng)
        v = rng.normal(size=inst.model.chart_dim)
        xi = rng.normal(size=n)
        lhs = (inst.model.generator_matrix(m) @ xi) @ inst.model.omega(m) @ v
        dk = C.unwrapped_difference(inst.K(m + h * v), inst.K(m - h * v)) / (2 * h)
        dmu = inst.tangent_to_dual(dk[: C.free_rank], dk[C.free_rank:])
        dJ = Binvf @ dmu
        rhs = dJ @ Bf @ xi
        worst = max(worst, abs(lhs - rhs))
    return GroupValuedReport(list(T_basis), fwd, back, fwd and not back, worst, samples)
