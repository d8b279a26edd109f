"""Symplectic, Poisson and optimal reduced spaces.

Magnetic models are handled exactly: isotropy subgroups are preimages of
``H̄`` under ``u ↦ Σ(·,u)`` and the reduced spaces are affine models in g*.
Toy models get dimensions from numerical ranks at a phase point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from . import linalg as la
from .lie import UnsupportedModelError
from .models import MagneticCotangentModel
from .momentum import (MomentumMapInstance, K_jacobian, intersect_spaces, kernel_of, max_angle,
                       numerical_rank, omega_complement, orth)
from .poisson import chu_map, leaf_form_matrix
from .scalars import Scalar
from .subgroups import (ClosedSubgroup, closed_sum, discreteness_test, intersect_closed, preimage,
                        subgroup_index)


def ideal_n(inst: MomentumMapInstance) -> tuple[list, bool]:
    """``n = (Lie H̄)°`` and whether ``[g, g] ⊂ n``."""
    nb = inst.n_basis()
    model = inst.model
    ok = True
    if isinstance(model, MagneticCotangentModel):
        for v in model.cocycle.algebra.derived_span():
            ok &= la.in_span(nb, v)
    return nb, ok


@dataclass
class IsotropyDescription:
    subgroup_of: str
    dimension: int
    lie_algebra: list
    preimage: ClosedSubgroup | None = None
    components: int | None = 1
    full_factors: list = field(default_factory=list)
    conditions: str = ""

    def to_json(self):
        return {
            "subgroup_of": self.subgroup_of,
            "dimension": self.dimension,
            "components": self.components,
            "full_factors": self.full_factors,
            "conditions": self.conditions,
            "preimage": self.preimage.to_json() if self.preimage else None,
        }


def _kernel_subgroup(inst) -> ClosedSubgroup:
    return ClosedSubgroup.make(inst.n, [], inst.model.group_kernel())


def _n_preimage(inst) -> ClosedSubgroup:
    """Closed preimage of N in g: closure of ``n + ker exp``."""
    nb = inst.n_basis()
    K = _kernel_subgroup(inst)
    return closed_sum(K, nb) if nb else K


def _full_factors(P: ClosedSubgroup, n: int) -> list[int]:
    V = [list(v) for v in P.V_basis]
    return [i + 1 for i in range(n) if la.in_span(V, [Scalar(int(i == j)) for j in range(n)])]


def _toy_isotropy_algebra(inst, m) -> np.ndarray:
    """Columns spanning ``{ξ : Ψ(m)(ξ,·) ∈ V}``."""
    psi = chu_map(inst.model, m).matrix
    V, _ = inst.subgroup.float_bases()
    P = np.eye(inst.n)
    if len(V):
        q = orth(V.T)
        P = P - q @ q.T
    return null_space(P @ psi.T, rcond=1e-10)


def isotropy(inst: MomentumMapInstance, mu=None, subgroup: str = "G", m=None) -> IsotropyDescription:
    """Isotropy of ``[μ]`` under the affine action of G or N.

    Abelian models: ``σ`` does not depend on ``[μ]``, so neither does the answer.
    """
    n = inst.n
    if inst.closed_form:
        S = inst.model.cocycle.matrix
        P = preimage(S, inst.subgroup)
        if subgroup == "N":
            P = intersect_closed(P, _n_preimage(inst))
        elif subgroup != "G":
            raise ValueError("subgroup must be 'G' or 'N'")
        Q = closed_sum(intersect_closed(P, _kernel_subgroup(inst)), [list(v) for v in P.V_basis])
        comps = subgroup_index(P, Q)
        return IsotropyDescription(subgroup, P.dim_V, [list(v) for v in P.V_basis], P, comps,
                                   _full_factors(P, n), "π_C(Σ(·,u)) = 0" + (" and u ∈ n + ker exp" if subgroup == "N" else ""))
    m = inst.ref if m is None else m
    m = np.zeros(inst.model.chart_dim) if m is None else m
    g_iso = _toy_isotropy_algebra(inst, m)
    if subgroup == "N":
        nb = inst.n_basis()
        N = la.to_float(nb).T if nb else np.zeros((n, 0))
        g_iso = intersect_spaces(g_iso, N)
    dim = g_iso.shape[1] if g_iso.size else 0
    full = dim == n if subgroup == "G" else dim == len(inst.n_basis())
    return IsotropyDescription(subgroup, dim, g_iso.T.tolist(), None, 1 if full else None, [],
                               "Ψ(m)(ξ,·) ∈ Lie H̄ (numerical)")


@dataclass
class ReducedSpaceReport:
    kind: str
    dimension: int
    symplectic_rank: int
    base: list | None = None
    model: ClosedSubgroup | None = None
    description: str = ""

    def to_json(self):
        return {
            "kind": self.kind,
            "dimension": self.dimension,
            "symplectic_rank": self.symplectic_rank,
            "base": self.base,
            "model": self.model.to_json() if self.model else None,
            "description": self.description,
        }


def _phase_point(inst, m):
    if m is not None:
        m = np.asarray(m, float)
    elif inst.ref is not None:
        m = inst.ref
    else:
        m = np.zeros(inst.model.chart_dim)
    if numerical_rank(inst.model.generator_matrix(m), 1e-10) < inst.n:
        raise UnsupportedModelError("reduced spaces are only computed for free actions")
    return m


def rank_TK(inst: MomentumMapInstance, m=None) -> int:
    if inst.closed_form:
        return inst.n - inst.subgroup.dim_V
    return numerical_rank(K_jacobian(inst, _phase_point(inst, m)))


def image_mu_sigma(inst) -> list:
    """Column space of Σ (the image of μ_Σ, a subspace for connected G_Σ)."""
    cols = la.transpose(inst.model.cocycle.matrix)
    return la.span_basis([c for c in cols if not la.is_zero_vec(c)])


def _fmt_base(mu):
    return None if mu is None else [float(x) for x in mu]


def symplectic_reduced(inst: MomentumMapInstance, mu=None, m=None) -> ReducedSpaceReport:
    m = _phase_point(inst, m)
    dimM = inst.model.chart_dim
    Nmu = isotropy(inst, mu, "N", m)
    dim = dimM - rank_TK(inst, m) - Nmu.dimension
    ker = kernel_of(K_jacobian(inst, m), dimM)
    W = inst.model.omega(m)
    srank = numerical_rank(ker.T @ W @ ker, 1e-9) if ker.size else 0
    model = None
    desc = "K⁻¹([μ]) / N_[μ]"
    if inst.closed_form:
        Gmu = isotropy(inst, mu, "G", m)
        if Gmu.dimension == Nmu.dimension and Gmu.components == Nmu.components:
            model = poisson_reduced(inst, mu, m).model
            desc += " ≅ μ + image(μ_Σ) + H̄"
    elif rank_TK(inst, m) == 0 and Nmu.dimension == 0:
        desc += " = M"
    return ReducedSpaceReport("symplectic", dim, srank, _fmt_base(mu), model, desc)


def poisson_reduced(inst: MomentumMapInstance, mu=None, m=None) -> ReducedSpaceReport:
    m = _phase_point(inst, m)
    Gmu = isotropy(inst, mu, "G", m)
    dim = inst.model.chart_dim - rank_TK(inst, m) - Gmu.dimension
    if inst.closed_form:
        img = image_mu_sigma(inst)
        model = closed_sum(inst.subgroup, img) if img else inst.subgroup
        srank = len(img)
        return ReducedSpaceReport("poisson", dim, srank, _fmt_base(mu), model, "μ + image(μ_Σ) + H̄")
    srank = optimal_reduced(inst, mu, m).dimension
    return ReducedSpaceReport("poisson", dim, srank, _fmt_base(mu), None, "K⁻¹([μ]) / G_[μ]")


def optimal_reduced(inst: MomentumMapInstance, mu=None, m=None) -> ReducedSpaceReport:
    """Free actions: ``dim M - dim G - dim(g·m ∩ (g·m)^ω)``."""
    m = _phase_point(inst, m)
    model = inst.model
    Gm = model.generator_matrix(m)
    orbit = orth(Gm)
    iso = intersect_spaces(orbit, omega_complement(model, m, orbit))
    dim = model.chart_dim - orbit.shape[1] - iso.shape[1]
    if inst.closed_form:
        img = image_mu_sigma(inst)
        M = ClosedSubgroup.make(inst.n, img, [])
        srank = numerical_rank(model.sigma, 1e-12)
        return ReducedSpaceReport("optimal", dim, srank, _fmt_base(mu), M, "G_Σ·μ = μ + image(μ_Σ)")
    # optimal reduced spaces are symplectic
    return ReducedSpaceReport("optimal", dim, dim, _fmt_base(mu), None, "orbits of the polar distribution")


@dataclass
class ReductionLemmaReport:
    angle_i: float
    angle_ii: float
    dims_i: tuple
    dims_ii: tuple
    angle_iii: float | None = None

    def passed(self, tol: float = 1e-5) -> bool:
        ok = self.angle_i <= tol and self.angle_ii <= tol
        if self.angle_iii is not None:
            ok &= self.angle_iii <= tol
        return ok


def _iso_columns(desc: IsotropyDescription, n: int) -> np.ndarray:
    if not desc.lie_algebra:
        return np.zeros((n, 0))
    return np.array([[float(x) for x in v] for v in desc.lie_algebra]).T


def reduction_lemma_check(inst: MomentumMapInstance, m, mu=None) -> ReductionLemmaReport:
    """``g_[μ]·m = ker TK ∩ g·m`` and ``n_[μ]·m = ker TK ∩ (ker TK)^ω``."""
    model = inst.model
    m = np.asarray(m, float)
    n = inst.n
    Gm = model.generator_matrix(m)
    ker = kernel_of(K_jacobian(inst, m), model.chart_dim)
    orbit = orth(Gm)
    g_iso = orth(Gm @ _iso_columns(isotropy(inst, mu, "G", m), n))
    n_iso = orth(Gm @ _iso_columns(isotropy(inst, mu, "N", m), n))
    rhs1 = intersect_spaces(ker, orbit)
    rhs2 = intersect_spaces(ker, omega_complement(model, m, ker))
    a3 = None
    if discreteness_test(inst.generators):
        a3 = max_angle(g_iso, intersect_spaces(omega_complement(model, m, orbit), orbit))
    return ReductionLemmaReport(max_angle(g_iso, rhs1), max_angle(n_iso, rhs2),
                                (g_iso.shape[1], rhs1.shape[1]), (n_iso.shape[1], rhs2.shape[1]), a3)


@dataclass
class ComparisonReport:
    symplectic: ReducedSpaceReport
    poisson: ReducedSpaceReport
    optimal: ReducedSpaceReport
    dim_H: int
    components_H: int | None
    identity_holds: bool
    coincide: bool | None
    holonomy_closed: bool
    note: str = ""

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.symplectic.dimension, self.poisson.dimension, self.optimal.dimension)

    def to_json(self):
        return {
            "dims": list(self.dims),
            "dim_H": self.dim_H,
            "components_H": self.components_H,
            "identity_holds": self.identity_holds,
            "optimal_equals_poisson_model": self.coincide,
            "holonomy_closed": self.holonomy_closed,
            "note": self.note,
            "spaces": [self.symplectic.to_json(), self.poisson.to_json(), self.optimal.to_json()],
        }


def three_space_comparison(inst: MomentumMapInstance, mu=None, m=None) -> ComparisonReport:
    s = symplectic_reduced(inst, mu, m)
    p = poisson_reduced(inst, mu, m)
    o = optimal_reduced(inst, mu, m)
    G = isotropy(inst, mu, "G", m)
    N = isotropy(inst, mu, "N", m)
    dim_H = G.dimension - N.dimension
    comps = None
    if G.components is not None and N.components is not None and G.preimage is not None:
        Q = closed_sum(N.preimage, [list(v) for v in G.preimage.V_basis])
        comps = subgroup_index(G.preimage, Q)
    elif G.components == 1:
        comps = 1
    coincide = None
    if o.model is not None and p.model is not None:
        coincide = o.model.contains_subgroup(inst.subgroup)
    closed = discreteness_test(inst.generators)
    note = ""
    if not closed:
        note = "holonomy not closed: the Poisson property of the optimal-to-Poisson map is not checked"
    return ComparisonReport(s, p, o, dim_H, comps, p.dimension == s.dimension - dim_H, coincide, closed, note)
