"""Lie algebras by structure constants, two-cocycles and central extensions.

Group-level operations (the Heisenberg-type group ``G_Σ`` and its cocycle
``μ_Σ``) are closed-form and need an Abelian base.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from . import linalg as la
from .scalars import Scalar


class UnsupportedModelError(ValueError):
    pass


class CocycleError(ValueError):
    pass


def _basis(n, i):
    return [Scalar(int(k == i)) for k in range(n)]


class LieAlgebra:
    """``[e_i, e_j] = sum_k c[i][j][k] e_k`` with exact coefficients."""

    def __init__(self, dim: int, structure_constants=None, check: bool = True):
        if dim < 1:
            raise ValueError("Lie algebra dimension must be positive")
        self.dim = dim
        if structure_constants is None:
            c = [[[Scalar(0)] * dim for _ in range(dim)] for _ in range(dim)]
        else:
            c = [[[Scalar.coerce(x) for x in row] for row in plane] for plane in structure_constants]
        self.c = c
        if check:
            self._check()

    @classmethod
    def abelian(cls, n: int) -> "LieAlgebra":
        return cls(n, check=False)

    @classmethod
    def from_brackets(cls, n: int, brackets: dict) -> "LieAlgebra":
        """``brackets[(i, j)] = vector`` for ``i < j``; the rest follows by antisymmetry."""
        c = [[[Scalar(0)] * n for _ in range(n)] for _ in range(n)]
        for (i, j), v in brackets.items():
            v = [Scalar.coerce(x) for x in v]
            c[i][j] = v
            c[j][i] = [-x for x in v]
        return cls(n, c)

    def _check(self):
        n = self.dim
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.c[i][j][k] != -self.c[j][i][k]:
                        raise ValueError(f"structure constants not antisymmetric at ({i},{j},{k})")
        for i, j, k in combinations(range(n), 3):
            if not la.is_zero_vec(self.jacobiator(_basis(n, i), _basis(n, j), _basis(n, k))):
                raise ValueError(f"Jacobi identity fails on basis triple ({i},{j},{k})")

    @property
    def is_abelian(self) -> bool:
        return all(x.is_zero() for plane in self.c for row in plane for x in row)

    def bracket(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> list[Scalar]:
        if len(x) != self.dim or len(y) != self.dim:
            raise ValueError(f"expected vectors of length {self.dim}")
        out = [Scalar(0)] * self.dim
        for i, xi in enumerate(x):
            if xi.is_zero():
                continue
            for j, yj in enumerate(y):
                if yj.is_zero():
                    continue
                f = xi * yj
                out = [o + f * ck for o, ck in zip(out, self.c[i][j])]
        return out

    def jacobiator(self, x, y, z) -> list[Scalar]:
        b = self.bracket
        return la.vadd(la.vadd(b(x, b(y, z)), b(y, b(z, x))), b(z, b(x, y)))

    def ad(self, x) -> list[list[Scalar]]:
        """Matrix of ``ad_x`` (columns are images of basis vectors)."""
        cols = [self.bracket(x, _basis(self.dim, j)) for j in range(self.dim)]
        return la.transpose(cols)

    def ad_star(self, xi, mu) -> list[Scalar]:
        """``ad*_xi mu = <mu, [xi, .]>``."""
        return [la.dot(mu, self.bracket(xi, _basis(self.dim, j))) for j in range(self.dim)]

    def derived_span(self) -> list[list[Scalar]]:
        vecs = [self.bracket(_basis(self.dim, i), _basis(self.dim, j))
                for i, j in combinations(range(self.dim), 2)]
        return la.span_basis([v for v in vecs if not la.is_zero_vec(v)])


class TwoCocycle:
    """``Σ(ξ, η) = ξᵀ S η``; antisymmetry and the cocycle identity are checked exactly."""

    def __init__(self, matrix, algebra: LieAlgebra | None = None):
        S = la.as_scalars(matrix)
        n = len(S)
        if any(len(r) != n for r in S):
            raise CocycleError("cocycle matrix must be square")
        for i in range(n):
            for j in range(n):
                if S[i][j] != -S[j][i]:
                    raise CocycleError(f"cocycle not antisymmetric at ({i},{j})")
        self.matrix = S
        self.algebra = algebra or LieAlgebra.abelian(n)
        if self.algebra.dim != n:
            raise CocycleError("cocycle and algebra dimensions differ")
        if not self.algebra.is_abelian:
            for i, j, k in combinations(range(n), 3):
                r = self.cocycle_residual(_basis(n, i), _basis(n, j), _basis(n, k))
                if not r.is_zero():
                    raise CocycleError(f"cocycle identity fails on basis triple ({i},{j},{k}): residual {r}")

    @classmethod
    def zero(cls, n: int, algebra: LieAlgebra | None = None) -> "TwoCocycle":
        return cls([[0] * n for _ in range(n)], algebra)

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @property
    def d(self) -> int:
        return next((x.d for r in self.matrix for x in r if x.b != 0), 0)

    def __call__(self, x, y) -> Scalar:
        return la.dot(x, la.matvec(self.matrix, y))

    def column(self, u) -> list[Scalar]:
        """The covector ``Σ(·, u)``."""
        return la.matvec(self.matrix, [Scalar.coerce(x) for x in u])

    def row(self, u) -> list[Scalar]:
        """The covector ``Σ(u, ·)``."""
        return [-x for x in self.column(u)]

    def cocycle_residual(self, x, y, z) -> Scalar:
        b = self.algebra.bracket
        return self(b(x, y), z) + self(b(y, z), x) + self(b(z, x), y)

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.matrix for x in r)

    def as_float(self):
        return la.to_float(self.matrix)


def central_extension(g: LieAlgebra, sigma: TwoCocycle) -> LieAlgebra:
    """``g ⊕ R`` with ``[(ξ,s),(η,t)] = ([ξ,η], -Σ(ξ,η))``."""
    n = g.dim
    c = [[[Scalar(0)] * (n + 1) for _ in range(n + 1)] for _ in range(n + 1)]
    for i in range(n):
        for j in range(n):
            c[i][j] = list(g.c[i][j]) + [-sigma.matrix[i][j]]
    return LieAlgebra(n + 1, c)


@dataclass(frozen=True)
class AbelianGroup:
    """``T^a × R^b`` with ``exp(u) = (u_1..u_a mod 1, u_{a+1}..)``."""

    torus_rank: int
    line_rank: int = 0

    @property
    def dim(self) -> int:
        return self.torus_rank + self.line_rank

    def kernel_lattice(self) -> list[list[Scalar]]:
        return [_basis(self.dim, i) for i in range(self.torus_rank)]

    def exp(self, u):
        import numpy as np

        u = np.asarray(u, dtype=float)
        out = u.copy()
        out[: self.torus_rank] = np.mod(out[: self.torus_rank], 1.0)
        return out


class CentralExtensionGroup:
    """``G_Σ`` for Abelian ``G``: ``(u,a)(v,b) = (u+v, a+b-Σ(u,v)/2)``."""

    def __init__(self, base: AbelianGroup, cocycle: TwoCocycle):
        if not cocycle.algebra.is_abelian:
            raise UnsupportedModelError("group-level operations need an Abelian base")
        if base.dim != cocycle.dim:
            raise ValueError("group and cocycle dimensions differ")
        self.base = base
        self.cocycle = cocycle

    def identity(self):
        return (la.zeros(self.base.dim), Scalar(0))

    def mul(self, g, h):
        (u, a), (v, b) = g, h
        return (la.vadd(u, v), a + b - self.cocycle(u, v) / 2)

    def inv(self, g):
        u, a = g
        return ([-x for x in u], -a)


def _require_abelian(G: CentralExtensionGroup):
    if not isinstance(G, CentralExtensionGroup):
        raise UnsupportedModelError("expected a central extension of an Abelian group")


def mu_sigma(G: CentralExtensionGroup, g) -> list[Scalar]:
    """Extended cocycle ``μ_Σ(u, a) = Σ(·, u)``."""
    _require_abelian(G)
    return G.cocycle.column(g[0])


def mu_sigma_derivative(G: CentralExtensionGroup, xi) -> list[Scalar]:
    """``T_e μ_Σ(ξ, s) = -Σ(ξ, ·)``."""
    return [-x for x in G.cocycle.row(xi)]


def ad_ext(G: CentralExtensionGroup, g, X):
    """``Ad_{(u,a)}(ξ, s) = (ξ, s - Σ(u, ξ))``."""
    _require_abelian(G)
    xi, s = X
    return (list(xi), s - G.cocycle(g[0], xi))


def extended_affine_action(G: CentralExtensionGroup, g, mu) -> list[Scalar]:
    """``Ξ̄(g, μ) = μ + μ_Σ(g⁻¹) = μ - Σ(·, u)``."""
    _require_abelian(G)
    return la.vadd([Scalar.coerce(x) for x in mu], mu_sigma(G, G.inv(g)))
