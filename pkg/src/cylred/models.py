"""Symplectic models: magnetic cotangent bundles of Abelian groups and
small toy manifolds given by expressions in a chart.

A model exposes the chart dimension, the symplectic matrix ``omega(m)`` with
``ω(x, y) = xᵀ Ω y``, and the infinitesimal generators as the columns of
``generator_matrix(m)``.
"""

from __future__ import annotations

from functools import cached_property
from typing import Sequence

import numpy as np
import sympy as sp

from . import linalg as la
from .lie import AbelianGroup, TwoCocycle, UnsupportedModelError
from .scalars import Scalar


class SingularFormError(ArithmeticError):
    pass


class SymplecticModel:
    name: str = "model"
    chart_dim: int
    alg_dim: int
    d: int = 0
    holonomy_scale: float = 1.0

    def omega(self, m) -> np.ndarray:
        raise NotImplementedError

    def generator_matrix(self, m) -> np.ndarray:
        raise NotImplementedError

    def generator(self, xi, m) -> np.ndarray:
        return self.generator_matrix(m) @ np.asarray(xi, dtype=float)

    @property
    def periods(self) -> np.ndarray:
        """Chart period of each coordinate (0 for non-periodic)."""
        raise NotImplementedError

    def group_kernel(self) -> list[list[Scalar]]:
        """Basis of ker exp of the acting group, in algebra coordinates."""
        raise NotImplementedError

    def act(self, u, m) -> np.ndarray:
        raise NotImplementedError

    def chu(self, m) -> np.ndarray:
        """``Ψ(m)(ξ, η) = ω(ξ_M, η_M)`` on basis vectors."""
        G = self.generator_matrix(m)
        return G.T @ self.omega(m) @ G

    def check_nondegenerate(self, m, tol: float = 1e-10):
        W = self.omega(m)
        if abs(np.linalg.det(W)) < tol:
            raise SingularFormError(f"omega is degenerate at m = {np.asarray(m).tolist()}")

    def hamiltonian_vector(self, m, grad) -> np.ndarray:
        """Solve ``i_X ω = df`` i.e. ``Ωᵀ X = ∇f`` (partial pivoting via LAPACK)."""
        W = self.omega(m)
        try:
            return np.linalg.solve(W.T, np.asarray(grad, dtype=float))
        except np.linalg.LinAlgError as exc:
            raise SingularFormError(f"omega is singular at m = {np.asarray(m).tolist()}") from exc

    def condition(self, m) -> float:
        return float(np.linalg.cond(self.omega(m)))

    def random_point(self, rng: np.random.Generator) -> np.ndarray:
        p = self.periods
        x = rng.uniform(-1.0, 1.0, size=self.chart_dim)
        return np.where(p > 0, rng.uniform(0, 1, size=self.chart_dim) * p, x)

    def coordinate_names(self) -> list[str]:
        return [f"x{i + 1}" for i in range(self.chart_dim)]


class MagneticCotangentModel(SymplecticModel):
    """``T*G ≅ G × g*`` for Abelian ``G = T^a × R^b`` with the magnetic form

    ``ω_Σ((ξ,ρ),(η,σ)) = <σ,ξ> - <ρ,η> - Σ(ξ,η)``.  Chart points are
    ``m = (u, ν)`` with ``u`` algebra coordinates of the group element.
    """

    def __init__(self, base: AbelianGroup, cocycle: TwoCocycle, name: str = "magnetic"):
        if not cocycle.algebra.is_abelian:
            raise UnsupportedModelError("magnetic models need an Abelian base group")
        if base.dim != cocycle.dim:
            raise ValueError(f"group dimension {base.dim} but cocycle dimension {cocycle.dim}")
        self.base = base
        self.cocycle = cocycle
        self.name = name
        self.alg_dim = base.dim
        self.chart_dim = 2 * base.dim
        self.d = cocycle.d

    @cached_property
    def sigma(self) -> np.ndarray:
        return self.cocycle.as_float()

    @cached_property
    def _omega(self) -> np.ndarray:
        n = self.alg_dim
        I = np.eye(n)
        return np.block([[-self.sigma, I], [-I, np.zeros((n, n))]])

    def omega(self, m=None) -> np.ndarray:
        return self._omega

    def generator_matrix(self, m=None) -> np.ndarray:
        n = self.alg_dim
        return np.vstack([np.eye(n), np.zeros((n, n))])

    @property
    def periods(self) -> np.ndarray:
        p = np.zeros(self.chart_dim)
        p[: self.base.torus_rank] = 1.0
        return p

    def group_kernel(self):
        return self.base.kernel_lattice()

    def act(self, u, m) -> np.ndarray:
        m = np.array(m, dtype=float)
        m[: self.alg_dim] += np.asarray(u, dtype=float)
        return m

    def chu(self, m=None) -> np.ndarray:
        return -self.sigma

    def chu_exact(self) -> list[list[Scalar]]:
        return [[-x for x in row] for row in self.cocycle.matrix]

    def split(self, m):
        m = np.asarray(m)
        return m[: self.alg_dim], m[self.alg_dim:]

    def hamiltonian_vector(self, m, grad) -> np.ndarray:
        """``X_f = (∂f/∂ν, -∂_u f - Σ(∂f/∂ν, ·))``."""
        n = self.alg_dim
        g = np.asarray(grad)
        gu, gn = g[:n], g[n:]
        return np.concatenate([gn, -gu + self.sigma @ gn])

    def coordinate_names(self) -> list[str]:
        n = self.alg_dim
        return [f"u{i + 1}" for i in range(n)] + [f"nu{i + 1}" for i in range(n)]


_SYMPY_LOCALS = {
    "pi": sp.pi, "sqrt": sp.sqrt, "sin": sp.sin, "cos": sp.cos, "exp": sp.exp,
    "tan": sp.tan, "log": sp.log, "E": sp.E,
}


def parse_expression(text: str, names: Sequence[str]) -> sp.Expr:
    """Mini-grammar: +, -, *, /, **, parentheses, numbers, pi, sqrt, sin,
    cos, exp, log, tan and the given coordinate names."""
    syms = {n: sp.Symbol(n, real=True) for n in names}
    try:
        expr = sp.sympify(str(text), locals={**_SYMPY_LOCALS, **syms}, evaluate=True)
    except (sp.SympifyError, SyntaxError, TypeError) as exc:
        raise ValueError(f"cannot parse expression {text!r}: {exc}") from None
    unknown = {s.name for s in expr.free_symbols} - set(names)
    if unknown:
        raise ValueError(f"unknown names {sorted(unknown)} in {text!r}")
    return expr


class ChartFunction:
    """Smooth function of chart coordinates with a symbolic gradient."""

    def __init__(self, text: str, names: Sequence[str]):
        self.text = str(text)
        self.names = list(names)
        self.expr = parse_expression(text, names)
        syms = [sp.Symbol(n, real=True) for n in names]
        self._f = sp.lambdify([syms], self.expr, "numpy")
        self._g = sp.lambdify([syms], [sp.diff(self.expr, s) for s in syms], "numpy")

    def __call__(self, m) -> float:
        return float(self._f(np.asarray(m, dtype=float)))

    def grad(self, m) -> np.ndarray:
        return np.array(self._g(np.asarray(m, dtype=float)), dtype=float).reshape(-1)

    def depends_on(self) -> set[str]:
        return {s.name for s in self.expr.free_symbols}

    def __repr__(self):
        return f"ChartFunction({self.text!r})"


class ExpressionModel(SymplecticModel):
    """Toy model from expressions: ω entries and generator components may
    depend on the chart coordinates; constants are evaluated once."""

    def __init__(self, coordinates: Sequence[str], omega: Sequence[Sequence[str]],
                 generators: Sequence[Sequence[str]], periods: Sequence[str],
                 holonomy_scale: str = "1", group_kernel=None, d: int = 0, name: str = "toy"):
        self.name = name
        self.coords = list(coordinates)
        self.chart_dim = len(self.coords)
        self.alg_dim = len(generators)
        self.d = d
        k = self.chart_dim
        if len(omega) != k or any(len(r) != k for r in omega):
            raise ValueError(f"omega must be {k}x{k}")
        if any(len(g) != k for g in generators):
            raise ValueError(f"each generator needs {k} components")
        syms = [sp.Symbol(n, real=True) for n in self.coords]
        self._omega_expr = sp.Matrix([[parse_expression(e, self.coords) for e in r] for r in omega])
        if self._omega_expr != -self._omega_expr.T:
            raise ValueError("omega is not antisymmetric")
        self._gen_expr = sp.Matrix([[parse_expression(e, self.coords) for e in g] for g in generators]).T
        self._omega_f = sp.lambdify([syms], self._omega_expr, "numpy")
        self._gen_f = sp.lambdify([syms], self._gen_expr, "numpy")
        self._omega_const = None if self._omega_expr.free_symbols else np.array(self._omega_expr.evalf(), dtype=float)
        self._gen_const = None if self._gen_expr.free_symbols else np.array(self._gen_expr.evalf(), dtype=float)
        self._periods = np.array([float(parse_expression(p, []).evalf()) for p in periods], dtype=float)
        self.holonomy_scale = float(parse_expression(holonomy_scale, []).evalf())
        self._group_kernel = [list(map(Scalar.coerce, v)) for v in (group_kernel or [])]
        self.omega_text = [list(map(str, r)) for r in omega]
        self.generator_text = [list(map(str, g)) for g in generators]
        self.period_text = [str(p) for p in periods]
        self.scale_text = str(holonomy_scale)

    def omega(self, m=None) -> np.ndarray:
        if self._omega_const is not None:
            return self._omega_const
        return np.array(self._omega_f(np.asarray(m, dtype=float)), dtype=float)

    def generator_matrix(self, m=None) -> np.ndarray:
        if self._gen_const is not None:
            return self._gen_const
        return np.array(self._gen_f(np.asarray(m, dtype=float)), dtype=float)

    @property
    def constant_generators(self) -> bool:
        return self._gen_const is not None

    @property
    def periods(self) -> np.ndarray:
        return self._periods

    def group_kernel(self):
        return self._group_kernel

    def act(self, u, m, steps: int = 200) -> np.ndarray:
        """Time-one flow of the generator of ``u`` (exact for constant generators)."""
        u = np.asarray(u, dtype=float)
        m = np.array(m, dtype=float)
        if self.constant_generators:
            return m + self._gen_const @ u
        h = 1.0 / steps
        f = lambda x: self.generator_matrix(x) @ u
        for _ in range(steps):
            k1 = f(m)
            k2 = f(m + h / 2 * k1)
            k3 = f(m + h / 2 * k2)
            k4 = f(m + h * k3)
            m = m + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        return m

    def coordinate_names(self) -> list[str]:
        return list(self.coords)


def exact_vector(v) -> list[Scalar]:
    return [Scalar.coerce(x) for x in v]


def lattice_displacement(model: SymplecticModel, ell: Sequence[Scalar]) -> np.ndarray:
    """Chart displacement of the closed orbit loop ``t ↦ exp(tℓ)·m``."""
    if isinstance(model, MagneticCotangentModel):
        return np.concatenate([la.vec_to_float(ell), np.zeros(model.alg_dim)])
    if isinstance(model, ExpressionModel) and model.constant_generators:
        return model.generator_matrix() @ la.vec_to_float(ell)
    raise UnsupportedModelError("lattice loops need constant generators")
