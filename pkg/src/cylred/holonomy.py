"""Horizontal lifts for the flat connection on ``M × g*`` and holonomy.

Horizontality reads ``<μ'(t), ξ> = ω(c'(t), ξ_M(c(t)))``; the right-hand
side does not involve ``μ``, so fixed-step RK4 is Simpson's rule on the
pulled-back one-form.  Holonomy of a loop is ``μ(1) - μ(0)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import linalg as la
from .lie import UnsupportedModelError
from .models import MagneticCotangentModel, SymplecticModel, lattice_displacement
from .scalars import Scalar
from .subgroups import GeneratedSubgroup, rationalize_vector


@dataclass
class LoopPath:
    """A path ``t ↦ m(t)``, ``t ∈ [0, 1]``, with its velocity.

    ``breaks`` lists parameter values where the velocity may jump; the
    integrator aligns its grid with them when it can.
    """

    point: Callable[[float], np.ndarray]
    velocity: Callable[[float], np.ndarray]
    displacement: np.ndarray | None = None
    breaks: tuple = ()

    @classmethod
    def constant(cls, m0) -> "LoopPath":
        m0 = np.asarray(m0, dtype=float)
        return cls(lambda t: m0, lambda t: np.zeros_like(m0), np.zeros_like(m0))

    @classmethod
    def straight(cls, m0, m1) -> "LoopPath":
        m0 = np.asarray(m0, dtype=float)
        dm = np.asarray(m1, dtype=float) - m0
        return cls(lambda t: m0 + t * dm, lambda t: dm, dm)

    @classmethod
    def winding(cls, m0, displacement, wiggle=None, reparametrize: bool = False) -> "LoopPath":
        """``m0 + s(t)·displacement + w(t)``; ``w`` vanishes at both ends.

        With ``reparametrize`` the winding uses ``s(t) = (e^t - 1)/(e - 1)``,
        so the integrand is not periodic and the quadrature error is
        genuinely fourth order.
        """
        m0 = np.asarray(m0, dtype=float)
        D = np.asarray(displacement, dtype=float)
        W = np.zeros_like(m0) if wiggle is None else np.asarray(wiggle, dtype=float)
        if reparametrize:
            e1 = np.e - 1.0
            s = lambda t: (np.exp(t) - 1.0) / e1
            ds = lambda t: np.exp(t) / e1
        else:
            s = lambda t: t
            ds = lambda t: 1.0
        return cls(
            lambda t: m0 + s(t) * D + np.sin(np.pi * t) ** 2 * W,
            lambda t: ds(t) * D + 2 * np.pi * np.sin(np.pi * t) * np.cos(np.pi * t) * W,
            D,
        )

    @classmethod
    def from_samples(cls, points) -> "LoopPath":
        """Polyline through sampled chart points, uniform in segment index."""
        P = np.asarray(points, dtype=float)
        if len(P) < 2:
            raise ValueError("a sampled path needs at least two points")
        k = len(P) - 1

        def seg(t):
            i = min(int(np.floor(t * k)), k - 1)
            return i, t * k - i

        def point(t):
            i, s = seg(t)
            return P[i] + s * (P[i + 1] - P[i])

        def velocity(t):
            i, _ = seg(t)
            return k * (P[i + 1] - P[i])

        return cls(point, velocity, P[-1] - P[0], tuple(i / k for i in range(1, k)))

    def then(self, other: "LoopPath") -> "LoopPath":
        """Concatenation (this path on [0, ½], the other, shifted to start at
        this path's end, on [½, 1])."""
        end = self.point(1.0)
        off = end - other.point(0.0)

        def point(t):
            return self.point(2 * t) if t <= 0.5 else other.point(2 * t - 1) + off

        def velocity(t):
            return 2 * self.velocity(2 * t) if t < 0.5 else 2 * other.velocity(2 * t - 1)

        disp = None
        if self.displacement is not None and other.displacement is not None:
            disp = self.displacement + other.displacement
        br = tuple(b / 2 for b in self.breaks) + (0.5,) + tuple(0.5 + b / 2 for b in other.breaks)
        return LoopPath(point, velocity, disp, br)

    def is_closed(self, model: SymplecticModel, tol: float = 1e-9) -> bool:
        d = self.point(1.0) - self.point(0.0)
        p = model.periods
        r = np.where(p > 0, d - p * np.round(d / np.where(p > 0, p, 1.0)), d)
        return bool(np.all(np.abs(r) <= tol))


def connection_rhs(model: SymplecticModel, m, v) -> np.ndarray:
    """Components ``ω(v, ξ_M(m))`` over the algebra basis."""
    return model.generator_matrix(m).T @ (model.omega(m).T @ v)


def horizontal_lift(model: SymplecticModel, path: LoopPath, mu0, steps: int = 10_000):
    """RK4 lift; returns ``(t, μ)`` sampled on the grid, ``μ[0] = μ0``."""
    if steps < 2:
        raise ValueError("steps must be at least 2")
    mu0 = np.asarray(mu0, dtype=float)
    ts = _grid(steps, path.breaks)
    mus = np.empty((len(ts), len(mu0)))
    mus[0] = mu0

    def F(t):
        m = path.point(t)
        try:
            return connection_rhs(model, m, path.velocity(t))
        except (FloatingPointError, np.linalg.LinAlgError) as exc:
            raise ArithmeticError(f"integration failed at t = {t}, m = {m.tolist()}") from exc

    brk = set(path.breaks)
    mu = mu0.copy()
    Fb = None
    for i in range(len(ts) - 1):
        t0, t1 = ts[i], ts[i + 1]
        h = t1 - t0
        # one-sided values at velocity breaks; the right-hand side ignores μ,
        # so the RK4 stages collapse to Simpson's rule
        Fa = F(t0 + 1e-12 * h) if t0 in brk or Fb is None else Fb
        Fm = F(t0 + h / 2)
        Fb = F(t1 - 1e-12 * h) if t1 in brk else F(t1)
        mu = mu + h / 6 * (Fa + 4 * Fm + Fb)
        mus[i + 1] = mu
    return ts, mus


def _grid(steps, breaks):
    if not breaks:
        return np.linspace(0.0, 1.0, steps + 1)
    knots = [0.0, *sorted(breaks), 1.0]
    per = max(1, steps // (len(knots) - 1))
    pieces = [np.linspace(a, b, per + 1)[:-1] for a, b in zip(knots[:-1], knots[1:])]
    return np.concatenate(pieces + [np.array([1.0])])


def holonomy_of_loop(model: SymplecticModel, loop: LoopPath, steps: int = 10_000, mu0=None,
                     check_closed: bool = True) -> np.ndarray:
    if check_closed and not loop.is_closed(model):
        raise ValueError("loop is not closed in the chart (mod periods)")
    if mu0 is None:
        mu0 = np.zeros(model.alg_dim)
    _, mus = horizontal_lift(model, loop, mu0, steps)
    return mus[-1] - mus[0]


def holonomy_generators(model: MagneticCotangentModel) -> GeneratedSubgroup:
    """``{Σ(·, ℓ_j)}`` over the basis ``ℓ_j`` of ker exp (closed form)."""
    if not isinstance(model, MagneticCotangentModel):
        raise UnsupportedModelError("closed-form holonomy needs a magnetic cotangent model")
    gens = [model.cocycle.column(ell) for ell in model.group_kernel()]
    return GeneratedSubgroup(model.alg_dim, tuple(map(tuple, gens)))


def lattice_loop(model: SymplecticModel, ell, m0=None, wiggle=None, reparametrize=False) -> LoopPath:
    if m0 is None:
        m0 = np.zeros(model.chart_dim)
    return LoopPath.winding(m0, lattice_displacement(model, ell), wiggle, reparametrize)


def coordinate_loops(model: SymplecticModel, m0=None) -> list[LoopPath]:
    """One loop per periodic chart coordinate; they generate π1 of a torus chart."""
    if m0 is None:
        m0 = np.zeros(model.chart_dim)
    loops = []
    for i, p in enumerate(model.periods):
        if p > 0:
            D = np.zeros(model.chart_dim)
            D[i] = p
            loops.append(LoopPath.winding(m0, D))
    return loops


def numeric_holonomy(model: SymplecticModel, steps: int = 10_000, m0=None) -> np.ndarray:
    """Holonomies of the coordinate loops, divided by the model's holonomy scale."""
    loops = coordinate_loops(model, m0)
    if not loops:
        return np.zeros((0, model.alg_dim))
    return np.array([holonomy_of_loop(model, L, steps) for L in loops]) / model.holonomy_scale


def estimate_holonomy_generators(model: SymplecticModel, steps: int = 10_000, tol: float = 1e-6,
                                 m0=None) -> GeneratedSubgroup:
    """Numeric generators rationalized into Q(sqrt(d)) at tolerance ``tol``."""
    H = numeric_holonomy(model, steps, m0)
    gens = [rationalize_vector(h, model.d, tol) for h in H]
    return GeneratedSubgroup(model.alg_dim, tuple(map(tuple, gens)))


def convergence_ratios(model: SymplecticModel, ell, exact, Ns=(10, 20, 40, 80), m0=None, wiggle=None):
    """Errors of the lattice-loop holonomy against ``exact`` and their
    successive ratios under step halving."""
    loop = lattice_loop(model, ell, m0, wiggle, reparametrize=True)
    ex = la.vec_to_float(exact) if exact and isinstance(exact[0], Scalar) else np.asarray(exact, float)
    errs = [float(np.max(np.abs(holonomy_of_loop(model, loop, N) - ex))) for N in Ns]
    ratios = [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]
    return errs, ratios
