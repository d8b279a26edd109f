"""The ten acceptance criteria as runnable checks.

Each ``criterion_k(seed)`` returns a :class:`CriterionResult` holding the
measured and expected values, the pass flag and the runtime.  The checks
load the bundled model configs, so they double as end-to-end tests of the
config layer.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np
from scipy.spatial import cKDTree

from . import linalg as la
from .config import build_model, parse_config
from .holonomy import (LoopPath, convergence_ratios, holonomy_generators, holonomy_of_loop,
                       horizontal_lift, lattice_loop)
from .lie import LieAlgebra, TwoCocycle
from .models import ChartFunction
from .momentum import build_instance, group_valued_J, kernel_range_check, noether_drift
from .poisson import CylObservable, PolyObservable, bracket_poly, verify_poisson_map_K
from .reduction import isotropy, reduction_lemma_check, three_space_comparison
from .scalars import Scalar, sqrt_of
from .subgroups import ClosedSubgroup, GeneratedSubgroup, closure, to_rational_coords

R2 = sqrt_of(2)


@dataclass
class CriterionResult:
    id: int
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    runtime: float = 0.0
    error: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        s = f"[{tag}] criterion {self.id:2d}: {self.title} ({self.runtime:.2f} s)"
        if not self.passed:
            s += f"\n       measured {json.dumps(self.measured, default=str)}"
            s += f"\n       expected {json.dumps(self.expected, default=str)}"
            if self.error:
                s += f"\n       error: {self.error}"
        return s

    def to_json(self) -> dict:
        return {"id": self.id, "title": self.title, "passed": self.passed, "runtime": self.runtime,
                "measured": self.measured, "expected": self.expected, "error": self.error}


def _model(name):
    return build_model(parse_config(name))


def _vec(*xs):
    return [Scalar.coerce(x) for x in xs]


def _same_module(A, B) -> bool:
    """Equality of finitely generated Z-modules of Q(sqrt d)^n."""
    canon = lambda G: la.rational_hnf([to_rational_coords(v) for v in G if any(not x.is_zero() for x in v)])
    return canon(A) == canon(B)


# -- 1 -----------------------------------------------------------------------

def criterion_1(seed: int = 0) -> CriterionResult:
    model = _model("t4_example")
    gens = holonomy_generators(model)
    H = closure(gens)
    expected = ClosedSubgroup.make(4, [_vec(1, 0, 0, 0)], [_vec(0, 0, 1, R2)])
    got, want = json.dumps(H.to_json(), sort_keys=True), json.dumps(expected.to_json(), sort_keys=True)
    expected_H = [_vec(1, 0, 0, 0), _vec(R2, 0, 0, 0), _vec(0, 0, 1, R2)]
    same = _same_module([list(g) for g in gens.generators], expected_H)
    ok = got == want and same
    return CriterionResult(1, "T4 holonomy closure (exact)", ok,
                           {"closure": H.to_json(), "holonomy_matches": same},
                           {"closure": expected.to_json(), "holonomy_matches": True, "runtime_s": "< 1"})


# -- 2 -----------------------------------------------------------------------

def criterion_2(seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    model = _model("t4_example")
    worst, ratios = 0.0, []
    for ell in model.group_kernel():
        exact = la.vec_to_float(model.cocycle.column(ell))
        m0 = model.random_point(rng)
        wiggle = rng.normal(scale=0.3, size=model.chart_dim)
        loop = lattice_loop(model, ell, m0, wiggle)
        worst = max(worst, float(np.max(np.abs(holonomy_of_loop(model, loop, 10_000) - exact))))
        if np.any(exact != 0):
            _, r = convergence_ratios(model, ell, model.cocycle.column(ell), (10, 20, 40, 80), m0, wiggle)
            ratios.extend(r)
    ok = worst <= 1e-8 and bool(ratios) and all(12 <= r <= 20 for r in ratios)
    return CriterionResult(2, "T4 numeric holonomy and RK4 order", ok,
                           {"max_error": worst, "ratios": [round(r, 3) for r in ratios]},
                           {"max_error": "<= 1e-8", "ratios": "in [12, 20]", "runtime_s": "< 10"})


# -- 3 -----------------------------------------------------------------------

def reference_K_t4(m) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form cylinder coordinates ``(free, angle)`` of the T4 example."""
    m = np.atleast_2d(m)
    u1, e2, e3, e4 = m[:, 0], m[:, 5], m[:, 6], m[:, 7]
    r = np.sqrt(2.0)
    free = np.stack([e2, (e4 - r * u1 - r * (e3 - u1)) / 3], axis=1)
    angle = np.mod((e3 - u1 + r * (e4 - r * u1)) / 3, 1.0)
    return free, angle[:, None]


def _cyl_dist(f1, a1, f2, a2):
    da = np.abs(a1 - a2)
    da = np.minimum(da, 1.0 - da)
    df = np.abs(f1 - f2)
    return np.maximum(df.max(axis=1, initial=0.0), da.max(axis=1, initial=0.0))


def t4_pairs(rng, count=1000):
    """Point pairs: same fibre, tiny transverse offsets, and independent points."""
    A = rng.uniform(-1, 1, size=(count, 8))
    A[:, :4] = rng.uniform(0, 1, size=(count, 4))
    B = A.copy()
    kind = np.arange(count) % 4
    r = np.sqrt(2.0)
    for i in range(count):
        if kind[i] == 0:
            # same fibre: integer shift in u, V and lattice shift in eta, free u2..u4
            B[i, :4] += rng.integers(-2, 3, size=4)
            k = rng.integers(-2, 3)
            B[i, 4] += rng.normal()
            B[i, 6] += k
            B[i, 7] += k * r
            B[i, 1:4] += rng.normal(size=3)
        elif kind[i] == 1:
            B[i, 4] += rng.normal()
            B[i, 1] += rng.normal()
        elif kind[i] == 2:
            B[i, rng.integers(5, 8)] += 1e-5 * rng.choice([-1, 1])
        else:
            B[i] = rng.uniform(-1, 1, size=8)
    return A, B


def criterion_3(seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    inst = build_instance(_model("t4_example"))
    C = inst.cylinder
    shape = (C.free_rank, C.torus_rank)
    A, B = t4_pairs(rng)
    fa, aa = inst.K_coords(A)
    fb, ab = inst.K_coords(B)
    ours = _cyl_dist(fa, aa, fb, ab) <= 1e-9
    pa, qa = reference_K_t4(A)
    pb, qb = reference_K_t4(B)
    ref = _cyl_dist(pa, qa, pb, qb) <= 1e-9
    mismatches = int(np.sum(ours != ref))
    ok = shape == (2, 1) and mismatches == 0 and 0 < int(ref.sum()) < len(A)
    return CriterionResult(3, "T4 cylinder and fibres of K", ok,
                           {"a_b": list(shape), "mismatches": mismatches, "equal_pairs": int(ref.sum()),
                            "pairs": len(A)},
                           {"a_b": [2, 1], "mismatches": 0})


# -- 4 -----------------------------------------------------------------------

def criterion_4(seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    model = _model("t4_example")
    inst = build_instance(model)
    n_ok = la.span_basis(inst.n_basis()) == la.span_basis([_vec(0, 1, 0, 0), _vec(0, 0, 1, 0), _vec(0, 0, 0, 1)])
    iso_want = ClosedSubgroup.make(4, [_vec(0, 1, 0, 0), _vec(0, 0, 1, 0), _vec(0, 0, 0, 1)], [_vec(1, 0, 0, 0)], d=2)
    model_want = ClosedSubgroup.make(4, [_vec(1, 0, 0, 0), _vec(0, 0, 1, R2)], [])
    bad_iso, bad_dims, bad_models = 0, set(), 0
    for _ in range(20):
        mu = [Scalar(Fraction(int(x), 7)) for x in rng.integers(-20, 21, size=4)]
        m = model.random_point(rng)
        G = isotropy(inst, mu, "G", m)
        N = isotropy(inst, mu, "N", m)
        if not (G.preimage == iso_want and N.preimage == iso_want and G.components == 1 and N.components == 1):
            bad_iso += 1
        c = three_space_comparison(inst, mu, m)
        if c.dims != (2, 2, 2):
            bad_dims.add(c.dims)
        if not all(s.model == model_want for s in (c.symplectic, c.poisson, c.optimal)):
            bad_models += 1
    ok = n_ok and bad_iso == 0 and not bad_dims and bad_models == 0
    return CriterionResult(4, "T4 isotropy and reduced spaces", ok,
                           {"n_is_0xR3": n_ok, "isotropy_failures": bad_iso,
                            "bad_dims": sorted(bad_dims), "model_failures": bad_models},
                           {"n_is_0xR3": True, "isotropy_failures": 0, "dims": [2, 2, 2], "model_failures": 0,
                            "model": model_want.to_json()})


# -- 5 -----------------------------------------------------------------------

def criterion_5(seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    model = _model("t2xt2_example")
    inst = build_instance(model)
    dense = inst.subgroup.n == 1 and inst.subgroup.dim_V == 1
    ranks = {kernel_range_check(inst, model.random_point(rng)).rank for _ in range(5)}
    n_trivial = len(inst.n_basis()) == 0
    c = three_space_comparison(inst, None, model.random_point(rng))
    worst = 0.0
    r = np.sqrt(2.0)
    for _ in range(5):
        m0 = model.random_point(rng)
        path = LoopPath.winding(m0, rng.normal(size=4), rng.normal(size=4))
        mu0 = rng.normal(size=1)
        ts, mus = horizontal_lift(model, path, mu0, 10_000)
        P = np.array([path.point(t) for t in ts])
        surf = mu0[0] - (P[:, 1] - P[0, 1]) - r * (P[:, 3] - P[0, 3])
        worst = max(worst, float(np.max(np.abs(mus[:, 0] - surf))))
    ok = dense and ranks == {0} and n_trivial and c.dims == (4, 3, 2) and c.identity_holds and worst <= 1e-8
    return CriterionResult(5, "T2xT2 dense holonomy and reduced spaces", ok,
                           {"closure": inst.subgroup.to_json(), "K_ranks": sorted(ranks), "n_trivial": n_trivial,
                            "dims": list(c.dims), "dim_H": c.dim_H, "identity": c.identity_holds,
                            "surface_residual": worst},
                           {"closure": "V = R", "K_ranks": [0], "n_trivial": True, "dims": [4, 3, 2],
                            "identity": "3 = 4 - 1", "surface_residual": "<= 1e-8"})


# -- 6 -----------------------------------------------------------------------

def criterion_6(seed: int = 0) -> CriterionResult:
    model = _model("t2_area")
    inst = build_instance(model, tol=1e-6)
    want = ClosedSubgroup.make(2, [], [_vec(1, 0)])
    H = closure(inst.generators)
    rep = group_valued_J(inst, samples=100, rng=np.random.default_rng(seed))
    ok = H == want and rep.strict and rep.residual <= 1e-6
    return CriterionResult(6, "area-torus holonomy and group-valued momentum map", ok,
                           {"holonomy": H.to_json(), "strict_inclusion": rep.strict, "residual": rep.residual},
                           {"holonomy": want.to_json(), "strict_inclusion": True, "residual": "<= 1e-6"})


# -- 7 -----------------------------------------------------------------------

NOETHER_SUITE = {
    "t4_example": [
        ("0.5*(nu1**2 + nu2**2 + nu3**2 + nu4**2)", "G"),
        ("nu1*nu3 + sin(nu2)", "G"),
        ("cos(nu4) + nu1**3/3 + nu2*nu4", "G"),
        ("0.5*nu2**2 + cos(2*pi*u1)", "N"),
        ("nu1*nu2 + sin(2*pi*u1)*nu3 + 0.5*nu4**2", "N"),
    ],
    "zero_sigma_t4": [
        ("0.5*(nu1**2 + nu2**2 + nu3**2 + nu4**2)", "G"),
        ("nu1*nu2*nu3", "G"),
        ("sin(nu1) + cos(nu4)", "N"),
        ("exp(nu2/4) + nu3**2", "N"),
        ("nu1", "G"),
    ],
    "t2_magnetic": [
        ("0.5*(nu1**2 + nu2**2)", "G"),
        ("nu1*nu2", "G"),
        ("sin(nu1) + nu2**3/3", "N"),
        ("cos(nu2)*nu1", "N"),
        ("nu2", "G"),
    ],
}


def criterion_7(seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    drifts = {}
    for name, suite in NOETHER_SUITE.items():
        model = _model(name)
        inst = build_instance(model)
        for text, inv in suite:
            H = ChartFunction(text, model.coordinate_names())
            m0 = model.random_point(rng)
            drifts[f"{name}: {text} [{inv}]"] = noether_drift(inst, H, inv, m0, T=10.0, steps=10_000)
    worst = max(drifts.values())
    return CriterionResult(7, "Noether conservation of K", worst <= 1e-6,
                           {"max_drift": worst, "flows": len(drifts)}, {"max_drift": "<= 1e-6"})


# -- 8 -----------------------------------------------------------------------

def _monomials(n, deg=2):
    out = [PolyObservable.constant(n, 1)]
    for k in range(1, deg + 1):
        for combo in combinations_with_replacement(range(n), k):
            e = [0] * n
            for i in combo:
                e[i] += 1
            out.append(PolyObservable.monomial(tuple(e)))
    return out


def poisson_test_algebras():
    """(name, algebra, Σ): the T4 magnetic term and a Heisenberg-plus-line cocycle."""
    t4 = _model("t4_example").cocycle
    h3 = LieAlgebra.from_brackets(4, {(0, 1): [0, 0, 1, 0]})
    S = [[0] * 4 for _ in range(4)]
    S[0][3], S[3][0] = 1, -1
    S[0][1], S[1][0] = Fraction(1, 2), Fraction(-1, 2)
    return [("t4", t4.algebra, t4), ("h3+R", h3, TwoCocycle(S, h3))]


def criterion_8(seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    nonzero = {"antisymmetry": 0, "leibniz": 0, "jacobi": 0}
    checked = 0
    for _, alg, sigma in poisson_test_algebras():
        mons = _monomials(alg.dim)
        mus = [[Scalar(Fraction(int(p), int(q))) for p, q in zip(rng.integers(-9, 10, 4), rng.integers(1, 6, 4))]
               for _ in range(100)]
        for sign in (1, -1):
            br = lambda f, g: bracket_poly(alg, sigma, f, g, sign)
            residuals = {"antisymmetry": [], "leibniz": [], "jacobi": []}
            for i in range(len(mons)):
                for j in range(i, len(mons)):
                    residuals["antisymmetry"].append(br(mons[i], mons[j]) + br(mons[j], mons[i]))
            for _ in range(30):
                f, g, h = (mons[k] for k in rng.integers(0, len(mons), 3))
                residuals["leibniz"].append(br(f, g * h) - br(f, g) * h - g * br(f, h))
                residuals["jacobi"].append(br(f, br(g, h)) + br(g, br(h, f)) + br(h, br(f, g)))
            for key, polys in residuals.items():
                for p in polys:
                    checked += 1
                    if not p.is_zero() or any(not p(mu).is_zero() for mu in mus[:5]):
                        nonzero[key] += 1
                for mu in mus:
                    if any(not polys[k](mu).is_zero() for k in range(0, len(polys), max(1, len(polys) // 10))):
                        nonzero[key] += 1
    inst = build_instance(_model("t4_example"))
    C = inst.cylinder
    worst = 0.0
    for _ in range(50):
        f = CylObservable.random(C.free_rank, C.torus_rank, rng)
        g = CylObservable.random(C.free_rank, C.torus_rank, rng)
        worst = max(worst, verify_poisson_map_K(inst, f, g, inst.model.random_point(rng)))
    ok = all(v == 0 for v in nonzero.values()) and worst <= 1e-8
    return CriterionResult(8, "exact Poisson identities and K as a Poisson map", ok,
                           {"nonzero_residuals": nonzero, "identities_checked": checked, "poisson_map_residual": worst},
                           {"nonzero_residuals": 0, "poisson_map_residual": "<= 1e-8"})


# -- 9 -----------------------------------------------------------------------

LEMMA_MODELS = ("t4_example", "zero_sigma_t4", "t2_magnetic", "t2xt2_example")


def criterion_9(seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = {}
    for name in LEMMA_MODELS:
        model = _model(name)
        inst = build_instance(model)
        w, dims_ok = 0.0, True
        for _ in range(10):
            rep = reduction_lemma_check(inst, model.random_point(rng))
            w = max(w, rep.angle_i, rep.angle_ii)
            dims_ok &= rep.dims_i[0] == rep.dims_i[1] and rep.dims_ii[0] == rep.dims_ii[1]
        worst[name] = w if dims_ok else float("inf")
    ok = all(v <= 1e-5 for v in worst.values())
    return CriterionResult(9, "reduction lemma subspace identities", ok,
                           {"max_angle": worst}, {"max_angle": "<= 1e-5 for every model"})


# -- 10 ----------------------------------------------------------------------

def random_plane_subgroup(rng) -> GeneratedSubgroup:
    k = int(rng.integers(2, 4))
    gens = []
    for _ in range(k):
        gens.append(tuple(Scalar(int(rng.integers(-2, 3)), int(rng.integers(-2, 3)), 2) for _ in range(2)))
    return GeneratedSubgroup(2, tuple(gens))


def _split_basis(A: np.ndarray):
    """Greedy maximal linearly independent subset of the rows of ``A``."""
    keep, rest = [], []
    for i, row in enumerate(A):
        trial = A[keep + [i]]
        (keep if np.linalg.matrix_rank(trial, tol=1e-9) == len(keep) + 1 else rest).append(i)
    return A[keep], A[rest]


def _reduce(points: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Reduce points modulo the lattice ``Z B`` into its fundamental cell."""
    if not len(B):
        return points
    c, *_ = np.linalg.lstsq(B.T, points.T, rcond=None)
    return points - np.floor(c.T) @ B


def epsilon_net(G: GeneratedSubgroup, count: int = 200_000) -> tuple[np.ndarray, np.ndarray]:
    """Brute-force net of the group modulo a lattice ``Z B`` it contains.

    ``B`` is a maximal independent subset of the generators; integer
    combinations of the remaining generators (roughly ``count`` of them)
    are reduced into the fundamental cell of ``B``.  Returns ``(net, B)``.
    """
    B, rest = _split_basis(G.as_float())
    if not len(rest):
        return np.zeros((1, G.n)), B
    N = max(1, int(round((count ** (1 / len(rest)) - 1) / 2)))
    r = np.arange(-N, N + 1, dtype=float)
    coeffs = np.array(np.meshgrid(*[r] * len(rest), indexing="ij")).reshape(len(rest), -1).T
    return _reduce(coeffs @ rest, B), B


def oracle_agrees(G: GeneratedSubgroup, H: ClosedSubgroup, rng, contain_tol: float = 1e-9,
                  dense_tol: float = 1e-2, probes: int = 200) -> tuple[bool, float, float]:
    """Containment of the net in ``H`` and density of the net in ``H``.

    Probe points of ``H`` are reduced into the same cell and matched against
    the net (with neighbouring cells, so the cell boundary is harmless).
    Returns ``(ok, worst containment distance, worst density gap)``.
    """
    net, B = epsilon_net(G)
    cont = float(np.max(H.distance(net)))
    V, L = H.float_bases()
    k = len(B)
    shifts = np.array(np.meshgrid(*[[-1.0, 0.0, 1.0]] * k, indexing="ij")).reshape(k, -1).T if k else np.zeros((1, 0))
    tiled = np.concatenate([net + s @ B for s in shifts]) if k else net
    P = np.zeros((probes, G.n))
    if len(V):
        P += rng.uniform(-5, 5, size=(probes, len(V))) @ V
    if len(L):
        P += rng.integers(-5, 6, size=(probes, len(L))) @ L
    gap, _ = cKDTree(tiled).query(_reduce(P, B))
    gap = float(np.max(gap))
    exact_gens = all(H.contains(g) for g in G.generators)
    return exact_gens and cont <= contain_tol and gap <= dense_tol, cont, gap


def criterion_10(seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    failures, worst_c, worst_g = [], 0.0, 0.0
    kinds = {}
    for k in range(50):
        G = random_plane_subgroup(rng)
        H = closure(G)
        key = f"V{H.dim_V}L{H.rank_Lambda}"
        kinds[key] = kinds.get(key, 0) + 1
        ok, c, g = oracle_agrees(G, H, rng)
        worst_c, worst_g = max(worst_c, c), max(worst_g, g)
        if not ok:
            failures.append(str(G))
    return CriterionResult(10, "closure agrees with the epsilon-net oracle", not failures,
                           {"failures": failures, "max_containment": worst_c, "max_density_gap": worst_g,
                            "closure_types": dict(sorted(kinds.items()))},
                           {"failures": [], "max_containment": "<= 1e-9", "max_density_gap": "<= 1e-2",
                            "runtime_s": "< 60"})


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}
TIME_LIMITS = {1: 1.0, 2: 10.0, 10: 60.0}


def run_criterion(i: int, seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    try:
        res = CRITERIA[i](seed)
    except Exception as exc:  # a crash is a failure, reported with its message
        res = CriterionResult(i, CRITERIA[i].__name__, False, error=f"{type(exc).__name__}: {exc}")
    res.runtime = time.perf_counter() - t0
    limit = TIME_LIMITS.get(i)
    if limit is not None:
        res.measured["runtime_s"] = round(res.runtime, 3)
        if res.runtime >= limit:
            res.passed = False
    return res


def run_criteria(ids=None, seed: int = 0, jobs: int = 1) -> list[CriterionResult]:
    """Run the selected criteria; results come back sorted by id."""
    ids = sorted(set(ids or CRITERIA))
    if jobs > 1 and len(ids) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(run_criterion, ids, [seed] * len(ids)))
    else:
        results = [run_criterion(i, seed) for i in ids]
    return sorted(results, key=lambda r: r.id)
