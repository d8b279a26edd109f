"""Command line interface.

Subcommands: ``closure``, ``holonomy``, ``momentum``, ``poisson``,
``reduce`` and ``verify``.  Every report is a dict; ``--format json``
prints it with ``report_version = 1``, otherwise a short text rendering is
printed.  All sampling is seeded by ``--seed`` (default 0).

Hamiltonians and observables use a small expression grammar: numbers,
``+ - * / **``, parentheses, ``pi``, ``sqrt``, ``sin``, ``cos``, ``exp``,
``log``, ``tan`` and the coordinate names of the model (``u1.. nu1..`` for
magnetic models, ``mu1..`` for functions on the dual of the algebra).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import sympy as sp

from . import __version__
from . import linalg as la
from .acceptance import CRITERIA, run_criteria
from .config import ConfigError, build_model, bundled_names, parse_config
from .holonomy import LoopPath, coordinate_loops, holonomy_generators, holonomy_of_loop, lattice_loop
from .lie import CocycleError, UnsupportedModelError
from .models import ChartFunction, MagneticCotangentModel, lattice_displacement, parse_expression
from .momentum import PreconditionError, build_instance, check_invariance, flow
from .poisson import PolyObservable, bracket_poly, characteristic_distribution, symplectic_leaf
from .reduction import isotropy, symplectic_reduced, three_space_comparison
from .scalars import Scalar, format_scalar, parse_scalar
from .subgroups import Cylinder, GeneratedSubgroup, closure, discreteness_test, parse_generator_line

REPORT_VERSION = 1
log = logging.getLogger("cylred")


class UsageError(ValueError):
    pass


# -- helpers -----------------------------------------------------------------

def _load(args):
    cfg = parse_config(args.model)
    model = build_model(cfg)
    return cfg, model


def _instance(args, model, cfg):
    return build_instance(model, nu0=cfg.nu0 or None, steps=args.steps or 2000, tol=args.tol)


def _scalars(text: str, d: int) -> list[Scalar]:
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    return [parse_scalar(p.strip(), d) for p in parts]


def _floats(text: str) -> np.ndarray:
    parts = [p for p in text.replace(";", ",").replace(" ", ",").split(",") if p.strip()]
    return np.array([float(p) for p in parts])


def _fvec(v):
    return [float(x) for x in v]


def _svec(v):
    return [format_scalar(x) for x in v]


def poly_from_text(text: str, n: int, d: int) -> PolyObservable:
    """Polynomial in ``mu1..mun`` with coefficients in Q(sqrt d)."""
    names = [f"mu{i + 1}" for i in range(n)]
    expr = parse_expression(text, names)
    syms = [sp.Symbol(s, real=True) for s in names]
    try:
        P = sp.Poly(sp.expand(expr), *syms)
    except sp.PolynomialError as exc:
        raise UsageError(f"{text!r} is not a polynomial: {exc}") from None
    root = sp.sqrt(d) if d else sp.Integer(0)
    terms = {}
    for exps, c in P.terms():
        c = sp.nsimplify(sp.expand(c))
        b = sp.expand(c).coeff(root) if d else sp.Integer(0)
        a = sp.expand(c - b * root)
        if not (a.is_Rational and b.is_Rational):
            raise UsageError(f"coefficient {c} is not in Q(sqrt({d}))")
        terms[tuple(int(e) for e in exps)] = Scalar(Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q)), d)
    return PolyObservable(n, terms)


# -- subcommands -------------------------------------------------------------

def cmd_closure(args):
    lines = Path(args.generators).read_text(encoding="utf-8").splitlines()
    gens = [parse_generator_line(l, args.field) for l in lines if l.strip() and not l.lstrip().startswith("#")]
    if not gens:
        raise UsageError("no generators in file")
    n = len(gens[0])
    if any(len(g) != n for g in gens):
        raise UsageError("generators have different lengths")
    G = GeneratedSubgroup(n, tuple(map(tuple, gens)))
    H = closure(G)
    C = Cylinder(H)
    return {
        "command": "closure",
        "generators": [_svec(g) for g in gens],
        "closure": H.to_json(),
        "closed": discreteness_test(G),
        "cylinder": [C.free_rank, C.torus_rank],
    }


def _read_loop(path: str) -> LoopPath:
    pts = [_floats(l) for l in Path(path).read_text(encoding="utf-8").splitlines()
           if l.strip() and not l.lstrip().startswith("#")]
    return LoopPath.from_samples(pts)


def cmd_holonomy(args):
    cfg, model = _load(args)
    steps = args.steps or 10_000
    rows = []
    if args.loop:
        loop = _read_loop(args.loop)
        h = holonomy_of_loop(model, loop, steps) / model.holonomy_scale
        rows.append({"loop": args.loop, "holonomy": _fvec(h)})
    else:
        for L in cfg.loops:
            h = holonomy_of_loop(model, LoopPath.from_samples(L.points), steps) / model.holonomy_scale
            rows.append({"loop": L.name, "holonomy": _fvec(h)})
        try:
            for ell in model.group_kernel():
                lattice_displacement(model, ell)
            loops = [(f"lattice {_svec(ell)}", lattice_loop(model, ell), ell) for ell in model.group_kernel()]
        except UnsupportedModelError:
            loops = [(f"coordinate loop {i + 1}", L, None) for i, L in enumerate(coordinate_loops(model))]
        for name, loop, ell in loops:
            h = holonomy_of_loop(model, loop, steps) / model.holonomy_scale
            row = {"loop": name, "holonomy": _fvec(h)}
            if ell is not None and isinstance(model, MagneticCotangentModel):
                exact = model.cocycle.column(ell)
                row["exact"] = _svec(exact)
                row["error"] = float(np.max(np.abs(h - la.vec_to_float(exact))))
            rows.append(row)
    inst = _instance(args, model, cfg)
    return {
        "command": "holonomy",
        "model": cfg.name,
        "steps": steps,
        "loops": rows,
        "generators": [_svec(g) for g in inst.generators.generators],
        "closure": inst.subgroup.to_json(),
        "closed": discreteness_test(inst.generators),
    }


def _point(args, model, rng):
    if getattr(args, "point", None):
        m = _floats(args.point)
        if len(m) != model.chart_dim:
            raise UsageError(f"point needs {model.chart_dim} coordinates, got {len(m)}")
        return m
    return model.random_point(rng)


def cmd_momentum(args):
    cfg, model = _load(args)
    inst = _instance(args, model, cfg)
    rng = np.random.default_rng(args.seed)
    m = _point(args, model, rng)
    out = {"command": f"momentum {args.action}", "model": cfg.name, "point": _fvec(m),
           "cylinder": [inst.cylinder.free_rank, inst.cylinder.torus_rank]}
    if args.action == "eval":
        out["J"] = _fvec(inst.J(m))
        out["K"] = inst.K(m).to_json()
        return out
    H = ChartFunction(args.hamiltonian, model.coordinate_names())
    check_invariance(inst, H, args.invariance, rng)
    steps = args.steps or 10_000
    traj = flow(model, H, m, args.T, steps, every=max(1, steps // 1000))
    k0 = inst.K(m)
    drift = max(inst.cylinder.distance(inst.K(x), k0) for x in traj)
    out.update({"hamiltonian": args.hamiltonian, "invariance": args.invariance, "T": args.T, "steps": steps,
                "K_start": k0.to_json(), "K_end": inst.K(traj[-1]).to_json(), "drift": drift,
                "energy_drift": float(max(abs(H(x) - H(m)) for x in traj))})
    return out


def _require_magnetic(model, what):
    if not isinstance(model, MagneticCotangentModel):
        raise UnsupportedModelError(f"{what} needs a magnetic model")


def cmd_poisson(args):
    cfg, model = _load(args)
    _require_magnetic(model, "the exact bracket")
    inst = _instance(args, model, cfg)
    n = model.alg_dim
    mu = _scalars(args.at, model.d)
    if len(mu) != n:
        raise UsageError(f"--at needs {n} entries")
    if args.action == "bracket":
        f = poly_from_text(args.f, n, model.d)
        g = poly_from_text(args.g, n, model.d)
        alg, sigma = model.cocycle.algebra, model.cocycle
        b = bracket_poly(alg, sigma, f, g, args.sign)
        return {"command": "poisson bracket", "model": cfg.name, "sign": args.sign, "f": args.f, "g": args.g,
                "bracket": str(b), "at": _svec(mu), "value": format_scalar(b(mu))}
    L = symplectic_leaf(inst, la.vec_to_float(mu))
    E = characteristic_distribution(inst, mu)
    return {"command": "poisson leaves", "model": cfg.name, "at": _svec(mu), "base": L.base.to_json(),
            "leaf_dim": L.dim, "directions": [_svec(v) for v in E.directions],
            "leaf_closure": L.orbit_closure.to_json()}


def cmd_reduce(args):
    cfg, model = _load(args)
    inst = _instance(args, model, cfg)
    rng = np.random.default_rng(args.seed)
    mu = _scalars(args.at, model.d) if args.at else None
    if mu is not None and len(mu) != model.alg_dim:
        raise UsageError(f"--at needs {model.alg_dim} entries")
    m = _point(args, model, rng)
    out = {"command": "reduce", "model": cfg.name, "at": _svec(mu) if mu else None,
           "isotropy": {"G": isotropy(inst, mu, "G", m).to_json(), "N": isotropy(inst, mu, "N", m).to_json()}}
    if args.all_spaces:
        out["comparison"] = three_space_comparison(inst, mu, m).to_json()
    else:
        out["symplectic"] = symplectic_reduced(inst, mu, m).to_json()
    return out


def cmd_verify(args):
    """Run acceptance criteria; configs select criteria via their ``acceptance`` list."""
    ids, built = set(), []
    for name in args.configs:
        cfg = parse_config(name)
        build_model(cfg)
        built.append(cfg.name)
        ids.update(cfg.acceptance)
    if args.all or not args.configs:
        ids = set(CRITERIA)
    results = run_criteria(sorted(ids), args.seed, args.jobs)
    return {"command": "verify", "configs": built, "passed": all(r.passed for r in results),
            "criteria": [r.to_json() for r in results]}


# -- rendering ---------------------------------------------------------------

def render_text(rep: dict) -> str:
    if rep.get("command") == "verify" and "criteria" in rep:
        from .acceptance import CriterionResult
        lines = [CriterionResult(**{k: c[k] for k in ("id", "title", "passed", "measured", "expected",
                                                     "runtime", "error")}).line() for c in rep["criteria"]]
        lines.append("all criteria passed" if rep["passed"] else "some criteria FAILED")
        return "\n".join(lines)
    lines = []

    def walk(prefix, v):
        if isinstance(v, dict):
            for k, x in v.items():
                walk(f"{prefix}.{k}" if prefix else k, x)
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            for i, x in enumerate(v):
                walk(f"{prefix}[{i}]", x)
        else:
            lines.append(f"{prefix}: {v}")

    walk("", rep)
    return "\n".join(lines)


def emit(rep: dict, fmt: str, stream=None):
    stream = stream or sys.stdout
    rep = {"report_version": REPORT_VERSION, **rep}
    if fmt == "json":
        stream.write(json.dumps(rep, indent=2, sort_keys=False, default=str) + "\n")
    else:
        stream.write(render_text(rep) + "\n")


# -- parser ------------------------------------------------------------------

def _common_flags(suppress: bool) -> argparse.ArgumentParser:
    """Global flags; subcommand copies use SUPPRESS so a value given before
    the subcommand is not reset to its default."""
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--seed", type=int, default=dflt(0), help="RNG seed for sampled points (default 0)")
    c.add_argument("--steps", type=int, default=dflt(None), help="integration steps")
    c.add_argument("--tol", type=float, default=dflt(1e-6), help="rationalization tolerance")
    c.add_argument("--format", choices=("text", "json"), default=dflt("text"))
    c.add_argument("-v", "--verbose", action="store_true", default=dflt(False))
    return c


def build_parser() -> argparse.ArgumentParser:
    top = _common_flags(suppress=False)
    common = _common_flags(suppress=True)

    p = argparse.ArgumentParser(prog="cylred", parents=[top],
                                description="Cylinder valued momentum maps, holonomy and reduction.")
    p.add_argument("--version", action="version", version=f"cylred {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("closure", parents=[common], help="closure of a finitely generated subgroup")
    c.add_argument("--generators", required=True, help="file with one generator per line")
    c.add_argument("--field", type=int, default=None, help="radicand d of Q(sqrt d)")
    c.set_defaults(func=cmd_closure)

    h = sub.add_parser("holonomy", parents=[common], help="holonomy of loops")
    h.add_argument("--model", required=True, help="config path or bundled model name")
    g = h.add_mutually_exclusive_group()
    g.add_argument("--loop", help="file of sampled chart points, one per line")
    g.add_argument("--lattice-basis", action="store_true", help="loops of a ker exp basis (default)")
    h.set_defaults(func=cmd_holonomy)

    m = sub.add_parser("momentum", parents=[common], help="cylinder valued momentum map")
    m.add_argument("--model", required=True)
    ms = m.add_subparsers(dest="action", required=True)
    e = ms.add_parser("eval", parents=[common], help="evaluate J and K at a point")
    e.add_argument("--point", help="chart point, e.g. 'u1,u2;nu1,nu2' (random if omitted)")
    nz = ms.add_parser("noether", parents=[common], help="drift of K along a Hamiltonian flow")
    nz.add_argument("--hamiltonian", required=True, help="expression in the chart coordinates")
    nz.add_argument("--invariance", choices=("G", "N"), default="G")
    nz.add_argument("--T", type=float, default=10.0)
    nz.add_argument("--point")
    m.set_defaults(func=cmd_momentum)

    q = sub.add_parser("poisson", parents=[common], help="brackets and symplectic leaves")
    q.add_argument("--model", required=True)
    qs = q.add_subparsers(dest="action", required=True)
    b = qs.add_parser("bracket", parents=[common], help="exact affine Lie-Poisson bracket of polynomials")
    b.add_argument("--f", required=True)
    b.add_argument("--g", required=True)
    b.add_argument("--at", required=True, help="point of g*, Scalar strings separated by ';' or ','")
    b.add_argument("--sign", type=int, choices=(1, -1), default=1)
    lv = qs.add_parser("leaves", parents=[common], help="symplectic leaf through [mu]")
    lv.add_argument("--at", required=True)
    q.set_defaults(func=cmd_poisson)

    r = sub.add_parser("reduce", parents=[common], help="reduced spaces at [mu]")
    r.add_argument("--model", required=True)
    r.add_argument("--at", help="point of g* (Scalar strings)")
    r.add_argument("--point", help="phase point used for numerical ranks (random if omitted)")
    r.add_argument("--all-spaces", action="store_true", help="symplectic, Poisson and optimal")
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("verify", parents=[common], help="run acceptance criteria")
    v.add_argument("configs", nargs="*", help=f"configs; bundled: {', '.join(bundled_names())}")
    v.add_argument("--all", action="store_true", help="run every criterion")
    v.add_argument("--jobs", type=int, default=1, help="worker processes")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        rep = args.func(args)
    except (ConfigError, CocycleError, UnsupportedModelError, PreconditionError, UsageError,
            FileNotFoundError, ValueError, ArithmeticError) as exc:
        emit({"command": args.command, "error": f"{type(exc).__name__}: {exc}"}, args.format, sys.stderr)
        return 2
    emit(rep, args.format)
    if args.command == "verify" and not rep["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
