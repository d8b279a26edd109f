"""Declarative model configuration (TOML).

Two kinds of model are supported:

* ``kind = "magnetic"``: ``T*G`` for ``G = T^a × R^b`` with a magnetic term
  given by a matrix ``Σ`` of Scalar strings (an empty or missing matrix
  means ``Σ = 0``).  An optional ``[algebra]`` table lists nonzero brackets
  of a test algebra; magnetic models only accept Abelian algebras, but the
  cocycle identity is still checked so corrupted inputs fail loudly.
* ``kind = "toy"``: a chart with expression-valued ``ω`` and generators.

``parse_config`` collects every diagnostic before failing.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import tomli_w

from .lie import AbelianGroup, LieAlgebra, TwoCocycle, UnsupportedModelError
from .models import ExpressionModel, MagneticCotangentModel, SymplecticModel, parse_expression
from .scalars import Scalar, format_scalar, parse_scalar


class ConfigError(ValueError):
    """Raised with the full list of diagnostics."""

    def __init__(self, path, diagnostics):
        self.path = str(path)
        self.diagnostics = list(diagnostics)
        lines = "\n".join(f"  {d}" for d in self.diagnostics)
        super().__init__(f"{self.path}: {len(self.diagnostics)} problem(s)\n{lines}")


@dataclass(frozen=True)
class ToyBlock:
    coordinates: tuple
    omega: tuple
    generators: tuple
    periods: tuple
    holonomy_scale: str = "1"
    group_kernel: tuple = ()


@dataclass(frozen=True)
class LoopSpec:
    name: str
    points: tuple


@dataclass(frozen=True)
class ModelConfig:
    name: str
    kind: str
    d: int = 0
    torus_rank: int = 0
    line_rank: int = 0
    sigma: tuple = ()
    brackets: tuple = ()  # ((i, j, (c_1, ..., c_n)), ...), 0-based, i < j
    nu0: tuple = ()
    toy: ToyBlock | None = None
    samples: tuple = ()
    loops: tuple = ()
    acceptance: tuple = ()
    description: str = ""

    @property
    def dim(self) -> int:
        if self.kind == "toy":
            return len(self.toy.generators)
        return self.torus_rank + self.line_rank


def bundled_names() -> list[str]:
    root = resources.files("cylred") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def resolve(name_or_path) -> Path:
    """A path, or the name of a bundled config."""
    p = Path(name_or_path)
    if p.exists():
        return p
    candidate = resources.files("cylred") / "configs" / f"{name_or_path}.toml"
    if candidate.is_file():
        return Path(str(candidate))
    raise FileNotFoundError(f"no config file or bundled model named {name_or_path!r}")


def _locate(text: str, literal: str):
    needle = f'"{literal}"'
    for i, line in enumerate(text.splitlines(), 1):
        j = line.find(needle)
        if j >= 0:
            return i, j + 2
    return None


class _Collector:
    def __init__(self, text):
        self.text = text
        self.items: list[str] = []

    def add(self, where, msg, literal=None):
        loc = _locate(self.text, literal) if literal is not None else None
        prefix = f"line {loc[0]}, column {loc[1]}: " if loc else ""
        self.items.append(f"{prefix}{where}: {msg}")

    def scalar(self, where, raw, d):
        if isinstance(raw, bool) or not isinstance(raw, (str, int)):
            self.add(where, f"expected a Scalar string, got {raw!r}")
            return Scalar.coerce(0)
        try:
            return parse_scalar(str(raw), d)
        except (ValueError, ArithmeticError) as exc:
            self.add(where, str(exc), str(raw))
            return Scalar.coerce(0)

    def vector(self, where, raw, d, n=None):
        if not isinstance(raw, list):
            self.add(where, "expected a list")
            return ()
        if n is not None and len(raw) != n:
            self.add(where, f"expected {n} entries, got {len(raw)}")
        return tuple(self.scalar(f"{where}[{k}]", x, d) for k, x in enumerate(raw))


def parse_text(text: str, path="<string>") -> ModelConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(path, [f"TOML syntax: {exc}"]) from None
    c = _Collector(text)
    cfg = _from_dict(data, c)
    if c.items:
        raise ConfigError(path, c.items)
    return cfg


def parse_config(path) -> ModelConfig:
    path = resolve(path)
    return parse_text(path.read_text(encoding="utf-8"), path)


def _from_dict(data: dict, c: _Collector) -> ModelConfig:
    name = str(data.get("name", "model"))
    kind = data.get("kind", "magnetic")
    if kind not in ("magnetic", "toy"):
        c.add("kind", f"unknown model kind {kind!r}")
        kind = "magnetic"
    d = data.get("field", 0)
    if not isinstance(d, int) or isinstance(d, bool) or d < 0:
        c.add("field", f"radicand must be a non-negative integer, got {d!r}")
        d = 0
    group = data.get("group", {})
    a = group.get("torus_rank", 0)
    b = group.get("line_rank", 0)
    for key, v in (("group.torus_rank", a), ("group.line_rank", b)):
        if not isinstance(v, int) or v < 0:
            c.add(key, f"expected a non-negative integer, got {v!r}")
    a = a if isinstance(a, int) and a >= 0 else 0
    b = b if isinstance(b, int) and b >= 0 else 0

    toy = None
    if kind == "toy":
        toy = _toy_block(data.get("toy"), d, c)
        n = len(toy.generators) if toy else 0
    else:
        n = a + b

    raw_sigma = data.get("cocycle", {}).get("sigma", [])
    sigma = ()
    if raw_sigma:
        if kind == "toy":
            c.add("cocycle.sigma", "toy models take no magnetic term")
        elif not isinstance(raw_sigma, list) or len(raw_sigma) != n:
            c.add("cocycle.sigma", f"expected a {n}x{n} matrix")
        else:
            before = len(c.items)
            sigma = tuple(c.vector(f"cocycle.sigma[{i}]", r, d, n) for i, r in enumerate(raw_sigma))
            if len(c.items) == before:
                for i in range(n):
                    for j in range(i, n):
                        if sigma[i][j] != -sigma[j][i]:
                            c.add(f"cocycle.sigma[{i}][{j}]", "Σ is not antisymmetric")

    brackets = []
    for k, br in enumerate(data.get("algebra", {}).get("bracket", [])):
        where = f"algebra.bracket[{k}]"
        i, j, val = br.get("i"), br.get("j"), br.get("value", [])
        if not (isinstance(i, int) and isinstance(j, int) and 1 <= i < j <= n):
            c.add(where, f"need 1 <= i < j <= {n}, got i={i!r}, j={j!r}")
            continue
        brackets.append((i - 1, j - 1, c.vector(f"{where}.value", val, d, n)))

    nu0 = ()
    if "nu0" in data:
        nu0 = c.vector("nu0", data["nu0"], d, n)

    chart = 2 * n if kind == "magnetic" else (len(toy.coordinates) if toy else 0)
    samples = []
    for k, p in enumerate(data.get("samples", {}).get("points", [])):
        if not isinstance(p, list) or len(p) != chart or not all(isinstance(x, (int, float)) for x in p):
            c.add(f"samples.points[{k}]", f"expected {chart} numbers")
            continue
        samples.append(tuple(float(x) for x in p))

    loops = []
    for k, L in enumerate(data.get("loops", [])):
        pts = L.get("points", [])
        ok = isinstance(pts, list) and len(pts) >= 2 and all(
            isinstance(p, list) and len(p) == chart and all(isinstance(x, (int, float)) for x in p) for p in pts)
        if not ok:
            c.add(f"loops[{k}]", f"expected at least two points with {chart} numbers each")
            continue
        loops.append(LoopSpec(str(L.get("name", f"loop{k + 1}")), tuple(tuple(float(x) for x in p) for p in pts)))

    acc = data.get("acceptance", [])
    if not (isinstance(acc, list) and all(isinstance(x, int) and 1 <= x <= 10 for x in acc)):
        c.add("acceptance", "expected a list of criterion numbers 1..10")
        acc = []

    return ModelConfig(
        name=name, kind=kind, d=d, torus_rank=a, line_rank=b, sigma=sigma,
        brackets=tuple(brackets), nu0=nu0, toy=toy, samples=tuple(samples), loops=tuple(loops),
        acceptance=tuple(sorted(set(acc))), description=str(data.get("description", "")),
    )


def _toy_block(raw, d, c: _Collector) -> ToyBlock | None:
    if not isinstance(raw, dict):
        c.add("toy", "toy models need a [toy] table")
        return None
    coords = tuple(map(str, raw.get("coordinates", [])))
    k = len(coords)
    if k == 0:
        c.add("toy.coordinates", "need at least one coordinate")

    def exprs(where, rows, width):
        out = []
        for i, r in enumerate(rows):
            if not isinstance(r, list) or len(r) != width:
                c.add(f"{where}[{i}]", f"expected {width} expressions")
                continue
            for j, e in enumerate(r):
                try:
                    parse_expression(str(e), coords)
                except ValueError as exc:
                    c.add(f"{where}[{i}][{j}]", str(exc), str(e))
            out.append(tuple(map(str, r)))
        return tuple(out)

    omega = exprs("toy.omega", raw.get("omega", []), k)
    if len(omega) != k:
        c.add("toy.omega", f"expected a {k}x{k} matrix")
    gens = exprs("toy.generators", raw.get("generators", []), k)
    if not gens:
        c.add("toy.generators", "need at least one generator")
    periods = tuple(map(str, raw.get("periods", ["0"] * k)))
    if len(periods) != k:
        c.add("toy.periods", f"expected {k} entries")
    for i, p in enumerate(periods):
        try:
            parse_expression(p, [])
        except ValueError as exc:
            c.add(f"toy.periods[{i}]", str(exc), p)
    scale = str(raw.get("holonomy_scale", "1"))
    try:
        parse_expression(scale, [])
    except ValueError as exc:
        c.add("toy.holonomy_scale", str(exc), scale)
    kern = tuple(c.vector(f"toy.group_kernel[{i}]", v, d, len(gens))
                 for i, v in enumerate(raw.get("group_kernel", [])))
    return ToyBlock(coords, omega, gens, periods, scale, kern)


def to_dict(cfg: ModelConfig) -> dict:
    out: dict = {"name": cfg.name, "kind": cfg.kind, "field": cfg.d}
    if cfg.description:
        out["description"] = cfg.description
    if cfg.acceptance:
        out["acceptance"] = list(cfg.acceptance)
    if cfg.kind == "magnetic":
        out["group"] = {"torus_rank": cfg.torus_rank, "line_rank": cfg.line_rank}
    if cfg.nu0:
        out["nu0"] = [format_scalar(x) for x in cfg.nu0]
    if cfg.sigma:
        out["cocycle"] = {"sigma": [[format_scalar(x) for x in r] for r in cfg.sigma]}
    if cfg.brackets:
        out["algebra"] = {"bracket": [
            {"i": i + 1, "j": j + 1, "value": [format_scalar(x) for x in v]} for i, j, v in cfg.brackets]}
    if cfg.toy is not None:
        t = cfg.toy
        out["toy"] = {
            "coordinates": list(t.coordinates),
            "omega": [list(r) for r in t.omega],
            "generators": [list(r) for r in t.generators],
            "periods": list(t.periods),
            "holonomy_scale": t.holonomy_scale,
            "group_kernel": [[format_scalar(x) for x in v] for v in t.group_kernel],
        }
    if cfg.samples:
        out["samples"] = {"points": [list(p) for p in cfg.samples]}
    if cfg.loops:
        out["loops"] = [{"name": L.name, "points": [list(p) for p in L.points]} for L in cfg.loops]
    return out


def dumps(cfg: ModelConfig) -> str:
    return tomli_w.dumps(to_dict(cfg))


def algebra_of(cfg: ModelConfig) -> LieAlgebra:
    n = cfg.dim
    if not cfg.brackets:
        return LieAlgebra.abelian(n)
    return LieAlgebra.from_brackets(n, {(i, j): list(v) for i, j, v in cfg.brackets})


def build_model(cfg: ModelConfig) -> SymplecticModel:
    """Construct the model; raises ``CocycleError`` for a corrupted Σ and
    ``UnsupportedModelError`` for a non-Abelian magnetic base."""
    if cfg.kind == "toy":
        t = cfg.toy
        return ExpressionModel(t.coordinates, t.omega, t.generators, t.periods, t.holonomy_scale,
                               [list(v) for v in t.group_kernel], d=cfg.d, name=cfg.name)
    n = cfg.dim
    g = algebra_of(cfg)
    rows = [list(r) for r in cfg.sigma] if cfg.sigma else [[Scalar.coerce(0)] * n for _ in range(n)]
    sigma = TwoCocycle(rows, g)
    if not g.is_abelian:
        raise UnsupportedModelError("magnetic models need an Abelian base group")
    return MagneticCotangentModel(AbelianGroup(cfg.torus_rank, cfg.line_rank), sigma, cfg.name)
