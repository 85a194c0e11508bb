"""Scenario documents: a nilpotent orbit plus run parameters, as JSON.

Scalars are strings (``"1/2"``, ``"-3/4+1/2i"``); vectors are lists of
scalars; filtrations map an index (a string) to a list of spanning vectors.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .linalg import Matrix
from .mhs import DecreasingFiltration, FiltrationError, IncreasingFiltration, MixedHodgeStructure, Pairing
from .orbits import NilpotentOrbit
from .scalars import format_scalar, parse_scalar

__all__ = [
    "FORMAT",
    "FIELDS",
    "KNOWN_CHECKS",
    "ScenarioError",
    "Scenario",
    "parse_scenario",
    "load_scenario",
    "scenario_to_dict",
    "dump_scenario",
    "builtin_path",
    "parse_samples",
]

FORMAT = 1
FIELDS = ("rational", "gaussian")
KNOWN_CHECKS = (
    "mhs",
    "orbit",
    "basis",
    "h1",
    "h1-dims",
    "vanishing",
    "transversality",
    "conjugate-frame",
    "orthogonality",
    "limit",
    "independence",
    "positivity",
    "surjectivity",
)
PARAMETER_KEYS = ("a", "C", "lambda", "n", "n_range", "c", "truncation", "degree", "seed", "samples")


class ScenarioError(ValueError):
    """Malformed scenario; the message names the offending field."""


@dataclass(frozen=True)
class Scenario:
    name: str
    orbit: NilpotentOrbit
    scalar_field: str = "gaussian"
    parameters: dict = field(default_factory=dict)
    checks: tuple = ()
    expect: dict = field(default_factory=dict)

    def param(self, key: str, default=None):
        return self.parameters.get(key, default)

    def with_parameters(self, **updates) -> "Scenario":
        params = dict(self.parameters)
        params.update({k: v for k, v in updates.items() if v is not None})
        return replace(self, parameters=params)


def builtin_path(name: str) -> Path:
    """Path of a fixture shipped with the package (``h1_orbit``, ``three_nilpotents``)."""
    fname = name if name.endswith(".json") else name + ".json"
    ref = resources.files("mhsctl") / "fixtures" / fname
    path = Path(str(ref))
    if not path.exists():
        raise ScenarioError(f"no built-in scenario named {name!r}")
    return path


def _scalar(x, where: str):
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise ScenarioError(f"{where}: expected a scalar string, got {x!r}")
    try:
        return parse_scalar(str(x))
    except ValueError as exc:
        raise ScenarioError(f"{where}: {exc}") from None


def _vector(x, dim: int, where: str) -> tuple:
    if not isinstance(x, list) or len(x) != dim:
        raise ScenarioError(f"{where}: expected a vector of length {dim}")
    return tuple(_scalar(v, f"{where}[{i}]") for i, v in enumerate(x))


def _matrix(x, dim: int, where: str) -> Matrix:
    if not isinstance(x, list) or len(x) != dim:
        raise ScenarioError(f"{where}: expected {dim} rows")
    return Matrix([_vector(r, dim, f"{where}[{i}]") for i, r in enumerate(x)], dim)


def _steps(x, dim: int, where: str) -> dict:
    if not isinstance(x, dict) or not x:
        raise ScenarioError(f"{where}: expected a non-empty map index -> vectors")
    out = {}
    for key, vecs in x.items():
        try:
            k = int(key)
        except ValueError:
            raise ScenarioError(f"{where}: index {key!r} is not an integer") from None
        if not isinstance(vecs, list):
            raise ScenarioError(f"{where}[{k}]: expected a list of vectors")
        out[k] = [_vector(v, dim, f"{where}[{k}][{i}]") for i, v in enumerate(vecs)]
    return out


def _increasing(x, dim: int) -> IncreasingFiltration:
    steps = _steps(x, dim, "W")
    keys = sorted(steps)
    filt = {}
    for k in keys:
        filt[k] = steps[k]
        try:
            IncreasingFiltration(dim, filt)
        except FiltrationError:
            prev = keys[keys.index(k) - 1]
            raise ScenarioError(f"W: not increasing at index {k} (W_{prev} is not contained in W_{k})") from None
    return IncreasingFiltration(dim, steps)


def _decreasing(x, dim: int) -> DecreasingFiltration:
    steps = _steps(x, dim, "F")
    keys = sorted(steps, reverse=True)
    filt = {}
    for p in keys:
        filt[p] = steps[p]
        try:
            DecreasingFiltration(dim, filt)
        except FiltrationError:
            prev = keys[keys.index(p) - 1]
            raise ScenarioError(f"F: not decreasing at index {p} (F^{prev} is not contained in F^{p})") from None
    return DecreasingFiltration(dim, steps)


def _parameters(x) -> dict:
    if x is None:
        return {}
    if not isinstance(x, dict):
        raise ScenarioError("parameters: expected an object")
    out = {}
    for key, v in x.items():
        if key not in PARAMETER_KEYS:
            raise ScenarioError(f"parameters.{key}: unknown parameter")
        where = f"parameters.{key}"
        if key in ("a", "C"):
            out[key] = _scalar(v, where)
        elif key == "lambda":
            out[key] = None if v in (None, "symbolic") else _scalar(v, where)
        elif key in ("n", "truncation", "degree", "seed"):
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise ScenarioError(f"{where}: expected a non-negative integer")
            out[key] = v
        elif key == "n_range":
            if not (isinstance(v, list) and len(v) == 2 and all(isinstance(i, int) for i in v) and 1 <= v[0] <= v[1]):
                raise ScenarioError(f"{where}: expected [lo, hi] with 1 <= lo <= hi")
            out[key] = tuple(v)
        elif key == "c":
            if not isinstance(v, list):
                raise ScenarioError(f"{where}: expected a list of scalars")
            out[key] = tuple(_scalar(s, f"{where}[{i}]") for i, s in enumerate(v))
        elif key == "samples":
            out[key] = parse_samples(v, where)
    return out


def _complex(x, where: str) -> complex:
    try:
        return complex(str(x).replace("i", "j").replace(" ", ""))
    except ValueError:
        raise ScenarioError(f"{where}: not a complex number: {x!r}") from None


def parse_samples(v, where: str) -> tuple:
    from .deformation import Sample

    if not isinstance(v, list):
        raise ScenarioError(f"{where}: expected a list of samples")
    out = []
    for i, s in enumerate(v):
        if not isinstance(s, dict) or "t" not in s:
            raise ScenarioError(f"{where}[{i}]: expected an object with key 't'")
        ts = s["t"] if isinstance(s["t"], list) else [s["t"]]
        t = tuple(_complex(x, f"{where}[{i}].t") for x in ts)
        for x in t:
            if not 0 < abs(x) < 1:
                raise ScenarioError(f"{where}[{i}].t: points must lie in the punctured unit disk")
        out.append(Sample(t, _complex(s.get("lambda", 0), f"{where}[{i}].lambda")))
    return tuple(out)


def parse_scenario(data: dict) -> Scenario:
    """Validate a decoded scenario document."""
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    if data.get("format") != FORMAT:
        raise ScenarioError(f"format: expected {FORMAT}, got {data.get('format')!r}")
    space = data.get("space")
    if not isinstance(space, dict):
        raise ScenarioError("space: missing")
    dim = space.get("dimension")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ScenarioError("space.dimension: expected a positive integer")
    fld = space.get("field", "gaussian")
    if fld not in FIELDS:
        raise ScenarioError(f"space.field: expected one of {', '.join(FIELDS)}")
    labels = space.get("labels")
    if labels is None:
        labels = [f"e{i + 1}" for i in range(dim)]
    if not (isinstance(labels, list) and len(labels) == dim and all(isinstance(s, str) for s in labels)):
        raise ScenarioError(f"space.labels: expected {dim} strings")
    J = _matrix(space.get("conjugation"), dim, "space.conjugation")
    W = _increasing(data.get("W"), dim)
    F = _decreasing(data.get("F"), dim)
    Ns = data.get("N")
    if not isinstance(Ns, list) or not Ns:
        raise ScenarioError("N: expected a non-empty list of matrices")
    N = tuple(_matrix(m, dim, f"N[{i}]") for i, m in enumerate(Ns))
    weight = data.get("weight", -1)
    if isinstance(weight, bool) or not isinstance(weight, int):
        raise ScenarioError("weight: expected an integer")
    pairing = None
    if data.get("pairing") is not None:
        p = data["pairing"]
        if not isinstance(p, dict):
            raise ScenarioError("pairing: expected an object")
        pw = p.get("weight", weight)
        if isinstance(pw, bool) or not isinstance(pw, int):
            raise ScenarioError("pairing.weight: expected an integer")
        pairing = Pairing(_matrix(p.get("matrix"), dim, "pairing.matrix"), pw)
    if fld == "rational":
        for where, M in [("space.conjugation", J)] + [(f"N[{i}]", m) for i, m in enumerate(N)] + (
            [("pairing.matrix", pairing.matrix)] if pairing else []
        ):
            if any(x.im for row in M.rows for x in row):
                raise ScenarioError(f"{where}: non-real entry in a rational scenario")
    checks = data.get("checks", [])
    if not isinstance(checks, list) or any(c not in KNOWN_CHECKS for c in checks):
        bad = [c for c in checks if c not in KNOWN_CHECKS] if isinstance(checks, list) else checks
        raise ScenarioError(f"checks: unknown check {bad!r}")
    expect = data.get("expect", {})
    if not isinstance(expect, dict):
        raise ScenarioError("expect: expected an object")
    H = MixedHodgeStructure(dim, W, F, J, labels=tuple(labels))
    orbit = NilpotentOrbit(H, N, pairing, weight)
    name = data.get("name", "")
    if not isinstance(name, str):
        raise ScenarioError("name: expected a string")
    return Scenario(name, orbit, fld, _parameters(data.get("parameters")), tuple(checks), dict(expect))


def load_scenario(path) -> Scenario:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_scenario(data)


def _vec_out(v) -> list:
    return [format_scalar(x) for x in v]


def _steps_out(steps: dict) -> dict:
    return {str(k): [_vec_out(v) for v in s.basis] for k, s in steps.items()}


def scenario_to_dict(sc: Scenario) -> dict:
    o = sc.orbit
    H = o.limit
    params = {}
    for key, v in sc.parameters.items():
        if key in ("a", "C"):
            params[key] = format_scalar(v)
        elif key == "lambda":
            params[key] = "symbolic" if v is None else format_scalar(v)
        elif key == "c":
            params[key] = _vec_out(v)
        elif key == "n_range":
            params[key] = list(v)
        elif key == "samples":
            params[key] = [{"t": [_cfmt(x) for x in s.t], "lambda": _cfmt(s.lam)} for s in v]
        else:
            params[key] = v
    out = {
        "format": FORMAT,
        "name": sc.name,
        "space": {
            "dimension": H.dim,
            "field": sc.scalar_field,
            "labels": list(H.labels) if H.labels else [f"e{i + 1}" for i in range(H.dim)],
            "conjugation": H.J.to_strings(),
        },
        "W": _steps_out(H.W.steps),
        "F": _steps_out(H.F.steps),
        "N": [N.to_strings() for N in o.N],
        "weight": o.weight,
    }
    if o.pairing is not None:
        out["pairing"] = {"matrix": o.pairing.matrix.to_strings(), "weight": o.pairing.weight}
    out["parameters"] = params
    out["checks"] = list(sc.checks)
    if sc.expect:
        out["expect"] = sc.expect
    return out


def _cfmt(x: complex) -> str:
    x = complex(x)
    return f"{x.real!r}{x.imag:+}i" if x.imag else repr(x.real)


_ITEM = r'(?:"[^"\[\],]*"|-?\d+)'
_FLAT_LIST = re.compile(r"\[\s*(" + _ITEM + r"(?:,\s*" + _ITEM + r")*)\s*\]")


def dump_scenario(sc: Scenario) -> str:
    """Indented JSON with each vector on one line."""
    text = json.dumps(scenario_to_dict(sc), indent=2, ensure_ascii=False)
    text = _FLAT_LIST.sub(lambda m: "[" + ", ".join(x.strip() for x in m.group(1).split(",")) + "]", text)
    return text + "\n"
