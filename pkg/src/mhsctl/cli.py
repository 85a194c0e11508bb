"""``mhsctl``: run checks and constructions on a scenario file.

Exit status is 0 when every requested check passes, 1 when one fails and 2
on usage or parse errors.  Reports are deterministic for a fixed scenario,
seed and truncation.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .cohomology import (
    ExtensionData,
    check_target_vanishing,
    class_of_extension,
    cohomology,
    build_extension,
    ic_complex,
)
from .deformation import (
    Sample,
    check_conjugate_frame,
    check_frame_independence,
    check_orthogonality,
    check_positivity,
    check_surjectivity_hypothesis,
    check_transversality,
    default_samples,
    family_from_orbit,
    limit_fiber,
    vanishing_certificate,
)
from .linalg import Matrix
from .mhs import DecreasingFiltration, IncreasingFiltration, check_mhs, hom_from_Q
from .orbits import (
    NilpotentOrbit,
    check_pure_nilpotent_orbit,
    construct_four_vector_basis,
    validate_four_vector_basis,
)
from .scalars import GaussScalar, format_scalar, parse_scalar
from .scenario import (
    FORMAT,
    KNOWN_CHECKS,
    ScenarioError,
    parse_samples,
    builtin_path,
    load_scenario,
)

__all__ = ["main", "CheckResult", "run_checks"]

DEFORMATION_CHECKS = (
    "transversality",
    "conjugate-frame",
    "orthogonality",
    "limit",
    "independence",
    "positivity",
    "surjectivity",
)
REQUIRES = {
    "orbit": ("mhs",),
    "basis": ("orbit",),
    "h1": ("mhs",),
    "h1-dims": ("mhs",),
    "vanishing": ("mhs",),
    **{c: ("basis",) for c in DEFORMATION_CHECKS},
}
DEFAULT_SCENARIO = "h1_orbit"


@dataclass
class CheckResult:
    id: str
    status: str  # pass | fail | none
    detail: str = ""
    witness: str | None = None
    data: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"id": self.id, "status": self.status, "detail": self.detail}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.data:
            out["data"] = self.data
        return out

    def line(self) -> str:
        text = f"[{self.id}] {self.status}"
        if self.detail:
            text += f": {self.detail}"
        if self.witness is not None:
            text += f" (witness: {self.witness})"
        return text


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    return f"{x:.12g}"


def _vec(v) -> list:
    return [format_scalar(x) for x in v]


def _scalars(text: str, what: str) -> tuple:
    try:
        return tuple(parse_scalar(s) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise ScenarioError(f"--{what}: {exc}") from None


def _one_variable(orbit: NilpotentOrbit) -> NilpotentOrbit:
    if orbit.n > 1:
        if any(N != orbit.N[0] for N in orbit.N):
            raise ValueError("deformation needs a one-variable orbit (or equal nilpotents)")
        return orbit.with_N([orbit.N[0]])
    return orbit


def _pulled_back(sc, n: int | None) -> NilpotentOrbit:
    orbit = sc.orbit
    if n is not None and orbit.n == 1:
        return orbit.pullback(n)
    if n is not None and n != orbit.n:
        raise ValueError(f"scenario has {orbit.n} nilpotents; cannot use n = {n}")
    return orbit


def _verdict_result(cid: str, verdict) -> CheckResult:
    if verdict:
        return CheckResult(cid, "pass")
    clause, detail, witness = verdict.failures[0]
    more = f" (+{len(verdict.failures) - 1} more)" if len(verdict.failures) > 1 else ""
    return CheckResult(cid, "fail", f"{clause}: {detail}{more}", None if witness is None else _witness(witness))


def _witness(w) -> str:
    if isinstance(w, dict):
        return ", ".join(f"{k}={_witness(v)}" for k, v in w.items())
    if isinstance(w, (tuple, list)):
        return "(" + ", ".join(_witness(x) for x in w) + ")"
    return format_scalar(w) if isinstance(w, GaussScalar) else str(w)


def _expectation(sc, cid: str, value, detail: str, data: dict) -> CheckResult:
    """Pass when ``value`` matches the scenario's expectation (or is truthy when none is given)."""
    if cid in sc.expect:
        want = sc.expect[cid]
        ok = value == want
        if not ok:
            detail = f"{detail}; expected {json.dumps(want)}"
    else:
        ok = bool(value)
    return CheckResult(cid, "pass" if ok else "fail", detail, data=data)


class _Context:
    """Lazily built objects shared between checks."""

    def __init__(self, sc, opts):
        self.sc = sc
        self.opts = opts
        self._family = None
        self._basis = None

    @property
    def n(self) -> int | None:
        return self.opts.n if self.opts.n is not None else self.sc.param("n")

    @property
    def seed(self) -> int:
        return self.opts.seed if self.opts.seed is not None else self.sc.param("seed", 0)

    @property
    def lam(self):
        if self.opts.lam is not None:
            return None if self.opts.lam == "symbolic" else _scalars(self.opts.lam, "lambda")[0]
        return self.sc.param("lambda")

    def basis(self):
        if self._basis is None:
            self._basis = construct_four_vector_basis(_one_variable(self.sc.orbit))
        return self._basis

    def family(self):
        if self._family is None:
            trunc = self.opts.truncation if self.opts.truncation is not None else self.sc.param("truncation", 6)
            n = self.n or 1
            self._family = family_from_orbit(
                _one_variable(self.sc.orbit), self.basis(), self.lam, n, trunc, self.sc.param("C")
            )
        return self._family

    def samples(self):
        if self.opts.samples is not None:
            try:
                data = json.loads(Path(self.opts.samples).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise ScenarioError(f"--samples: {exc}") from None
            return list(parse_samples(data, "samples"))
        if self.sc.param("samples"):
            return list(self.sc.param("samples"))
        fam = self.family()
        if fam.lam_value is not None:
            lam = complex(fam.lam_value)
            return [Sample(s.t, lam) for s in default_samples(fam.n, lams=(lam,))]
        return default_samples(fam.n)


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------

def _check_mhs(ctx) -> CheckResult:
    return _verdict_result("mhs", check_mhs(ctx.sc.orbit.limit))


def _check_orbit(ctx) -> CheckResult:
    return _verdict_result("orbit", check_pure_nilpotent_orbit(ctx.sc.orbit, seed=ctx.seed))


def _check_basis(ctx) -> CheckResult:
    orbit = _one_variable(ctx.sc.orbit)
    b = ctx.basis()
    a = ctx.sc.param("a", b.a)
    res = _verdict_result("basis", validate_four_vector_basis(orbit, b.u, a))
    s, r = b.pairing_constants(orbit.pairing)
    res.data = {"u": [_vec(u) for u in b.u], "a": format_scalar(b.a), "s": format_scalar(s), "r": format_scalar(r), "dim H2": b.H2.dim}
    if res.status == "pass":
        res.detail = f"a = {format_scalar(b.a)}, <u2,u3> = {format_scalar(s)}, <u1,u4> = {format_scalar(r)}"
    return res


def _check_h1(ctx) -> CheckResult:
    orbit = _pulled_back(ctx.sc, ctx.n)
    H1 = cohomology(ic_complex(orbit), 1)
    hom = hom_from_Q(H1.mhs).dim
    data = {"n": orbit.n, "dim": H1.dim, "hom_from_Q": hom}
    detail = f"n = {orbit.n}: dim H^1 = {H1.dim}, dim Hom(Q, H^1) = {hom}"
    if "h1" in ctx.sc.expect:
        return _expectation(ctx.sc, "h1", H1.dim, detail, data)
    return CheckResult("h1", "pass", detail, data=data)


def _check_h1_dims(ctx) -> CheckResult:
    if ctx.sc.orbit.n != 1:
        return CheckResult("h1-dims", "fail", "needs a one-variable orbit")
    lo, hi = ctx.sc.param("n_range", (1, 5))
    dims, homs = [], []
    for n in range(lo, hi + 1):
        H1 = cohomology(ic_complex(ctx.sc.orbit.pullback(n)), 1)
        dims.append(H1.dim)
        homs.append(hom_from_Q(H1.mhs).dim)
    detail = f"n = {lo}..{hi}: dims {tuple(dims)}, Hodge classes {tuple(homs)}"
    data = {"n_range": [lo, hi], "dims": dims, "hom_from_Q": homs}
    if "h1-dims" in ctx.sc.expect:
        return _expectation(ctx.sc, "h1-dims", dims, detail, data)
    return CheckResult("h1-dims", "pass", detail, data=data)


def _check_vanishing(ctx) -> CheckResult:
    orbit = _pulled_back(ctx.sc, ctx.n)
    res = check_target_vanishing(orbit)
    detail = f"criterion {'holds' if res.holds else 'fails'}; real classes killed by Gr N: {res.witness_dim}"
    if res.target_dim is not None:
        detail += f"; dim Hom(Q, H^1) = {res.target_dim}"
    data = {"holds": res.holds, "witness_dim": res.witness_dim, "target_dim": res.target_dim}
    return _expectation(ctx.sc, "vanishing", res.holds, detail, data)


def _check_transversality(ctx) -> CheckResult:
    return _verdict_result("transversality", check_transversality(ctx.family()))


def _check_conjugate(ctx) -> CheckResult:
    return _verdict_result("conjugate-frame", check_conjugate_frame(ctx.family()))


def _check_orthogonality(ctx) -> CheckResult:
    return _verdict_result("orthogonality", check_orthogonality(ctx.family()))


def _check_limit(ctx) -> CheckResult:
    lf = limit_fiber(ctx.family())
    res = _verdict_result("limit", lf.verdict)
    if res.status == "pass":
        res.detail = "limit fibre is λ-free and a mixed Hodge structure"
    return res


def _check_independence(ctx) -> CheckResult:
    fam = ctx.family()
    fi = check_frame_independence(fam, ctx.samples())
    data = {"determinant": str(fi.determinant)}
    detail = f"det(w1, w2, w3, conj w1) = {fi.determinant}"
    ok = fi.ok
    if fi.at_lambda_zero is not None:
        data["at_lambda_zero"] = str(fi.at_lambda_zero)
        ok = ok and fi.at_lambda_zero == -1
    smallest = min(abs(v) for _, v in fi.values) if fi.values else float("nan")
    data["min_abs"] = _fmt_float(smallest)
    return CheckResult("independence", "pass" if ok else "fail", detail, data=data)


def _check_positivity(ctx) -> CheckResult:
    fam = ctx.family()
    samples = ctx.samples()
    rep = check_positivity(fam, samples)
    det = check_frame_independence(fam, samples)
    rows = []
    for r, (_, d) in zip(rep.results, det.values):
        rows.append(
            [",".join(_cfmt(x) for x in r.sample.t), _cfmt(r.sample.lam)]
            + [_fmt_float(r.values[p]) if p in r.values else "" for p in (1, 0, -1, -2)]
            + [str(r.dims.get(0, "")), _fmt_float(abs(d))]
        )
    data = {"columns": ["t", "lambda", "p=1", "p=0", "p=-1", "p=-2", "dim F0∩conjF-1", "|det|"], "rows": rows}
    if rep.ok:
        return CheckResult("positivity", "pass", f"{len(rep.results)} samples, min value {_fmt_float(rep.min_margin)}", data=data)
    bad = rep.failures()[0]
    return CheckResult("positivity", "fail", f"{len(rep.failures())} samples fail; {bad.reason}", bad.sample.label(), data)


def _cfmt(x: complex) -> str:
    x = complex(x)
    if not x.imag:
        return f"{x.real:.6g}"
    return f"{x.real:.6g}{x.imag:+.6g}i"


def _check_surjectivity(ctx) -> CheckResult:
    res = check_surjectivity_hypothesis(ctx.family())
    status = "pass" if res.holds else "fail"
    if "surjectivity" in ctx.sc.expect:
        status = "pass" if res.holds == ctx.sc.expect["surjectivity"] else "fail"
    if res.holds:
        return CheckResult("surjectivity", status, res.describe(), data={"holds": True})
    return CheckResult("surjectivity", status, "F^{-1} is not stable under ξ", res.describe(), {"holds": False})


CHECKS = {
    "mhs": _check_mhs,
    "orbit": _check_orbit,
    "basis": _check_basis,
    "h1": _check_h1,
    "h1-dims": _check_h1_dims,
    "vanishing": _check_vanishing,
    "transversality": _check_transversality,
    "conjugate-frame": _check_conjugate,
    "orthogonality": _check_orthogonality,
    "limit": _check_limit,
    "independence": _check_independence,
    "positivity": _check_positivity,
    "surjectivity": _check_surjectivity,
}


def run_checks(sc, names, opts) -> list:
    """Run ``names`` in dependency order; a check whose requested prerequisite
    did not pass is reported with status ``none``."""
    ctx = _Context(sc, opts)
    wanted = [c for c in KNOWN_CHECKS if c in set(names)]
    results: dict = {}
    for cid in wanted:
        blocked = [d for d in REQUIRES.get(cid, ()) if d in results and results[d].status != "pass"]
        if blocked:
            results[cid] = CheckResult(cid, "none", f"skipped: {blocked[0]} did not pass")
            continue
        try:
            results[cid] = CHECKS[cid](ctx)
        except (ValueError, ArithmeticError) as exc:
            results[cid] = CheckResult(cid, "fail", f"error: {exc}")
    return [results[c] for c in wanted]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _report(command: str, sc, checks: list, extra: dict | None = None) -> dict:
    out = {"format": FORMAT, "command": command, "scenario": sc.name}
    if checks:
        out["checks"] = [c.as_dict() for c in checks]
    if extra:
        out.update(extra)
    out["status"] = "pass" if all(c.status == "pass" for c in checks) else "fail"
    return out


def _emit(report: dict, text_lines: list, as_json: bool) -> None:
    if as_json:
        sys.stdout.write(json.dumps(report, indent=2, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write("\n".join(text_lines) + "\n")


def _cmd_check(sc, opts) -> int:
    names = opts.check or list(sc.checks) or ["mhs", "orbit"]
    results = run_checks(sc, names, opts)
    rep = _report("check", sc, results)
    _emit(rep, [r.line() for r in results], opts.json)
    return 0 if rep["status"] == "pass" else 1


def _cmd_cohomology(sc, opts) -> int:
    ctx = _Context(sc, opts)
    orbit = _pulled_back(sc, ctx.n)
    C = ic_complex(orbit)
    dims = [cohomology(C, k).dim for k in range(C.n + 1)]
    H1 = cohomology(C, 1)
    hom = hom_from_Q(H1.mhs).dim
    W = H1.mhs.W
    graded = {str(k): W[k].dim - W[k - 1].dim for k in W.jumps()}
    extra = {
        "n": orbit.n,
        "terms": [s.dim for s in C.spaces],
        "cohomology": dims,
        "hom_from_Q": hom,
        "h1_weights": graded,
    }
    lines = [
        f"n = {orbit.n}",
        "image complex terms: " + " ".join(str(s.dim) for s in C.spaces),
        "cohomology dims: " + " ".join(str(d) for d in dims),
        "H^1 weight graded dims: " + (", ".join(f"Gr_{k} = {v}" for k, v in graded.items()) or "none"),
        f"dim Hom(Q, H^1) = {hom}",
    ]
    _emit(_report("cohomology", sc, [], extra), lines, opts.json)
    return 0


def _steps_json(steps: dict) -> dict:
    return {str(k): [_vec(v) for v in s.basis] for k, s in steps.items()}


def _cmd_build_ext(sc, opts) -> int:
    ctx = _Context(sc, opts)
    orbit = _pulled_back(sc, ctx.n)
    H1 = cohomology(ic_complex(orbit), 1)
    if opts.alpha is None:
        hodge = H1.hodge_classes()
        if not hodge.dim:
            raise ValueError("H^1 has no Hodge classes")
        alpha = hodge.basis[0]
    else:
        alpha = _scalars(opts.alpha, "alpha")
    E = build_extension(orbit, alpha)
    verdict = E.validate()
    ext = {
        "kind": "extension",
        "n": orbit.n,
        "alpha": _vec(alpha),
        "alpha_Q": _vec(E.alpha_Q),
        "alpha_F": _vec(E.alpha_F),
        "beta": _vec(E.beta),
        "N": [N.to_strings() for N in E.N],
        "F": _steps_json(E.F.steps),
        "W": _steps_json(E.Wp.steps),
        "conjugation": E.J.to_strings(),
    }
    check = CheckResult("extension", "pass" if verdict else "fail", "mixed nilpotent orbit" if verdict else verdict.summary())
    rep = _report("build-ext", sc, [check], {"extension": ext})
    lines = [
        f"extension of Q by H (n = {orbit.n}) for class {','.join(_vec(alpha))}",
        "beta: " + ",".join(ext["beta"]),
        check.line(),
    ]
    _emit(rep, lines, opts.json)
    return 0 if verdict else 1


def _load_extension(path: str, orbit: NilpotentOrbit) -> ExtensionData:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"--extension: {exc}") from None
    if "extension" in data:
        data = data["extension"]
    try:
        d = orbit.dim + 1
        mats = [Matrix.from_strings(m) for m in data["N"]]
        F = DecreasingFiltration(d, {int(k): [tuple(parse_scalar(x) for x in v) for v in vs] for k, vs in data["F"].items()})
        W = IncreasingFiltration(d, {int(k): [tuple(parse_scalar(x) for x in v) for v in vs] for k, vs in data["W"].items()})
        J = Matrix.from_strings(data["conjugation"])
        vec = lambda key: tuple(parse_scalar(x) for x in data[key])
        return ExtensionData(orbit, vec("alpha_Q"), vec("alpha_F"), vec("beta"), tuple(mats), F, W, J)
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"--extension: missing or malformed field {exc}") from None


def _cmd_class(sc, opts) -> int:
    ctx = _Context(sc, opts)
    if opts.extension is None:
        raise ScenarioError("class needs --extension FILE (or - for stdin)")
    data_n = None
    if opts.extension != "-":
        try:
            raw = json.loads(Path(opts.extension).read_text(encoding="utf-8"))
            data_n = raw.get("extension", raw).get("n")
        except (OSError, json.JSONDecodeError, AttributeError):
            data_n = None
    n = ctx.n if opts.n is not None else (data_n or ctx.n)
    orbit = _pulled_back(sc, n)
    E = _load_extension(opts.extension, orbit)
    cls = class_of_extension(E)
    coords = _vec(cls.coords)
    rep = _report("class", sc, [CheckResult("extension", "pass", "mixed nilpotent orbit")], {"class": coords})
    _emit(rep, [",".join(coords)], opts.json)
    return 0


def _cmd_deform(sc, opts) -> int:
    names = opts.check or [c for c in sc.checks if c in DEFORMATION_CHECKS] or list(DEFORMATION_CHECKS)
    bad = [c for c in names if c not in DEFORMATION_CHECKS]
    if bad:
        raise ScenarioError(f"--check: {bad[0]} is not a deformation check")
    results = run_checks(sc, names, opts)
    rep = _report("deform", sc, results)
    lines = [r.line() for r in results]
    for r in results:
        if r.id == "positivity" and r.data.get("rows"):
            lines.append("# positivity samples")
            lines.append(",".join(r.data["columns"]))
            lines.extend(",".join(f'"{x}"' if "," in x else x for x in row) for row in r.data["rows"])
    _emit(rep, lines, opts.json)
    return 0 if rep["status"] == "pass" else 1


def _cmd_certify(sc, opts) -> int:
    ctx = _Context(sc, opts)
    n = ctx.n or 2
    degree = opts.truncation if opts.truncation is not None else sc.param("degree", 3)
    c = _scalars(opts.c, "c") if opts.c is not None else sc.param("c")
    if c is not None and len(c) != n:
        raise ScenarioError(f"--c: expected {n} values, got {len(c)}")
    fam = family_from_orbit(_one_variable(sc.orbit), ctx.basis(), None, n, max(6, 2 * degree + 2, 2 * n + 2), sc.param("C"))
    cert = vanishing_certificate(fam, c=c, lam=ctx.lam, degree=degree)
    extra = {
        "n": n,
        "h1_dim": cert.h1_dim,
        "target_dim": cert.target_dim,
        "equations": {f"k={k}": str(f) + " = 0" for k, f in cert.equations.items()},
        "identities": [{"k": k, "k'": kp, "multiplier": str(m), "text": f"{m}(c_{k}−c_{kp})=0"} for k, kp, m in cert.identities],
        "summary": cert.summary(),
    }
    if cert.feasibility is not None:
        f = cert.feasibility
        extra["feasibility"] = {
            "lambda": format_scalar(f.lam),
            "c": _vec(f.c),
            "degree": f.degree,
            "feasible": f.feasible,
            "unknowns": f.unknowns,
            "equations": f.equations,
        }
    _emit(_report("certify", sc, [], extra), [cert.summary()], opts.json)
    return 0


COMMANDS = {
    "check": _cmd_check,
    "cohomology": _cmd_cohomology,
    "class": _cmd_class,
    "build-ext": _cmd_build_ext,
    "deform": _cmd_deform,
    "certify": _cmd_certify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help=f"scenario JSON file or built-in name (default {DEFAULT_SCENARIO})")
    common.add_argument("--truncation", type=int, help="truncation order (certificate degree for certify)")
    common.add_argument("--seed", type=int, help="seed for randomized choices")
    common.add_argument("--samples", help="JSON list of {t, lambda} sample points")
    common.add_argument("--n", type=int, help="number of disk variables")
    common.add_argument("--lambda", dest="lam", help="deformation parameter (a scalar or 'symbolic')")
    common.add_argument("--c", help="comma separated class coordinates for certify")
    common.add_argument("--check", action="append", choices=KNOWN_CHECKS, help="restrict to this check (repeatable)")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="json", action="store_true", help="JSON report")
    fmt.add_argument("--text", dest="json", action="store_false", help="text report (default)")
    parser = argparse.ArgumentParser(prog="mhsctl", description="Limit mixed Hodge structure computations.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "build-ext":
            p.add_argument("--alpha", help="comma separated coordinates of a Hodge class of H^1")
        if name == "class":
            p.add_argument("--extension", help="extension JSON from build-ext (- for stdin)")
    return parser


def _scenario(opts):
    ref = opts.scenario or DEFAULT_SCENARIO
    path = Path(ref)
    if not path.exists():
        path = builtin_path(ref)
    return load_scenario(path)


def main(argv=None) -> int:
    parser = build_parser()
    opts = parser.parse_args(argv)
    try:
        sc = _scenario(opts)
        return COMMANDS[opts.command](sc, opts)
    except ScenarioError as exc:
        print(f"mhsctl: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"mhsctl: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
