"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 numerically degenerate input.
Set ``DSHIFT_LOG_LEVEL`` to change the logging level (default WARNING).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .counterexamples import phi_bounds, phi_bruteforce
from .encoding import (
    decode_complex,
    decode_ideal_spec,
    decode_matrix,
    decode_pick_problem,
    decode_point,
    decode_polynomial,
    decode_vector,
    dumps,
    encode_matrix,
    to_jsonable,
)
from .errors import DomainError, InputError
from .geometry import TangentVector, c_shift, cstar_shift, metric_shift, pair_decomposable
from .linalg import DEFAULT_TOL
from .pick import feasible, quotient_norm
from .recipe import (
    QuotientElement,
    build_model,
    commutator_defect,
    membership_ball,
    membership_cone,
    quotient_element_norm,
)
from .twodim import classify_two_dim
from .verify import run_suite

log = logging.getLogger("dshift")

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_DOMAIN = 0, 1, 2, 3
KINDS = ("pick", "ideal_membership", "distance", "metric", "classify2", "verify", "phi")
FORMAT_VERSION = "1"


@dataclass
class ProblemFile:
    kind: str
    payload: dict = field(default_factory=dict)
    version: str = FORMAT_VERSION
    tol: float = DEFAULT_TOL

    @classmethod
    def from_json(cls, obj, path="") -> "ProblemFile":
        p = (lambda k: f"{path}.{k}" if path else k)
        if not isinstance(obj, dict):
            raise InputError("problem file must be a JSON object", path or None)
        kind = obj.get("kind")
        if kind not in KINDS:
            raise InputError(f"kind must be one of {', '.join(KINDS)}", p("kind"))
        version = obj.get("version", FORMAT_VERSION)
        if not isinstance(version, str):
            raise InputError("version must be a string", p("version"))
        payload = obj.get("payload", {})
        if not isinstance(payload, dict):
            raise InputError("payload must be an object", p("payload"))
        tol = obj.get("tol", DEFAULT_TOL)
        if not isinstance(tol, (int, float)) or isinstance(tol, bool) or not tol >= 0 \
                or not math.isfinite(tol):
            raise InputError("tol must be a finite nonnegative number", p("tol"))
        return cls(kind, payload, version, float(tol))

    def to_json(self) -> dict:
        return {"version": self.version, "kind": self.kind, "payload": self.payload, "tol": self.tol}


# --------------------------------------------------------------------------
# evaluators; each returns a JSON-ready report dict


def _feasibility(report) -> dict:
    out = {
        "verdict": report.verdict.value,
        "min_eigenvalue": report.min_eigenvalue,
        "margin": report.margin,
        "ill_conditioned": report.ill_conditioned,
    }
    if report.warnings:
        out["warnings"] = list(report.warnings)
    return out


def eval_pick(pf: ProblemFile, action: str = "both") -> dict:
    problem = decode_pick_problem(pf.payload)
    out = {}
    if action in ("check", "both"):
        out.update(_feasibility(feasible(problem, pf.tol)))
    if action in ("norm", "both"):
        out["quotient_norm"] = quotient_norm(problem.nodes, problem.targets)
        if problem.variant.value != "ball" or problem.transposed:
            out.setdefault("warnings", []).append("quotient_norm uses standard ball semantics")
    return out


def _element(model, payload):
    if "element" in payload:
        raw = payload["element"]
        if not isinstance(raw, list):
            raise InputError("element must be a list of matrices", "payload.element")
        mats = [decode_matrix(F, f"payload.element[{k}]") for k, F in enumerate(raw)]
        if len(mats) != model.r:
            raise InputError(f"element needs {model.r} coefficient matrices", "payload.element")
        return QuotientElement(mats)
    if "polynomial" in payload:
        raw = payload["polynomial"]
        if not isinstance(raw, list) or not raw:
            raise InputError("polynomial must be a nonempty list", "payload.polynomial")
        terms = {}
        for i, t in enumerate(raw):
            tp = f"payload.polynomial[{i}]"
            if not isinstance(t, dict) or "alpha" not in t or "coeff" not in t:
                raise InputError("term needs alpha and coeff", tp)
            a = decode_polynomial([{"alpha": t["alpha"], "coeff": 1}], model.d, tp)
            (alpha,) = a.terms
            terms[alpha] = terms.get(alpha, 0) + decode_matrix(t["coeff"], f"{tp}.coeff")
        return QuotientElement.from_polynomial_matrix(model, terms)
    raise InputError("need 'element' or 'polynomial'", "payload")


def _model_summary(model) -> dict:
    return {
        "codimension": model.r,
        "interior_dimension": model.interior_dim,
        "boundary_count": model.boundary_count,
        "gram": encode_matrix(model.B) if model.interior_dim else [],
        "R": [encode_matrix(R) for R in model.R] if model.interior_dim else [],
        "commutator_defect": commutator_defect(model),
        "ill_conditioned": model.ill_conditioned,
        "metadata": dict(model.spec.metadata),
        "warnings": list(model.warnings),
    }


def eval_ideal(pf: ProblemFile, action: str = "check") -> dict:
    payload = pf.payload
    spec = decode_ideal_spec(payload.get("ideal", payload), "payload.ideal" if "ideal" in payload else "payload")
    model = build_model(spec)
    if action == "build":
        return _model_summary(model)
    F = _element(model, payload)
    test = payload.get("test", "ball")
    if test not in ("ball", "cone"):
        raise InputError("test must be 'ball' or 'cone'", "payload.test")
    report = (membership_ball if test == "ball" else membership_cone)(model, F, pf.tol)
    out = _feasibility(report)
    out["test"] = test
    out["norm"] = quotient_element_norm(model, F)
    out["generator_rule"] = spec.metadata.get("generator_rule")
    return out


def eval_distance(pf: ProblemFile) -> dict:
    x = decode_point(pf.payload.get("x"), "payload.x")
    y = decode_point(pf.payload.get("y"), "payload.y")
    if x.d != y.d:
        raise InputError("x and y must have equal dimension", "payload.y")
    out = {"cstar": cstar_shift(x, y), "c": c_shift(x, y)}
    if x != y:
        out["decomposable"] = pair_decomposable(x, y)
    return out


def eval_metric(pf: ProblemFile) -> dict:
    a = decode_point(pf.payload.get("base"), "payload.base")
    X = decode_vector(pf.payload.get("direction"), "payload.direction")
    return {"gamma": metric_shift(TangentVector(a, X))}


def eval_classify2(pf: ProblemFile) -> dict:
    G = decode_matrix(pf.payload.get("G"), "payload.G")
    try:
        return {"c": classify_two_dim(G).c}
    except InputError as exc:
        raise type(exc)(str(exc), "payload.G") from None


def eval_verify(pf: ProblemFile) -> dict:
    checks = run_suite()
    return {
        "checks": [
            {"name": c.name, "observed": c.observed, "expected": c.expected,
             "status": "pass" if c.passed else "fail"}
            for c in checks
        ],
        "all_passed": all(c.passed for c in checks),
    }


def eval_phi(pf: ProblemFile) -> dict:
    def real(key):
        v = pf.payload.get(key)
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise InputError("expected a real number", f"payload.{key}")
        return float(v)

    c, d = real("c"), real("d")
    budget = pf.payload.get("budget", 200)
    if not isinstance(budget, int) or isinstance(budget, bool) or budget < 1:
        raise InputError("budget must be a positive integer", "payload.budget")
    lo, hi = phi_bounds(c, d)
    est = phi_bruteforce(c, d, budget)
    return {"estimate": est.value, "certified": est.certified, "lower": lo, "upper": hi}


EVALUATORS = {
    "pick": eval_pick,
    "ideal_membership": eval_ideal,
    "distance": eval_distance,
    "metric": eval_metric,
    "classify2": eval_classify2,
    "verify": eval_verify,
    "phi": eval_phi,
}


def evaluate(pf: ProblemFile, action: str | None = None) -> dict:
    fn = EVALUATORS[pf.kind]
    body = fn(pf, action) if action is not None else fn(pf)
    return {"kind": pf.kind, "tol": pf.tol, "version": pf.version, "input": pf.payload, "result": body}


def _guarded(pf: ProblemFile, action=None) -> tuple[int, dict]:
    try:
        return EXIT_OK, evaluate(pf, action)
    except InputError as exc:
        return EXIT_INPUT, {"kind": pf.kind, "error": str(exc), "error_type": "input"}
    except DomainError as exc:
        return EXIT_DOMAIN, {"kind": pf.kind, "error": str(exc), "error_type": "numerical"}


# --------------------------------------------------------------------------
# grids


def _axis_points(d, n, radius, axis):
    if not 0 <= radius <= 1:
        raise InputError("grid radius must lie in [0, 1]", "--radius")
    if n < 1:
        raise InputError("grid needs at least one point", "--n")
    if not 0 <= axis < d:
        raise InputError(f"axis must lie in [0, {d - 1}]", "--axis")
    ts = [0.0] if n == 1 else np.linspace(-radius, radius, n)
    pts = []
    for t in ts:
        v = np.zeros(d, dtype=complex)
        v[axis] = t
        pts.append(v)
    return pts


def _coord_columns(prefix, d):
    return [f"{prefix}{k + 1}_{part}" for k in range(d) for part in ("re", "im")]


def _coords(v):
    return [x for z in v for x in (repr(float(z.real)), repr(float(z.imag)))]


def grid_emit(kind: str, d: int, n: int, radius: float, axis: int = 0, directions: int = 4) -> str:
    """CSV of sampled quotient distances or metrics; deterministic row order."""
    pts = _axis_points(d, n, radius, axis)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if kind == "distance":
        w.writerow(["i", "j"] + _coord_columns("x", d) + _coord_columns("y", d) + ["cstar", "c"])
        for i, x in enumerate(pts):
            for j, y in enumerate(pts):
                cs = cstar_shift(x, y)
                w.writerow([i, j] + _coords(x) + _coords(y) + [repr(cs), str(c_shift(x, y))])
    elif kind == "metric":
        if directions < 1:
            raise InputError("need at least one direction", "--directions")
        w.writerow(["i", "k"] + _coord_columns("a", d) + _coord_columns("X", d) + ["gamma"])
        for i, a in enumerate(pts):
            if float(np.vdot(a, a).real) >= 1:
                raise InputError("metric grid points must lie in the open ball", "--radius")
            for k in range(directions):
                theta = math.pi * k / directions
                X = np.zeros(d, dtype=complex)
                if d == 1:
                    X[0] = complex(math.cos(theta), math.sin(theta))
                else:
                    X[0], X[1] = math.cos(theta), math.sin(theta)
                val = metric_shift(TangentVector(a, X))
                w.writerow([i, k] + _coords(a) + _coords(X) + [repr(val)])
    else:
        raise InputError(f"unknown grid kind {kind!r}")
    return buf.getvalue()


# --------------------------------------------------------------------------
# output


def _fmt_scalar(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    if isinstance(v, list) and len(v) == 2 and all(isinstance(t, float) for t in v):
        return format(complex(*v), ".6g")
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def render_table(report: dict) -> str:
    lines = []
    if "error" in report:
        return f"error ({report['error_type']}): {report['error']}\n"
    result = to_jsonable(report["result"])
    if report["kind"] == "verify":
        rows = [(c["name"], _fmt_scalar(c["observed"]), c["expected"], c["status"]) for c in result["checks"]]
        widths = [max(len(r[i]) for r in rows + [("check", "observed", "expected", "status")])
                  for i in range(4)]
        header = ("check", "observed", "expected", "status")
        for r in [header] + rows:
            lines.append("  ".join(s.ljust(wd) for s, wd in zip(r, widths)).rstrip())
        return "\n".join(lines) + "\n"
    width = max(len(k) for k in result) if result else 0
    for k in sorted(result):
        lines.append(f"{k.ljust(width)}  {_fmt_scalar(result[k])}")
    return "\n".join(lines) + "\n"


def _emit(report, as_json, out):
    out.write(dumps(report) + "\n" if as_json else render_table(report))


# --------------------------------------------------------------------------
# argument parsing


def _parse_complex_list(text, name):
    try:
        vals = [complex(t.strip().replace(" ", "")) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"cannot parse {text!r} as comma-separated complex numbers", name) from None
    if not vals:
        raise InputError("expected at least one value", name)
    return vals


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _problem_from_file(path, expected_kinds, tol):
    obj = _read_json(path)
    if isinstance(obj, dict) and "kind" not in obj:
        obj = {"kind": expected_kinds[0], "payload": obj}
    pf = ProblemFile.from_json(obj)
    if pf.kind not in expected_kinds:
        raise InputError(f"expected kind {' or '.join(expected_kinds)}, got {pf.kind}", "kind")
    if tol is not None:
        pf.tol = tol
    return pf


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dshift", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit deterministic JSON")
    common.add_argument("--tol", type=float, default=None, help="positivity tolerance (default 1e-9)")
    parser.add_argument("--batch", metavar="PATH", help="evaluate a JSON list of problem files")
    parser.add_argument("--json", action="store_true", dest="top_json", help=argparse.SUPPRESS)
    parser.add_argument("--tol", type=float, default=None, dest="top_tol", help=argparse.SUPPRESS)
    parser.add_argument("--workers", type=int, default=4, help="threads for --batch")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("pick", parents=[common], help="Pick feasibility and quotient norm")
    p.add_argument("action", choices=["check", "norm"])
    p.add_argument("file")

    p = sub.add_parser("ideal", parents=[common], help="quotient models of jet ideals")
    p.add_argument("action", choices=["build", "check"])
    p.add_argument("file")

    p = sub.add_parser("dist", parents=[common], help="quotient distance c* and c")
    p.add_argument("file", nargs="?")
    p.add_argument("--d", type=int)
    p.add_argument("--x", help="comma-separated coordinates, e.g. 0.1+0.2j,0")
    p.add_argument("--y")

    p = sub.add_parser("metric", parents=[common], help="quotient metric gamma(a; X)")
    p.add_argument("file", nargs="?")
    p.add_argument("--d", type=int)
    p.add_argument("--a")
    p.add_argument("--X", dest="X")

    p = sub.add_parser("classify2", parents=[common], help="invariant c of span{1, G}")
    p.add_argument("file")

    sub.add_parser("verify", parents=[common], help="run the built-in verification suite")

    p = sub.add_parser("phi", parents=[common], help="estimate phi(c, d)")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--budget", type=int, default=200)

    p = sub.add_parser("grid", help="CSV samples of c* or gamma along a diameter")
    p.add_argument("kind", choices=["distance", "metric"])
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--radius", type=float, default=0.9)
    p.add_argument("--axis", type=int, default=0)
    p.add_argument("--directions", type=int, default=4)
    return parser


def _point_arg(text, d, name):
    if text is None:
        raise InputError("missing argument", name)
    vals = _parse_complex_list(text, name)
    if d is not None and len(vals) != d:
        raise InputError(f"expected {d} coordinates, got {len(vals)}", name)
    return [[v.real, v.imag] for v in vals]


def _problem_from_args(args) -> tuple[ProblemFile, str | None]:
    tol = args.tol if args.tol is not None else args.top_tol
    cmd = args.command
    if cmd == "pick":
        return _problem_from_file(args.file, ["pick"], tol), args.action
    if cmd == "ideal":
        return _problem_from_file(args.file, ["ideal_membership"], tol), args.action
    if cmd == "classify2":
        pf = _problem_from_file(args.file, ["classify2"], tol)
        return pf, None
    if cmd == "dist":
        if args.file:
            return _problem_from_file(args.file, ["distance"], tol), None
        payload = {"x": _point_arg(args.x, args.d, "--x"), "y": _point_arg(args.y, args.d, "--y")}
        return ProblemFile("distance", payload, tol=tol if tol is not None else DEFAULT_TOL), None
    if cmd == "metric":
        if args.file:
            return _problem_from_file(args.file, ["metric"], tol), None
        payload = {"base": _point_arg(args.a, args.d, "--a"), "direction": _point_arg(args.X, args.d, "--X")}
        return ProblemFile("metric", payload, tol=tol if tol is not None else DEFAULT_TOL), None
    if cmd == "verify":
        return ProblemFile("verify", {}), None
    if cmd == "phi":
        return ProblemFile("phi", {"c": args.c, "d": args.d, "budget": args.budget}), None
    raise InputError(f"unknown command {cmd!r}")  # pragma: no cover


def run_batch(path, as_json, out, workers=4, tol=None) -> int:
    obj = _read_json(path)
    if isinstance(obj, dict) and "problems" in obj:
        obj = obj["problems"]
    if not isinstance(obj, list):
        raise InputError("batch file must be a JSON list of problem files", path)
    items = []
    for i, raw in enumerate(obj):
        try:
            pf = ProblemFile.from_json(raw, f"[{i}]")
            if tol is not None:
                pf.tol = tol
            items.append(pf)
        except InputError as exc:
            items.append(exc)

    def work(item):
        if isinstance(item, InputError):
            return EXIT_INPUT, {"kind": None, "error": str(item), "error_type": "input"}
        return _guarded(item)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(work, items))
    code = max((c for c, _ in results), default=EXIT_OK)
    if as_json:
        out.write(dumps([r for _, r in results]) + "\n")
    else:
        for i, (_, r) in enumerate(results):
            out.write(f"# item {i}: {r.get('kind')}\n")
            out.write(render_table(r))
    return code


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    level = os.environ.get("DSHIFT_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    as_json = getattr(args, "json", False) or args.top_json
    try:
        if args.batch:
            return run_batch(args.batch, as_json, out, args.workers, args.top_tol)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_INPUT
        if args.command == "grid":
            out.write(grid_emit(args.kind, args.d, args.n, args.radius, args.axis, args.directions))
            return EXIT_OK
        pf, action = _problem_from_args(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    code, report = _guarded(pf, action)
    if code:
        print(f"error: {report['error']}", file=sys.stderr)
        if as_json:
            _emit(report, True, out)
        return code
    _emit(report, as_json, out)
    if pf.kind == "verify" and not report["result"]["all_passed"]:
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
