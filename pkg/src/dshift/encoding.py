"""JSON codecs and deterministic serialization.

Complex numbers are encoded as ``[re, im]``; plain JSON numbers are
accepted on input as real values.  :func:`dumps` writes sorted keys and
floats with 17 significant digits, so equal inputs give byte-identical
output and every float round-trips exactly.
"""

from __future__ import annotations

import enum
import json
import math
from typing import Any

import numpy as np

from .errors import InputError
from .kernel import BallPoint, JetFunctional, Polynomial

# --------------------------------------------------------------------------
# decoding


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def decode_complex(v, path="value") -> complex:
    if _is_number(v):
        z = complex(v)
    elif isinstance(v, (list, tuple)) and len(v) == 2 and all(_is_number(t) for t in v):
        z = complex(v[0], v[1])
    else:
        raise InputError("expected a number or a [re, im] pair", path)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InputError("complex value must be finite", path)
    return z


def decode_vector(v, path="vector") -> np.ndarray:
    if not isinstance(v, list) or not v:
        raise InputError("expected a nonempty list of complex values", path)
    return np.array([decode_complex(t, f"{path}[{i}]") for i, t in enumerate(v)], dtype=complex)


def decode_matrix(v, path="matrix") -> np.ndarray:
    if _is_number(v) or (isinstance(v, list) and len(v) == 2 and all(_is_number(t) for t in v)):
        return np.array([[decode_complex(v, path)]])
    if not isinstance(v, list) or not v or not all(isinstance(r, list) for r in v):
        raise InputError("expected a nonempty list of rows", path)
    rows = [decode_vector(r, f"{path}[{i}]") for i, r in enumerate(v)]
    if len({len(r) for r in rows}) != 1:
        raise InputError("matrix rows have different lengths", path)
    return np.array(rows)


def decode_point(v, path="point") -> BallPoint:
    try:
        return BallPoint(decode_vector(v, path))
    except InputError as exc:
        if exc.path:
            raise
        raise InputError(str(exc), path) from None


def _require(obj, key, path):
    if not isinstance(obj, dict):
        raise InputError("expected an object", path)
    if key not in obj:
        raise InputError(f"missing field {key!r}", path)
    return obj[key]


def _alpha(v, path):
    if not isinstance(v, list) or not all(isinstance(t, int) and not isinstance(t, bool) for t in v):
        raise InputError("multi-index must be a list of integers", path)
    return tuple(v)


def decode_functional(obj, path="functional") -> JetFunctional:
    base = decode_point(_require(obj, "base", path), f"{path}.base")
    terms_raw = _require(obj, "terms", path)
    if not isinstance(terms_raw, list) or not terms_raw:
        raise InputError("expected a nonempty list of terms", f"{path}.terms")
    terms: dict = {}
    for i, t in enumerate(terms_raw):
        tp = f"{path}.terms[{i}]"
        a = _alpha(_require(t, "alpha", tp), f"{tp}.alpha")
        if len(a) != base.d:
            raise InputError(f"multi-index must have length {base.d}", f"{tp}.alpha")
        terms[a] = terms.get(a, 0) + decode_complex(_require(t, "coeff", tp), f"{tp}.coeff")
    try:
        return JetFunctional(base, terms)
    except InputError as exc:
        raise InputError(str(exc), path) from None


def decode_polynomial(obj, d: int, path="polynomial") -> Polynomial:
    if not isinstance(obj, list):
        raise InputError("polynomial must be a list of {alpha, coeff} terms", path)
    terms = []
    for i, t in enumerate(obj):
        tp = f"{path}[{i}]"
        a = _alpha(_require(t, "alpha", tp), f"{tp}.alpha")
        if len(a) != d:
            raise InputError(f"multi-index must have length {d}", f"{tp}.alpha")
        terms.append((a, decode_complex(_require(t, "coeff", tp), f"{tp}.coeff")))
    return Polynomial(d, terms)


def _int(v, path, minimum=1):
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        raise InputError(f"expected an integer >= {minimum}", path)
    return v


def decode_pick_problem(obj, path="payload"):
    from .pick import PickProblem

    d = _int(_require(obj, "d", path), f"{path}.d")
    nodes_raw = _require(obj, "nodes", path)
    targets_raw = _require(obj, "targets", path)
    if not isinstance(nodes_raw, list) or not isinstance(targets_raw, list):
        raise InputError("nodes and targets must be lists", path)
    nodes = [decode_point(x, f"{path}.nodes[{i}]") for i, x in enumerate(nodes_raw)]
    for i, x in enumerate(nodes):
        if x.d != d:
            raise InputError(f"node must have {d} coordinates", f"{path}.nodes[{i}]")
    targets = [decode_matrix(y, f"{path}.targets[{i}]") for i, y in enumerate(targets_raw)]
    variant = obj.get("variant", "ball")
    transposed = obj.get("transposed", False)
    if not isinstance(transposed, bool):
        raise InputError("expected a boolean", f"{path}.transposed")
    try:
        return PickProblem(nodes, targets, variant, transposed, d)
    except InputError as exc:
        raise InputError(str(exc), f"{path}.{exc.path}" if exc.path else path) from None


def decode_ideal_spec(obj, path="ideal"):
    from .recipe import IdealSpec

    d = _int(_require(obj, "d", path), f"{path}.d")
    fs_raw = _require(obj, "functionals", path)
    if not isinstance(fs_raw, list):
        raise InputError("functionals must be a list", f"{path}.functionals")
    fs = [decode_functional(f, f"{path}.functionals[{i}]") for i, f in enumerate(fs_raw)]
    gens = obj.get("generators")
    if gens is not None:
        if not isinstance(gens, list):
            raise InputError("generators must be a list", f"{path}.generators")
        gens = [decode_polynomial(g, d, f"{path}.generators[{i}]") for i, g in enumerate(gens)]
    bnodes_raw = obj.get("boundary_nodes", [])
    if not isinstance(bnodes_raw, list):
        raise InputError("boundary_nodes must be a list", f"{path}.boundary_nodes")
    bnodes = [decode_point(x, f"{path}.boundary_nodes[{i}]") for i, x in enumerate(bnodes_raw)]
    try:
        return IdealSpec(d, fs, gens, bnodes)
    except InputError as exc:
        raise InputError(str(exc), f"{path}.{exc.path}" if exc.path else path) from None


# --------------------------------------------------------------------------
# encoding


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def encode_vector(v) -> list:
    return [encode_complex(z) for z in np.asarray(v).ravel()]


def encode_matrix(M) -> list:
    return [encode_vector(row) for row in np.atleast_2d(np.asarray(M))]


def encode_functional(l: JetFunctional) -> dict:
    return {
        "base": encode_vector(l.base.coords),
        "terms": [{"alpha": list(a), "coeff": encode_complex(c)} for a, c in l.terms.items()],
    }


def encode_polynomial(p: Polynomial) -> list:
    return [{"alpha": list(a), "coeff": encode_complex(c)} for a, c in p.terms.items()]


def encode_pick_problem(p) -> dict:
    return {
        "d": p.d,
        "nodes": [encode_vector(x.coords) for x in p.nodes],
        "targets": [encode_matrix(y) for y in p.targets],
        "variant": p.variant.value,
        "transposed": p.transposed,
    }


def encode_ideal_spec(s) -> dict:
    return {
        "d": s.d,
        "functionals": [encode_functional(l) for l in s.functionals],
        "generators": [encode_polynomial(g) for g in s.generators],
        "boundary_nodes": [encode_vector(w.coords) for w in s.boundary_nodes],
    }


# --------------------------------------------------------------------------
# deterministic JSON


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}" if x != 0 or math.copysign(1, x) > 0 else "-0.0"
    return format(x, ".17g")


def to_jsonable(obj) -> Any:
    """Convert numpy scalars/arrays, complex numbers, enums and sentinels to JSON types."""
    from .geometry import UNBOUNDED

    if obj is UNBOUNDED:
        return "inf"
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return to_jsonable(obj.tolist())
        return obj.tolist()
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(obj)
    return obj


def dumps(obj, indent: int | None = 2) -> str:
    """Deterministic JSON: sorted keys, 17 significant digits."""
    return _dump(to_jsonable(obj), indent, 0)


def _dump(obj, indent, level) -> str:
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    nl = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," + (nl if indent else " ")
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (list, dict)) for v in obj):
            return "[" + ", ".join(_dump(v, indent, level + 1) for v in obj) + "]"
        return "[" + nl + sep.join(_dump(v, indent, level + 1) for v in obj) + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(k)}: {_dump(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{" + nl + sep.join(items) + end + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")
