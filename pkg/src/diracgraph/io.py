"""JSON problem files and report serialization.

Complex matrix entries are written as ``[re, im]`` pairs.  A problem file
looks like::

    {"mass": 1.0,
     "vertices": ["v"],
     "edges": [{"id": "e1", "kind": "external", "vertex": "v",
                "endpoint": 0.0, "orientation": "outgoing"}],
     "conditions": {"scope": "local",
                    "blocks": {"v": {"A": [[[1, 0]]], "B": [[[-1, 0]]]}}}}

With ``"scope": "global"`` the conditions carry full ``A`` and ``B`` instead
of ``blocks``.
"""

from __future__ import annotations

import json
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import jsonschema
import numpy as np

from .errors import ConditionError, GraphError, ProblemFileError
from .graph import ExternalEdge, InternalEdge, MetricGraph
from .problem import SpectralProblem
from .transmission import VertexConditions, assemble_global, global_conditions

__all__ = ["PROBLEM_SCHEMA", "load_problem", "parse_problem", "problem_to_dict", "dump_json", "report_header"]

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"

_complex = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_matrix = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _complex}}
_pair = {
    "type": "object",
    "required": ["A", "B"],
    "properties": {"A": _matrix, "B": _matrix},
    "additionalProperties": False,
}

PROBLEM_SCHEMA = {
    "type": "object",
    "required": ["vertices", "edges", "conditions"],
    "properties": {
        "mass": {"type": "number", "minimum": 0},
        "vertices": {"type": "array", "minItems": 1, "items": {"type": "string"}},
        "edges": {
            "type": "array",
            "minItems": 1,
            "items": {
                "oneOf": [
                    {
                        "type": "object",
                        "required": ["id", "kind", "from", "to", "a", "b"],
                        "properties": {
                            "id": {"type": "string"},
                            "kind": {"const": "internal"},
                            "from": {"type": "string"},
                            "to": {"type": "string"},
                            "a": {"type": "number"},
                            "b": {"type": "number"},
                        },
                        "additionalProperties": False,
                    },
                    {
                        "type": "object",
                        "required": ["id", "kind", "vertex", "orientation"],
                        "properties": {
                            "id": {"type": "string"},
                            "kind": {"const": "external"},
                            "vertex": {"type": "string"},
                            "endpoint": {"type": "number"},
                            "orientation": {"enum": ["outgoing", "incoming"]},
                        },
                        "additionalProperties": False,
                    },
                ]
            },
        },
        "conditions": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["scope", "blocks"],
                    "properties": {
                        "scope": {"const": "local"},
                        "blocks": {"type": "object", "additionalProperties": _pair},
                    },
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "required": ["scope", "A", "B"],
                    "properties": {"scope": {"const": "global"}, "A": _matrix, "B": _matrix},
                    "additionalProperties": False,
                },
            ]
        },
    },
}


def _path(err) -> str:
    return "/".join(str(p) for p in err.absolute_path) or "<root>"


def _to_matrix(rows, where) -> np.ndarray:
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ProblemFileError("ragged matrix rows", where)
    return np.array([[complex(re, im) for re, im in r] for r in rows], dtype=complex)


def _from_matrix(M) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(M, dtype=complex)]


def parse_problem(doc: dict) -> SpectralProblem:
    """Validate a problem document and build the problem."""
    validator = jsonschema.Draft202012Validator(PROBLEM_SCHEMA)
    best = jsonschema.exceptions.best_match(validator.iter_errors(doc))
    if best is not None:
        raise ProblemFileError(best.message, _path(best))
    edges = []
    for e in doc["edges"]:
        if e["kind"] == "internal":
            edges.append(InternalEdge(e["id"], e["from"], e["to"], float(e["a"]), float(e["b"])))
        else:
            rho = -1 if e["orientation"] == "outgoing" else 1
            edges.append(ExternalEdge(e["id"], e["vertex"], rho, float(e.get("endpoint", 0.0))))
    try:
        g = MetricGraph(doc["vertices"], edges, float(doc.get("mass", 0.0)))
    except GraphError as exc:
        raise ProblemFileError(str(exc), "edges") from exc
    cond = doc["conditions"]
    try:
        if cond["scope"] == "local":
            blocks = [
                VertexConditions(
                    v,
                    _to_matrix(blk["A"], f"conditions/blocks/{v}/A"),
                    _to_matrix(blk["B"], f"conditions/blocks/{v}/B"),
                )
                for v, blk in cond["blocks"].items()
            ]
            c = assemble_global(g, blocks)
        else:
            c = global_conditions(g, _to_matrix(cond["A"], "conditions/A"), _to_matrix(cond["B"], "conditions/B"))
    except ConditionError as exc:
        raise ProblemFileError(str(exc), "conditions") from exc
    return SpectralProblem(g, c)


def load_problem(path) -> SpectralProblem:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", str(path)) from exc
    except OSError as exc:
        raise ProblemFileError(str(exc), str(path)) from exc
    return parse_problem(doc)


def problem_to_dict(p: SpectralProblem) -> dict:
    g, c = p.graph, p.conditions
    edges = []
    for e in g.edges:
        if isinstance(e, InternalEdge):
            edges.append({"id": e.id, "kind": "internal", "from": e.source, "to": e.target, "a": e.a, "b": e.b})
        else:
            edges.append(
                {
                    "id": e.id,
                    "kind": "external",
                    "vertex": e.vertex,
                    "endpoint": e.endpoint,
                    "orientation": "outgoing" if e.rho == -1 else "incoming",
                }
            )
    if c.local:
        blocks = {}
        for v, i, j in c.blocks:
            blocks[v] = {"A": _from_matrix(c.A[i:j, i:j]), "B": _from_matrix(c.B[i:j, i:j])}
        conditions = {"scope": "local", "blocks": blocks}
    else:
        conditions = {"scope": "global", "A": _from_matrix(c.A), "B": _from_matrix(c.B)}
    return {"mass": g.mass, "vertices": list(g.vertices), "edges": edges, "conditions": conditions}


def report_header(kind: str) -> dict:
    return {"version": __version__, "report": kind}


def _default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, default=_default)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
