"""JSON documents for complexes, vector fields, simplicial maps and actions.

Every ``*_to_json`` output is canonical: keys and simplices appear in a fixed
order, so dumping a freshly loaded document reproduces it byte for byte.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from .chainmaps import SimplicialMap
from .complex import SimplicialComplex, simplex
from .errors import DomainError
from .morse import DiscreteVectorField
from .spheres import GroupAction

PathLike = Union[str, Path]


class ParseError(DomainError):
    """A document could not be read; carries a location when one is known."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None,
                 column: Optional[int] = None):
        loc = ""
        if path:
            loc += str(path)
        if line is not None:
            loc += f":{line}:{column}"
        super().__init__(f"{loc}: {message}" if loc else message)
        self.path, self.line, self.column = path, line, column


def dumps(doc: Any) -> str:
    return json.dumps(doc, separators=(",", ":")) + "\n"


def read_json(path: PathLike) -> Tuple[Any, str]:
    """Parsed document and the sha256 of the raw bytes."""
    raw = Path(path).read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    try:
        return json.loads(raw.decode("utf-8")), digest
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, str(path), exc.lineno, exc.colno) from None
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8: {exc}", str(path)) from None


def write_json(path: PathLike, doc: Any) -> str:
    text = dumps(doc)
    Path(path).write_text(text)
    return hashlib.sha256(text.encode()).hexdigest()


def complex_to_json(k: SimplicialComplex) -> Dict[str, Any]:
    doc: Dict[str, Any] = {}
    labels = k.labels
    if labels:
        doc["vertices"] = [k.label(v) if (v,) in k else None for v in range(k.id_bound)]
    doc["maximal_simplices"] = [list(s) for s in sorted(k.maximal_simplices(), key=lambda s: (len(s), s))]
    return doc


def _int_list(x: Any, what: str):
    if not isinstance(x, list) or not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in x):
        raise ParseError(f"{what} must be a list of non-negative integers, got {x!r}")
    return x


def complex_from_json(doc: Any) -> SimplicialComplex:
    if not isinstance(doc, dict) or "maximal_simplices" not in doc:
        raise ParseError("complex document needs a 'maximal_simplices' list")
    ms = doc["maximal_simplices"]
    if not isinstance(ms, list):
        raise ParseError("'maximal_simplices' must be a list")
    maximal = [simplex(_int_list(m, "simplex")) for m in ms]
    verts = {v for m in maximal for v in m}
    labels = {}
    if "vertices" in doc:
        vs = doc["vertices"]
        if not isinstance(vs, list):
            raise ParseError("'vertices' must be a list of labels indexed by vertex id")
        for i, lab in enumerate(vs):
            if lab is None:
                continue
            if i not in verts:
                raise ParseError(f"label given for vertex {i}, which is in no simplex")
            if lab != i:
                labels[i] = lab
    return SimplicialComplex.from_maximal(maximal, labels)


def dvf_to_json(v: DiscreteVectorField) -> Dict[str, Any]:
    return {"pairs": [[list(a), list(b)] for a, b in v.pairs]}


def dvf_from_json(doc: Any, k: SimplicialComplex) -> DiscreteVectorField:
    if not isinstance(doc, dict) or not isinstance(doc.get("pairs"), list):
        raise ParseError("vector field document needs a 'pairs' list")
    pairs = []
    for p in doc["pairs"]:
        if not isinstance(p, list) or len(p) != 2:
            raise ParseError(f"pair must be [alpha, beta], got {p!r}")
        pairs.append((_int_list(p[0], "alpha"), _int_list(p[1], "beta")))
    return DiscreteVectorField(k, pairs)


def _int_dict(x: Any, what: str) -> Dict[int, int]:
    if not isinstance(x, dict):
        raise ParseError(f"'{what}' must be an object")
    out = {}
    for a, b in x.items():
        try:
            ka = int(a)
        except ValueError:
            raise ParseError(f"'{what}' key {a!r} is not an integer") from None
        if not isinstance(b, int) or isinstance(b, bool):
            raise ParseError(f"'{what}' value for {a!r} is not an integer")
        out[ka] = b
    return out


def map_to_json(f: SimplicialMap) -> Dict[str, Any]:
    return {"vertex_map": {str(v): f.vertex_map[v] for v in sorted(f.vertex_map)}}


def map_from_json(doc: Any, source: SimplicialComplex, target: SimplicialComplex) -> SimplicialMap:
    if not isinstance(doc, dict) or "vertex_map" not in doc:
        raise ParseError("map document needs a 'vertex_map' object")
    return SimplicialMap(source, target, _int_dict(doc["vertex_map"], "vertex_map"))


def action_to_json(a: GroupAction) -> Dict[str, Any]:
    return a.to_json()


def action_from_json(doc: Any, k: SimplicialComplex) -> GroupAction:
    if not isinstance(doc, dict) or "p" not in doc or "generator" not in doc:
        raise ParseError("action document needs 'p' and 'generator'")
    if not isinstance(doc["p"], int):
        raise ParseError("'p' must be an integer")
    return GroupAction(k, doc["p"], _int_dict(doc["generator"], "generator"))
