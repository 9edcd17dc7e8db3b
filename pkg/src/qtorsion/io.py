"""JSON reading and writing for polytopes, characteristic maps and complexes."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Union

from .charmap import CharMap
from .errors import CharMapError, SchemaError
from .polytope import CombinatorialPolytope

__all__ = [
    "polytope_from_json",
    "polytope_to_json",
    "load_polytope",
    "dump_json",
    "complex_from_json",
    "complex_to_json",
    "load_complex",
]

PathLike = Union[str, Path]


def _read(path: PathLike) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc.msg}, line {exc.lineno})") from exc
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: top level must be an object")
    return data


def _int_list(x, what):
    if not isinstance(x, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in x):
        raise SchemaError(f"{what} must be a list of integers")
    return x


def polytope_from_json(data: dict) -> tuple:
    """``(polytope, char or None)`` from the canonical file layout.

    Only the shape of the data is checked here; combinatorial validity is
    left to ``validate`` so callers can report it separately.
    """
    for key in ("dim", "facets", "vertices"):
        if key not in data:
            raise SchemaError(f"missing key {key!r}")
    dim = data["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise SchemaError("'dim' must be an integer")
    facets = data["facets"]
    if not isinstance(facets, list) or not all(isinstance(f, str) for f in facets):
        raise SchemaError("'facets' must be a list of names")
    verts = data["vertices"]
    if not isinstance(verts, list):
        raise SchemaError("'vertices' must be a list")
    rows = [_int_list(v, f"vertex {i}") for i, v in enumerate(verts)]
    seen = {}
    for i, v in enumerate(rows):
        key = frozenset(v)
        if len(key) != len(v):
            raise SchemaError(f"vertex {i} repeats a facet")
        if key in seen:
            raise SchemaError(f"vertices {seen[key]} and {i} are duplicates")
        seen[key] = i
    P = CombinatorialPolytope(dim, facets, rows)
    lam = None
    if data.get("char") is not None:
        ch = data["char"]
        if not isinstance(ch, dict):
            raise SchemaError("'char' must map facet names to vectors")
        vecs = {k: _int_list(v, f"char[{k!r}]") for k, v in ch.items()}
        try:
            lam = CharMap.from_names(P, vecs)
        except CharMapError as exc:
            raise SchemaError(f"'char': {exc}") from exc
    return P, lam


def polytope_to_json(P: CombinatorialPolytope, lam: Optional[CharMap] = None) -> dict:
    out = {
        "dim": P.dim,
        "facets": list(P.facet_names),
        "vertices": [sorted(v) for v in P.vertices],
    }
    if lam is not None:
        out["char"] = lam.as_dict(P)
    return out


def load_polytope(path: PathLike) -> tuple:
    return polytope_from_json(_read(path))


def dump_json(obj, path: Optional[PathLike] = None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=False) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def complex_from_json(data: dict):
    from .simplicial import SimplicialComplex

    for key in ("vertices", "maximal"):
        if key not in data:
            raise SchemaError(f"missing key {key!r}")
    names = data["vertices"]
    if not isinstance(names, list) or not all(isinstance(v, str) for v in names):
        raise SchemaError("'vertices' must be a list of names")
    known = set(names)
    simplices = []
    for i, s in enumerate(data["maximal"]):
        if not isinstance(s, list) or not all(isinstance(v, str) for v in s):
            raise SchemaError(f"maximal simplex {i} must be a list of vertex names")
        bad = [v for v in s if v not in known]
        if bad:
            raise SchemaError(f"maximal simplex {i} uses unknown vertex {bad[0]!r}")
        simplices.append(s)
    return SimplicialComplex(names, simplices)


def complex_to_json(K) -> dict:
    return {"vertices": list(K.vertices), "maximal": [sorted(s, key=K.index) for s in K.sorted_maximal()]}


def load_complex(path: PathLike):
    return complex_from_json(_read(path))
