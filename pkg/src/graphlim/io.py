"""Reading and writing graphs, graphons and catalogues.

Formats:

* weighted graph JSON: ``{"alpha": [...], "beta": [[...], ...]}``;
* simple graph TSV: a header line ``n=<count>`` followed by one
  ``u<TAB>v`` edge per line (0-based);
* graphon JSON: ``{"type": "step", "measures": [...], "values": [[...]]}``
  or ``{"type": "builtin", "name": "constant|min|halfgraph", "p": ...}``.

Validation errors are :class:`InputError` naming the file and the
offending line or field.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import WeightedGraph, from_edges
from .errors import InputError
from .graphon import BUILTINS, AnalyticGraphon, StepGraphon
from .homdensity import SmallGraphCatalog


def _read_json(path) -> object:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: invalid JSON ({exc.msg})") from None


def _matrix(value, path, field_name: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"{path}: field {field_name!r} must be numeric") from None
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InputError(f"{path}: field {field_name!r} must be a square matrix")
    return arr


def _vector(value, path, field_name: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"{path}: field {field_name!r} must be numeric") from None
    if arr.ndim != 1:
        raise InputError(f"{path}: field {field_name!r} must be a list of numbers")
    return arr


def graph_from_dict(data, path="<input>") -> WeightedGraph:
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object with 'alpha' and 'beta'")
    for key in ("alpha", "beta"):
        if key not in data:
            raise InputError(f"{path}: missing field {key!r}")
    alpha = _vector(data["alpha"], path, "alpha")
    beta = _matrix(data["beta"], path, "beta")
    try:
        return WeightedGraph(alpha, beta)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def graph_to_dict(G: WeightedGraph) -> dict:
    return {"alpha": G.alpha.tolist(), "beta": G.beta.tolist()}


def parse_edge_list(text: str, path="<input>") -> WeightedGraph:
    lines = text.splitlines()
    if not lines or not lines[0].strip().startswith("n="):
        raise InputError(f"{path}: line 1: expected header 'n=<count>'")
    try:
        n = int(lines[0].strip()[2:])
    except ValueError:
        raise InputError(f"{path}: line 1: node count is not an integer") from None
    if n < 1:
        raise InputError(f"{path}: line 1: node count must be positive")
    edges = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.strip().split("\t")
        if len(parts) != 2:
            raise InputError(f"{path}: line {lineno}: expected 'u<TAB>v'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise InputError(f"{path}: line {lineno}: node ids must be integers") from None
        if not (0 <= u < n and 0 <= v < n):
            raise InputError(f"{path}: line {lineno}: node id out of range 0..{n - 1}")
        if u == v:
            raise InputError(f"{path}: line {lineno}: loops are not allowed in a simple graph")
        edges.append((u, v))
    return from_edges(n, edges)


def format_edge_list(G: WeightedGraph) -> str:
    if not G.is_simple:
        raise InputError("only simple graphs can be written as edge lists")
    return "".join([f"n={G.n}\n"] + [f"{u}\t{v}\n" for u, v in G.edges()])


def load_graph(path) -> WeightedGraph:
    """Load a weighted graph (``.json``) or a simple graph edge list (anything else)."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        return graph_from_dict(_read_json(path), path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from None
    return parse_edge_list(text, path)


def save_graph(G: WeightedGraph, path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".json":
        path.write_text(json.dumps(graph_to_dict(G)) + "\n")
    else:
        path.write_text(format_edge_list(G))


def graphon_from_dict(data, path="<input>"):
    if not isinstance(data, dict) or "type" not in data:
        raise InputError(f"{path}: missing field 'type'")
    kind = data["type"]
    if kind == "step":
        for key in ("measures", "values"):
            if key not in data:
                raise InputError(f"{path}: missing field {key!r}")
        m = _vector(data["measures"], path, "measures")
        v = _matrix(data["values"], path, "values")
        try:
            return StepGraphon(m, v)
        except InputError as exc:
            raise InputError(f"{path}: {exc}") from None
    if kind == "builtin":
        name = data.get("name")
        if name not in BUILTINS:
            raise InputError(f"{path}: field 'name' must be one of {', '.join(BUILTINS)}")
        p = data.get("p")
        if p is not None and not isinstance(p, (int, float)):
            raise InputError(f"{path}: field 'p' must be a number")
        try:
            return AnalyticGraphon(name, None if p is None else float(p))
        except InputError as exc:
            raise InputError(f"{path}: {exc}") from None
    raise InputError(f"{path}: field 'type' must be 'step' or 'builtin'")


def graphon_to_dict(W) -> dict:
    if isinstance(W, StepGraphon):
        return {"type": "step", "measures": W.measures.tolist(), "values": W.values.tolist()}
    d = {"type": "builtin", "name": W.name}
    if W.p is not None:
        d["p"] = W.p
    return d


def load_graphon(path):
    return graphon_from_dict(_read_json(path), path)


def save_graphon(W, path) -> None:
    Path(path).write_text(json.dumps(graphon_to_dict(W)) + "\n")


def save_catalog(cat: SmallGraphCatalog, path) -> None:
    Path(path).write_text(cat.to_json() + "\n")


def load_catalog(path) -> list[dict]:
    """Read a catalogue export back as a list of ``{key, n, edges}`` records."""
    data = _read_json(path)
    if not isinstance(data, list):
        raise InputError(f"{path}: expected a JSON list")
    for i, rec in enumerate(data):
        for key in ("key", "n", "edges"):
            if not isinstance(rec, dict) or key not in rec:
                raise InputError(f"{path}: entry {i}: missing field {key!r}")
    return data
