"""JSON, CSV and OBJ formats used by the command line tools.

JSON documents carry ``"schema_version": "1.0"``. Readers accept documents
without the field and reject any other major version.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .applications.douady_earle import SphericalCurve
from .applications.polygons import ClosedPolygon, OpenPolygon
from .ball import SPHERE_TOL
from .measure import DiscreteMeasure

SCHEMA_VERSION = "1.0"


class FormatError(ValueError):
    """Malformed or unsupported input file."""


def check_schema(doc: dict):
    v = doc.get("schema_version", SCHEMA_VERSION) if isinstance(doc, dict) else None
    if v is None:
        raise FormatError("document must be a JSON object")
    major = str(v).split(".")[0]
    if major != SCHEMA_VERSION.split(".")[0]:
        raise FormatError(f"unsupported schema version {v!r}")


def _load(source) -> dict:
    if isinstance(source, (dict, list)):
        doc = source
    else:
        try:
            doc = json.loads(Path(source).read_text())
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc}") from exc
    check_schema(doc)
    return doc


def _matrix(doc, key, dim=None) -> np.ndarray:
    if key not in doc:
        raise FormatError(f"missing field {key!r}")
    try:
        a = np.array(doc[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"field {key!r} is not numeric") from exc
    if a.ndim != 2 or a.shape[0] == 0 or not np.all(np.isfinite(a)):
        raise FormatError(f"field {key!r} must be a nonempty list of finite vectors")
    if dim is not None and a.shape[1] != dim:
        raise FormatError(f"field {key!r} has vectors of length {a.shape[1]}, expected {dim}")
    return a


def _dimension(doc):
    d = doc.get("dimension")
    if d is None:
        return None
    if not isinstance(d, int) or d < 2:
        raise FormatError("dimension must be an integer >= 2")
    return d


def _floats(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def dump_json(doc: dict, path=None) -> str:
    text = json.dumps({"schema_version": SCHEMA_VERSION, **doc}, indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def read_measure(source) -> DiscreteMeasure:
    doc = _load(source)
    atoms = _matrix(doc, "atoms", _dimension(doc))
    if np.any(np.abs(np.linalg.norm(atoms, axis=1) - 1.0) > SPHERE_TOL):
        raise FormatError("atoms must be unit vectors")
    weights = doc.get("weights")
    if weights is not None:
        w = np.array(weights, dtype=float).reshape(-1)
        if w.shape[0] != atoms.shape[0]:
            raise FormatError("number of weights differs from number of atoms")
        if not np.all(np.isfinite(w)) or np.any(w < 0.0) or not w.sum() > 0.0:
            raise FormatError("weights must be nonnegative with positive sum")
        weights = w
    return DiscreteMeasure(atoms, weights)


def measure_doc(mu: DiscreteMeasure) -> dict:
    return {"dimension": mu.dim, "atoms": _floats(mu.atoms), "weights": _floats(mu.weights)}


def write_measure(mu: DiscreteMeasure, path=None) -> str:
    return dump_json(measure_doc(mu), path)


def read_polygon(source) -> OpenPolygon:
    doc = _load(source)
    dim = _dimension(doc)
    # edges take precedence so that lengths survive a round trip exactly
    if "edges" not in doc and "vertices" in doc:
        return OpenPolygon.from_vertices(_matrix(doc, "vertices", dim))
    if "edges" not in doc or not isinstance(doc["edges"], list) or not doc["edges"]:
        raise FormatError("polygon needs 'vertices' or a nonempty 'edges' list")
    try:
        dirs = [e["direction"] for e in doc["edges"]]
        lengths = np.array([e["length"] for e in doc["edges"]], dtype=float)
    except (KeyError, TypeError) as exc:
        raise FormatError("each edge needs 'direction' and 'length'") from exc
    dirs = _matrix({"direction": dirs}, "direction", dim)
    if np.any(np.abs(np.linalg.norm(dirs, axis=1) - 1.0) > SPHERE_TOL):
        raise FormatError("edge directions must be unit vectors")
    origin = doc.get("origin")
    return OpenPolygon.from_edges(dirs, lengths, origin)


def polygon_doc(p: OpenPolygon) -> dict:
    doc = {
        "dimension": p.dim,
        "origin": _floats(p.origin),
        "edges": [
            {"direction": _floats(e), "length": float(ell)}
            for e, ell in zip(p.edge_vectors, p.edge_lengths)
        ],
        "vertices": _floats(p.vertices),
    }
    if isinstance(p, ClosedPolygon):
        doc["closure_error"] = p.closure_error
        if p.barycenter is not None:
            doc["barycenter"] = _floats(p.barycenter)
    return doc


def write_polygon(p: OpenPolygon, path=None) -> str:
    return dump_json(polygon_doc(p), path)


def read_curve(source) -> SphericalCurve:
    doc = _load(source)
    s = _matrix(doc, "samples", 3)
    if np.any(np.abs(np.linalg.norm(s, axis=1) - 1.0) > SPHERE_TOL):
        raise FormatError("curve samples must be unit vectors")
    return SphericalCurve(s)


def write_curve(curve: SphericalCurve, path=None) -> str:
    return dump_json({"dimension": 3, "samples": _floats(curve.samples)}, path)


def write_obj(vertices, faces, path=None) -> str:
    """ASCII OBJ with ``v`` and ``f`` records; floats written with ``repr`` for exact round trips."""
    lines = [f"v {x!r} {y!r} {z!r}" for x, y, z in np.asarray(vertices, dtype=float).tolist()]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in np.asarray(faces, dtype=int).tolist()]
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def read_obj(source):
    """Parse ``v`` and ``f`` records; returns vertices (k, 3) and zero-based faces."""
    text = Path(source).read_text() if not isinstance(source, str) or "\n" not in source else source
    verts, faces = [], []
    for line in text.splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            verts.append([float(t) for t in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(t.split("/")[0]) - 1 for t in parts[1:4]])
    return np.array(verts, dtype=float).reshape(-1, 3), np.array(faces, dtype=int).reshape(-1, 3)
