"""Text and JSON documents for modules, morphisms, bicomplexes and reports.

Module text format::

    ring: QQ[x,y,z]
    rows: 3
    cols: 4
    matrix: [ 0, 0, x, -y,
              x*y, y*z, z, 0,
              x^2, x*z, 0, z ]

JSON documents carry the same fields with entries as strings.
"""
from __future__ import annotations

import json
import math

from .genmor import FiltrationSystem, GeneralizedMorphism
from .matrix import Mat, parse_matrix
from .modules import FPModule, ModuleMorphism
from .rings import ParseError, parse_ring
from .spectral import Bicomplex

__all__ = [
    "module_to_text", "module_from_text", "module_to_json", "module_from_json", "load_module",
    "matrix_to_json", "matrix_from_json", "bicomplex_to_json", "bicomplex_from_json",
    "filtration_to_json", "filtration_from_json", "morphism_to_json", "load_bicomplex",
    "load_filtration", "dumps",
]


# --------------------------------------------------------------------------
# matrices and modules

def matrix_to_json(A: Mat) -> dict:
    fmt = A.ring.format
    return {"rows": A.nrows, "cols": A.ncols, "entries": [fmt(a) for a in A.entries()]}


def matrix_from_json(d: dict, ring) -> Mat:
    try:
        r, c = int(d["rows"]), int(d["cols"])
        entries = d.get("entries")
        if entries is None:
            return parse_matrix(d["matrix"], r, c, ring)
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"malformed matrix document: {e}") from None
    if len(entries) != r * c:
        raise ParseError(f"expected {r * c} entries, found {len(entries)}")
    text = "[ " + ", ".join(str(e) for e in entries) + " ]" if entries else "[ ]"
    return parse_matrix(text, r, c, ring)


def module_to_text(M: FPModule) -> str:
    R = M.relations
    lines = [f"ring: {M.ring}", f"rows: {R.nrows}", f"cols: {R.ncols}"]
    if R.nrows * R.ncols == 0:
        lines.append("matrix: [ ]")
    else:
        fmt = M.ring.format
        body = [", ".join(fmt(a) for a in row) for row in R.rows]
        lines.append("matrix: [ " + ",\n          ".join(body) + " ]")
    return "\n".join(lines) + "\n"


def module_from_text(text: str) -> FPModule:
    fields = {}
    positions = {}
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        raw = lines[i]
        s = raw.strip()
        if not s or s.startswith("#"):
            i += 1
            continue
        if ":" not in s:
            raise ParseError("expected 'key: value'", i + 1, 1)
        key, _, value = s.partition(":")
        key = key.strip()
        col = raw.index(":") + 2
        if key == "matrix":
            chunk = [value]
            start = i
            while "]" not in "\n".join(chunk) and i + 1 < len(lines):
                i += 1
                chunk.append(lines[i])
            fields[key] = "\n".join(chunk)
            positions[key] = (start + 1, col)
        else:
            fields[key] = value.strip()
            positions[key] = (i + 1, col)
        i += 1
    for k in ("ring", "rows", "cols", "matrix"):
        if k not in fields:
            raise ParseError(f"missing field {k!r}")
    ring = parse_ring(fields["ring"])
    try:
        r, c = int(fields["rows"]), int(fields["cols"])
    except ValueError:
        raise ParseError("rows and cols must be integers") from None
    line, col = positions["matrix"]
    A = parse_matrix(fields["matrix"], r, c, ring, line=line, column=col)
    return FPModule(A, name=fields.get("name"))


def module_to_json(M: FPModule) -> dict:
    return {"ring": str(M.ring), "relations": matrix_to_json(M.relations)}


def module_from_json(d: dict, ring=None) -> FPModule:
    if ring is None:
        ring = parse_ring(d["ring"])
    return FPModule(matrix_from_json(d["relations"], ring))


def load_module(path: str) -> FPModule:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        try:
            return module_from_json(json.loads(text))
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, e.lineno, e.colno) from None
    return module_from_text(text)


def morphism_to_json(phi) -> dict:
    out = {"source": module_to_json(phi.source), "target": module_to_json(phi.target),
           "matrix": matrix_to_json(phi.matrix)}
    if isinstance(phi, GeneralizedMorphism):
        out["aid"] = matrix_to_json(phi.aid_generators)
    return out


def _morphism_from_json(d, ring):
    S = module_from_json(d["source"], ring)
    T = module_from_json(d["target"], ring)
    A = matrix_from_json(d["matrix"], ring)
    if "aid" in d:
        return GeneralizedMorphism(S, T, A, matrix_from_json(d["aid"], ring))
    return ModuleMorphism(S, T, A)


# --------------------------------------------------------------------------
# bicomplexes and filtrations

def bicomplex_to_json(B: Bicomplex) -> dict:
    """Objects and maps in the bicomplex's own (display) bidegrees."""
    sgn = -1 if B.cohomological else 1

    def key(p, q):
        return {"p": sgn * p, "q": sgn * q}

    return {
        "ring": str(B.ring),
        "cohomological": B.cohomological,
        "objects": [dict(key(p, q), relations=matrix_to_json(M.relations))
                    for (p, q), M in sorted(B.objects.items())],
        "vertical": [dict(key(p, q), matrix=matrix_to_json(m))
                     for (p, q), m in sorted(B.vertical.items()) if (p, q) in B.objects],
        "horizontal": [dict(key(p, q), matrix=matrix_to_json(m))
                       for (p, q), m in sorted(B.horizontal.items()) if (p, q) in B.objects],
    }


def bicomplex_from_json(d: dict) -> Bicomplex:
    try:
        ring = parse_ring(d["ring"])
        objects = {(o["p"], o["q"]): FPModule(matrix_from_json(o["relations"], ring))
                   for o in d["objects"]}
        vertical = {(m["p"], m["q"]): matrix_from_json(m["matrix"], ring) for m in d.get("vertical", [])}
        horizontal = {(m["p"], m["q"]): matrix_from_json(m["matrix"], ring)
                      for m in d.get("horizontal", [])}
    except (KeyError, TypeError) as e:
        raise ParseError(f"malformed bicomplex document: missing {e}") from None
    return Bicomplex(objects, vertical, horizontal, cohomological=bool(d.get("cohomological")),
                     ring=ring)


def filtration_to_json(fs: FiltrationSystem) -> dict:
    return {
        "ring": str(fs.target.ring),
        "direction": fs.direction,
        "degrees": list(fs.degrees),
        "target": module_to_json(fs.target),
        "embeddings": [
            {"degree": p, "source": module_to_json(fs[p].source),
             "matrix": matrix_to_json(fs[p].matrix), "aid": matrix_to_json(fs[p].aid_generators)}
            for p in fs.degrees
        ],
    }


def filtration_from_json(d: dict) -> FiltrationSystem:
    try:
        ring = parse_ring(d["ring"])
        T = module_from_json(d["target"], ring)
        emb = {}
        for e in d["embeddings"]:
            S = module_from_json(e["source"], ring)
            emb[e["degree"]] = GeneralizedMorphism(S, T, matrix_from_json(e["matrix"], ring),
                                                   matrix_from_json(e["aid"], ring))
        return FiltrationSystem(list(d["degrees"]), emb, T, d.get("direction", "ascending"))
    except (KeyError, TypeError) as e:
        raise ParseError(f"malformed filtration document: missing {e}") from None


def _load_json(path):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, e.lineno, e.colno) from None


def load_bicomplex(path: str) -> Bicomplex:
    return bicomplex_from_json(_load_json(path))


def load_filtration(path: str) -> FiltrationSystem:
    return filtration_from_json(_load_json(path))


def _default(o):
    if isinstance(o, float) and math.isinf(o):
        return "infinity"
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def _clean(o):
    if isinstance(o, float) and math.isinf(o):
        return "infinity"
    if isinstance(o, dict):
        return {str(k): _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    return o


def dumps(obj) -> str:
    """Stable JSON text (sorted keys, infinities as the string ``"infinity"``)."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2, default=_default)
