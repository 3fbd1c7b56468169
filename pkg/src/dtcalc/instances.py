"""Loading instance files: models, named measures and optional stability data.

An instance is a JSON object::

    {
      "name": "q1",
      "kind": "linear_torus" | "quiver" | "table",
      "model": {...},
      "measures": {"<name>": {"type": ...}, ...},
      "default_measure": "<name>",
      "theta": {"linear_form": ["1"], "norm": [["1"]]}
    }

Rationals are written as strings such as ``"-3/4"``.  Motives in tables are
either a rational string or ``{"num": [...], "den": [...]}`` with ascending
coefficients in L.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import jsonschema

from .errors import ParseError, SchemaError
from .exactq import Cone, Subspace, as_rational, conical_hull, from_inequalities
from .measures import (
    StabilityMeasure,
    canonical_measure,
    explicit_measure,
    pullback_measure,
    quiver_measure,
    trivial_measure,
)
from .motives import LaurentL, StrataMotive, TableClass
from .stackmodel import LinearTorusStack, StackModel, TableCone, TableFace, TableStack, composite

RATIONAL = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}
INTEGER_VECTOR = {"type": "array", "items": {"type": "integer"}}
RATIONAL_VECTOR = {"type": "array", "items": RATIONAL}
MOTIVE = {
    "oneOf": [
        RATIONAL,
        {
            "type": "object",
            "properties": {"num": RATIONAL_VECTOR, "den": RATIONAL_VECTOR},
            "required": ["num"],
            "additionalProperties": False,
        },
    ]
}
COMBINATION = {"type": "object", "additionalProperties": RATIONAL}
LINEAR_MAP = {"type": "object", "additionalProperties": COMBINATION}

SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["kind", "model", "measures"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "kind": {"enum": ["linear_torus", "quiver", "table"]},
        "model": {"type": "object"},
        "measures": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["type"],
                "properties": {
                    "type": {"enum": ["trivial", "explicit", "quiver", "canonical", "table"]},
                    "slopes": RATIONAL_VECTOR,
                    "values": {},
                },
                "additionalProperties": False,
            },
        },
        "default_measure": {"type": "string"},
        "theta": {
            "type": "object",
            "required": ["linear_form", "norm"],
            "properties": {
                "linear_form": RATIONAL_VECTOR,
                "norm": {"type": "array", "items": RATIONAL_VECTOR},
            },
            "additionalProperties": False,
        },
    },
}

TORUS_MODEL = {
    "type": "object",
    "required": ["rank", "weights"],
    "properties": {
        "rank": {"type": "integer", "minimum": 0},
        "weights": {"type": "array", "items": INTEGER_VECTOR},
        "nonzero": INTEGER_VECTOR,
    },
    "additionalProperties": False,
}

QUIVER_MODEL = {
    "type": "object",
    "required": ["vertices", "edges"],
    "properties": {
        "vertices": {"type": "integer", "minimum": 0},
        "edges": {"type": "array", "items": {"type": "array", "items": {"type": "integer"},
                                             "minItems": 2, "maxItems": 2}},
        "dimension": INTEGER_VECTOR,
    },
    "additionalProperties": False,
}

TABLE_MODEL = {
    "type": "object",
    "required": ["ambient", "dim", "central", "faces"],
    "properties": {
        "ambient": {"type": "integer", "minimum": 0},
        "dim": {"type": "integer"},
        "central": {"type": "string"},
        "faces": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "basis", "classes"],
                "properties": {
                    "id": {"type": "string"},
                    "basis": {"type": "array", "items": RATIONAL_VECTOR},
                    "classes": {"type": "object", "additionalProperties": MOTIVE},
                    "tot": LINEAR_MAP,
                    "restrict": LINEAR_MAP,
                    "automorphisms": {"type": "integer", "minimum": 1},
                },
                "additionalProperties": False,
            },
        },
        "cones": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "face", "rays", "star"],
                "properties": {
                    "id": {"type": "string"},
                    "face": {"type": "string"},
                    "rays": {"type": "array", "items": RATIONAL_VECTOR},
                    "star": LINEAR_MAP,
                },
                "additionalProperties": False,
            },
        },
        "composites": {"type": "object", "additionalProperties": COMBINATION},
        "joins": {"type": "array", "items": {"type": "array", "items": {"type": "string"},
                                             "minItems": 3, "maxItems": 3}},
        "compositions": {"type": "array", "items": {"type": "array", "items": {"type": "string"},
                                                    "minItems": 3, "maxItems": 3}},
    },
    "additionalProperties": False,
}

EXPLICIT_VALUES = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["face", "value"],
        "properties": {
            "face": {"type": "array", "items": RATIONAL_VECTOR},
            "facets": {"type": "array", "items": RATIONAL_VECTOR},
            "value": RATIONAL,
        },
        "additionalProperties": False,
    },
}

TABLE_VALUES = {"type": "object", "additionalProperties": RATIONAL}

THETA_KINDS = ("linear_torus", "quiver")


def _validate(payload: Any, schema: Mapping[str, Any], prefix: str = "") -> None:
    try:
        jsonschema.validate(payload, schema)
    except jsonschema.ValidationError as exc:
        path = prefix + "".join(f"[{p!r}]" if isinstance(p, str) else f"[{p}]" for p in exc.absolute_path)
        raise SchemaError(exc.message, path or "<root>") from None


def _motive(v: Any) -> LaurentL:
    if isinstance(v, str):
        return LaurentL(as_rational(v))
    return LaurentL.from_coeffs(v["num"], v.get("den", ["1"]))


@dataclass
class Theta:
    linear_form: tuple[Fraction, ...]
    norm: tuple[tuple[Fraction, ...], ...]


@dataclass
class Instance:
    name: str
    kind: str
    model: StackModel
    measures: dict[str, StabilityMeasure]
    default_measure: str
    theta: Theta | None
    payload: dict[str, Any] = field(repr=False)

    def measure(self, name: str | None = None) -> StabilityMeasure:
        key = name or self.default_measure
        if key not in self.measures:
            raise SchemaError(f"no measure named {key!r}; available: {', '.join(sorted(self.measures))}",
                              "measures")
        return self.measures[key]

    def cone_ids(self) -> dict[str, Cone]:
        """Stable identifiers for every special cone.

        Torus cones are ``"<face>:<cone>"`` using the display order of faces and
        of cones inside a face; table cones use their declared ids.
        """
        x = self.model
        out: dict[str, Cone] = {}
        if isinstance(x, TableStack):
            for f in x.special_faces:
                for c in x.special_cones_in_face(f):
                    out[x.cone_id(c)] = c
            return out
        for i, f in enumerate(x.special_faces):
            for j, c in enumerate(x.special_cones_in_face(f)):
                out[f"{i}:{j}"] = c
        return out

    def cone_label(self, cone: Cone) -> str:
        for k, c in self.cone_ids().items():
            if c == cone:
                return k
        raise KeyError(str(cone))

    def to_json(self) -> dict[str, Any]:
        return json.loads(json.dumps(self.payload))


# --- models ----------------------------------------------------------------------


def _torus_model(model: Mapping[str, Any], name: str) -> LinearTorusStack:
    _validate(model, TORUS_MODEL, "model")
    rank = model["rank"]
    for i, w in enumerate(model["weights"]):
        if len(w) != rank:
            raise SchemaError(f"weight has length {len(w)}, expected {rank}", f"model['weights'][{i}]")
    nonzero = model.get("nonzero", [])
    for c in nonzero:
        if not 0 <= c < len(model["weights"]):
            raise SchemaError(f"coordinate {c} does not exist", "model['nonzero']")
    return LinearTorusStack.build(rank, model["weights"], nonzero, name)


def quiver_weights(vertices: int, edges: list[list[int]]) -> list[list[int]]:
    """The weight e_t - e_s of each edge s -> t."""
    out = []
    for s, t in edges:
        w = [0] * vertices
        w[t] += 1
        w[s] -= 1
        out.append(w)
    return out


def _quiver_model(model: Mapping[str, Any], name: str) -> LinearTorusStack:
    _validate(model, QUIVER_MODEL, "model")
    n = model["vertices"]
    for i, (s, t) in enumerate(model["edges"]):
        if not (0 <= s < n and 0 <= t < n):
            raise SchemaError(f"edge ({s}, {t}) refers to a missing vertex", f"model['edges'][{i}]")
    dims = model.get("dimension", [1] * n)
    if len(dims) != n or any(d != 1 for d in dims):
        raise SchemaError("only the all-ones dimension vector is supported", "model['dimension']")
    return LinearTorusStack.build(n, quiver_weights(n, model["edges"]), (), name)


def _table_model(model: Mapping[str, Any], name: str) -> TableStack:
    _validate(model, TABLE_MODEL, "model")
    n = model["ambient"]
    ids = [f["id"] for f in model["faces"]]
    if model["central"] not in ids:
        raise SchemaError(f"central face {model['central']!r} is not declared", "model['central']")
    central = next(f for f in model["faces"] if f["id"] == model["central"])
    xclasses = {k: TableClass(k, _motive(v)) for k, v in central["classes"].items()}
    composites_raw = model.get("composites", {})
    composites: dict[str, StrataMotive] = {}
    for k, parts in composites_raw.items():
        composites[k] = _combination(parts, xclasses, composites, f"model['composites'][{k!r}]")

    faces = []
    for i, f in enumerate(model["faces"]):
        where = f"model['faces'][{i}]"
        for j, v in enumerate(f["basis"]):
            if len(v) != n:
                raise SchemaError(f"basis vector has length {len(v)}, expected {n}", f"{where}['basis'][{j}]")
        space = Subspace.span([[as_rational(c) for c in v] for v in f["basis"]], n)
        if space.dim != len(f["basis"]):
            raise SchemaError("face basis is linearly dependent", f"{where}['basis']")
        classes = {k: TableClass(k, _motive(v)) for k, v in f["classes"].items()}
        if f["id"] == model["central"]:
            tot = {k: StrataMotive.of(c) for k, c in classes.items()}
            restrict = {k: StrataMotive.of(c) for k, c in classes.items()}
        else:
            tot = {k: _combination(v, xclasses, composites, f"{where}['tot'][{k!r}]")
                   for k, v in f.get("tot", {}).items()}
            restrict = {k: _combination(v, classes, {}, f"{where}['restrict'][{k!r}]")
                        for k, v in f.get("restrict", {}).items()}
            missing = set(classes) - set(tot)
            if missing:
                raise SchemaError(f"tot table misses {sorted(missing)}", f"{where}['tot']")
            for k in restrict:
                if k not in xclasses:
                    raise SchemaError(f"{k!r} is not a class of the central face", f"{where}['restrict']")
        faces.append(TableFace(f["id"], space, classes, tot, restrict))
    by_id = {f.ident: f for f in faces}

    cones = []
    for i, c in enumerate(model.get("cones", [])):
        where = f"model['cones'][{i}]"
        if c["face"] not in by_id:
            raise SchemaError(f"unknown face {c['face']!r}", f"{where}['face']")
        face = by_id[c["face"]]
        try:
            cone = conical_hull([[as_rational(v) for v in r] for r in c["rays"]], n)
        except ValueError as exc:
            raise SchemaError(str(exc), f"{where}['rays']") from None
        if cone.carrier != face.subspace:
            raise SchemaError("the rays do not span the declared face", f"{where}['rays']")
        star = {k: _combination(v, xclasses, composites, f"{where}['star'][{k!r}]")
                for k, v in c["star"].items()}
        missing = set(face.classes) - set(star)
        if missing:
            raise SchemaError(f"star table misses {sorted(missing)}", f"{where}['star']")
        cones.append(TableCone(c["id"], c["face"], cone, star))

    joins = {(a, b): r for a, b, r in model.get("joins", [])}
    compositions = {(a, b): r for a, b, r in model.get("compositions", [])}
    aut = {f["id"]: f["automorphisms"] for f in model["faces"] if "automorphisms" in f}
    try:
        return TableStack(name, n, model["dim"], model["central"], faces, cones,
                          composites, joins, compositions, aut)
    except ValueError as exc:
        raise SchemaError(str(exc), "model") from None


def _combination(parts: Mapping[str, str], classes: Mapping[str, TableClass],
                 composites: Mapping[str, StrataMotive], where: str) -> StrataMotive:
    try:
        return composite({k: as_rational(v) for k, v in parts.items()}, classes, composites)
    except Exception as exc:
        raise SchemaError(str(exc), where) from None


# --- measures ------------------------------------------------------------------------


def _measure(x: StackModel, kind: str, model: Mapping[str, Any], entry: Mapping[str, Any],
             where: str, tag: str) -> StabilityMeasure:
    mtype = entry["type"]
    if mtype == "trivial":
        mu = trivial_measure(x)
    elif mtype == "canonical":
        if not isinstance(x, LinearTorusStack):
            raise SchemaError("canonical measures need a torus model", f"{where}['type']")
        mu = canonical_measure(x)
    elif mtype == "quiver":
        if kind != "quiver":
            raise SchemaError("quiver measures need a quiver instance", f"{where}['type']")
        slopes = entry.get("slopes", ["0"] * model["vertices"])
        if len(slopes) != model["vertices"]:
            raise SchemaError("one slope per vertex is required", f"{where}['slopes']")
        edges = [tuple(e) for e in model["edges"]]
        mu = pullback_measure(quiver_measure(model["vertices"], edges, slopes, model.get("dimension")), x)
    elif mtype == "explicit":
        if not isinstance(x, LinearTorusStack):
            raise SchemaError("explicit measures need a torus model", f"{where}['type']")
        _validate(entry.get("values"), EXPLICIT_VALUES, f"{where}['values']")
        values: dict[Cone, Fraction] = {}
        for i, rec in enumerate(entry["values"]):
            at = f"{where}['values'][{i}]"
            span = Subspace.span([[as_rational(c) for c in v] for v in rec["face"]], x.rank)
            if any(len(v) != x.rank for v in rec["face"]) or span.dim != len(rec["face"]):
                raise SchemaError("face basis must be independent vectors of the torus rank", f"{at}['face']")
            facets = rec.get("facets", [])
            if any(len(w) != x.rank for w in facets):
                raise SchemaError("facets must be covectors of the torus rank", f"{at}['facets']")
            cone = from_inequalities(span, [[as_rational(c) for c in w] for w in facets])
            if cone.carrier != span:
                raise SchemaError("the cone does not span its face", at)
            values[cone] = values.get(cone, Fraction(0)) + as_rational(rec["value"])
        try:
            mu = explicit_measure(x, values)
        except Exception as exc:
            raise SchemaError(str(exc), f"{where}['values']") from None
    else:
        if not isinstance(x, TableStack):
            raise SchemaError("table measures need a table model", f"{where}['type']")
        _validate(entry.get("values"), TABLE_VALUES, f"{where}['values']")
        values = {}
        for k, v in entry["values"].items():
            if k not in x.faces and k not in x.cones:
                raise SchemaError(f"unknown cone id {k!r}", f"{where}['values'][{k!r}]")
            values[x.cone_by_id(k)] = as_rational(v)
        mu = explicit_measure(x, values)
    mu.tag = tag
    return mu


# --- entry points ----------------------------------------------------------------------


def parse_instance(payload: Any, name: str = "") -> Instance:
    """Build an instance from decoded JSON."""
    _validate(payload, SCHEMA)
    kind = payload["kind"]
    name = payload.get("name", name)
    model = payload["model"]
    if kind == "linear_torus":
        x: StackModel = _torus_model(model, name)
    elif kind == "quiver":
        x = _quiver_model(model, name)
    else:
        x = _table_model(model, name)
    measures = {
        k: _measure(x, kind, model, entry, f"measures[{k!r}]", k)
        for k, entry in sorted(payload["measures"].items())
    }
    if not measures:
        raise SchemaError("at least one measure is required", "measures")
    default = payload.get("default_measure", next(iter(measures)))
    if default not in measures:
        raise SchemaError(f"unknown measure {default!r}", "default_measure")
    theta = None
    if "theta" in payload:
        if kind not in THETA_KINDS:
            raise SchemaError("stability data needs a torus model", "theta")
        t = payload["theta"]
        n = x.rank  # type: ignore[union-attr]
        if len(t["linear_form"]) != n:
            raise SchemaError(f"linear form must have length {n}", "theta['linear_form']")
        if len(t["norm"]) != n or any(len(r) != n for r in t["norm"]):
            raise SchemaError(f"norm must be a {n}x{n} matrix", "theta['norm']")
        theta = Theta(tuple(as_rational(v) for v in t["linear_form"]),
                      tuple(tuple(as_rational(v) for v in r) for r in t["norm"]))
    return Instance(name, kind, x, measures, default, theta, payload)


def loads(text: str, name: str = "") -> Instance:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{name or '<input>'}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return parse_instance(payload, name)


def corpus_dir() -> Path:
    env = os.environ.get("DTCALC_CORPUS")
    if env:
        return Path(env)
    return Path(str(resources.files("dtcalc") / "corpus"))


def corpus_files(directory: Path | None = None) -> list[Path]:
    d = directory or corpus_dir()
    if not d.is_dir():
        return []
    return sorted(d.glob("*.json"))


def resolve(path_or_name: str) -> Path:
    """A file path, or the stem of a corpus file."""
    p = Path(path_or_name)
    if p.is_file():
        return p
    candidate = corpus_dir() / (path_or_name if path_or_name.endswith(".json") else path_or_name + ".json")
    if candidate.is_file():
        return candidate
    raise FileNotFoundError(f"no instance file or corpus entry named {path_or_name!r}")


def load(path_or_name: str | Path) -> Instance:
    p = resolve(str(path_or_name))
    return loads(p.read_text(), p.stem)


def load_corpus(directory: Path | None = None) -> list[Instance]:
    return [load(p) for p in corpus_files(directory)]


__all__ = [
    "Instance",
    "Theta",
    "SCHEMA",
    "parse_instance",
    "loads",
    "load",
    "load_corpus",
    "corpus_dir",
    "corpus_files",
    "resolve",
    "quiver_weights",
]
