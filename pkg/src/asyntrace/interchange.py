"""JSON interchange format (version 1).

A bundle is ``{"version": 1, "documents": {name: doc, ...}}``.  Document
kinds: monoid, hom, space, space_morphism, system, system_morphism, shape,
diagram, monoid_table.  Cross-references are by document name within the
bundle.  ``null`` encodes the empty trace for event images and star for
states/initials; star-valued action entries are omitted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from . import async_system as asys
from . import state_space as ss
from .diagrams import DiagramShape, MonoidDiagram, validate_shape
from .errors import DanglingReference, ParseError, SchemaError
from .trace_core import STAR, BasicHom, TraceMonoid, make_hom, make_monoid

VERSION = 1

KINDS = (
    "monoid",
    "hom",
    "space",
    "space_morphism",
    "system",
    "system_morphism",
    "shape",
    "diagram",
    "monoid_table",
)


@dataclass
class MonoidTable:
    elements: tuple[str, ...]
    table: tuple[tuple[str, ...], ...]


@dataclass
class Bundle:
    documents: dict  # name -> parsed object
    kinds: dict  # name -> kind string

    def get(self, name: str, kind: Optional[str] = None):
        if name not in self.documents:
            raise DanglingReference(f"no document named {name!r}")
        if kind is not None and self.kinds[name] != kind:
            raise SchemaError(
                f"document {name!r} has kind {self.kinds[name]!r}, expected {kind!r}"
            )
        return self.documents[name]


def _require(doc, field, typ, where):
    if field not in doc:
        raise SchemaError(f"{where}: missing field {field!r}")
    v = doc[field]
    if typ is not None and not isinstance(v, typ):
        raise SchemaError(f"{where}: field {field!r} has wrong type")
    return v


def _parse_monoid(doc, where) -> TraceMonoid:
    events = _require(doc, "events", list, where)
    pairs = doc.get("independence", [])
    return make_monoid(events, [tuple(p) for p in pairs])


def _parse_hom(doc, bundle, where) -> BasicHom:
    src = bundle.get(_require(doc, "source", str, where), "monoid")
    tgt = bundle.get(_require(doc, "target", str, where), "monoid")
    image = _require(doc, "image", dict, where)
    return make_hom(src, tgt, {e: v for e, v in image.items()})


def _parse_space(doc, bundle, where) -> ss.StateSpace:
    monoid = bundle.get(_require(doc, "monoid", str, where), "monoid")
    states = _require(doc, "states", list, where)
    action = {}
    for x, row in _require(doc, "action", dict, where).items():
        for e, y in row.items():
            action[(x, e)] = y
    return ss.make_space(monoid, states, action)


def _parse_space_morphism(doc, bundle, where) -> ss.StateSpaceMorphism:
    src = bundle.get(_require(doc, "source", str, where), "space")
    tgt = bundle.get(_require(doc, "target", str, where), "space")
    events = _require(doc, "events", dict, where)
    states = _require(doc, "states", dict, where)
    monoid_part = make_hom(src.monoid, tgt.monoid, dict(events))
    state_part = {x: (STAR if v is None else v) for x, v in states.items()}
    return ss.make_space_morphism(src, tgt, monoid_part, state_part)


def _parse_system(doc, where) -> asys.WeakAsyncSystem:
    states = _require(doc, "states", list, where)
    initial = doc.get("initial")
    monoid = make_monoid(
        _require(doc, "events", list, where),
        [tuple(p) for p in doc.get("independence", [])],
    )
    transitions = {}
    for triple in doc.get("transitions", []):
        s, e, t = triple
        if (s, e) in transitions:
            raise SchemaError(f"{where}: duplicate transition on ({s!r}, {e!r})")
        transitions[(s, e)] = t
    return asys.make_system(states, STAR if initial is None else initial, monoid, transitions)


def _parse_system_morphism(doc, bundle, where) -> asys.SystemMorphism:
    src = bundle.get(_require(doc, "source", str, where), "system")
    tgt = bundle.get(_require(doc, "target", str, where), "system")
    events = _require(doc, "events", dict, where)
    states = _require(doc, "states", dict, where)
    state_part = {x: (STAR if v is None else v) for x, v in states.items()}
    return asys.make_morphism(src, tgt, dict(events), state_part)


def _parse_shape(doc, where) -> DiagramShape:
    objects = _require(doc, "objects", list, where)
    arrows = tuple(tuple(a) for a in doc.get("arrows", []))
    shape = DiagramShape(tuple(objects), arrows)
    problems = validate_shape(shape)
    if problems:
        raise SchemaError(f"{where}: " + "; ".join(problems))
    return shape


def _parse_diagram(doc, bundle, where):
    shape = bundle.get(_require(doc, "shape", str, where), "shape")
    over = _require(doc, "over", str, where)
    objects = _require(doc, "objects", dict, where)
    arrows = doc.get("arrows", {})
    if over == "monoid":
        d = MonoidDiagram(
            shape,
            {o: bundle.get(n, "monoid") for o, n in objects.items()},
            {a: bundle.get(n, "hom") for a, n in arrows.items()},
        )
    elif over == "space":
        d = ss.SpaceDiagram(
            shape,
            {o: bundle.get(n, "space") for o, n in objects.items()},
            {a: bundle.get(n, "space_morphism") for a, n in arrows.items()},
        )
    elif over == "system":
        d = asys.SystemDiagram(
            shape,
            {o: bundle.get(n, "system") for o, n in objects.items()},
            {a: bundle.get(n, "system_morphism") for a, n in arrows.items()},
        )
    else:
        raise SchemaError(f"{where}: unknown diagram base {over!r}")
    problems = d.problems()
    if problems:
        raise SchemaError(f"{where}: " + "; ".join(problems))
    return d


def _parse_table(doc, where) -> MonoidTable:
    elements = _require(doc, "elements", list, where)
    table = _require(doc, "table", list, where)
    return MonoidTable(tuple(elements), tuple(tuple(row) for row in table))


# parse order ensures references resolve regardless of document order
_PASSES = (
    ("monoid", "shape", "monoid_table"),
    ("hom", "space", "system"),
    ("space_morphism", "system_morphism"),
    ("diagram",),
)


def parse(text: str) -> Bundle:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise SchemaError("top level must be an object")
    if raw.get("version") != VERSION:
        raise SchemaError(f"unsupported version {raw.get('version')!r}")
    docs = raw.get("documents")
    if not isinstance(docs, dict):
        raise SchemaError("missing 'documents' object")
    bundle = Bundle({}, {})
    for name, doc in docs.items():
        if not isinstance(doc, dict) or "kind" not in doc:
            raise SchemaError(f"document {name!r}: missing 'kind'")
        if doc["kind"] not in KINDS:
            raise SchemaError(f"document {name!r}: unknown kind {doc['kind']!r}")
    for pass_kinds in _PASSES:
        for name, doc in docs.items():
            kind = doc["kind"]
            if kind not in pass_kinds:
                continue
            where = f"document {name!r}"
            if kind == "monoid":
                obj = _parse_monoid(doc, where)
            elif kind == "shape":
                obj = _parse_shape(doc, where)
            elif kind == "monoid_table":
                obj = _parse_table(doc, where)
            elif kind == "hom":
                obj = _parse_hom(doc, bundle, where)
            elif kind == "space":
                obj = _parse_space(doc, bundle, where)
            elif kind == "system":
                obj = _parse_system(doc, where)
            elif kind == "space_morphism":
                obj = _parse_space_morphism(doc, bundle, where)
            elif kind == "system_morphism":
                obj = _parse_system_morphism(doc, bundle, where)
            else:
                obj = _parse_diagram(doc, bundle, where)
            bundle.documents[name] = obj
            bundle.kinds[name] = kind
    return bundle


def parse_file(path) -> Bundle:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


# ---------------------------------------------------------------------------
# Serialization


def monoid_doc(m: TraceMonoid) -> dict:
    return {
        "kind": "monoid",
        "events": list(m.events),
        "independence": [list(p) for p in m.pairs()],
    }


def hom_doc(h: BasicHom, source: str, target: str) -> dict:
    return {
        "kind": "hom",
        "source": source,
        "target": target,
        "image": {e: h(e) for e in h.source.events},
    }


def space_doc(s: ss.StateSpace, monoid: str) -> dict:
    action: dict = {}
    for (x, e), y in sorted(s.action.items()):
        action.setdefault(x, {})[e] = y
    return {"kind": "space", "monoid": monoid, "states": list(s.states), "action": action}


def space_morphism_doc(m: ss.StateSpaceMorphism, source: str, target: str) -> dict:
    return {
        "kind": "space_morphism",
        "source": source,
        "target": target,
        "events": {e: m.monoid_part(e) for e in m.source.monoid.events},
        "states": {x: (None if m.state(x) == STAR else m.state(x)) for x in m.source.states},
    }


def system_doc(a: asys.WeakAsyncSystem) -> dict:
    return {
        "kind": "system",
        "states": list(a.states),
        "initial": None if a.initial == STAR else a.initial,
        "events": list(a.monoid.events),
        "independence": [list(p) for p in a.monoid.pairs()],
        "transitions": [[s, e, t] for (s, e), t in sorted(a.transitions.items())],
    }


def system_morphism_doc(m: asys.SystemMorphism, source: str, target: str) -> dict:
    return {
        "kind": "system_morphism",
        "source": source,
        "target": target,
        "events": dict(sorted(m.event_part.items())),
        "states": {
            x: (None if m.state(x) == STAR else m.state(x)) for x in m.source.states
        },
    }


def shape_doc(s: DiagramShape) -> dict:
    return {
        "kind": "shape",
        "objects": list(s.objects),
        "arrows": [list(a) for a in s.arrows],
    }


def table_doc(t: MonoidTable) -> dict:
    return {
        "kind": "monoid_table",
        "elements": list(t.elements),
        "table": [list(row) for row in t.table],
    }


def dumps(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
