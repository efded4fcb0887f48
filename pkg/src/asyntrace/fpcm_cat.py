"""Finite limits and colimits of trace monoids, in two flavours.

``Category.FPCM`` works with all basic homomorphisms; ``Category.FPCM_PAR``
restricts to independence-preserving ones.  Products are computed through the
pointed-relation views (commutativity relation for FPCM, partial independence
relation for FPCM_PAR), equalizers by generator agreement, coproducts by
tagged disjoint union, and coequalizers by congruence closure on target
generators.  General limits and colimits are driven through these four.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .errors import (
    MalformedDiagram,
    MalformedRelation,
    NotAMonoid,
    NotIndependencePreserving,
    NotParallel,
    SizeLimit,
)
from .trace_core import (
    STAR,
    BasicHom,
    TraceMonoid,
    compose,
    identity_hom,
    is_independence_preserving,
    make_hom,
    make_monoid,
)


class Category(Enum):
    FPCM = "fpcm"
    FPCM_PAR = "fpcm-par"


TRIVIAL = make_monoid(())


# ---------------------------------------------------------------------------
# Relation views


@dataclass(frozen=True)
class ComRelView:
    """Pointed event set with its full commutativity relation T."""

    events: tuple[str, ...]
    commutativity: frozenset[tuple[str, str]]


@dataclass(frozen=True)
class IndRelView:
    """Pointed event set with its partial independence relation R."""

    events: tuple[str, ...]
    partial_independence: frozenset[tuple[str, str]]


def to_com_rel(m: TraceMonoid) -> ComRelView:
    t = {(STAR, STAR)}
    for e in m.events:
        t.update([(e, STAR), (STAR, e), (e, e)])
    for a, b in m.independence:
        t.update([(a, b), (b, a)])
    return ComRelView(m.events, frozenset(t))


def from_com_rel(v: ComRelView) -> TraceMonoid:
    t = v.commutativity
    pointed = set(v.events) | {STAR}
    for a, b in t:
        if a not in pointed or b not in pointed:
            raise MalformedRelation(f"pair ({a!r}, {b!r}) outside the pointed event set")
        if (b, a) not in t:
            raise MalformedRelation(f"relation not symmetric at ({a!r}, {b!r})")
    for a in pointed:
        if (a, STAR) not in t or (STAR, a) not in t:
            raise MalformedRelation(f"missing star pair for {a!r}")
        if (a, a) not in t:
            raise MalformedRelation(f"missing diagonal pair for {a!r}")
    pairs = [(a, b) for a, b in t if a != b and a != STAR and b != STAR]
    return make_monoid(v.events, pairs)


def to_ind_rel(m: TraceMonoid) -> IndRelView:
    r = {(STAR, STAR)}
    for e in m.events:
        r.update([(e, STAR), (STAR, e)])
    for a, b in m.independence:
        r.update([(a, b), (b, a)])
    return IndRelView(m.events, frozenset(r))


def from_ind_rel(v: IndRelView) -> TraceMonoid:
    r = v.partial_independence
    pointed = set(v.events) | {STAR}
    for a, b in r:
        if a not in pointed or b not in pointed:
            raise MalformedRelation(f"pair ({a!r}, {b!r}) outside the pointed event set")
        if (b, a) not in r:
            raise MalformedRelation(f"relation not symmetric at ({a!r}, {b!r})")
        if a == b and a != STAR:
            raise MalformedRelation(f"reflexive pair on non-star element {a!r}")
    for a in pointed:
        if (a, STAR) not in r or (STAR, a) not in r:
            raise MalformedRelation(f"missing star pair for {a!r}")
    pairs = [(a, b) for a, b in r if a != STAR and b != STAR]
    return make_monoid(v.events, pairs)


def _in_com(m: TraceMonoid, x: str, y: str) -> bool:
    # membership in T for pointed elements of m
    return x == y or x == STAR or y == STAR or m.independent(x, y)


def _in_ind(m: TraceMonoid, x: str, y: str) -> bool:
    # membership in R for pointed elements of m
    return x == STAR or y == STAR or m.independent(x, y)


# ---------------------------------------------------------------------------
# Products


def render_tuple(parts: Sequence[str]) -> str:
    return "(" + ",".join(parts) + ")"


@dataclass
class ProductResult:
    monoid: TraceMonoid
    projections: tuple[BasicHom, ...]
    components: dict[str, tuple[str, ...]]  # generator name -> pointed tuple


def product(ms: Sequence[TraceMonoid], flag: Category = Category.FPCM) -> ProductResult:
    """Product of a finite family; the empty product is the trivial monoid."""
    ms = list(ms)
    if not ms:
        return ProductResult(TRIVIAL, (), {})
    axes = [tuple(m.events) + (STAR,) for m in ms]
    gens = []
    components = {}
    for combo in itertools.product(*axes):
        if all(x == STAR for x in combo):
            continue
        name = render_tuple(combo)
        gens.append(name)
        components[name] = combo
    rel = _in_ind if flag is Category.FPCM_PAR else _in_com
    pairs = []
    for i, u in enumerate(gens):
        cu = components[u]
        for v in gens[i + 1 :]:
            cv = components[v]
            if all(rel(m, x, y) for m, x, y in zip(ms, cu, cv)):
                pairs.append((u, v))
    monoid = make_monoid(gens, pairs)
    projections = []
    for j, m in enumerate(ms):
        image = {g: (None if components[g][j] == STAR else components[g][j]) for g in gens}
        projections.append(make_hom(monoid, m, image))
    return ProductResult(monoid, tuple(projections), components)


def tupling(
    homs: Sequence[BasicHom], prod: ProductResult, source: Optional[TraceMonoid] = None
) -> BasicHom:
    """Mediating morphism into a product from a common source.

    ``source`` is only needed for the empty family (mediating into the
    terminal monoid)."""
    if not homs:
        if source is None:
            raise MalformedDiagram("tupling of an empty family needs an explicit source")
        return make_hom(source, prod.monoid, {e: None for e in source.events})
    src = homs[0].source
    image = {}
    for e in src.events:
        combo = tuple(STAR if h(e) is None else h(e) for h in homs)
        image[e] = None if all(x == STAR for x in combo) else render_tuple(combo)
    return make_hom(src, prod.monoid, image)


# ---------------------------------------------------------------------------
# Equalizers


def equalizer(f: BasicHom, g: BasicHom, flag: Category = Category.FPCM) -> tuple[TraceMonoid, BasicHom]:
    if f.source != g.source or f.target != g.target:
        raise NotParallel("equalizer needs a parallel pair")
    if flag is Category.FPCM_PAR:
        for h in (f, g):
            if not is_independence_preserving(h):
                raise NotIndependencePreserving("equalizer in FPCM_PAR needs independence-preserving homs")
    events = tuple(e for e in f.source.events if f(e) == g(e))
    keep = set(events)
    pairs = [(a, b) for a, b in f.source.pairs() if a in keep and b in keep]
    sub = make_monoid(events, pairs)
    inclusion = make_hom(sub, f.source, {e: e for e in events})
    return sub, inclusion


# ---------------------------------------------------------------------------
# Coproducts


def tag(index: int, name: str) -> str:
    return f"{index}:{name}"


@dataclass
class CoproductResult:
    monoid: TraceMonoid
    injections: tuple[BasicHom, ...]


def coproduct(ms: Sequence[TraceMonoid], flag: Category = Category.FPCM) -> CoproductResult:
    """Tagged disjoint union; serves both categories."""
    ms = list(ms)
    events = [tag(j, e) for j, m in enumerate(ms) for e in m.events]
    pairs = [(tag(j, a), tag(j, b)) for j, m in enumerate(ms) for a, b in m.pairs()]
    monoid = make_monoid(events, pairs)
    injections = tuple(
        make_hom(m, monoid, {e: tag(j, e) for e in m.events}) for j, m in enumerate(ms)
    )
    return CoproductResult(monoid, injections)


def cotupling(homs: Sequence[BasicHom], coprod: CoproductResult) -> BasicHom:
    """Mediating morphism out of a coproduct into a common target."""
    if not homs:
        raise MalformedDiagram("cotupling needs the target; give at least one hom")
    tgt = homs[0].target
    image = {}
    for j, h in enumerate(homs):
        for e in h.source.events:
            image[tag(j, e)] = h(e)
    return make_hom(coprod.monoid, tgt, image)


# ---------------------------------------------------------------------------
# Coequalizers


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[rx] = ry


@dataclass
class CoequalizerResult:
    monoid: TraceMonoid
    quotient: BasicHom
    classes: dict[str, Optional[str]]  # target event -> class name, None if killed


_ONE = object()  # identity class marker inside coequalizer computation


def _quotient_by(target: TraceMonoid, uf: _UnionFind) -> CoequalizerResult:
    groups: dict = {}
    for e in target.events:
        groups.setdefault(uf.find(e), []).append(e)
    one_root = uf.find(_ONE)
    order = {e: i for i, e in enumerate(target.events)}
    classes: dict[str, Optional[str]] = {}
    gens = []
    members: dict[str, list[str]] = {}
    for root, es in groups.items():
        if root == one_root:
            for e in es:
                classes[e] = None
            continue
        es.sort(key=order.__getitem__)
        name = es[0]
        gens.append(name)
        members[name] = es
        for e in es:
            classes[e] = name
    gens.sort(key=order.__getitem__)
    pairs = []
    for i, a in enumerate(gens):
        for b in gens[i + 1 :]:
            if any(target.independent(x, y) for x in members[a] for y in members[b]):
                pairs.append((a, b))
    monoid = make_monoid(gens, pairs)
    quotient = make_hom(target, monoid, classes)
    return CoequalizerResult(monoid, quotient, classes)


def coequalizer_fpcm(f: BasicHom, g: BasicHom) -> CoequalizerResult:
    """Coequalizer in FPCM: target generators modulo f(e) ~ g(e).

    A generator equated with the empty trace drags its whole class into the
    identity; such classes are removed, and independence pairs touching them
    are dropped.
    """
    if f.source != g.source or f.target != g.target:
        raise NotParallel("coequalizer needs a parallel pair")
    uf = _UnionFind()
    uf.add(_ONE)
    for e in f.target.events:
        uf.add(e)
    for e in f.source.events:
        a = f(e) if f(e) is not None else _ONE
        b = g(e) if g(e) is not None else _ONE
        uf.union(a, b)
    return _quotient_by(f.target, uf)


def coequalizer_ip(f: BasicHom, g: BasicHom) -> CoequalizerResult:
    """Coequalizer in FPCM_PAR: the FPCM coequalizer followed by the
    smallest congruence killing independent target pairs with equal images."""
    if f.source != g.source or f.target != g.target:
        raise NotParallel("coequalizer needs a parallel pair")
    for h in (f, g):
        if not is_independence_preserving(h):
            raise NotIndependencePreserving("coequalizer_ip needs independence-preserving homs")
    uf = _UnionFind()
    uf.add(_ONE)
    for e in f.target.events:
        uf.add(e)
    for e in f.source.events:
        a = f(e) if f(e) is not None else _ONE
        b = g(e) if g(e) is not None else _ONE
        uf.union(a, b)
    changed = True
    while changed:
        changed = False
        for a, b in f.target.pairs():
            ra, rb, r1 = uf.find(a), uf.find(b), uf.find(_ONE)
            if ra == rb and ra != r1:
                uf.union(a, _ONE)
                changed = True
    return _quotient_by(f.target, uf)


def coequalizer(f: BasicHom, g: BasicHom, flag: Category = Category.FPCM) -> CoequalizerResult:
    if flag is Category.FPCM_PAR:
        return coequalizer_ip(f, g)
    return coequalizer_fpcm(f, g)


# ---------------------------------------------------------------------------
# Limits and colimits of finite diagrams


@dataclass
class MonoidCone:
    apex: TraceMonoid
    legs: dict[str, BasicHom]  # diagram object -> hom out of apex


@dataclass
class MonoidCocone:
    apex: TraceMonoid
    legs: dict[str, BasicHom]  # diagram object -> hom into apex


def limit(d, flag: Category = Category.FPCM) -> MonoidCone:
    """Product over objects equalized against the product over arrow codomains."""
    problems = d.problems(flag)
    if problems:
        raise MalformedDiagram("; ".join(problems))
    objs = list(d.shape.objects)
    obj_prod = product([d.on_objects[o] for o in objs], flag)
    arrows = sorted(d.shape.arrows)
    if not arrows:
        apex = obj_prod.monoid
        legs = {o: obj_prod.projections[i] for i, o in enumerate(objs)}
        return MonoidCone(apex, legs)
    arr_prod = product([d.on_objects[dst] for _, _, dst in arrows], flag)
    proj = {o: obj_prod.projections[i] for i, o in enumerate(objs)}
    s = tupling([proj[dst] for _, _, dst in arrows], arr_prod)
    t = tupling([compose(d.on_arrows[name], proj[src]) for name, src, _ in arrows], arr_prod)
    _, inclusion = equalizer(s, t, flag)
    legs = {o: compose(proj[o], inclusion) for o in objs}
    return MonoidCone(inclusion.source, legs)


def colimit(d, flag: Category = Category.FPCM) -> MonoidCocone:
    """Coproduct over objects coequalized against the coproduct over arrow
    domains."""
    problems = d.problems(flag)
    if problems:
        raise MalformedDiagram("; ".join(problems))
    objs = list(d.shape.objects)
    obj_cop = coproduct([d.on_objects[o] for o in objs], flag)
    inj = {o: obj_cop.injections[i] for i, o in enumerate(objs)}
    arrows = sorted(d.shape.arrows)
    if not arrows:
        return MonoidCocone(obj_cop.monoid, dict(inj))
    arr_cop = coproduct([d.on_objects[src] for _, src, _ in arrows], flag)
    u = cotupling([inj[src] for _, src, _ in arrows], arr_cop)
    v = cotupling([compose(inj[dst], d.on_arrows[name]) for name, _, dst in arrows], arr_cop)
    coeq = coequalizer(u, v, flag)
    legs = {o: compose(coeq.quotient, inj[o]) for o in objs}
    return MonoidCocone(coeq.monoid, legs)


# ---------------------------------------------------------------------------
# Right adjoint to the inclusion into Mon


@dataclass
class RightAdjointResult:
    monoid: TraceMonoid
    identity: str
    counit: dict[str, str]  # generator -> carrier element (here the identity map)


def right_adjoint_R(elements: Sequence[str], table: Sequence[Sequence[str]]) -> RightAdjointResult:
    """Trace monoid on the non-identity elements, independent when they are
    distinct and commute in the multiplication table."""
    elements = list(elements)
    n = len(elements)
    if n > 64:
        raise SizeLimit("multiplication tables are limited to 64 elements")
    if len(set(elements)) != n:
        raise NotAMonoid("duplicate carrier elements")
    idx = {x: i for i, x in enumerate(elements)}
    if len(table) != n or any(len(row) != n for row in table):
        raise NotAMonoid("table shape does not match the carrier")
    for row in table:
        for x in row:
            if x not in idx:
                raise NotAMonoid(f"table entry {x!r} outside the carrier")
    def mul(x, y):
        return table[idx[x]][idx[y]]
    identity = None
    for e in elements:
        if all(mul(e, x) == x == mul(x, e) for x in elements):
            identity = e
            break
    if identity is None:
        raise NotAMonoid("no identity element")
    for x in elements:
        for y in elements:
            for z in elements:
                if mul(mul(x, y), z) != mul(x, mul(y, z)):
                    raise NotAMonoid(f"associativity fails at ({x!r}, {y!r}, {z!r})")
    gens = [x for x in elements if x != identity]
    pairs = [
        (a, b)
        for i, a in enumerate(gens)
        for b in gens[i + 1 :]
        if mul(a, b) == mul(b, a)
    ]
    monoid = make_monoid(gens, pairs)
    return RightAdjointResult(monoid, identity, {g: g for g in gens})


# ---------------------------------------------------------------------------
# Hom enumeration and isomorphism (finite, used for universal properties)


def enumerate_homs(src: TraceMonoid, tgt: TraceMonoid, flag: Category = Category.FPCM) -> list[BasicHom]:
    """All valid basic homs src -> tgt, independence-preserving ones only
    under FPCM_PAR.  Deterministic order; exponential in len(src.events)."""
    out = []
    choices = (None,) + tuple(tgt.events)
    for combo in itertools.product(choices, repeat=len(src.events)):
        h = BasicHom(src, tgt, combo)
        ok = True
        for a, b in src.pairs():
            fa, fb = h(a), h(b)
            if fa is None or fb is None:
                continue
            if fa == fb:
                if flag is Category.FPCM_PAR:
                    ok = False
                    break
                continue
            if not tgt.independent(fa, fb):
                ok = False
                break
        if ok:
            out.append(h)
    return out


def monoids_isomorphic(m1: TraceMonoid, m2: TraceMonoid) -> Optional[dict[str, str]]:
    """Event bijection preserving independence both ways, or None."""
    if len(m1.events) != len(m2.events) or len(m1.independence) != len(m2.independence):
        return None
    if len(m1.events) > 8:
        raise SizeLimit("isomorphism search is limited to 8 events")
    def degrees(m):
        return sorted(sum(1 for p in m.independence if e in p) for e in m.events)
    if degrees(m1) != degrees(m2):
        return None
    for perm in itertools.permutations(m2.events):
        bij = dict(zip(m1.events, perm))
        if all(m2.independent(bij[a], bij[b]) for a, b in m1.pairs()):
            return bij
    return None
