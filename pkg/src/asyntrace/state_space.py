"""Pointed sets with trace-monoid actions, their limits and colimits.

The basepoint ``*`` is an absorbing "undefined" state: the action is total on
states plus star, and star is a sink.  Limits are computed pointwise (product
of pointed state sets, subset equalizers).  Colimits go through a presented
action (generators, transition rules, identifications) which is materialized
by bounded saturation; the result carries an EXACT/TRUNCATED certificate so
an infinite free extension is never silently cut off.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from . import fpcm_cat
from .diagrams import DiagramShape, MonoidDiagram, validate_shape
from .errors import (
    MalformedDiagram,
    MonoidMismatch,
    NotParallel,
    SizeLimit,
    UnknownState,
)
from .fpcm_cat import Category, ProductResult, render_tuple, tag
from .trace_core import (
    STAR,
    BasicHom,
    Trace,
    TraceMonoid,
    compose,
    is_independence_preserving,
    make_hom,
    normal_form,
)


@dataclass
class StateSpace:
    """Trace monoid acting on a pointed finite state set.

    ``action`` holds only the entries that do not lead to star; ``step``
    fills in the sink behaviour.
    """

    monoid: TraceMonoid
    states: tuple[str, ...]
    action: dict[tuple[str, str], str]

    def step(self, x: str, e: str) -> str:
        if x == STAR:
            return STAR
        return self.action.get((x, e), STAR)


def make_space(monoid: TraceMonoid, states: Sequence[str], action) -> StateSpace:
    s = StateSpace(monoid, tuple(states), dict(action))
    problems = validate_space(s)
    if problems:
        raise UnknownState("; ".join(problems))
    return s


def act_trace(s: StateSpace, x: str, t: Union[Trace, Sequence[str]]) -> str:
    letters = t.letters if isinstance(t, Trace) else tuple(t)
    if isinstance(t, Trace) and t.monoid != s.monoid:
        raise MonoidMismatch("trace is not over the space's monoid")
    if x != STAR and x not in s.states:
        raise UnknownState(f"unknown state {x!r}")
    for e in letters:
        x = s.step(x, e)
    return x


def validate_space(s: StateSpace) -> list[str]:
    problems = []
    states = set(s.states)
    if len(states) != len(s.states):
        problems.append("duplicate state names")
    if STAR in states:
        problems.append(f"{STAR!r} is reserved and cannot be a state name")
    events = set(s.monoid.events)
    for (x, e), y in sorted(s.action.items()):
        if x not in states:
            problems.append(f"action entry on unknown state {x!r}")
        if e not in events:
            problems.append(f"action entry on unknown event {e!r}")
        if y != STAR and y not in states:
            problems.append(f"action value {y!r} is not a state")
    for a, b in s.monoid.pairs():
        for x in s.states:
            left = s.step(s.step(x, a), b)
            right = s.step(s.step(x, b), a)
            if left != right:
                problems.append(
                    f"diamond violation at state {x!r} with pair ({a!r}, {b!r}):"
                    f" {left!r} != {right!r}"
                )
    return problems


@dataclass
class StateSpaceMorphism:
    """Monoid part plus pointed state map, equivariant on generators."""

    source: StateSpace
    target: StateSpace
    monoid_part: BasicHom
    state_part: dict[str, str]  # proper source states -> target state or star

    def state(self, x: str) -> str:
        if x == STAR:
            return STAR
        return self.state_part[x]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, StateSpaceMorphism)
            and self.monoid_part == other.monoid_part
            and all(self.state(x) == other.state(x) for x in self.source.states)
        )


def validate_morphism(m: StateSpaceMorphism, flag: Category = Category.FPCM) -> list[str]:
    problems = []
    if m.monoid_part.source != m.source.monoid or m.monoid_part.target != m.target.monoid:
        problems.append("monoid part endpoints do not match the spaces")
        return problems
    tgt_states = set(m.target.states)
    for x in m.source.states:
        if x not in m.state_part:
            problems.append(f"state map missing for {x!r}")
        elif m.state_part[x] != STAR and m.state_part[x] not in tgt_states:
            problems.append(f"state map sends {x!r} outside the target")
    if problems:
        return problems
    if flag is Category.FPCM_PAR and not is_independence_preserving(m.monoid_part):
        problems.append("monoid part is not independence-preserving")
    for x in tuple(m.source.states) + (STAR,):
        for e in m.source.monoid.events:
            fe = m.monoid_part(e)
            expected = m.state(x) if fe is None else m.target.step(m.state(x), fe)
            got = m.state(m.source.step(x, e))
            if got != expected:
                problems.append(
                    f"equivariance violation at ({x!r}, {e!r}): {got!r} != {expected!r}"
                )
    return problems


def make_space_morphism(source, target, monoid_part, state_part, flag=Category.FPCM) -> StateSpaceMorphism:
    m = StateSpaceMorphism(source, target, monoid_part, dict(state_part))
    problems = validate_morphism(m, flag)
    if problems:
        raise UnknownState("; ".join(problems))
    return m


def identity_morphism(s: StateSpace) -> StateSpaceMorphism:
    from .trace_core import identity_hom

    return StateSpaceMorphism(s, s, identity_hom(s.monoid), {x: x for x in s.states})


def compose_morphisms(m2: StateSpaceMorphism, m1: StateSpaceMorphism) -> StateSpaceMorphism:
    if m1.target is not m2.source and m1.target != m2.source:
        raise MonoidMismatch("composition endpoints do not match")
    state_part = {x: m2.state(m1.state(x)) for x in m1.source.states}
    return StateSpaceMorphism(m1.source, m2.target, compose(m2.monoid_part, m1.monoid_part), state_part)


# ---------------------------------------------------------------------------
# Products, equalizers, limits


@dataclass
class SpaceProductResult:
    space: StateSpace
    projections: tuple[StateSpaceMorphism, ...]
    monoid_product: ProductResult
    state_components: dict[str, tuple[str, ...]]  # state name -> pointed tuple


def product(spaces: Sequence[StateSpace], flag: Category = Category.FPCM) -> SpaceProductResult:
    """Monoid product acting componentwise on the product of pointed state
    sets; only the all-star tuple plays the basepoint."""
    spaces = list(spaces)
    mp = fpcm_cat.product([s.monoid for s in spaces], flag)
    if not spaces:
        space = StateSpace(mp.monoid, (), {})
        return SpaceProductResult(space, (), mp, {})
    axes = [tuple(s.states) + (STAR,) for s in spaces]
    states = []
    state_components = {}
    for combo in itertools.product(*axes):
        if all(x == STAR for x in combo):
            continue
        name = render_tuple(combo)
        states.append(name)
        state_components[name] = combo
    action = {}
    for name in states:
        xs = state_components[name]
        for gen in mp.monoid.events:
            parts = mp.components[gen]
            ys = tuple(
                x if u == STAR else s.step(x, u)
                for s, x, u in zip(spaces, xs, parts)
            )
            if not all(y == STAR for y in ys):
                action[(name, gen)] = render_tuple(ys)
    space = StateSpace(mp.monoid, tuple(states), action)
    projections = []
    for i, s in enumerate(spaces):
        state_part = {name: state_components[name][i] for name in states}
        projections.append(StateSpaceMorphism(space, s, mp.projections[i], state_part))
    return SpaceProductResult(space, tuple(projections), mp, state_components)


def space_tupling(
    morphisms: Sequence[StateSpaceMorphism], prod: SpaceProductResult, source: Optional[StateSpace] = None
) -> StateSpaceMorphism:
    if not morphisms:
        if source is None:
            raise MalformedDiagram("tupling of an empty family needs an explicit source")
        monoid_part = fpcm_cat.tupling([], prod.monoid_product, source.monoid)
        return StateSpaceMorphism(source, prod.space, monoid_part, {x: STAR for x in source.states})
    src = morphisms[0].source
    monoid_part = fpcm_cat.tupling([m.monoid_part for m in morphisms], prod.monoid_product)
    state_part = {}
    for x in src.states:
        combo = tuple(m.state(x) for m in morphisms)
        state_part[x] = STAR if all(y == STAR for y in combo) else render_tuple(combo)
    return StateSpaceMorphism(src, prod.space, monoid_part, state_part)


def equalizer(
    m1: StateSpaceMorphism, m2: StateSpaceMorphism, flag: Category = Category.FPCM
) -> tuple[StateSpace, StateSpaceMorphism]:
    if m1.source != m2.source or m1.target != m2.target:
        raise NotParallel("equalizer needs a parallel pair of space morphisms")
    sub_monoid, inclusion = fpcm_cat.equalizer(m1.monoid_part, m2.monoid_part, flag)
    states = tuple(x for x in m1.source.states if m1.state(x) == m2.state(x))
    keep = set(states)
    action = {
        (x, e): y
        for (x, e), y in m1.source.action.items()
        if x in keep and e in sub_monoid.events and y in keep
    }
    sub = StateSpace(sub_monoid, states, action)
    incl = StateSpaceMorphism(sub, m1.source, inclusion, {x: x for x in states})
    return sub, incl


@dataclass
class SpaceDiagram:
    shape: DiagramShape
    on_objects: dict[str, StateSpace]
    on_arrows: dict[str, StateSpaceMorphism]

    def problems(self, flag=None) -> list[str]:
        out = validate_shape(self.shape)
        for o in self.shape.objects:
            if o not in self.on_objects:
                out.append(f"object {o!r} has no space assigned")
        for name, src, dst in self.shape.arrows:
            m = self.on_arrows.get(name)
            if m is None:
                out.append(f"arrow {name!r} has no morphism assigned")
                continue
            if src in self.on_objects and m.source != self.on_objects[src]:
                out.append(f"arrow {name!r}: source space mismatch")
            if dst in self.on_objects and m.target != self.on_objects[dst]:
                out.append(f"arrow {name!r}: target space mismatch")
            if flag is Category.FPCM_PAR and not is_independence_preserving(m.monoid_part):
                out.append(f"arrow {name!r}: not independence-preserving")
        return out

    def monoid_diagram(self) -> MonoidDiagram:
        return MonoidDiagram(
            self.shape,
            {o: s.monoid for o, s in self.on_objects.items()},
            {a: m.monoid_part for a, m in self.on_arrows.items()},
        )


@dataclass
class SpaceCone:
    apex: StateSpace
    legs: dict[str, StateSpaceMorphism]


def limit(d: SpaceDiagram, flag: Category = Category.FPCM) -> SpaceCone:
    problems = d.problems(flag)
    if problems:
        raise MalformedDiagram("; ".join(problems))
    objs = list(d.shape.objects)
    prod = product([d.on_objects[o] for o in objs], flag)
    proj = {o: prod.projections[i] for i, o in enumerate(objs)}
    arrows = sorted(d.shape.arrows)
    if not arrows:
        return SpaceCone(prod.space, dict(proj))
    arr_prod = product([d.on_objects[dst] for _, _, dst in arrows], flag)
    s = space_tupling([proj[dst] for _, _, dst in arrows], arr_prod)
    t = space_tupling(
        [compose_morphisms(d.on_arrows[name], proj[src]) for name, src, _ in arrows], arr_prod
    )
    apex, incl = equalizer(s, t, flag)
    legs = {o: compose_morphisms(proj[o], incl) for o in objs}
    return SpaceCone(apex, legs)


# ---------------------------------------------------------------------------
# Presented actions and saturation


Term = tuple[str, tuple[str, ...]]  # (generator, canonical trace); star stands alone

EXACT = "EXACT"
TRUNCATED = "TRUNCATED"


@dataclass
class PresentedAction:
    """Generators-and-relations form of a state space.

    ``transitions`` are rules (generator, event, generator-or-star); several
    rules may share a (generator, event) pair, forcing identifications.
    ``identifications`` equate two terms; a term is ``(generator, trace)`` or
    the star sentinel.
    """

    monoid: TraceMonoid
    generators: tuple[str, ...]
    transitions: tuple[tuple[str, str, str], ...]
    identifications: tuple[tuple[Union[Term, str], Union[Term, str]], ...] = ()


@dataclass
class SaturationResult:
    status: str  # EXACT or TRUNCATED
    space: StateSpace
    class_map: dict[str, str]  # input generator -> result state or star
    frontier: tuple[Term, ...] = ()


def _term_key(t) -> tuple:
    if t == STAR:
        return (-1, "", ())
    return (len(t[1]), t[0], t[1])


def saturate(p: PresentedAction, bound: int) -> SaturationResult:
    """Materialize the quotient of a presented action up to trace depth
    ``bound``.

    Breadth-first congruence closure over terms (generator, canonical trace):
    union-find seeded by rules and identifications, merging of classes merges
    their explored successors, star absorbs.  EXACT when the settled classes
    are closed under every event.
    """
    if bound < 0:
        raise MalformedDiagram("saturation bound must be >= 0")
    m = p.monoid
    parent: dict = {}

    def add(x):
        parent.setdefault(x, x)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y) -> bool:
        rx, ry = find(x), find(y)
        if rx == ry:
            return False
        # star wins; otherwise keep the smaller term as representative
        if rx == STAR or (ry != STAR and _term_key(rx) < _term_key(ry)):
            rx, ry = ry, rx
        parent[rx] = ry
        return True

    def succ(term: Term, e: str) -> Term:
        g, t = term
        return (g, normal_form(t + (e,), m))

    add(STAR)
    for g in p.generators:
        add((g, ()))
    for g, e, rhs in p.transitions:
        lhs = (g, (e,))
        add(lhs)
        if rhs == STAR:
            union(lhs, STAR)
        else:
            add((rhs, ()))
            union(lhs, (rhs, ()))
    for t1, t2 in p.identifications:
        for t in (t1, t2):
            if t != STAR:
                add((t[0], normal_form(t[1], m)))
        a = t1 if t1 == STAR else (t1[0], normal_form(t1[1], m))
        b = t2 if t2 == STAR else (t2[0], normal_form(t2[1], m))
        union(a, b)

    changed = True
    while changed:
        changed = False
        groups: dict = {}
        for node in parent:
            groups.setdefault(find(node), []).append(node)
        for root in sorted(groups, key=_term_key):
            members = groups[root]
            if root == STAR:
                for t in members:
                    if t == STAR:
                        continue
                    for e in m.events:
                        s = succ(t, e)
                        if s in parent:
                            changed |= union(s, STAR)
                continue
            min_member = min(members, key=_term_key)
            for e in m.events:
                collected = [succ(t, e) for t in members if succ(t, e) in parent]
                if len(min_member[1]) + 1 <= bound:
                    s0 = succ(min_member, e)
                    if s0 not in parent:
                        add(s0)
                        changed = True
                    collected.append(s0)
                for a, b in zip(collected, collected[1:]):
                    changed |= union(a, b)

    # classify classes and detect the frontier
    groups = {}
    for node in parent:
        groups.setdefault(find(node), []).append(node)
    star_root = find(STAR)
    info = {}
    for root, members in groups.items():
        if root == star_root:
            continue
        min_member = min(members, key=_term_key)
        settled = len(min_member[1]) <= bound
        info[root] = (min_member, settled, members)
    frontier = []
    for root, (min_member, settled, members) in info.items():
        if not settled:
            frontier.append(min_member)
            continue
        for e in m.events:
            known = None
            for t in members:
                s = succ(t, e)
                if s in parent:
                    known = find(s)
                    break
            if known is None:
                frontier.append(succ(min_member, e))
            elif known != star_root and not info[known][1]:
                frontier.append(succ(min_member, e))
    frontier = sorted(set(frontier), key=lambda t: (t[0], t[1]))
    status = EXACT if not frontier else TRUNCATED

    def state_name(term: Term) -> str:
        g, t = term
        return g if not t else g + "@" + ".".join(t)

    names = {}
    for root, (min_member, settled, _) in sorted(info.items(), key=lambda kv: _term_key(kv[1][0])):
        if settled:
            names[root] = state_name(min_member)
    states = tuple(names[r] for r in sorted(names, key=_term_key))
    action = {}
    for root, (min_member, settled, members) in info.items():
        if not settled:
            continue
        for e in m.events:
            known = None
            for t in members:
                s = succ(t, e)
                if s in parent:
                    known = find(s)
                    break
            if known is not None and known in names:
                action[(names[root], e)] = names[known]
    space = StateSpace(m, states, action)
    class_map = {}
    for g in p.generators:
        r = find((g, ()))
        class_map[g] = STAR if r == star_root or r not in names else names[r]
    return SaturationResult(status, space, class_map, tuple(frontier))


# ---------------------------------------------------------------------------
# Colimits of space diagrams


@dataclass
class SpaceCocone:
    apex: StateSpace
    legs: dict[str, StateSpaceMorphism]


@dataclass
class SpaceColimitResult:
    monoid_cocone: fpcm_cat.MonoidCocone
    presentation: PresentedAction
    saturation: SaturationResult
    cocone: SpaceCocone


def build_presentation(d: SpaceDiagram, monoid_cocone: fpcm_cat.MonoidCocone) -> PresentedAction:
    """Presented action of a colimit: tagged states, action rules pushed
    through the colimit cocone, identifications along diagram arrows.

    An event erased by the cocone whose action was undefined collapses the
    state to star (the free extension in pointed sets forces it)."""
    objs = list(d.shape.objects)
    monoid = monoid_cocone.apex
    generators = []
    transitions = []
    identifications = []
    for i, o in enumerate(objs):
        space = d.on_objects[o]
        q = monoid_cocone.legs[o]
        for x in space.states:
            generators.append(tag(i, x))
        for x in space.states:
            for e in space.monoid.events:
                y = space.step(x, e)
                qe = q(e)
                if qe is not None:
                    transitions.append((tag(i, x), qe, STAR if y == STAR else tag(i, y)))
                elif y == STAR:
                    identifications.append(((tag(i, x), ()), STAR))
                else:
                    identifications.append(((tag(i, x), ()), (tag(i, y), ())))
    index = {o: i for i, o in enumerate(objs)}
    for name, src, dst in sorted(d.shape.arrows):
        mor = d.on_arrows[name]
        for x in d.on_objects[src].states:
            y = mor.state(x)
            lhs = (tag(index[src], x), ())
            if y == STAR:
                identifications.append((lhs, STAR))
            else:
                identifications.append((lhs, (tag(index[dst], y), ())))
    return PresentedAction(monoid, tuple(generators), tuple(transitions), tuple(identifications))


def colimit(d: SpaceDiagram, flag: Category = Category.FPCM, bound: int = 8) -> SpaceColimitResult:
    problems = d.problems(flag)
    if problems:
        raise MalformedDiagram("; ".join(problems))
    monoid_cocone = fpcm_cat.colimit(d.monoid_diagram(), flag)
    presentation = build_presentation(d, monoid_cocone)
    sat = saturate(presentation, bound)
    objs = list(d.shape.objects)
    legs = {}
    for i, o in enumerate(objs):
        space = d.on_objects[o]
        state_part = {x: sat.class_map[tag(i, x)] for x in space.states}
        legs[o] = StateSpaceMorphism(space, sat.space, monoid_cocone.legs[o], state_part)
    return SpaceColimitResult(monoid_cocone, presentation, sat, SpaceCocone(sat.space, legs))


# ---------------------------------------------------------------------------
# Isomorphism testing (brute force with pruning; test support)


def is_isomorphic(s1: StateSpace, s2: StateSpace) -> Optional[tuple[dict[str, str], dict[str, str]]]:
    """Event bijection preserving independence plus jointly equivariant state
    bijection; returns (event_map, state_map) or None."""
    if len(s1.monoid.events) > 8 or len(s1.states) > 12:
        raise SizeLimit("isomorphism search limited to 8 events and 12 states")
    if len(s1.states) != len(s2.states) or len(s1.monoid.events) != len(s2.monoid.events):
        return None
    for perm in itertools.permutations(s2.monoid.events):
        emap = dict(zip(s1.monoid.events, perm))
        if not all(s2.monoid.independent(emap[a], emap[b]) for a, b in s1.monoid.pairs()):
            continue
        if len(s1.monoid.independence) != len(s2.monoid.independence):
            return None
        smap = _match_states(s1, s2, emap)
        if smap is not None:
            return emap, smap
    return None


def _match_states(s1: StateSpace, s2: StateSpace, emap) -> Optional[dict[str, str]]:
    order = list(s1.states)

    def extend(assignment, used):
        if len(assignment) == len(order):
            return dict(assignment)
        x = order[len(assignment)]
        for y in s2.states:
            if y in used:
                continue
            trial = dict(assignment)
            trial[x] = y
            if _consistent(s1, s2, emap, trial):
                res = extend(trial, used | {y})
                if res is not None:
                    return res
        return None

    return extend({}, set())


def _consistent(s1, s2, emap, partial) -> bool:
    get = partial.get
    for x, y in partial.items():
        for e in s1.monoid.events:
            x2 = s1.step(x, e)
            y2 = s2.step(y, emap[e])
            if x2 == STAR:
                if y2 != STAR:
                    return False
            else:
                if y2 == STAR:
                    return False
                mapped = get(x2)
                if mapped is not None and mapped != y2:
                    return False
    return True
