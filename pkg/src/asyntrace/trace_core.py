"""Trace monoids, canonical trace representatives and basic homomorphisms.

A trace monoid is the quotient of the free monoid over a finite alphabet by
the commutations of adjacent independent letters.  Traces are represented by
the lexicographically least word of their class, with "lexicographic" taken
with respect to the declared alphabet order.  Basic homomorphisms send each
generator to a generator of the target or to the empty trace (encoded as
``None``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    DuplicateEvent,
    InvalidHom,
    MonoidMismatch,
    ReflexivePair,
    UnknownEvent,
)

# Reserved sentinel used throughout for the basepoint / "undefined" element of
# pointed sets.  Never a legal event or state name.
STAR = "*"


@dataclass(frozen=True)
class TraceMonoid:
    """Finite alphabet with an irreflexive symmetric independence relation.

    ``events`` is kept in declaration order; that order is the total order
    used for canonical forms and for deterministic output everywhere else.
    ``independence`` stores each unordered pair once, ordered by alphabet
    position.
    """

    events: tuple[str, ...]
    independence: frozenset[tuple[str, str]]

    def index(self, e: str) -> int:
        try:
            return self.events.index(e)
        except ValueError:
            raise UnknownEvent(f"unknown event {e!r}") from None

    def independent(self, a: str, b: str) -> bool:
        return (a, b) in self.independence or (b, a) in self.independence

    def pairs(self) -> list[tuple[str, str]]:
        """Unordered independent pairs in deterministic (alphabet) order."""
        return sorted(self.independence, key=lambda p: (self.events.index(p[0]), self.events.index(p[1])))

    def __repr__(self) -> str:
        return f"TraceMonoid({list(self.events)!r}, {self.pairs()!r})"


def make_monoid(events: Sequence[str], independence: Iterable[Sequence[str]] = ()) -> TraceMonoid:
    events = tuple(events)
    if len(set(events)) != len(events):
        raise DuplicateEvent(f"duplicate event names in {list(events)}")
    if STAR in events:
        raise DuplicateEvent(f"{STAR!r} is reserved and cannot be an event name")
    pos = {e: i for i, e in enumerate(events)}
    pairs = set()
    for pair in independence:
        a, b = pair
        if a not in pos:
            raise UnknownEvent(f"independence pair mentions unknown event {a!r}")
        if b not in pos:
            raise UnknownEvent(f"independence pair mentions unknown event {b!r}")
        if a == b:
            raise ReflexivePair(f"reflexive independence pair ({a!r}, {b!r})")
        if pos[a] > pos[b]:
            a, b = b, a
        pairs.add((a, b))
    return TraceMonoid(events, frozenset(pairs))


def free_monoid(events: Sequence[str]) -> TraceMonoid:
    return make_monoid(events, ())


def free_commutative_monoid(events: Sequence[str]) -> TraceMonoid:
    events = tuple(events)
    pairs = [(a, b) for i, a in enumerate(events) for b in events[i + 1 :]]
    return make_monoid(events, pairs)


def check_word(letters: Sequence[str], m: TraceMonoid) -> tuple[str, ...]:
    letters = tuple(letters)
    known = set(m.events)
    for x in letters:
        if x not in known:
            raise UnknownEvent(f"letter {x!r} not in alphabet {list(m.events)}")
    return letters


def normal_form(letters: Sequence[str], m: TraceMonoid) -> tuple[str, ...]:
    """Lexicographically least word equivalent to ``letters``.

    Greedy selection: at each step, take the least letter (in alphabet order)
    whose occurrence can be commuted to the front, i.e. all letters to its
    left are independent of it.  At most the leftmost occurrence of each
    letter qualifies, so the choice is unambiguous.
    """
    pos = {e: i for i, e in enumerate(m.events)}
    indep = m.independent
    rem = list(letters)
    out = []
    while rem:
        best = None
        best_rank = None
        for i, x in enumerate(rem):
            if all(indep(x, y) for y in rem[:i]):
                r = pos[x]
                if best_rank is None or r < best_rank:
                    best, best_rank = i, r
        out.append(rem.pop(best))
    return tuple(out)


@dataclass(frozen=True)
class Trace:
    """A trace, held by its canonical (lex-least) representative.

    Build traces through :func:`normalize` or :func:`concat`; the constructor
    trusts that ``letters`` is already canonical.
    """

    monoid: TraceMonoid
    letters: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.letters)

    def __repr__(self) -> str:
        return f"Trace[{''.join(self.letters) or '1'}]"


def normalize(letters: Sequence[str], m: TraceMonoid) -> Trace:
    return Trace(m, normal_form(check_word(letters, m), m))


def empty_trace(m: TraceMonoid) -> Trace:
    return Trace(m, ())


def equivalent(w1: Sequence[str], w2: Sequence[str], m: TraceMonoid) -> bool:
    return normalize(w1, m) == normalize(w2, m)


def concat(t1: Trace, t2: Trace) -> Trace:
    if t1.monoid != t2.monoid:
        raise MonoidMismatch("cannot concatenate traces over different monoids")
    return Trace(t1.monoid, normal_form(t1.letters + t2.letters, t1.monoid))


def length(t: Trace) -> int:
    return len(t.letters)


@dataclass(frozen=True)
class BasicHom:
    """Generator-level homomorphism; ``image`` is aligned with source events.

    ``None`` encodes the empty trace.  Validity (well-definedness on the
    quotient): every independent source pair must land on a commuting pair of
    the target, i.e. one image empty, or equal images, or independent images.
    """

    source: TraceMonoid
    target: TraceMonoid
    image: tuple[Optional[str], ...]

    def __call__(self, e: str) -> Optional[str]:
        return self.image[self.source.index(e)]

    @property
    def mapping(self) -> dict[str, Optional[str]]:
        return dict(zip(self.source.events, self.image))

    def __repr__(self) -> str:
        body = ", ".join(f"{e}->{v if v is not None else '1'}" for e, v in zip(self.source.events, self.image))
        return f"BasicHom({body})"


def make_hom(
    source: TraceMonoid, target: TraceMonoid, image: Mapping[str, Optional[str]]
) -> BasicHom:
    for e in image:
        if e not in source.events:
            raise UnknownEvent(f"image defined on unknown event {e!r}")
    values = []
    for e in source.events:
        if e not in image:
            raise UnknownEvent(f"image missing for event {e!r}")
        v = image[e]
        if v is not None and v not in target.events:
            raise UnknownEvent(f"image of {e!r} is unknown target event {v!r}")
        values.append(v)
    h = BasicHom(source, target, tuple(values))
    bad = _invalid_pair(h)
    if bad is not None:
        a, b = bad
        raise InvalidHom(
            f"independent pair ({a!r}, {b!r}) maps to non-commuting pair "
            f"({h(a)!r}, {h(b)!r})"
        )
    return h


def _invalid_pair(h: BasicHom) -> Optional[tuple[str, str]]:
    for a, b in h.source.pairs():
        fa, fb = h(a), h(b)
        if fa is None or fb is None or fa == fb:
            continue
        if not h.target.independent(fa, fb):
            return (a, b)
    return None


def identity_hom(m: TraceMonoid) -> BasicHom:
    return BasicHom(m, m, tuple(m.events))


def apply(h: BasicHom, t: Trace) -> Trace:
    if t.monoid != h.source:
        raise MonoidMismatch("trace is not over the homomorphism's source")
    letters = [h(x) for x in t.letters]
    return normalize([x for x in letters if x is not None], h.target)


def apply_word(h: BasicHom, letters: Sequence[str]) -> Trace:
    return apply(h, normalize(letters, h.source))


def is_independence_preserving(h: BasicHom) -> bool:
    for a, b in h.source.pairs():
        fa, fb = h(a), h(b)
        if fa == fb and fa is not None:
            return False
    return True


def compose(h2: BasicHom, h1: BasicHom) -> BasicHom:
    """h2 after h1; the empty image is absorbing."""
    if h1.target != h2.source:
        raise MonoidMismatch("composition endpoints do not match")
    values = tuple(None if v is None else h2(v) for v in h1.image)
    return BasicHom(h1.source, h2.target, values)
