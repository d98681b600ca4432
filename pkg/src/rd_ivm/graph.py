"""Labeled graph instances and disjoint update pairs.

An LRel maps (symbol, tag) keys to edge sets. Absent keys are empty, and
empty entries are never stored, so two LRels with the same content compare
equal. Every LRel also carries its node universe, which always contains the
endpoints of its edges.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, Mapping, Optional, Tuple

from .errors import DeltaOverlapError
from .syntax.normalize import symbols_of
from .syntax.terms import Tag

logger = logging.getLogger(__name__)

Edge = Tuple[str, str]
Key = Tuple[str, Tag]


def key_order(key: Key) -> Tuple[str, str]:
    return (key[0], key[1].value)


@dataclass(frozen=True)
class EGraph:
    edges: FrozenSet[Edge] = frozenset()

    def __iter__(self) -> Iterator[Edge]:
        return iter(sorted(self.edges))

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, edge: Edge) -> bool:
        return edge in self.edges

    def __bool__(self) -> bool:
        return bool(self.edges)

    def __or__(self, other: "EGraph") -> "EGraph":
        if not other.edges:
            return self
        if not self.edges:
            return other
        return EGraph(self.edges | other.edges)

    def __sub__(self, other: "EGraph") -> "EGraph":
        if not other.edges or not self.edges:
            return self
        return EGraph(self.edges - other.edges)

    def __and__(self, other: "EGraph") -> "EGraph":
        return EGraph(self.edges & other.edges)

    def __le__(self, other: "EGraph") -> bool:
        return self.edges <= other.edges

    def nodes(self) -> FrozenSet[str]:
        return frozenset(n for edge in self.edges for n in edge)

    @cached_property
    def successors(self) -> Dict[str, Tuple[str, ...]]:
        out: Dict[str, list] = {}
        for a, b in self.edges:
            out.setdefault(a, []).append(b)
        return {a: tuple(sorted(bs)) for a, bs in out.items()}

    @cached_property
    def predecessors(self) -> Dict[str, Tuple[str, ...]]:
        inc: Dict[str, list] = {}
        for a, b in self.edges:
            inc.setdefault(b, []).append(a)
        return {b: tuple(sorted(as_)) for b, as_ in inc.items()}


EMPTY = EGraph()


def egraph(edges: Iterable[Edge] = ()) -> EGraph:
    return EGraph(frozenset(edges))


@dataclass(frozen=True)
class LRel:
    rel: Dict[Key, EGraph] = field(default_factory=dict)
    universe: FrozenSet[str] = frozenset()

    # unhashable: rel is a dict
    __hash__ = None

    @classmethod
    def build(
        cls,
        entries: Mapping[Key, Iterable[Edge]] = None,
        universe: Iterable[str] = (),
    ) -> "LRel":
        rel: Dict[Key, EGraph] = {}
        nodes = set(universe)
        for key, edges in (entries or {}).items():
            graph = edges if isinstance(edges, EGraph) else egraph(edges)
            if graph:
                rel[key] = graph
                nodes.update(graph.nodes())
        return cls(rel, frozenset(nodes))

    def get(self, key: Key) -> EGraph:
        return self.rel.get(key, EMPTY)

    def __getitem__(self, key: Key) -> EGraph:
        return self.rel.get(key, EMPTY)

    def keys(self):
        return sorted(self.rel, key=key_order)

    def symbols(self) -> FrozenSet[str]:
        return frozenset(sym for sym, _ in self.rel)

    def size(self, tag: Optional[Tag] = None) -> int:
        return sum(len(g) for (_, t), g in self.rel.items() if tag is None or t is tag)

    def replace(self, key: Key, graph: EGraph) -> "LRel":
        rel = dict(self.rel)
        if graph:
            rel[key] = graph
        else:
            rel.pop(key, None)
        return LRel(rel, self.universe | graph.nodes())

    def restrict(self, symbols: Iterable[str]) -> "LRel":
        keep = set(symbols)
        return LRel({k: g for k, g in self.rel.items() if k[0] in keep}, self.universe)

    def extend_universe(self, nodes: Iterable[str]) -> "LRel":
        extra = frozenset(nodes) - self.universe
        if not extra:
            return self
        return LRel(self.rel, self.universe | extra)

    def __str__(self) -> str:
        return ", ".join(f"{s}/{t.value}:{len(self.rel[(s, t)])}" for s, t in self.keys())


EMPTY_LREL = LRel()


@dataclass(frozen=True)
class EDelta:
    """Insertions and deletions; disjoint per (symbol, tag) key."""

    add: LRel = EMPTY_LREL
    delete: LRel = EMPTY_LREL

    __hash__ = None

    def __post_init__(self):
        for key in sorted(set(self.add.rel) & set(self.delete.rel), key=key_order):
            overlap = self.add.rel[key].edges & self.delete.rel[key].edges
            if overlap:
                raise DeltaOverlapError(key[0], key[1], min(overlap))

    def keys(self):
        return sorted(set(self.add.rel) | set(self.delete.rel), key=key_order)

    def symbols(self) -> FrozenSet[str]:
        return self.add.symbols() | self.delete.symbols()

    def is_additive(self, keys: Optional[Iterable[Key]] = None) -> bool:
        if keys is None:
            return not self.delete.rel
        return not any(self.delete.get(k) for k in keys)

    @property
    def universe(self) -> FrozenSet[str]:
        return self.add.universe | self.delete.universe

    def __bool__(self) -> bool:
        return bool(self.add.rel or self.delete.rel)


def new_delta(add: LRel = EMPTY_LREL, delete: LRel = EMPTY_LREL) -> EDelta:
    """Build an update pair, raising DeltaOverlapError on the first shared edge"""
    return EDelta(add, delete)


EMPTY_DELTA = EDelta()


def applied_relation(g: LRel, d: EDelta, key: Key) -> EGraph:
    """(g ⊕ d) at a single key"""
    return (g.get(key) - d.delete.get(key)) | d.add.get(key)


def apply_update(g: LRel, d: EDelta) -> LRel:
    if not d and d.universe <= g.universe:
        return g
    rel = dict(g.rel)
    for key in set(d.add.rel) | set(d.delete.rel):
        graph = applied_relation(g, d, key)
        if graph:
            rel[key] = graph
        else:
            rel.pop(key, None)
    return LRel(rel, g.universe | d.universe)


def modify(d: EDelta, s: str, tag: Tag, g_plus: EGraph, g_minus: EGraph) -> EDelta:
    """Schedule g_plus for insertion and g_minus for deletion at (s, tag).

    Additions win: an edge in both g_plus and g_minus, or already scheduled for
    deletion, ends up only in the insertion set.
    """
    key = (s, tag)
    added = d.add.get(key) | g_plus
    deleted = (d.delete.get(key) | g_minus) - added
    return EDelta(d.add.replace(key, added), d.delete.replace(key, deleted))


def lrel_diff(a: EGraph, b: EGraph) -> Tuple[EGraph, EGraph]:
    """The (plus, minus) pair rewriting a into exactly b"""
    return b - a, a - b


def invert(d: EDelta) -> EDelta:
    return EDelta(d.delete, d.add)


def closure_witness(
    g: LRel, symbols: Optional[Iterable[str]] = None
) -> Optional[Tuple[str, Edge]]:
    """First (symbol, edge) whose Plus entry disagrees with the closure of Single"""
    from .closure import find_path, transitive_closure

    for sym in sorted(g.symbols() if symbols is None else symbols):
        single, plus = g.get((sym, Tag.SINGLE)), g.get((sym, Tag.PLUS))
        for a, b in plus:
            if find_path(single, a, b) is None:
                return sym, (a, b)
        missing = transitive_closure(single) - plus
        if missing:
            return sym, next(iter(missing))
    return None


def wf_graph(g: LRel) -> bool:
    """True iff every Plus entry equals the transitive closure of its Single entry"""
    from .closure import is_closure

    return all(
        is_closure(g.get((sym, Tag.SINGLE)), g.get((sym, Tag.PLUS))) for sym in g.symbols()
    )


@symbols_of.register
def _(x: LRel) -> FrozenSet[Key]:
    return frozenset(x.rel)


@symbols_of.register
def _(x: EDelta) -> FrozenSet[Key]:
    return frozenset(x.add.rel) | frozenset(x.delete.rel)


def delta_summary(before: LRel, after: LRel, symbols: Iterable[str]) -> Dict[str, Tuple[int, int]]:
    """Per-symbol (added, removed) counts of Single edges between two graphs"""
    summary = {}
    for sym in sorted(set(symbols)):
        plus, minus = lrel_diff(before.get((sym, Tag.SINGLE)), after.get((sym, Tag.SINGLE)))
        summary[sym] = (len(plus), len(minus))
    return summary
