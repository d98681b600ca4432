import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Set, Tuple

import networkx as nx

from .graph import EDelta, EGraph, LRel, applied_relation, egraph, lrel_diff, modify
from .syntax.terms import Tag

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Path:
    start: str
    steps: Tuple[str, ...]

    @property
    def end(self) -> str:
        return self.steps[-1]

    def edges(self):
        nodes = (self.start,) + self.steps
        return list(zip(nodes, nodes[1:]))


def is_path(g: EGraph, path: Path) -> bool:
    return bool(path.steps) and all(edge in g for edge in path.edges())


def _digraph(g: EGraph) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_edges_from(g.edges)
    return graph


def _reachable(graph: nx.DiGraph, source: str) -> Set[str]:
    """Nodes reachable from source by a path of length >= 1"""
    if source not in graph:
        return set()
    reached = nx.descendants(graph, source)
    if graph.has_edge(source, source) or any(p in reached for p in graph.predecessors(source)):
        reached.add(source)
    return reached


def transitive_closure(g: EGraph) -> EGraph:
    """All (x, y) joined by a nonempty path of g, searched from every source"""
    graph = _digraph(g)
    return egraph((x, y) for x in g.successors for y in _reachable(graph, x))


def _path_tree(g: EGraph, src: str) -> Dict[str, str]:
    """BFS parent pointers for every node reachable from src in >= 1 step"""
    successors = g.successors
    parent: Dict[str, str] = {}
    queue = deque()
    for n in successors.get(src, ()):
        parent[n] = src
        queue.append(n)
    while queue:
        n = queue.popleft()
        for m in successors.get(n, ()):
            if m not in parent:
                parent[m] = n
                queue.append(m)
    return parent


def find_path(g: EGraph, src: str, dst: str) -> Optional[Path]:
    """Shortest nonempty path from src to dst, or None"""
    parent = _path_tree(g, src)
    if dst not in parent:
        return None
    steps = [dst]
    while parent[steps[-1]] != src:
        steps.append(parent[steps[-1]])
    return Path(src, tuple(reversed(steps)))


def is_closure(g_single: EGraph, g_plus: EGraph) -> bool:
    """g_plus equals the closure of g_single, decided without computing it.

    Every Plus edge needs a witnessing path (soundness); g_single must be
    contained in g_plus and g_plus must be transitive (completeness).
    """
    if not g_single <= g_plus:
        return False
    successors = g_plus.successors
    for a, b in g_plus.edges:
        for c in successors.get(b, ()):
            if (a, c) not in g_plus:
                return False
    for a, targets in successors.items():
        witnessed = _path_tree(g_single, a)
        if any(b not in witnessed for b in targets):
            return False
    return True


def extend_closure(closed: EGraph, single: EGraph, added: Iterable[Tuple[str, str]]) -> EGraph:
    """Closure of `single` given the closure of `single` minus `added`.

    Only sources that reach the tail of an added edge can gain pairs, so the
    search is rerun from those sources alone.
    """
    predecessors = closed.predecessors
    affected: Set[str] = set()
    for a, _ in added:
        affected.add(a)
        affected.update(predecessors.get(a, ()))
    if not affected:
        return closed
    graph = _digraph(single)
    kept = {(x, y) for x, y in closed.edges if x not in affected}
    kept.update((x, y) for x in affected for y in _reachable(graph, x))
    return egraph(kept)


def compute_closures(g: LRel, d: EDelta, s: str, incremental: bool = False) -> EDelta:
    """Bring (s, Plus) of g ⊕ d in line with the closure of (s, Single)"""
    single_key, plus_key = (s, Tag.SINGLE), (s, Tag.PLUS)
    touched = {single_key, plus_key} & (set(d.add.rel) | set(d.delete.rel))
    if not touched:
        return d

    single = applied_relation(g, d, single_key)
    current = applied_relation(g, d, plus_key)
    if incremental and plus_key not in touched and not d.delete.get(single_key):
        target = extend_closure(g.get(plus_key), single, d.add.get(single_key) - g.get(single_key))
    else:
        target = transitive_closure(single)

    plus, minus = lrel_diff(current, target)
    logger.debug(f"Closure of {s}: +{len(plus)} -{len(minus)}")
    return modify(d, s, Tag.PLUS, plus, minus)


def close_symbols(g: LRel, symbols: Optional[Iterable[str]] = None) -> LRel:
    """Recompute the Plus entries of the given symbols (default: all) from scratch"""
    syms = g.symbols() if symbols is None else set(symbols)
    for sym in sorted(syms):
        g = g.replace((sym, Tag.PLUS), transitive_closure(g.get((sym, Tag.SINGLE))))
    return g
