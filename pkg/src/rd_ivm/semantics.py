"""Satisfaction oracle by exhaustive grounding over the node universe.

Deliberately naive and independent of the matching machinery: it
enumerates every total assignment of clause variables to nodes, so it
refuses instances whose enumeration would exceed the configured budget.
"""

import itertools
import logging
from typing import FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple

from .errors import EnumerationBudgetError, StratificationError
from .graph import EDelta, EGraph, LRel, apply_update, egraph
from .syntax.normalize import bare_symbols
from .syntax.terms import CBody, Clause, Const, Eq, Literal, Program, Tag, Term

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**7

Grounding = Tuple[str, ...]


def _node(t: Term, eta: Optional[Grounding] = None) -> str:
    if isinstance(t, Const):
        return t.node
    if eta is None:
        raise ValueError(f"literal is not ground: V{t.index}")
    return eta[t.index]


def sat_literal(g: LRel, lit: Literal, eta: Optional[Grounding] = None) -> bool:
    """Truth of a ground literal, or of `lit` instantiated by eta"""
    a, b = _node(lit.atom.arg1, eta), _node(lit.atom.arg2, eta)
    if isinstance(lit.atom, Eq):
        return a == b
    return (a, b) in g.get((lit.atom.sym, lit.tag))


def sat_body(g: LRel, body: CBody, eta: Optional[Grounding] = None) -> bool:
    return all(sat_literal(g, lit, eta) for lit in body.lits)


def groundings(universe: Iterable[str], arity: int, budget: int = DEFAULT_BUDGET) -> Iterator[Grounding]:
    nodes = sorted(universe)
    required = len(nodes) ** arity
    if required > budget:
        raise EnumerationBudgetError(required, budget)
    return itertools.product(nodes, repeat=arity)


def clause_counterexample(
    g: LRel, s: str, c: Clause, budget: int = DEFAULT_BUDGET
) -> Optional[Grounding]:
    """First grounding satisfying some disjunct whose head fact is missing"""
    facts = g.get((s, Tag.SINGLE))
    for eta in groundings(g.universe, c.arity, budget):
        head = (_node(c.head[0], eta), _node(c.head[1], eta))
        if head in facts:
            continue
        if any(sat_body(g, body, eta) for body in c.bodies):
            return eta
    return None


def sat_clause(g: LRel, s: str, c: Clause, budget: int = DEFAULT_BUDGET) -> bool:
    return clause_counterexample(g, s, c, budget) is None


def program_counterexample(
    g: LRel, p: Program, syms: Optional[Iterable[str]] = None, budget: int = DEFAULT_BUDGET
) -> Optional[Tuple[str, Grounding]]:
    targets = p.intensional if syms is None else frozenset(syms) & p.intensional
    for sym in sorted(targets):
        eta = clause_counterexample(g, sym, p.clauses[sym], budget)
        if eta is not None:
            return sym, eta
    return None


def sat_program(
    g: LRel, p: Program, syms: Optional[Iterable[str]] = None, budget: int = DEFAULT_BUDGET
) -> bool:
    """Every clause of p indexed by syms (default: all views) holds in g"""
    return program_counterexample(g, p, syms, budget) is None


def sat_delta(
    g: LRel, d: EDelta, p: Program, syms: Optional[Iterable[str]] = None, budget: int = DEFAULT_BUDGET
) -> bool:
    return sat_program(apply_update(g, d), p, syms, budget)


def naive_closure(edges: FrozenSet[Tuple[str, str]]) -> FrozenSet[Tuple[str, str]]:
    """Closure by repeated composition until nothing new appears"""
    closed = set(edges)
    while True:
        step = {(a, d) for a, b in closed for c, d in closed if b == c} - closed
        if not step:
            return frozenset(closed)
        closed |= step


def _naive_order(p: Program) -> List[str]:
    done: Set[str] = set()
    order: List[str] = []
    pending = sorted(p.intensional)
    while pending:
        ready = [s for s in pending if bare_symbols(p.clauses[s]) <= (done | p.edb_symbols)]
        if not ready:
            raise StratificationError(pending)
        order.append(ready[0])
        done.add(ready[0])
        pending.remove(ready[0])
    return order


def brute_force_model(p: Program, g_edb: LRel, budget: int = DEFAULT_BUDGET) -> LRel:
    """Stratum-by-stratum model of p over g_edb by grounding enumeration"""
    g = g_edb.extend_universe(p.constants())
    for sym in _naive_order(p):
        clause = p.clauses[sym]
        facts = set()
        for eta in groundings(g.universe, clause.arity, budget):
            if any(sat_body(g, body, eta) for body in clause.bodies):
                facts.add((_node(clause.head[0], eta), _node(clause.head[1], eta)))
        g = g.replace((sym, Tag.SINGLE), egraph(facts))
        g = g.replace((sym, Tag.PLUS), EGraph(naive_closure(frozenset(facts))))
    return g
