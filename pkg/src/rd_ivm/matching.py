"""Nested-loop matching of literals and conjunctive bodies.

A substitution is a tuple indexed by variable, with None for unbound
slots; its width is the arity of the clause being matched.
"""

import logging
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Set, Tuple

from .errors import UnboundVariableError
from .graph import EGraph, LRel
from .syntax.terms import CBody, Clause, Const, Eq, Literal, Rel, Term, Var

logger = logging.getLogger(__name__)

Substitution = Tuple[Optional[str], ...]
Grounding = Tuple[str, ...]


def empty_substitution(arity: int) -> Substitution:
    return (None,) * arity


def body_arity(body: CBody) -> int:
    return max(body.variables(), default=1) + 1


def resolve(t: Term, s: Substitution) -> Optional[str]:
    if isinstance(t, Const):
        return t.node
    return s[t.index]


def bind(s: Substitution, index: int, value: str) -> Substitution:
    return s[:index] + (value,) + s[index + 1:]


def _match_rel(edges: EGraph, t1: Term, t2: Term, s: Substitution) -> Set[Substitution]:
    a, b = resolve(t1, s), resolve(t2, s)
    if a is not None and b is not None:
        return {s} if (a, b) in edges else set()
    if a is not None:
        return {bind(s, t2.index, y) for y in edges.successors.get(a, ())}
    if b is not None:
        return {bind(s, t1.index, x) for x in edges.predecessors.get(b, ())}
    if t1.index == t2.index:
        return {bind(s, t1.index, x) for x, y in edges.edges if x == y}
    return {bind(bind(s, t1.index, x), t2.index, y) for x, y in edges.edges}


def _match_eq(t1: Term, t2: Term, s: Substitution, universe: Iterable[str]) -> Set[Substitution]:
    a, b = resolve(t1, s), resolve(t2, s)
    if a is not None and b is not None:
        return {s} if a == b else set()
    if a is not None:
        return {bind(s, t2.index, a)}
    if b is not None:
        return {bind(s, t1.index, b)}
    if t1.index == t2.index:
        return {bind(s, t1.index, v) for v in universe}
    return {bind(bind(s, t1.index, v), t2.index, v) for v in universe}


def match_atom(
    edges: EGraph, atom, s: Substitution, universe: Iterable[str] = ()
) -> Set[Substitution]:
    """Minimal extensions of s satisfying atom.

    For a Rel atom, `edges` is the relation the caller selected for its
    (symbol, tag); Eq atoms ignore it and, when both sides are unbound,
    range over `universe`.
    """
    if isinstance(atom, Rel):
        return _match_rel(edges, atom.arg1, atom.arg2, s)
    if isinstance(atom, Eq):
        return _match_eq(atom.arg1, atom.arg2, s, universe)
    raise TypeError(f"not an atom: {atom!r}")


def universe_scans(body: CBody) -> Tuple[int, ...]:
    """Positions of Eq literals reached with both sides unbound"""
    bound: Set[int] = set()
    scans = []
    for position, lit in enumerate(body.lits):
        terms = lit.terms()
        free = [t for t in terms if isinstance(t, Var) and t.index not in bound]
        if isinstance(lit.atom, Eq) and len(free) == sum(isinstance(t, Var) for t in terms) == 2:
            scans.append(position)
        bound.update(t.index for t in free)
    return tuple(scans)


@lru_cache(maxsize=1024)
def warn_universe_scan(body: CBody) -> None:
    positions = universe_scans(body)
    if positions:
        logger.warning(
            f"Equality literal(s) at {list(positions)} in body [{body}] bind two "
            f"fresh variables; matching enumerates the node universe"
        )


def match_literal(
    g: LRel, lit: Literal, s: Substitution, universe: Iterable[str]
) -> Set[Substitution]:
    if lit.is_rel:
        return match_atom(g.get(lit.key), lit.atom, s)
    return match_atom(EGraph(), lit.atom, s, universe)


def match_body(
    g: LRel,
    body: CBody,
    arity: Optional[int] = None,
    universe: Optional[Iterable[str]] = None,
) -> Set[Substitution]:
    """Left-to-right fold of match_literal starting from the empty substitution"""
    width = arity if arity is not None else body_arity(body)
    nodes = sorted(g.universe if universe is None else universe)
    warn_universe_scan(body)

    subs: Set[Substitution] = {empty_substitution(width)}
    for lit in body.lits:
        subs = {ext for s in subs for ext in match_literal(g, lit, s, nodes)}
        if not subs:
            break
    return subs


def ground_term(t: Term, s: Substitution) -> str:
    value = resolve(t, s)
    if value is None:
        raise UnboundVariableError(f"variable V{t.index} is unbound in {s}")
    return value


def ground_head(s: Substitution, head: Tuple[Term, Term]) -> Tuple[str, str]:
    return ground_term(head[0], s), ground_term(head[1], s)


def _ground(t: Term, eta: Sequence[str]) -> Term:
    return Const(eta[t.index]) if isinstance(t, Var) else t


def ground_literal(eta: Sequence[str], lit: Literal) -> Literal:
    atom = lit.atom
    if isinstance(atom, Rel):
        return Literal(Rel(atom.sym, _ground(atom.arg1, eta), _ground(atom.arg2, eta)), lit.tag)
    return Literal(Eq(_ground(atom.arg1, eta), _ground(atom.arg2, eta)))


def ground_clause(eta: Sequence[str], c: Clause) -> Clause:
    """Replace every variable of c by its node under eta"""
    if len(eta) < c.arity:
        raise ValueError(f"grounding covers {len(eta)} variables, clause has {c.arity}")
    head = (_ground(c.head[0], eta), _ground(c.head[1], eta))
    bodies = tuple(CBody(tuple(ground_literal(eta, lit) for lit in b.lits)) for b in c.bodies)
    return Clause(head, bodies, c.arity)
