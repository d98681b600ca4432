import itertools
import logging
from typing import Dict, List

from .parser import (
    PAlt,
    PInv,
    PPlus,
    PSeq,
    PStar,
    PSym,
    Path,
    SClause,
    SConst,
    SEqAtom,
    STerm,
    SurfaceProgram,
)
from .terms import Const, Literal, RawClause, Tag, Term, Var, eq, node, rel, symbol

logger = logging.getLogger(__name__)

Conjunct = List[Literal]


class _ClauseScope:
    """Variable numbering for one surface clause; `_` is always fresh."""

    def __init__(self):
        self.names: Dict[str, int] = {}
        self.next_index = 0

    def fresh(self) -> Var:
        var = Var(self.next_index)
        self.next_index += 1
        return var

    def term(self, t: STerm) -> Term:
        if isinstance(t, SConst):
            return Const(node(t.name))
        if t.name == "_":
            return self.fresh()
        if t.name not in self.names:
            self.names[t.name] = self.fresh().index
        return Var(self.names[t.name])


def expand_path(path: Path, t1: Term, t2: Term, scope: _ClauseScope) -> List[Conjunct]:
    """Alternatives (a disjunction of conjunctions) equivalent to path(t1, t2)."""
    if isinstance(path, PSym):
        return [[rel(symbol(path.name), t1, t2)]]
    if isinstance(path, PInv):
        return expand_path(path.path, t2, t1, scope)
    if isinstance(path, PPlus):
        return [
            [Literal(lit.atom, Tag.PLUS) for lit in conj]
            for conj in expand_path(path.path, t1, t2, scope)
        ]
    if isinstance(path, PStar):
        return [[eq(t1, t2)]] + expand_path(PPlus(path.path), t1, t2, scope)
    if isinstance(path, PAlt):
        return [conj for option in path.options for conj in expand_path(option, t1, t2, scope)]
    if isinstance(path, PSeq):
        points = [t1] + [scope.fresh() for _ in path.parts[1:]] + [t2]
        steps = [
            expand_path(part, points[i], points[i + 1], scope)
            for i, part in enumerate(path.parts)
        ]
        return [[lit for conj in combo for lit in conj] for combo in itertools.product(*steps)]
    raise TypeError(f"not a path expression: {path!r}")


def compile_clause(clause: SClause) -> List[RawClause]:
    scope = _ClauseScope()
    head = (scope.term(clause.args[0]), scope.term(clause.args[1]))
    alternatives: List[List[Conjunct]] = []
    for item in clause.body:
        t1, t2 = scope.term(item.arg1), scope.term(item.arg2)
        if isinstance(item, SEqAtom):
            alternatives.append([[eq(t1, t2)]])
        else:
            alternatives.append(expand_path(item.path, t1, t2, scope))

    sym = symbol(clause.sym)
    return [
        RawClause(sym, head, tuple(lit for conj in combo for lit in conj), clause.line)
        for combo in itertools.product(*alternatives)
    ]


def compile_surface(sp: SurfaceProgram) -> List[RawClause]:
    """Lower inverse, star, alternation and concatenation to core clauses.

    Each surface clause yields one raw clause per disjunct of its expansion,
    in source order; a body with k starred atoms yields 2**k clauses.
    """
    raw: List[RawClause] = []
    for clause in sp.clauses:
        raw.extend(compile_clause(clause))
    logger.debug(f"Compiled {len(sp.clauses)} surface clauses into {len(raw)} core clauses")
    return raw
