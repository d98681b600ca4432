"""Clause completion, safety checking and symbol extraction."""

import logging
from functools import singledispatch
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple, Union

from ..errors import NormalizationError, SafetyError
from .terms import CBody, Clause, Const, Eq, Literal, Program, RawClause, Rel, Tag, Term, Var, eq

logger = logging.getLogger(__name__)

Key = Tuple[str, Tag]


def complete_disjunct(raw: RawClause) -> Tuple[CBody, int]:
    """Rewrite one raw clause to the canonical head (V0, V1).

    Head constants and a repeated head variable turn into equality literals
    placed before the source body; the remaining variables are numbered from
    2 in order of first occurrence. Returns the body and its variable count.
    """
    mapping: Dict[int, int] = {}
    prefix: List[Literal] = []
    for slot, term in enumerate(raw.args):
        if isinstance(term, Const):
            prefix.append(eq(term, Var(slot)))
        elif term.index in mapping:
            prefix.append(eq(Var(mapping[term.index]), Var(slot)))
        else:
            mapping[term.index] = slot

    counter = [2]

    def rename(term: Term) -> Term:
        if isinstance(term, Const):
            return term
        if term.index not in mapping:
            mapping[term.index] = counter[0]
            counter[0] += 1
        return Var(mapping[term.index])

    body = list(prefix)
    for lit in raw.body:
        atom = lit.atom
        if isinstance(atom, Rel):
            body.append(Literal(Rel(atom.sym, rename(atom.arg1), rename(atom.arg2)), lit.tag))
        else:
            body.append(Literal(Eq(rename(atom.arg1), rename(atom.arg2))))
    return CBody(tuple(body)), counter[0]


def normalize(raw: Sequence[RawClause], declared_edb: Iterable[str] = ()) -> Program:
    """Group raw clauses by head symbol into one completed clause each.

    Disjunct order follows source order. Every symbol used in a body without
    a clause of its own is extensional, as is every symbol in `declared_edb`.
    """
    declared = frozenset(declared_edb)
    grouped: Dict[str, List[CBody]] = {}
    arities: Dict[str, int] = {}
    for clause in raw:
        if clause.sym in declared:
            raise NormalizationError(
                f"symbol redeclared: '{clause.sym}' is extensional but has a clause (line {clause.line})"
            )
        body, arity = complete_disjunct(clause)
        grouped.setdefault(clause.sym, []).append(body)
        arities[clause.sym] = max(arities.get(clause.sym, 2), arity)

    clauses = {
        sym: Clause((Var(0), Var(1)), tuple(bodies), arities[sym])
        for sym, bodies in grouped.items()
    }
    used = {sym for clause in clauses.values() for sym in bare_symbols(clause)}
    program = Program(clauses, frozenset((used - set(clauses)) | declared))
    check_safety(program)
    logger.debug(
        f"Normalized {len(raw)} clauses into {len(clauses)} views over "
        f"{len(program.edb_symbols)} extensional symbols"
    )
    return program


def safety_violations(p: Program) -> List[SafetyError]:
    violations = []
    for sym, clause in p.clauses.items():
        for index, body in enumerate(clause.bodies):
            found = body.variables()
            for head_var in (0, 1):
                if head_var not in found:
                    violations.append(SafetyError(sym, index, head_var))
    return violations


def check_safety(p: Program) -> None:
    """Raise SafetyError for the first disjunct missing a head variable"""
    violations = safety_violations(p)
    if violations:
        raise violations[0]


@singledispatch
def symbols_of(x) -> FrozenSet[Key]:
    """(symbol, tag) pairs of the relational literals in x"""
    raise TypeError(f"symbols_of is not defined for {type(x).__name__}")


@symbols_of.register
def _(x: CBody) -> FrozenSet[Key]:
    return frozenset(lit.key for lit in x.lits if lit.is_rel)


@symbols_of.register
def _(x: Clause) -> FrozenSet[Key]:
    return frozenset().union(*(symbols_of(b) for b in x.bodies))


@symbols_of.register
def _(x: Program) -> FrozenSet[Key]:
    return frozenset().union(*(symbols_of(c) for c in x.clauses.values()))


def bare_symbols(x) -> FrozenSet[str]:
    return frozenset(sym for sym, _ in symbols_of(x))


def denormalize(p: Program) -> List[RawClause]:
    """Flatten a program back into one raw clause per disjunct"""
    return [
        RawClause(sym, clause.head, body.lits)
        for sym, clause in p.clauses.items()
        for body in clause.bodies
    ]


def format_program(p: Union[Program, Sequence[RawClause]]) -> str:
    """Core-syntax text that parses back to the same program"""
    raw = denormalize(p) if isinstance(p, Program) else p
    lines = []
    for clause in raw:
        head = f"{clause.sym}({clause.args[0]}, {clause.args[1]})"
        if clause.body:
            lines.append(f"{head} :- {', '.join(str(lit) for lit in clause.body)}.")
        else:
            lines.append(f"{head}.")
    return "\n".join(lines) + ("\n" if lines else "")
