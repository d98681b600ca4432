"""Core Regular Datalog terms, atoms, literals, clauses and programs.

Everything here is immutable. Variables are ordinal indices local to a
clause; after normalization the head of every clause is (V0, V1).
"""

import re
import sys
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Iterator, Optional, Tuple, Union

SYMBOL_PATTERN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def symbol(name: str) -> str:
    """Validate and intern a relation symbol name"""
    if not isinstance(name, str) or not SYMBOL_PATTERN.match(name):
        raise ValueError(f"invalid symbol name: {name!r}")
    return sys.intern(name)


def node(name: str) -> str:
    if not name:
        raise ValueError("node names must be nonempty")
    return sys.intern(name)


class Tag(str, Enum):
    SINGLE = "single"
    PLUS = "plus"


@dataclass(frozen=True, order=True)
class Const:
    node: str

    def __str__(self) -> str:
        return format_node(self.node)


@dataclass(frozen=True, order=True)
class Var:
    index: int

    def __str__(self) -> str:
        return f"V{self.index}"


Term = Union[Const, Var]


@dataclass(frozen=True)
class Rel:
    sym: str
    arg1: Term
    arg2: Term


@dataclass(frozen=True)
class Eq:
    arg1: Term
    arg2: Term


Atom = Union[Rel, Eq]


@dataclass(frozen=True)
class Literal:
    atom: Atom
    tag: Tag = Tag.SINGLE

    def __post_init__(self):
        if isinstance(self.atom, Eq) and self.tag is not Tag.SINGLE:
            raise ValueError("equality literals cannot carry the closure tag")

    @property
    def is_rel(self) -> bool:
        return isinstance(self.atom, Rel)

    @property
    def key(self) -> Optional[Tuple[str, Tag]]:
        """(symbol, tag) of a relational literal, None for equalities"""
        if isinstance(self.atom, Rel):
            return (self.atom.sym, self.tag)
        return None

    def terms(self) -> Tuple[Term, Term]:
        return (self.atom.arg1, self.atom.arg2)

    def __str__(self) -> str:
        atom = self.atom
        if isinstance(atom, Eq):
            return f"{atom.arg1} = {atom.arg2}"
        suffix = "+" if self.tag is Tag.PLUS else ""
        return f"{atom.sym}{suffix}({atom.arg1}, {atom.arg2})"


def rel(sym: str, arg1: Term, arg2: Term, tag: Tag = Tag.SINGLE) -> Literal:
    return Literal(Rel(sym, arg1, arg2), tag)


def eq(arg1: Term, arg2: Term) -> Literal:
    return Literal(Eq(arg1, arg2))


@dataclass(frozen=True)
class CBody:
    lits: Tuple[Literal, ...] = ()

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.lits)

    def __len__(self) -> int:
        return len(self.lits)

    def variables(self) -> FrozenSet[int]:
        return frozenset(
            t.index for lit in self.lits for t in lit.terms() if isinstance(t, Var)
        )

    def __str__(self) -> str:
        return ", ".join(str(lit) for lit in self.lits)


@dataclass(frozen=True)
class Clause:
    head: Tuple[Term, Term]
    bodies: Tuple[CBody, ...]
    arity: int

    def variables(self) -> FrozenSet[int]:
        head_vars = {t.index for t in self.head if isinstance(t, Var)}
        return frozenset(head_vars).union(*(b.variables() for b in self.bodies))


@dataclass(frozen=True)
class RawClause:
    """A core-form clause before completion: one head, one conjunctive body."""

    sym: str
    args: Tuple[Term, Term]
    body: Tuple[Literal, ...] = ()
    line: int = 0


@dataclass(frozen=True)
class Program:
    clauses: Dict[str, Clause] = field(default_factory=dict)
    edb_symbols: FrozenSet[str] = frozenset()

    @property
    def intensional(self) -> FrozenSet[str]:
        return frozenset(self.clauses)

    @property
    def symbols(self) -> FrozenSet[str]:
        return self.intensional | self.edb_symbols

    def __contains__(self, sym: str) -> bool:
        return sym in self.clauses

    def __getitem__(self, sym: str) -> Clause:
        return self.clauses[sym]

    def constants(self) -> FrozenSet[str]:
        found = set()
        for clause in self.clauses.values():
            for body in clause.bodies:
                for lit in body:
                    found.update(t.node for t in lit.terms() if isinstance(t, Const))
        return frozenset(found)

    def slice(self, syms: Iterable[str]) -> "Program":
        keep = set(syms)
        return Program(
            {s: c for s, c in self.clauses.items() if s in keep}, self.edb_symbols
        )


_BARE_CONSTANT = re.compile(r"(?:[a-z][A-Za-z0-9_]*|[0-9]+)\Z")


def format_node(name: str) -> str:
    """Render a node so the parser reads it back as a constant"""
    if _BARE_CONSTANT.match(name):
        return name
    if "'" not in name:
        return f"'{name}'"
    return f'"{name}"'
