"""Surface syntax of `.rd` program files.

    clause  := atom [":-" item ("," item)*] "."
    item    := term "=" term | path "(" term "," term ")"
    path    := primary ("+" | "-" | "*")*
    primary := symbol | "(" alt ")"
    alt     := seq (("|" | "+") seq)*
    seq     := path ("." path)*

Inside parentheses a `+` followed by a symbol or "(" is alternation, the
`(r + s)` spelling; everywhere else it is the postfix closure operator.
Comments start with `%` and run to the end of the line.
"""

import logging
import re
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

from ..errors import RDSyntaxError

logger = logging.getLogger(__name__)

TOKEN_RE = re.compile(
    r"""
    (?P<newline>\n)
    |(?P<ws>[ \t\r]+)
    |(?P<comment>%[^\n]*)
    |(?P<implies>:-)
    |(?P<quoted>'[^'\n]*'|"[^"\n]*")
    |(?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    |(?P<number>[0-9]+)
    |(?P<punct>[(),.|+\-*=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        if m is None:
            raise RDSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "newline":
            line, line_start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# Surface AST


@dataclass(frozen=True)
class SVar:
    name: str


@dataclass(frozen=True)
class SConst:
    name: str


STerm = Union[SVar, SConst]


@dataclass(frozen=True)
class PSym:
    name: str


@dataclass(frozen=True)
class PInv:
    path: "Path"


@dataclass(frozen=True)
class PPlus:
    path: "Path"


@dataclass(frozen=True)
class PStar:
    path: "Path"


@dataclass(frozen=True)
class PAlt:
    options: Tuple["Path", ...]


@dataclass(frozen=True)
class PSeq:
    parts: Tuple["Path", ...]


Path = Union[PSym, PInv, PPlus, PStar, PAlt, PSeq]


@dataclass(frozen=True)
class SPathAtom:
    path: Path
    arg1: STerm
    arg2: STerm
    line: int
    col: int


@dataclass(frozen=True)
class SEqAtom:
    arg1: STerm
    arg2: STerm
    line: int
    col: int


SItem = Union[SPathAtom, SEqAtom]


@dataclass(frozen=True)
class SClause:
    sym: str
    args: Tuple[STerm, STerm]
    body: Tuple[SItem, ...]
    line: int
    col: int


@dataclass(frozen=True)
class SurfaceProgram:
    clauses: Tuple[SClause, ...] = ()

    def __len__(self) -> int:
        return len(self.clauses)


def _closable(path: Path) -> bool:
    while isinstance(path, PInv):
        path = path.path
    return isinstance(path, PSym)


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def error(self, message: str, token: Optional[Token] = None) -> RDSyntaxError:
        token = token or self.current
        found = "end of input" if token.kind == "eof" else repr(token.value)
        return RDSyntaxError(f"{message}, found {found}", token.line, token.col)

    def at(self, value: str) -> bool:
        return self.current.kind == "punct" and self.current.value == value

    def expect(self, value: str, kind: str = "punct") -> Token:
        token = self.current
        if token.kind != kind or token.value != value:
            raise self.error(f"expected {value!r}")
        self.pos += 1
        return token

    def parse_program(self) -> SurfaceProgram:
        clauses = []
        while self.current.kind != "eof":
            clauses.append(self.parse_clause())
        return SurfaceProgram(tuple(clauses))

    def parse_clause(self) -> SClause:
        start = self.current
        if start.kind != "ident":
            raise self.error("expected a clause head")
        self.pos += 1
        args = self.parse_args()
        body: List[SItem] = []
        if self.current.kind == "implies":
            self.pos += 1
            body.append(self.parse_item())
            while self.at(","):
                self.pos += 1
                body.append(self.parse_item())
        self.expect(".")
        return SClause(start.value, args, tuple(body), start.line, start.col)

    def parse_args(self) -> Tuple[STerm, STerm]:
        self.expect("(")
        first = self.parse_term()
        self.expect(",")
        second = self.parse_term()
        self.expect(")")
        return (first, second)

    def parse_term(self) -> STerm:
        token = self.current
        if token.kind == "ident":
            self.pos += 1
            if token.value[0].isupper() or token.value[0] == "_":
                return SVar(token.value)
            return SConst(token.value)
        if token.kind == "quoted":
            self.pos += 1
            if len(token.value) == 2:
                raise self.error("empty quoted constant", token)
            return SConst(token.value[1:-1])
        if token.kind == "number":
            self.pos += 1
            return SConst(token.value)
        raise self.error("expected a term")

    def parse_item(self) -> SItem:
        token = self.current
        is_term = token.kind in ("quoted", "number") or (
            token.kind == "ident" and self.peek().kind == "punct" and self.peek().value == "="
        )
        if is_term:
            left = self.parse_term()
            self.expect("=")
            right = self.parse_term()
            return SEqAtom(left, right, token.line, token.col)
        path = self.parse_path(depth=0)
        arg1, arg2 = self.parse_args()
        return SPathAtom(path, arg1, arg2, token.line, token.col)

    def parse_path(self, depth: int) -> Path:
        token = self.current
        if token.kind == "ident":
            self.pos += 1
            path: Path = PSym(token.value)
        elif self.at("("):
            self.pos += 1
            path = self.parse_alt(depth + 1)
            self.expect(")")
        else:
            raise self.error("expected a symbol or '('")

        last_closure = None
        while self.current.kind == "punct" and self.current.value in "+-*":
            op = self.current
            if op.value == "+" and depth > 0 and self._starts_path(self.peek()):
                break
            if op.value in "+*":
                if last_closure is not None:
                    raise self.error(f"malformed operator '{last_closure}{op.value}'", op)
                if not _closable(path):
                    raise self.error("closure applies to a single symbol only", op)
                path = PPlus(path) if op.value == "+" else PStar(path)
                last_closure = op.value
            else:
                path = PInv(path)
            self.pos += 1
        return path

    @staticmethod
    def _starts_path(token: Token) -> bool:
        return token.kind == "ident" or (token.kind == "punct" and token.value == "(")

    def parse_alt(self, depth: int) -> Path:
        options = [self.parse_seq(depth)]
        while self.at("|") or self.at("+"):
            self.pos += 1
            options.append(self.parse_seq(depth))
        return options[0] if len(options) == 1 else PAlt(tuple(options))

    def parse_seq(self, depth: int) -> Path:
        parts = [self.parse_path(depth)]
        while self.at("."):
            self.pos += 1
            parts.append(self.parse_path(depth))
        return parts[0] if len(parts) == 1 else PSeq(tuple(parts))


def parse_program(text: str) -> SurfaceProgram:
    """Parse `.rd` text into a SurfaceProgram, keeping clause order"""
    program = Parser(text).parse_program()
    logger.debug(f"Parsed {len(program)} surface clauses")
    return program
