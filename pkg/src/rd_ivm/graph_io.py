"""Readers and writers for `.edges` graph files and `.upd` update batches.

Graph lines are `src<TAB>label<TAB>dst`, split on tabs only, so node names
may hold spaces. A label ending in `+` names the closure entry of that
symbol. Update lines prefix a graph line with `+` or
`-`. Blank lines and `#` comments are skipped in both formats.
"""

import logging
from typing import Dict, Iterator, List, Set, TextIO, Tuple

from .closure import close_symbols
from .errors import InputFormatError
from .graph import EDelta, LRel, closure_witness
from .syntax.terms import Tag, node, symbol

logger = logging.getLogger(__name__)

Key = Tuple[str, Tag]


def _records(path: str) -> Iterator[Tuple[int, List[str]]]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            for number, line in enumerate(f, start=1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                yield number, line.rstrip("\r\n").split("\t")
    except OSError as e:
        raise InputFormatError(f"cannot read file: {e.strerror}", path)


def _label(text: str, path: str, number: int) -> Key:
    tag = Tag.PLUS if text.endswith("+") else Tag.SINGLE
    name = text[:-1] if tag is Tag.PLUS else text
    try:
        return symbol(name), tag
    except ValueError:
        raise InputFormatError(f"invalid label {text!r}", path, number)


def _node(text: str, path: str, number: int) -> str:
    try:
        return node(text)
    except ValueError:
        raise InputFormatError("empty node name", path, number)


def parse_edges(path: str) -> LRel:
    """Read a graph file without touching its closure entries"""
    entries: Dict[Key, Set[Tuple[str, str]]] = {}
    for number, fields in _records(path):
        if len(fields) != 3:
            raise InputFormatError(f"expected 'src label dst', got {len(fields)} fields", path, number)
        src, label, dst = fields
        key = _label(label, path, number)
        entries.setdefault(key, set()).add((_node(src, path, number), _node(dst, path, number)))
    return LRel.build(entries)


def read_edges(path: str) -> LRel:
    """Read a graph file and make it well formed.

    Symbols listed without closure entries get them computed; symbols that
    carry closure entries must already be consistent.
    """
    g = parse_edges(path)
    stored = {sym for sym, tag in g.rel if tag is Tag.PLUS}
    witness = closure_witness(g, stored)
    if witness is not None:
        sym, (a, b) = witness
        raise InputFormatError(f"closure entries of '{sym}' are inconsistent at {a} -> {b}", path)
    missing = g.symbols() - stored
    if missing:
        g = close_symbols(g, missing)
    logger.info(f"Loaded {path}: {g}")
    return g


def read_update(path: str) -> EDelta:
    """Read one update batch; an edge may not be both added and deleted"""
    add: Dict[Key, Set[Tuple[str, str]]] = {}
    delete: Dict[Key, Set[Tuple[str, str]]] = {}
    seen: Dict[Tuple[Key, Tuple[str, str]], str] = {}
    for number, fields in _records(path):
        if len(fields) != 4 or fields[0] not in ("+", "-"):
            raise InputFormatError("expected '+|- src label dst'", path, number)
        sign, src, label, dst = fields
        key = _label(label, path, number)
        if key[1] is Tag.PLUS:
            raise InputFormatError(f"closure label {label!r} cannot be updated directly", path, number)
        edge = (_node(src, path, number), _node(dst, path, number))
        previous = seen.setdefault((key, edge), sign)
        if previous != sign:
            raise InputFormatError(f"edge {src} {label} {dst} is both added and deleted", path, number)
        (add if sign == "+" else delete).setdefault(key, set()).add(edge)
    return EDelta(LRel.build(add), LRel.build(delete))


def format_edges(g: LRel) -> List[str]:
    lines = []
    for sym, tag in g.keys():
        label = sym + ("+" if tag is Tag.PLUS else "")
        lines.extend(f"{a}\t{label}\t{b}" for a, b in g.get((sym, tag)))
    return sorted(lines)


def write_edges(g: LRel, out: TextIO) -> int:
    lines = format_edges(g)
    for line in lines:
        out.write(line + "\n")
    return len(lines)


def save_edges(g: LRel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        count = write_edges(g, f)
    logger.info(f"Wrote {count} edges to {path}")
