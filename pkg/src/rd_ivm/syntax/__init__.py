from typing import Iterable

from ..errors import InputFormatError
from .compiler import compile_surface
from .normalize import (
    bare_symbols,
    check_safety,
    denormalize,
    format_program,
    normalize,
    safety_violations,
    symbols_of,
)
from .parser import SurfaceProgram, parse_program
from .terms import (
    CBody,
    Clause,
    Const,
    Eq,
    Literal,
    Program,
    RawClause,
    Rel,
    Tag,
    Var,
    eq,
    rel,
)


def load_program(text: str, declared_edb: Iterable[str] = ()) -> Program:
    """Parse, compile and normalize `.rd` source text"""
    return normalize(compile_surface(parse_program(text)), declared_edb)


def read_program(path: str, declared_edb: Iterable[str] = ()) -> Program:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise InputFormatError(f"cannot read program: {e.strerror}", path)
    return load_program(text, declared_edb)


__all__ = [
    "CBody",
    "Clause",
    "Const",
    "Eq",
    "Literal",
    "Program",
    "RawClause",
    "Rel",
    "SurfaceProgram",
    "Tag",
    "Var",
    "bare_symbols",
    "check_safety",
    "compile_surface",
    "denormalize",
    "eq",
    "format_program",
    "load_program",
    "normalize",
    "parse_program",
    "read_program",
    "rel",
    "safety_violations",
    "symbols_of",
]
