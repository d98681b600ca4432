"""Regular Datalog evaluation with incremental view maintenance over labeled graphs."""

from .engine import Engine, fwd_or_clause, fwd_program, maintain, materialize, stratify
from .errors import RDError
from .graph import EDelta, EGraph, LRel, apply_update, egraph, modify, new_delta
from .semantics import brute_force_model, sat_program
from .settings import EngineSettings, configure_logging, load_engine_settings
from .syntax import Program, load_program, read_program

__version__ = "0.1.0"

__all__ = [
    "EDelta",
    "EGraph",
    "Engine",
    "EngineSettings",
    "LRel",
    "Program",
    "RDError",
    "apply_update",
    "brute_force_model",
    "configure_logging",
    "egraph",
    "fwd_or_clause",
    "fwd_program",
    "load_engine_settings",
    "load_program",
    "maintain",
    "materialize",
    "modify",
    "new_delta",
    "read_program",
    "sat_program",
    "stratify",
]
