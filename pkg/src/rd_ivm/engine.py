"""Bottom-up evaluation and incremental maintenance of RD programs.

Views are computed one symbol at a time in stratification order. For each
symbol the engine either re-derives the whole relation (base operator) or
derives only the facts an additions-only update can add (delta operator),
then refreshes the closure entry of that symbol.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .closure import close_symbols, compute_closures
from .errors import DeltaOverlapError, HypothesisViolation, StratificationError, UpdateError
from .graph import (
    EMPTY,
    EMPTY_DELTA,
    EDelta,
    LRel,
    applied_relation,
    apply_update,
    egraph,
    lrel_diff,
    modify,
    wf_graph,
)
from .matching import Substitution, ground_head, match_atom, match_body, universe_scans, warn_universe_scan
from .semantics import program_counterexample
from .settings import EngineSettings
from .syntax.normalize import bare_symbols, symbols_of
from .syntax.terms import CBody, Clause, Literal, Program, Tag

logger = logging.getLogger(__name__)

Key = Tuple[str, Tag]
Edge = Tuple[str, str]

BASE_FIRST = "base_first"
FULL_FIRST = "full_first"


class MaskTag(str, Enum):
    BASE = "B"
    DELTA = "D"
    FULL = "F"


@dataclass(frozen=True)
class MaskedBody:
    """One row of the diagonal factoring of a body.

    Exactly one relational literal is tagged Delta. The relational literals
    on one side of it are all Base and on the other side all Full; equality
    literals are always Full.
    """

    lits: Tuple[Tuple[MaskTag, Literal], ...]

    def __post_init__(self):
        rel_tags = [m for m, lit in self.lits if lit.is_rel]
        if rel_tags.count(MaskTag.DELTA) != 1:
            raise ValueError("a mask row needs exactly one Delta literal")
        if any(m is not MaskTag.FULL for m, lit in self.lits if not lit.is_rel):
            raise ValueError("equality literals must be tagged Full")
        pivot = rel_tags.index(MaskTag.DELTA)
        before, after = set(rel_tags[:pivot]), set(rel_tags[pivot + 1:])
        base_first = before <= {MaskTag.BASE} and after <= {MaskTag.FULL}
        full_first = before <= {MaskTag.FULL} and after <= {MaskTag.BASE}
        if not (base_first or full_first):
            raise ValueError(f"not a diagonal mask row: {self}")

    @property
    def delta_literal(self) -> Literal:
        return next(lit for m, lit in self.lits if m is MaskTag.DELTA)

    def __str__(self) -> str:
        return "[" + ",".join(m.value for m, lit in self.lits if lit.is_rel) + "]"


@dataclass
class EngineStats:
    base_dispatches: int = 0
    delta_dispatches: int = 0
    mask_rows: int = 0
    closures: int = 0
    hypothesis_checks: int = 0
    dispatch_log: List[Tuple[str, str]] = field(default_factory=list)

    def record(self, s: str, path: str) -> None:
        if path == "base":
            self.base_dispatches += 1
        else:
            self.delta_dispatches += 1
        self.dispatch_log.append((s, path))

    def reset(self) -> None:
        self.__init__()


@dataclass(frozen=True)
class EngineState:
    program: Program
    graph: LRel
    support: FrozenSet[str]
    delta: EDelta
    processed: FrozenSet[Key]
    todo: Tuple[str, ...]


def stratify(p: Program) -> List[str]:
    """Views ordered so every body symbol is extensional or strictly earlier.

    Ties are broken by symbol name.
    """
    deps = nx.DiGraph()
    deps.add_nodes_from(p.intensional)
    for s, clause in p.clauses.items():
        deps.add_edges_from((dep, s) for dep in bare_symbols(clause) if dep in p.clauses)
    try:
        return list(nx.lexicographical_topological_sort(deps))
    except nx.NetworkXUnfeasible:
        cycle = [u for u, _ in nx.find_cycle(deps)]
        raise StratificationError(cycle)


def well_formed_slice(p: Program, syms: Iterable[str]) -> bool:
    members = set(syms)
    return all(bare_symbols(p.clauses[s]) <= members for s in members if s in p.clauses)


def body_mask(body: CBody, orientation: str = BASE_FIRST) -> List[MaskedBody]:
    """Diagonal rows of body, one per relational literal.

    base_first gives [D,F,F], [B,D,F], [B,B,D]; full_first mirrors it to
    [D,B,B], [F,D,B], [F,F,D]. A body without relational literals has no rows.
    """
    if orientation == BASE_FIRST:
        before, after = MaskTag.BASE, MaskTag.FULL
    elif orientation == FULL_FIRST:
        before, after = MaskTag.FULL, MaskTag.BASE
    else:
        raise ValueError(f"unknown mask orientation: {orientation!r}")

    rows = []
    for pivot, lit in enumerate(body.lits):
        if not lit.is_rel:
            continue
        tags = []
        for i, other in enumerate(body.lits):
            if not other.is_rel:
                tags.append(MaskTag.FULL)
            elif i < pivot:
                tags.append(before)
            elif i == pivot:
                tags.append(MaskTag.DELTA)
            else:
                tags.append(after)
        rows.append(MaskedBody(tuple(zip(tags, body.lits))))
    return rows


def match_delta_atom(
    g: LRel,
    d: EDelta,
    m: MaskTag,
    lit: Literal,
    s: Substitution,
    universe: Iterable[str] = (),
) -> Set[Substitution]:
    """Match lit over g (Base), over the insertions of d (Delta), or both (Full)"""
    if not lit.is_rel:
        return match_atom(EMPTY, lit.atom, s, universe)
    found: Set[Substitution] = set()
    if m in (MaskTag.BASE, MaskTag.FULL):
        found |= match_atom(g.get(lit.key), lit.atom, s)
    if m in (MaskTag.DELTA, MaskTag.FULL):
        found |= match_atom(d.add.get(lit.key), lit.atom, s)
    return found


def match_delta_body(
    g: LRel,
    d: EDelta,
    mb: MaskedBody,
    arity: Optional[int] = None,
    universe: Optional[Iterable[str]] = None,
) -> Set[Substitution]:
    body = CBody(tuple(lit for _, lit in mb.lits))
    width = arity if arity is not None else max(body.variables(), default=1) + 1
    nodes = sorted((g.universe | d.universe) if universe is None else universe)
    warn_universe_scan(body)

    subs: Set[Substitution] = {(None,) * width}
    for m, lit in mb.lits:
        subs = {ext for s in subs for ext in match_delta_atom(g, d, m, lit, s, nodes)}
        if not subs:
            break
    return subs


def fwd_or_clause_base(
    g: LRel, d: EDelta, s: str, c: Clause, applied: Optional[LRel] = None
) -> EDelta:
    """Re-derive s from scratch over g ⊕ d and rewrite its relation to the result"""
    if applied is None:
        applied = apply_update(g, d)
    facts = set()
    for body in c.bodies:
        facts.update(ground_head(sigma, c.head) for sigma in match_body(applied, body, c.arity))
    plus, minus = lrel_diff(applied.get((s, Tag.SINGLE)), egraph(facts))
    return modify(d, s, Tag.SINGLE, plus, minus)


def delta_row_heads(
    g: LRel, d: EDelta, c: Clause, orientation: str = BASE_FIRST
) -> List[Set[Edge]]:
    """Head facts derived by each mask row of each body, in order"""
    universe = sorted(g.universe | d.universe)
    return [
        {ground_head(sigma, c.head) for sigma in match_delta_body(g, d, row, c.arity, universe)}
        for body in c.bodies
        for row in body_mask(body, orientation)
    ]


def fwd_or_clause_delta(
    g: LRel,
    d: EDelta,
    s: str,
    c: Clause,
    orientation: str = BASE_FIRST,
    applied: Optional[LRel] = None,
    stats: Optional[EngineStats] = None,
) -> EDelta:
    """Add the facts of s that the insertions of d make derivable"""
    if applied is None:
        applied = apply_update(g, d)
    universe = sorted(applied.universe)
    facts = set()
    for body in c.bodies:
        rows = body_mask(body, orientation)
        if not rows:
            subs = match_body(applied, body, c.arity, universe)
        else:
            subs = set()
            for row in rows:
                subs |= match_delta_body(g, d, row, c.arity, universe)
            if stats is not None:
                stats.mask_rows += len(rows)
        facts.update(ground_head(sigma, c.head) for sigma in subs)
    new_facts = egraph(facts) - applied.get((s, Tag.SINGLE))
    return modify(d, s, Tag.SINGLE, new_facts, EMPTY)


def base_fallback_reason(g: LRel, support: Iterable[str], d: EDelta, s: str, c: Clause) -> Optional[str]:
    """Why s must be re-derived from scratch, or None if the delta operator applies"""
    if s not in support:
        return "not supported"
    if not d.is_additive(symbols_of(c)):
        return "deletions in body"
    if not d.universe <= g.universe and any(universe_scans(b) for b in c.bodies):
        return "universe grew under an equality scan"
    return None


def _violation(hypothesis: str, detail: str) -> HypothesisViolation:
    logger.error(f"Hypothesis {hypothesis} failed: {detail}")
    return HypothesisViolation(hypothesis, detail)


class Engine:
    """Maintenance engine for one program.

    The program is stratified once at construction. `stats` accumulates
    dispatch counters across calls until reset.
    """

    def __init__(self, program: Program, settings: Optional[EngineSettings] = None):
        self.program = program
        self.settings = settings or EngineSettings()
        self.order = stratify(program)
        self.stats = EngineStats()

    def extensional_keys(self, *graphs) -> Set[Key]:
        syms = set(self.program.edb_symbols)
        for g in graphs:
            syms |= g.symbols()
        syms -= self.program.intensional
        return {(sym, tag) for sym in syms for tag in Tag}

    def fwd_or_clause(
        self,
        g: LRel,
        support: Iterable[str],
        d: EDelta,
        s: str,
        c: Clause,
        applied: Optional[LRel] = None,
    ) -> EDelta:
        reason = base_fallback_reason(g, support, d, s, c)
        if reason is not None:
            logger.debug(f"{s}: base operator ({reason})")
            self.stats.record(s, "base")
            return fwd_or_clause_base(g, d, s, c, applied)
        logger.debug(f"{s}: delta operator")
        self.stats.record(s, "delta")
        return fwd_or_clause_delta(
            g, d, s, c, self.settings.mask_orientation, applied, self.stats
        )

    def fwd_program(
        self,
        g: LRel,
        support: Iterable[str],
        d: EDelta,
        processed: Iterable[Key],
        todo: Sequence[str],
    ) -> EDelta:
        """Evaluate every symbol of todo in order, returning the output update"""
        support = frozenset(support)
        done = set(processed)
        todo = tuple(todo)
        debug = self.settings.debug_hypotheses
        if debug:
            self.check_support(g, support)

        applied = apply_update(g, d)
        for i, s in enumerate(todo):
            clause = self.program.clauses[s]
            if debug:
                self.check_state(EngineState(self.program, g, support, d, frozenset(done), todo[i:]))
                self.check_stratified(s, clause, done)

            d_clause = self.fwd_or_clause(g, support, d, s, clause, applied)
            d_next = compute_closures(g, d_clause, s, self.settings.incremental_closure)
            self.stats.closures += 1
            done |= {(s, Tag.SINGLE), (s, Tag.PLUS)}
            for key in ((s, Tag.SINGLE), (s, Tag.PLUS)):
                applied = applied.replace(key, applied_relation(g, d_next, key))

            if debug:
                self.check_step(s, d, d_next, applied, done)
            d = d_next
        return d

    def materialize(self, g: LRel) -> LRel:
        """Compute every view from scratch over the extensional graph g"""
        p = self.program
        g0 = g.extend_universe(p.constants())
        unclosed = [
            sym for sym in sorted(g0.symbols() - p.intensional)
            if g0.get((sym, Tag.SINGLE)) and not g0.get((sym, Tag.PLUS))
        ]
        if unclosed:
            logger.info(f"Computing missing closures for {unclosed}")
            g0 = close_symbols(g0, unclosed)

        d = self.fwd_program(g0, p.edb_symbols, EMPTY_DELTA, self.extensional_keys(g0), self.order)
        result = apply_update(g0, d)
        logger.info(f"Materialized {len(self.order)} views: {result}")
        return result

    def maintain(self, g: LRel, support: Iterable[str], d: EDelta) -> EDelta:
        """Output update bringing every view of a materialized g in line with g ⊕ d"""
        p = self.program
        views = sorted(d.symbols() & p.intensional)
        if views:
            raise UpdateError(f"updates may only touch extensional symbols, got views {views}")

        g0 = g.extend_universe(p.constants())
        for sym in sorted(d.symbols()):
            d = compute_closures(g0, d, sym, self.settings.incremental_closure)

        out = self.fwd_program(g0, support, d, self.extensional_keys(g0, d.add, d.delete), self.order)
        logger.info(
            f"Maintained {len(self.order)} views: "
            f"{self.stats.delta_dispatches} delta / {self.stats.base_dispatches} base dispatches so far"
        )
        return out

    # Executable hypotheses, checked only with debug_hypotheses on.

    def check_support(self, g: LRel, support: FrozenSet[str]) -> None:
        self.stats.hypothesis_checks += 1
        found = program_counterexample(g, self.program, support, self.settings.enum_budget)
        if found is not None:
            raise _violation("H1", f"input graph does not satisfy {found[0]} under {found[1]}")

    def check_state(self, state: EngineState) -> None:
        p = state.program
        self.stats.hypothesis_checks += 1
        processed_syms = {sym for sym, _ in state.processed}

        if not well_formed_slice(p, processed_syms):
            raise _violation("H2", f"processed symbols {sorted(processed_syms)} are not closed")
        stray = symbols_of(state.delta) - state.processed
        if stray:
            raise _violation("H3", f"update mentions unprocessed keys {sorted((s, t.value) for s, t in stray)}")

        pending = list(state.todo)
        if set(pending) & processed_syms:
            raise _violation("H4", f"symbols both processed and pending: {sorted(set(pending) & processed_syms)}")
        missing = p.intensional - processed_syms - set(pending)
        if missing:
            raise _violation("H4", f"views neither processed nor pending: {sorted(missing)}")
        for i, sym in enumerate(pending):
            early = bare_symbols(p.clauses[sym]) - processed_syms - set(pending[:i])
            if early:
                raise _violation("H4", f"{sym} is scheduled before {sorted(early)}")

        found = program_counterexample(
            apply_update(state.graph, state.delta), p, processed_syms, self.settings.enum_budget
        )
        if found is not None:
            raise _violation("H5", f"current model violates {found[0]} under {found[1]}")

    def check_stratified(self, s: str, clause: Clause, done: Set[Key]) -> None:
        outside = symbols_of(clause) - done
        if outside:
            raise _violation("STRATIFIED", f"{s} reads unprocessed keys {sorted((x, t.value) for x, t in outside)}")

    def check_step(self, s: str, before: EDelta, after: EDelta, applied: LRel, done: Set[Key]) -> None:
        self.stats.hypothesis_checks += 1
        try:
            EDelta(after.add, after.delete)
        except DeltaOverlapError as e:
            raise _violation("DISJOINT", str(e))
        allowed = symbols_of(before) | {(s, Tag.SINGLE), (s, Tag.PLUS)}
        extra = symbols_of(after) - allowed
        if extra:
            raise _violation("SYMBOLS", f"{s} wrote to {sorted((x, t.value) for x, t in extra)}")
        if not wf_graph(applied.restrict({sym for sym, _ in done})):
            raise _violation("WF", f"closure entries are stale after evaluating {s}")


def fwd_or_clause(
    g: LRel,
    support: Iterable[str],
    d: EDelta,
    s: str,
    c: Clause,
    settings: Optional[EngineSettings] = None,
) -> EDelta:
    settings = settings or EngineSettings()
    if base_fallback_reason(g, support, d, s, c) is not None:
        return fwd_or_clause_base(g, d, s, c)
    return fwd_or_clause_delta(g, d, s, c, settings.mask_orientation)


def fwd_program(
    p: Program,
    g: LRel,
    support: Iterable[str],
    d: EDelta,
    processed: Iterable[Key],
    todo: Sequence[str],
    settings: Optional[EngineSettings] = None,
) -> EDelta:
    return Engine(p, settings).fwd_program(g, support, d, processed, todo)


def materialize(p: Program, g: LRel, settings: Optional[EngineSettings] = None) -> LRel:
    return Engine(p, settings).materialize(g)


def maintain(
    p: Program, g: LRel, support: Iterable[str], d: EDelta, settings: Optional[EngineSettings] = None
) -> EDelta:
    return Engine(p, settings).maintain(g, support, d)
