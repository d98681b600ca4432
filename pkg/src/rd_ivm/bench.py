"""Synthetic workloads and the full-versus-incremental timing harness.

An instance is one random extensional graph plus a workload of random
stratified programs over its symbols. For every program and every support
fraction, a share of the symbols is removed from the graph and then put back
as a single insertion batch; the harness times recomputing every view from
scratch (FVM) against maintaining the views materialized over the reduced
graph (IVM), and checks that both give the same relations.
"""

import csv
import logging
import math
import time
from typing import Callable, Dict, Iterable, List, Literal, Optional, Sequence, TextIO, Tuple, TypeVar, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator

from .closure import close_symbols
from .engine import Engine
from .errors import BenchmarkMismatch, InputFormatError
from .graph import EMPTY, EDelta, LRel, apply_update
from .settings import EngineSettings, find_config, load_yaml, preset_names
from .syntax.normalize import normalize
from .syntax.terms import Const, Literal as Lit, Program, RawClause, Tag, Var, eq, node, rel, symbol

logger = logging.getLogger(__name__)

T = TypeVar("T")

CSV_HEADER = [
    "query",
    "rho_supp",
    "rho_pct",
    "fvm_ms",
    "ivm_ms",
    "time_gain_ms",
    "ratio_gain_pct",
    "outputs_equal",
]

TEMPLATES = ("chain", "cycle", "star", "eq", "constant")


class BenchConfig(BaseModel):
    """One benchmark preset; see config/bench.yaml"""

    node_count: int = Field(ge=1)
    symbol_count: int = Field(ge=1)
    density: float = Field(gt=0)
    workload_size: int = Field(default=10, ge=1)
    rho_supp: List[float] = Field(default_factory=lambda: [0.05, 0.1, 0.15, 0.2, 0.25])
    seed: int = Field(default=0, ge=0, lt=2**64)
    preset: Literal["uniform", "zipf"] = "uniform"
    zipf_exponent: float = Field(default=1.2, gt=1.0)
    repetitions: int = Field(default=5, ge=1)
    warmup: int = Field(default=1, ge=0)
    view_count: int = Field(default=3, ge=1)
    max_literals: int = Field(default=3, ge=1)

    @field_validator("rho_supp")
    @classmethod
    def check_fractions(cls, values: List[float]) -> List[float]:
        if not values:
            raise ValueError("rho_supp needs at least one fraction")
        for value in values:
            if not 0.0 < value <= 1.0:
                raise ValueError(f"rho_supp fraction {value} is outside (0, 1]")
        return values


class BenchRow(BaseModel):
    query: str
    rho_supp: float
    rho_pct: float
    fvm_ms: float
    ivm_ms: float
    time_gain_ms: float
    ratio_gain_pct: float
    outputs_equal: bool


class BenchReport(BaseModel):
    rows: List[BenchRow] = Field(default_factory=list)

    @property
    def all_equal(self) -> bool:
        return all(row.outputs_equal for row in self.rows)

    def median_ratio_gain(self) -> float:
        if not self.rows:
            return 0.0
        return float(np.median([row.ratio_gain_pct for row in self.rows]))

    def median_time_gain(self) -> float:
        if not self.rows:
            return 0.0
        return float(np.median([row.time_gain_ms for row in self.rows]))

    def by_rho(self) -> Dict[float, List[BenchRow]]:
        grouped: Dict[float, List[BenchRow]] = {}
        for row in self.rows:
            grouped.setdefault(row.rho_supp, []).append(row)
        return grouped


def load_bench_config(
    path: Optional[str] = None, preset: Optional[str] = None, **overrides
) -> BenchConfig:
    """Read one preset of bench.yaml (or `path`), applying non-None overrides"""
    config_path = path or find_config("bench.yaml")
    data = load_yaml(config_path)
    presets = data.get("presets")
    if presets:
        name = preset or data.get("default")
        if name not in presets:
            raise InputFormatError(
                f"unknown benchmark preset {name!r}, choose from {preset_names(data)}", config_path
            )
        values = dict(presets[name])
    else:
        values = dict(data)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return BenchConfig(**values)


def time_gain(fvm_ms: float, ivm_ms: float) -> float:
    return fvm_ms - ivm_ms


def ratio_gain(fvm_ms: float, ivm_ms: float) -> float:
    """Percentage of the full recomputation time saved by maintenance"""
    if fvm_ms <= 0:
        return 0.0
    return 100.0 - 100.0 * ivm_ms / fvm_ms


# Generators


def node_names(count: int) -> List[str]:
    width = len(str(max(count - 1, 0)))
    return [node(f"n{str(i).zfill(width)}") for i in range(count)]


def symbol_names(count: int, prefix: str = "e") -> List[str]:
    return [symbol(f"{prefix}{i}") for i in range(count)]


def random_graph(
    rng: np.random.Generator,
    node_count: int,
    symbols: Sequence[str],
    density: float,
    preset: str = "uniform",
    zipf_exponent: float = 1.2,
) -> LRel:
    """Random extensional graph with closures, every node in the universe.

    About density * node_count edges are spread evenly over the symbols.
    `uniform` draws both endpoints uniformly; `zipf` draws sources from a
    zipf law over a random ranking of the nodes, so a few hubs carry most of
    the out-degree.
    """
    nodes = node_names(node_count)
    per_symbol = max(1, int(round(density * node_count / max(len(symbols), 1))))
    entries: Dict[Tuple[str, Tag], set] = {}
    for sym in symbols:
        if preset == "zipf":
            ranking = rng.permutation(node_count)
            ranks = np.minimum(rng.zipf(zipf_exponent, size=per_symbol), node_count) - 1
            sources = ranking[ranks]
        elif preset == "uniform":
            sources = rng.integers(0, node_count, size=per_symbol)
        else:
            raise ValueError(f"unknown graph preset: {preset!r}")
        targets = rng.integers(0, node_count, size=per_symbol)
        entries[(sym, Tag.SINGLE)] = {(nodes[a], nodes[b]) for a, b in zip(sources, targets)}
    return close_symbols(LRel.build(entries, nodes))


def _step(rng: np.random.Generator, sym: str, a, b, plus_rate: float) -> Lit:
    tag = Tag.PLUS if rng.random() < plus_rate else Tag.SINGLE
    if rng.random() < 0.3:
        a, b = b, a
    return rel(sym, a, b, tag)


def _path(
    rng: np.random.Generator, pick: Callable[[], str], length: int, start, end, fresh: int, plus_rate: float
) -> List[Lit]:
    points = [start] + [Var(fresh + i) for i in range(length - 1)] + [end]
    return [_step(rng, pick(), points[i], points[i + 1], plus_rate) for i in range(length)]


def _template_disjuncts(
    rng: np.random.Generator,
    template: str,
    pick: Callable[[], str],
    max_literals: int,
    constants: Sequence[str],
    plus_rate: float,
) -> List[Tuple[Tuple, List[Lit]]]:
    x, y = Var(0), Var(1)
    if template == "cycle":
        a, b, c = pick(), pick(), pick()
        return [((x, y), [rel(a, x, Var(2)), rel(b, Var(2), y), rel(c, y, x)])]
    if template == "star":
        return [((x, y), [eq(x, y)]), ((x, y), [rel(pick(), x, y, Tag.PLUS)])]
    if template == "eq":
        length = int(rng.integers(1, max_literals))
        return [((x, y), _path(rng, pick, length, x, Var(2), 3, plus_rate) + [eq(Var(2), y)])]
    if template == "constant":
        c = Const(constants[int(rng.integers(len(constants)))])
        length = int(rng.integers(1, max_literals))
        return [((x, c), _path(rng, pick, length, x, Var(2), 3, plus_rate))]
    length = int(rng.integers(1, max_literals + 1))
    return [((x, y), _path(rng, pick, length, x, y, 2, plus_rate))]


def random_program(
    rng: np.random.Generator,
    edb_symbols: Sequence[str],
    view_count: int,
    max_literals: int = 3,
    constants: Sequence[str] = (),
    prefix: str = "v",
    plus_rate: float = 0.25,
) -> Program:
    """Safe stratified program whose views read extensional symbols and earlier views.

    Each view gets one or two disjunct groups drawn from chain, cycle, star,
    equality and constant templates. Templates that do not fit `max_literals`
    (or need constants when none are given) fall back to a chain.
    """
    edb = [symbol(s) for s in edb_symbols]
    raw: List[RawClause] = []
    available = list(edb)
    for i in range(view_count):
        sym = symbol(f"{prefix}{i}")
        pool = list(available)

        def pick() -> str:
            return pool[int(rng.integers(len(pool)))]

        groups = 1 + int(rng.random() < 0.35)
        for _ in range(groups):
            template = TEMPLATES[int(rng.integers(len(TEMPLATES)))]
            if template == "cycle" and max_literals < 3:
                template = "chain"
            if template in ("eq", "constant") and max_literals < 2:
                template = "chain"
            if template == "constant" and not constants:
                template = "chain"
            for args, body in _template_disjuncts(rng, template, pick, max_literals, constants, plus_rate):
                raw.append(RawClause(sym, args, tuple(body)))
        available.append(sym)
    return normalize(raw, declared_edb=edb)


def random_delta(
    rng: np.random.Generator,
    g: LRel,
    symbols: Sequence[str],
    n_add: int,
    n_del: int,
    nodes: Optional[Sequence[str]] = None,
) -> EDelta:
    """Random update over the Single entries of `symbols`.

    Insertions are drawn over `nodes` (default: the universe of g) and skip
    edges g already has, so they never collide with deletions, which are
    drawn from existing edges.
    """
    candidates = sorted(nodes if nodes is not None else g.universe)
    syms = sorted(symbols)
    add: Dict[Tuple[str, Tag], set] = {}
    delete: Dict[Tuple[str, Tag], set] = {}
    if candidates and syms:
        for _ in range(n_add):
            key = (syms[int(rng.integers(len(syms)))], Tag.SINGLE)
            edge = (
                candidates[int(rng.integers(len(candidates)))],
                candidates[int(rng.integers(len(candidates)))],
            )
            if edge not in g.get(key):
                add.setdefault(key, set()).add(edge)

    existing = [(sym, edge) for sym in syms for edge in g.get((sym, Tag.SINGLE))]
    if existing and n_del:
        chosen = rng.choice(len(existing), size=min(n_del, len(existing)), replace=False)
        for index in sorted(chosen):
            sym, edge = existing[int(index)]
            delete.setdefault((sym, Tag.SINGLE), set()).add(edge)
    return EDelta(LRel.build(add), LRel.build(delete))


def generate_instance(cfg: BenchConfig) -> Tuple[LRel, Dict[str, Program]]:
    """Graph and named workload queries for one configuration"""
    rng = np.random.default_rng(cfg.seed)
    edb = symbol_names(cfg.symbol_count)
    g = random_graph(rng, cfg.node_count, edb, cfg.density, cfg.preset, cfg.zipf_exponent)
    nodes = sorted(g.universe)
    workload = {}
    for i in range(cfg.workload_size):
        constants = [nodes[int(rng.integers(len(nodes)))]]
        workload[f"q{i}"] = random_program(rng, edb, cfg.view_count, cfg.max_literals, constants)
    logger.info(
        f"Generated {cfg.preset} instance: {len(g.universe)} nodes, "
        f"{g.size(Tag.SINGLE)} edges, {len(workload)} queries"
    )
    return g, workload


def sample_support_delta(
    g: LRel, rho_supp: float, seed: int, symbols: Optional[Iterable[str]] = None
) -> Tuple[LRel, EDelta, float]:
    """Split g into a base graph and an insertion batch by symbol.

    ceil(rho_supp * |symbols|) symbols are picked uniformly; all their Single
    edges move to the batch. rho is the batch size as a percentage of the
    base's Single edges (infinite when the base is empty).
    """
    syms = sorted(symbols if symbols is not None else g.symbols())
    count = math.ceil(round(rho_supp * len(syms), 9))
    if count == 0:
        raise ValueError(f"rho_supp={rho_supp} selects no symbols out of {len(syms)}")
    if count > len(syms):
        raise ValueError(f"cannot pick {count} of {len(syms)} symbols")
    rng = np.random.default_rng(seed)
    picked = sorted(syms[int(i)] for i in rng.choice(len(syms), size=count, replace=False))

    moved = {(sym, Tag.SINGLE): g.get((sym, Tag.SINGLE)) for sym in picked}
    base = g
    for key in moved:
        base = base.replace(key, EMPTY)
    base = close_symbols(base, picked)
    d_plus = EDelta(LRel.build(moved))

    added = d_plus.add.size(Tag.SINGLE)
    base_size = base.size(Tag.SINGLE)
    rho = 100.0 * added / base_size if base_size else math.inf
    logger.debug(f"Support sample {rho_supp}: moved {picked}, rho={rho:.2f}%")
    return base, d_plus, rho


def _timed(fn: Callable[[], T], repetitions: int, warmup: int) -> Tuple[float, T]:
    """Median wall time in milliseconds over `repetitions` runs after `warmup` runs"""
    result = None
    for _ in range(warmup):
        result = fn()
    samples = []
    for _ in range(repetitions):
        started = time.perf_counter()
        result = fn()
        samples.append((time.perf_counter() - started) * 1000.0)
    return float(np.median(samples)), result


def run_bench(cfg: BenchConfig, settings: Optional[EngineSettings] = None) -> BenchReport:
    """Time FVM against IVM for every query and support fraction.

    Closure computation is timed on both sides. Raises BenchmarkMismatch as
    soon as the two strategies disagree on any relation.
    """
    g, workload = generate_instance(cfg)
    edb = symbol_names(cfg.symbol_count)
    seeds = np.random.default_rng(cfg.seed + 1).integers(0, 2**32, size=len(cfg.rho_supp))
    report = BenchReport()

    for name, program in workload.items():
        engine = Engine(program, settings)
        support = program.symbols | g.symbols()
        for rho_supp, seed in zip(cfg.rho_supp, seeds):
            base, d_plus, rho = sample_support_delta(g, rho_supp, int(seed), edb)
            materialized = engine.materialize(base)
            updated = apply_update(base, d_plus)

            fvm_ms, full = _timed(lambda: engine.materialize(updated), cfg.repetitions, cfg.warmup)
            ivm_ms, maintained = _timed(
                lambda: apply_update(materialized, engine.maintain(materialized, support, d_plus)),
                cfg.repetitions,
                cfg.warmup,
            )

            equal = full.rel == maintained.rel
            row = BenchRow(
                query=name,
                rho_supp=rho_supp,
                rho_pct=rho,
                fvm_ms=fvm_ms,
                ivm_ms=ivm_ms,
                time_gain_ms=time_gain(fvm_ms, ivm_ms),
                ratio_gain_pct=ratio_gain(fvm_ms, ivm_ms),
                outputs_equal=equal,
            )
            report.rows.append(row)
            logger.info(
                f"{name} rho_supp={rho_supp}: FVM {fvm_ms:.2f} ms, IVM {ivm_ms:.2f} ms, "
                f"gain {row.ratio_gain_pct:.2f}%"
            )
            if not equal:
                raise BenchmarkMismatch(
                    f"{name} at rho_supp={rho_supp}: maintained views differ from recomputation"
                )

    logger.info(f"Median ratio gain over {len(report.rows)} cases: {report.median_ratio_gain():.2f}%")
    return report


# Report files


def _format_float(value: float) -> str:
    if math.isinf(value):
        return "inf"
    return f"{value:.6f}"


def write_report_csv(report: BenchReport, out: Union[str, TextIO]) -> None:
    if isinstance(out, str):
        with open(out, "w", encoding="utf-8", newline="") as f:
            write_report_csv(report, f)
        logger.info(f"Wrote {len(report.rows)} benchmark rows to {out}")
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in report.rows:
        writer.writerow([
            row.query,
            f"{row.rho_supp:g}",
            _format_float(row.rho_pct),
            _format_float(row.fvm_ms),
            _format_float(row.ivm_ms),
            _format_float(row.time_gain_ms),
            _format_float(row.ratio_gain_pct),
            "true" if row.outputs_equal else "false",
        ])


def read_report_csv(path: str) -> BenchReport:
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames != CSV_HEADER:
                raise InputFormatError(f"unexpected header {reader.fieldnames}", path, 1)
            rows = [
                BenchRow(**{**record, "outputs_equal": record["outputs_equal"] == "true"})
                for record in reader
            ]
    except OSError as e:
        raise InputFormatError(f"cannot read report: {e.strerror}", path)
    return BenchReport(rows=rows)
