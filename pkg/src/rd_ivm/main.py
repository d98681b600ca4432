#!/usr/bin/env python
"""Command-line entry point: one subcommand per verb.

    rd-ivm check --program P
    rd-ivm materialize --program P --graph G [--out F]
    rd-ivm update --program P --graph G --update U [--update U2 ...] [--out F]
    rd-ivm query --graph G --symbol S [--tag single|plus]
    rd-ivm oracle --program P --graph G [--enum-budget N]
    rd-ivm bench [--config C] [--preset NAME] [--seed N] [--out F]
"""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from .bench import BenchReport, load_bench_config, run_bench, write_report_csv
from .engine import Engine, stratify
from .errors import RDError
from .graph import apply_update, delta_summary
from .graph_io import read_edges, read_update, save_edges, write_edges
from .semantics import program_counterexample
from .settings import EngineSettings, configure_logging, load_engine_settings
from .syntax import format_program, read_program
from .syntax.terms import Tag

logger = logging.getLogger(__name__)


def _emit_graph(g, out: Optional[str]) -> None:
    if out:
        save_edges(g, out)
    else:
        write_edges(g, sys.stdout)


def cmd_check(args: argparse.Namespace, settings: EngineSettings) -> int:
    """Print the normalized program and its stratification order"""
    program = read_program(args.program)
    order = stratify(program)
    text = format_program(program)
    if text:
        print(text)
    print(f"% extensional: {' '.join(sorted(program.edb_symbols))}")
    print(f"% strata: {' '.join(order)}")
    return 0


def cmd_materialize(args: argparse.Namespace, settings: EngineSettings) -> int:
    program = read_program(args.program)
    g = read_edges(args.graph)
    result = Engine(program, settings).materialize(g)
    _emit_graph(result, args.out)
    return 0


def cmd_update(args: argparse.Namespace, settings: EngineSettings) -> int:
    """Apply update batches in order to a materialized graph.

    The per-symbol summary compares the input with the final graph.
    """
    program = read_program(args.program)
    before = read_edges(args.graph)
    engine = Engine(program, settings)

    g = before
    for path in args.update:
        d = read_update(path)
        support = program.symbols | g.symbols() | d.symbols()
        out = engine.maintain(g, support, d)
        g = apply_update(g, out)
        logger.info(f"Applied {path}")

    for sym, (added, removed) in delta_summary(before, g, program.symbols).items():
        print(f"{sym}: +{added} -{removed}")
    if args.out:
        save_edges(g, args.out)
    return 0


def cmd_query(args: argparse.Namespace, settings: EngineSettings) -> int:
    g = read_edges(args.graph)
    tag = Tag(args.tag)
    if args.symbol not in g.symbols():
        logger.warning(f"Symbol {args.symbol!r} does not occur in {args.graph}")
    for a, b in g.get((args.symbol, tag)):
        print(f"{a}\t{b}")
    return 0


def cmd_oracle(args: argparse.Namespace, settings: EngineSettings) -> int:
    """Check every clause of the program against the graph by exhaustive grounding"""
    program = read_program(args.program)
    g = read_edges(args.graph).extend_universe(program.constants())
    found = program_counterexample(g, program, None, settings.enum_budget)
    if found is None:
        print("PASS")
        return 0
    sym, eta = found
    bindings = ", ".join(f"V{i}={value}" for i, value in enumerate(eta))
    print(f"FAIL {sym}: {bindings}")
    return 1


def _gains(report: BenchReport) -> str:
    return f"median ratio gain {report.median_ratio_gain():.2f}%, median time gain {report.median_time_gain():.2f} ms"


def cmd_bench(args: argparse.Namespace, settings: EngineSettings) -> int:
    cfg = load_bench_config(args.config, args.preset, seed=args.seed)
    report = run_bench(cfg, settings)
    if args.out:
        write_report_csv(report, args.out)
        for rho, rows in sorted(report.by_rho().items()):
            print(f"rho_supp={rho}: {_gains(BenchReport(rows=rows))}")
        print(f"{len(report.rows)} cases: {_gains(report)}")
    else:
        write_report_csv(report, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--engine-config", help="engine YAML file (default: packaged engine.yaml)")
    common.add_argument("--debug-hypotheses", action="store_true", default=None,
                        help="check the maintenance hypotheses at every step")
    common.add_argument("--incremental-closure", action="store_true", default=None,
                        help="extend closures incrementally on insertions")
    common.add_argument("--mask-orientation", choices=["base_first", "full_first"])
    common.add_argument("--enum-budget", type=int, help="maximum groundings the oracle enumerates")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--log-level", help="overrides RD_IVM_LOG")

    parser = argparse.ArgumentParser(prog="rd-ivm", description="Regular Datalog views over labeled graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", parents=[common], help="parse, normalize and stratify a program")
    check.add_argument("--program", required=True)
    check.set_defaults(handler=cmd_check)

    mat = sub.add_parser("materialize", parents=[common], help="compute every view from scratch")
    mat.add_argument("--program", required=True)
    mat.add_argument("--graph", required=True)
    mat.set_defaults(handler=cmd_materialize)

    upd = sub.add_parser("update", parents=[common], help="maintain a materialized graph")
    upd.add_argument("--program", required=True)
    upd.add_argument("--graph", required=True)
    upd.add_argument("--update", required=True, action="append", help="update file, repeatable")
    upd.set_defaults(handler=cmd_update)

    query = sub.add_parser("query", parents=[common], help="print one relation of a graph")
    query.add_argument("--graph", required=True)
    query.add_argument("--symbol", required=True)
    query.add_argument("--tag", choices=[t.value for t in Tag], default=Tag.SINGLE.value)
    query.set_defaults(handler=cmd_query)

    oracle_cmd = sub.add_parser("oracle", parents=[common], help="check a graph against a program")
    oracle_cmd.add_argument("--program", required=True)
    oracle_cmd.add_argument("--graph", required=True)
    oracle_cmd.set_defaults(handler=cmd_oracle)

    bench_cmd = sub.add_parser("bench", parents=[common], help="time FVM against IVM")
    bench_cmd.add_argument("--config", help="benchmark YAML file (default: packaged bench.yaml)")
    bench_cmd.add_argument("--preset", help="preset name inside the config file")
    bench_cmd.set_defaults(handler=cmd_bench)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        settings = load_engine_settings(
            args.engine_config,
            debug_hypotheses=args.debug_hypotheses,
            incremental_closure=args.incremental_closure,
            mask_orientation=args.mask_orientation,
            enum_budget=args.enum_budget,
        )
        return args.handler(args, settings)
    except RDError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        print(f"error: invalid configuration: {e}", file=sys.stderr)
        return 1


def bench() -> int:
    return run(["bench", *sys.argv[1:]])


def oracle() -> int:
    return run(["oracle", *sys.argv[1:]])


if __name__ == "__main__":
    sys.exit(run())
