import os
from typing import Optional, Tuple

import numpy as np
import pytest

from rd_ivm.bench import random_delta, random_graph, random_program, symbol_names
from rd_ivm.closure import close_symbols
from rd_ivm.graph import EDelta, LRel, apply_update
from rd_ivm.graph_io import read_edges, read_update
from rd_ivm.settings import EngineSettings
from rd_ivm.syntax import Program, read_program

FIXTURES_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES_DIR, name)


def random_instance(
    rng: np.random.Generator,
    max_nodes: int = 5,
    max_edb: int = 4,
    max_views: int = 3,
    max_literals: int = 3,
) -> Tuple[Program, LRel]:
    """Small safe stratified program with a closed extensional graph"""
    node_count = int(rng.integers(1, max_nodes + 1))
    edb = symbol_names(int(rng.integers(1, max_edb + 1)))
    g = random_graph(rng, node_count, edb, float(rng.uniform(0.4, 2.0)))
    constants = []
    if rng.random() < 0.3:
        nodes = sorted(g.universe)
        constants.append(nodes[int(rng.integers(len(nodes)))])
    if rng.random() < 0.1:
        constants.append("k")
    p = random_program(rng, edb, int(rng.integers(1, max_views + 1)), max_literals, constants)
    return p, g


def instance_delta(
    rng: np.random.Generator, p: Program, g: LRel, deletions: bool, new_node: Optional[str] = None
) -> EDelta:
    nodes = sorted(g.universe) + ([new_node] if new_node else [])
    n_del = int(rng.integers(1, 4)) if deletions else 0
    return random_delta(rng, g, sorted(p.edb_symbols), int(rng.integers(0, 5)), n_del, nodes)


def updated_edb(g: LRel, d: EDelta) -> LRel:
    """g ⊕ d with the closures of every touched symbol recomputed"""
    return close_symbols(apply_update(g, d), d.symbols())


@pytest.fixture
def example1_program() -> Program:
    return read_program(fixture_path("example1.rd"))


@pytest.fixture
def example2_program() -> Program:
    return read_program(fixture_path("example2.rd"))


@pytest.fixture
def example2_graph() -> LRel:
    return read_edges(fixture_path("example2.edges"))


@pytest.fixture
def example2_update() -> EDelta:
    return read_update(fixture_path("example2.upd"))


@pytest.fixture
def brand_reach_program() -> Program:
    return read_program(fixture_path("brand_reach.rd"))


@pytest.fixture
def debug_settings() -> EngineSettings:
    return EngineSettings(debug_hypotheses=True)
