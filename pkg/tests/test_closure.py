import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rd_ivm.closure import (
    Path,
    close_symbols,
    compute_closures,
    extend_closure,
    find_path,
    is_closure,
    is_path,
    transitive_closure,
)
from rd_ivm.graph import EMPTY_DELTA, EDelta, LRel, apply_update, egraph, wf_graph
from rd_ivm.semantics import naive_closure
from rd_ivm.syntax.terms import Tag

S, P = Tag.SINGLE, Tag.PLUS


def all_digraphs(n):
    nodes = [f"n{i}" for i in range(n)]
    pairs = [(a, b) for a in nodes for b in nodes]
    for mask in range(2 ** len(pairs)):
        yield egraph(pair for i, pair in enumerate(pairs) if mask >> i & 1)


def random_digraph(rng, max_nodes=6):
    n = int(rng.integers(1, max_nodes + 1))
    p = float(rng.uniform(0.05, 0.6))
    nodes = [f"n{i}" for i in range(n)]
    return egraph((a, b) for a in nodes for b in nodes if rng.random() < p)


class TestTransitiveClosure:
    def test_chain(self):
        chain = egraph([("a", "b"), ("b", "c"), ("c", "d"), ("d", "e")])
        closed = transitive_closure(chain)
        assert len(closed) == 10
        assert is_closure(chain, closed)

    def test_cycle_reaches_itself(self):
        closed = transitive_closure(egraph([("a", "b"), ("b", "a")]))
        assert closed == egraph([("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")])

    def test_empty(self):
        assert not transitive_closure(egraph())
        assert is_closure(egraph(), egraph())

    def test_all_three_node_digraphs(self):
        count = 0
        for g in all_digraphs(3):
            closed = transitive_closure(g)
            assert closed.edges == naive_closure(g.edges)
            assert is_closure(g, closed)
            for edge in closed:
                assert not is_closure(g, closed - egraph([edge]))
            count += 1
        assert count == 512

    def test_random_digraphs(self):
        rng = np.random.default_rng(6)
        for _ in range(1000):
            g = random_digraph(rng)
            closed = transitive_closure(g)
            assert closed.edges == naive_closure(g.edges)
            assert is_closure(g, closed)

    def test_rejects_unsupported_edges(self):
        g = egraph([("a", "b")])
        assert not is_closure(g, egraph([("a", "b"), ("b", "a")]))
        assert not is_closure(g, egraph([("a", "b"), ("a", "a")]))


digraphs = st.frozensets(
    st.tuples(st.sampled_from(["a", "b", "c", "d", "e"]), st.sampled_from(["a", "b", "c", "d", "e"])),
    max_size=12,
).map(egraph)


class TestClosureProperties:
    @settings(deadline=None, max_examples=200)
    @given(digraphs)
    def test_contains_input(self, g):
        assert g <= transitive_closure(g)

    @settings(deadline=None, max_examples=200)
    @given(digraphs)
    def test_idempotent(self, g):
        closed = transitive_closure(g)
        assert transitive_closure(g | closed) == closed
        assert transitive_closure(closed) == closed

    @settings(deadline=None, max_examples=200)
    @given(digraphs, digraphs)
    def test_monotone(self, g, h):
        assert transitive_closure(g) <= transitive_closure(g | h)

    @settings(deadline=None, max_examples=200)
    @given(digraphs)
    def test_agrees_with_networkx_closure(self, g):
        graph = nx.DiGraph(list(g.edges))
        assert transitive_closure(g).edges == frozenset(nx.transitive_closure(graph, reflexive=None).edges)


class TestPaths:
    def test_find_path(self):
        g = egraph([("a", "b"), ("b", "c"), ("c", "a"), ("a", "d")])
        path = find_path(g, "a", "c")
        assert path == Path("a", ("b", "c"))
        assert path.edges() == [("a", "b"), ("b", "c")]
        assert is_path(g, path)

    def test_find_cycle_back_to_source(self):
        g = egraph([("a", "b"), ("b", "a")])
        assert find_path(g, "a", "a") == Path("a", ("b", "a"))
        assert find_path(egraph([("a", "a")]), "a", "a") == Path("a", ("a",))

    def test_no_path(self):
        assert find_path(egraph([("a", "b")]), "b", "a") is None
        assert find_path(egraph([("a", "b")]), "a", "a") is None

    def test_every_closure_edge_has_witness(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            g = random_digraph(rng, 5)
            for a, b in transitive_closure(g):
                path = find_path(g, a, b)
                assert is_path(g, path) and path.start == a and path.end == b


class TestComputeClosures:
    def closed(self, edges):
        return close_symbols(LRel.build({("r", S): edges}))

    def test_untouched_symbol_is_left_alone(self):
        g = self.closed({("a", "b")})
        d = EDelta(LRel.build({("q", S): {("b", "c")}}))
        assert compute_closures(g, d, "r") is d

    def test_deletion_shrinks_closure(self):
        g = self.closed({("a", "b"), ("b", "c")})
        d = EDelta(delete=LRel.build({("r", S): {("b", "c")}}))
        d = compute_closures(g, d, "r")
        assert d.delete[("r", P)] == egraph([("a", "c"), ("b", "c")])
        assert wf_graph(apply_update(g, d))

    @pytest.mark.parametrize("incremental", [False, True])
    def test_insertions(self, incremental):
        g = self.closed({("a", "b"), ("c", "d")})
        d = EDelta(LRel.build({("r", S): {("b", "c")}}))
        d = compute_closures(g, d, "r", incremental=incremental)
        assert d.add[("r", P)] == egraph([("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])
        assert wf_graph(apply_update(g, d))

    def test_incremental_matches_full(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            single = random_digraph(rng, 5)
            added = random_digraph(rng, 5) - single
            closed = transitive_closure(single)
            assert extend_closure(closed, single | added, added) == transitive_closure(single | added)

    def test_empty_delta(self):
        g = self.closed({("a", "b")})
        assert compute_closures(g, EMPTY_DELTA, "r") is EMPTY_DELTA

    def test_close_symbols(self):
        g = LRel.build({("r", S): {("a", "b"), ("b", "c")}, ("q", S): {("x", "y")}})
        closed = close_symbols(g, ["r"])
        assert closed[("r", P)] == egraph([("a", "b"), ("a", "c"), ("b", "c")])
        assert not closed[("q", P)]
        assert wf_graph(close_symbols(g))
