import numpy as np
import pytest

from conftest import random_instance
from rd_ivm.bench import random_delta
from rd_ivm.closure import close_symbols
from rd_ivm.engine import materialize
from rd_ivm.errors import EnumerationBudgetError
from rd_ivm.graph import LRel, apply_update, egraph
from rd_ivm.semantics import (
    brute_force_model,
    clause_counterexample,
    groundings,
    naive_closure,
    sat_body,
    sat_clause,
    sat_delta,
    sat_literal,
    sat_program,
)
from rd_ivm.syntax import load_program
from rd_ivm.syntax.normalize import bare_symbols
from rd_ivm.syntax.terms import CBody, Const, Tag, Var, eq, rel

S, P = Tag.SINGLE, Tag.PLUS


class TestLiterals:
    def test_ground_literals(self):
        g = LRel.build({("r", S): {("a", "b")}, ("r", P): {("a", "b")}})
        assert sat_literal(g, rel("r", Const("a"), Const("b")))
        assert sat_literal(g, rel("r", Const("a"), Const("b"), P))
        assert not sat_literal(g, rel("r", Const("b"), Const("a")))
        assert sat_literal(g, eq(Const("a"), Const("a")))

    def test_open_literal_needs_grounding(self):
        with pytest.raises(ValueError):
            sat_literal(LRel(), rel("r", Var(0), Const("b")))

    def test_body_under_grounding(self):
        g = LRel.build({("r", S): {("a", "b"), ("b", "c")}})
        body = CBody((rel("r", Var(0), Var(2)), rel("r", Var(2), Var(1))))
        assert sat_body(g, body, ("a", "c", "b"))
        assert not sat_body(g, body, ("a", "c", "c"))

    def test_naive_closure(self):
        assert naive_closure(frozenset({("a", "b"), ("b", "a")})) == frozenset(
            {("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")}
        )


class TestClauses:
    def test_counterexample(self, example2_program, example2_graph):
        eta = clause_counterexample(example2_graph, "detectable", example2_program["detectable"])
        assert eta is not None
        assert (eta[0], eta[1]) in {("V6", "V0"), ("V3", "V0")}
        assert not sat_program(example2_graph, example2_program)

    def test_materialized_graph_is_a_model(self, example2_program, example2_graph):
        m = materialize(example2_program, example2_graph)
        assert sat_program(m, example2_program)
        assert sat_clause(m, "detectable", example2_program["detectable"])

    def test_syms_restrict_the_check(self, example2_program, example2_graph):
        assert sat_program(example2_graph, example2_program, ["m", "s"])

    def test_budget(self, example2_program, example2_graph):
        with pytest.raises(EnumerationBudgetError) as info:
            sat_program(example2_graph, example2_program, budget=100)
        assert info.value.required == 7**3
        with pytest.raises(EnumerationBudgetError):
            groundings(["a", "b"], 4, budget=15)
        assert len(list(groundings(["a", "b"], 4, budget=16))) == 16


class TestBruteForceModel:
    def test_brand_reach(self, brand_reach_program):
        g = close_symbols(LRel.build({
            ("likes", S): {("u1", "z")},
            ("advertises", S): {("u1", "z")},
            ("follows", S): {("u2", "u1")},
        }))
        model = brute_force_model(brand_reach_program, g)
        assert model[("exposed", S)] == egraph([("u1", "z"), ("u2", "z")])

    def test_agrees_with_materialize(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            p, g = random_instance(rng)
            engine_model = materialize(p, g)
            oracle_model = brute_force_model(p, g)
            for sym in p.intensional:
                for tag in Tag:
                    assert engine_model[(sym, tag)] == oracle_model[(sym, tag)], sym


class TestModularity:
    def test_clause_ignores_unread_symbols(self):
        rng = np.random.default_rng(29)
        for _ in range(200):
            p, g_edb = random_instance(rng)
            g = materialize(p, g_edb) if rng.random() < 0.5 else g_edb
            s = sorted(p.intensional)[int(rng.integers(len(p.intensional)))]
            clause = p[s]
            unread = sorted(p.edb_symbols - bare_symbols(clause))
            g = g.extend_universe(p.constants())
            d = random_delta(rng, g, unread + ["other"], int(rng.integers(0, 4)), int(rng.integers(0, 3)))
            assert sat_delta(g, d, p, [s]) == sat_clause(g, s, clause)

    def test_program_splits_over_modified_symbol(self):
        rng = np.random.default_rng(31)
        for _ in range(200):
            p, g_edb = random_instance(rng)
            g = materialize(p, g_edb)
            views = sorted(p.intensional)
            s = views[int(rng.integers(len(views)))]
            others = [v for v in views if v != s and s not in bare_symbols(p[v])]
            d = random_delta(rng, g, [s], int(rng.integers(0, 4)), int(rng.integers(0, 3)))
            modified = apply_update(g, d)
            assert sat_program(modified, p, [s] + others) == (
                sat_clause(modified, s, p[s]) and sat_program(g, p, others)
            )


def test_constant_head_model():
    p = load_program("hub(X,c) :- r(X,Y).")
    model = brute_force_model(p, LRel.build({("r", S): {("a", "b")}}))
    assert model[("hub", S)] == egraph([("a", "c")])
    assert model.universe == frozenset({"a", "b", "c"})
