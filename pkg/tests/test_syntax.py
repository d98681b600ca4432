"""Parsing, path compilation, normalization and safety."""

import pytest

from rd_ivm.errors import NormalizationError, RDSyntaxError, SafetyError
from rd_ivm.syntax import (
    bare_symbols,
    compile_surface,
    denormalize,
    format_program,
    load_program,
    normalize,
    parse_program,
    safety_violations,
    symbols_of,
)
from rd_ivm.syntax.parser import PAlt, PInv, PPlus, PSeq, PStar, PSym, SEqAtom, SVar, tokenize
from rd_ivm.syntax.terms import (
    CBody,
    Clause,
    Const,
    Literal,
    Program,
    RawClause,
    Tag,
    Var,
    eq,
    rel,
)

V0, V1, V2, V3 = Var(0), Var(1), Var(2), Var(3)


class TestParser:
    def test_plus_literal(self):
        sp = parse_program("suspect(X,Y) :- pstransfer+(X,Y), pstransfer+(Y,X).")
        assert len(sp) == 1
        clause = sp.clauses[0]
        assert clause.sym == "suspect"
        assert [item.path for item in clause.body] == [PPlus(PSym("pstransfer"))] * 2
        assert clause.body[1].arg1 == SVar("Y")

    def test_alternation_spellings(self):
        bar = parse_program("p(X,Y) :- (t | s)(X,Y).").clauses[0].body[0].path
        plus = parse_program("p(X,Y) :- (t + s)(X,Y).").clauses[0].body[0].path
        assert bar == plus == PAlt((PSym("t"), PSym("s")))

    def test_closure_inside_sequence(self):
        path = parse_program("s(X,Y) :- (c . m+ . c)(X,Y).").clauses[0].body[0].path
        assert path == PSeq((PSym("c"), PPlus(PSym("m")), PSym("c")))

    def test_star_and_inverse(self):
        path = parse_program("e(X,Z) :- (f* . g-)(X,Z).").clauses[0].body[0].path
        assert path == PSeq((PStar(PSym("f")), PInv(PSym("g"))))

    def test_equality_item(self):
        item = parse_program("p(X,Y) :- X = Y.").clauses[0].body[0]
        assert isinstance(item, SEqAtom)

    def test_fact_and_comments(self):
        sp = parse_program("% a fact\ns(a, 'B c'). % trailing\n")
        assert len(sp) == 1 and sp.clauses[0].body == ()

    def test_empty_text(self):
        assert len(parse_program("  % nothing here\n")) == 0

    @pytest.mark.parametrize(
        "text",
        [
            "p(X,Y) :- r++(X,Y).",
            "p(X,Y) :- r+*(X,Y).",
            "p(X,Y) :- (r . s)+(X,Y).",
            "p(X,Y) :- r(X,Y)",
            "p(X) :- r(X,X).",
            "p(X,Y) :- r(X,Y) ; s(X,Y).",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(RDSyntaxError):
            parse_program(text)

    def test_error_position(self):
        with pytest.raises(RDSyntaxError) as info:
            parse_program("p(X,Y) :-\n  r++(X,Y).")
        assert info.value.line == 2
        assert info.value.column == 5

    def test_tokenize_positions(self):
        tokens = tokenize("p(X,\n Y).")
        y = next(t for t in tokens if t.value == "Y")
        assert (y.line, y.col) == (2, 2)


class TestCompiler:
    def test_star_expands_to_two_disjuncts(self):
        raw = compile_surface(parse_program("exposed(X,Z) :- (follows* . endorses)(X,Z)."))
        assert [c.body for c in raw] == [
            (eq(V0, V2), rel("endorses", V2, V1)),
            (rel("follows", V0, V2, Tag.PLUS), rel("endorses", V2, V1)),
        ]

    def test_alternation_splits_clause(self):
        raw = compile_surface(parse_program("p(X,Y) :- (t + s)(X,Y)."))
        assert [c.body for c in raw] == [(rel("t", V0, V1),), (rel("s", V0, V1),)]

    def test_inverse_swaps_arguments(self):
        raw = compile_surface(parse_program("p(X,Y) :- (r . s)-(X,Y)."))
        assert raw[0].body == (rel("r", V1, V2), rel("s", V2, V0))

    def test_inverse_closure(self):
        raw = compile_surface(parse_program("p(X,Y) :- r-+(X,Y)."))
        assert raw[0].body == (rel("r", V1, V0, Tag.PLUS),)

    def test_anonymous_variables_are_fresh(self):
        raw = compile_surface(parse_program("p(X,Y) :- r(X,_), r(Y,_)."))
        assert raw[0].body == (rel("r", V0, V2), rel("r", V1, V3))

    def test_two_stars_give_four_clauses(self):
        raw = compile_surface(parse_program("p(X,Y) :- a*(X,Z), b*(Z,Y)."))
        assert len(raw) == 4


class TestNormalize:
    def test_two_clause_completion(self):
        p = load_program("s(a,b).\ns(Z,Y) :- p(X,Y), q+(Z,X).")
        assert p.edb_symbols == frozenset({"p", "q"})
        clause = p["s"]
        assert clause.head == (V0, V1)
        assert clause.bodies == (
            CBody((eq(Const("a"), V0), eq(Const("b"), V1))),
            CBody((rel("p", V2, V1), rel("q", V0, V2, Tag.PLUS))),
        )
        assert clause.arity == 3

    def test_repeated_head_variable(self):
        p = load_program("loop(X,X) :- r(X,Y).")
        assert p["loop"].bodies[0] == CBody((eq(V0, V1), rel("r", V0, V2)))

    def test_renaming_is_per_disjunct(self):
        p = load_program("v(X,Y) :- r(X,A), r(A,Y).\nv(X,Y) :- s(X,B), s(B,Y).")
        first, second = p["v"].bodies
        assert first.variables() == second.variables() == frozenset({0, 1, 2})

    def test_idempotent_through_text(self, example1_program):
        again = load_program(format_program(example1_program))
        assert again == example1_program

    def test_denormalize_round_trip(self, brand_reach_program):
        assert normalize(denormalize(brand_reach_program)) == brand_reach_program

    def test_declared_edb_cannot_have_clauses(self):
        raw = compile_surface(parse_program("r(X,Y) :- s(X,Y)."))
        with pytest.raises(NormalizationError):
            normalize(raw, declared_edb=["r"])

    def test_declared_edb_without_use(self):
        p = load_program("v(X,Y) :- r(X,Y).", declared_edb=["unused"])
        assert p.edb_symbols == frozenset({"r", "unused"})

    def test_constants(self):
        p = load_program("near(X,hub) :- link(X,Y), Y = 'other node'.")
        assert p.constants() == frozenset({"hub", "other node"})

    def test_format_quotes_nodes(self):
        text = format_program(load_program("v(X,Y) :- r(X,'A b'), Y = 3."))
        assert "'A b'" in text
        assert load_program(text) == load_program("v(X,Y) :- r(X,'A b'), Y = 3.")


class TestSafety:
    def test_unbound_head_variable(self):
        with pytest.raises(SafetyError) as info:
            load_program("v(X,Y) :- p(X,X).")
        assert (info.value.symbol, info.value.disjunct, info.value.variable) == ("v", 0, 1)

    def test_only_offending_disjunct_reported(self):
        raw = [
            RawClause("v", (V0, V1), (rel("p", V0, V1),)),
            RawClause("v", (V0, V1), (rel("p", V0, V0),)),
        ]
        with pytest.raises(SafetyError) as info:
            normalize(raw)
        assert info.value.disjunct == 1

    def test_all_violations_listed(self):
        p = Program(
            {"v": Clause((V0, V1), (CBody((rel("p", V2, V2),)),), 3)},
            frozenset({"p"}),
        )
        assert [(e.disjunct, e.variable) for e in safety_violations(p)] == [(0, 0), (0, 1)]

    def test_equality_binds(self):
        p = load_program("v(X,Y) :- p(X,Z), Z = Y.")
        assert safety_violations(p) == []


class TestSymbols:
    def test_symbols_of_body(self):
        body = CBody((rel("p", V2, V1), rel("q", V0, V2, Tag.PLUS), eq(V0, V1)))
        assert symbols_of(body) == frozenset({("p", Tag.SINGLE), ("q", Tag.PLUS)})
        assert bare_symbols(body) == frozenset({"p", "q"})

    def test_suspect_reads_pstransfer(self, example1_program):
        assert bare_symbols(example1_program["suspect"]) == frozenset({"pstransfer"})
        assert symbols_of(example1_program["suspect"]) == frozenset({("pstransfer", Tag.PLUS)})

    def test_program_slice(self, example1_program):
        part = example1_program.slice(["suspect", "pstransfer"])
        assert part.intensional == frozenset({"suspect", "pstransfer"})
        assert symbols_of(part) == frozenset(
            {("pstransfer", Tag.PLUS), ("transfer", Tag.SINGLE), ("stransfer", Tag.SINGLE)}
        )

    def test_example1_views(self, example1_program):
        assert example1_program.intensional == frozenset(
            {"suspect", "pstransfer", "stransfer", "secures", "cmonitored"}
        )
        assert example1_program.edb_symbols == frozenset(
            {"transfer", "accredited", "connected", "monitors"}
        )

    def test_eq_literal_rejects_closure_tag(self):
        with pytest.raises(ValueError):
            Literal(eq(V0, V1).atom, Tag.PLUS)
