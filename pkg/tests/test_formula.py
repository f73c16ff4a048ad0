import pytest

from presburger.formula import (
    And,
    BOT,
    Cong,
    Eq,
    Exists,
    Forall,
    Le,
    Lt,
    Not,
    Or,
    ParseError,
    Pred,
    PredicateDef,
    PredicateEnv,
    TOP,
    Term,
    UnfoldError,
    free_vars,
    parse,
    parse_term,
    render,
    simplify,
    substitute,
    unfold_predicates,
)


class TestTerm:
    def test_canonical_form(self):
        t = Term.make({"x": 1, "y": 0}, 3)
        assert t.coeffs == (("x", 1),)
        assert t.const == 3

    def test_arith(self):
        x, y = Term.var("x"), Term.var("y")
        t = x.scale(2) + y - Term.of(4)
        assert t.evaluate({"x": 1, "y": 5}) == 3
        assert (t - t) == Term.of(0)

    def test_render_roundtrip(self):
        t = Term.make({"x": -2, "y": 1}, -7)
        assert parse_term(t.render()) == t
        assert t.render() == "-2*x + y - 7"


class TestParse:
    def test_congruence(self):
        f = parse("x = 0 mod 2")
        assert f == Cong(Term.var("x"), 2)

    def test_existential(self):
        f = parse("E y. (0 <= y & y <= x)")
        assert isinstance(f, Exists)
        assert f.var == "y"
        assert isinstance(f.body, And)

    def test_predicate(self):
        env = PredicateEnv([PredicateDef("A", ("u", "v"))])
        f = parse("A(x, x+1)", env)
        assert f == Pred("A", (Term.var("x"), Term.var("x") + Term.of(1)))

    def test_predicate_arity_mismatch(self):
        env = PredicateEnv([PredicateDef("A", ("u",))])
        with pytest.raises(ParseError):
            parse("A(x, y)", env)

    def test_normalized_relations(self):
        assert parse("x >= 1") == Le(Term.of(1), Term.var("x"))
        assert parse("x > 1") == Lt(Term.of(1), Term.var("x"))
        assert parse("x != 1") == Not(Eq(Term.var("x"), Term.of(1)))

    def test_two_sided_congruence(self):
        assert parse("x = y mod 3") == Cong(Term.var("x") - Term.var("y"), 3)

    def test_precedence(self):
        f = parse("x = 0 & y = 0 | z = 0 -> x = 1 <-> y = 1")
        # <-> weakest, then ->, then |, then &
        assert type(f).__name__ == "Iff"
        assert type(f.lhs).__name__ == "Implies"
        assert type(f.lhs.lhs).__name__ == "Or"
        assert type(f.lhs.lhs.lhs).__name__ == "And"

    def test_bad_modulus(self):
        with pytest.raises(ParseError):
            parse("x = 0 mod 0")

    def test_error_position(self):
        with pytest.raises(ParseError) as exc:
            parse("x = $")
        assert "line 1" in str(exc.value)

    def test_quantifier_scope_maximal(self):
        f = parse("E y. y = x & y = 0")
        assert isinstance(f, Exists) and isinstance(f.body, And)


class TestRender:
    CASES = [
        "x = 0 mod 2",
        "E y. (0 <= y & y <= x)",
        "A x. x = 0 mod 1",
        "!(x = 0) & (y < 1 | x <= 2)",
        "x - 2*y + 3 = 0",
        "E u. A v. (u + v = 0 -> u = v)",
        "x = 1 mod 5 <-> y = 2 mod 5",
    ]

    @pytest.mark.parametrize("text", CASES)
    def test_parse_render_fixpoint(self, text):
        f = parse(text)
        once = render(f)
        assert parse(once) == f
        assert render(parse(once)) == once

    def test_render_stability_on_predicates(self):
        env = PredicateEnv([PredicateDef("A", ("u",))])
        f = parse("A(3*x - 2)", env)
        assert parse(render(f), env) == f


class TestSubstitute:
    def test_simple(self):
        f = parse("x = 0 mod 2")
        g = substitute(f, {"x": Term.var("y") + Term.of(1)})
        assert g == Cong(Term.var("y") + Term.of(1), 2)

    def test_capture_avoidance(self):
        f = Exists("y", Eq(Term.var("y"), Term.var("x")))
        g = substitute(f, {"x": Term.var("y")})
        assert isinstance(g, Exists)
        assert g.var != "y"
        assert isinstance(g.body, Eq)
        assert g.body.rhs == Term.var("y")
        assert g.body.lhs == Term.var(g.var)

    def test_identity(self):
        f = parse("E y. y + y = x")
        assert substitute(f, {}) == f
        assert substitute(f, {"x": Term.var("x")}) == f

    def test_shadowing(self):
        f = Exists("x", Eq(Term.var("x"), Term.of(0)))
        assert substitute(f, {"x": Term.of(5)}) == f


class TestUnfold:
    def test_simple(self):
        env = PredicateEnv([PredicateDef("A", ("u",), parse("0 <= u"))])
        assert unfold_predicates(parse("A(x)", env), env) == parse("0 <= x")

    def test_argument_substitution(self):
        env = PredicateEnv([PredicateDef("A", ("u",), parse("u = 0 mod 2"))])
        f = unfold_predicates(parse("!A(x + x)", env), env)
        assert f == Not(Cong(Term.make({"x": 2}), 2))

    def test_nested(self):
        env = PredicateEnv(
            [
                PredicateDef("A", ("u",), parse("u = 0")),
            ]
        )
        env.add(PredicateDef("B", ("v",), parse("A(v + 1)", env)))
        f = unfold_predicates(parse("B(5)", env), env)
        assert f == Eq(Term.of(6), Term.of(0))

    def test_cycle_detection(self):
        env = PredicateEnv([PredicateDef("A", ("u",), Pred("A", (Term.var("u"),)))])
        with pytest.raises(UnfoldError):
            unfold_predicates(parse("A(x)", env), env)

    def test_opaque_error(self):
        env = PredicateEnv([PredicateDef("A", ("u",), body=None, oracle=lambda u: u >= 0)])
        with pytest.raises(UnfoldError):
            unfold_predicates(parse("A(x)", env), env)


class TestSimplify:
    def test_ground_atoms(self):
        assert simplify(parse("1 <= 2")) == TOP
        assert simplify(parse("1 = 2")) == BOT
        assert simplify(parse("4 = 0 mod 2")) == TOP
        assert simplify(parse("3 = 0 mod 2")) == BOT

    def test_modulus_one(self):
        assert simplify(parse("x = 0 mod 1")) == TOP

    def test_coefficient_reduction(self):
        f = simplify(parse("5*x + 7 = 0 mod 3"))
        assert f == Cong(Term.make({"x": 2}, 1), 3)

    def test_and_or(self):
        f = parse("x = 0 & 1 = 1 & x = 0")
        assert simplify(f) == parse("x = 0")
        g = parse("x = 0 | 1 = 2 | x = 0")
        assert simplify(g) == parse("x = 0")
        assert simplify(parse("x = 0 & 1 = 2")) == BOT
        assert simplify(parse("x = 0 | 1 = 1")) == TOP

    def test_vacuous_quantifier(self):
        assert simplify(parse("E y. x = 0")) == parse("x = 0")
        assert simplify(Forall("y", parse("1 = 1"))) == TOP

    def test_double_negation(self):
        assert simplify(Not(Not(parse("x = 0")))) == parse("x = 0")


if __name__ == "__main__":
    pytest.main([__file__, "-q"])
