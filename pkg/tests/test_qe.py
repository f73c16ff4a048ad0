import random

import pytest

from presburger.formula import (
    Exists,
    Forall,
    Iff,
    parse,
    render,
    simplify,
    is_quantifier_free,
)
from presburger.gen import random_qe_instance
from presburger.oracle import Box, EvalConfig, equiv_on_box
from presburger.qe import (
    QEError,
    decide_equiv,
    decide_sentence,
    eliminate,
    find_solution,
    is_satisfiable,
    nnf,
)


def check_qe(text_or_formula, radius=15, qbound=60):
    f = parse(text_or_formula) if isinstance(text_or_formula, str) else text_or_formula
    g = eliminate(f)
    assert is_quantifier_free(g)
    fv = sorted(f.free_vars() | g.free_vars())
    if fv:
        cfg = EvalConfig(quantifier_bound=qbound)
        cex = equiv_on_box(f, g, Box.cube(fv, radius), cfg=cfg)
        assert cex is None, f"{f} vs {g} differ at {cex}"
    return g


class TestEliminate:
    def test_parity(self):
        g = check_qe("E y. x = y + y")
        assert decide_equiv(g, parse("x = 0 mod 2"))

    def test_lower_ray(self):
        g = check_qe("E y. (0 <= y & y <= x)")
        assert decide_equiv(g, parse("0 <= x"))

    def test_discreteness_tautology(self):
        g = check_qe("A y. (y < x -> y + 1 <= x)")
        assert decide_equiv(g, parse("0 = 0"))

    def test_mixed_coefficients(self):
        check_qe("E y. (2*y <= x & x <= 3*y)")

    def test_congruence_with_coefficient(self):
        check_qe("E y. (3*y = x mod 5 & 0 <= y - x)")

    def test_equality_pin(self):
        g = check_qe("E y. (y = 3*x & y = 0 mod 2)")
        assert decide_equiv(g, parse("3*x = 0 mod 2"))

    def test_universal(self):
        check_qe("A y. (y < x | x <= y)")

    def test_nested(self):
        check_qe("E y. (x <= y & (E z. (z + z = y)))", radius=10)

    def test_predicate_rejected(self):
        from presburger.formula import Pred, Term

        with pytest.raises(QEError):
            eliminate(Exists("y", Pred("A", (Term.var("y"),))))


class TestDecide:
    def test_modulus_one_tautology(self):
        assert decide_sentence(parse("A x. x = 0 mod 1")) is True

    def test_no_self_less(self):
        assert decide_sentence(parse("E x. x < x")) is False

    def test_parity_partition(self):
        assert decide_sentence(parse("A x. E y. (x = y + y | x = y + y + 1)")) is True

    def test_three_way_coupled_quantifiers(self):
        assert decide_sentence(parse("A x. A y. E z. x + y = z")) is True
        assert decide_sentence(parse("E z. A x. x + z = x + 1")) is True
        assert decide_sentence(parse("E z. A x. x < z")) is False

    def test_free_variable_rejected(self):
        with pytest.raises(QEError):
            decide_sentence(parse("x = 0"))

    def test_decide_equiv(self):
        f = parse("0 <= x")
        assert decide_equiv(f, f) is True
        assert decide_equiv(f, parse("0 < x")) is False
        assert decide_equiv(f, parse("E y. (x = y + y | x = y + y + 1) & 0 <= y")) is True

    def test_decide_equiv_self_elimination(self):
        for text in ["E y. (0 <= y & y <= x)", "A y. (y < x -> y + 1 <= x)"]:
            f = parse(text)
            assert decide_equiv(f, eliminate(f)) is True


class TestSolutions:
    def test_satisfiable(self):
        assert is_satisfiable(parse("x = 0 mod 2 & 10 <= x")) is True
        assert is_satisfiable(parse("x < 0 & 0 < x")) is False

    def test_find_solution(self):
        sol = find_solution(parse("x = 1 mod 3 & x + y = 7 & 20 <= x"))
        assert sol is not None
        assert sol["x"] % 3 == 1 and sol["x"] + sol["y"] == 7 and sol["x"] >= 20

    def test_find_solution_none(self):
        assert find_solution(parse("x < x")) is None


class TestNnf:
    def test_negated_le_uses_discreteness(self):
        f = nnf(parse("!(x <= y)"))
        assert render(f) == "y + 1 <= x"

    def test_negated_congruence_literal_by_default(self):
        f = nnf(parse("!(x = 0 mod 3)"))
        assert render(f) == "!(x = 0 mod 3)"

    def test_negated_congruence_expands_on_request(self):
        f = nnf(parse("!(x = 0 mod 3)"), expand_mod_negations=True)
        assert render(f) == "x + 1 = 0 mod 3 | x + 2 = 0 mod 3"

    def test_iff_expansion_preserves_semantics(self):
        f = parse("x = 0 <-> y = 0")
        g = nnf(f)
        assert equiv_on_box(f, g, Box.cube(["x", "y"], 5)) is None


class TestRandomSuite:
    def test_hundred_random_instances(self):
        rng = random.Random(2024)
        for i in range(100):
            f = random_qe_instance(rng)
            g = eliminate(f)
            assert is_quantifier_free(g)
            fv = sorted(f.free_vars() | g.free_vars())
            if not fv:
                continue
            cex = equiv_on_box(f, g, Box.cube(fv, 12), cfg=EvalConfig(quantifier_bound=80))
            assert cex is None, f"instance {i}: {render(f)} vs {render(g)} differ at {cex}"


if __name__ == "__main__":
    pytest.main([__file__, "-q"])
