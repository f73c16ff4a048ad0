import random

import numpy as np
import pytest

from presburger.cells import (
    CellTerm,
    ZLinearFunction,
    DomainError,
    decompose,
    project,
    zlin_le,
)
from presburger.formula import Exists, parse, render, simplify
from presburger.gen import random_qf
from presburger.oracle import Box, EvalConfig, equiv_on_box, evaluate_on_box, set_on_box
from presburger.qe import decide_equiv, eliminate


class TestZLinear:
    def test_affine_evaluation(self):
        f = ZLinearFunction("standard", 1, (2,), (0,), (1,))
        assert f.evaluate([5]) == 11

    def test_extremes(self):
        assert ZLinearFunction.plus_inf().evaluate([3]) == float("inf")
        assert ZLinearFunction.minus_inf().evaluate([3]) == float("-inf")
        assert ZLinearFunction.plus_inf().plus_const(7) == ZLinearFunction.plus_inf()

    def test_grid_division(self):
        f = ZLinearFunction("standard", 0, (1,), (1,), (3,))
        assert f.evaluate([7]) == 2
        with pytest.raises(DomainError):
            f.evaluate([8])

    def test_integer_valued_on_domain(self):
        rng = random.Random(5)
        for _ in range(50):
            n = rng.randint(1, 3)
            moduli = tuple(rng.randint(1, 4) for _ in range(n))
            residues = tuple(rng.randrange(m) for m in moduli)
            f = ZLinearFunction(
                "standard",
                rng.randint(-5, 5),
                tuple(rng.randint(-4, 4) for _ in range(n)),
                residues,
                moduli,
            )
            for _ in range(10):
                xs = [residues[i] + moduli[i] * rng.randint(-5, 5) for i in range(n)]
                v = f.evaluate(xs)
                assert isinstance(v, int)

    def test_equals_formula(self):
        f = ZLinearFunction("standard", 1, (2,), (1,), (3,))
        phi = f.equals_formula(["x"], __import__("presburger.formula", fromlist=["Term"]).Term.var("y"))
        pts = set_on_box(phi, Box(("x", "y"), ((-8, 8), (-12, 12))))
        expected = {(x, 1 + 2 * ((x - 1) // 3)) for x in range(-8, 9) if (x - 1) % 3 == 0}
        expected = {p for p in expected if -12 <= p[1] <= 12}
        assert set(pts) == expected

    def test_zlin_le(self):
        f = ZLinearFunction("standard", 0, (1,), (0,), (1,))
        g = ZLinearFunction("standard", 6, (1,), (0,), (1,))
        assert zlin_le(f, g, ["x"]) == simplify(parse("0 = 0"))


def check_decomposition(f, vars, radius=10, check_project=True):
    d = decompose(f, vars)
    sem = d.semantics()
    box = Box.cube(vars, radius)
    cex = equiv_on_box(f, sem, box)
    assert cex is None, f"{render(f)} != union of {len(d.terms)} terms at {cex}"
    if check_project:
        pf = project(d)
        target = Exists(vars[-1], f)
        if len(vars) > 1:
            pbox = Box.cube(vars[:-1], radius)
            cex2 = equiv_on_box(pf, target, pbox, cfg=EvalConfig(quantifier_bound=200))
            assert cex2 is None, f"projection of {render(f)}: {render(pf)} wrong at {cex2}"
        else:
            assert decide_equiv(pf, eliminate(target))
    return d


class TestDecompose:
    def test_triangle(self):
        d = check_decomposition(parse("0 <= y & y <= x"), ("x", "y"))
        assert len(d.terms) == 1
        t = d.terms[0]
        assert t.lower.kind == "standard" and t.upper.kind == "standard"
        assert t.modulus == 1

    def test_parity_band(self):
        d = check_decomposition(parse("y = 1 mod 2"), ("x", "y"))
        assert any(t.lower.kind == "minus_infinity" and t.upper.kind == "plus_infinity" for t in d.terms)
        assert all(t.modulus == 2 for t in d.terms)

    def test_graph(self):
        d = check_decomposition(parse("y = 3*x"), ("x", "y"))
        assert len(d.terms) == 1
        t = d.terms[0]
        assert t.lower == t.upper
        assert t.lower.coeffs == (3,)

    def test_divided_graph(self):
        # y with coefficient 2 forces a residue split of x
        check_decomposition(parse("y + y = x"), ("x", "y"))

    def test_one_dimensional(self):
        d = check_decomposition(parse("x = 0 mod 3 | 5 <= x"), ("x",))
        assert d.arity == 1

    def test_empty(self):
        d = decompose(parse("y < y"), ("x", "y"))
        assert d.terms == ()

    def test_rays(self):
        check_decomposition(parse("x <= y | y <= -2 & y = 1 mod 3"), ("x", "y"))

    def test_strict_bounds(self):
        check_decomposition(parse("x < y & y < 2*x + 4"), ("x", "y"))

    def test_three_vars(self):
        check_decomposition(parse("x + y <= z & z <= x + y + 4 & z = 1 mod 2"), ("x", "y", "z"), radius=6)

    def test_coefficient_mix(self):
        check_decomposition(parse("2*y <= x & 3*y >= x - 8"), ("x", "y"))

    def test_random_formulas(self):
        rng = random.Random(99)
        for i in range(60):
            n = rng.randint(2, 3)
            vars = ("x", "y", "z")[:n]
            f = random_qf(rng, vars, n_atoms=rng.randint(1, 4), coef_bound=3, const_bound=4, mod_bound=4)
            check_decomposition(f, vars, radius=7, check_project=(i % 3 == 0))


class TestProject:
    def test_triangle_projection(self):
        d = decompose(parse("0 <= y & y <= x"), ("x", "y"))
        pf = project(d)
        assert decide_equiv(pf, parse("0 <= x"))

    def test_empty_projection(self):
        d = decompose(parse("y < y"), ("x", "y"))
        assert simplify(project(d)) == simplify(parse("0 = 1"))

    def test_full_projection(self):
        d = decompose(parse("y = 1 mod 2"), ("x", "y"))
        assert decide_equiv(project(d), parse("0 = 0"))

    def test_interval_with_residue(self):
        # x <= y <= x + 2 with y even: nonempty for every x
        d = decompose(parse("x <= y & y <= x + 2 & y = 0 mod 2"), ("x", "y"))
        assert decide_equiv(project(d), parse("0 = 0"))
        # shrink to width 1: nonempty iff x or x+1 even: still always
        d2 = decompose(parse("x <= y & y <= x + 1 & y = 0 mod 2"), ("x", "y"))
        assert decide_equiv(project(d2), parse("0 = 0"))
        # width 0: nonempty iff x even
        d3 = decompose(parse("x <= y & y <= x & y = 0 mod 2"), ("x", "y"))
        assert decide_equiv(project(d3), parse("x = 0 mod 2"))


class TestSerialization:
    def test_json_shape(self):
        d = decompose(parse("0 <= y & y <= x & y = 1 mod 3"), ("x", "y"))
        data = d.to_json()
        assert data["arity"] == 2
        for term in data["terms"]:
            assert set(term) == {"base", "lower", "upper", "residue", "modulus"}
            if term["lower"]["kind"] == "standard":
                assert set(term["lower"]) == {"kind", "u", "a", "c", "m"}


if __name__ == "__main__":
    pytest.main([__file__, "-q"])
