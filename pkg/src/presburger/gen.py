"""Seeded random generators for formulas, matrices, and polyhedra.

Shared by the property-test suites and the CLI selftest so that both run the
same distributions. Quantified instances are drawn from shape classes whose
bounded-oracle cost stays modest: inner quantifier blocks never reference an
outer quantified variable, which keeps the evaluation grid sizes additive
rather than multiplicative.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional, Sequence

from .arith import IntMatrix
from .formula import And, Cong, Eq, Exists, Forall, Formula, Iff, Implies, Le, Lt, Not, Or, Term, conj, disj

VARS = ("x", "y", "z")


def random_term(
    rng: random.Random,
    vars: Sequence[str],
    coef_bound: int = 5,
    const_bound: int = 5,
    max_vars: Optional[int] = None,
) -> Term:
    chosen = [v for v in vars if rng.random() < 0.8]
    if max_vars is not None:
        chosen = chosen[:max_vars]
    if not chosen and vars:
        chosen = [rng.choice(list(vars))]
    magnitudes = [m for m in (1, 1, 1, 2, 2, 3, 4, 5) if m <= coef_bound] or [1]
    coeffs = {v: rng.choice(magnitudes) * rng.choice((-1, 1)) for v in chosen}
    return Term.make(coeffs, rng.randint(-const_bound, const_bound))


def random_atom(
    rng: random.Random,
    vars: Sequence[str],
    coef_bound: int = 5,
    const_bound: int = 5,
    mod_bound: int = 6,
    order_allowed: bool = True,
) -> Formula:
    lhs = random_term(rng, vars, coef_bound, const_bound)
    rhs = random_term(rng, vars, coef_bound, const_bound)
    kinds = ["eq", "cong"]
    if order_allowed:
        kinds += ["le", "lt", "le"]
    kind = rng.choice(kinds)
    if kind == "eq":
        return Eq(lhs, rhs)
    if kind == "le":
        return Le(lhs, rhs)
    if kind == "lt":
        return Lt(lhs, rhs)
    return Cong(lhs - rhs, rng.randint(2, mod_bound))


def random_qf(
    rng: random.Random,
    vars: Sequence[str],
    n_atoms: int = 4,
    coef_bound: int = 5,
    const_bound: int = 5,
    mod_bound: int = 6,
    order_allowed: bool = True,
) -> Formula:
    atoms = [
        random_atom(rng, vars, coef_bound, const_bound, mod_bound, order_allowed)
        for _ in range(max(1, n_atoms))
    ]

    def build(parts: list[Formula]) -> Formula:
        if len(parts) == 1:
            f = parts[0]
            return Not(f) if rng.random() < 0.25 else f
        cut = rng.randint(1, len(parts) - 1)
        lhs, rhs = build(parts[:cut]), build(parts[cut:])
        op = rng.choice([And, And, Or, Or, Implies, Iff])
        return op(lhs, rhs)

    return build(atoms)


def random_qe_instance(rng: random.Random) -> Formula:
    """One instance for the elimination suite: at most 3 variables total,
    quantifier depth at most 2, coefficients <= 5, moduli <= 6."""
    shape = rng.choices(["qf", "d1_narrow", "d1_wide", "d2"], weights=[50, 28, 8, 14])[0]
    if shape == "qf":
        k = rng.randint(1, 3)
        return random_qf(rng, VARS[:k], n_atoms=rng.randint(2, 5))
    if shape == "d1_narrow":
        # one free variable, one quantified
        q = Exists if rng.random() < 0.7 else Forall
        body = random_qf(rng, ("x", "y"), n_atoms=rng.randint(2, 4), const_bound=3)
        f: Formula = q("y", body)
        if rng.random() < 0.4:
            f = And(f, random_qf(rng, ("x",), n_atoms=1)) if rng.random() < 0.5 else Or(
                f, random_qf(rng, ("x",), n_atoms=1)
            )
        return f
    if shape == "d1_wide":
        # two free variables; small coefficients keep the default oracle
        # bound (and hence the grid) affordable
        q = Exists if rng.random() < 0.7 else Forall
        body = random_qf(rng, ("x", "y", "z"), n_atoms=rng.randint(2, 4), coef_bound=2, const_bound=2, mod_bound=4)
        return q("z", body)
    # depth 2: the inner block only mentions the free variable, so the two
    # quantifier axes never multiply
    q1 = Exists if rng.random() < 0.7 else Forall
    q2 = Exists if rng.random() < 0.7 else Forall
    inner = q2("z", random_qf(rng, ("x", "z"), n_atoms=rng.randint(1, 3)))
    outer_matrix = random_qf(rng, ("x", "y"), n_atoms=rng.randint(1, 3))
    glue = rng.choice([And, Or])
    return q1("y", glue(outer_matrix, inner))


def random_group_formula(
    rng: random.Random,
    vars: Sequence[str],
    n_atoms: int = 4,
    coef_bound: int = 5,
    const_bound: int = 10,
    mod_bound: int = 6,
) -> Formula:
    """Random order-free Boolean combination of equalities and congruences."""
    return random_qf(
        rng, vars, n_atoms=n_atoms, coef_bound=coef_bound, const_bound=const_bound,
        mod_bound=mod_bound, order_allowed=False,
    )


def random_matrix(rng: random.Random, rows: int, cols: int, bound: int = 50) -> IntMatrix:
    return IntMatrix.from_rows(
        [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)]
    )


def random_unimodular(rng: random.Random, n: int, steps: int = 12) -> IntMatrix:
    m = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        q = rng.randint(-3, 3)
        for k in range(n):
            m[i][k] += q * m[j][k]
    if rng.random() < 0.5 and n > 1:
        m[0], m[1] = m[1], m[0]
    return IntMatrix.from_rows(m)


def random_rational(rng: random.Random, num_bound: int = 5, den_bound: int = 3) -> Fraction:
    return Fraction(rng.randint(-num_bound, num_bound), rng.randint(1, den_bound))
