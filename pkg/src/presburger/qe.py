"""Quantifier elimination for the integers with +, -, order, and congruences,
plus sentence and equivalence decisions built on top of it.

The elimination is the classical substitution method for a single
existential quantifier: normalize the bound variable's coefficient via lcm
scaling (recording divisibility by the lcm), then replace the quantifier by
a finite disjunction over residues and shifted boundary terms. Universal
quantifiers go through the usual double negation. Output formulas are
simplified structurally but not canonicalized; equivalence questions are
decided semantically by a second elimination pass.
"""

from __future__ import annotations

from math import gcd, lcm
from typing import Optional

from .formula import (
    And,
    BOT,
    Bot,
    Cong,
    Eq,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Le,
    Lt,
    Not,
    Or,
    Pred,
    TOP,
    Top,
    Term,
    conj,
    disj,
    free_vars,
    fresh_name,
    all_vars,
    is_predicate_free,
    is_quantifier_free,
    simplify,
    substitute,
)


class QEError(ValueError):
    pass


def nnf(f: Formula, negate: bool = False, expand_mod_negations: bool = False) -> Formula:
    """Negation normal form over the atom set {=, <=, <, cong, !cong}.

    Uses discreteness for negated order atoms and splits negated equalities.
    Negated congruences stay as literals by default (their moduli can be
    large after coefficient scaling); pass expand_mod_negations=True to
    expand them into a disjunction over the nonzero residues.
    """
    if isinstance(f, Top):
        return BOT if negate else TOP
    if isinstance(f, Bot):
        return TOP if negate else BOT
    if isinstance(f, Eq):
        if not negate:
            return f
        return Or(Lt(f.lhs, f.rhs), Lt(f.rhs, f.lhs))
    if isinstance(f, Le):
        if not negate:
            return f
        return Le(f.rhs + Term.of(1), f.lhs)
    if isinstance(f, Lt):
        if not negate:
            return f
        return Le(f.rhs, f.lhs)
    if isinstance(f, Cong):
        if not negate:
            return f
        if expand_mod_negations:
            return disj([Cong(f.term + Term.of(r), f.modulus) for r in range(1, f.modulus)])
        return Not(f)
    if isinstance(f, Pred):
        return Not(f) if negate else f
    if isinstance(f, Not):
        return nnf(f.body, not negate, expand_mod_negations)
    if isinstance(f, And):
        cls = Or if negate else And
        return cls(
            nnf(f.lhs, negate, expand_mod_negations), nnf(f.rhs, negate, expand_mod_negations)
        )
    if isinstance(f, Or):
        cls = And if negate else Or
        return cls(
            nnf(f.lhs, negate, expand_mod_negations), nnf(f.rhs, negate, expand_mod_negations)
        )
    if isinstance(f, Implies):
        if negate:
            return And(nnf(f.lhs, False, expand_mod_negations), nnf(f.rhs, True, expand_mod_negations))
        return Or(nnf(f.lhs, True, expand_mod_negations), nnf(f.rhs, False, expand_mod_negations))
    if isinstance(f, Iff):
        ll = nnf(f.lhs, False, expand_mod_negations)
        lr = nnf(f.lhs, True, expand_mod_negations)
        rl = nnf(f.rhs, False, expand_mod_negations)
        rr = nnf(f.rhs, True, expand_mod_negations)
        if negate:
            return Or(And(ll, rr), And(lr, rl))
        return Or(And(ll, rl), And(lr, rr))
    if isinstance(f, Exists):
        cls = Forall if negate else Exists
        return cls(f.var, nnf(f.body, negate, expand_mod_negations))
    if isinstance(f, Forall):
        cls = Exists if negate else Forall
        return cls(f.var, nnf(f.body, negate, expand_mod_negations))
    raise TypeError(f"unknown node {type(f)}")


def _scaled_atom_map(f: Formula, v: str, delta: int, u: str) -> Formula:
    """Rewrite every atom containing v so the variable appears as the fresh
    unit-coefficient variable u standing for delta*v."""
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, (Eq, Le, Lt)):
        t = f.lhs - f.rhs
        c = t.coeff(v)
        if c == 0:
            return f
        rest = t - Term.make({v: c})
        if isinstance(f, Eq):
            # c*v + rest = 0  ->  u = -(delta/c)*rest
            k = delta // c
            return Eq(Term.var(u), rest.scale(-k))
        # Work with the strict form c*v + rest2 < 0; discreteness turns
        # a <= 0 into a - 1 < 0.
        rest2 = rest + Term.of(-1) if isinstance(f, Le) else rest
        if c > 0:
            k = delta // c
            # u < -k*rest2
            return Lt(Term.var(u), rest2.scale(-k))
        k = delta // (-c)
        # (-c)*v > rest2  ->  u > k*rest2
        return Lt(rest2.scale(k), Term.var(u))
    if isinstance(f, Cong):
        c = f.term.coeff(v)
        if c == 0:
            return f
        rest = f.term - Term.make({v: c})
        if c > 0:
            k = delta // c
        else:
            k = -(delta // (-c))
        # k*(c*v + rest) = delta*v + k*rest, modulus scales by |k|
        return Cong(Term.var(u) + rest.scale(k), f.modulus * abs(k))
    if isinstance(f, Not):
        return Not(_scaled_atom_map(f.body, v, delta, u))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(_scaled_atom_map(f.lhs, v, delta, u), _scaled_atom_map(f.rhs, v, delta, u))
    raise TypeError(f"unexpected node {type(f)} during scaling")


def _collect_v_info(f: Formula, v: str) -> tuple[int, list[int]]:
    """(lcm of |coefficients| of v, congruence moduli scaled for those atoms)."""
    coeffs: list[int] = []

    def walk(g: Formula) -> None:
        if isinstance(g, (Eq, Le, Lt)):
            c = (g.lhs - g.rhs).coeff(v)
            if c:
                coeffs.append(abs(c))
        elif isinstance(g, Cong):
            c = g.term.coeff(v)
            if c:
                coeffs.append(abs(c))
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, (And, Or, Implies, Iff)):
            walk(g.lhs)
            walk(g.rhs)

    walk(f)
    delta = 1
    for c in coeffs:
        delta = lcm(delta, c)
    return delta, coeffs


def _boundaries_and_moduli(f: Formula, u: str) -> tuple[list[Term], list[Term], int]:
    """Lower boundary terms, upper boundary terms, and the residue period for
    the unit-coefficient variable u."""
    lowers: list[Term] = []
    uppers: list[Term] = []
    period = 1

    def walk(g: Formula) -> None:
        nonlocal period
        if isinstance(g, Eq):
            c = (g.lhs - g.rhs).coeff(u)
            if c:
                rest = (g.lhs - g.rhs) - Term.make({u: c})
                # u = -rest (c is +-1 after scaling)
                val = rest.scale(-c)
                lowers.append(val + Term.of(-1))
                uppers.append(val + Term.of(1))
        elif isinstance(g, Lt):
            t = g.lhs - g.rhs
            c = t.coeff(u)
            if c == 1:
                uppers.append((t - Term.var(u)).scale(-1))
            elif c == -1:
                lowers.append(t + Term.var(u))
        elif isinstance(g, Le):
            raise AssertionError("Le must be rewritten to Lt before boundary collection")
        elif isinstance(g, Cong):
            if g.term.coeff(u):
                period = lcm(period, g.modulus)
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, (And, Or)):
            walk(g.lhs)
            walk(g.rhs)
        elif isinstance(g, (Implies, Iff)):
            walk(g.lhs)
            walk(g.rhs)

    walk(f)
    return lowers, uppers, period


def _infinite_projection(f: Formula, u: str, low: bool) -> Formula:
    """Truth of f for u far below (low=True) or far above every boundary."""
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, Eq):
        if (f.lhs - f.rhs).coeff(u):
            return BOT
        return f
    if isinstance(f, Lt):
        c = (f.lhs - f.rhs).coeff(u)
        if c == 0:
            return f
        if c == 1:  # u < bound
            return TOP if low else BOT
        return BOT if low else TOP  # bound < u
    if isinstance(f, Le):
        raise AssertionError("Le must be rewritten to Lt")
    if isinstance(f, Cong):
        return f
    if isinstance(f, Not):
        return Not(_infinite_projection(f.body, u, low))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(_infinite_projection(f.lhs, u, low), _infinite_projection(f.rhs, u, low))
    raise TypeError(f"unexpected node {type(f)}")


def _rewrite_le_to_lt(f: Formula) -> Formula:
    if isinstance(f, Le):
        return Lt(f.lhs, f.rhs + Term.of(1))
    if isinstance(f, Not):
        return Not(_rewrite_le_to_lt(f.body))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(_rewrite_le_to_lt(f.lhs), _rewrite_le_to_lt(f.rhs))
    return f


def _top_conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return _top_conjuncts(f.lhs) + _top_conjuncts(f.rhs)
    return [f]


def _substitute_scaled(f: Formula, v: str, a: int, t: Term) -> Formula:
    """Replace v by t/a (a > 0) in every atom, multiplying the atom through
    by a to stay integral. Only valid where a | t, which the caller records
    as a side divisibility condition."""
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, (Eq, Le, Lt)):
        d = f.lhs - f.rhs
        c = d.coeff(v)
        if c == 0:
            return f
        rest = d - Term.make({v: c})
        new = rest.scale(a) + t.scale(c)
        return type(f)(new, Term.of(0))
    if isinstance(f, Cong):
        c = f.term.coeff(v)
        if c == 0:
            return f
        rest = f.term - Term.make({v: c})
        return Cong(rest.scale(a) + t.scale(c), f.modulus * a)
    if isinstance(f, Not):
        return Not(_substitute_scaled(f.body, v, a, t))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(_substitute_scaled(f.lhs, v, a, t), _substitute_scaled(f.rhs, v, a, t))
    raise TypeError(f"unexpected node {type(f)}")


def _try_equality_shortcut(v: str, body: Formula) -> Optional[Formula]:
    """E v. (a*v = t and rest)  =  a | t  and  rest[v := t/a]."""
    conjuncts = _top_conjuncts(body)
    best: Optional[tuple[int, int, Term]] = None
    for i, g in enumerate(conjuncts):
        if isinstance(g, Eq):
            d = g.lhs - g.rhs
            c = d.coeff(v)
            if c == 0:
                continue
            rest = d - Term.make({v: c})
            a, t = (c, -rest) if c > 0 else (-c, rest)  # a*v = t, a > 0
            if best is None or a < best[1]:
                best = (i, a, t)
    if best is None:
        return None
    i, a, t = best
    others = [g for j, g in enumerate(conjuncts) if j != i]
    parts = [_substitute_scaled(g, v, a, t) for g in others]
    if a > 1:
        parts.append(Cong(t, a))
    return simplify(conj(parts))


def _flatten_or(f: Formula) -> list[Formula]:
    if isinstance(f, Or):
        return _flatten_or(f.lhs) + _flatten_or(f.rhs)
    return [f]


def eliminate_exists(v: str, body: Formula) -> Formula:
    """Eliminate E v from a quantifier-free body (not necessarily in NNF)."""
    body = simplify(nnf(body))
    if v not in free_vars(body):
        return body
    if isinstance(body, Or):
        # existentials distribute over disjunction; eliminating per disjunct
        # keeps the boundary sets (and hence the output) linear in the
        # number of disjuncts instead of quadratic
        parts = []
        for part in _flatten_or(body):
            g = eliminate_exists(v, part)
            if isinstance(g, Top):
                return TOP
            parts.append(g)
        return simplify(disj(parts))
    shortcut = _try_equality_shortcut(v, body)
    if shortcut is not None:
        return shortcut
    body = _rewrite_le_to_lt(body)
    delta, _ = _collect_v_info(body, v)
    u = fresh_name("_q", all_vars(body))
    scaled = _scaled_atom_map(body, v, delta, u)
    matrix = And(scaled, Cong(Term.var(u), delta)) if delta > 1 else scaled
    lowers, uppers, period = _boundaries_and_moduli(matrix, u)
    period = lcm(period, delta)
    disjuncts: list[Formula] = []
    seen: set[Formula] = set()
    if len(lowers) <= len(uppers):
        base = _infinite_projection(matrix, u, low=True)
        boundary = lowers
        signs = 1
    else:
        base = _infinite_projection(matrix, u, low=False)
        boundary = uppers
        signs = -1
    base = simplify(base)
    for j in range(1, period + 1):
        if signs * j % delta:  # the u = 0 (mod delta) conjunct would fail
            continue
        g = simplify(substitute(base, {u: Term.of(signs * j)}))
        if isinstance(g, Top):
            return TOP
        if not isinstance(g, Bot) and g not in seen:
            seen.add(g)
            disjuncts.append(g)
    boundary = list(dict.fromkeys(boundary))
    for b in boundary:
        for j in range(1, period + 1):
            g = simplify(substitute(matrix, {u: b + Term.of(signs * j)}))
            if isinstance(g, Top):
                return TOP
            if not isinstance(g, Bot) and g not in seen:
                seen.add(g)
                disjuncts.append(g)
    return disj(disjuncts)


def eliminate(f: Formula) -> Formula:
    """Equivalent quantifier-free formula over {+, -, 0, 1, <, congruences}.

    The input must be predicate-free (unfold predicates first).
    """
    if not is_predicate_free(f):
        raise QEError("predicate atom present; unfold predicates before elimination")
    result = _eliminate(f)
    assert is_quantifier_free(result)
    return result


def _cooper_cost(g: Formula, v: str) -> int:
    """Rough size of the disjunction eliminating v would produce: residue
    period times the smaller boundary set."""
    stats = {"delta": 1, "period": 1, "lows": 0, "ups": 0}

    def walk(h: Formula) -> None:
        if isinstance(h, (Eq, Le, Lt)):
            c = (h.lhs - h.rhs).coeff(v)
            if c:
                stats["delta"] = lcm(stats["delta"], abs(c))
                if isinstance(h, Eq):
                    stats["lows"] += 1
                    stats["ups"] += 1
                elif c > 0:
                    stats["ups"] += 1
                else:
                    stats["lows"] += 1
        elif isinstance(h, Cong):
            c = h.term.coeff(v)
            if c:
                stats["delta"] = lcm(stats["delta"], abs(c))
                stats["period"] = lcm(stats["period"], h.modulus)
        elif isinstance(h, Not):
            walk(h.body)
        elif isinstance(h, (And, Or, Implies, Iff)):
            walk(h.lhs)
            walk(h.rhs)

    walk(g)
    return lcm(stats["period"], stats["delta"]) * stats["delta"] * (
        min(stats["lows"], stats["ups"]) + 1
    )


def eliminate_exists_block(vars: Sequence[str], body: Formula) -> Formula:
    """Eliminate a block of existential quantifiers, cheapest variable
    first (existentials commute, and the ordering matters a lot for the
    output size of the substitution method)."""
    g = simplify(body)
    remaining = [v for v in dict.fromkeys(vars)]
    while remaining:
        live = [v for v in remaining if v in free_vars(g)]
        if not live:
            break
        best = min(live, key=lambda v: _cooper_cost(g, v))
        g = simplify(eliminate_exists(best, g))
        remaining.remove(best)
    return g


def _eliminate(f: Formula) -> Formula:
    if isinstance(f, (Top, Bot, Eq, Le, Lt, Cong)):
        return f
    if isinstance(f, Not):
        return Not(_eliminate(f.body))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(_eliminate(f.lhs), _eliminate(f.rhs))
    if isinstance(f, Exists):
        block = [f.var]
        body = f.body
        while isinstance(body, Exists):
            block.append(body.var)
            body = body.body
        return eliminate_exists_block(block, _eliminate(body))
    if isinstance(f, Forall):
        block = [f.var]
        body = f.body
        while isinstance(body, Forall):
            block.append(body.var)
            body = body.body
        inner = eliminate_exists_block(block, Not(_eliminate(body)))
        return simplify(nnf(Not(inner)))
    raise TypeError(f"unknown node {type(f)}")


def decide_sentence(f: Formula) -> bool:
    """Truth over Z of a sentence (no free variables, predicate-free)."""
    fv = free_vars(f)
    if fv:
        raise QEError(f"free variables present: {sorted(fv)}")
    g = simplify(eliminate(f))
    if isinstance(g, Top):
        return True
    if isinstance(g, Bot):
        return False
    raise AssertionError(f"ground elimination left a non-constant formula: {g}")


def decide_equiv(f: Formula, g: Formula) -> bool:
    """Decide Z-equivalence of two predicate-free formulas with the same
    free variables (either may contain quantifiers).

    Runs as two one-sided unsatisfiability checks rather than one universal
    biconditional: each elimination then carries a single copy of the larger
    formula, which matters for the output size of the substitution method.
    """
    if f == g:
        return True
    if is_satisfiable(And(f, nnf(g, negate=True))):
        return False
    return not is_satisfiable(And(g, nnf(f, negate=True)))


def implies_on_z(f: Formula, g: Formula) -> bool:
    sentence: Formula = Implies(f, g)
    for v in sorted(free_vars(f) | free_vars(g)):
        sentence = Forall(v, sentence)
    return decide_sentence(sentence)


def is_satisfiable(f: Formula) -> bool:
    """Whether a predicate-free formula has an integer solution."""
    g = eliminate_exists_block(sorted(free_vars(f)), _eliminate(f))
    g = simplify(g)
    if isinstance(g, Top):
        return True
    if isinstance(g, Bot):
        return False
    raise AssertionError(f"ground elimination left a non-constant formula: {g}")


def find_solution(f: Formula) -> Optional[dict[str, int]]:
    """Some integer solution of a satisfiable predicate-free formula.

    Pins free variables one at a time: for each variable, search values by
    increasing magnitude, keeping satisfiability of the remainder. The search
    radius doubles until the decision procedure confirms a value exists in
    range, so termination follows from satisfiability.
    """
    if not is_satisfiable(f):
        return None
    out: dict[str, int] = {}
    current = f
    for v in sorted(free_vars(f)):
        found = False
        radius = 4
        while not found:
            for val in sorted(range(-radius, radius + 1), key=lambda x: (abs(x), x)):
                candidate = simplify(substitute(current, {v: Term.of(val)}))
                if is_satisfiable(candidate):
                    out[v] = val
                    current = candidate
                    found = True
                    break
            radius *= 4
            if radius > 1 << 40:
                raise AssertionError("runaway solution search")
    return out
