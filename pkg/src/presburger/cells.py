"""Z-linear functions and cell decomposition.

A quantifier-free formula over variables (x1..xn, y) is decomposed into a
finite union of cell terms  X[f, g]^c_m = {(xbar, y) : xbar in X,
f(xbar) <= y <= g(xbar), y = c mod m}, where f and g are Z-linear bound
functions (affine with congruence-constrained domain, or +-infinity) and X
is a quantifier-free base formula over x1..xn. Unions may overlap; they are
verified extensionally against the source formula on boxes.

The decomposition works per DNF conjunct: atoms mentioning y are solved to
the shape a*y <=> t(xbar); splitting xbar by residues modulo the lcm of the
y-coefficients makes every rounded bound (t +- r)/a a standard Z-linear
function, and splitting y modulo the lcm of the congruence moduli turns the
y-congruences into conditions on xbar that join the base. A final case split
over which lower and which upper bound is active yields the terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, lcm
from typing import Optional, Sequence

from .formula import (
    And,
    BOT,
    Bot,
    Cong,
    Eq,
    Formula,
    Le,
    Lt,
    Not,
    Or,
    TOP,
    Top,
    Term,
    conj,
    disj,
    free_vars,
    simplify,
)
from .qe import nnf

STANDARD = "standard"
PLUS_INF = "plus_infinity"
MINUS_INF = "minus_infinity"


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class ZLinearFunction:
    """Z-linear bound function.

    Standard: xbar -> offset + sum a_i * (x_i - c_i) / m_i on the grid
    {x : x_i = c_i mod m_i}; the value is an integer at every domain point.
    Extreme: the constant +infinity or -infinity (adding integers to an
    extreme function leaves it unchanged).
    """

    kind: str
    offset: int = 0
    coeffs: tuple[int, ...] = ()
    residues: tuple[int, ...] = ()
    moduli: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in (STANDARD, PLUS_INF, MINUS_INF):
            raise ValueError(f"bad kind {self.kind}")
        if self.kind == STANDARD:
            if not (len(self.coeffs) == len(self.residues) == len(self.moduli)):
                raise ValueError("coeffs/residues/moduli length mismatch")
            for c, m in zip(self.residues, self.moduli):
                if m < 1 or not (0 <= c < m):
                    raise ValueError(f"residue {c} not in [0, {m})")

    @staticmethod
    def constant(value: int, arity: int) -> "ZLinearFunction":
        return ZLinearFunction(
            STANDARD, value, (0,) * arity, (0,) * arity, (1,) * arity
        )

    @staticmethod
    def plus_inf() -> "ZLinearFunction":
        return ZLinearFunction(PLUS_INF)

    @staticmethod
    def minus_inf() -> "ZLinearFunction":
        return ZLinearFunction(MINUS_INF)

    @property
    def is_standard(self) -> bool:
        return self.kind == STANDARD

    @property
    def arity(self) -> int:
        return len(self.coeffs)

    def in_domain(self, xs: Sequence[int]) -> bool:
        if self.kind != STANDARD:
            return True
        return all((x - c) % m == 0 for x, c, m in zip(xs, self.residues, self.moduli))

    def evaluate(self, xs: Sequence[int]):
        if self.kind == PLUS_INF:
            return float("inf")
        if self.kind == MINUS_INF:
            return float("-inf")
        if len(xs) != self.arity:
            raise ValueError("arity mismatch")
        if not self.in_domain(xs):
            raise DomainError(f"{xs} not in domain of {self}")
        return self.offset + sum(
            a * ((x - c) // m) for a, x, c, m in zip(self.coeffs, xs, self.residues, self.moduli)
        )

    def plus_const(self, c: int) -> "ZLinearFunction":
        if self.kind != STANDARD:
            return self
        return ZLinearFunction(STANDARD, self.offset + c, self.coeffs, self.residues, self.moduli)

    def domain_modulus(self) -> int:
        out = 1
        for m in self.moduli:
            out = lcm(out, m)
        return out

    def domain_formula(self, x_vars: Sequence[str]) -> Formula:
        parts = [
            Cong(Term.var(v) - Term.of(c), m)
            for v, c, m in zip(x_vars, self.residues, self.moduli)
            if m > 1
        ]
        return conj(parts)

    def scaled_term(self, x_vars: Sequence[str], scale: int) -> Term:
        """scale * f(xbar) as an integer-linear term; scale must be a multiple
        of every domain modulus."""
        assert self.kind == STANDARD
        out = Term.of(scale * self.offset)
        for v, a, c, m in zip(x_vars, self.coeffs, self.residues, self.moduli):
            if scale % m:
                raise ValueError("scale not divisible by domain modulus")
            k = (scale // m) * a
            out = out + Term.make({v: k}, -k * c)
        return out

    def equals_formula(self, x_vars: Sequence[str], y: Term) -> Formula:
        """Order-free formula: y = f(xbar) and xbar in dom(f)."""
        assert self.kind == STANDARD
        s = self.domain_modulus()
        return simplify(
            And(self.domain_formula(x_vars), Eq(y.scale(s), self.scaled_term(x_vars, s)))
        )

    def le_formula(self, x_vars: Sequence[str], y: Term) -> Formula:
        """f(xbar) <= y (with the domain congruences); TOP/BOT for extremes."""
        if self.kind == MINUS_INF:
            return TOP
        if self.kind == PLUS_INF:
            return BOT
        s = self.domain_modulus()
        return simplify(
            And(self.domain_formula(x_vars), Le(self.scaled_term(x_vars, s), y.scale(s)))
        )

    def ge_formula(self, x_vars: Sequence[str], y: Term) -> Formula:
        """y <= f(xbar); TOP/BOT for extremes."""
        if self.kind == PLUS_INF:
            return TOP
        if self.kind == MINUS_INF:
            return BOT
        s = self.domain_modulus()
        return simplify(
            And(self.domain_formula(x_vars), Le(y.scale(s), self.scaled_term(x_vars, s)))
        )

    def to_affine(self) -> tuple[tuple, ...]:
        """Rational (coefficients, constant) of the underlying affine map."""
        from fractions import Fraction

        assert self.kind == STANDARD
        coeffs = tuple(Fraction(a, m) for a, m in zip(self.coeffs, self.moduli))
        const = Fraction(self.offset) - sum(
            (Fraction(a * c, m) for a, c, m in zip(self.coeffs, self.residues, self.moduli)),
            Fraction(0),
        )
        return coeffs, const


def zlin_le(
    f: ZLinearFunction, g: ZLinearFunction, x_vars: Sequence[str]
) -> Formula:
    """QF formula for f(xbar) <= g(xbar) on their common domain."""
    if f.kind == MINUS_INF or g.kind == PLUS_INF:
        return TOP
    if f.kind == PLUS_INF or g.kind == MINUS_INF:
        return BOT
    s = lcm(f.domain_modulus(), g.domain_modulus())
    return simplify(Le(f.scaled_term(x_vars, s), g.scaled_term(x_vars, s)))


@dataclass(frozen=True)
class CellTerm:
    """One summand X[lower, upper]^residue_modulus."""

    base: Formula
    lower: ZLinearFunction
    upper: ZLinearFunction
    residue: int
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 1 or not (0 <= self.residue < self.modulus):
            raise ValueError(f"residue {self.residue} not in [0, {self.modulus})")
        if self.lower.kind == PLUS_INF or self.upper.kind == MINUS_INF:
            raise ValueError("lower bound +inf or upper bound -inf")

    def semantics(self, x_vars: Sequence[str], y_var: str) -> Formula:
        y = Term.var(y_var)
        parts = [self.base]
        parts.append(self.lower.le_formula(x_vars, y))
        parts.append(self.upper.ge_formula(x_vars, y))
        if self.modulus > 1:
            parts.append(Cong(y - Term.of(self.residue), self.modulus))
        return simplify(conj(parts))

    def shift_down(self, d: int, new_modulus: int) -> "CellTerm":
        """Term for the slice y = d (mod new_modulus) of this term, re-based
        at residue 0: X[lower - d, upper - d] with modulus new_modulus."""
        return CellTerm(
            self.base,
            self.lower.plus_const(-d),
            self.upper.plus_const(-d),
            0,
            new_modulus,
        )


@dataclass(frozen=True)
class CellDecomposition:
    vars: tuple[str, ...]  # x variables then the fiber variable, in order
    terms: tuple[CellTerm, ...]

    @property
    def arity(self) -> int:
        return len(self.vars)

    @property
    def x_vars(self) -> tuple[str, ...]:
        return self.vars[:-1]

    @property
    def y_var(self) -> str:
        return self.vars[-1]

    def semantics(self) -> Formula:
        return simplify(
            disj([t.semantics(self.x_vars, self.y_var) for t in self.terms])
        )

    def to_json(self) -> dict:
        def fn_json(f: ZLinearFunction) -> dict:
            if f.kind != STANDARD:
                return {"kind": f.kind}
            return {
                "kind": f.kind,
                "u": f.offset,
                "a": list(f.coeffs),
                "c": list(f.residues),
                "m": list(f.moduli),
            }

        return {
            "arity": self.arity,
            "terms": [
                {
                    "base": t.base.render(),
                    "lower": fn_json(t.lower),
                    "upper": fn_json(t.upper),
                    "residue": t.residue,
                    "modulus": t.modulus,
                }
                for t in self.terms
            ],
        }


def eval_zlinear(f: ZLinearFunction, xs: Sequence[int]):
    """Value of a Z-linear function at a domain point (int or +-inf)."""
    return f.evaluate(xs)


def to_dnf(f: Formula) -> list[list[Formula]]:
    """Disjunctive normal form of a predicate-free QF formula; each inner
    list is a conjunction of positive atoms."""
    g = simplify(nnf(f, expand_mod_negations=True))
    if isinstance(g, Bot):
        return []
    if isinstance(g, Top):
        return [[]]

    def walk(h: Formula) -> list[list[Formula]]:
        if isinstance(h, Or):
            return walk(h.lhs) + walk(h.rhs)
        if isinstance(h, And):
            left = walk(h.lhs)
            right = walk(h.rhs)
            return [a + b for a in left for b in right]
        if isinstance(h, (Top,)):
            return [[]]
        if isinstance(h, (Bot,)):
            return []
        return [[h]]

    return walk(g)


def _solve_for(atom: Formula, y: str) -> tuple[str, int, Term, int]:
    """Normalize an atom to (kind, a, t, m) with a > 0:
    'low'  : t <= a*y
    'up'   : a*y <= t
    'eq'   : a*y = t
    'cong' : a*y - t = 0 (mod m)
    'base' : the atom does not actually constrain y (cancelled coefficient);
             t then carries the residual x-only content per kind encoded in m
             (0 = 'le 0', 1 = 'eq 0', else congruence modulus).
    """
    if isinstance(atom, (Le, Lt)):
        t = atom.lhs - atom.rhs
        if isinstance(atom, Lt):
            t = t + Term.of(1)  # l < r  <=>  l + 1 <= r
        a = t.coeff(y)
        if a == 0:
            return ("base", 0, t, 0)
        rest = t - Term.make({y: a})
        if a > 0:
            return ("up", a, -rest, 0)
        return ("low", -a, rest, 0)
    if isinstance(atom, Eq):
        t = atom.lhs - atom.rhs
        a = t.coeff(y)
        if a == 0:
            return ("base", 0, t, 1)
        rest = t - Term.make({y: a})
        if a > 0:
            return ("eq", a, -rest, 0)
        return ("eq", -a, rest, 0)
    if isinstance(atom, Cong):
        a = atom.term.coeff(y)
        if a == 0:
            return ("base", 0, atom.term, atom.modulus)
        rest = atom.term - Term.make({y: a})
        if a < 0:
            return ("cong", -a, rest, atom.modulus)
        return ("cong", a, -rest, atom.modulus)
    raise TypeError(f"cannot solve {atom} for {y}")


def _residual_atom(t: Term, marker: int) -> Formula:
    if marker == 0:
        return Le(t, Term.of(0))
    if marker == 1:
        return Eq(t, Term.of(0))
    return Cong(t, marker)


def _rounded_bound(
    t: Term, a: int, split_mod: int, rho: dict[str, int], x_vars: Sequence[str], round_up: bool
) -> ZLinearFunction:
    """Standard Z-linear function for ceil(t/a) (round_up) or floor(t/a) on
    the residue class x_i = rho_i (mod split_mod); requires a | split_mod."""
    stray = t.vars() - set(x_vars)
    if stray:
        raise ValueError(f"bound term mentions non-base variables {sorted(stray)}")
    t_at_rho = t.evaluate({v: rho.get(v, 0) for v in x_vars})
    v = t_at_rho % a
    adj = 1 if (round_up and v != 0) else 0
    offset = (t_at_rho - v) // a + adj
    coeffs = tuple(t.coeff(xv) * (split_mod // a) for xv in x_vars)
    residues = tuple(rho.get(xv, 0) % split_mod for xv in x_vars)
    moduli = (split_mod,) * len(x_vars)
    return ZLinearFunction(STANDARD, offset, coeffs, residues, moduli)


def _conjunct_terms(
    atoms: list[Formula], x_vars: tuple[str, ...], y: str
) -> list[CellTerm]:
    import itertools

    base_atoms = [a for a in atoms if y not in free_vars(a)]
    y_atoms = []
    for a in atoms:
        if y not in free_vars(a):
            continue
        solved = _solve_for(a, y)
        if solved[0] == "base":  # y cancelled out of the atom
            base_atoms.append(_residual_atom(solved[2], solved[3]))
        else:
            y_atoms.append(solved)

    a_star = 1
    for kind, a, _, _ in y_atoms:
        if kind in ("low", "up", "eq"):
            a_star = lcm(a_star, a)
    m_star = 1
    for kind, a, _, m in y_atoms:
        if kind == "cong":
            m_star = lcm(m_star, m)

    out: list[CellTerm] = []
    res_iter = (
        itertools.product(range(a_star), repeat=len(x_vars)) if a_star > 1 else [(0,) * len(x_vars)]
    )
    for rho_tuple in res_iter:
        rho = dict(zip(x_vars, rho_tuple))
        rho_atoms: list[Formula] = []
        if a_star > 1:
            rho_atoms = [
                Cong(Term.var(xv) - Term.of(r), a_star) for xv, r in zip(x_vars, rho_tuple)
            ]
        for s in range(m_star):
            case_atoms = list(base_atoms) + list(rho_atoms)
            lowers: list[ZLinearFunction] = []
            uppers: list[ZLinearFunction] = []
            dead = False
            for kind, a, t, m in y_atoms:
                if kind == "cong":
                    # a*y - t = 0 (mod m) and y = s (mod m_star), m | m_star:
                    # the condition becomes a*s - t = 0 (mod m) on xbar.
                    case_atoms.append(Cong(Term.of(a * s) - t, m))
                    continue
                if kind == "low":
                    lowers.append(_rounded_bound(t, a, a_star, rho, x_vars, round_up=True))
                elif kind == "up":
                    uppers.append(_rounded_bound(t, a, a_star, rho, x_vars, round_up=False))
                else:  # eq; a | a_star, so the residue split decides a | t
                    if a_star > 1:
                        t_at_rho = t.evaluate({v: rho.get(v, 0) for v in x_vars})
                        if t_at_rho % a != 0:
                            dead = True
                            break
                    lowers.append(_rounded_bound(t, a, a_star, rho, x_vars, round_up=True))
                    uppers.append(_rounded_bound(t, a, a_star, rho, x_vars, round_up=False))
            if dead:
                continue
            lowers = list(dict.fromkeys(lowers))
            uppers = list(dict.fromkeys(uppers))
            lo_choices: list[Optional[ZLinearFunction]] = list(lowers) or [None]
            up_choices: list[Optional[ZLinearFunction]] = list(uppers) or [None]
            for lo in lo_choices:
                for up in up_choices:
                    extra: list[Formula] = []
                    if lo is not None:
                        extra += [zlin_le(other, lo, x_vars) for other in lowers if other != lo]
                    if up is not None:
                        extra += [zlin_le(up, other, x_vars) for other in uppers if other != up]
                    base = simplify(conj(case_atoms + extra))
                    if isinstance(base, Bot):
                        continue
                    term = CellTerm(
                        base,
                        lo if lo is not None else ZLinearFunction.minus_inf(),
                        up if up is not None else ZLinearFunction.plus_inf(),
                        s % m_star,
                        m_star,
                    )
                    out.append(term)
    return out


def decompose(f: Formula, vars: Sequence[str]) -> CellDecomposition:
    """Cell decomposition of a QF predicate-free formula; the last variable
    is the fiber variable."""
    vars = tuple(vars)
    if not vars:
        raise ValueError("need at least one variable")
    stray = free_vars(f) - set(vars)
    if stray:
        raise ValueError(f"formula mentions undeclared variables {sorted(stray)}")
    x_vars, y = vars[:-1], vars[-1]
    terms: list[CellTerm] = []
    for conjunct in to_dnf(f):
        terms.extend(_conjunct_terms(conjunct, x_vars, y))
    return CellDecomposition(vars, tuple(terms))


def interval_nonempty_formula(t: CellTerm, x_vars: Sequence[str]) -> Formula:
    """QF condition on xbar: the congruence interval [lower, upper]^c_m is
    nonempty (given the base/domains, which the caller conjoins)."""
    f, g, c, m = t.lower, t.upper, t.residue, t.modulus
    if f.kind == MINUS_INF or g.kind == PLUS_INF:
        return TOP
    # first y >= f with y = c (mod m) is f + ((c - f) mod m); nonempty iff
    # g - f >= (c - f) mod m. Split on f's residue mod m.
    s = lcm(f.domain_modulus(), g.domain_modulus())
    f_term = f.scaled_term(x_vars, s)
    g_term = g.scaled_term(x_vars, s)
    if m == 1:
        return simplify(Le(f_term, g_term))
    cases = []
    for r in range(m):
        need = (c - r) % m
        cases.append(
            And(
                Cong(f_term - Term.of(s * r), s * m),
                Le(f_term + Term.of(s * need), g_term),
            )
        )
    return simplify(disj(cases))


def project(d: CellDecomposition) -> Formula:
    """QF formula over the x variables for the projection that forgets the
    fiber variable."""
    x_vars = d.x_vars
    parts = []
    for t in d.terms:
        parts.append(simplify(And(t.base, interval_nonempty_formula(t, x_vars))))
    return simplify(disj(parts))
