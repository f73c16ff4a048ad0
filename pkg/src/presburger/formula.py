"""First-order formulas over (Z, +, -, 0, 1, <, congruences) plus named set
predicates: terms, AST nodes, a parser for the ASCII grammar, a stable
pretty-printer, capture-avoiding substitution, predicate unfolding, and a
structural simplifier.

Grammar (ASCII)::

    formula := 'E' var '.' formula | 'A' var '.' formula
             | formula binop formula | '!' formula | '(' formula ')' | atom
    binop   := '&' | '|' | '->' | '<->'     (precedence ! > & > | > -> > <->)
    atom    := term rel term | term '=' term 'mod' nat | ident '(' term* ')'
    rel     := '=' | '<=' | '<' | '>=' | '>' | '!='
    term    := term '+' term | term '-' term | nat '*' var | '-' term | nat | var

'E' and 'A' are reserved; quantifier bodies extend as far right as possible.
Comparisons are normalized at parse time (>= and > swap sides, != becomes a
negated equality) and two-sided congruences t1 = t2 mod m are stored as
one-sided atoms t1 - t2 = 0 mod m.
"""

from __future__ import annotations

from collections.abc import Mapping as _AbcMapping
from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Term:
    """Integer-linear combination of variables plus a constant.

    ``coeffs`` is a sorted tuple of (variable, nonzero coefficient) pairs, so
    structurally equal terms are semantically equal and vice versa.
    """

    coeffs: tuple[tuple[str, int], ...]
    const: int

    @staticmethod
    def make(coeffs: Mapping[str, int] | Iterable[tuple[str, int]] = (), const: int = 0) -> "Term":
        acc: dict[str, int] = {}
        items = coeffs.items() if isinstance(coeffs, _AbcMapping) else coeffs
        for v, c in items:
            if not v:
                raise ValueError("empty variable name")
            acc[v] = acc.get(v, 0) + int(c)
        cleaned = tuple(sorted((v, c) for v, c in acc.items() if c != 0))
        return Term(cleaned, int(const))

    @staticmethod
    def var(name: str) -> "Term":
        return Term.make({name: 1})

    @staticmethod
    def of(value: int) -> "Term":
        return Term.make({}, value)

    def coeff(self, var: str) -> int:
        for v, c in self.coeffs:
            if v == var:
                return c
        return 0

    def vars(self) -> set[str]:
        return {v for v, _ in self.coeffs}

    def is_const(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "Term") -> "Term":
        return Term.make(list(self.coeffs) + list(other.coeffs), self.const + other.const)

    def __sub__(self, other: "Term") -> "Term":
        return self + (-other)

    def __neg__(self) -> "Term":
        return Term(tuple((v, -c) for v, c in self.coeffs), -self.const)

    def scale(self, k: int) -> "Term":
        if k == 0:
            return Term.of(0)
        return Term(tuple((v, k * c) for v, c in self.coeffs), k * self.const)

    def substitute(self, bindings: Mapping[str, "Term"]) -> "Term":
        out = Term.of(self.const)
        for v, c in self.coeffs:
            if v in bindings:
                out = out + bindings[v].scale(c)
            else:
                out = out + Term.make({v: c})
        return out

    def evaluate(self, point: Mapping[str, int]) -> int:
        return self.const + sum(c * point[v] for v, c in self.coeffs)

    def render(self) -> str:
        if not self.coeffs:
            return str(self.const)
        parts: list[str] = []
        for i, (v, c) in enumerate(self.coeffs):
            mag = f"{abs(c)}*{v}" if abs(c) != 1 else v
            if i == 0:
                parts.append(f"-{mag}" if c < 0 else mag)
            else:
                parts.append(f"- {mag}" if c < 0 else f"+ {mag}")
        if self.const:
            parts.append(f"- {abs(self.const)}" if self.const < 0 else f"+ {self.const}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.render()


# ---------------------------------------------------------------------------
# Formula nodes


class Formula:
    """Base class; all nodes are immutable dataclasses."""

    __slots__ = ()

    def free_vars(self) -> set[str]:
        return free_vars(self)

    def render(self) -> str:
        return render(self)

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Eq(Formula):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Le(Formula):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Lt(Formula):
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Cong(Formula):
    """term = 0 (mod modulus); modulus >= 1."""

    term: Term
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError(f"congruence modulus must be >= 1, got {self.modulus}")


@dataclass(frozen=True)
class Pred(Formula):
    name: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Or(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Implies(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Iff(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


TOP = Top()
BOT = Bot()

ATOM_TYPES = (Top, Bot, Eq, Le, Lt, Cong, Pred)


def conj(parts: Sequence[Formula]) -> Formula:
    """Left-nested conjunction of a list (TOP when empty)."""
    out: Optional[Formula] = None
    for p in parts:
        out = p if out is None else And(out, p)
    return TOP if out is None else out


def disj(parts: Sequence[Formula]) -> Formula:
    out: Optional[Formula] = None
    for p in parts:
        out = p if out is None else Or(out, p)
    return BOT if out is None else out


def free_vars(f: Formula) -> set[str]:
    if isinstance(f, (Top, Bot)):
        return set()
    if isinstance(f, (Eq, Le, Lt)):
        return f.lhs.vars() | f.rhs.vars()
    if isinstance(f, Cong):
        return f.term.vars()
    if isinstance(f, Pred):
        out: set[str] = set()
        for t in f.args:
            out |= t.vars()
        return out
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return free_vars(f.lhs) | free_vars(f.rhs)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"unknown node {type(f)}")


def all_vars(f: Formula) -> set[str]:
    """Free and bound variable names occurring anywhere."""
    if isinstance(f, (Exists, Forall)):
        return all_vars(f.body) | {f.var}
    if isinstance(f, Not):
        return all_vars(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return all_vars(f.lhs) | all_vars(f.rhs)
    return free_vars(f)


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Exists, Forall)):
        return False
    if isinstance(f, Not):
        return is_quantifier_free(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return is_quantifier_free(f.lhs) and is_quantifier_free(f.rhs)
    return True


def is_predicate_free(f: Formula) -> bool:
    if isinstance(f, Pred):
        return False
    if isinstance(f, Not):
        return is_predicate_free(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return is_predicate_free(f.lhs) and is_predicate_free(f.rhs)
    if isinstance(f, (Exists, Forall)):
        return is_predicate_free(f.body)
    return True


def has_order_atom(f: Formula) -> bool:
    """True when the formula contains a < or <= atom anywhere."""
    if isinstance(f, (Le, Lt)):
        return True
    if isinstance(f, Not):
        return has_order_atom(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return has_order_atom(f.lhs) or has_order_atom(f.rhs)
    if isinstance(f, (Exists, Forall)):
        return has_order_atom(f.body)
    return False


def fresh_name(base: str, used: set[str]) -> str:
    if base not in used:
        return base
    i = 1
    while f"{base}_{i}" in used:
        i += 1
    return f"{base}_{i}"


def substitute(f: Formula, bindings: Mapping[str, Term]) -> Formula:
    """Capture-avoiding simultaneous substitution of terms for free variables."""
    bindings = {v: t for v, t in bindings.items() if t != Term.var(v)}
    if not bindings:
        return f
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, Eq):
        return Eq(f.lhs.substitute(bindings), f.rhs.substitute(bindings))
    if isinstance(f, Le):
        return Le(f.lhs.substitute(bindings), f.rhs.substitute(bindings))
    if isinstance(f, Lt):
        return Lt(f.lhs.substitute(bindings), f.rhs.substitute(bindings))
    if isinstance(f, Cong):
        return Cong(f.term.substitute(bindings), f.modulus)
    if isinstance(f, Pred):
        return Pred(f.name, tuple(t.substitute(bindings) for t in f.args))
    if isinstance(f, Not):
        return Not(substitute(f.body, bindings))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(substitute(f.lhs, bindings), substitute(f.rhs, bindings))
    if isinstance(f, (Exists, Forall)):
        inner = {v: t for v, t in bindings.items() if v != f.var}
        if not inner:
            return f
        relevant = {v for v in free_vars(f.body) if v in inner}
        if not relevant:
            return f
        captured = set()
        for v in relevant:
            captured |= inner[v].vars()
        var = f.var
        body = f.body
        if var in captured:
            used = all_vars(body) | captured | set(inner.keys())
            nv = fresh_name(var, used)
            body = substitute(body, {var: Term.var(nv)})
            var = nv
        return type(f)(var, substitute(body, inner))
    raise TypeError(f"unknown node {type(f)}")


# ---------------------------------------------------------------------------
# Predicate environments


@dataclass(frozen=True)
class PredicateDef:
    """Named n-ary predicate: a defining formula, an oracle callable, or both.

    ``params`` lists the formal argument variables of ``body`` in order.
    """

    name: str
    params: tuple[str, ...]
    body: Optional[Formula] = None
    oracle: Optional[Callable[..., bool]] = None

    @property
    def arity(self) -> int:
        return len(self.params)

    def __post_init__(self) -> None:
        if self.body is not None:
            extra = free_vars(self.body) - set(self.params)
            if extra:
                raise ValueError(f"predicate {self.name} body has stray free variables {sorted(extra)}")


class PredicateEnv:
    """Mapping from predicate names to definitions."""

    def __init__(self, defs: Iterable[PredicateDef] = ()) -> None:
        self.defs: dict[str, PredicateDef] = {}
        for d in defs:
            self.add(d)

    def add(self, d: PredicateDef) -> None:
        self.defs[d.name] = d

    def get(self, name: str) -> PredicateDef:
        if name not in self.defs:
            raise KeyError(f"undeclared predicate {name}")
        return self.defs[name]

    def __contains__(self, name: str) -> bool:
        return name in self.defs


EMPTY_ENV = PredicateEnv()


class UnfoldError(ValueError):
    pass


def unfold_predicates(f: Formula, env: PredicateEnv, _stack: tuple[str, ...] = ()) -> Formula:
    """Replace every predicate atom by its defining formula, transitively.

    Raises UnfoldError on opaque (oracle-only) predicates or cyclic
    definitions.
    """
    if isinstance(f, Pred):
        if f.name in _stack:
            raise UnfoldError(f"cyclic predicate definition through {f.name}")
        d = env.get(f.name)
        if d.body is None:
            raise UnfoldError(f"predicate {f.name} has no defining formula")
        if len(f.args) != d.arity:
            raise UnfoldError(f"predicate {f.name} arity mismatch")
        body = unfold_predicates(d.body, env, _stack + (f.name,))
        return substitute(body, dict(zip(d.params, f.args)))
    if isinstance(f, Not):
        return Not(unfold_predicates(f.body, env, _stack))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(
            unfold_predicates(f.lhs, env, _stack), unfold_predicates(f.rhs, env, _stack)
        )
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, unfold_predicates(f.body, env, _stack))
    return f


# ---------------------------------------------------------------------------
# Rendering

_PREC_IFF = 1
_PREC_IMPLIES = 2
_PREC_OR = 3
_PREC_AND = 4
_PREC_UNARY = 5


def render(f: Formula) -> str:
    return _render(f, 0)


def _render(f: Formula, ctx: int) -> str:
    if isinstance(f, (Top, Bot, Eq, Le, Lt, Cong)):
        if isinstance(f, Top):
            s = "0 = 0"
        elif isinstance(f, Bot):
            s = "0 = 1"
        elif isinstance(f, Eq):
            s = f"{f.lhs.render()} = {f.rhs.render()}"
        elif isinstance(f, Le):
            s = f"{f.lhs.render()} <= {f.rhs.render()}"
        elif isinstance(f, Lt):
            s = f"{f.lhs.render()} < {f.rhs.render()}"
        else:
            s = f"{f.term.render()} = 0 mod {f.modulus}"
        return f"({s})" if ctx > _PREC_UNARY else s
    if isinstance(f, Pred):
        return f"{f.name}({', '.join(t.render() for t in f.args)})"
    if isinstance(f, Not):
        return f"!{_render(f.body, _PREC_UNARY + 1)}"
    if isinstance(f, And):
        s = f"{_render(f.lhs, _PREC_AND)} & {_render(f.rhs, _PREC_AND + 1)}"
        return f"({s})" if ctx > _PREC_AND else s
    if isinstance(f, Or):
        s = f"{_render(f.lhs, _PREC_OR)} | {_render(f.rhs, _PREC_OR + 1)}"
        return f"({s})" if ctx > _PREC_OR else s
    if isinstance(f, Implies):
        s = f"{_render(f.lhs, _PREC_IMPLIES + 1)} -> {_render(f.rhs, _PREC_IMPLIES)}"
        return f"({s})" if ctx > _PREC_IMPLIES else s
    if isinstance(f, Iff):
        s = f"{_render(f.lhs, _PREC_IFF + 1)} <-> {_render(f.rhs, _PREC_IFF)}"
        return f"({s})" if ctx > _PREC_IFF else s
    if isinstance(f, Exists):
        s = f"E {f.var}. {_render(f.body, 0)}"
        return f"({s})" if ctx > 0 else s
    if isinstance(f, Forall):
        s = f"A {f.var}. {_render(f.body, 0)}"
        return f"({s})" if ctx > 0 else s
    raise TypeError(f"unknown node {type(f)}")


# ---------------------------------------------------------------------------
# Parsing


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


@dataclass
class _Token:
    kind: str  # ident | nat | sym | end
    text: str
    line: int
    col: int


_SYMBOLS = ["<->", "->", "<=", ">=", "!=", "(", ")", ".", ",", "+", "-", "*", "&", "|", "!", "=", "<", ">"]


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("nat", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(_Token("sym", sym, line, col))
                col += len(sym)
                i += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], env: Optional[PredicateEnv]) -> None:
        self.tokens = tokens
        self.pos = 0
        self.env = env

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    def expect_sym(self, sym: str) -> None:
        tok = self.next()
        if tok.kind != "sym" or tok.text != sym:
            raise ParseError(f"expected {sym!r}, found {tok.text!r}", tok.line, tok.col)

    def at_sym(self, *syms: str) -> bool:
        tok = self.peek()
        return tok.kind == "sym" and tok.text in syms

    # formula := iff-chain, right associative at each binop level
    def parse_formula(self) -> Formula:
        lhs = self.parse_implies()
        if self.at_sym("<->"):
            self.next()
            return Iff(lhs, self.parse_formula())
        return lhs

    def parse_implies(self) -> Formula:
        lhs = self.parse_or()
        if self.at_sym("->"):
            self.next()
            return Implies(lhs, self.parse_implies())
        return lhs

    def parse_or(self) -> Formula:
        out = self.parse_and()
        while self.at_sym("|"):
            self.next()
            out = Or(out, self.parse_and())
        return out

    def parse_and(self) -> Formula:
        out = self.parse_unary()
        while self.at_sym("&"):
            self.next()
            out = And(out, self.parse_unary())
        return out

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "sym" and tok.text == "!":
            self.next()
            return Not(self.parse_unary())
        if tok.kind == "ident" and tok.text in ("E", "A"):
            # 'E'/'A' are reserved as quantifiers, but 'A(' is a predicate
            # application (predicates may reuse the letters; variables may not).
            after = self.tokens[self.pos + 1]
            if not (after.kind == "sym" and after.text == "("):
                self.next()
                var_tok = self.next()
                if var_tok.kind != "ident" or var_tok.text in ("E", "A"):
                    raise ParseError("expected variable after quantifier", var_tok.line, var_tok.col)
                self.expect_sym(".")
                body = self.parse_formula()
                return Exists(var_tok.text, body) if tok.text == "E" else Forall(var_tok.text, body)
        if tok.kind == "sym" and tok.text == "(":
            # parenthesized formula or a term comparison starting with '('?
            # the grammar has no parenthesized terms, so '(' opens a formula.
            self.next()
            inner = self.parse_formula()
            self.expect_sym(")")
            return inner
        return self.parse_atom()

    def parse_atom(self) -> Formula:
        tok = self.peek()
        if (
            tok.kind == "ident"
            and tok.text != "mod"
            and self.tokens[self.pos + 1].kind == "sym"
            and self.tokens[self.pos + 1].text == "("
        ):
            name_tok = self.next()
            self.next()  # consume '('
            args = [self.parse_term()]
            while self.at_sym(","):
                self.next()
                args.append(self.parse_term())
            self.expect_sym(")")
            if self.env is not None and name_tok.text in self.env:
                d = self.env.get(name_tok.text)
                if d.arity != len(args):
                    raise ParseError(
                        f"predicate {name_tok.text} expects {d.arity} arguments, got {len(args)}",
                        name_tok.line,
                        name_tok.col,
                    )
            return Pred(name_tok.text, tuple(args))
        lhs = self.parse_term()
        rel_tok = self.next()
        if rel_tok.kind != "sym" or rel_tok.text not in ("=", "<=", "<", ">=", ">", "!="):
            raise ParseError(f"expected comparison, found {rel_tok.text!r}", rel_tok.line, rel_tok.col)
        rhs = self.parse_term()
        if rel_tok.text == "=" and self.peek().kind == "ident" and self.peek().text == "mod":
            self.next()
            mod_tok = self.next()
            if mod_tok.kind != "nat":
                raise ParseError("expected a natural number modulus", mod_tok.line, mod_tok.col)
            modulus = int(mod_tok.text)
            if modulus < 1:
                raise ParseError("modulus must be >= 1", mod_tok.line, mod_tok.col)
            return Cong(lhs - rhs, modulus)
        if rel_tok.text == "=":
            return Eq(lhs, rhs)
        if rel_tok.text == "<=":
            return Le(lhs, rhs)
        if rel_tok.text == "<":
            return Lt(lhs, rhs)
        if rel_tok.text == ">=":
            return Le(rhs, lhs)
        if rel_tok.text == ">":
            return Lt(rhs, lhs)
        return Not(Eq(lhs, rhs))

    def parse_term(self) -> Term:
        out = self.parse_term_factor()
        while self.at_sym("+", "-"):
            op = self.next().text
            rhs = self.parse_term_factor()
            out = out + rhs if op == "+" else out - rhs
        return out

    def parse_term_factor(self) -> Term:
        tok = self.peek()
        if tok.kind == "sym" and tok.text == "-":
            self.next()
            return -self.parse_term_factor()
        if tok.kind == "nat":
            self.next()
            if self.at_sym("*"):
                self.next()
                var_tok = self.next()
                if var_tok.kind != "ident" or var_tok.text in ("E", "A", "mod"):
                    raise ParseError("expected variable after '*'", var_tok.line, var_tok.col)
                return Term.make({var_tok.text: int(tok.text)})
            return Term.of(int(tok.text))
        if tok.kind == "ident" and tok.text not in ("E", "A", "mod"):
            self.next()
            return Term.var(tok.text)
        raise ParseError(f"expected a term, found {tok.text!r}", tok.line, tok.col)


def parse(text: str, env: Optional[PredicateEnv] = None) -> Formula:
    """Parse a formula; predicate arities are checked against env when given."""
    parser = _Parser(_tokenize(text), env)
    f = parser.parse_formula()
    tok = parser.peek()
    if tok.kind != "end":
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return f


def parse_term(text: str) -> Term:
    parser = _Parser(_tokenize(text), None)
    t = parser.parse_term()
    tok = parser.peek()
    if tok.kind != "end":
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return t


# ---------------------------------------------------------------------------
# Structural simplification


def _prune_conjunction(parts: list[Formula]) -> Optional[list[Formula]]:
    """Pairwise reasoning over the atoms of a conjunction (assumed already
    individually simplified, so order atoms have the shape d <= 0 and
    equalities the shape e = 0). Detects contradictions whose witness is a
    constant combination of two atoms and drops atoms implied by a stronger
    one. Returns None for an unsatisfiable conjunction."""
    les: list[tuple[int, Term]] = []
    eqs: list[tuple[int, Term]] = []
    congs: list[tuple[int, Term, int]] = []
    for i, g in enumerate(parts):
        if isinstance(g, Le) and g.rhs == Term.of(0):
            les.append((i, g.lhs))
        elif isinstance(g, Eq) and g.rhs == Term.of(0):
            eqs.append((i, g.lhs))
        elif isinstance(g, Cong):
            congs.append((i, g.term, g.modulus))
    if len(les) + len(eqs) + len(congs) > 80:
        return parts
    dead: set[int] = set()
    for a in range(len(les)):
        i, d1 = les[a]
        if i in dead:
            continue
        for b in range(a + 1, len(les)):
            j, d2 = les[b]
            if j in dead:
                continue
            s = d1 + d2
            if s.is_const() and s.const > 0:
                return None
            diff = d1 - d2
            if diff.is_const():
                # d1 = d2 + c: c >= 0 makes d1 <= 0 the stronger atom
                if diff.const >= 0:
                    dead.add(j)
                else:
                    dead.add(i)
                    break
    for a in range(len(eqs)):
        i, e1 = eqs[a]
        for b in range(a + 1, len(eqs)):
            _, e2 = eqs[b]
            for comb in (e1 - e2, e1 + e2):
                if comb.is_const() and comb.const != 0:
                    return None
    for i, e in eqs:
        for j, d in les:
            if j in dead:
                continue
            for comb in (d - e, d + e):
                if comb.is_const():
                    if comb.const > 0:
                        return None
                    dead.add(j)
        for j, t, m in congs:
            if j in dead:
                continue
            for comb in (t - e, t + e):
                if comb.is_const():
                    if comb.const % m != 0:
                        return None
                    dead.add(j)
    for a in range(len(congs)):
        i, t1, m1 = congs[a]
        for b in range(a + 1, len(congs)):
            j, t2, m2 = congs[b]
            if m1 == m2:
                for comb in (t1 - t2, t1 + t2):
                    if comb.is_const() and comb.const % m1 != 0:
                        return None
    if not dead:
        return parts
    return [g for i, g in enumerate(parts) if i not in dead]


def simplify(f: Formula) -> Formula:
    """Bottom-up constant folding and pruning.

    Evaluates ground atoms, reduces congruence coefficients modulo the
    modulus, flattens and deduplicates conjunctions/disjunctions, removes
    double negations and vacuous quantifiers. Purely structural; equivalence
    is preserved node by node.
    """
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, Eq):
        d = f.lhs - f.rhs
        if d.is_const():
            return TOP if d.const == 0 else BOT
        g = 0
        for _, c in d.coeffs:
            g = gcd(g, c)
        if d.const % g:
            return BOT
        if g > 1:
            d = Term(tuple((v, c // g) for v, c in d.coeffs), d.const // g)
        return Eq(d, Term.of(0))
    if isinstance(f, (Le, Lt)):
        d = f.lhs - f.rhs  # d <= 0 resp. d < 0
        if isinstance(f, Lt):
            d = d + Term.of(1)  # discreteness: d < 0 iff d + 1 <= 0
        if d.is_const():
            return TOP if d.const <= 0 else BOT
        g = 0
        for _, c in d.coeffs:
            g = gcd(g, c)
        if g > 1:
            # sum g*c_i x_i <= -const  tightens to  sum c_i x_i <= floor(-const/g)
            d = Term(tuple((v, c // g) for v, c in d.coeffs), -((-d.const) // g))
        return Le(d, Term.of(0))
    if isinstance(f, Cong):
        if f.modulus == 1:
            return TOP
        m = f.modulus
        g = m
        for _, c in f.term.coeffs:
            g = gcd(g, c)
        term = f.term
        if g > 1 and term.const % g == 0:
            term = Term(tuple((v, c // g) for v, c in term.coeffs), term.const // g)
            m = m // g
        if m == 1:
            return TOP
        reduced = Term.make({v: c % m for v, c in term.coeffs}, term.const % m)
        if reduced.is_const():
            return TOP if reduced.const % m == 0 else BOT
        return Cong(reduced, m)
    if isinstance(f, Pred):
        return f
    if isinstance(f, Not):
        body = simplify(f.body)
        if isinstance(body, Top):
            return BOT
        if isinstance(body, Bot):
            return TOP
        if isinstance(body, Not):
            return body.body
        return Not(body)
    if isinstance(f, And):
        parts: list[Formula] = []
        seen: set[Formula] = set()

        def collect_and(g: Formula) -> bool:
            if isinstance(g, And):
                return collect_and(g.lhs) and collect_and(g.rhs)
            g = simplify(g)
            if isinstance(g, Bot):
                return False
            if isinstance(g, Top) or g in seen:
                return True
            if isinstance(g, And):
                return collect_and(g)
            seen.add(g)
            parts.append(g)
            return True

        if not collect_and(f):
            return BOT
        pruned = _prune_conjunction(parts)
        if pruned is None:
            return BOT
        return conj(pruned)
    if isinstance(f, Or):
        parts = []
        seen = set()

        def collect_or(g: Formula) -> bool:
            if isinstance(g, Or):
                return collect_or(g.lhs) and collect_or(g.rhs)
            g = simplify(g)
            if isinstance(g, Top):
                return False
            if isinstance(g, Bot) or g in seen:
                return True
            if isinstance(g, Or):
                return collect_or(g)
            seen.add(g)
            parts.append(g)
            return True

        if not collect_or(f):
            return TOP
        return disj(parts)
    if isinstance(f, Implies):
        lhs = simplify(f.lhs)
        rhs = simplify(f.rhs)
        if isinstance(lhs, Bot) or isinstance(rhs, Top):
            return TOP
        if isinstance(lhs, Top):
            return rhs
        if isinstance(rhs, Bot):
            return simplify(Not(lhs))
        return Implies(lhs, rhs)
    if isinstance(f, Iff):
        lhs = simplify(f.lhs)
        rhs = simplify(f.rhs)
        if isinstance(lhs, Top):
            return rhs
        if isinstance(rhs, Top):
            return lhs
        if isinstance(lhs, Bot):
            return simplify(Not(rhs))
        if isinstance(rhs, Bot):
            return simplify(Not(lhs))
        if lhs == rhs:
            return TOP
        return Iff(lhs, rhs)
    if isinstance(f, (Exists, Forall)):
        body = simplify(f.body)
        if isinstance(body, (Top, Bot)):
            return body
        if f.var not in free_vars(body):
            return body
        return type(f)(f.var, body)
    raise TypeError(f"unknown node {type(f)}")
