"""Brute-force ground truth: evaluate formulas at integer points and on boxes.

This is the independent oracle the symbolic machinery is tested against.
Quantifier-free evaluation is exact. Quantified variables range over a
bounded interval [-Q, Q]; the bound escalates (Q, 2Q, 4Q, ...) and a point's
value is reported once two consecutive rungs agree, otherwise the point is
*unknown*. The sound path for quantified formulas is quantifier elimination
first, this evaluator second - the bounded evaluator exists precisely to
test the elimination independently.

Evaluation is vectorized with numpy. Each variable owns one broadcast axis,
so a subformula only pays for the variables it actually mentions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .formula import (
    And,
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
    PredicateEnv,
    EMPTY_ENV,
    Term,
    Top,
    free_vars,
    is_quantifier_free,
)

_CHUNK_TARGET = 1 << 21  # elements per quantifier chunk


class UnknownError(ValueError):
    """Bounded quantifier evaluation failed to stabilize."""


@dataclass(frozen=True)
class Box:
    """Closed integer box: one [lo, hi] interval per variable, in order."""

    vars: tuple[str, ...]
    bounds: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if len(self.vars) != len(self.bounds):
            raise ValueError("vars/bounds length mismatch")
        for lo, hi in self.bounds:
            if lo > hi:
                raise ValueError(f"empty interval [{lo}, {hi}]")

    @staticmethod
    def cube(vars: Sequence[str], radius: int) -> "Box":
        return Box(tuple(vars), tuple((-radius, radius) for _ in vars))

    @property
    def radius(self) -> int:
        return max((max(abs(lo), abs(hi)) for lo, hi in self.bounds), default=0)

    def size(self) -> int:
        n = 1
        for lo, hi in self.bounds:
            n *= hi - lo + 1
        return n

    def points(self):
        """Lexicographic enumeration of integer points."""
        import itertools

        return itertools.product(*(range(lo, hi + 1) for lo, hi in self.bounds))


@dataclass(frozen=True)
class EvalConfig:
    """quantifier_bound None means the default heuristic bound:
    4 * (1 + max |coefficient|) * (1 + max |constant|) * (1 + radius)."""

    quantifier_bound: Optional[int] = None
    escalation_steps: int = 3

    def __post_init__(self) -> None:
        if self.quantifier_bound is not None and self.quantifier_bound < 0:
            raise ValueError("quantifier_bound must be >= 0")
        if self.escalation_steps < 1:
            raise ValueError("escalation_steps must be >= 1")


DEFAULT_CONFIG = EvalConfig()


def _formula_magnitudes(f: Formula) -> tuple[int, int]:
    """(max |coefficient|, max |constant|) over all terms of the formula."""
    max_c, max_u = 0, 0

    def term(t: Term) -> None:
        nonlocal max_c, max_u
        for _, c in t.coeffs:
            max_c = max(max_c, abs(c))
        max_u = max(max_u, abs(t.const))

    def walk(g: Formula) -> None:
        if isinstance(g, (Eq, Le, Lt)):
            term(g.lhs)
            term(g.rhs)
        elif isinstance(g, Cong):
            term(g.term)
        elif isinstance(g, Pred):
            for t in g.args:
                term(t)
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, (And, Or, Implies, Iff)):
            walk(g.lhs)
            walk(g.rhs)
        elif isinstance(g, (Exists, Forall)):
            walk(g.body)

    walk(f)
    return max_c, max_u


def default_bound(f: Formula, radius: int) -> int:
    max_c, max_u = _formula_magnitudes(f)
    return 4 * (1 + max_c) * (1 + max_u) * (1 + radius)


def _eval_term(t: Term, arrays: Mapping[str, np.ndarray]) -> np.ndarray:
    out: np.ndarray = np.asarray(np.int64(t.const))
    for v, c in t.coeffs:
        out = out + np.int64(c) * arrays[v]
    return out


def _eval_bounded(
    f: Formula, arrays: dict[str, np.ndarray], env: PredicateEnv, q: int
) -> np.ndarray:
    """Evaluate with every quantifier ranging over [-q, q]. Exact for that
    bounded semantics."""
    if isinstance(f, Top):
        return np.asarray(True)
    if isinstance(f, Bot):
        return np.asarray(False)
    if isinstance(f, Eq):
        return _eval_term(f.lhs, arrays) == _eval_term(f.rhs, arrays)
    if isinstance(f, Le):
        return _eval_term(f.lhs, arrays) <= _eval_term(f.rhs, arrays)
    if isinstance(f, Lt):
        return _eval_term(f.lhs, arrays) < _eval_term(f.rhs, arrays)
    if isinstance(f, Cong):
        return _eval_term(f.term, arrays) % f.modulus == 0
    if isinstance(f, Pred):
        d = env.get(f.name)
        if len(f.args) != d.arity:
            raise ValueError(f"predicate {f.name} arity mismatch")
        arg_arrays = [_eval_term(t, arrays) for t in f.args]
        if d.body is not None:
            inner = dict(zip(d.params, arg_arrays))
            return _eval_bounded(d.body, inner, env, q)
        if d.oracle is not None:
            fn = np.frompyfunc(d.oracle, d.arity, 1)
            return np.asarray(fn(*np.broadcast_arrays(*arg_arrays))).astype(bool)
        raise ValueError(f"predicate {f.name} has neither body nor oracle")
    if isinstance(f, Not):
        return ~_eval_bounded(f.body, arrays, env, q)
    if isinstance(f, And):
        return _eval_bounded(f.lhs, arrays, env, q) & _eval_bounded(f.rhs, arrays, env, q)
    if isinstance(f, Or):
        return _eval_bounded(f.lhs, arrays, env, q) | _eval_bounded(f.rhs, arrays, env, q)
    if isinstance(f, Implies):
        return ~_eval_bounded(f.lhs, arrays, env, q) | _eval_bounded(f.rhs, arrays, env, q)
    if isinstance(f, Iff):
        return _eval_bounded(f.lhs, arrays, env, q) == _eval_bounded(f.rhs, arrays, env, q)
    if isinstance(f, (Exists, Forall)):
        is_exists = isinstance(f, Exists)
        shape = np.broadcast_shapes(*(a.shape for a in arrays.values())) if arrays else ()
        grid_cells = int(np.prod(shape, dtype=np.int64)) if shape else 1
        chunk = max(1, _CHUNK_TARGET // max(grid_cells, 1))
        values = np.arange(-q, q + 1, dtype=np.int64)
        acc: Optional[np.ndarray] = None
        outer = {v: a[..., None] for v, a in arrays.items()}
        for start in range(0, len(values), chunk):
            outer[f.var] = values[start : start + chunk]
            part = _eval_bounded(f.body, outer, env, q)
            part = part.any(axis=-1) if is_exists else part.all(axis=-1)
            if acc is None:
                acc = part
            else:
                acc = (acc | part) if is_exists else (acc & part)
        assert acc is not None
        return np.broadcast_to(acc, shape) if shape else acc
    raise TypeError(f"unknown node {type(f)}")


def _eval_with_ladder(
    f: Formula, arrays: dict[str, np.ndarray], env: PredicateEnv, cfg: EvalConfig, radius: int
) -> tuple[np.ndarray, np.ndarray]:
    """Returns (values, stable-mask). QF formulas are exact and fully stable."""
    if is_quantifier_free(f):
        vals = _eval_bounded(f, arrays, env, 0)
        shape = np.broadcast_shapes(*(a.shape for a in arrays.values())) if arrays else ()
        vals = np.broadcast_to(vals, shape)
        return vals, np.ones(shape, dtype=bool)
    q = cfg.quantifier_bound if cfg.quantifier_bound is not None else default_bound(f, radius)
    q = max(q, 1)
    prev = _eval_bounded(f, arrays, env, q)
    stable = np.zeros(prev.shape, dtype=bool)
    for _ in range(cfg.escalation_steps - 1):
        q *= 2
        cur = _eval_bounded(f, arrays, env, q)
        stable |= prev == cur
        prev = cur
        if stable.all():
            break
    return prev, stable


def _box_arrays(box: Box) -> dict[str, np.ndarray]:
    n = len(box.vars)
    arrays = {}
    for i, (v, (lo, hi)) in enumerate(zip(box.vars, box.bounds)):
        shape = [1] * n
        shape[i] = hi - lo + 1
        arrays[v] = np.arange(lo, hi + 1, dtype=np.int64).reshape(shape)
    return arrays


def evaluate(
    f: Formula,
    point: Mapping[str, int],
    env: PredicateEnv = EMPTY_ENV,
    cfg: EvalConfig = DEFAULT_CONFIG,
) -> Optional[bool]:
    """Truth value at a point; None when bounded evaluation is unstable."""
    missing = free_vars(f) - set(point)
    if missing:
        raise ValueError(f"point does not assign {sorted(missing)}")
    arrays = {v: np.asarray(np.int64(x)) for v, x in point.items()}
    radius = max((abs(int(x)) for x in point.values()), default=0)
    vals, stable = _eval_with_ladder(f, arrays, env, cfg, radius)
    if not bool(stable.reshape(()).item()) and not is_quantifier_free(f):
        return None
    return bool(vals.reshape(()).item())


def evaluate_on_box(
    f: Formula,
    box: Box,
    env: PredicateEnv = EMPTY_ENV,
    cfg: EvalConfig = DEFAULT_CONFIG,
) -> np.ndarray:
    """Boolean array over the box grid (axes in box variable order).

    Raises UnknownError if any grid point fails to stabilize.
    """
    missing = free_vars(f) - set(box.vars)
    if missing:
        raise ValueError(f"box does not cover {sorted(missing)}")
    arrays = _box_arrays(box)
    shape = tuple(hi - lo + 1 for lo, hi in box.bounds)
    vals, stable = _eval_with_ladder(f, arrays, env, cfg, box.radius)
    vals = np.broadcast_to(vals, shape)
    stable = np.broadcast_to(stable, shape)
    if not stable.all():
        idx = np.argwhere(~stable)[0]
        point = tuple(int(box.bounds[i][0] + idx[i]) for i in range(len(box.vars)))
        raise UnknownError(f"evaluation of {f} unstable at {dict(zip(box.vars, point))}")
    return np.asarray(vals)


def set_on_box(
    f: Formula,
    box: Box,
    env: PredicateEnv = EMPTY_ENV,
    cfg: EvalConfig = DEFAULT_CONFIG,
) -> list[tuple[int, ...]]:
    """All box points satisfying f, in lexicographic order."""
    vals = evaluate_on_box(f, box, env, cfg)
    out = []
    for idx in np.argwhere(vals):
        out.append(tuple(int(box.bounds[i][0] + idx[i]) for i in range(len(box.vars))))
    return out


def equiv_on_box(
    f: Formula,
    g: Formula,
    box: Box,
    env: PredicateEnv = EMPTY_ENV,
    cfg: EvalConfig = DEFAULT_CONFIG,
) -> Optional[tuple[int, ...]]:
    """None when f and g agree on the whole box, else the lexicographically
    first differing point."""
    fv = evaluate_on_box(f, box, env, cfg)
    gv = evaluate_on_box(g, box, env, cfg)
    diff = fv != gv
    if not diff.any():
        return None
    idx = np.argwhere(diff)[0]
    return tuple(int(box.bounds[i][0] + idx[i]) for i in range(len(box.vars)))
