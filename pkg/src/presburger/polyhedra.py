"""Exact rational polyhedra in R^n and inscribed-ball (inradius) decisions.

A polyhedron is an intersection of finitely many half-spaces, each possibly
open. The inradius r(P) is the supremum of radii of closed balls inside P;
downstream only the finite/infinite distinction and a rational sandwich of
the value are consumed, so everything here stays in exact rational
arithmetic: inward shifts are weighted by the l1 norm of each face normal,
and the norm equivalence l2 <= l1 <= n*l2 turns the resulting LP optimum
into the sandwich lo <= r(P) <= n*lo. Open half-spaces collapse to closed
ones for inradius purposes (a ball of radius r in the closure shrinks to a
strictly interior ball of radius r/2), while emptiness honors strictness
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .arith import (
    LinConstraint,
    LinearSystem,
    LpBounded,
    LpInfeasible,
    LpUnbounded,
    Rat,
    feasible_point,
    lp_status,
)

PLUS = "+"
MINUS = "-"


@dataclass(frozen=True)
class AffineFunctional:
    """x -> const + coeffs . x"""

    coeffs: tuple[Rat, ...]
    const: Rat

    @staticmethod
    def make(coeffs: Sequence[Union[int, Rat]], const: Union[int, Rat] = 0) -> "AffineFunctional":
        return AffineFunctional(tuple(Fraction(c) for c in coeffs), Fraction(const))

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def __call__(self, point: Sequence[Rat]) -> Rat:
        return self.const + sum((c * x for c, x in zip(self.coeffs, point)), Fraction(0))

    def is_constant(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_linear(self) -> bool:
        return self.const == 0

    def l1_norm(self) -> Rat:
        return sum((abs(c) for c in self.coeffs), Fraction(0))

    def l2_norm_sq(self) -> Rat:
        return sum((c * c for c in self.coeffs), Fraction(0))

    def minus(self, b: Union[int, Rat]) -> "AffineFunctional":
        return AffineFunctional(self.coeffs, self.const - Fraction(b))

    def to_json(self) -> dict:
        return {"a": [str(c) for c in self.coeffs], "u": str(self.const)}


@dataclass(frozen=True)
class HalfSpace:
    """sign '+': f(x) >= 0 (closed) or f(x) > 0 (open); sign '-' mirrored."""

    functional: AffineFunctional
    sign: str
    closed: bool = True

    def __post_init__(self) -> None:
        if self.sign not in (PLUS, MINUS):
            raise ValueError(f"bad sign {self.sign}")
        if self.functional.is_constant():
            raise ValueError("half-space functional must be non-constant")

    def contains(self, point: Sequence[Rat]) -> bool:
        v = self.functional(point)
        if self.sign == PLUS:
            return v >= 0 if self.closed else v > 0
        return v <= 0 if self.closed else v < 0

    def constraint(self, honor_strict: bool = True) -> LinConstraint:
        f = self.functional
        rel = "<=" if (self.closed or not honor_strict) else "<"
        if self.sign == PLUS:  # f >= 0  <=>  -coeffs . x <= const
            return LinConstraint(tuple(-c for c in f.coeffs), f.const, rel)
        return LinConstraint(f.coeffs, -f.const, rel)

    def to_json(self) -> dict:
        return {"f": self.functional.to_json(), "sign": self.sign, "closed": self.closed}


@dataclass(frozen=True)
class Polyhedron:
    dim: int
    halfspaces: tuple[HalfSpace, ...]

    def __post_init__(self) -> None:
        for h in self.halfspaces:
            if h.functional.dim != self.dim:
                raise ValueError("half-space dimension mismatch")

    @staticmethod
    def of(dim: int, halfspaces: Iterable[HalfSpace]) -> "Polyhedron":
        return Polyhedron(dim, tuple(halfspaces))

    @staticmethod
    def whole_space(dim: int) -> "Polyhedron":
        return Polyhedron(dim, ())

    def contains(self, point: Sequence[Rat]) -> bool:
        return all(h.contains(point) for h in self.halfspaces)

    def system(self, honor_strict: bool = True) -> LinearSystem:
        return LinearSystem(tuple(h.constraint(honor_strict) for h in self.halfspaces), self.dim)

    def translate(self, shift: Sequence[Union[int, Rat]]) -> "Polyhedron":
        out = []
        for h in self.halfspaces:
            f = h.functional
            const = f.const + sum(
                (c * Fraction(s) for c, s in zip(f.coeffs, shift)), Fraction(0)
            )
            out.append(HalfSpace(AffineFunctional(f.coeffs, const), h.sign, h.closed))
        return Polyhedron(self.dim, tuple(out))

    def linear_image_inverse(self, matrix: Sequence[Sequence[int]]) -> "Polyhedron":
        """Polyhedron {y : M y in P} for an integer matrix M (columns =
        images of basis vectors)."""
        out = []
        for h in self.halfspaces:
            f = h.functional
            coeffs = tuple(
                sum((f.coeffs[i] * Fraction(matrix[i][j]) for i in range(self.dim)), Fraction(0))
                for j in range(len(matrix[0]))
            )
            out.append(HalfSpace(AffineFunctional(coeffs, f.const), h.sign, h.closed))
        return Polyhedron(len(matrix[0]), tuple(out))

    def to_json(self) -> list:
        return [h.to_json() for h in self.halfspaces]


@dataclass(frozen=True)
class Plank:
    """Points with lo <= f(x) <= hi for a non-constant linear functional."""

    functional: AffineFunctional
    lo: Rat
    hi: Rat

    def __post_init__(self) -> None:
        if not self.functional.is_linear() or self.functional.is_constant():
            raise ValueError("plank functional must be linear and non-constant")
        if self.lo > self.hi:
            raise ValueError("plank bounds out of order")

    def to_polyhedron(self) -> Polyhedron:
        f = self.functional
        return Polyhedron(
            f.dim,
            (
                HalfSpace(f.minus(self.lo), PLUS, True),
                HalfSpace(f.minus(self.hi), MINUS, True),
            ),
        )

    def half_thickness_sq(self) -> Rat:
        """Square of half the distance between the bounding hyperplanes,
        i.e. of the plank's inradius (hi - lo)^2 / (4 |a|^2)."""
        w = self.hi - self.lo
        return (w * w) / (4 * self.functional.l2_norm_sq())


def is_empty(p: Polyhedron) -> bool:
    return feasible_point(p.system(honor_strict=True)) is None


def _inradius_lp(p: Polyhedron) -> LinearSystem:
    """Variables (x_1..x_n, r): every face shifted inward by r times the l1
    norm of its normal, plus r >= 0. Strict faces are treated as closed."""
    cons = []
    for h in p.halfspaces:
        f = h.functional
        w = f.l1_norm()
        if h.sign == PLUS:  # f(x) >= r*w
            cons.append(LinConstraint(tuple(-c for c in f.coeffs) + (w,), f.const, "<="))
        else:  # f(x) <= -r*w
            cons.append(LinConstraint(f.coeffs + (w,), -f.const, "<="))
    zero = Fraction(0)
    cons.append(LinConstraint((zero,) * p.dim + (Fraction(-1),), zero, "<="))
    return LinearSystem(tuple(cons), p.dim + 1)


def inradius_infinite(p: Polyhedron) -> bool:
    """Whether p contains closed balls of arbitrarily large radius."""
    if is_empty(p):
        return False
    objective = (Fraction(0),) * p.dim + (Fraction(1),)
    status = lp_status(_inradius_lp(p), objective)
    assert not isinstance(status, LpInfeasible)  # nonempty closure admits r = 0
    return isinstance(status, LpUnbounded)


class InradiusError(ValueError):
    pass


def inradius_bounds(p: Polyhedron) -> tuple[Rat, Rat]:
    """(lo, hi) with lo <= r(P) <= hi and hi = dim * lo, for nonempty P of
    finite inradius."""
    if is_empty(p):
        raise InradiusError("empty polyhedron has no inradius bounds")
    objective = (Fraction(0),) * p.dim + (Fraction(1),)
    status = lp_status(_inradius_lp(p), objective)
    if isinstance(status, LpUnbounded):
        raise InradiusError("infinite inradius")
    assert isinstance(status, LpBounded)
    lo = status.optimum
    return lo, lo * p.dim


def chebyshev_witness(p: Polyhedron) -> tuple[Rat, tuple[Rat, ...]]:
    """(r_lo, center): a ball of radius r_lo around center fits inside the
    closure of p (l1-weighted certificate)."""
    objective = (Fraction(0),) * p.dim + (Fraction(1),)
    status = lp_status(_inradius_lp(p), objective)
    if not isinstance(status, LpBounded):
        raise InradiusError("no finite certificate")
    return status.optimum, status.witness[: p.dim]


def opposite_system(
    functionals: Sequence[AffineFunctional],
    offsets: Sequence[Union[int, Rat]],
    closed_flags: Sequence[bool],
) -> tuple[Polyhedron, Polyhedron]:
    """The pair of polyhedra cut out by the same shifted functionals with all
    signs positive resp. all signs negative."""
    if not (len(functionals) == len(offsets) == len(closed_flags)):
        raise ValueError("length mismatch")
    for f in functionals:
        if not f.is_linear():
            raise ValueError("opposite systems take linear functionals")
    dim = functionals[0].dim if functionals else 0
    plus = []
    minus = []
    for f, b, closed in zip(functionals, offsets, closed_flags):
        shifted = f.minus(b)
        plus.append(HalfSpace(shifted, PLUS, closed))
        minus.append(HalfSpace(shifted, MINUS, closed))
    return Polyhedron(dim, tuple(plus)), Polyhedron(dim, tuple(minus))
