"""The algebra of order-free-definable subsets of Z^n: lattices, cosets,
rank, coordinate bijections, and the quasi-coset normal form.

A *quasi-coset* is a coset of a subgroup of Z^n minus a definable part of
strictly smaller rank; the rank of a set is the least k such that it fits in
a finite union of rank-<=k cosets (empty set: -1). Every Boolean combination
of linear equations and congruences over Z^n is a finite union of
quasi-cosets, and this module implements that normal form constructively:
union is concatenation, intersection reduces to coset intersection via
integer linear system solving, complementation enumerates the finitely many
residues of a full-rank subgroup, and lower-rank content is rectified by
moving through the coordinate bijection of its carrier coset into a smaller
ambient power of Z.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .arith import IntMatrix, lattice_hnf_basis, snf, solve_diophantine
from .formula import (
    And,
    BOT,
    Bot,
    Cong,
    Eq,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    TOP,
    Top,
    Term,
    conj,
    disj,
    free_vars,
    has_order_atom,
    simplify,
)

ZERO = 0


class GroupSetError(ValueError):
    pass


@dataclass(frozen=True)
class Lattice:
    """Subgroup of Z^n given by an HNF basis (rows independent, zero-free)."""

    ambient: int
    basis: IntMatrix

    def __post_init__(self) -> None:
        if self.basis.rows and self.basis.cols != self.ambient:
            raise ValueError("basis width must match ambient dimension")

    @staticmethod
    def from_generators(ambient: int, rows: Iterable[Sequence[int]]) -> "Lattice":
        rows = [tuple(r) for r in rows]
        for r in rows:
            if len(r) != ambient:
                raise ValueError("generator length mismatch")
        if not rows:
            return Lattice(ambient, IntMatrix(()))
        return Lattice(ambient, lattice_hnf_basis(IntMatrix.from_rows(rows)))

    @staticmethod
    def full(ambient: int) -> "Lattice":
        return Lattice(ambient, IntMatrix.identity(ambient))

    @staticmethod
    def trivial(ambient: int) -> "Lattice":
        return Lattice(ambient, IntMatrix(()))

    @property
    def rank(self) -> int:
        return self.basis.rows

    def pivots(self) -> list[tuple[int, int]]:
        """(column, pivot value) per basis row; columns strictly increase."""
        out = []
        for row in self.basis.entries:
            j = next(i for i, x in enumerate(row) if x != 0)
            out.append((j, row[j]))
        return out

    def coordinates(self, v: Sequence[int]) -> Optional[tuple[int, ...]]:
        """Integer coordinates of v in the basis, or None if v is outside."""
        if all(x == 0 for x in v):
            return (0,) * self.rank
        if self.rank == 0:
            return None
        pivots = self.pivots()
        if all(a < b for (a, _), (b, _) in zip(pivots, pivots[1:])):
            # echelon basis: back-substitute along the staircase
            residual = list(v)
            coords = []
            for i, (col, piv) in enumerate(pivots):
                q, r = divmod(residual[col], piv)
                if r:
                    return None
                coords.append(q)
                if q:
                    row = self.basis.entries[i]
                    for j in range(col, self.ambient):
                        residual[j] -= q * row[j]
            if any(residual):
                return None
            return tuple(coords)
        res = solve_diophantine(self.basis.transpose(), list(v))
        if res is None:
            return None
        return res[0]

    def contains(self, v: Sequence[int]) -> bool:
        return self.coordinates(v) is not None

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(row) for row in other.basis.entries)

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        """Canonical representative of v modulo the lattice."""
        out = list(v)
        for i, (col, piv) in enumerate(self.pivots()):
            q = out[col] // piv
            if q:
                row = self.basis.entries[i]
                for j in range(self.ambient):
                    out[j] -= q * row[j]
        return tuple(out)

    def index_in_full(self) -> Optional[int]:
        """[Z^n : L], finite iff the rank equals the ambient dimension."""
        if self.rank != self.ambient:
            return None
        det = 1
        for _, piv in self.pivots():
            det *= piv
        return abs(det)

    def residues(self) -> list[tuple[int, ...]]:
        """Canonical coset representatives of Z^n / L (full rank only)."""
        import itertools

        if self.rank != self.ambient:
            raise GroupSetError("residue enumeration needs a full-rank lattice")
        ranges = [range(piv) for _, piv in self.pivots()]
        return [tuple(r) for r in itertools.product(*ranges)]

    def intersect(self, other: "Lattice") -> "Lattice":
        if self.ambient != other.ambient:
            raise ValueError("ambient mismatch")
        if self.rank == 0 or other.rank == 0:
            return Lattice.trivial(self.ambient)
        stacked = IntMatrix.from_rows(
            [
                tuple(row1) + tuple(-x for x in row2)
                for row1, row2 in zip(
                    self.basis.transpose().entries, other.basis.transpose().entries
                )
            ]
        )
        res = solve_diophantine(stacked, [0] * self.ambient)
        assert res is not None
        _, kernel = res
        gens = []
        for krow in kernel.entries:
            t = krow[: self.rank]
            gens.append(
                tuple(
                    sum(t[i] * self.basis.entries[i][j] for i in range(self.rank))
                    for j in range(self.ambient)
                )
            )
        return Lattice.from_generators(self.ambient, gens)


@dataclass(frozen=True)
class Coset:
    """offset + lattice, with the offset reduced canonically so equal cosets
    have equal representations."""

    offset: tuple[int, ...]
    lattice: Lattice

    @staticmethod
    def make(offset: Sequence[int], lattice: Lattice) -> "Coset":
        if len(offset) != lattice.ambient:
            raise ValueError("offset length mismatch")
        return Coset(lattice.reduce(offset), lattice)

    @staticmethod
    def point(offset: Sequence[int]) -> "Coset":
        return Coset.make(offset, Lattice.trivial(len(offset)))

    @staticmethod
    def full(ambient: int) -> "Coset":
        return Coset.make((0,) * ambient, Lattice.full(ambient))

    @property
    def ambient(self) -> int:
        return self.lattice.ambient

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def contains(self, v: Sequence[int]) -> bool:
        return self.lattice.contains([x - o for x, o in zip(v, self.offset)])

    def intersect(self, other: "Coset") -> Optional["Coset"]:
        if self.ambient != other.ambient:
            raise ValueError("ambient mismatch")
        k1, k2 = self.rank, other.rank
        diff = [b - a for a, b in zip(self.offset, other.offset)]
        if k1 == 0 and k2 == 0:
            return self if all(d == 0 for d in diff) else None
        if k1 == 0:
            return self if other.contains(self.offset) else None
        if k2 == 0:
            return other if self.contains(other.offset) else None
        cols = []
        for j in range(k1):
            cols.append([self.lattice.basis.entries[j][i] for i in range(self.ambient)])
        for j in range(k2):
            cols.append([-other.lattice.basis.entries[j][i] for i in range(self.ambient)])
        a = IntMatrix.from_rows(list(zip(*cols)))
        res = solve_diophantine(a, diff)
        if res is None:
            return None
        x0, _ = res
        t = x0[:k1]
        point = tuple(
            o + sum(t[i] * self.lattice.basis.entries[i][j] for i in range(k1))
            for j, o in enumerate(self.offset)
        )
        return Coset.make(point, self.lattice.intersect(other.lattice))


@dataclass(frozen=True)
class QuasiCoset:
    """coset minus a strictly lower-rank definable part contained in it."""

    coset: Coset
    removed: "GroupSet"

    def __post_init__(self) -> None:
        if self.removed.ambient != self.coset.ambient:
            raise ValueError("ambient mismatch")
        if self.removed.rank() >= self.coset.rank and self.removed.pieces:
            raise GroupSetError(
                f"removed part of rank {self.removed.rank()} inside a rank "
                f"{self.coset.rank} coset"
            )
        for piece in self.removed.pieces:
            if not (
                self.coset.contains(piece.coset.offset)
                and self.coset.lattice.contains_lattice(piece.coset.lattice)
            ):
                raise GroupSetError("removed part escapes its carrier coset")

    @property
    def ambient(self) -> int:
        return self.coset.ambient

    @property
    def rank(self) -> int:
        return self.coset.rank

    def contains(self, v: Sequence[int]) -> bool:
        return self.coset.contains(v) and not self.removed.contains(v)


@dataclass(frozen=True)
class GroupSet:
    """Finite union of quasi-cosets (possibly overlapping); empty = empty set."""

    ambient: int
    pieces: tuple[QuasiCoset, ...]

    def __post_init__(self) -> None:
        for p in self.pieces:
            if p.ambient != self.ambient:
                raise ValueError("ambient mismatch")

    @staticmethod
    def empty(ambient: int) -> "GroupSet":
        return GroupSet(ambient, ())

    @staticmethod
    def full(ambient: int) -> "GroupSet":
        return GroupSet(ambient, (QuasiCoset(Coset.full(ambient), GroupSet.empty(ambient)),))

    @staticmethod
    def of_coset(c: Coset) -> "GroupSet":
        return GroupSet(c.ambient, (QuasiCoset(c, GroupSet.empty(c.ambient)),))

    def rank(self) -> int:
        return max((p.rank for p in self.pieces), default=-1)

    def contains(self, v: Sequence[int]) -> bool:
        return any(p.contains(v) for p in self.pieces)

    def union(self, other: "GroupSet") -> "GroupSet":
        if self.ambient != other.ambient:
            raise ValueError("ambient mismatch")
        merged = list(dict.fromkeys(self.pieces + other.pieces))
        return GroupSet(self.ambient, tuple(merged))

    def intersect(self, other: "GroupSet") -> "GroupSet":
        out = GroupSet.empty(self.ambient)
        for p in self.pieces:
            for q in other.pieces:
                out = out.union(_intersect_qc(p, q))
        return out

    def complement(self) -> "GroupSet":
        out = GroupSet.full(self.ambient)
        for p in self.pieces:
            out = out.intersect(_complement_qc(p))
        return out

    def to_json(self) -> dict:
        def coset_json(c: Coset) -> dict:
            return {"offset": list(c.offset), "basis": [list(r) for r in c.lattice.basis.entries]}

        def qc_json(p: QuasiCoset) -> dict:
            return {"coset": coset_json(p.coset), "removed": [qc_json(q) for q in p.removed.pieces]}

        return {"ambient": self.ambient, "pieces": [qc_json(p) for p in self.pieces]}


def _restrict_to_coset(gs: GroupSet, c: Coset) -> GroupSet:
    return gs.intersect(GroupSet.of_coset(c))


def coset_minus(c: Coset, removed: GroupSet) -> GroupSet:
    """The difference c \\ removed as a union of quasi-cosets; removed need
    not be lower rank (the carrier is rectified into Z^rank when it is not)."""
    removed = _restrict_to_coset(removed, c)
    if not removed.pieces:
        return GroupSet.of_coset(c)
    if removed.rank() < c.rank:
        return GroupSet(c.ambient, (QuasiCoset(c, removed),))
    # Same-rank removal: move into Z^k through the coordinate bijection of c,
    # complement there, and pull the result back.
    alpha = c.lattice.basis
    image = phi_image_groupset(removed, alpha, c.offset)
    comp = image.complement()
    return phi_preimage_groupset(comp, alpha, c.offset)


def _intersect_qc(p: QuasiCoset, q: QuasiCoset) -> GroupSet:
    e = p.coset.intersect(q.coset)
    if e is None:
        return GroupSet.empty(p.ambient)
    removed = p.removed.union(q.removed)
    return coset_minus(e, removed)


def _complement_of_coset(c: Coset) -> GroupSet:
    n = c.ambient
    if c.rank == n:
        rep = c.lattice.reduce(c.offset)
        pieces = []
        for r in c.lattice.residues():
            if r != rep:
                pieces.append(QuasiCoset(Coset.make(r, c.lattice), GroupSet.empty(n)))
        return GroupSet(n, tuple(pieces))
    full = Coset.full(n)
    return GroupSet(n, (QuasiCoset(full, GroupSet.of_coset(c)),))


def _complement_qc(p: QuasiCoset) -> GroupSet:
    return p.removed.union(_complement_of_coset(p.coset))


# ---------------------------------------------------------------------------
# Coordinate bijections


def phi_apply(alpha: IntMatrix, base: Sequence[int], x: Sequence[int]) -> tuple[int, ...]:
    """Coordinates (a_1..a_k) with x = base + sum a_t * alpha_t. The rows of
    alpha must be linearly independent but need not be in normal form."""
    diff = [xi - bi for xi, bi in zip(x, base)]
    if alpha.rows == 0:
        if all(d == 0 for d in diff):
            return ()
        raise GroupSetError(f"{tuple(x)} is not the base point {tuple(base)}")
    coords = Lattice(len(base), alpha).coordinates(diff)
    if coords is None:
        raise GroupSetError(f"{tuple(x)} is not in the coset {tuple(base)} + <alpha>")
    return coords


def phi_invert(alpha: IntMatrix, base: Sequence[int], coords: Sequence[int]) -> tuple[int, ...]:
    if len(coords) != alpha.rows:
        raise ValueError("coordinate length mismatch")
    return tuple(
        b + sum(coords[i] * alpha.entries[i][j] for i in range(alpha.rows))
        for j, b in enumerate(base)
    )


def phi_image_groupset(gs: GroupSet, alpha: IntMatrix, base: Sequence[int]) -> GroupSet:
    """Image of a group set contained in base + <alpha> under the coordinate
    bijection onto Z^k."""
    k = alpha.rows
    pieces = []
    for p in gs.pieces:
        off = phi_apply(alpha, base, p.coset.offset)
        rows = []
        for row in p.coset.lattice.basis.entries:
            coords = Lattice(len(base), alpha).coordinates(row)
            if coords is None:
                raise GroupSetError("piece lattice escapes the carrier coset")
            rows.append(coords)
        lat = Lattice.from_generators(k, rows)
        removed = phi_image_groupset(p.removed, alpha, base)
        pieces.extend(coset_minus(Coset.make(off, lat), removed).pieces)
    return GroupSet(k, tuple(dict.fromkeys(pieces)))


def phi_preimage_groupset(gs: GroupSet, alpha: IntMatrix, base: Sequence[int]) -> GroupSet:
    """Preimage under the same bijection: coordinates back into Z^n."""
    n = len(base)
    pieces = []
    for p in gs.pieces:
        off = phi_invert(alpha, base, p.coset.offset)
        rows = [
            phi_invert(alpha, (0,) * n, row) for row in p.coset.lattice.basis.entries
        ]
        lat = Lattice.from_generators(n, rows)
        removed = phi_preimage_groupset(p.removed, alpha, base)
        pieces.extend(coset_minus(Coset.make(off, lat), removed).pieces)
    return GroupSet(n, tuple(dict.fromkeys(pieces)))


# ---------------------------------------------------------------------------
# Formulas -> group sets and back


def _atom_groupset(f: Formula, vars: tuple[str, ...]) -> GroupSet:
    n = len(vars)
    if isinstance(f, Eq):
        d = f.lhs - f.rhs
        coeffs = [d.coeff(v) for v in vars]
        res = solve_diophantine(IntMatrix.from_rows([coeffs]), [-d.const])
        if res is None:
            return GroupSet.empty(n)
        x0, kernel = res
        return GroupSet.of_coset(Coset.make(x0, Lattice.from_generators(n, kernel.entries)))
    if isinstance(f, Cong):
        d = f.term
        coeffs = [d.coeff(v) for v in vars] + [f.modulus]
        res = solve_diophantine(IntMatrix.from_rows([coeffs]), [-d.const])
        if res is None:
            return GroupSet.empty(n)
        x0, kernel = res
        rows = [row[:n] for row in kernel.entries]
        return GroupSet.of_coset(Coset.make(x0[:n], Lattice.from_generators(n, rows)))
    raise TypeError(f"unexpected atom {f}")


def from_boolean_combination(f: Formula, vars: Sequence[str]) -> GroupSet:
    """Group set of an order-free formula (equalities and congruences under
    arbitrary Boolean connectives)."""
    vars = tuple(vars)
    if has_order_atom(f):
        raise GroupSetError("order atom present; the set is not group-language definable")
    stray = free_vars(f) - set(vars)
    if stray:
        raise GroupSetError(f"formula mentions undeclared variables {sorted(stray)}")
    f = simplify(f)
    return _build_groupset(f, vars)


def _build_groupset(f: Formula, vars: tuple[str, ...]) -> GroupSet:
    n = len(vars)
    if isinstance(f, Top):
        return GroupSet.full(n)
    if isinstance(f, Bot):
        return GroupSet.empty(n)
    if isinstance(f, (Eq, Cong)):
        return _atom_groupset(f, vars)
    if isinstance(f, Not):
        return _build_groupset(f.body, vars).complement()
    if isinstance(f, And):
        return _build_groupset(f.lhs, vars).intersect(_build_groupset(f.rhs, vars))
    if isinstance(f, Or):
        return _build_groupset(f.lhs, vars).union(_build_groupset(f.rhs, vars))
    if isinstance(f, Implies):
        return _build_groupset(Or(Not(f.lhs), f.rhs), vars)
    if isinstance(f, Iff):
        return _build_groupset(Or(And(f.lhs, f.rhs), And(Not(f.lhs), Not(f.rhs))), vars)
    raise TypeError(f"unsupported node {type(f)} in group formula")


def coset_formula(c: Coset, vars: Sequence[str]) -> Formula:
    """Order-free membership formula for a coset via the Smith normal form of
    its lattice basis: unimodular coordinates w = (x - offset) V satisfy
    d_i | w_i on the diagonal block and w_i = 0 beyond the rank."""
    vars = tuple(vars)
    n = c.ambient
    diffs = [Term.var(v) - Term.of(o) for v, o in zip(vars, c.offset)]
    k = c.rank
    if k == 0:
        return conj([Eq(d, Term.of(0)) for d in diffs])
    dmat, _, vmat = snf(c.lattice.basis)
    parts: list[Formula] = []
    for i in range(n):
        w_i = Term.of(0)
        for j in range(n):
            coeff = vmat.entries[j][i]
            if coeff:
                w_i = w_i + diffs[j].scale(coeff)
        if i < k:
            d_i = dmat.entries[i][i]
            if d_i > 1:
                parts.append(Cong(w_i, d_i))
        else:
            parts.append(Eq(w_i, Term.of(0)))
    return simplify(conj(parts))


def to_formula(gs: GroupSet, vars: Sequence[str]) -> Formula:
    """Order-free defining formula of a group set."""
    parts = []
    for p in gs.pieces:
        inner = coset_formula(p.coset, vars)
        if p.removed.pieces:
            inner = And(inner, Not(to_formula(p.removed, vars)))
        parts.append(inner)
    return simplify(disj(parts))
