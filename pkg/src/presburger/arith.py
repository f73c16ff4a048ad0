"""Exact integer/rational linear algebra: Hermite and Smith normal forms,
linear Diophantine systems, and Fourier-Motzkin based rational LP.

Everything here is exact: integers are Python ints, rationals are
``fractions.Fraction``. Matrices are small (dimensions on the order of a
formula's arity), so the quadratic/cubic classical algorithms are fine.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

Rat = Fraction


# ---------------------------------------------------------------------------
# Integer matrices


@dataclass(frozen=True)
class IntMatrix:
    """Immutable rectangular integer matrix (tuple-of-row-tuples)."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.entries:
            width = len(self.entries[0])
            if any(len(row) != width for row in self.entries):
                raise ValueError("ragged matrix")

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @staticmethod
    def from_rows(rows: Iterable[Iterable[int]]) -> "IntMatrix":
        return IntMatrix(tuple(tuple(int(x) for x in row) for row in rows))

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @staticmethod
    def zero(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(0 for _ in range(cols)) for _ in range(rows)))

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.entries)) if self.entries else ())

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        ot = other.transpose()
        return IntMatrix(
            tuple(
                tuple(sum(a * b for a, b in zip(row, col)) for col in ot.entries)
                for row in self.entries
            )
        )

    def mul_vec(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.entries)

    def det(self) -> int:
        """Determinant by fraction-free Bareiss elimination (square only)."""
        n = self.rows
        if n != self.cols:
            raise ValueError("determinant of non-square matrix")
        if n == 0:
            return 1
        a = [list(row) for row in self.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def is_unimodular(self) -> bool:
        return self.rows == self.cols and abs(self.det()) == 1


def _swap_rows(mat: list[list[int]], i: int, j: int) -> None:
    mat[i], mat[j] = mat[j], mat[i]


def _addmul_row(mat: list[list[int]], dst: int, src: int, q: int) -> None:
    if q:
        row_s = mat[src]
        row_d = mat[dst]
        for k in range(len(row_d)):
            row_d[k] += q * row_s[k]


def _neg_row(mat: list[list[int]], i: int) -> None:
    mat[i] = [-x for x in mat[i]]


def hnf(m: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``H = U @ m``, ``U`` unimodular, ``H`` in upper
    echelon form with positive pivots and the entries above each pivot
    reduced into ``[0, pivot)``. Zero rows sink to the bottom, so dropping
    them yields a canonical basis of the row lattice.
    """
    r, c = m.rows, m.cols
    h = [list(row) for row in m.entries]
    u = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    row = 0
    for col in range(c):
        live = [i for i in range(row, r) if h[i][col] != 0]
        if not live:
            continue
        # Euclidean passes until a single nonzero entry remains in this column.
        while len(live) > 1:
            live.sort(key=lambda i: abs(h[i][col]))
            base = live[0]
            for i in live[1:]:
                q = h[i][col] // h[base][col]
                _addmul_row(h, i, base, -q)
                _addmul_row(u, i, base, -q)
            live = [i for i in live if h[i][col] != 0]
        pivot_row = live[0]
        if pivot_row != row:
            _swap_rows(h, row, pivot_row)
            _swap_rows(u, row, pivot_row)
        if h[row][col] < 0:
            _neg_row(h, row)
            _neg_row(u, row)
        for i in range(row):
            q = h[i][col] // h[row][col]
            _addmul_row(h, i, row, -q)
            _addmul_row(u, i, row, -q)
        row += 1
    return IntMatrix.from_rows(h), IntMatrix.from_rows(u)


def snf(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form.

    Returns ``(D, U, V)`` with ``D = U @ m @ V``, ``U`` and ``V`` unimodular,
    ``D`` diagonal with nonnegative entries satisfying ``d1 | d2 | ...``
    (trailing zeros allowed). The pivot at each step is reduced until it
    divides every entry of the remaining submatrix, which is what forces the
    divisibility chain.
    """
    r, c = m.rows, m.cols
    a = [list(row) for row in m.entries]
    u = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    v = [[1 if i == j else 0 for j in range(c)] for i in range(c)]

    def swap_cols(i: int, j: int) -> None:
        for row_ in a:
            row_[i], row_[j] = row_[j], row_[i]
        for row_ in v:
            row_[i], row_[j] = row_[j], row_[i]

    def addmul_col(dst: int, src: int, q: int) -> None:
        if q:
            for row_ in a:
                row_[dst] += q * row_[src]
            for row_ in v:
                row_[dst] += q * row_[src]

    t = 0
    while t < min(r, c):
        # Locate a nonzero entry of minimal magnitude in the trailing block.
        best = None
        for i in range(t, r):
            for j in range(t, c):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        if best[0] != t:
            _swap_rows(a, t, best[0])
            _swap_rows(u, t, best[0])
        if best[1] != t:
            swap_cols(t, best[1])

        while True:
            # Clear column t with row operations; a nonzero remainder becomes
            # the new (smaller) pivot.
            restart = False
            for i in range(t + 1, r):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    _addmul_row(a, i, t, -q)
                    _addmul_row(u, i, t, -q)
                    if a[i][t] != 0:
                        _swap_rows(a, t, i)
                        _swap_rows(u, t, i)
                        restart = True
                        break
            if restart:
                continue
            for j in range(t + 1, c):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    addmul_col(j, t, -q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        restart = True
                        break
            if restart:
                continue
            # Row and column are clear; force pivot | submatrix.
            witness = None
            for i in range(t + 1, r):
                for j in range(t + 1, c):
                    if a[i][j] % a[t][t] != 0:
                        witness = i
                        break
                if witness is not None:
                    break
            if witness is None:
                break
            _addmul_row(a, t, witness, 1)
            _addmul_row(u, t, witness, 1)
        if a[t][t] < 0:
            _neg_row(a, t)
            _neg_row(u, t)
        t += 1
    return IntMatrix.from_rows(a), IntMatrix.from_rows(u), IntMatrix.from_rows(v)


def solve_diophantine(
    a: IntMatrix, b: Sequence[int]
) -> Optional[tuple[tuple[int, ...], IntMatrix]]:
    """Solve ``a @ x = b`` over the integers.

    Returns ``(x0, kernel_basis)`` where ``kernel_basis`` rows generate
    ``{x : a @ x = 0}``, or ``None`` when the system has no solution.
    """
    if a.rows != len(b):
        raise ValueError("right-hand side length mismatch")
    d, u, v = snf(a)
    c2 = u.mul_vec(b)
    n = a.cols
    rank = 0
    while rank < min(a.rows, n) and d.entries[rank][rank] != 0:
        rank += 1
    y = [0] * n
    for i in range(a.rows):
        if i < rank:
            di = d.entries[i][i]
            if c2[i] % di != 0:
                return None
            y[i] = c2[i] // di
        elif c2[i] != 0:
            return None
    x0 = v.mul_vec(y)
    kernel_rows = [v.col(j) for j in range(rank, n)]
    return x0, IntMatrix.from_rows(kernel_rows)


def lattice_hnf_basis(generators: IntMatrix) -> IntMatrix:
    """Canonical HNF basis of the lattice spanned by the given rows
    (zero rows dropped)."""
    h, _ = hnf(generators)
    rows = [row for row in h.entries if any(x != 0 for x in row)]
    return IntMatrix.from_rows(rows)


# ---------------------------------------------------------------------------
# Exact rational linear systems (Fourier-Motzkin)

Relation = str  # one of "=", "<=", "<"


@dataclass(frozen=True)
class LinConstraint:
    """``coeffs . x  rel  const`` with rel one of =, <=, <."""

    coeffs: tuple[Rat, ...]
    const: Rat
    rel: Relation

    def __post_init__(self) -> None:
        if self.rel not in ("=", "<=", "<"):
            raise ValueError(f"bad relation {self.rel!r}")

    def holds_at(self, point: Sequence[Rat]) -> bool:
        lhs = sum((c * x for c, x in zip(self.coeffs, point)), Fraction(0))
        if self.rel == "=":
            return lhs == self.const
        if self.rel == "<=":
            return lhs <= self.const
        return lhs < self.const


def constraint(coeffs: Sequence[Union[int, Rat]], const: Union[int, Rat], rel: Relation) -> LinConstraint:
    return LinConstraint(tuple(Fraction(c) for c in coeffs), Fraction(const), rel)


@dataclass(frozen=True)
class LinearSystem:
    constraints: tuple[LinConstraint, ...]
    dim: int

    def __post_init__(self) -> None:
        for c in self.constraints:
            if len(c.coeffs) != self.dim:
                raise ValueError("constraint dimension mismatch")


def system(constraints: Iterable[LinConstraint], dim: int) -> LinearSystem:
    return LinearSystem(tuple(constraints), dim)


def _combine(upper: LinConstraint, lower: LinConstraint, j: int) -> LinConstraint:
    """Positive combination of an upper (coeff>0) and lower (coeff<0)
    constraint on variable j that cancels x_j."""
    cu = upper.coeffs[j]
    cl = lower.coeffs[j]
    # (-cl) * upper + cu * lower, both multipliers positive.
    mu, ml = -cl, cu
    coeffs = tuple(mu * a + ml * b for a, b in zip(upper.coeffs, lower.coeffs))
    const = mu * upper.const + ml * lower.const
    rel = "<" if ("<" in (upper.rel, lower.rel)) else "<="
    return LinConstraint(coeffs, const, rel)


def _substitute_eq(c: LinConstraint, eq: LinConstraint, j: int) -> LinConstraint:
    """Use equality eq (with eq.coeffs[j] != 0) to eliminate x_j from c."""
    factor = c.coeffs[j] / eq.coeffs[j]
    coeffs = tuple(a - factor * b for a, b in zip(c.coeffs, eq.coeffs))
    return LinConstraint(coeffs, c.const - factor * eq.const, c.rel)


def feasible_point(sys: LinearSystem) -> Optional[tuple[Rat, ...]]:
    """Exact feasibility via Fourier-Motzkin; returns a witness or None.

    Strict inequalities are honored exactly: derived constraints are strict
    when either parent is, and the witness is reconstructed by picking
    interval midpoints during back-substitution.
    """
    n = sys.dim
    constraints = list(sys.constraints)
    trace: list[tuple] = []  # per-variable elimination record, in order
    for j in range(n):
        group = [c for c in constraints if c.coeffs[j] != 0]
        rest = [c for c in constraints if c.coeffs[j] == 0]
        eq = next((c for c in group if c.rel == "="), None)
        if eq is not None:
            constraints = rest + [_substitute_eq(c, eq, j) for c in group if c is not eq]
            trace.append(("eq", j, eq))
            continue
        uppers = [c for c in group if c.coeffs[j] > 0]
        lowers = [c for c in group if c.coeffs[j] < 0]
        constraints = rest + [_combine(up, lo, j) for up in uppers for lo in lowers]
        trace.append(("ineq", j, lowers, uppers))
    for c in constraints:
        zero = Fraction(0)
        if c.rel == "=" and c.const != zero:
            return None
        if c.rel == "<=" and c.const < zero:
            return None
        if c.rel == "<" and c.const <= zero:
            return None
    # Back-substitute in reverse elimination order.
    point: list[Optional[Rat]] = [None] * n
    for step in reversed(trace):
        if step[0] == "eq":
            _, j, eq = step
            rest_sum = sum(
                (eq.coeffs[i] * point[i] for i in range(n) if i != j and eq.coeffs[i] != 0),
                Fraction(0),
            )
            point[j] = (eq.const - rest_sum) / eq.coeffs[j]
        else:
            _, j, lowers, uppers = step
            lo_val: Optional[Rat] = None
            hi_val: Optional[Rat] = None
            for c in lowers:
                rest_sum = sum(
                    (c.coeffs[i] * point[i] for i in range(n) if i != j and c.coeffs[i] != 0),
                    Fraction(0),
                )
                bound = (c.const - rest_sum) / c.coeffs[j]  # coeff < 0 flips to lower bound
                if lo_val is None or bound > lo_val:
                    lo_val = bound
            for c in uppers:
                rest_sum = sum(
                    (c.coeffs[i] * point[i] for i in range(n) if i != j and c.coeffs[i] != 0),
                    Fraction(0),
                )
                bound = (c.const - rest_sum) / c.coeffs[j]
                if hi_val is None or bound < hi_val:
                    hi_val = bound
            if lo_val is None and hi_val is None:
                point[j] = Fraction(0)
            elif lo_val is None:
                point[j] = hi_val - 1
            elif hi_val is None:
                point[j] = lo_val + 1
            elif lo_val == hi_val:
                point[j] = lo_val
            else:
                point[j] = (lo_val + hi_val) / 2
    result = tuple(point)  # type: ignore[arg-type]
    assert all(c.holds_at(result) for c in sys.constraints)
    return result


@dataclass(frozen=True)
class LpInfeasible:
    pass


@dataclass(frozen=True)
class LpBounded:
    optimum: Rat
    witness: tuple[Rat, ...]
    attained: bool = True


@dataclass(frozen=True)
class LpUnbounded:
    ray: tuple[Rat, ...]
    witness: tuple[Rat, ...]


LpStatus = Union[LpInfeasible, LpBounded, LpUnbounded]


def lp_status(sys: LinearSystem, objective: Sequence[Union[int, Rat]]) -> LpStatus:
    """Maximize ``objective . x`` over the system, exactly.

    Returns infeasible / bounded(optimum, witness) / unbounded(ray, witness).
    For unbounded instances, ``witness + t*ray`` is feasible for every
    ``t >= 0`` and the objective grows without bound along the ray.
    """
    obj = tuple(Fraction(c) for c in objective)
    if len(obj) != sys.dim:
        raise ValueError("objective dimension mismatch")
    base = feasible_point(sys)
    if base is None:
        return LpInfeasible()
    # Recession direction with positive objective gain: coeffs.d <= 0 for
    # every constraint (equalities need coeffs.d = 0), obj.d >= 1.
    rec = [LinConstraint(c.coeffs, Fraction(0), "=" if c.rel == "=" else "<=") for c in sys.constraints]
    rec.append(LinConstraint(tuple(-c for c in obj), Fraction(-1), "<="))
    ray = feasible_point(LinearSystem(tuple(rec), sys.dim))
    if ray is not None:
        return LpUnbounded(ray=ray, witness=base)
    # Bounded: introduce z = obj.x and eliminate all original variables.
    nz = sys.dim + 1
    ext = [LinConstraint(c.coeffs + (Fraction(0),), c.const, c.rel) for c in sys.constraints]
    ext.append(LinConstraint(obj + (Fraction(-1),), Fraction(0), "="))
    constraints = ext
    for j in range(sys.dim):
        group = [c for c in constraints if c.coeffs[j] != 0]
        rest = [c for c in constraints if c.coeffs[j] == 0]
        eq = next((c for c in group if c.rel == "="), None)
        if eq is not None:
            constraints = rest + [_substitute_eq(c, eq, j) for c in group if c is not eq]
        else:
            uppers = [c for c in group if c.coeffs[j] > 0]
            lowers = [c for c in group if c.coeffs[j] < 0]
            constraints = rest + [_combine(up, lo, j) for up in uppers for lo in lowers]
    best: Optional[Rat] = None
    for c in constraints:
        cz = c.coeffs[sys.dim]
        if cz == 0:
            continue
        if c.rel == "=":
            val = c.const / cz
            best = val if best is None else min(best, val)
        elif cz > 0:  # cz * z <= const
            val = c.const / cz
            best = val if best is None else min(best, val)
    assert best is not None, "bounded LP must derive an upper bound on the objective"
    # Attainment check: pin the objective at the supremum.
    pinned = list(sys.constraints) + [LinConstraint(obj, best, "=")]
    attained = feasible_point(LinearSystem(tuple(pinned), sys.dim))
    if attained is not None:
        return LpBounded(optimum=best, witness=attained, attained=True)
    return LpBounded(optimum=best, witness=base, attained=False)
