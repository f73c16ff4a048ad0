import itertools
import random
from fractions import Fraction

import pytest

from presburger.gen import random_unimodular
from presburger.polyhedra import (
    AffineFunctional,
    HalfSpace,
    InradiusError,
    Plank,
    Polyhedron,
    chebyshev_witness,
    inradius_bounds,
    inradius_infinite,
    is_empty,
    opposite_system,
)


def quadrant(dim=2):
    hs = []
    for i in range(dim):
        e = [0] * dim
        e[i] = 1
        hs.append(HalfSpace(AffineFunctional.make(e, 0), "+", True))
    return Polyhedron(dim, tuple(hs))


def box(dim, radius):
    hs = []
    for i in range(dim):
        e = [0] * dim
        e[i] = 1
        hs.append(HalfSpace(AffineFunctional.make(e, radius), "+", True))
        hs.append(HalfSpace(AffineFunctional.make(e, -radius), "-", True))
    return Polyhedron(dim, tuple(hs))


class TestEmptiness:
    def test_strict_contradiction(self):
        p = Polyhedron(
            1,
            (
                HalfSpace(AffineFunctional.make([1], 0), "+", False),
                HalfSpace(AffineFunctional.make([1], 0), "-", False),
            ),
        )
        assert is_empty(p)

    def test_half_line(self):
        p = Polyhedron(1, (HalfSpace(AffineFunctional.make([1], 0), "+", True),))
        assert not is_empty(p)

    def test_shifted_simplex_empty(self):
        # x + y <= 1, x >= 1, y >= 1
        p = Polyhedron(
            2,
            (
                HalfSpace(AffineFunctional.make([-1, -1], 1), "+", True),
                HalfSpace(AffineFunctional.make([1, 0], -1), "+", True),
                HalfSpace(AffineFunctional.make([0, 1], -1), "+", True),
            ),
        )
        assert is_empty(p)


class TestInradiusInfinite:
    def test_quadrant(self):
        assert inradius_infinite(quadrant(2)) is True

    def test_plank_in_plane(self):
        s = Plank(AffineFunctional.make([1, 0], 0), Fraction(0), Fraction(4))
        assert inradius_infinite(s.to_polyhedron()) is False

    def test_degenerate_hyperplane(self):
        p = Polyhedron(
            1,
            (
                HalfSpace(AffineFunctional.make([1], 0), "+", True),
                HalfSpace(AffineFunctional.make([1], 0), "-", True),
            ),
        )
        assert inradius_infinite(p) is False

    def test_whole_space(self):
        assert inradius_infinite(Polyhedron.whole_space(2)) is True

    def test_translation_invariance(self):
        rng = random.Random(7)
        for _ in range(40):
            dim = rng.randint(1, 3)
            hs = []
            for _ in range(rng.randint(1, 4)):
                coeffs = [rng.randint(-3, 3) for _ in range(dim)]
                if all(c == 0 for c in coeffs):
                    coeffs[0] = 1
                hs.append(
                    HalfSpace(
                        AffineFunctional.make(coeffs, rng.randint(-4, 4)),
                        rng.choice("+-"),
                        rng.random() < 0.7,
                    )
                )
            p = Polyhedron(dim, tuple(hs))
            shift = [rng.randint(-10, 10) for _ in range(dim)]
            assert inradius_infinite(p) == inradius_infinite(p.translate(shift))

    def test_unimodular_invariance_on_known_verdicts(self):
        rng = random.Random(11)
        for _ in range(20):
            dim = 2
            m = random_unimodular(rng, dim)
            cols = [[m.entries[i][j] for i in range(dim)] for j in range(dim)]
            q = quadrant(dim)
            assert inradius_infinite(q.linear_image_inverse(list(map(list, zip(*cols))))) is True
            s = Plank(AffineFunctional.make([1, 0], 0), Fraction(0), Fraction(6)).to_polyhedron()
            assert inradius_infinite(s.linear_image_inverse(list(map(list, zip(*cols))))) is False


class TestInradiusBounds:
    def test_interval(self):
        # [0, 4] in R^1: inradius exactly 2 and the l1 = l2 coincidence makes
        # both ends of the sandwich equal
        s = Plank(AffineFunctional.make([1], 0), Fraction(0), Fraction(4))
        lo, hi = inradius_bounds(s.to_polyhedron())
        assert lo == 2 and hi == 2

    def test_unit_square(self):
        lo, hi = inradius_bounds(box(2, Fraction(1, 2)))
        assert lo <= Fraction(1, 2) <= hi
        assert hi == 2 * lo

    def test_triangle(self):
        # x >= 0, y >= 0, x + y <= 2: Chebyshev radius 2 - sqrt(2)
        p = Polyhedron(
            2,
            (
                HalfSpace(AffineFunctional.make([1, 0], 0), "+", True),
                HalfSpace(AffineFunctional.make([0, 1], 0), "+", True),
                HalfSpace(AffineFunctional.make([-1, -1], 2), "+", True),
            ),
        )
        lo, hi = inradius_bounds(p)
        # 2 - sqrt(2) = 0.5857...; check the bracket by squaring
        target_low = (2 - lo) ** 2  # want lo <= 2 - sqrt2  <=>  sqrt2 <= 2 - lo
        assert lo >= 0 and target_low >= 2
        target_hi = (2 - hi) ** 2  # want 2 - sqrt2 <= hi  <=>  2 - hi <= sqrt2
        assert 2 - hi < 0 or target_hi <= 2

    def test_plank_bracket_random(self):
        rng = random.Random(13)
        for _ in range(40):
            dim = rng.randint(1, 3)
            coeffs = [rng.randint(-4, 4) for _ in range(dim)]
            if all(c == 0 for c in coeffs):
                coeffs[0] = 1
            lo_b = Fraction(rng.randint(-5, 3))
            width = Fraction(rng.randint(0, 7))
            plank = Plank(AffineFunctional.make(coeffs, 0), lo_b, lo_b + width)
            blo, bhi = inradius_bounds(plank.to_polyhedron())
            half_t_sq = plank.half_thickness_sq()
            # blo <= t/2 <= bhi, compared without square roots
            assert blo * blo <= half_t_sq
            assert bhi * bhi >= half_t_sq

    def test_errors(self):
        with pytest.raises(InradiusError):
            inradius_bounds(quadrant(2))
        empty = Polyhedron(
            1,
            (
                HalfSpace(AffineFunctional.make([1], 0), "+", False),
                HalfSpace(AffineFunctional.make([1], 0), "-", False),
            ),
        )
        with pytest.raises(InradiusError):
            inradius_bounds(empty)

    def test_witness_ball_fits(self):
        p = box(2, 3)
        r, center = chebyshev_witness(p)
        assert r == 3
        # the certificate ball center keeps l1-weighted slack r on every face
        for h in p.halfspaces:
            f = h.functional
            assert abs(f(center)) >= r * f.l1_norm() or f(center) >= r * f.l1_norm()


class TestOppositeSystem:
    def test_single_functional(self):
        p, m = opposite_system([AffineFunctional.make([1], 0)], [0], [True])
        assert p.contains((Fraction(1),)) and not p.contains((Fraction(-1),))
        assert m.contains((Fraction(-1),)) and not m.contains((Fraction(1),))

    def test_two_functionals(self):
        fs = [AffineFunctional.make([1, 0], 0), AffineFunctional.make([0, 1], 0)]
        p, m = opposite_system(fs, [1, -1], [True, True])
        assert p.contains((Fraction(2), Fraction(0)))
        assert m.contains((Fraction(0), Fraction(-2)))

    def test_mirror_lemma_random(self):
        # opposite polyhedra have infinite inradius together
        rng = random.Random(17)
        for _ in range(200):
            dim = rng.randint(1, 3)
            k = rng.randint(1, 5)
            fs = []
            for _ in range(k):
                coeffs = [rng.randint(-5, 5) for _ in range(dim)]
                if all(c == 0 for c in coeffs):
                    coeffs[rng.randrange(dim)] = 1
                fs.append(AffineFunctional.make(coeffs, 0))
            bs = [Fraction(rng.randint(-5, 5)) for _ in range(k)]
            flags = [rng.random() < 0.6 for _ in range(k)]
            p, m = opposite_system(fs, bs, flags)
            assert inradius_infinite(p) == inradius_infinite(m)


class TestCoverProperties:
    def test_split_cover_has_infinite_piece(self):
        # split the quadrant by random hyperplanes: some cell of the
        # arrangement must keep infinite inradius
        rng = random.Random(19)
        for _ in range(30):
            dim = 2
            pieces = [quadrant(dim)]
            for _ in range(rng.randint(1, 3)):
                coeffs = [rng.randint(-3, 3) for _ in range(dim)]
                if all(c == 0 for c in coeffs):
                    coeffs[0] = 1
                cut = AffineFunctional.make(coeffs, rng.randint(-4, 4))
                idx = rng.randrange(len(pieces))
                target = pieces.pop(idx)
                pieces.append(Polyhedron(dim, target.halfspaces + (HalfSpace(cut, "+", True),)))
                pieces.append(Polyhedron(dim, target.halfspaces + (HalfSpace(cut, "-", False),)))
            assert any(inradius_infinite(q) for q in pieces)

    def test_kadets_inequality_on_plank_covers(self):
        # cover a box with parallel slabs; the box inradius lower bound never
        # exceeds the sum of the slabs' upper bounds
        rng = random.Random(23)
        for _ in range(40):
            dim = rng.randint(1, 3)
            radius = Fraction(rng.randint(1, 6))
            q = box(dim, radius)
            axis = rng.randrange(dim)
            cuts = sorted(
                {Fraction(rng.randint(-int(radius), int(radius))) for _ in range(rng.randint(0, 3))}
                | {-radius, radius}
            )
            planks = []
            for a, b in zip(cuts, cuts[1:]):
                plank_p = []
                for i in range(dim):
                    ei = [0] * dim
                    ei[i] = 1
                    if i == axis:
                        plank_p.append(HalfSpace(AffineFunctional.make(ei, -a), "+", True))
                        plank_p.append(HalfSpace(AffineFunctional.make(ei, -b), "-", True))
                    else:
                        plank_p.append(HalfSpace(AffineFunctional.make(ei, radius), "+", True))
                        plank_p.append(HalfSpace(AffineFunctional.make(ei, -radius), "-", True))
                planks.append(Polyhedron(dim, tuple(plank_p)))
            lo_q, _ = inradius_bounds(q)
            hi_sum = sum(inradius_bounds(p)[1] for p in planks if not is_empty(p))
            assert lo_q <= hi_sum


if __name__ == "__main__":
    pytest.main([__file__, "-q"])
