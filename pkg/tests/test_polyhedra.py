import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from troptoric.polyhedra import (
    Fan,
    Outcome,
    cone_contains,
    cone_from_inequalities,
    cone_from_rays,
    cone_intersect,
    dual_description,
    fan_is_complete,
    fan_is_simplicial,
    fan_validate,
    shifted_intersection,
    shifted_intersection_is_point,
)
from troptoric.toric import cartesian_product, projective_space

from conftest import BLOWUP_CONES, BLOWUP_RAYS, CONIC_CONES, CONIC_RAYS


def fm_contains(point, gens):
    """Is ``point`` in cone(gens)?  Fourier-Motzkin on the multipliers.

    Equalities ``G lam = p`` are used to substitute variables away first;
    the remaining inequalities ``lam >= 0`` are then projected one variable
    at a time.
    """
    m = len(gens)
    # constraints: (coeffs over lam, const) meaning coeffs . lam + const >= 0
    eqs = [([Fraction(g[i]) for g in gens], -Fraction(point[i])) for i in range(len(point))]
    ineqs = [([Fraction(int(j == k)) for k in range(m)], Fraction(0)) for j in range(m)]
    live = list(range(m))
    while eqs:
        a, c = eqs.pop()
        piv = next((j for j in live if a[j] != 0), None)
        if piv is None:
            if c != 0:
                return False
            continue
        # lam_piv = -(c + sum_{j != piv} a_j lam_j) / a_piv

        def sub(row):
            b, d = row
            f = b[piv] / a[piv]
            return [x - f * y for x, y in zip(b, a)], d - f * c

        eqs = [sub(r) for r in eqs]
        ineqs = [sub(r) for r in ineqs]
        live.remove(piv)
    for j in live:
        pos = [r for r in ineqs if r[0][j] > 0]
        neg = [r for r in ineqs if r[0][j] < 0]
        rest = [r for r in ineqs if r[0][j] == 0]
        for p in pos:
            for q in neg:
                s, t = -q[0][j], p[0][j]
                rest.append(([s * x + t * y for x, y in zip(p[0], q[0])], s * p[1] + t * q[1]))
        ineqs = rest
    return all(c >= 0 for _, c in ineqs)


small = st.integers(-3, 3)


@st.composite
def membership(draw):
    n = draw(st.integers(1, 4))
    m = draw(st.integers(0, 6))
    gens = draw(st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m))
    point = draw(st.lists(small, min_size=n, max_size=n))
    return point, gens


class TestConeFromRays:
    def test_quadrant(self):
        c = cone_from_rays([(1, 0), (0, 1)])
        assert c.ray_set() == {(1, 0), (0, 1)} and not c.lineality

    def test_drops_interior_generator(self):
        c = cone_from_rays([(1, 0), (1, 1), (0, 1)])
        assert c.ray_set() == {(1, 0), (0, 1)}

    def test_lineality(self):
        c = cone_from_rays([(1, 0), (-1, 0)])
        assert len(c.lineality) == 1 and c.dim == 1 and not c.is_pointed

    def test_primitive_generators(self):
        assert cone_from_rays([(2, 4)]).ray_set() == {(1, 2)}

    def test_mismatched_dims(self):
        with pytest.raises(ValueError):
            cone_from_rays([(1, 0), (1, 0, 0)])


class TestDual:
    def test_quadrant(self):
        assert set(dual_description(cone_from_rays([(1, 0), (0, 1)]))) == {(1, 0), (0, 1)}

    def test_rotated(self):
        c = cone_from_rays([(1, 1), (1, -1)])
        ineqs = dual_description(c)
        assert set(ineqs) == {(1, 1), (1, -1)}
        # both descriptions agree on a grid
        for p in product(range(-4, 5), repeat=2):
            assert c.contains(p) == all(a * p[0] + b * p[1] >= 0 for a, b in ineqs)

    def test_full_plane(self):
        assert dual_description(cone_from_rays([(1, 0), (-1, 0), (0, 1), (0, -1)])) == []

    @given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=5))
    def test_round_trip(self, gens):
        c = cone_from_rays(gens, 3)
        back = cone_from_inequalities(dual_description(c), 3)
        assert back == c
        assert back.ray_set() == c.ray_set()
        assert len(back.lineality) == len(c.lineality)


class TestIntersect:
    Q = cone_from_rays([(1, 0), (0, 1)])

    def test_half_plane(self):
        b = cone_from_rays([(1, 0), (1, 1)])
        out = cone_intersect(self.Q, b)
        assert out.ray_set() == {(1, 0), (1, 1)}
        assert all(cone_contains(r, [(1, 0), (0, 1)]) and cone_contains(r, [(1, 0), (1, 1)]) for r in out.rays)

    def test_idempotent_example(self):
        assert cone_intersect(self.Q, self.Q) == self.Q

    def test_opposite_quadrants(self):
        out = cone_intersect(self.Q, cone_from_rays([(-1, 0), (0, -1)]))
        assert out.dim == 0

    @settings(max_examples=40)
    @given(st.lists(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=4), min_size=3, max_size=3))
    def test_algebra(self, triple):
        a, b, c = (cone_from_rays(g, 3) for g in triple)
        assert cone_intersect(a, b) == cone_intersect(b, a)
        assert cone_intersect(cone_intersect(a, b), c) == cone_intersect(a, cone_intersect(b, c))
        assert cone_intersect(a, a) == a


class TestContains:
    def test_examples(self):
        assert cone_contains((1, 0), [(1, 0), (0, 1)])
        assert not cone_contains((-1, 0), [(1, 0), (0, 1)])

    def test_empty_generators(self):
        assert cone_contains((0, 0), [])
        assert not cone_contains((1, 0), [])

    @settings(max_examples=300)
    @given(membership())
    def test_matches_fourier_motzkin(self, data):
        point, gens = data
        assert cone_contains(point, gens) == fm_contains(point, gens)


class TestShifted:
    X = cone_from_rays([(1, 0)])
    Y = cone_from_rays([(0, 1)])

    def test_axes_miss(self):
        assert shifted_intersection_is_point(self.X, self.Y, (1, 1)) is Outcome.EMPTY
        assert shifted_intersection(self.X, self.Y, (1, 1)) is False

    def test_rays_cross(self):
        a, b = cone_from_rays([(1, 1)]), cone_from_rays([(1, -1)])
        assert shifted_intersection_is_point(a, b, (0, 1)) is Outcome.POINT
        assert shifted_intersection(a, b, (0, 1)) is True

    def test_overlap(self):
        a = cone_from_rays([(1, 1)])
        b = cone_from_rays([(-1, 1)])
        assert shifted_intersection_is_point(a, a, (0, 0)) is Outcome.POSITIVE_DIM
        assert shifted_intersection(a, b, (0, 0)) is None

    @settings(max_examples=60)
    @given(st.lists(small, min_size=2, max_size=2).filter(any), st.lists(small, min_size=2, max_size=2).filter(any),
           st.lists(st.integers(-20, 20), min_size=2, max_size=2))
    def test_fast_and_slow_agree(self, r, s, v):
        a, b = cone_from_rays([r]), cone_from_rays([s])
        fast = shifted_intersection(a, b, [Fraction(x) for x in v])
        slow = shifted_intersection_is_point(a, b, v)
        if fast is True:
            assert slow is Outcome.POINT
        elif fast is False:
            assert slow is Outcome.EMPTY


def p2():
    return projective_space(2).fan


def covered_by_sampling(fan, samples=400, seed=1):
    rng = random.Random(seed)
    cones = [fan.cone(c) for c in fan.maximal_cones]
    for _ in range(samples):
        p = [rng.randint(-50, 50) for _ in range(fan.ambient_dim)]
        if not any(c.contains(p) for c in cones):
            return False
    return True


class TestFans:
    def test_p2(self):
        assert fan_validate(p2()).ok
        assert fan_is_complete(p2()) and fan_is_simplicial(p2())

    def test_overlap_named(self):
        f = Fan([(1, 0), (0, 1), (1, 2)], [(0, 1), (0, 2)])
        rep = fan_validate(f)
        assert not rep.ok and any("0 and 1" in v for v in rep.violations)

    def test_bergman_input(self):
        f = Fan(CONIC_RAYS, [sorted(c) for c in CONIC_CONES])
        assert fan_validate(f).ok
        assert not fan_is_complete(f)

    def test_product_complete(self):
        assert fan_is_complete(cartesian_product(projective_space(4), projective_space(4)).fan)

    def test_square_cone_not_simplicial(self):
        f = Fan([(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)], [(0, 1, 2, 3)])
        assert fan_validate(f).ok
        assert not fan_is_simplicial(f)

    def test_blowup_simplicial(self):
        assert fan_is_simplicial(Fan(BLOWUP_RAYS, BLOWUP_CONES))

    def test_invalid_raises_on_flags(self):
        with pytest.raises(ValueError):
            fan_is_complete(Fan([(1, 0), (0, 1), (1, 2)], [(0, 1), (0, 2)]))

    @pytest.mark.parametrize(
        "fan",
        [
            p2(),
            Fan(BLOWUP_RAYS, BLOWUP_CONES),
            cartesian_product(projective_space(1), projective_space(1)).fan,
            projective_space(3).fan,
            Fan(BLOWUP_RAYS, BLOWUP_CONES[:3]),
            Fan([(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)], [(0, 1, 2), (0, 1, 3), (0, 2, 3)]),
            Fan(CONIC_RAYS, [sorted(c) for c in CONIC_CONES]),
        ],
    )
    def test_completeness_matches_sampling(self, fan):
        assert fan_is_complete(fan) == covered_by_sampling(fan)
