from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from troptoric.matroid import bergman_fan, matroid_from_matrix
from troptoric.toric import projective_space
from troptoric.tropical import (
    LaurentPolynomial,
    MonomialMap,
    PLDivisor,
    TropicalCycle,
    check_balancing,
    cycles_equal,
    displacement_pairing,
    hypersurface_intersect,
    pairing_vector,
    pl_divisor_intersect,
    pushforward,
    stable_intersection,
    tropical_hypersurface,
)

from conftest import CONIC_RAYS

LINE = LaurentPolynomial(2, {(1, 0): 1, (0, 1): 1, (0, 0): 1})
CONIC = LaurentPolynomial(2, {(1, 1): 1, (1, 0): 1, (0, 1): 1})


def weights(T):
    return {frozenset(rays): w for rays, w in T.cones()}


def add_weights(a, b):
    out = dict(a)
    for k, w in b.items():
        out[k] = out.get(k, 0) + w
    return {k: w for k, w in out.items() if w != 0}


def in_support(T, w):
    return any(T.fan.cone(c).contains(w) for c in T.fan.maximal_cones)


def min_twice(f, w):
    vals = sorted(sum(a * b for a, b in zip(e, w)) for e in f.terms)
    return len(vals) >= 2 and vals[0] == vals[1]


def shoelace(points):
    """Twice the area of the convex hull, via monotone chain and shoelace."""
    pts = sorted(set(points))
    if len(pts) < 3:
        return 0

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return abs(sum(hull[i][0] * hull[i - 1][1] - hull[i - 1][0] * hull[i][1] for i in range(len(hull))))


def mixed_volume(p, q):
    s = [(a[0] + b[0], a[1] + b[1]) for a in p for b in q]
    return Fraction(shoelace(s) - shoelace(p) - shoelace(q), 2)


exps = st.tuples(st.integers(-2, 2), st.integers(-2, 2))


@st.composite
def bivariate(draw, max_terms=4):
    es = draw(st.lists(exps, min_size=2, max_size=max_terms, unique=True))
    cs = draw(st.lists(st.integers(1, 5), min_size=len(es), max_size=len(es)))
    return LaurentPolynomial(2, dict(zip(es, cs)))


@st.composite
def trivariate(draw):
    es = draw(st.lists(st.tuples(*[st.integers(-1, 1)] * 3), min_size=2, max_size=4, unique=True))
    return LaurentPolynomial(3, {e: 1 for e in es})


def conic_bergman():
    return bergman_fan(matroid_from_matrix([[-1, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 1]]))


class TestBalancing:
    def test_line(self):
        T = TropicalCycle.from_data([(1, 0), (0, 1), (-1, -1)], [(0,), (1,), (2,)], [1, 1, 1])
        assert check_balancing(T).balanced

    def test_failure_at_origin(self):
        T = TropicalCycle.from_data([(1, 0), (0, 1), (-1, -1)], [(0,), (1,), (2,)], [1, 1, 2], check=False)
        rep = check_balancing(T)
        assert not rep.balanced and rep.cone == ()

    def test_unbalanced_rejected(self):
        with pytest.raises(ValueError):
            TropicalCycle.from_data([(1, 0), (0, 1), (-1, -1)], [(0,), (1,), (2,)], [1, 1, 2])

    def test_bergman(self):
        B = conic_bergman()
        assert set(B.fan.rays) == set(CONIC_RAYS)
        assert check_balancing(B).balanced
        # direct oracle: at each ray the primitive neighbours sum into the ray's span
        for i, r in enumerate(B.fan.rays):
            total = [0, 0, 0]
            for c in B.fan.maximal_cones:
                if i in c:
                    (j,) = [k for k in c if k != i]
                    total = [a + b for a, b in zip(total, B.fan.rays[j])]
            assert total[0] * r[1] == total[1] * r[0] and total[1] * r[2] == total[2] * r[1]


class TestHypersurface:
    def test_line(self):
        T = tropical_hypersurface(LINE)
        assert {rays: w for rays, w in T.cones()} == {((1, 0),): 1, ((0, 1),): 1, ((-1, -1),): 1}

    def test_conic_min_convention(self):
        T = tropical_hypersurface(CONIC)
        assert {rays for rays, _ in T.cones()} == {((1, 1),), ((-1, 0),), ((0, -1),)}
        assert T.weights == (1, 1, 1)

    def test_edge_length(self):
        assert tropical_hypersurface(LaurentPolynomial(2, {(2, 0): 1, (0, 1): 1})).weights == (1, 1)
        T = tropical_hypersurface(LaurentPolynomial(2, {(2, 0): 1, (0, 0): 1}))
        assert len(T.weights) == 2 and set(T.weights) == {2}

    def test_monomial_rejected(self):
        with pytest.raises(ValueError, match="monomial"):
            tropical_hypersurface(LaurentPolynomial(2, {(3, 1): 2}))

    @settings(max_examples=60)
    @given(bivariate(), st.lists(st.tuples(st.integers(-7, 7), st.integers(-7, 7)), min_size=20, max_size=20))
    def test_grid_oracle(self, f, grid):
        T = tropical_hypersurface(f)
        assert check_balancing(T).balanced
        for w in grid:
            assert in_support(T, w) == min_twice(f, w)

    @settings(max_examples=25)
    @given(trivariate())
    def test_balanced_in_three_variables(self, f):
        assert check_balancing(tropical_hypersurface(f)).balanced


class TestPushforward:
    def test_identity(self):
        T = tropical_hypersurface(LINE)
        assert cycles_equal(pushforward(MonomialMap([[1, 0], [0, 1]]), T), T)

    def test_graph_of_inversion(self):
        T = pushforward(MonomialMap.graph_of_inversion(2), tropical_hypersurface(LINE))
        assert T.ambient_dim == 4 and T.dim == 1 and set(T.weights) == {1}
        assert check_balancing(T).balanced

    def test_index_two(self):
        T = TropicalCycle.full_space(1)
        S = pushforward(MonomialMap([[2]]), T)
        assert set(S.weights) == {2}

    def test_non_injective(self):
        with pytest.raises(ValueError):
            pushforward(MonomialMap([[1, 1]]), tropical_hypersurface(LINE))

    @settings(max_examples=25)
    @given(bivariate(), st.lists(st.integers(-3, 3), min_size=6, max_size=6), st.lists(st.integers(-3, 3), min_size=9, max_size=9))
    def test_composition(self, f, a, b):
        A = MonomialMap([a[0:2], a[2:4], a[4:6]])
        B = MonomialMap([b[0:3], b[3:6], b[6:9]])
        from troptoric.exactlinalg import rank

        assume(rank(A.matrix) == 2 and rank(B.matrix) == 3)
        T = tropical_hypersurface(f)
        once = pushforward(B.compose(A), T)
        twice = pushforward(B, pushforward(A, T))
        assert cycles_equal(once, twice)
        assert check_balancing(once).balanced


class TestPairing:
    P2 = projective_space(2)

    def test_line(self):
        assert displacement_pairing(tropical_hypersurface(LINE), self.P2, [0]) == 1

    def test_conic(self):
        T = tropical_hypersurface(CONIC)
        assert all(displacement_pairing(T, self.P2, [i]) == 2 for i in range(3))

    def test_zero_cycle(self):
        assert displacement_pairing(TropicalCycle.empty(2, 1), self.P2, [0]) == 0

    def test_wrong_dimension(self):
        with pytest.raises(ValueError):
            displacement_pairing(tropical_hypersurface(LINE), self.P2, [0, 1])

    @settings(max_examples=20)
    @given(bivariate(), st.integers(0, 10**6))
    def test_three_draws_agree(self, f, seed):
        T = tropical_hypersurface(f)
        values = [pairing_vector(T, self.P2, seed=seed + k, draws=1) for k in range(3)]
        assert values[0] == values[1] == values[2]
        # the line class pairs to the mixed volume with the standard triangle
        mv = mixed_volume(list(f.terms), [(0, 0), (1, 0), (0, 1)])
        assert all(v == mv for v in values[0].values())


class TestStable:
    def test_lines(self):
        L = tropical_hypersurface(LINE)
        M = tropical_hypersurface(LaurentPolynomial(2, {(1, 0): 1, (0, 1): 3, (0, 0): 2}))
        P = stable_intersection(L, M)
        assert P.dim == 0 and P.degree() == 1
        assert stable_intersection(L, L).degree() == 1

    def test_full_space_identity(self):
        B = conic_bergman()
        assert cycles_equal(stable_intersection(TropicalCycle.full_space(3), B), B)

    def test_negative_dimension_is_empty(self):
        L = tropical_hypersurface(LINE)
        assert stable_intersection(TropicalCycle.point(2), L).is_zero()

    def test_ambient_mismatch(self):
        with pytest.raises(ValueError):
            stable_intersection(TropicalCycle.full_space(3), tropical_hypersurface(LINE))

    @settings(max_examples=50)
    @given(bivariate(), bivariate())
    def test_mixed_volume(self, f, g):
        S = stable_intersection(tropical_hypersurface(f), tropical_hypersurface(g))
        assert S.degree() == mixed_volume(list(f.terms), list(g.terms))

    def test_conic_curve_in_space(self):
        T = stable_intersection(conic_bergman(), tropical_hypersurface(LaurentPolynomial(3, {(1, 0, 0): 1, (0, 1, 0): 1, (1, 1, 0): 1})))
        assert T.dim == 1 and check_balancing(T).balanced


class TestPL:
    def line(self):
        return tropical_hypersurface(LINE)

    def test_zero(self):
        T = self.line()
        assert pl_divisor_intersect(PLDivisor(T.fan, [0, 0, 0]), T).is_zero()

    def test_linear(self):
        T = self.line()
        vals = [sum(a * b for a, b in zip((2, -3), r)) for r in T.fan.rays]
        assert pl_divisor_intersect(PLDivisor(T.fan, vals), T).is_zero()

    def test_point(self):
        T = self.line()
        phi = PLDivisor(T.fan, [1 if r == (1, 0) else 0 for r in T.fan.rays])
        P = pl_divisor_intersect(phi, T)
        assert P.dim == 0 and P.weights == (1,)

    @settings(max_examples=30)
    @given(st.lists(st.integers(-5, 5), min_size=8, max_size=8), st.lists(st.integers(-5, 5), min_size=8, max_size=8))
    def test_linearity(self, a, b):
        B = conic_bergman()
        p, q = PLDivisor(B.fan, a), PLDivisor(B.fan, b)
        s = PLDivisor(B.fan, [x + y for x, y in zip(a, b)])
        lhs = pl_divisor_intersect(s, B)
        assert check_balancing(lhs).balanced
        assert weights(lhs) == add_weights(weights(pl_divisor_intersect(p, B)), weights(pl_divisor_intersect(q, B)))

    def test_hypersurface_intersect(self):
        # on the plane R^2, trop(line) . trop(line) has degree one
        L = tropical_hypersurface(LINE)
        assert hypersurface_intersect(LINE, L).degree() == 1
