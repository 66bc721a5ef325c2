"""Tropical cycles: balanced weighted fans and the operations on them.

Everything uses the MIN convention: the tropical hypersurface of ``f`` is
the set of ``w`` where ``min <a, w>`` over the exponents of ``f`` is
attained at least twice.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from functools import reduce
from math import gcd
from typing import Iterable, Mapping, Optional, Sequence

from .exactlinalg import (
    _index_of_generated,
    as_fraction,
    kernel_basis,
    lattice_normal,
    primitive_vector,
    rank,
    saturation_basis,
    solve_rational,
)
from .polyhedra import (
    Cone,
    Fan,
    _pm,
    cone_from_inequalities,
    cone_from_rays,
    cone_intersect,
    shifted_intersection,
)

__all__ = [
    "TropicalCycle",
    "BalanceReport",
    "LaurentPolynomial",
    "MonomialMap",
    "PLDivisor",
    "check_balancing",
    "tropical_hypersurface",
    "pushforward",
    "local_counts",
    "displacement_pairing",
    "pairing_vector",
    "stable_intersection",
    "pl_divisor_intersect",
    "hypersurface_intersect",
    "refine_by_polynomial",
    "cycles_equal",
    "random_displacement",
]

MAX_RETRIES = 25


def _dot(a, b):
    return sum((Fraction(x) * y for x, y in zip(a, b)), Fraction(0))


# --------------------------------------------------------------------------
# Tropical cycles
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BalanceReport:
    balanced: bool
    cone: Optional[tuple[int, ...]] = None  # first failing codim-1 cone
    defect: Optional[tuple[Fraction, ...]] = None

    def __bool__(self):
        return self.balanced

    def __str__(self):
        if self.balanced:
            return "balanced"
        return f"not balanced at cone {list(self.cone)}"


class TropicalCycle:
    """A weighted pure-dimensional fan.

    ``weights`` runs parallel to ``fan.maximal_cones``.  Cones of weight
    zero are dropped.  Balancing is checked unless ``check=False``.
    """

    def __init__(self, fan: Fan, weights: Sequence, dim: Optional[int] = None, check: bool = True):
        if len(weights) != len(fan.maximal_cones):
            raise ValueError("need one weight per maximal cone")
        ws = [as_fraction(w) for w in weights]
        keep = [i for i, w in enumerate(ws) if w != 0]
        if len(keep) != len(ws):
            fan = _compact_fan(fan.rays, [fan.maximal_cones[i] for i in keep], fan.ambient_dim)
            ws = [ws[i] for i in keep]
        if not fan.is_pure():
            raise ValueError("tropical cycles need a pure-dimensional fan")
        if fan.maximal_cones:
            d = fan.cone_dim(fan.maximal_cones[0])
            if dim is not None and dim != d:
                raise ValueError(f"declared dimension {dim} but cones have dimension {d}")
            dim = d
        elif dim is None:
            dim = 0
        self.fan = fan
        self.weights = tuple(ws)
        self.dim = dim
        if check:
            rep = check_balancing(self)
            if not rep.balanced:
                raise ValueError(f"cycle is {rep}")

    @classmethod
    def from_data(cls, rays, cones, weights, ambient_dim: Optional[int] = None, dim: Optional[int] = None, check: bool = True):
        return cls(Fan(rays, cones, ambient_dim), weights, dim=dim, check=check)

    @classmethod
    def empty(cls, ambient_dim: int, dim: int) -> "TropicalCycle":
        return cls(Fan([], [], ambient_dim), [], dim=dim, check=False)

    @classmethod
    def point(cls, ambient_dim: int, weight=1) -> "TropicalCycle":
        return cls(Fan([], [()], ambient_dim), [weight], dim=0, check=False)

    @classmethod
    def full_space(cls, n: int) -> "TropicalCycle":
        """R^n with weight one, subdivided into orthants."""
        rays = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        rays += [tuple(-x for x in r) for r in rays]
        cones = [tuple(i + n * s for i, s in enumerate(signs)) for signs in product((0, 1), repeat=n)]
        return cls(Fan(rays, cones, n), [1] * len(cones), dim=n, check=False)

    @property
    def ambient_dim(self) -> int:
        return self.fan.ambient_dim

    def is_zero(self) -> bool:
        return not self.weights

    def cones(self):
        """Pairs ``(ray vectors, weight)`` of the maximal cones."""
        return [(tuple(self.fan.rays[i] for i in c), w) for c, w in zip(self.fan.maximal_cones, self.weights)]

    def degree(self) -> Fraction:
        if self.dim != 0:
            raise ValueError("degree is defined for zero-dimensional cycles")
        return sum(self.weights, Fraction(0))

    def __eq__(self, other):
        return isinstance(other, TropicalCycle) and cycles_equal(self, other)

    def __hash__(self):
        return hash((self.ambient_dim, self.dim, len(self.weights)))

    def __repr__(self):
        return f"TropicalCycle(dim={self.dim}, ambient_dim={self.ambient_dim}, cones={len(self.weights)})"


def _compact_fan(rays, cones, ambient_dim) -> Fan:
    used = sorted({i for c in cones for i in c})
    remap = {old: new for new, old in enumerate(used)}
    return Fan([rays[i] for i in used], [tuple(remap[i] for i in c) for c in cones], ambient_dim)


def _build_cycle(ambient_dim: int, dim: int, cells: Iterable[tuple[Sequence[Sequence[int]], Fraction]], check: bool = True) -> TropicalCycle:
    """Assemble a cycle from (ray vectors, weight) pairs, merging equal cones."""
    ray_index: dict[tuple[int, ...], int] = {}
    merged: dict[tuple[int, ...], Fraction] = {}
    for rays, w in cells:
        idx = []
        for r in rays:
            r = tuple(int(x) for x in r)
            if r not in ray_index:
                ray_index[r] = len(ray_index)
            idx.append(ray_index[r])
        key = tuple(sorted(idx))
        merged[key] = merged.get(key, Fraction(0)) + as_fraction(w)
    rays = sorted(ray_index, key=ray_index.get)
    items = [(k, w) for k, w in merged.items() if w != 0]
    if not items:
        return TropicalCycle.empty(ambient_dim, dim)
    fan = _compact_fan(rays, [k for k, _ in items], ambient_dim)
    return TropicalCycle(fan, [w for _, w in items], dim=dim, check=check)


def cycles_equal(a: TropicalCycle, b: TropicalCycle) -> bool:
    """Equality as weighted fans with the same cone structure."""
    if a.ambient_dim != b.ambient_dim or a.dim != b.dim:
        return False

    def canon(t):
        return {frozenset(rays): w for rays, w in t.cones()}

    return canon(a) == canon(b)


def _codim_one_faces(fan: Fan, k: int) -> dict[tuple[int, ...], list[int]]:
    """Map each (k-1)-dimensional face to the maximal cones containing it."""
    out: dict[tuple[int, ...], list[int]] = {}
    for ci, c in enumerate(fan.maximal_cones):
        for f in fan.faces_of(c):
            if len(f) < len(c) and fan.cone_dim(f) == k - 1:
                out.setdefault(f, []).append(ci)
    return dict(sorted(out.items()))


def _normal(fan: Fan, face: Sequence[int], cone: Sequence[int]) -> tuple[int, ...]:
    return lattice_normal([fan.rays[i] for i in face], [fan.rays[i] for i in cone])


def check_balancing(T: TropicalCycle) -> BalanceReport:
    """Check the balancing condition at every codimension-one cone."""
    fan = T.fan
    if not fan.is_pure():
        raise ValueError("balancing needs a pure-dimensional fan")
    if T.dim == 0:
        return BalanceReport(True)
    n = fan.ambient_dim
    for tau, adj in _codim_one_faces(fan, T.dim).items():
        total = [Fraction(0)] * n
        for ci in adj:
            u = _normal(fan, tau, fan.maximal_cones[ci])
            w = T.weights[ci]
            total = [t + w * x for t, x in zip(total, u)]
        span = [fan.rays[i] for i in tau]
        if not any(total):
            continue
        if not span or rank(span + [total]) > rank(span):
            return BalanceReport(False, tau, tuple(total))
    return BalanceReport(True)


# --------------------------------------------------------------------------
# Laurent polynomials and monomial maps
# --------------------------------------------------------------------------

class LaurentPolynomial:
    """Sparse Laurent polynomial with rational coefficients."""

    def __init__(self, num_vars: int, terms: Iterable[tuple] | Mapping):
        items = terms.items() if isinstance(terms, Mapping) else ((e, c) for c, e in terms)
        acc: dict[tuple[int, ...], Fraction] = {}
        for exp, coeff in items:
            exp = tuple(int(x) for x in exp)
            if len(exp) != num_vars:
                raise ValueError(f"exponent {exp} does not have {num_vars} entries")
            acc[exp] = acc.get(exp, Fraction(0)) + as_fraction(coeff)
        self.num_vars = num_vars
        self.terms = {e: c for e, c in sorted(acc.items()) if c != 0}

    def exponents(self) -> list[tuple[int, ...]]:
        return list(self.terms)

    def negate_exponents(self) -> "LaurentPolynomial":
        """Switch between MIN and MAX conventions."""
        return LaurentPolynomial(self.num_vars, {tuple(-x for x in e): c for e, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, LaurentPolynomial) and (self.num_vars, self.terms) == (other.num_vars, other.terms)

    def __hash__(self):
        return hash((self.num_vars, tuple(self.terms.items())))

    def __repr__(self):
        parts = []
        for e, c in self.terms.items():
            mono = "*".join(f"t{i}" if x == 1 else f"t{i}^{x}" for i, x in enumerate(e) if x)
            parts.append(str(c) if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return " + ".join(parts) or "0"


class MonomialMap:
    """Integer linear map ``w -> A w`` between lattices (A is target x source)."""

    def __init__(self, matrix: Sequence[Sequence[int]]):
        rows = [[int(as_fraction(x)) for x in r] for r in matrix]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("monomial map needs a rectangular nonempty matrix")
        self.matrix = tuple(tuple(r) for r in rows)
        self.target_dim = len(rows)
        self.source_dim = len(rows[0])
        self.injective = rank(rows) == self.source_dim

    def __call__(self, v: Sequence) -> tuple:
        return tuple(sum(a * x for a, x in zip(row, v)) for row in self.matrix)

    def compose(self, first: "MonomialMap") -> "MonomialMap":
        """``self after first``."""
        if first.target_dim != self.source_dim:
            raise ValueError("maps cannot be composed")
        cols = [first([int(i == j) for i in range(first.source_dim)]) for j in range(first.source_dim)]
        img = [self(c) for c in cols]
        return MonomialMap([[img[j][i] for j in range(first.source_dim)] for i in range(self.target_dim)])

    @classmethod
    def graph_of_inversion(cls, n: int) -> "MonomialMap":
        """``w -> (w, -w)``, the tropicalization of the graph of coordinatewise inversion."""
        eye = [[int(i == j) for j in range(n)] for i in range(n)]
        return cls(eye + [[-x for x in r] for r in eye])


# --------------------------------------------------------------------------
# Hypersurfaces
# --------------------------------------------------------------------------

def _orthant_choices(lineality: Sequence[Sequence[int]]) -> list[list[tuple[int, ...]]]:
    if not lineality:
        return [[]]
    return [[tuple(s * x for x in b) for s, b in zip(signs, lineality)] for signs in product((1, -1), repeat=len(lineality))]


def tropical_hypersurface(f: LaurentPolynomial, check: bool = True) -> TropicalCycle:
    """Codimension-one skeleton of the normal fan of the Newton polytope.

    Each edge of ``Newt(f)`` contributes its normal cone with weight equal
    to the edge's lattice length.  A lineality space (Newton polytope not
    full dimensional) is split into orthants so the output fan is pointed.
    """
    exps = f.exponents()
    n = f.num_vars
    if len(exps) < 2:
        raise ValueError("a monomial has empty tropical hypersurface")
    base = exps[0]
    diffs = [[a - b for a, b in zip(e, base)] for e in exps[1:]]
    lin = saturation_basis(kernel_basis(diffs)) if rank(diffs) < n else []
    lin = [tuple(v) for v in lin]
    seen: set = set()
    cells = []
    for i in range(len(exps)):
        for j in range(i + 1, len(exps)):
            d = [a - b for a, b in zip(exps[i], exps[j])]
            ineqs = _pm([d]) + [[a - b for a, b in zip(e, exps[i])] for k, e in enumerate(exps) if k not in (i, j)]
            cone = cone_from_inequalities(ineqs, n)
            if cone.dim != n - 1:
                continue
            p = [sum(r[t] for r in cone.rays) for t in range(n)]
            vals = [_dot(e, p) for e in exps]
            low = min(vals)
            support = frozenset(k for k, v in enumerate(vals) if v == low)
            if support in seen:
                continue
            seen.add(support)
            pts = sorted(exps[k] for k in support)
            length = gcd(*[a - b for a, b in zip(pts[-1], pts[0])])
            for extra in _orthant_choices(lin):
                cells.append((list(cone.rays) + extra, length))
    return _build_cycle(n, n - 1, cells, check=check)


# --------------------------------------------------------------------------
# Pushforward
# --------------------------------------------------------------------------

def pushforward(m: MonomialMap, T: TropicalCycle, check: bool = True) -> TropicalCycle:
    """Image of ``T`` under an integer linear map injective on its span.

    The weight of an image cone is multiplied by the index of ``m(N_sigma)``
    in the saturated lattice of its span.
    """
    if m.source_dim != T.ambient_dim:
        raise ValueError("map source does not match the cycle's ambient space")
    span = [list(r) for r in T.fan.rays]
    if span and rank([m(v) for v in span]) != rank(span):
        raise ValueError("map is not injective on the span of the cycle")
    cells = []
    for rays, w in T.cones():
        basis = saturation_basis(rays, T.ambient_dim) if rays else []
        img = [m(b) for b in basis]
        if img and rank(img) != len(img):
            raise ValueError("map is not injective on a cone of the cycle")
        idx = _index_of_generated(img) if img else 1
        cells.append(([primitive_vector(m(r)) for r in rays], w * idx))
    return _build_cycle(m.target_dim, T.dim, cells, check=check)


# --------------------------------------------------------------------------
# Generic displacement
# --------------------------------------------------------------------------

def random_displacement(rng: random.Random, n: int) -> list[Fraction]:
    return [Fraction(rng.randint(-10**4, 10**4), rng.randint(1, 97)) for _ in range(n)]


class _ConeData:
    """Per-cone cache: rays, and lazily the Cone object and a saturated lattice basis."""

    def __init__(self, rays: Sequence[Sequence[int]], n: int):
        self.n = n
        self.rays = [tuple(r) for r in rays]
        self.neg = [tuple(-x for x in r) for r in self.rays]
        self._cone = None
        self._basis = None

    @property
    def cone(self) -> Cone:
        if self._cone is None:
            self._cone = Cone(self.n, tuple(self.rays))
        return self._cone

    @property
    def basis(self) -> list:
        if self._basis is None:
            self._basis = saturation_basis(self.rays, self.n) if self.rays else []
        return self._basis

    @property
    def simplicial(self) -> bool:
        return len(self.basis) == len(self.rays)


def _local_index(a: _ConeData, b: _ConeData) -> int:
    return _index_of_generated(a.basis + b.basis)


def _solution_signs(cols: Sequence[Sequence[int]], rhs: Sequence[int]):
    """Signs of the solution of ``sum x_j cols[j] = rhs`` over the integers.

    Returns a list of signs when the square system is nonsingular, ``False``
    when it is singular and inconsistent (so a translate is disjoint), and
    ``None`` when singular but consistent (the translate is not generic).
    Division-free Gauss-Jordan with gcd row reduction keeps entries small.
    """
    n = len(rhs)
    m = len(cols)
    a = [[c[i] for c in cols] + [rhs[i]] for i in range(n)]
    prow = 0
    pivots = []
    for c in range(m):
        piv = next((r for r in range(prow, n) if a[r][c]), None)
        if piv is None:
            continue
        a[prow], a[piv] = a[piv], a[prow]
        pr = a[prow]
        p = pr[c]
        for i in range(n):
            if i != prow and a[i][c]:
                f = a[i][c]
                row = [p * x - f * y for x, y in zip(a[i], pr)]
                g = 0
                for x in row:
                    if x:
                        g = gcd(g, x)
                        if g == 1:
                            break
                a[i] = [x // g for x in row] if g > 1 else row
        pivots.append(c)
        prow += 1
    if prow < m or m != n:
        if any(a[i][m] for i in range(prow, n)):
            return False
        return None
    out = []
    for i in range(n):
        num, den = a[i][n], a[i][i]
        out.append(0 if num == 0 else (1 if (num > 0) == (den > 0) else -1))
    return out


def local_counts(T: TropicalCycle, cones: Sequence[Sequence[Sequence[int]]], v: Sequence[Fraction], _cache: Optional[dict] = None) -> Optional[list[Fraction]]:
    """For each cone ``delta`` of complementary dimension, the weighted number
    of points of ``T ∩ (delta + v)``.  ``None`` if ``v`` is not generic."""
    n = T.ambient_dim
    cache = _cache if _cache is not None else {}
    if "t" not in cache:
        cache["t"] = [(_ConeData(r, n), w) for r, w in T.cones()]
        cache["d"] = [_ConeData(rays, n) for rays in cones]
    tdata, ddata = cache["t"], cache["d"]
    vv = [as_fraction(x) for x in v]
    scale = reduce(lambda x, y: x * y // gcd(x, y), (x.denominator for x in vv), 1)
    vint = [int(x * scale) for x in vv]
    out = []
    for dd in ddata:
        total = Fraction(0)
        for gd, w in tdata:
            res = None
            fast = len(gd.rays) + len(dd.rays) == n and gd.simplicial and dd.simplicial
            if fast:
                signs = _solution_signs(gd.rays + dd.neg, vint)
                if signs is None:
                    return None
                if signs is False:
                    res = False
                elif any(x < 0 for x in signs):
                    res = False
                elif any(x == 0 for x in signs):
                    return None
                else:
                    res = True
            if not fast:
                res = shifted_intersection(gd.cone, dd.cone, vv)
                if res is None:
                    return None
            if res:
                total += w * _local_index(gd, dd)
        out.append(total)
    return out


def _stable_local_counts(T, cones, rng, retries=MAX_RETRIES, cache=None):
    for _ in range(retries):
        v = random_displacement(rng, T.ambient_dim)
        counts = local_counts(T, cones, v, cache)
        if counts is not None:
            return counts
    raise RuntimeError("no generic displacement found; input looks degenerate")


def pairing_vector(T: TropicalCycle, X, seed: int = 0, draws: int = 2) -> dict[tuple[int, ...], Fraction]:
    """``deg([Y] . [V(sigma)])`` for every ``sigma`` in ``Sigma(k)``, k = dim T.

    The class ``[V(sigma)]`` is represented by its Minkowski weight on the
    cones of complementary dimension, and intersected with ``T`` by generic
    displacement.  The computation is repeated with ``draws`` independent
    displacements and the results must agree.
    """
    from .toric import pairing_matrix

    n, k = X.dim, T.dim
    if T.ambient_dim != n:
        raise ValueError("cycle and variety live in different lattices")
    rows, cols, mat = pairing_matrix(X, k)
    rng = random.Random(seed)
    row_rays = [[X.rays[i] for i in tau] for tau in rows]
    result = None
    cache: dict = {}
    for _ in range(max(1, draws)):
        counts = _stable_local_counts(T, row_rays, rng, cache=cache)
        vec = {sigma: sum((mat[r][c] * counts[r] for r in range(len(rows))), Fraction(0)) for c, sigma in enumerate(cols)}
        if result is None:
            result = vec
        elif vec != result:
            raise RuntimeError("displacement pairing changed between generic draws")
    return result


def displacement_pairing(T: TropicalCycle, X, sigma: Sequence[int], seed: int = 0, draws: int = 2) -> Fraction:
    """``deg([Y] . [V(sigma)])`` for a single cone ``sigma`` of dimension ``dim T``."""
    key = tuple(sorted(sigma))
    if len(key) != T.dim:
        raise ValueError("sigma must have dimension equal to dim T")
    if not X.is_cone(key):
        raise ValueError(f"{list(key)} is not a cone of the fan")
    return pairing_vector(T, X, seed=seed, draws=draws)[key]


# --------------------------------------------------------------------------
# Stable intersection
# --------------------------------------------------------------------------

def _tangent_cone(rays, p, n) -> list:
    gens = [list(r) for r in rays]
    if any(p):
        gens.append([-x for x in p])
    return gens


def _project(vectors, q):
    return [tuple(sum(Fraction(a) * b for a, b in zip(row, v)) for row in q) for v in vectors]


def stable_intersection(A: TropicalCycle, B: TropicalCycle, seed: int = 0) -> TropicalCycle:
    """Stable intersection computed cell by cell with the displacement rule."""
    n = A.ambient_dim
    if B.ambient_dim != n:
        raise ValueError("cycles live in different ambient spaces")
    d = A.dim + B.dim - n
    if d < 0:
        return TropicalCycle.empty(n, d)
    ad = [(_ConeData(r, n), w) for r, w in A.cones()]
    bd = [(_ConeData(r, n), w) for r, w in B.cones()]
    cells: dict[frozenset, list[tuple[int, ...]]] = {}
    for ga, _ in ad:
        for gb, _ in bd:
            if len(ga.basis) + len(gb.basis) < n or rank(ga.basis + gb.basis) < n:
                continue
            c = cone_intersect(ga.cone, gb.cone)
            if c.dim == d:
                cells.setdefault(frozenset(c.rays), list(c.rays))
    cell_list = list(cells.values())
    if d >= 2:
        for i in range(len(cell_list)):
            for j in range(i + 1, len(cell_list)):
                c = cone_intersect(cone_from_rays(cell_list[i], n), cone_from_rays(cell_list[j], n))
                if c.dim == d:
                    raise NotImplementedError("overlapping intersection cells; refine the inputs first")
    rng = random.Random(seed)
    out = []
    for rays in cell_list:
        p = [sum(r[t] for r in rays) for t in range(n)]
        pairs = [
            (ga, wa, gb, wb)
            for ga, wa in ad if ga.cone.contains(p)
            for gb, wb in bd if gb.cone.contains(p)
            if rank(ga.basis + gb.basis) == n
        ]
        q = kernel_basis(rays) if rays else [[int(i == j) for j in range(n)] for i in range(n)]
        local = []
        for ga, wa, gb, wb in pairs:
            ca = cone_from_rays(_project(_tangent_cone(ga.rays, p, n), q), n - d) if q else None
            cb = cone_from_rays(_project(_tangent_cone(gb.rays, p, n), q), n - d) if q else None
            local.append((ca, cb, wa * wb * _local_index(ga, gb)))
        weight = None
        for _ in range(MAX_RETRIES):
            v = random_displacement(rng, n - d)
            total = Fraction(0)
            for ca, cb, m in local:
                res = shifted_intersection(ca, cb, v) if ca is not None else True
                if res is None:
                    break
                if res:
                    total += m
            else:
                weight = total
                break
        if weight is None:
            raise RuntimeError("no generic displacement found; input looks degenerate")
        out.append((rays, weight))
    return _build_cycle(n, d, out)


# --------------------------------------------------------------------------
# Piecewise-linear divisors
# --------------------------------------------------------------------------

class PLDivisor:
    """A function on a simplicial fan, linear on each cone, given by ray values."""

    def __init__(self, base_fan: Fan, ray_values: Sequence | Mapping):
        if isinstance(ray_values, Mapping):
            vals = [Fraction(0)] * len(base_fan.rays)
            for k, v in ray_values.items():
                vals[int(k)] = as_fraction(v)
        else:
            if len(ray_values) != len(base_fan.rays):
                raise ValueError("need one value per ray")
            vals = [as_fraction(v) for v in ray_values]
        self.base_fan = base_fan
        self.ray_values = tuple(vals)

    def __add__(self, other):
        if other.base_fan is not self.base_fan and other.base_fan != self.base_fan:
            raise ValueError("divisors on different fans")
        return PLDivisor(self.base_fan, [a + b for a, b in zip(self.ray_values, other.ray_values)])

    def linear_on(self, cone: Sequence[int]) -> list[Fraction]:
        """A functional agreeing with the divisor on the cone's span."""
        rays = [self.base_fan.rays[i] for i in cone]
        if not rays:
            return [Fraction(0)] * self.base_fan.ambient_dim
        if rank(rays) != len(rays):
            raise ValueError("PL divisors need a simplicial base fan")
        ell = solve_rational(rays, [self.ray_values[i] for i in cone])
        return ell

    def __call__(self, point: Sequence) -> Fraction:
        for c in self.base_fan.maximal_cones:
            if self.base_fan.cone(c).contains(point):
                return _dot(self.linear_on(c), point)
        raise ValueError("point outside the support of the fan")


def _divisor_weights(T: TropicalCycle, functionals: Sequence[Sequence[Fraction]]) -> dict[tuple[int, ...], Fraction]:
    """Weights of ``phi . T`` on the codimension-one faces of T's fan.

    ``functionals[i]`` is a linear function agreeing with ``phi`` on the
    i-th maximal cone of T.
    """
    fan = T.fan
    n = fan.ambient_dim
    out: dict[tuple[int, ...], Fraction] = {}
    for tau, adj in _codim_one_faces(fan, T.dim).items():
        total = [Fraction(0)] * n
        acc = Fraction(0)
        for ci in adj:
            u = _normal(fan, tau, fan.maximal_cones[ci])
            w = T.weights[ci]
            acc += w * _dot(functionals[ci], u)
            total = [t + w * x for t, x in zip(total, u)]
        acc -= _dot(functionals[adj[0]], total)
        if acc != 0:
            out[tau] = acc
    return out


def _weights_to_cycle(T: TropicalCycle, weights: Mapping, check: bool = True) -> TropicalCycle:
    cells = [([T.fan.rays[i] for i in tau], w) for tau, w in weights.items()]
    return _build_cycle(T.ambient_dim, T.dim - 1, cells, check=check)


def _parent_cones(T: TropicalCycle, base: Fan) -> list[tuple[int, ...]]:
    parents = []
    base_index = {r: i for i, r in enumerate(base.rays)}
    for c in T.fan.maximal_cones:
        vecs = [T.fan.rays[i] for i in c]
        direct = tuple(sorted(base_index.get(v, -1) for v in vecs))
        if -1 not in direct and base.is_cone(direct):
            # cone of T is itself a cone of the base fan; pick a maximal cone containing it
            parents.append(next(m for m in base.maximal_cones if set(direct) <= set(m)))
            continue
        for m in base.maximal_cones:
            cone = base.cone(m)
            if all(cone.contains(v) for v in vecs):
                parents.append(m)
                break
        else:
            raise ValueError("cycle does not refine the divisor's base fan")
    return parents


def pl_divisor_intersect(phi: PLDivisor, T: TropicalCycle, check: bool = True) -> TropicalCycle:
    """The divisor ``phi . T`` supported on the codimension-one skeleton of T."""
    if phi.base_fan.ambient_dim != T.ambient_dim:
        raise ValueError("divisor and cycle live in different spaces")
    if T.dim == 0:
        return TropicalCycle.empty(T.ambient_dim, -1)
    parents = _parent_cones(T, phi.base_fan)
    funcs = [phi.linear_on(p) for p in parents]
    return _weights_to_cycle(T, _divisor_weights(T, funcs), check=check)


def refine_by_polynomial(T: TropicalCycle, f: LaurentPolynomial) -> tuple[TropicalCycle, list[tuple[int, ...]], list[tuple[int, ...]]]:
    """Subdivide T so that ``min <a, w>`` over the exponents of f is linear on each cone.

    Returns the refined cycle, for each of its maximal cones the exponent
    vector attaining the minimum, and the originating maximal cone of T.
    """
    if f.num_vars != T.ambient_dim:
        raise ValueError("polynomial and cycle have different numbers of variables")
    n = T.ambient_dim
    exps = f.exponents()
    cells, mins, origin = [], [], []
    for (rays, w), src in zip(T.cones(), T.fan.maximal_cones):
        dim = T.dim
        for a in exps:
            ineqs = [[b_i - a_i for a_i, b_i in zip(a, b)] for b in exps if b != a]
            if all(_dot(q, r) >= 0 for q in ineqs for r in rays):
                piece = list(rays)
            else:
                base = cone_from_rays(rays, n)
                region = cone_from_inequalities(ineqs, n)
                c = cone_intersect(base, region)
                if c.dim != dim or c.lineality:
                    continue
                piece = list(c.rays)
            cells.append((piece, w))
            mins.append(tuple(a))
            origin.append(tuple(src))
            if piece == list(rays):
                break
    # assemble by hand so the bookkeeping stays parallel to the cells
    ray_index: dict[tuple[int, ...], int] = {}
    cones = []
    for rays, _ in cells:
        idx = []
        for r in rays:
            r = tuple(int(x) for x in r)
            ray_index.setdefault(r, len(ray_index))
            idx.append(ray_index[r])
        cones.append(tuple(sorted(idx)))
    fan = Fan(sorted(ray_index, key=ray_index.get), cones, n)
    refined = TropicalCycle(fan, [w for _, w in cells], dim=T.dim, check=False)
    return refined, mins, origin


def hypersurface_intersect(f: LaurentPolynomial, T: TropicalCycle, check: bool = True) -> TropicalCycle:
    """``trop(f) . T`` as the divisor of the tropical polynomial of f on T.

    In the MIN convention this is the divisor of ``-min <a, w>``.
    """
    refined, mins, _ = refine_by_polynomial(T, f)
    funcs = [[-Fraction(x) for x in a] for a in mins]
    return _weights_to_cycle(refined, _divisor_weights(refined, funcs), check=check)
