"""Rational polyhedral cones and fans.

Cones are converted between generator and inequality form with the
double description method.  All coordinates are exact; rays are kept as
primitive integer tuples.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .exactlinalg import (
    as_fraction,
    integral_vector,
    kernel_basis,
    lattice_index,
    primitive_vector,
    rank,
    solve_rational,
)
from .lp import is_feasible

__all__ = [
    "Cone",
    "Fan",
    "FanReport",
    "Outcome",
    "ConeMembershipQuery",
    "double_description",
    "cone_from_rays",
    "cone_from_inequalities",
    "dual_description",
    "cone_intersect",
    "cone_contains",
    "shifted_intersection",
    "shifted_intersection_is_point",
    "fan_validate",
    "fan_is_complete",
    "fan_is_simplicial",
]


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _normalize(v) -> tuple[int, ...]:
    return tuple(integral_vector(v))


# --------------------------------------------------------------------------
# Double description
# --------------------------------------------------------------------------

def double_description(ineqs: Sequence[Sequence], n: int) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """Generators of ``{x in R^n : a @ x >= 0 for a in ineqs}``.

    Returns ``(lineality_basis, extreme_rays)``.  Rays are primitive integer
    vectors; extreme rays are representatives modulo the lineality space.
    """
    lin = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    rays: list[tuple[int, ...]] = []
    zeros: list[frozenset] = []  # indices of processed constraints tight at each ray
    processed: list[tuple[int, ...]] = []

    for raw in ineqs:
        a = _normalize(raw)
        if not any(a):
            continue
        idx = len(processed)
        processed.append(a)
        vals = [_dot(a, l) for l in lin]
        k = next((i for i, v in enumerate(vals) if v != 0), None)
        if k is not None:
            l0 = lin[k] if vals[k] > 0 else tuple(-x for x in lin[k])
            a0 = abs(vals[k])
            new_lin = []
            for i, l in enumerate(lin):
                if i == k:
                    continue
                if vals[i]:
                    l = _normalize([a0 * x - _dot(a, l) * y for x, y in zip(l, l0)])
                new_lin.append(l)
            new_rays = []
            new_zeros = []
            for r, z in zip(rays, zeros):
                ar = _dot(a, r)
                if ar:
                    r = _normalize([a0 * x - ar * y for x, y in zip(r, l0)])
                new_rays.append(r)
                new_zeros.append(z | {idx})
            # l0 is tight on every earlier constraint but not on this one
            new_rays.append(l0)
            new_zeros.append(frozenset(range(idx)))
            lin, rays, zeros = new_lin, new_rays, new_zeros
            continue

        pos, neg, zer = [], [], []
        for i, r in enumerate(rays):
            v = _dot(a, r)
            (pos if v > 0 else neg if v < 0 else zer).append((i, v))
        new_rays = [rays[i] for i, _ in pos] + [rays[i] for i, _ in zer]
        new_zeros = [zeros[i] for i, _ in pos] + [zeros[i] | {idx} for i, _ in zer]
        for i, vp in pos:
            for j, vn in neg:
                common = zeros[i] & zeros[j]
                adjacent = True
                for t in range(len(rays)):
                    if t != i and t != j and common <= zeros[t]:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                r = _normalize([vp * y - vn * x for x, y in zip(rays[i], rays[j])])
                new_rays.append(r)
                new_zeros.append(common | {idx})
        rays, zeros = new_rays, new_zeros

    seen = set()
    out = []
    for r in rays:
        if r not in seen:
            seen.add(r)
            out.append(r)
    return lin, out


def _orth_complement(vectors: Sequence[Sequence], n: int) -> list[tuple[int, ...]]:
    if not vectors:
        return [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    return [tuple(v) for v in kernel_basis([list(v) for v in vectors])]


def _project_off(v, basis):
    """Orthogonal projection of ``v`` onto the complement of ``span(basis)``."""
    if not basis:
        return tuple(v)
    gram = [[Fraction(_dot(a, b)) for b in basis] for a in basis]
    rhs = [Fraction(_dot(a, v)) for a in basis]
    coef = solve_rational(gram, rhs)
    return tuple(Fraction(x) - sum(c * b[i] for c, b in zip(coef, basis)) for i, x in enumerate(v))


# --------------------------------------------------------------------------
# Cones
# --------------------------------------------------------------------------

@dataclass(eq=False)
class Cone:
    """A rational polyhedral cone ``cone(rays) + span(lineality)``.

    Build through :func:`cone_from_rays` for a canonical description; the
    raw constructor trusts its input (fans use it for cones whose rays are
    already known to be extremal).
    """

    ambient_dim: int
    rays: tuple[tuple[int, ...], ...]
    lineality: tuple[tuple[int, ...], ...] = ()
    _facets: Optional[tuple] = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        gens = list(self.rays) + list(self.lineality)
        return rank(gens) if gens else 0

    @property
    def is_pointed(self) -> bool:
        return not self.lineality

    def _compute_dual(self):
        gens = [list(r) for r in self.rays]
        ineqs = gens + [list(l) for l in self.lineality] + [[-x for x in l] for l in self.lineality]
        dual_lin, dual_rays = double_description(ineqs, self.ambient_dim)
        object.__setattr__(self, "_facets", (tuple(dual_rays), tuple(dual_lin)))

    def facets(self) -> tuple[tuple[int, ...], ...]:
        """Facet normals ``a`` (inequalities ``a @ x >= 0``), cached."""
        if self._facets is None:
            self._compute_dual()
        return self._facets[0]

    def equations(self) -> tuple[tuple[int, ...], ...]:
        """Basis of the orthogonal complement of the cone's span."""
        if self._facets is None:
            self._compute_dual()
        return self._facets[1]

    def contains(self, point: Sequence, strict: bool = False) -> bool:
        p = [as_fraction(x) for x in point]
        if any(_dot(e, p) != 0 for e in self.equations()):
            return False
        if strict:
            return all(_dot(f, p) > 0 for f in self.facets())
        return all(_dot(f, p) >= 0 for f in self.facets())

    def ray_set(self) -> frozenset:
        return frozenset(self.rays)

    def __eq__(self, other):
        if not isinstance(other, Cone):
            return NotImplemented
        if self.ambient_dim != other.ambient_dim:
            return False
        a = cone_from_rays(list(self.rays) + _pm(self.lineality), self.ambient_dim)
        b = cone_from_rays(list(other.rays) + _pm(other.lineality), other.ambient_dim)
        if len(a.lineality) != len(b.lineality):
            return False
        if a.lineality and rank(list(a.lineality) + list(b.lineality)) != len(a.lineality):
            return False
        return a.ray_set() == b.ray_set()

    def __hash__(self):
        return hash((self.ambient_dim, self.dim))


def _pm(vectors):
    out = []
    for v in vectors:
        out.append(tuple(v))
        out.append(tuple(-x for x in v))
    return out


def cone_from_inequalities(ineqs: Sequence[Sequence], n: int) -> Cone:
    lin, rays = double_description(ineqs, n)
    lin = [_normalize(l) for l in lin]
    if lin:
        rays = [_normalize(_project_off(r, lin)) for r in rays]
        rays = [r for r in dict.fromkeys(rays) if any(r)]
    cone = Cone(n, tuple(sorted(rays)), tuple(lin))
    return cone


def cone_from_rays(rays: Sequence[Sequence[int]], ambient_dim: Optional[int] = None) -> Cone:
    """Canonical cone generated by ``rays``.

    Generators are made primitive, deduplicated and reduced to the
    extremal ones; a lineality space is split off if the cone is not
    pointed.
    """
    vecs = [list(r) for r in rays]
    if ambient_dim is None:
        if not vecs:
            raise ValueError("ambient dimension needed for the zero cone")
        ambient_dim = len(vecs[0])
    if any(len(v) != ambient_dim for v in vecs):
        raise ValueError("generators have mismatched dimensions")
    vecs = [v for v in vecs if any(as_fraction(x) != 0 for x in v)]
    if not vecs:
        return Cone(ambient_dim, (), ())
    raw = Cone(ambient_dim, tuple(_normalize(v) for v in vecs), ())
    facets = list(raw.facets())
    eqs = list(raw.equations())
    ineqs = facets + _pm(eqs)
    cone = cone_from_inequalities(ineqs, ambient_dim)
    object.__setattr__(cone, "_facets", (tuple(facets), tuple(eqs)))
    return cone


def dual_description(c: Cone) -> list[tuple[int, ...]]:
    """Inequalities whose common nonnegativity locus is ``c``.

    Facet normals come first; if the cone is not full dimensional each
    equation of its span contributes the pair ``e, -e``.
    """
    return list(c.facets()) + _pm(c.equations())


def cone_intersect(a: Cone, b: Cone) -> Cone:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("cones live in different ambient spaces")
    ineqs = dual_description(a) + dual_description(b)
    out = cone_from_inequalities(ineqs, a.ambient_dim)
    return cone_from_rays(list(out.rays) + _pm(out.lineality), a.ambient_dim)


@dataclass(frozen=True)
class ConeMembershipQuery:
    point: tuple
    generators: tuple

    def __post_init__(self):
        n = len(self.point)
        if any(len(g) != n for g in self.generators):
            raise ValueError("point and generators have different dimensions")


def cone_contains(q: ConeMembershipQuery | Sequence, generators: Optional[Sequence] = None) -> bool:
    """Whether a point is a nonnegative combination of generators (exact LP)."""
    if not isinstance(q, ConeMembershipQuery):
        q = ConeMembershipQuery(tuple(q), tuple(tuple(g) for g in generators))
    point = [as_fraction(x) for x in q.point]
    if not q.generators:
        return all(x == 0 for x in point)
    a = [[as_fraction(g[i]) for g in q.generators] for i in range(len(point))]
    return is_feasible(a, point)


# --------------------------------------------------------------------------
# Shifted intersections (generic displacement)
# --------------------------------------------------------------------------

class Outcome(enum.Enum):
    EMPTY = "empty"
    POINT = "point"
    POSITIVE_DIM = "positiveDim"


def shifted_intersection_is_point(a: Cone, b: Cone, v: Sequence) -> Outcome:
    """Classify ``a ∩ (b + v)`` as empty, a point, or positive dimensional."""
    n = a.ambient_dim
    if b.ambient_dim != n or len(v) != n:
        raise ValueError("dimension mismatch")
    if a.dim + b.dim != n:
        raise ValueError("cones must have complementary dimensions")
    vv = [as_fraction(x) for x in v]
    # homogenize: x in a, x - t v in b, t >= 0; look at the slice t = 1
    ineqs = []
    for f in dual_description(a):
        ineqs.append(list(f) + [0])
    for f in dual_description(b):
        ineqs.append(list(f) + [-_dot(f, vv)])
    ineqs.append([0] * n + [1])
    lin, rays = double_description(ineqs, n + 1)
    if lin:
        return Outcome.POSITIVE_DIM
    vertices = [r for r in rays if r[-1] > 0]
    recession = [r for r in rays if r[-1] == 0]
    if not vertices:
        return Outcome.EMPTY
    if len(vertices) == 1 and not recession:
        return Outcome.POINT
    return Outcome.POSITIVE_DIM


def _independent_subset(vectors) -> list:
    chosen: list = []
    for v in vectors:
        if rank(chosen + [list(v)]) > len(chosen):
            chosen.append(list(v))
    return chosen


def shifted_intersection(a: Cone, b: Cone, v: Sequence[Fraction]) -> Optional[bool]:
    """Fast generic-position test used inside displacement sums.

    ``a`` and ``b`` must have complementary dimensions; either may carry a
    lineality space.  Returns ``True`` if ``a ∩ (b + v)`` is a single point
    lying in both relative interiors, ``False`` if it is empty, and
    ``None`` when ``v`` is not generic for this pair.
    """
    n = len(v)
    a_basis = _independent_subset(list(a.rays) + list(a.lineality))
    b_basis = _independent_subset(list(b.rays) + list(b.lineality))
    gens = a_basis + [[-x for x in g] for g in b_basis]
    if len(a_basis) + len(b_basis) != n or rank(gens) < n:
        # spans do not fill R^n; a generic v misses them entirely
        if rank(gens + [list(v)]) == rank(gens):
            return None
        return False
    cols = [[Fraction(g[i]) for g in gens] for i in range(n)]
    sol = solve_rational(cols, list(v))
    k = len(a_basis)
    p = [sum(sol[j] * a_basis[j][i] for j in range(k)) for i in range(n)]
    q = [p[i] - v[i] for i in range(n)]
    sa = _side(a, p)
    sb = _side(b, q)
    if sa < 0 or sb < 0:
        return False
    if sa == 0 or sb == 0:
        return None
    return True


def _side(cone: Cone, p) -> int:
    """1 if p in the relative interior, 0 on the relative boundary, -1 outside."""
    vals = [_dot(f, p) for f in cone.facets()]
    if any(x < 0 for x in vals):
        return -1
    if any(x == 0 for x in vals):
        return 0
    return 1


# --------------------------------------------------------------------------
# Fans
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FanReport:
    ok: bool
    violations: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok


class Fan:
    """Rays plus maximal cones given as sets of ray indices."""

    def __init__(self, rays: Sequence[Sequence[int]], maximal_cones: Iterable[Iterable[int]], ambient_dim: Optional[int] = None):
        self.rays = tuple(tuple(int(as_fraction(x)) for x in r) for r in rays)
        if ambient_dim is None:
            if not self.rays:
                raise ValueError("ambient dimension needed for a fan without rays")
            ambient_dim = len(self.rays[0])
        if any(len(r) != ambient_dim for r in self.rays):
            raise ValueError("rays have mismatched dimensions")
        self.ambient_dim = ambient_dim
        cones = []
        for c in maximal_cones:
            c = tuple(sorted(set(int(i) for i in c)))
            if any(i < 0 or i >= len(self.rays) for i in c):
                raise ValueError(f"cone {list(c)} references a missing ray")
            cones.append(c)
        self.maximal_cones = tuple(cones)
        self._cone_cache: dict = {}
        self._faces = None

    def __repr__(self):
        return f"Fan(ambient_dim={self.ambient_dim}, rays={len(self.rays)}, maximal_cones={len(self.maximal_cones)})"

    def __eq__(self, other):
        if not isinstance(other, Fan):
            return NotImplemented
        return (self.ambient_dim, self.rays, self.maximal_cones) == (other.ambient_dim, other.rays, other.maximal_cones)

    def __hash__(self):
        return hash((self.ambient_dim, self.rays, self.maximal_cones))

    def cone(self, idx: Iterable[int]) -> Cone:
        key = tuple(sorted(idx))
        c = self._cone_cache.get(key)
        if c is None:
            c = Cone(self.ambient_dim, tuple(self.rays[i] for i in key))
            self._cone_cache[key] = c
        return c

    def cone_dim(self, idx: Iterable[int]) -> int:
        key = tuple(idx)
        return rank([self.rays[i] for i in key]) if key else 0

    @property
    def dim(self) -> int:
        return max((self.cone_dim(c) for c in self.maximal_cones), default=0)

    def is_pure(self) -> bool:
        dims = {self.cone_dim(c) for c in self.maximal_cones}
        return len(dims) <= 1

    def faces_of(self, idx: Sequence[int]) -> set[tuple[int, ...]]:
        """All faces of a cone of the fan, as sorted ray-index tuples."""
        idx = tuple(sorted(idx))
        vecs = [self.rays[i] for i in idx]
        if not vecs or rank(vecs) == len(vecs):
            return {tuple(s) for k in range(len(idx) + 1) for s in combinations(idx, k)}
        cone = self.cone(idx)
        facet_sets = []
        for f in cone.facets():
            facet_sets.append(frozenset(i for i in idx if _dot(f, self.rays[i]) == 0))
        faces = {frozenset(idx)}
        frontier = [frozenset(idx)]
        while frontier:
            nxt = []
            for face in frontier:
                for fs in facet_sets:
                    g = face & fs
                    if g != face and g not in faces:
                        faces.add(g)
                        nxt.append(g)
            frontier = nxt
        return {tuple(sorted(f)) for f in faces}

    def all_cones(self) -> dict[int, list[tuple[int, ...]]]:
        """Every cone of the fan grouped by dimension, lexicographically sorted."""
        if self._faces is None:
            seen: set = set()
            for c in self.maximal_cones:
                seen |= self.faces_of(c)
            by_dim: dict[int, list] = {}
            for f in seen:
                by_dim.setdefault(self.cone_dim(f), []).append(f)
            self._faces = {d: sorted(v) for d, v in sorted(by_dim.items())}
        return self._faces

    def cones_of_dim(self, d: int) -> list[tuple[int, ...]]:
        return list(self.all_cones().get(d, []))

    def is_cone(self, idx: Iterable[int]) -> bool:
        key = tuple(sorted(idx))
        return key in set(self.cones_of_dim(self.cone_dim(key)))

    def ray_index(self, vec: Sequence[int]) -> int:
        p = primitive_vector(vec)
        try:
            return self.rays.index(p)
        except ValueError:
            raise KeyError(f"{p} is not a ray of the fan") from None


def _is_face(cone: Cone, subset: frozenset) -> bool:
    """Whether the rays in ``subset`` (a subset of ``cone.rays``) span a face."""
    tight = [f for f in cone.facets() if all(_dot(f, r) == 0 for r in subset)]
    closure = frozenset(r for r in cone.rays if all(_dot(f, r) == 0 for f in tight))
    return closure == subset


def fan_validate(f: Fan) -> FanReport:
    """Check primitivity, cone validity and the face-intersection axiom."""
    bad: list[str] = []
    seen = {}
    for i, r in enumerate(f.rays):
        if not any(r):
            bad.append(f"ray {i} is zero")
            continue
        if primitive_vector(r) != r:
            bad.append(f"ray {i} is not primitive")
        if r in seen:
            bad.append(f"rays {seen[r]} and {i} coincide")
        seen.setdefault(r, i)
    if bad:
        return FanReport(False, tuple(bad))

    canon = []
    for k, c in enumerate(f.maximal_cones):
        cone = f.cone(c)
        full = cone_from_rays(list(cone.rays), f.ambient_dim) if cone.rays else cone
        if full.lineality:
            bad.append(f"cone {k} is not pointed")
        elif full.ray_set() != frozenset(cone.rays):
            bad.append(f"cone {k} lists non-extremal rays")
        canon.append(cone)
    if bad:
        return FanReport(False, tuple(bad))

    sets = [frozenset(c) for c in f.maximal_cones]
    for i, j in combinations(range(len(sets)), 2):
        a, b = sets[i], sets[j]
        if a == b:
            bad.append(f"cones {i} and {j} are identical")
            continue
        ra = [f.rays[t] for t in a]
        rb = [f.rays[t] for t in b]
        union = [f.rays[t] for t in a | b]
        if len(a) == f.cone_dim(a) and len(b) == f.cone_dim(b) and rank(union) == len(a | b):
            # independent union: intersection is the common face
            if a < b or b < a:
                bad.append(f"cone {i if a < b else j} is a face of cone {j if a < b else i}")
            continue
        inter = cone_intersect(canon[i], canon[j])
        if inter.lineality:
            bad.append(f"cones {i} and {j} meet in a non-pointed set")
            continue
        ir = inter.ray_set()
        if not (ir <= frozenset(ra) and ir <= frozenset(rb)):
            bad.append(f"cones {i} and {j} overlap improperly")
            continue
        if not _is_face(canon[i], ir) or not _is_face(canon[j], ir):
            bad.append(f"cones {i} and {j} overlap improperly")
            continue
        if ir == frozenset(ra) or ir == frozenset(rb):
            small, big = (i, j) if ir == frozenset(ra) else (j, i)
            bad.append(f"cone {small} is a face of cone {big}")
    return FanReport(not bad, tuple(bad))


def _require_valid(f: Fan):
    rep = fan_validate(f)
    if not rep.ok:
        raise ValueError("invalid fan: " + "; ".join(rep.violations))


def fan_is_simplicial(f: Fan, check: bool = True) -> bool:
    if check:
        _require_valid(f)
    return all(len(c) == f.cone_dim(c) for c in f.maximal_cones)


def fan_is_complete(f: Fan, check: bool = True) -> bool:
    """Completeness via the two-sided wall condition."""
    if check:
        _require_valid(f)
    n = f.ambient_dim
    if n == 0:
        return True
    if not f.maximal_cones or any(f.cone_dim(c) != n for c in f.maximal_cones):
        return False
    walls: dict = {}
    for c in f.maximal_cones:
        if len(c) == n:
            ws = [frozenset(s) for s in combinations(c, n - 1)]
        else:
            cone = f.cone(c)
            ws = [frozenset(i for i in c if _dot(fa, f.rays[i]) == 0) for fa in cone.facets()]
        for w in ws:
            walls[w] = walls.get(w, 0) + 1
    return all(v == 2 for v in walls.values())


def cone_multiplicity(f: Fan, idx: Sequence[int]) -> int:
    """Lattice index of a simplicial cone's ray generators."""
    if not idx:
        return 1
    return lattice_index([f.rays[i] for i in idx])
