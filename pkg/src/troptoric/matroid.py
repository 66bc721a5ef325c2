"""Realizable matroids, lattices of flats, characteristic polynomials, Bergman fans."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Callable, Optional, Sequence

from .exactlinalg import as_fraction, rank as matrix_rank
from .polyhedra import Fan
from .tropical import TropicalCycle

__all__ = [
    "Matroid",
    "FlatLattice",
    "Polynomial",
    "matroid_from_matrix",
    "matroid_from_graph",
    "flat_lattice",
    "characteristic_polynomial",
    "reduced_characteristic_polynomial",
    "chromatic_polynomial",
    "bergman_fan",
    "graph_realization",
]


# --------------------------------------------------------------------------
# Integer polynomials in q
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Polynomial:
    """Integer polynomial; ``coeffs[i]`` is the coefficient of ``q^i``."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(int(x) for x in c))

    @classmethod
    def from_descending(cls, coeffs: Sequence[int]) -> "Polynomial":
        return cls(tuple(reversed(list(coeffs))))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def descending(self) -> list[int]:
        return list(reversed(self.coeffs))

    def __call__(self, q):
        return sum(c * q**i for i, c in enumerate(self.coeffs))

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return Polynomial(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self):
        return Polynomial(tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return Polynomial(tuple(other * x for x in self.coeffs))
        out = [0] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    __rmul__ = __mul__

    def divide_by_q_minus(self, root: int) -> tuple["Polynomial", int]:
        """Synthetic division by ``q - root``; returns (quotient, remainder)."""
        desc = self.descending()
        if not desc:
            return Polynomial(()), 0
        out = [desc[0]]
        for c in desc[1:]:
            out.append(c + root * out[-1])
        rem = out.pop()
        return Polynomial.from_descending(out), rem

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mag = abs(c)
            mono = "" if i == 0 else ("q" if i == 1 else f"q^{i}")
            body = str(mag) if not mono else (mono if mag == 1 else f"{mag}{mono}")
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)


Q = Polynomial((0, 1))


# --------------------------------------------------------------------------
# Matroids
# --------------------------------------------------------------------------

class Matroid:
    """A matroid on ``range(ground_size)`` given by a rank oracle."""

    def __init__(self, ground_size: int, rank_fn: Callable[[frozenset], int], realization=None, edges=None):
        self.ground_size = ground_size
        self._rank_fn = lru_cache(maxsize=None)(rank_fn)
        self.realization = realization
        self.edges = edges
        self.rank = self.rank_of(range(ground_size))

    def rank_of(self, subset) -> int:
        return self._rank_fn(frozenset(subset))

    @property
    def ground_set(self) -> frozenset:
        return frozenset(range(self.ground_size))

    def closure(self, subset) -> frozenset:
        s = frozenset(subset)
        r = self.rank_of(s)
        return frozenset(e for e in range(self.ground_size) if e in s or self.rank_of(s | {e}) == r)

    def loops(self) -> list[int]:
        return [e for e in range(self.ground_size) if self.rank_of({e}) == 0]

    def is_connected_set(self, subset) -> bool:
        """Whether the restriction to ``subset`` has no nontrivial separator."""
        s = sorted(subset)
        if len(s) <= 1:
            return True
        r = self.rank_of(s)
        first, rest = s[0], s[1:]
        for k in range(0, len(rest)):
            for extra in combinations(rest, k):
                a = {first, *extra}
                b = set(s) - a
                if self.rank_of(a) + self.rank_of(b) == r:
                    return False
        return True

    def __repr__(self):
        return f"Matroid(ground_size={self.ground_size}, rank={self.rank})"


def matroid_from_matrix(a) -> Matroid:
    rows = [[as_fraction(x) for x in r] for r in a]
    if not rows:
        raise ValueError("matrix has no rows")
    ncols = len(rows[0])

    def rk(s: frozenset) -> int:
        if not s:
            return 0
        cols = sorted(s)
        return matrix_rank([[r[j] for j in cols] for r in rows])

    return Matroid(ncols, rk, realization=tuple(tuple(r) for r in rows))


def matroid_from_graph(edges: Sequence[Sequence]) -> Matroid:
    edge_list = [tuple(e) for e in edges]

    def rk(s: frozenset) -> int:
        parent: dict = {}

        def find(x):
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        r = 0
        for i in s:
            u, v = edge_list[i]
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                r += 1
        return r

    return Matroid(len(edge_list), rk, edges=tuple(edge_list))


def graph_realization(edges: Sequence[Sequence]) -> list[list[int]]:
    """Signed incidence matrix with one vertex row dropped per component."""
    edge_list = [tuple(e) for e in edges]
    verts = sorted({v for e in edge_list for v in e}, key=repr)
    parent = {v: v for v in verts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edge_list:
        parent[find(u)] = find(v)
    dropped = set()
    roots = set()
    for v in verts:
        r = find(v)
        if r not in roots:
            roots.add(r)
            dropped.add(v)
    rows = []
    for w in verts:
        if w in dropped:
            continue
        rows.append([(1 if u == w else 0) - (1 if v == w else 0) for u, v in edge_list])
    return rows


# --------------------------------------------------------------------------
# Lattice of flats
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FlatLattice:
    flats: tuple[tuple[frozenset, ...], ...]  # grouped by rank
    covers: tuple[tuple[frozenset, frozenset], ...]
    mobius: dict

    def all_flats(self) -> list[frozenset]:
        return [f for level in self.flats for f in level]

    def rank_of(self, flat: frozenset) -> int:
        for r, level in enumerate(self.flats):
            if flat in level:
                return r
        raise KeyError("not a flat")


def _sort_key(f: frozenset):
    return tuple(sorted(f))


def flat_lattice(M: Matroid) -> FlatLattice:
    if M.loops():
        raise ValueError(f"matroid has loops {M.loops()}; remove them first")
    levels: list[list[frozenset]] = [[frozenset()]]
    covers = []
    for r in range(M.rank):
        nxt: set = set()
        for f in levels[-1]:
            for e in range(M.ground_size):
                if e not in f:
                    g = M.closure(f | {e})
                    nxt.add(g)
                    covers.append((f, g))
        levels.append(sorted(nxt, key=_sort_key))
    mobius: dict = {frozenset(): 1}
    everything = [f for level in levels for f in level]
    for level in levels[1:]:
        for f in level:
            mobius[f] = -sum(mobius[g] for g in everything if g < f)
    return FlatLattice(
        tuple(tuple(level) for level in levels),
        tuple(sorted(set(covers), key=lambda p: (len(p[0]), _sort_key(p[0]), _sort_key(p[1])))),
        mobius,
    )


def characteristic_polynomial(M: Matroid) -> Polynomial:
    L = flat_lattice(M)
    coeffs = [0] * (M.rank + 1)
    for r, level in enumerate(L.flats):
        for f in level:
            coeffs[M.rank - r] += L.mobius[f]
    return Polynomial(tuple(coeffs))


def reduced_characteristic_polynomial(M: Matroid) -> Polynomial:
    quot, rem = characteristic_polynomial(M).divide_by_q_minus(1)
    if rem != 0:
        raise AssertionError("characteristic polynomial is not divisible by q - 1")
    return quot


def chromatic_polynomial(edges: Sequence[Sequence], vertices: Optional[Sequence] = None) -> Polynomial:
    """Chromatic polynomial by deletion and contraction."""
    verts = set(vertices or ()) | {v for e in edges for v in e}
    labels = {v: i for i, v in enumerate(sorted(verts, key=repr))}
    es = tuple(sorted(tuple(sorted((labels[u], labels[v]))) for u, v in edges))
    return _chromatic(len(labels), es)


@lru_cache(maxsize=None)
def _chromatic(nverts: int, edges: tuple) -> Polynomial:
    if any(u == v for u, v in edges):
        return Polynomial(())
    simple = tuple(sorted(set(edges)))
    if not simple:
        return Polynomial((0,) * nverts + (1,))
    (u, v), rest = simple[0], simple[1:]
    deleted = _chromatic(nverts, rest)
    # contract v into u, then relabel to keep vertices contiguous
    merged = []
    for a, b in rest:
        a = u if a == v else a
        b = u if b == v else b
        a = a - 1 if a > v else a
        b = b - 1 if b > v else b
        merged.append(tuple(sorted((a, b))))
    contracted = _chromatic(nverts - 1, tuple(sorted(merged)))
    return deleted - contracted


# --------------------------------------------------------------------------
# Bergman fans
# --------------------------------------------------------------------------

def _building_set(M: Matroid, L: FlatLattice, building: str) -> list[frozenset]:
    proper = [f for level in L.flats[1:-1] for f in level]
    if building == "maximal":
        return proper
    if building == "minimal":
        # the nested-set fan of a disconnected matroid carries a lineality space
        if not M.is_connected_set(M.ground_set):
            raise ValueError("the minimal building set needs a connected matroid")
        return [f for f in proper if M.is_connected_set(f)]
    raise ValueError(f"unknown building set {building!r}")


def _is_nested(M: Matroid, family: Sequence[frozenset], building: set) -> bool:
    """Nested-set condition: joins of pairwise incomparable members leave the building set."""
    fam = list(family)
    for k in range(2, len(fam) + 1):
        for sub in combinations(fam, k):
            if any(a < b or b < a for a, b in combinations(sub, 2)):
                continue
            join = M.closure(frozenset().union(*sub))
            if join in building:
                return False
    return True


def bergman_fan(M: Matroid, building: str = "maximal", dehomogenize_index: int = 0) -> TropicalCycle:
    """Bergman fan of a loopless matroid as a weight-one tropical cycle.

    Rays are the indicator vectors ``e_F`` of the building-set flats, made
    affine by subtracting ``(e_F)_i * 1`` and dropping coordinate ``i``
    (``i = dehomogenize_index``).  With the maximal building set the maximal
    cones are the maximal chains of proper flats; ``building="minimal"``
    uses connected flats and nested sets instead.
    """
    L = flat_lattice(M)
    n = M.ground_size
    if not 0 <= dehomogenize_index < n:
        raise ValueError("dehomogenization index out of range")
    top_rank = M.rank - 1
    gens = _building_set(M, L, building)
    gens.sort(key=lambda f: (M.rank_of(f), _sort_key(f)))
    idx = {f: i for i, f in enumerate(gens)}

    def ray(f):
        shift = 1 if dehomogenize_index in f else 0
        return tuple((1 if j in f else 0) - shift for j in range(n) if j != dehomogenize_index)

    rays = [ray(f) for f in gens]
    if top_rank == 0:
        fan = Fan([], [()], n - 1)
        return TropicalCycle(fan, [1], dim=0, check=False)

    if building == "maximal":
        cones = []

        def extend(chain):
            if len(chain) == top_rank:
                cones.append(tuple(sorted(idx[f] for f in chain)))
                return
            last = chain[-1] if chain else frozenset()
            for f in gens:
                if last < f and M.rank_of(f) == len(chain) + 1:
                    extend(chain + [f])

        extend([])
    else:
        bset = set(gens) | {M.ground_set}
        cones = []

        def grow(current, start):
            if len(current) == top_rank:
                cones.append(tuple(sorted(idx[f] for f in current)))
                return
            for i in range(start, len(gens)):
                cand = current + [gens[i]]
                if _is_nested(M, cand, bset):
                    grow(cand, i + 1)

        grow([], 0)
    fan = Fan(rays, sorted(cones), n - 1)
    return TropicalCycle(fan, [1] * len(cones), dim=top_rank, check=False)
