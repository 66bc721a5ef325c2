"""Toric varieties, torus-invariant divisors and cycles, and their products.

Products follow the simplicial rule

    D_rho . V(sigma) = mult(sigma) / mult(tau) . V(tau)   (tau = rho + sigma in the fan)

after moving ``D`` by a principal divisor so that it vanishes on the rays
of ``sigma``.  Coefficients are rational throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

from .exactlinalg import as_fraction, solve_rational
from .polyhedra import Fan, cone_multiplicity, fan_is_complete, fan_is_simplicial, fan_validate

__all__ = [
    "ToricVariety",
    "ToricDivisor",
    "ToricCycle",
    "LinearRelationSet",
    "make_toric_variety",
    "projective_space",
    "cartesian_product",
    "point_variety",
    "orbit_cycle",
    "divisor_times_cycle",
    "deg_cycle",
    "linear_relations",
    "make_transverse",
    "pairing_matrix",
    "toric_divisor_from_cycle",
    "render_cycle",
    "render_divisor",
]


class ToricVariety:
    """The toric variety of a fan, with completeness/simpliciality flags."""

    def __init__(self, fan: Fan, check: bool = True):
        if check:
            rep = fan_validate(fan)
            if not rep.ok:
                raise ValueError("invalid fan: " + "; ".join(rep.violations))
        self.fan = fan
        self.simplicial = fan_is_simplicial(fan, check=False)
        self.complete = fan_is_complete(fan, check=False)
        self.smooth = self.simplicial and all(cone_multiplicity(fan, c) == 1 for c in fan.maximal_cones)
        self._cones = None
        self._mult: dict = {}
        self._transverse: dict = {}
        self._pairing: dict = {}

    def __repr__(self):
        flags = [k for k in ("complete", "simplicial", "smooth") if getattr(self, k)]
        return f"ToricVariety(dim={self.dim}, rays={len(self.rays)}, {', '.join(flags) or 'no flags'})"

    @property
    def flags(self) -> dict:
        return {"complete": self.complete, "simplicial": self.simplicial, "smooth": self.smooth}

    @property
    def dim(self) -> int:
        return self.fan.ambient_dim

    @property
    def rays(self):
        return self.fan.rays

    @property
    def cone_set(self) -> frozenset:
        if self._cones is None:
            self._cones = frozenset(c for cs in self.fan.all_cones().values() for c in cs)
        return self._cones

    def cones(self, d: int) -> list[tuple[int, ...]]:
        """Cones of dimension ``d`` (= orbit closures of codimension ``d``)."""
        return self.fan.cones_of_dim(d)

    def is_cone(self, idx: Iterable[int]) -> bool:
        return tuple(sorted(idx)) in self.cone_set

    def mult(self, idx: Sequence[int]) -> int:
        key = tuple(sorted(idx))
        m = self._mult.get(key)
        if m is None:
            m = cone_multiplicity(self.fan, key)
            self._mult[key] = m
        return m

    def divisor(self, i: int) -> "ToricDivisor":
        """The torus-invariant prime divisor ``D_i``."""
        coeffs = [0] * len(self.rays)
        coeffs[i] = 1
        return ToricDivisor(self, coeffs)

    def orbit(self, idx: Iterable[int]) -> "ToricCycle":
        return orbit_cycle(self, idx)


def make_toric_variety(fan: Fan) -> ToricVariety:
    return ToricVariety(fan)


class ToricDivisor:
    """A Q-linear combination of the prime divisors ``D_rho``."""

    def __init__(self, variety: ToricVariety, coefficients: Sequence | Mapping):
        n = len(variety.rays)
        if isinstance(coefficients, Mapping):
            vals = [Fraction(0)] * n
            for k, c in coefficients.items():
                if not 0 <= int(k) < n:
                    raise ValueError(f"ray index {k} out of range")
                vals[int(k)] = as_fraction(c)
        else:
            if len(coefficients) != n:
                raise ValueError(f"expected {n} coefficients, got {len(coefficients)}")
            vals = [as_fraction(c) for c in coefficients]
        self.variety = variety
        self.coefficients = tuple(vals)

    def __getitem__(self, i):
        return self.coefficients[i]

    def __len__(self):
        return len(self.coefficients)

    def __eq__(self, other):
        return isinstance(other, ToricDivisor) and self.variety is other.variety and self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __add__(self, other):
        _same(self.variety, other.variety)
        return ToricDivisor(self.variety, [a + b for a, b in zip(self.coefficients, other.coefficients)])

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, k):
        k = as_fraction(k)
        return ToricDivisor(self.variety, [k * a for a in self.coefficients])

    def __neg__(self):
        return (-1) * self

    def __mul__(self, other):
        if isinstance(other, ToricCycle):
            return divisor_times_cycle(self, other)
        return NotImplemented

    def support(self) -> list[int]:
        return [i for i, c in enumerate(self.coefficients) if c != 0]

    def __repr__(self):
        return f"ToricDivisor({render_divisor(self)})"


class ToricCycle:
    """Formal Q-combination of orbit closures ``V(sigma)`` of a fixed codimension."""

    def __init__(self, variety: ToricVariety, codim: int, terms: Optional[Mapping] = None, check: bool = True):
        self.variety = variety
        self.codim = codim
        clean: dict[tuple[int, ...], Fraction] = {}
        for cone, c in (terms or {}).items():
            key = tuple(sorted(int(i) for i in cone))
            c = as_fraction(c)
            if check:
                if len(key) != codim:
                    raise ValueError(f"cone {list(key)} does not have {codim} rays")
                if not variety.is_cone(key):
                    raise ValueError(f"{list(key)} is not a cone of the fan")
            clean[key] = clean.get(key, Fraction(0)) + c
        self.terms = {k: v for k, v in sorted(clean.items()) if v != 0}

    def __eq__(self, other):
        return (
            isinstance(other, ToricCycle)
            and self.variety is other.variety
            and self.codim == other.codim
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.codim, tuple(self.terms.items())))

    def __add__(self, other):
        _same(self.variety, other.variety)
        if self.codim != other.codim:
            raise ValueError("cannot add cycles of different codimension")
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, Fraction(0)) + v
        return ToricCycle(self.variety, self.codim, t, check=False)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, k):
        k = as_fraction(k)
        return ToricCycle(self.variety, self.codim, {c: k * v for c, v in self.terms.items()}, check=False)

    def __neg__(self):
        return (-1) * self

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        return render_cycle(self)


def _same(a: ToricVariety, b: ToricVariety):
    if a is not b:
        raise ValueError("objects live on different toric varieties")


def orbit_cycle(X: ToricVariety, ray_indices: Iterable[int]) -> ToricCycle:
    key = tuple(sorted(set(ray_indices)))
    if not X.is_cone(key):
        raise ValueError(f"{list(key)} is not a cone of the fan")
    return ToricCycle(X, len(key), {key: 1}, check=False)


def projective_space(n: int) -> ToricVariety:
    if n < 1:
        raise ValueError("projective space needs n >= 1")
    rays = [[1 if i == j else 0 for j in range(n)] for i in range(n)] + [[-1] * n]
    cones = list(combinations(range(n + 1), n))
    return ToricVariety(Fan(rays, cones, n), check=False)


def point_variety() -> ToricVariety:
    """The zero-dimensional toric variety (fan consisting of the origin)."""
    return ToricVariety(Fan([], [()], 0), check=False)


def cartesian_product(a: ToricVariety, b: ToricVariety) -> ToricVariety:
    na, nb = a.dim, b.dim
    rays = [list(r) + [0] * nb for r in a.rays] + [[0] * na + list(r) for r in b.rays]
    off = len(a.rays)
    cones = [tuple(ca) + tuple(off + i for i in cb) for ca in a.fan.maximal_cones for cb in b.fan.maximal_cones]
    return ToricVariety(Fan(rays, cones, na + nb), check=False)


# --------------------------------------------------------------------------
# Linear equivalence
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearRelationSet:
    """Principal divisors ``div(chi^{e_i})`` for the standard basis of M."""

    variety: ToricVariety
    relations: tuple[tuple[int, ...], ...]

    def divisors(self) -> list[ToricDivisor]:
        return [ToricDivisor(self.variety, r) for r in self.relations]


def linear_relations(X: ToricVariety) -> LinearRelationSet:
    rels = tuple(tuple(r[i] for r in X.rays) for i in range(X.dim))
    return LinearRelationSet(X, rels)


def _principal(X: ToricVariety, m: Sequence[Fraction]) -> list[Fraction]:
    return [Fraction(sum(mi * vi for mi, vi in zip(m, v))) for v in X.rays]


def make_transverse(D: ToricDivisor, avoid: Iterable[int]) -> ToricDivisor:
    """A linearly equivalent divisor with zero coefficients on ``avoid``.

    Solves ``<m, v_rho> = -D_rho`` for ``rho`` in ``avoid`` and returns
    ``D + div(chi^m)``.  Raises ``ValueError`` if no such ``m`` exists.
    When ``m`` is not unique, pivots are taken on the last coordinates of M
    and the leading free coordinates are set to zero.
    """
    X = D.variety
    avoid = tuple(sorted(set(avoid)))
    if not any(D[i] != 0 for i in avoid):
        return D
    key = (D.coefficients, avoid)
    if key in X._transverse:
        return X._transverse[key]
    a = [list(X.rays[i])[::-1] for i in avoid]
    b = [-D[i] for i in avoid]
    m = solve_rational(a, b)
    if m is None:
        raise ValueError(f"no divisor linearly equivalent to D avoids rays {avoid}")
    m = m[::-1]
    shift = _principal(X, m)
    out = ToricDivisor(X, [c + s for c, s in zip(D.coefficients, shift)])
    assert all(out[i] == 0 for i in avoid)
    X._transverse[key] = out
    return out


# --------------------------------------------------------------------------
# Intersection products
# --------------------------------------------------------------------------

def _require_intersection_ready(X: ToricVariety):
    if not X.simplicial:
        raise ValueError("intersection products need a simplicial fan")
    if not X.complete:
        raise ValueError("intersection products need a complete fan")


def divisor_times_cycle(D: ToricDivisor, Z: ToricCycle) -> ToricCycle:
    """The product ``D . Z`` in the rational Chow ring."""
    _same(D.variety, Z.variety)
    X = Z.variety
    _require_intersection_ready(X)
    out: dict[tuple[int, ...], Fraction] = {}
    for sigma, c in Z.terms.items():
        Dm = make_transverse(D, sigma)
        ms = X.mult(sigma)
        sset = set(sigma)
        for rho, d in enumerate(Dm.coefficients):
            if d == 0 or rho in sset:
                continue
            tau = tuple(sorted(sset | {rho}))
            if X.is_cone(tau):
                out[tau] = out.get(tau, Fraction(0)) + c * d * Fraction(ms, X.mult(tau))
    return ToricCycle(X, Z.codim + 1, out, check=False)


def deg_cycle(Z: ToricCycle) -> Fraction:
    """Degree of a zero-dimensional cycle (each torus-fixed point has degree 1)."""
    X = Z.variety
    if Z.codim != X.dim:
        raise ValueError(f"degree needs a cycle of codimension {X.dim}, got {Z.codim}")
    if not X.complete:
        raise ValueError("degrees are only defined on complete varieties")
    return sum(Z.terms.values(), Fraction(0))


def _orbit_class_product(X: ToricVariety, sigma: Sequence[int], Z: ToricCycle, order: Optional[Sequence[int]] = None) -> ToricCycle:
    """``[V(sigma)] . Z`` via ``V(sigma) = mult(sigma) * prod D_rho``."""
    rays = list(order) if order is not None else list(sigma)
    cur = Z
    for rho in rays:
        cur = divisor_times_cycle(X.divisor(rho), cur)
    return X.mult(sigma) * cur


def pairing_matrix(X: ToricVariety, k: int, order: Optional[Mapping] = None) -> tuple[list, list, list[list[Fraction]]]:
    """Degrees ``deg([V(tau)] . [V(sigma)])`` for tau in Sigma(n-k), sigma in Sigma(k).

    Returns ``(row_cones, col_cones, matrix)``.  ``order`` optionally maps a
    column cone to the order in which its rays are multiplied.
    """
    _require_intersection_ready(X)
    if not order and k in X._pairing:
        rows, cols, mat = X._pairing[k]
        return rows, cols, [list(r) for r in mat]
    n = X.dim
    rows = X.cones(n - k)
    cols = X.cones(k)
    top = {frozenset(c) for c in X.cones(n)}
    mat = []
    for tau in rows:
        base = None
        row = []
        for sigma in cols:
            if order or set(tau) & set(sigma):
                # shared rays: move one factor off the other first
                if base is None:
                    base = orbit_cycle(X, tau)
                ordering = order.get(sigma) if order else None
                row.append(deg_cycle(_orbit_class_product(X, sigma, base, ordering)))
            elif frozenset(tau) | frozenset(sigma) in top:
                joint = tuple(sorted(set(tau) | set(sigma)))
                row.append(Fraction(X.mult(tau) * X.mult(sigma), X.mult(joint)))
            else:
                row.append(Fraction(0))
        mat.append(row)
    if not order:
        X._pairing[k] = (rows, cols, [list(r) for r in mat])
    return rows, cols, mat


def toric_divisor_from_cycle(Z: ToricCycle) -> ToricDivisor:
    if Z.codim != 1:
        raise ValueError("only codimension-one cycles correspond to divisors")
    coeffs = [Fraction(0)] * len(Z.variety.rays)
    for (i,), c in Z.terms.items():
        coeffs[i] = c
    return ToricDivisor(Z.variety, coeffs)


def cycle_from_divisor(D: ToricDivisor) -> ToricCycle:
    return ToricCycle(D.variety, 1, {(i,): c for i, c in enumerate(D.coefficients) if c}, check=False)


# --------------------------------------------------------------------------
# Rendering
# --------------------------------------------------------------------------

def _render_terms(items) -> str:
    parts = []
    for label, c in items:
        mag = abs(c)
        body = label if mag == 1 else f"{mag}*{label}"
        if not parts:
            parts.append(body if c > 0 else f"- {body}")
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts) if parts else "0"


def render_cycle(Z: ToricCycle) -> str:
    """Human-readable listing such as ``- X_{1,2}`` or ``2*X_{0}``."""
    return _render_terms((f"X_{{{','.join(str(i) for i in cone)}}}", c) for cone, c in sorted(Z.terms.items()))


def render_divisor(D: ToricDivisor) -> str:
    return _render_terms((f"X_{i}", c) for i, c in enumerate(D.coefficients) if c != 0)
