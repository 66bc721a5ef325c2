"""Recovering rational-equivalence classes from tropical data.

The class of ``Y`` in a complete simplicial toric variety is determined by
the numbers ``deg([Y] . [V(sigma)])``; these are computed from ``trop(Y)``
by generic displacement and then matched against the orbit-closure pairing
matrix with one exact linear solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exactlinalg import as_fraction, kernel_basis, rank, solve_rational
from .matroid import (
    Matroid,
    bergman_fan,
    graph_realization,
    matroid_from_graph,
    matroid_from_matrix,
    reduced_characteristic_polynomial,
)
from .toric import (
    ToricCycle,
    ToricVariety,
    cartesian_product,
    pairing_matrix,
    projective_space,
)
from .tropical import (
    LaurentPolynomial,
    MonomialMap,
    PLDivisor,
    TropicalCycle,
    _parent_cones,
    check_balancing,
    pairing_vector,
    pushforward,
    refine_by_polynomial,
    tropical_hypersurface,
)

__all__ = [
    "StructuredIdeal",
    "CoxPolynomial",
    "PairingVector",
    "ClassResult",
    "HuhKatzReport",
    "tropicalize",
    "class_from_tropical",
    "recover_class",
    "cox_dehomogenize",
    "class_from_tropical_cox",
    "class_wonderful_compactification",
    "boundary_orders",
    "huh_katz_check",
    "class_coefficients_by_type",
]


# --------------------------------------------------------------------------
# Structured ideals
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class StructuredIdeal:
    """An ideal in a shape this package can tropicalize.

    ``variant`` is one of ``"principal"``, ``"linear"``, ``"monomialGraph"``
    or ``"explicitTropical"``.  A linear ideal is generated by the affine
    forms ``constants[i] + sum_j matrix[i][j] * x_j``.
    """

    variant: str
    polynomial: Optional[LaurentPolynomial] = None
    matrix: Optional[tuple] = None
    constants: Optional[tuple] = None
    map: Optional[MonomialMap] = None
    cycle: Optional[TropicalCycle] = None

    @classmethod
    def principal(cls, f: LaurentPolynomial) -> "StructuredIdeal":
        return cls("principal", polynomial=f)

    @classmethod
    def linear(cls, matrix: Sequence[Sequence], constants: Sequence) -> "StructuredIdeal":
        m = tuple(tuple(as_fraction(x) for x in r) for r in matrix)
        c = tuple(as_fraction(x) for x in constants)
        if len(c) != len(m):
            raise ValueError("need one constant per linear form")
        ideal = cls("linear", matrix=m, constants=c)
        ideal.matroid()  # validates: the linear space must meet the torus
        return ideal

    @classmethod
    def linear_from_polynomials(cls, polys: Sequence[LaurentPolynomial]) -> "StructuredIdeal":
        if not polys:
            raise ValueError("need at least one linear form")
        n = polys[0].num_vars
        rows, consts = [], []
        for p in polys:
            row = [Fraction(0)] * n
            const = Fraction(0)
            for e, c in p.terms.items():
                if all(x == 0 for x in e):
                    const += c
                elif sum(e) == 1 and all(x in (0, 1) for x in e):
                    row[e.index(1)] += c
                else:
                    raise ValueError("generator is not an affine linear form")
            rows.append(row)
            consts.append(const)
        return cls.linear(rows, consts)

    @classmethod
    def from_realization(cls, a: Sequence[Sequence]) -> "StructuredIdeal":
        """The linear space spanned by the rows of ``a``, dehomogenized at column 0.

        Its arrangement matroid is the column matroid of ``a``.
        """
        rows = kernel_basis([[as_fraction(x) for x in r] for r in a])
        if not rows:
            raise ValueError("the realization spans the whole space; there are no equations")
        return cls.linear([r[1:] for r in rows], [r[0] for r in rows])

    @classmethod
    def monomial_graph(cls, linear: "StructuredIdeal", m: MonomialMap) -> "StructuredIdeal":
        if linear.variant != "linear":
            raise ValueError("the source of a monomial graph must be a linear ideal")
        return cls("monomialGraph", matrix=linear.matrix, constants=linear.constants, map=m)

    @classmethod
    def explicit(cls, T: TropicalCycle) -> "StructuredIdeal":
        return cls("explicitTropical", cycle=T)

    @property
    def num_vars(self) -> int:
        if self.variant == "principal":
            return self.polynomial.num_vars
        if self.variant == "explicitTropical":
            return self.cycle.ambient_dim
        if self.variant == "monomialGraph":
            return self.map.target_dim
        return len(self.matrix[0])

    def linear_part(self) -> "StructuredIdeal":
        return StructuredIdeal("linear", matrix=self.matrix, constants=self.constants)

    def matroid(self) -> Matroid:
        """Matroid of the homogenized linear space (element 0 = constant coordinate)."""
        if self.matrix is None:
            raise ValueError("only linear ideals have an arrangement matroid")
        ext = [[c] + list(r) for c, r in zip(self.constants, self.matrix)]
        ker = kernel_basis(ext)
        if not ker:
            raise ValueError("the linear ideal has no solutions")
        m = matroid_from_matrix(ker)
        loops = m.loops()
        if loops:
            if 0 in loops:
                raise ValueError("the affine linear system is inconsistent")
            raise ValueError(f"the linear space lies in coordinate hyperplanes {[i - 1 for i in loops]}")
        return m


def tropicalize(I: StructuredIdeal, building: str = "maximal") -> TropicalCycle:
    if I.variant == "principal":
        return tropical_hypersurface(I.polynomial)
    if I.variant == "linear":
        return bergman_fan(I.matroid(), building=building)
    if I.variant == "monomialGraph":
        return pushforward(I.map, bergman_fan(I.linear_part().matroid(), building=building))
    if I.variant == "explicitTropical":
        rep = check_balancing(I.cycle)
        if not rep.balanced:
            raise ValueError(f"supplied tropical cycle is {rep}")
        return I.cycle
    raise ValueError(f"unsupported ideal shape {I.variant!r}; supply an explicit tropical cycle instead")


# --------------------------------------------------------------------------
# Class recovery
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PairingVector:
    variety: ToricVariety
    codim: int
    values: dict


@dataclass(frozen=True)
class ClassResult:
    cycle: ToricCycle
    pairing: PairingVector
    solution_space_dim: int


def _require_complete_simplicial(X: ToricVariety):
    if not X.complete:
        raise ValueError("class recovery needs a complete fan")
    if not X.simplicial:
        raise ValueError("class recovery needs a simplicial fan")


def recover_class(X: ToricVariety, source: StructuredIdeal | TropicalCycle, seed: int = 0) -> ClassResult:
    """Solve ``sum_tau c_tau deg(V(tau) . V(sigma)) = deg(Y . V(sigma))`` for all sigma."""
    _require_complete_simplicial(X)
    T = source if isinstance(source, TropicalCycle) else tropicalize(source)
    n, k = X.dim, T.dim
    if T.ambient_dim != n:
        raise ValueError(f"tropical cycle lives in R^{T.ambient_dim}, variety in R^{n}")
    pv = pairing_vector(T, X, seed=seed)
    rows, cols, mat = pairing_matrix(X, k)
    a = [[mat[r][c] for r in range(len(rows))] for c in range(len(cols))]
    b = [pv[sigma] for sigma in cols]
    sol = solve_rational(a, b) if a else []
    if sol is None:
        raise ValueError("pairing system is inconsistent; the tropical input is not a valid cycle")
    nullity = len(rows) - (rank(a) if a else 0)
    terms = {tau: c for tau, c in zip(rows, sol) if c != 0}
    cycle = ToricCycle(X, n - k, terms, check=False)
    return ClassResult(cycle, PairingVector(X, k, pv), nullity)


def class_from_tropical(X: ToricVariety, source: StructuredIdeal | TropicalCycle, seed: int = 0) -> ToricCycle:
    return recover_class(X, source, seed=seed).cycle


# --------------------------------------------------------------------------
# Cox ring input
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CoxPolynomial:
    """Polynomial in the Cox ring: one variable per ray of the fan."""

    variety: ToricVariety
    terms: tuple  # ((coeff, exponents over rays), ...)

    def __post_init__(self):
        nr = len(self.variety.rays)
        clean = []
        for c, e in self.terms:
            e = tuple(int(x) for x in e)
            if len(e) != nr:
                raise ValueError(f"exponent vector {e} does not have {nr} entries")
            if any(x < 0 for x in e):
                raise ValueError("Cox polynomials have nonnegative exponents")
            c = as_fraction(c)
            if c != 0:
                clean.append((c, e))
        object.__setattr__(self, "terms", tuple(clean))


def cox_dehomogenize(g: CoxPolynomial, reference: int = 0) -> LaurentPolynomial:
    """Divide by the ``reference``-th monomial and rewrite in torus characters."""
    X = g.variety
    if not g.terms:
        raise ValueError("zero polynomial")
    _, b = g.terms[reference]
    rays = [list(r) for r in X.rays]
    out: dict = {}
    for c, a in g.terms:
        rhs = [x - y for x, y in zip(a, b)]
        m = solve_rational(rays, rhs) if rays else []
        if m is None or any(x.denominator != 1 for x in m):
            raise ValueError("Cox polynomial is not homogeneous for the class group grading")
        key = tuple(int(x) for x in m)
        out[key] = out.get(key, Fraction(0)) + c
    return LaurentPolynomial(X.dim, out)


def class_from_tropical_cox(X: ToricVariety, g: CoxPolynomial, seed: int = 0, reference: int = 0) -> ToricCycle:
    f = cox_dehomogenize(g, reference)
    return class_from_tropical(X, StructuredIdeal.principal(f), seed=seed)


# --------------------------------------------------------------------------
# Wonderful compactifications
# --------------------------------------------------------------------------

def _bergman_cycle_on(X: ToricVariety) -> TropicalCycle:
    T = TropicalCycle(X.fan, [1] * len(X.fan.maximal_cones), check=False)
    rep = check_balancing(T)
    if not rep.balanced:
        raise ValueError("the variety's fan with unit weights is not balanced; is it a Bergman fan?")
    return T


def _matches_bergman(X: ToricVariety, I: StructuredIdeal) -> bool:
    M = I.matroid()
    target = {frozenset(X.rays[i] for i in c) for c in X.fan.maximal_cones}
    buildings = ["maximal"]
    if M.is_connected_set(M.ground_set):
        buildings.append("minimal")
    for building in buildings:
        B = bergman_fan(M, building=building)
        if {frozenset(r for r in rays) for rays, _ in B.cones()} == target:
            return True
    return False


class _FanCalculus:
    """Divisor products on the cones of one fixed fan, with normals precomputed.

    Cycles are dicts mapping cones (sorted ray-index tuples) to weights.
    ``parents`` gives, for each maximal cone, a cone of ``base`` containing
    it; Courant functions of ``base`` are evaluated through these.
    """

    def __init__(self, fan, base, parents):
        self.fan = fan
        self.base = base
        self.parent: dict = {}
        for c, p in zip(fan.maximal_cones, parents):
            for face in fan.faces_of(c):
                self.parent.setdefault(face, p)
        self.facets: dict = {}
        for d, cones in fan.all_cones().items():
            for c in cones:
                if d == 0:
                    continue
                fs = [f for f in fan.faces_of(c) if len(f) < len(c) and fan.cone_dim(f) == d - 1]
                self.facets[c] = [(f, _normal_vec(fan, f, c)) for f in fs]
        self._courant: dict = {}

    def courant(self, rho: int, cone) -> list:
        key = (rho, self.parent[cone])
        ell = self._courant.get(key)
        if ell is None:
            ell = PLDivisor(self.base, {rho: 1}).linear_on(self.parent[cone])
            self._courant[key] = ell
        return ell

    def divide(self, cycle: dict, functional) -> dict:
        """``phi . cycle`` where ``functional(cone)`` gives phi on that cone."""
        n = self.fan.ambient_dim
        contrib: dict = {}
        for c, w in cycle.items():
            ell = functional(c)
            for f, u in self.facets[c]:
                acc, tot, first = contrib.get(f, (0, [0] * n, ell))
                acc += w * _fdot(ell, u)
                tot = [t + w * x for t, x in zip(tot, u)]
                contrib[f] = (acc, tot, first)
        out = {}
        for f, (acc, tot, first) in contrib.items():
            val = acc - _fdot(first, tot)
            if val != 0:
                out[f] = val
        return out

    def times_ray(self, cycle: dict, rho: int) -> dict:
        return self.divide(cycle, lambda c: self.courant(rho, c))


def _normal_vec(fan, face, cone):
    from .exactlinalg import lattice_normal

    return lattice_normal([fan.rays[i] for i in face], [fan.rays[i] for i in cone])


def _fdot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _flat_of_ray(v: Sequence[int], dehomogenize_index: int = 0) -> frozenset:
    """Recover the flat F from the dehomogenized indicator vector of e_F."""
    coords = list(range(len(v) + 1))
    coords.remove(dehomogenize_index)
    if min(v) < 0:
        return frozenset({dehomogenize_index} | {j for j, x in zip(coords, v) if x == 0})
    return frozenset(j for j, x in zip(coords, v) if x == 1)


def _pmul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _ppow(p, k):
    out = [Fraction(1)]
    for _ in range(k):
        out = _pmul(out, p)
    return out


def _order_along_arc(f: LaurentPolynomial, cols, flat: frozenset, rng) -> Optional[int]:
    """``ord_t f(x(t))`` on the arc ``x(t) = (u0 + t u1) A`` of the linear space.

    ``u0`` is a random vector annihilating the columns indexed by ``flat``,
    so the arc has valuation vector ``e_flat``.  Returns ``None`` if the
    random choice was not generic.
    """
    r = len(cols[0])
    ann = kernel_basis([cols[j] for j in sorted(flat)])
    coeffs = [rng.randint(-10**4, 10**4) for _ in ann]
    u0 = [sum((c * b[i] for c, b in zip(coeffs, ann)), 0) for i in range(r)]
    u1 = [rng.randint(-10**4, 10**4) for _ in range(r)]
    val, unit = [], []
    for j, col in enumerate(cols):
        a0 = sum((Fraction(x) * y for x, y in zip(u0, col)), Fraction(0))
        a1 = sum((Fraction(x) * y for x, y in zip(u1, col)), Fraction(0))
        if j in flat:
            if a0 != 0 or a1 == 0:
                return None
            val.append(1)
            unit.append([a1])
        else:
            if a0 == 0:
                return None
            val.append(0)
            unit.append([a0, a1])
    # homogeneous exponents: coordinate 0 carries minus the total degree
    terms = [([-sum(e)] + list(e), c) for e, c in f.terms.items()]
    shift = [-min(0, min(b[j] for b, _ in terms)) for j in range(len(cols))]
    total: dict = {}
    for b, c in terms:
        poly = [c]
        for j in range(len(cols)):
            if b[j] + shift[j]:
                poly = _pmul(poly, _ppow(unit[j], b[j] + shift[j]))
        lead = sum(x * y for x, y in zip(b, val))
        for i, x in enumerate(poly):
            total[lead + i] = total.get(lead + i, Fraction(0)) + x
    nonzero = [k for k, x in total.items() if x != 0]
    if not nonzero:
        raise ValueError("f vanishes identically on the linear space")
    return min(nonzero)


def boundary_orders(X: ToricVariety, I: StructuredIdeal, f: LaurentPolynomial, seed: int = 0, draws: int = 2) -> list[int]:
    """Order of vanishing of ``f|_Y`` along each boundary divisor ``Y_rho``.

    Evaluated exactly on generic arcs of the linear space whose valuation
    vector is the ray; ``draws`` independent arcs must agree.
    """
    import random

    M = I.matroid()
    cols = [[row[j] for row in M.realization] for j in range(M.ground_size)]
    if f.num_vars != M.ground_size - 1:
        raise ValueError("polynomial and linear space have different numbers of variables")
    rng = random.Random(seed)
    out = []
    for v in X.rays:
        flat = _flat_of_ray(v)
        if M.closure(flat) != flat:
            raise ValueError(f"ray {v} does not come from a flat of the matroid")
        seen = None
        for _ in range(max(1, draws)):
            for _attempt in range(25):
                k = _order_along_arc(f, cols, flat, rng)
                if k is not None:
                    break
            else:
                raise RuntimeError("could not find a generic arc")
            if seen is not None and k != seen:
                raise RuntimeError("boundary order changed between generic arcs")
            seen = k
        out.append(seen)
    return out


def class_wonderful_compactification(
    X: ToricVariety,
    I: StructuredIdeal,
    f: Optional[LaurentPolynomial] = None,
    trop_override: Optional[TropicalCycle] = None,
    method: str = "valuation",
    seed: int = 0,
) -> ToricCycle:
    """Divisor class on ``X`` of the closure of ``V(f) ∩ Y`` in the wonderful compactification.

    ``method="valuation"`` uses ``[closure] = div(f) - sum ord_rho(f) Y_rho``
    with exact boundary orders, valid for every f.  ``method="stable"`` uses
    ``T_f`` = stable intersection of the Bergman cycle with ``trop(f)``,
    which agrees only when f is tropically transverse to Y.  A supplied
    ``trop_override`` (a codimension-one cycle on the Bergman fan) plays the
    role of ``T_f``.

    The coefficients ``c_rho`` are fixed by requiring
    ``deg(x_S . div(phi_c)) = deg(x_S . T_f)`` for every product ``x_S`` of
    Courant functions over a cone ``S`` of dimension ``d - 1``; by Poincare
    duality on the Bergman fan this pins down the class.  Among all
    solutions the one with the trailing free coordinates set to zero is
    returned.
    """
    if I.variant != "linear":
        raise ValueError("wonderful compactifications need a linear ideal")
    if method not in ("valuation", "stable"):
        raise ValueError(f"unknown method {method!r}")
    if not _matches_bergman(X, I):
        raise ValueError("the variety's fan is not the Bergman fan of the ideal's matroid")
    B = _bergman_cycle_on(X)
    d = B.dim
    nr = len(X.rays)
    if trop_override is None and f is None:
        raise ValueError("need a polynomial or an explicit tropical cycle")
    if f is not None and f.num_vars != X.dim:
        raise ValueError("polynomial and fan have different numbers of variables")
    if trop_override is None and method == "stable":
        refined, mins, _ = refine_by_polynomial(B, f)
        calc = _FanCalculus(refined.fan, X.fan, _parent_cones(refined, X.fan))
        top = dict(zip(refined.fan.maximal_cones, refined.weights))
        by_cone = dict(zip(refined.fan.maximal_cones, mins))
        target = calc.divide(top, lambda c: [-Fraction(x) for x in by_cone[c]])
    else:
        calc = _FanCalculus(X.fan, X.fan, list(X.fan.maximal_cones))
        top = dict(zip(X.fan.maximal_cones, B.weights))
        target = None
        if trop_override is not None:
            if trop_override.ambient_dim != X.dim or trop_override.dim != d - 1:
                raise ValueError("override must be a codimension-one cycle on the Bergman fan")
            target = _override_weights(B, trop_override)
    monomials = X.fan.cones_of_dim(d - 1)

    def degrees(cycle: dict) -> list:
        memo = {(): cycle}
        out = []
        for mono in monomials:
            for k in range(1, len(mono) + 1):
                if mono[:k] not in memo:
                    memo[mono[:k]] = calc.times_ray(memo[mono[:k - 1]], mono[k - 1])
            out.append(Fraction(sum(memo[mono].values())))
        return out

    columns = [degrees(calc.times_ray(top, rho)) for rho in range(nr)]
    a = [[columns[j][i] for j in range(nr)] for i in range(len(monomials))]
    if target is not None:
        b = degrees(target)
    else:
        c0 = [-k for k in boundary_orders(X, I, f, seed=seed)]
        b = [sum((row[j] * c0[j] for j in range(nr)), Fraction(0)) for row in a]
    sol = solve_rational(a, b)
    if sol is None:
        raise ValueError("no divisor reproduces T_f; f is not generic for this fan (try an explicit override)")
    return ToricCycle(X, 1, {(i,): c for i, c in enumerate(sol) if c != 0}, check=False)


def _override_weights(B: TropicalCycle, T: TropicalCycle) -> dict:
    index = {r: i for i, r in enumerate(B.fan.rays)}
    out = {}
    for rays, w in T.cones():
        try:
            key = tuple(sorted(index[r] for r in rays))
        except KeyError:
            raise ValueError("override cycle is not supported on cones of the Bergman fan") from None
        out[key] = w
    return out


# --------------------------------------------------------------------------
# Huh-Katz
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HuhKatzReport:
    a: tuple[int, ...]
    class_coefficients: tuple[Fraction, ...]
    match: bool
    log_concave: bool
    cycle: Optional[ToricCycle] = field(default=None, compare=False)

    def __str__(self):
        return (
            f"a = {list(self.a)}\nclass coefficients = {[str(c) for c in self.class_coefficients]}\n"
            f"match: {str(self.match).lower()}\nlog-concave: {str(self.log_concave).lower()}"
        )


def class_coefficients_by_type(Z: ToricCycle, n: int) -> dict[tuple[int, int], Fraction]:
    """Group a cycle on ``P^n x P^n`` by the type ``(a, b)`` of ``[P^a x P^b]``."""
    out: dict[tuple[int, int], Fraction] = {}
    for cone, c in Z.terms.items():
        first = sum(1 for i in cone if i <= n)
        second = len(cone) - first
        key = (n - first, n - second)
        out[key] = out.get(key, Fraction(0)) + c
    return out


def huh_katz_check(edges: Optional[Sequence] = None, matrix: Optional[Sequence] = None, seed: int = 0) -> HuhKatzReport:
    """Compare the class of the Cremona graph with the reduced characteristic polynomial."""
    if (edges is None) == (matrix is None):
        raise ValueError("give exactly one of edges or matrix")
    if edges is not None:
        M = matroid_from_graph(edges)
        realization = graph_realization(edges)
    else:
        M = matroid_from_matrix(matrix)
        realization = [list(r) for r in matrix]
    # a row basis keeps the realization full rank
    rows: list = []
    for r in realization:
        if rank(rows + [r]) > len(rows):
            rows.append(r)
    reduced = reduced_characteristic_polynomial(M)
    d = M.rank - 1
    desc = reduced.descending()
    a = tuple((-1) ** i * desc[i] for i in range(d + 1))
    n = M.ground_size - 1
    if n == 0:
        coeffs = (Fraction(1),)
        cycle = None
    else:
        Mr = matroid_from_matrix(rows)
        T = pushforward(MonomialMap.graph_of_inversion(n), bergman_fan(Mr))
        Pn = projective_space(n)
        X = cartesian_product(Pn, Pn)
        cycle = class_from_tropical(X, T, seed=seed)
        types = class_coefficients_by_type(cycle, n)
        coeffs = tuple(types.get((d - i, i), Fraction(0)) for i in range(d + 1))
    match = tuple(Fraction(x) for x in a) == coeffs and all(
        k[0] + k[1] == d for k in (class_coefficients_by_type(cycle, n) if cycle is not None else {})
    )
    log_concave = all(a[i] ** 2 >= a[i - 1] * a[i + 1] for i in range(1, d))
    return HuhKatzReport(a, coeffs, match, log_concave, cycle)
