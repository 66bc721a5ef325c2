"""Exact integer and rational linear algebra.

Everything here works on Python ints and :class:`fractions.Fraction`; no
floating point is ever involved.  Matrices are plain nested tuples wrapped
in :class:`ExactMatrix`, and most functions also accept nested lists.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Optional, Sequence

__all__ = [
    "ExactMatrix",
    "as_fraction",
    "hermite_normal_form",
    "smith_normal_form",
    "invariant_factors",
    "lattice_index",
    "solve_rational",
    "kernel_basis",
    "primitive_vector",
    "rank",
    "determinant",
    "rref",
    "saturation_basis",
    "lattice_normal",
    "integral_vector",
]


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floating point input is not accepted; use 'p/q' strings")
    return Fraction(x)


class ExactMatrix:
    """Immutable matrix of Fractions.

    Entries are stored reduced (Fraction does that for us).  ``rows`` and
    ``cols`` are fixed at construction, which also covers empty matrices
    such as 0 x 3.
    """

    __slots__ = ("_entries", "rows", "cols")

    def __init__(self, entries: Iterable[Iterable], cols: Optional[int] = None):
        data = tuple(tuple(as_fraction(x) for x in row) for row in entries)
        if data:
            width = len(data[0])
            if any(len(r) != width for r in data):
                raise ValueError("ragged matrix")
            if cols is not None and cols != width:
                raise ValueError("column count does not match entries")
        else:
            width = cols or 0
        object.__setattr__(self, "_entries", data)
        object.__setattr__(self, "rows", len(data))
        object.__setattr__(self, "cols", width)

    def __setattr__(self, name, value):
        raise AttributeError("ExactMatrix is immutable")

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, idx):
        if isinstance(idx, tuple):
            i, j = idx
            return self._entries[i][j]
        return self._entries[idx]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return self.rows

    def __eq__(self, other):
        if isinstance(other, ExactMatrix):
            return self.shape == other.shape and self._entries == other._entries
        try:
            return self == ExactMatrix(other, cols=self.cols)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.shape, self._entries))

    def __repr__(self):
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._entries)
        return f"ExactMatrix([{body}])"

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._entries]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(
            [[self._entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
            cols=self.rows,
        )

    T = property(transpose)

    def __matmul__(self, other):
        if not isinstance(other, ExactMatrix):
            other = ExactMatrix(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other._entries)) if other.rows else [()] * other.cols
        return ExactMatrix(
            [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self._entries],
            cols=other.cols,
        )

    def apply(self, vec: Sequence) -> tuple[Fraction, ...]:
        """Matrix-vector product."""
        if len(vec) != self.cols:
            raise ValueError("dimension mismatch")
        v = [as_fraction(x) for x in vec]
        return tuple(sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in self._entries)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self._entries for x in r)

    def int_rows(self) -> list[list[int]]:
        if not self.is_integral():
            raise ValueError("matrix has non-integer entries")
        return [[int(x) for x in r] for r in self._entries]


def _as_matrix(m) -> ExactMatrix:
    return m if isinstance(m, ExactMatrix) else ExactMatrix(m)


def _int_matrix(m) -> list[list[int]]:
    mat = _as_matrix(m)
    if not mat.is_integral():
        raise ValueError("integer matrix required")
    return mat.int_rows()


def _identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


# --------------------------------------------------------------------------
# Hermite and Smith normal forms
# --------------------------------------------------------------------------

def _pick_min(candidates):
    # smallest absolute value, ties broken by lowest index
    return min(candidates, key=lambda t: (abs(t[1]), t[0]))[0]


def hermite_normal_form(m) -> tuple[ExactMatrix, ExactMatrix]:
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``H = U @ m``, ``U`` unimodular, pivots positive
    and entries above each pivot reduced into ``[0, pivot)``.
    """
    a = _int_matrix(m)
    nrows = len(a)
    ncols = _as_matrix(m).cols
    u = _identity(nrows)
    r = 0
    for j in range(ncols):
        if r >= nrows:
            break
        while True:
            nz = [(i, a[i][j]) for i in range(r, nrows) if a[i][j] != 0]
            if not nz:
                break
            p = _pick_min(nz)
            if p != r:
                a[r], a[p] = a[p], a[r]
                u[r], u[p] = u[p], u[r]
            done = True
            for i in range(r + 1, nrows):
                if a[i][j]:
                    q = a[i][j] // a[r][j]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                    if a[i][j]:
                        done = False
            if done:
                break
        if r < nrows and a[r][j] != 0:
            if a[r][j] < 0:
                a[r] = [-x for x in a[r]]
                u[r] = [-x for x in u[r]]
            piv = a[r][j]
            for i in range(r):
                q = a[i][j] // piv
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
            r += 1
    return ExactMatrix(a, cols=ncols), ExactMatrix(u, cols=nrows)


def smith_normal_form(m) -> tuple[ExactMatrix, ExactMatrix, ExactMatrix]:
    """Smith normal form ``D = U @ m @ V`` with ``d1 | d2 | ...``.

    Pivots are chosen as the entry of smallest absolute value in the
    remaining block, ties broken by lowest (row, column) index.
    """
    a = _int_matrix(m)
    nrows = len(a)
    ncols = _as_matrix(m).cols
    u = _identity(nrows)
    v = _identity(ncols)

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        u[i], u[k] = u[k], u[i]

    def swap_cols(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        for row in v:
            row[j], row[k] = row[k], row[j]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in a:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    for t in range(min(nrows, ncols)):
        while True:
            cands = [((i, j), a[i][j]) for i in range(t, nrows) for j in range(t, ncols) if a[i][j]]
            if not cands:
                break
            pi, pj = _pick_min(cands)
            if pi != t:
                swap_rows(t, pi)
            if pj != t:
                swap_cols(t, pj)
            piv = a[t][t]
            clean = True
            for i in range(t + 1, nrows):
                if a[i][t]:
                    add_row(i, t, a[i][t] // piv)
                    clean = clean and a[i][t] == 0
            for j in range(t + 1, ncols):
                if a[t][j]:
                    add_col(j, t, a[t][j] // piv)
                    clean = clean and a[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, nrows) for j in range(t + 1, ncols) if a[i][j] % piv),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, -1)
        if t < nrows and t < ncols and a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return ExactMatrix(a, cols=ncols), ExactMatrix(u, cols=nrows), ExactMatrix(v, cols=ncols)


def invariant_factors(m) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form."""
    d, _, _ = smith_normal_form(m)
    return [int(d[i, i]) for i in range(min(d.rows, d.cols)) if d[i, i] != 0]


def _index_of_generated(vectors: Sequence[Sequence[int]]) -> int:
    """Index of the lattice spanned by ``vectors`` in its saturation.

    Dependent families are fine here; this is the product of the nonzero
    invariant factors.
    """
    if not vectors:
        return 1
    return reduce(lambda x, y: x * y, invariant_factors([list(v) for v in vectors]), 1)


def lattice_index(vectors: Sequence[Sequence[int]], k: Optional[int] = None) -> int:
    """Index of the sublattice generated by ``vectors`` in its saturation.

    For a square full-rank integer matrix this is ``|det|``.
    """
    vecs = [list(v) for v in vectors]
    if k is not None and k != len(vecs):
        raise ValueError(f"expected {k} vectors, got {len(vecs)}")
    if not vecs:
        return 1
    for v in vecs:
        if any(as_fraction(x).denominator != 1 for x in v):
            raise ValueError("lattice vectors must be integral")
    if rank(vecs) != len(vecs):
        raise ValueError("vectors are linearly dependent")
    return _index_of_generated(vecs)


# --------------------------------------------------------------------------
# Gaussian elimination over Q
# --------------------------------------------------------------------------

def rref(m) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot column list.

    Columns are scanned left to right; the pivot row is the first remaining
    row with a nonzero entry in that column.
    """
    mat = _as_matrix(m)
    a = [list(r) for r in mat]
    nrows, ncols = mat.rows, mat.cols
    pivots = []
    r = 0
    for j in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][j] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][j]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][j] != 0:
                f = a[i][j]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(j)
        r += 1
    return a, pivots


def _rank_int(rows: list[list[int]]) -> int:
    # fraction-free elimination, integer entries only
    a = [r[:] for r in rows if any(r)]
    if not a:
        return 0
    ncols = len(a[0])
    rk = 0
    for j in range(ncols):
        p = next((i for i in range(rk, len(a)) if a[i][j]), None)
        if p is None:
            continue
        a[rk], a[p] = a[p], a[rk]
        pr = a[rk]
        pv = pr[j]
        for i in range(rk + 1, len(a)):
            f = a[i][j]
            if f:
                row = [pv * x - f * y for x, y in zip(a[i], pr)]
                g = reduce(gcd, row, 0)
                a[i] = [x // g for x in row] if g > 1 else row
        rk += 1
        if rk == len(a):
            break
    return rk


def rank(m) -> int:
    if isinstance(m, ExactMatrix):
        if m.is_integral():
            return _rank_int(m.int_rows())
        return len(rref(m)[1])
    rows = [list(r) for r in m]
    if not rows:
        return 0
    if all(isinstance(x, int) for r in rows for x in r):
        return _rank_int(rows)
    return len(rref(rows)[1])


def determinant(m) -> Fraction:
    mat = _as_matrix(m)
    if mat.rows != mat.cols:
        raise ValueError("determinant of a non-square matrix")
    a = [list(r) for r in mat]
    n = mat.rows
    det = Fraction(1)
    for j in range(n):
        p = next((i for i in range(j, n) if a[i][j] != 0), None)
        if p is None:
            return Fraction(0)
        if p != j:
            a[j], a[p] = a[p], a[j]
            det = -det
        det *= a[j][j]
        for i in range(j + 1, n):
            if a[i][j] != 0:
                f = a[i][j] / a[j][j]
                a[i] = [x - f * y for x, y in zip(a[i], a[j])]
    return det


def solve_rational(a, b: Sequence) -> Optional[list[Fraction]]:
    """One exact solution of ``a @ x = b``, or ``None`` if inconsistent.

    The solution returned is the basic one: every non-pivot (free) column of
    the reduced row echelon form gets the value zero.  This makes the output
    canonical for a given column order.
    """
    mat = _as_matrix(a)
    if len(b) != mat.rows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {mat.rows}")
    aug = ExactMatrix([list(r) + [as_fraction(y)] for r, y in zip(mat, b)], cols=mat.cols + 1)
    red, pivots = rref(aug)
    if pivots and pivots[-1] == mat.cols:
        return None
    x = [Fraction(0)] * mat.cols
    for row, j in zip(red, pivots):
        x[j] = row[-1]
    return x


def integral_vector(v: Sequence) -> list[int]:
    """Scale a rational vector to a primitive integer vector (same direction)."""
    fr = [as_fraction(x) for x in v]
    den = reduce(lambda x, y: x * y // gcd(x, y), (x.denominator for x in fr), 1)
    ints = [int(x * den) for x in fr]
    g = reduce(gcd, ints, 0)
    if g == 0:
        return ints
    return [x // g for x in ints]


def kernel_basis(a) -> list[list[int]]:
    """Basis of the right kernel, each vector scaled to primitive integers."""
    mat = _as_matrix(a)
    red, pivots = rref(mat)
    free = [j for j in range(mat.cols) if j not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * mat.cols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(integral_vector(v))
    return basis


def primitive_vector(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its coordinates."""
    ints = [as_fraction(x) for x in v]
    if any(x.denominator != 1 for x in ints):
        raise ValueError("lattice vector must be integral")
    ints = [int(x) for x in ints]
    g = reduce(gcd, ints, 0)
    if g == 0:
        raise ValueError("zero vector has no primitive generator")
    return tuple(x // g for x in ints)


# --------------------------------------------------------------------------
# Saturated lattices
# --------------------------------------------------------------------------

def _inverse_unimodular(v: ExactMatrix) -> list[list[int]]:
    n = v.rows
    aug = [list(v[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    red, pivots = rref(aug)
    if len(pivots) != n or pivots[-1] >= n:
        raise ValueError("matrix is singular")
    inv = [row[n:] for row in red]
    return [[int(x) for x in row] for row in inv]


def saturation_basis(vectors: Sequence[Sequence[int]], ambient_dim: Optional[int] = None) -> list[list[int]]:
    """Z-basis of ``span(vectors) ∩ Z^n``."""
    rows = [[int(as_fraction(x)) for x in v] for v in vectors]
    if not rows or not any(any(r) for r in rows):
        return []
    d, _, vmat = smith_normal_form(rows)
    r = sum(1 for i in range(min(d.rows, d.cols)) if d[i, i] != 0)
    vinv = _inverse_unimodular(vmat)
    return [vinv[i] for i in range(r)]


def _ext_gcd_coeffs(ell: Sequence[int]) -> list[int]:
    """Integers x with sum(x_i * ell_i) == gcd(ell)."""
    coeffs = [0] * len(ell)
    g = 0
    for i, a in enumerate(ell):
        if a == 0:
            continue
        if g == 0:
            g = abs(a)
            coeffs = [0] * len(ell)
            coeffs[i] = 1 if a > 0 else -1
            continue
        # extended Euclid on (g, a)
        old_r, r = g, a
        old_s, s = 1, 0
        old_t, t = 0, 1
        while r:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_s, s = s, old_s - q * s
            old_t, t = t, old_t - q * t
        if old_r < 0:
            old_r, old_s, old_t = -old_r, -old_s, -old_t
        coeffs = [c * old_s for c in coeffs]
        coeffs[i] += old_t
        g = old_r
    return coeffs


def lattice_normal(face_rays: Sequence[Sequence[int]], cone_rays: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Lattice point generating ``N_cone / N_face`` and pointing into the cone.

    ``face_rays`` must span a codimension-one subspace of ``span(cone_rays)``.
    The lift is deterministic: the coordinates come from the extended gcd
    of the primitive functional cutting out the face inside the cone lattice.
    """
    basis = saturation_basis(cone_rays)
    s = len(basis)
    if s == 0:
        raise ValueError("cone spans no lattice")
    bt = [[Fraction(basis[i][j]) for i in range(s)] for j in range(len(basis[0]))]

    def coords(vec):
        x = solve_rational(bt, list(vec))
        if x is None:
            raise ValueError("vector outside the cone's span")
        return x

    face = [coords(r) for r in face_rays]
    if face and rank(face) != s - 1:
        raise ValueError("face does not have codimension one in the cone")
    if face:
        ker = kernel_basis(face)
    else:
        ker = kernel_basis(ExactMatrix.zeros(0, s))
    if len(ker) != 1:
        raise ValueError("face does not have codimension one in the cone")
    ell = ker[0]
    outward = next(
        (sum(a * b for a, b in zip(ell, coords(r))) for r in cone_rays
         if sum(a * b for a, b in zip(ell, coords(r))) != 0),
        None,
    )
    if outward is None:
        raise ValueError("cone has no ray off the face")
    if outward < 0:
        ell = [-x for x in ell]
    x = _ext_gcd_coeffs(ell)
    return tuple(sum(x[i] * basis[i][j] for i in range(s)) for j in range(len(basis[0])))
