"""Exact integer-lattice engine over the rational realification of C^n.

Every lattice computation happens in Q^(n*phi(N)): a complex vector with
cyclotomic coordinates is flattened to the rational coefficient vector of its
coordinates on the power basis of Q(zeta_N).  Scalars and matrices act as
explicit rational matrices on this space, so all of the lattice theory reduces
to integer linear algebra (HNF / SNF) with a common denominator per lattice.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, inf
from typing import Callable, Iterable, Optional, Sequence

import mpmath

from .cyclo import CycloField, CycloNum
from .errors import (
    CrysrefError,
    DegenerateLattice,
    EmptyConstraintSet,
    NotASublattice,
    QuotientTooLarge,
    StructureMismatch,
)
from .linalg import CMat, CVec

QUOTIENT_BOUND = 10**4

IntMatrix = list[list[int]]
RatMatrix = list[list[Fraction]]


# ---------------------------------------------------------------------------
# integer matrix normal forms
# ---------------------------------------------------------------------------


def _identity(n: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def hnf(m: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix]:
    """Column-style Hermite normal form.

    Returns (H, U) with H = M @ U, U unimodular.  Zero columns of H are
    dropped to the right; each pivot is positive, entries to the left of a
    pivot in its row are reduced into [0, pivot).
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    h = [list(r) for r in m]
    u = _identity(cols)

    def col_op(j, k, a, b, c, d):
        # (col_j, col_k) <- (a*col_j + b*col_k, c*col_j + d*col_k)
        for mat in (h, u):
            for r in mat:
                x, y = r[j], r[k]
                r[j] = a * x + b * y
                r[k] = c * x + d * y

    piv = 0
    for row in range(rows):
        found = next((k for k in range(piv, cols) if h[row][k]), None)
        if found is None:
            continue
        if found != piv:
            col_op(piv, found, 0, 1, 1, 0)
        for k in range(piv + 1, cols):
            if h[row][k]:
                a, b = h[row][piv], h[row][k]
                g, x, y = _xgcd(a, b)
                col_op(piv, k, x, y, -(b // g), a // g)
        if h[row][piv] < 0:
            for mat in (h, u):
                for r in mat:
                    r[piv] = -r[piv]
        # reduce earlier columns against this pivot
        p = h[row][piv]
        for k in range(piv):
            q = h[row][k] // p
            if q:
                for mat in (h, u):
                    for r in mat:
                        r[k] -= q * r[piv]
        piv += 1
        if piv == cols:
            break
    # drop zero columns (they are the trailing ones after echelonization)
    keep = [j for j in range(cols) if any(h[r][j] for r in range(rows))]
    drop = [j for j in range(cols) if j not in keep]
    order = keep + drop
    h = [[r[j] for j in order] for r in h]
    u = [[r[j] for j in order] for r in u]
    h = [r[: len(keep)] for r in h]
    return h, u


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def snf(m: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form: returns (D, U, V) with D = U @ M @ V diagonal,
    d_i | d_{i+1}, d_i >= 0, and U, V unimodular."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    d = [list(r) for r in m]
    u = _identity(rows)
    v = _identity(cols)

    def row_op(i, k, a, b, c, e):
        for mat in (d, u):
            ri, rk = mat[i], mat[k]
            mat[i] = [a * x + b * y for x, y in zip(ri, rk)]
            mat[k] = [c * x + e * y for x, y in zip(ri, rk)]

    def col_op(j, k, a, b, c, e):
        for mat in (d, v):
            for r in mat:
                x, y = r[j], r[k]
                r[j] = a * x + b * y
                r[k] = c * x + e * y

    def negate_row(i):
        for mat in (d, u):
            mat[i] = [-x for x in mat[i]]

    t = 0
    while t < min(rows, cols):
        # find a nonzero pivot
        piv = None
        for i in range(t, rows):
            for j in range(t, cols):
                if d[i][j]:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        i, j = piv
        if i != t:
            row_op(t, i, 0, 1, 1, 0)
        if j != t:
            col_op(t, j, 0, 1, 1, 0)
        while True:
            # clear column and row t; plain subtraction when the pivot divides
            # (a full gcd rotation there would swap the pivot row and loop)
            for i in range(t + 1, rows):
                if d[i][t]:
                    a, b = d[t][t], d[i][t]
                    if b % a == 0:
                        row_op(t, i, 1, 0, -(b // a), 1)
                    else:
                        g, x, y = _xgcd(a, b)
                        row_op(t, i, x, y, -(b // g), a // g)
            for j in range(t + 1, cols):
                if d[t][j]:
                    a, b = d[t][t], d[t][j]
                    if b % a == 0:
                        col_op(t, j, 1, 0, -(b // a), 1)
                    else:
                        g, x, y = _xgcd(a, b)
                        col_op(t, j, x, y, -(b // g), a // g)
            if any(d[i][t] for i in range(t + 1, rows)) or any(
                d[t][j] for j in range(t + 1, cols)
            ):
                continue
            # divisibility: the pivot must divide every remaining entry;
            # folding an offending row into row t strictly shrinks the pivot
            offender = None
            p = d[t][t]
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if d[i][j] % p:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_op(t, offender, 1, 1, 0, 1)  # row_t += row_offender
        if d[t][t] < 0:
            negate_row(t)
        t += 1
    return d, u, v


def mat_mul_int(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> IntMatrix:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def int_kernel(m: Sequence[Sequence[int]]) -> IntMatrix:
    """Saturated basis (as columns) of {x in Z^k : M x = 0}."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if cols == 0:
        return []
    d, _u, v = snf(m)
    r = 0
    for t in range(min(rows, cols)):
        if d[t][t]:
            r += 1
    # kernel = V * (axes r..cols)
    return [[v[i][j] for j in range(r, cols)] for i in range(cols)]


def int_det_abs(m: Sequence[Sequence[int]]) -> int:
    d, _, _ = snf(m)
    out = 1
    for t in range(len(d)):
        out *= d[t][t]
    return abs(out)


# ---------------------------------------------------------------------------
# rational matrix helpers
# ---------------------------------------------------------------------------


def rat_mat_mul(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def rat_mat_vec(a: RatMatrix, v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def rat_kernel(m: RatMatrix) -> list[list[Fraction]]:
    """Basis (as columns) of the rational kernel."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    a = [list(r) for r in m]
    pivots = []
    rank = 0
    for col in range(cols):
        piv = next((r for r in range(rank, rows) if a[r][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        f = a[rank][col]
        a[rank] = [x / f for x in a[rank]]
        for r in range(rows):
            if r != rank and a[r][col]:
                g = a[r][col]
                a[r] = [x - g * y for x, y in zip(a[r], a[rank])]
        pivots.append(col)
        rank += 1
    basis = []
    for fc in (c for c in range(cols) if c not in pivots):
        vec = [Fraction(0)] * cols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -a[r][fc]
        basis.append(vec)
    return [[basis[j][i] for j in range(len(basis))] for i in range(cols)]


# ---------------------------------------------------------------------------
# real structure: C^n with Q(zeta_N)-coordinates flattened over Q
# ---------------------------------------------------------------------------


class RealStructure:
    """Identification of Q(zeta_N)^n with Q^(n*phi(N))."""

    _instances: dict[tuple[int, int], "RealStructure"] = {}

    def __new__(cls, n: int, order: int):
        key = (n, order)
        inst = cls._instances.get(key)
        if inst is None:
            inst = super().__new__(cls)
            inst._init(n, order)
            cls._instances[key] = inst
        return inst

    def _init(self, n: int, order: int) -> None:
        self.n = n
        self.field = CycloField(order)
        self.phi = self.field.degree
        self.dim = n * self.phi
        self._realify_cache: dict = {}

    def vec_to_rational(self, v: CVec) -> list[Fraction]:
        assert v.dim == self.n
        out: list[Fraction] = []
        for c in v.coords:
            out.extend(c.coeffs if c.field is self.field else c.embed(self.field.order).coeffs)
        return out

    def rational_to_vec(self, xs: Sequence[Fraction]) -> CVec:
        assert len(xs) == self.dim
        coords = []
        for k in range(self.n):
            chunk = tuple(Fraction(x) for x in xs[k * self.phi : (k + 1) * self.phi])
            coords.append(CycloNum(self.field, chunk))
        return CVec(self.field, coords)

    def scalar_block(self, c: CycloNum) -> RatMatrix:
        """phi x phi rational matrix of multiplication by c on the power basis."""
        c = c if c.field is self.field else c.embed(self.field.order)
        cols = [(c * self.field.zeta(k)).coeffs for k in range(self.phi)]
        return [[cols[j][i] for j in range(self.phi)] for i in range(self.phi)]

    def scalar_matrix(self, c: CycloNum) -> RatMatrix:
        blk = self.scalar_block(c)
        d = self.dim
        out = [[Fraction(0)] * d for _ in range(d)]
        for k in range(self.n):
            off = k * self.phi
            for i in range(self.phi):
                for j in range(self.phi):
                    out[off + i][off + j] = blk[i][j]
        return out

    def realify(self, m: CMat) -> RatMatrix:
        """d x d rational matrix of the Q(zeta)-linear map given by m."""
        key = m
        hit = self._realify_cache.get(key)
        if hit is not None:
            return hit
        assert m.rows == m.cols == self.n
        d = self.dim
        out = [[Fraction(0)] * d for _ in range(d)]
        for bi in range(self.n):
            for bj in range(self.n):
                entry = m.entries[bi][bj]
                if entry.is_zero():
                    continue
                blk = self.scalar_block(entry)
                for i in range(self.phi):
                    for j in range(self.phi):
                        if blk[i][j]:
                            out[bi * self.phi + i][bj * self.phi + j] = blk[i][j]
        if len(self._realify_cache) < 4096:
            self._realify_cache[key] = out
        return out

    def line_columns(self, e: CVec) -> list[list[Fraction]]:
        """Columns spanning the realified complex line Q(zeta)*e."""
        cols = []
        for k in range(self.phi):
            cols.append(self.vec_to_rational(e.scale(self.field.zeta(k))))
        return cols

    def __repr__(self) -> str:
        return f"RealStructure(n={self.n}, N={self.field.order})"


# ---------------------------------------------------------------------------
# lattices
# ---------------------------------------------------------------------------


class ZLattice:
    """A finitely generated Z-submodule of Q^d, held in canonical HNF form.

    The lattice is (1/denominator) * (integer column span of basis).
    Equality of lattices is equality of canonical forms.
    """

    __slots__ = ("structure", "denominator", "basis")

    def __init__(self, structure: RealStructure, denominator: int, basis: tuple):
        self.structure = structure
        self.denominator = denominator
        self.basis = basis  # tuple of row-tuples, d x r, already HNF-canonical

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_rational_columns(
        cls, structure: RealStructure, cols: Iterable[Sequence[Fraction]]
    ) -> "ZLattice":
        cols = [list(map(Fraction, c)) for c in cols]
        cols = [c for c in cols if any(c)]
        if not cols:
            return cls(structure, 1, tuple(tuple() for _ in range(structure.dim)))
        den = 1
        for col in cols:
            for x in col:
                den = den * x.denominator // gcd(den, x.denominator)
        mat = [[int(cols[j][i] * den) for j in range(len(cols))] for i in range(structure.dim)]
        return cls._canonical(structure, den, mat)

    @classmethod
    def from_vectors(cls, structure: RealStructure, vecs: Iterable[CVec]) -> "ZLattice":
        return cls.from_rational_columns(
            structure, [structure.vec_to_rational(v) for v in vecs]
        )

    @classmethod
    def zero(cls, structure: RealStructure) -> "ZLattice":
        return cls(structure, 1, tuple(tuple() for _ in range(structure.dim)))

    @classmethod
    def _canonical(cls, structure: RealStructure, den: int, mat: IntMatrix) -> "ZLattice":
        h, _ = hnf(mat)
        if not h or not h[0]:
            return cls.zero(structure)
        g = den
        for row in h:
            for x in row:
                if x:
                    g = gcd(g, abs(x))
        if g > 1:
            den //= g
            h = [[x // g for x in row] for row in h]
        return cls(structure, den, tuple(tuple(row) for row in h))

    # -- basic queries -------------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.basis[0]) if self.basis and self.basis[0] is not None else 0

    def is_zero(self) -> bool:
        return self.rank == 0

    def basis_columns_rational(self) -> list[list[Fraction]]:
        r = self.rank
        return [
            [Fraction(self.basis[i][j], self.denominator) for i in range(self.structure.dim)]
            for j in range(r)
        ]

    def basis_vectors(self) -> list[CVec]:
        return [self.structure.rational_to_vec(c) for c in self.basis_columns_rational()]

    def _pivots(self) -> list[int]:
        piv = []
        for j in range(self.rank):
            for i in range(self.structure.dim):
                if self.basis[i][j]:
                    piv.append(i)
                    break
        return piv

    def member_rational(self, xs: Sequence[Fraction]) -> bool:
        return self._solve_int(xs) is not None

    def _solve_int(self, xs: Sequence[Fraction]) -> Optional[list[int]]:
        """Integer coordinates of xs on the basis, or None."""
        target = [Fraction(x) * self.denominator for x in xs]
        if any(t.denominator != 1 for t in target):
            return None
        target = [int(t) for t in target]
        r = self.rank
        if r == 0:
            return [] if not any(target) else None
        piv = self._pivots()
        coeff = [0] * r
        residue = list(target)
        for j in range(r):
            p = piv[j]
            num = residue[p]
            den = self.basis[p][j]
            if num % den != 0:
                return None
            c = num // den
            coeff[j] = c
            if c:
                for i in range(self.structure.dim):
                    residue[i] -= c * self.basis[i][j]
        if any(residue):
            return None
        return coeff

    def member(self, v: CVec) -> bool:
        return self.member_rational(self.structure.vec_to_rational(v))

    def coordinates_of(self, v: CVec) -> Optional[list[int]]:
        return self._solve_int(self.structure.vec_to_rational(v))

    def reduce_mod(self, xs: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Canonical representative of xs modulo this lattice (pivot reduction)."""
        target = [Fraction(x) for x in xs]
        piv = self._pivots()
        for j in range(self.rank):
            p = piv[j]
            den = Fraction(self.basis[p][j], self.denominator)
            q = (target[p] / den).__floor__()
            if q:
                for i in range(self.structure.dim):
                    target[i] -= q * Fraction(self.basis[i][j], self.denominator)
        return tuple(target)

    # -- algebra -------------------------------------------------------------

    def _check_structure(self, other: "ZLattice") -> None:
        if self.structure is not other.structure:
            raise StructureMismatch(f"{self.structure} vs {other.structure}")

    def sum(self, other: "ZLattice") -> "ZLattice":
        self._check_structure(other)
        cols = self.basis_columns_rational() + other.basis_columns_rational()
        return ZLattice.from_rational_columns(self.structure, cols)

    def __add__(self, other: "ZLattice") -> "ZLattice":
        return self.sum(other)

    def equal(self, other: "ZLattice") -> bool:
        self._check_structure(other)
        return self.denominator == other.denominator and self.basis == other.basis

    def __eq__(self, other) -> bool:
        return isinstance(other, ZLattice) and self.structure is other.structure and self.equal(other)

    def __hash__(self) -> int:
        return hash((id(self.structure), self.denominator, self.basis))

    def key(self) -> tuple:
        """Deterministic sort key."""
        return (self.rank, self.denominator, self.basis)

    def contains_lattice(self, other: "ZLattice") -> bool:
        self._check_structure(other)
        return all(self.member_rational(c) for c in other.basis_columns_rational())

    def index_in(self, big: "ZLattice") -> int | float:
        """[big : self]; inf when ranks differ."""
        big._check_structure(self)
        if not big.contains_lattice(self):
            raise NotASublattice("index_in: not a sublattice")
        if self.rank != big.rank:
            return inf
        coords = [big._solve_int_scaled(c) for c in self.basis_columns_rational()]
        m = [[coords[j][i] for j in range(len(coords))] for i in range(big.rank)]
        return int_det_abs(m)

    def _solve_int_scaled(self, xs: Sequence[Fraction]) -> list[int]:
        out = self._solve_int(xs)
        if out is None:
            raise NotASublattice("vector outside lattice")
        return out

    def apply_rational(self, m: RatMatrix) -> "ZLattice":
        """Image lattice under a rational linear map."""
        cols = [rat_mat_vec(m, c) for c in self.basis_columns_rational()]
        return ZLattice.from_rational_columns(self.structure, cols)

    def apply_matrix(self, p: CMat) -> "ZLattice":
        return self.apply_rational(self.structure.realify(p))

    def scale_scalar(self, c: CycloNum) -> "ZLattice":
        return self.apply_rational(self.structure.scalar_matrix(c))

    def intersect(self, other: "ZLattice") -> "ZLattice":
        self._check_structure(other)
        if self.is_zero() or other.is_zero():
            return ZLattice.zero(self.structure)
        den = self.denominator * other.denominator // gcd(self.denominator, other.denominator)
        f1 = den // self.denominator
        f2 = den // other.denominator
        b1 = [[x * f1 for x in row] for row in self.basis]
        b2 = [[x * f2 for x in row] for row in other.basis]
        r1 = len(b1[0])
        stacked = [row1 + [-x for x in row2] for row1, row2 in zip(b1, b2)]
        ker = int_kernel(stacked)
        if not ker or not ker[0]:
            return ZLattice.zero(self.structure)
        kcols = len(ker[0])
        cols = []
        for j in range(kcols):
            col = [
                Fraction(
                    sum(b1[i][t] * ker[t][j] for t in range(r1)), den
                )
                for i in range(self.structure.dim)
            ]
            cols.append(col)
        return ZLattice.from_rational_columns(self.structure, cols)

    def saturation_in_line(self, cols: list[list[Fraction]]) -> "ZLattice":
        """Intersection of this lattice with the rational span of given columns."""
        if self.is_zero() or not cols:
            return ZLattice.zero(self.structure)
        d = self.structure.dim
        span = [[cols[j][i] for j in range(len(cols))] for i in range(d)]
        # rows annihilating the span: kernel of span^T gives the linear forms
        # whose common zero set is exactly the span
        spanT = [list(r) for r in zip(*span)]
        ann_cols = rat_kernel(spanT)
        if not ann_cols or not ann_cols[0]:
            return ZLattice(self.structure, self.denominator, self.basis)
        ann_rows = [
            [ann_cols[i][j] for i in range(d)] for j in range(len(ann_cols[0]))
        ]
        bcols = self.basis_columns_rational()
        m = [[sum((r[i] * c[i] for i in range(d)), Fraction(0)) for c in bcols] for r in ann_rows]
        den = 1
        for row in m:
            for x in row:
                den = den * x.denominator // gcd(den, x.denominator)
        mint = [[int(x * den) for x in row] for row in m]
        ker = int_kernel(mint)
        if not ker or not ker[0]:
            return ZLattice.zero(self.structure)
        out_cols = []
        for j in range(len(ker[0])):
            col = [
                sum((bcols[t][i] * ker[t][j] for t in range(len(bcols))), Fraction(0))
                for i in range(d)
            ]
            out_cols.append(col)
        return ZLattice.from_rational_columns(self.structure, out_cols)

    def __repr__(self) -> str:
        return f"ZLattice(rank={self.rank}, den={self.denominator})"


def intersect_with_complex_line(lat: ZLattice, e: CVec) -> ZLattice:
    """The sublattice of lat lying on the complex line C*e."""
    if e.is_zero():
        raise ValueError("zero line vector")
    return lat.saturation_in_line(lat.structure.line_columns(e))


def preimage(
    constraints: Sequence[tuple[RatMatrix, ZLattice]], structure: RealStructure
) -> ZLattice:
    """The lattice {v in Q^d : A_j v in T_j for all j}.

    Raises EmptyConstraintSet on an empty constraint list and a CrysrefError
    if the preimage is not discrete (the stacked maps have a common kernel
    meeting a translate of the solution set).
    """
    if not constraints:
        raise EmptyConstraintSet("preimage needs at least one constraint")
    d = structure.dim
    a_rows: list[list[Fraction]] = []
    b_blocks: list[tuple[int, ZLattice]] = []
    total_t = 0
    for a, t in constraints:
        if len(a[0]) != d:
            raise StructureMismatch("constraint matrix domain mismatch")
        a_rows.extend([list(map(Fraction, row)) for row in a])
        b_blocks.append((len(a), t))
        total_t += t.rank
    m = len(a_rows)
    # assemble [A | -B] with B block diagonal of the target bases
    big: list[list[Fraction]] = [row + [Fraction(0)] * total_t for row in a_rows]
    row_off = 0
    col_off = d
    for rows_a, t in b_blocks:
        bcols = t.basis_columns_rational()
        for j, col in enumerate(bcols):
            for i, x in enumerate(col):
                big[row_off + i][col_off + j] = -x
        row_off += rows_a
        col_off += t.rank
    ker = rat_kernel(big)  # columns spanning {(v, y) : A v = B y}
    if not ker or not ker[0]:
        return ZLattice.zero(structure)
    k = len(ker[0])
    w_top = [[ker[i][j] for j in range(k)] for i in range(d)]
    w_bot = [[ker[i][j] for j in range(k)] for i in range(d, d + total_t)]
    # sanity: directions with W_bot x = 0 must satisfy W_top x = 0
    bot_ker = rat_kernel(w_bot) if total_t else [[Fraction(1) if i == j else Fraction(0) for j in range(k)] for i in range(k)]
    if bot_ker and bot_ker[0]:
        for j in range(len(bot_ker[0])):
            x = [bot_ker[i][j] for i in range(k)]
            img = rat_mat_vec(w_top, x)
            if any(img):
                raise CrysrefError("preimage is not discrete (constraints have a common kernel)")
    # {x : W_bot x in Z^total_t}
    den = 1
    for row in w_bot:
        for v in row:
            den = den * v.denominator // gcd(den, v.denominator)
    p = [[int(v * den) for v in row] for row in w_bot]
    dmat, _u, vmat = snf(p)
    r = 0
    for t in range(min(len(p), k)):
        if dmat[t][t]:
            r += 1
    x_cols: list[list[Fraction]] = []
    for j in range(r):
        factor = Fraction(den, dmat[j][j])
        x_cols.append([vmat[i][j] * factor for i in range(k)])
    # zero-diagonal directions were checked to be irrelevant; drop them
    out_cols = [rat_mat_vec(w_top, x) for x in x_cols]
    return ZLattice.from_rational_columns(structure, out_cols)


@dataclass
class AbelianQuotient:
    invariant_factors: list[int]
    coset_reps: list[CVec]
    generators: list[CVec]

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out


def quotient(big: ZLattice, small: ZLattice, bound: int = QUOTIENT_BOUND) -> AbelianQuotient:
    """big/small as an abelian group, with coset representatives."""
    big._check_structure(small)
    if not big.contains_lattice(small):
        raise NotASublattice("quotient: small is not inside big")
    if big.rank != small.rank:
        raise NotASublattice("quotient: ranks differ (infinite quotient)")
    r = big.rank
    if r == 0:
        return AbelianQuotient([], [big.structure.rational_to_vec([Fraction(0)] * big.structure.dim)], [])
    coords = [big._solve_int_scaled(c) for c in small.basis_columns_rational()]
    m = [[coords[j][i] for j in range(r)] for i in range(r)]
    d, u, _v = snf(m)
    # new basis for big adapted to the filtration: columns of B * U^{-1}
    uinv = _int_inverse_unimodular(u)
    bcols = big.basis_columns_rational()
    adapted = []
    for j in range(r):
        col = [
            sum((bcols[t][i] * uinv[t][j] for t in range(r)), Fraction(0))
            for i in range(big.structure.dim)
        ]
        adapted.append(col)
    factors = [d[j][j] for j in range(r)]
    order = 1
    for f in factors:
        order *= f
    if order > bound:
        raise QuotientTooLarge(f"quotient order {order} exceeds bound {bound}")
    gens = [big.structure.rational_to_vec(adapted[j]) for j in range(r)]
    reps = []
    ranges = [range(f) for f in factors]
    for combo in itertools.product(*ranges):
        xs = [Fraction(0)] * big.structure.dim
        for j, c in enumerate(combo):
            if c:
                for i in range(big.structure.dim):
                    xs[i] += c * adapted[j][i]
        reps.append(big.structure.rational_to_vec(xs))
    inv = [f for f in factors if f > 1]
    gens_kept = [g for f, g in zip(factors, gens) if f > 1]
    return AbelianQuotient(inv, reps, gens_kept)


def _int_inverse_unimodular(u: IntMatrix) -> IntMatrix:
    n = len(u)
    aug = [[Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(n)] for i, row in enumerate(u)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        f = aug[col][col]
        aug[col] = [x / f for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                g = aug[r][col]
                aug[r] = [x - g * y for x, y in zip(aug[r], aug[col])]
    out = [[aug[i][n + j] for j in range(n)] for i in range(n)]
    assert all(x.denominator == 1 for row in out for x in row)
    return [[int(x) for x in row] for row in out]


def enumerate_between(
    small: ZLattice,
    big: ZLattice,
    predicate: Optional[Callable[[ZLattice], bool]] = None,
    bound: int = QUOTIENT_BOUND,
) -> list[ZLattice]:
    """All lattices small <= L <= big (optionally filtered), via subgroups of big/small."""
    q = quotient(big, small, bound=bound)
    factors = []
    gens = []
    # rebuild full factor list including trivial ones for element arithmetic
    # (work directly with the invariant factors > 1; trivial factors contribute nothing)
    factors = q.invariant_factors
    gens = q.generators
    structure = small.structure
    if not factors:
        lats = [ZLattice(structure, small.denominator, small.basis)]
        return [L for L in lats if predicate is None or predicate(L)]
    # elements of the quotient as integer tuples
    all_elems = list(itertools.product(*[range(f) for f in factors]))

    def add(a, b):
        return tuple((x + y) % f for x, y, f in zip(a, b, factors))

    def close(gens_set: frozenset) -> frozenset:
        seen = set(gens_set)
        seen.add(tuple(0 for _ in factors))
        frontier = list(seen)
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens_set:
                    s = add(a, g)
                    if s not in seen:
                        seen.add(s)
                        nxt.append(s)
            frontier = nxt
        return frozenset(seen)

    zero = tuple(0 for _ in factors)
    subgroups = {frozenset([zero])}
    frontier = [frozenset([zero])]
    while frontier:
        nxt = []
        for sub in frontier:
            for g in all_elems:
                if g in sub:
                    continue
                bigger = close(frozenset(sub | {g}))
                if bigger not in subgroups:
                    subgroups.add(bigger)
                    nxt.append(bigger)
        frontier = nxt
    out = []
    for sub in subgroups:
        vecs = []
        for elem in sub:
            xs = [Fraction(0)] * structure.dim
            for j, c in enumerate(elem):
                if c:
                    gx = structure.vec_to_rational(gens[j])
                    for i in range(structure.dim):
                        xs[i] += c * gx[i]
            vecs.append(xs)
        lat = small.sum(ZLattice.from_rational_columns(structure, vecs))
        if predicate is None or predicate(lat):
            out.append(lat)
    out.sort(key=lambda L: L.key())
    return out


# ---------------------------------------------------------------------------
# modular strip reduction for rank-2 lattices in C
# ---------------------------------------------------------------------------


def sign_of_imag(z: CycloNum) -> int:
    """Sign of Im z under the standard embedding, decided exactly at zero."""
    if z.conj() == z:
        return 0
    n = z.field.order
    for prec in (80, 200, 800, 3200):
        with mpmath.workprec(prec):
            val = mpmath.mpf(0)
            for k, c in enumerate(z.coeffs):
                if c:
                    val += mpmath.mpf(c.numerator) / c.denominator * mpmath.sin(
                        2 * mpmath.pi * k / n
                    )
            if abs(val) > mpmath.mpf(2) ** (-prec // 2):
                return 1 if val > 0 else -1
    raise ArithmeticError(f"could not certify sign of Im({z!r})")


def _floor_real(z: CycloNum) -> int:
    """Floor of a real cyclotomic number."""
    from .cyclo import compare_real, sign_of_real

    r = z.as_rational()
    if r is not None:
        return r.__floor__()
    # certified floor: estimate, then verify
    with mpmath.workprec(200):
        est = mpmath.mpf(0)
        for k, c in enumerate(z.coeffs):
            if c:
                est += mpmath.mpf(c.numerator) / c.denominator * mpmath.cos(
                    2 * mpmath.pi * k / z.field.order
                )
        guess = int(mpmath.floor(est))
    for cand in (guess - 1, guess, guess + 1):
        if compare_real(z, cand) >= 0 and compare_real(z, cand + 1) < 0:
            return cand
    raise ArithmeticError("floor certification failed")


def in_modular_strip(tau: CycloNum) -> bool:
    """Membership in Omega = {Im > 0; -1/2 <= Re < 1/2; |z| >= 1 if Re <= 0; |z| > 1 if Re > 0}."""
    from .cyclo import compare_real

    if sign_of_imag(tau) <= 0:
        return False
    re2 = tau.re_twice()  # 2 Re tau
    if compare_real(re2, -1) < 0 or compare_real(re2, 1) >= 0:
        return False
    n2 = tau.norm_sq()
    re_sign = compare_real(re2, 0)
    norm_cmp = compare_real(n2, 1)
    if re_sign <= 0:
        return norm_cmp >= 0
    return norm_cmp > 0


def modular_reduce(alpha: CycloNum, beta: CycloNum, max_steps: int = 256) -> CycloNum:
    """tau in Omega with [alpha, beta] similar to [1, tau]."""
    from .cyclo import compare_real

    if isinstance(alpha, (int, Fraction)) or isinstance(beta, (int, Fraction)):
        raise TypeError("modular_reduce expects cyclotomic scalars")
    if alpha.is_zero() or beta.is_zero():
        raise DegenerateLattice("zero generator")
    tau = beta / alpha
    if sign_of_imag(tau) == 0:
        raise DegenerateLattice("generators are R-linearly dependent")
    if sign_of_imag(tau) < 0:
        tau = -tau  # [1, tau] = [1, -tau] as lattices
    one = tau.field.one
    for _ in range(max_steps):
        # translate Re into [-1/2, 1/2)
        t = _floor_real((tau + tau.conj()) * Fraction(1, 2) + Fraction(1, 2))
        if t:
            tau = tau - t
        n2 = tau.norm_sq()
        cmp1 = compare_real(n2, 1)
        if cmp1 > 0:
            return tau
        if cmp1 == 0:
            # on the unit circle: flip into Re <= 0 if needed
            if compare_real(tau.re_twice(), 0) > 0:
                tau = -(tau.inverse())
                t2 = _floor_real((tau + tau.conj()) * Fraction(1, 2) + Fraction(1, 2))
                if t2:
                    tau = tau - t2
            return tau
        tau = -(tau.inverse())
    raise ArithmeticError("modular reduction did not terminate")


def rank2_lattice_in_C(alpha: CycloNum, beta: CycloNum) -> ZLattice:
    """The lattice Z*alpha + Z*beta inside C = Q(zeta_N) as a ZLattice (n = 1)."""
    field = alpha.field
    structure = RealStructure(1, field.order)
    return ZLattice.from_vectors(
        structure, [CVec(field, [alpha]), CVec(field, [beta])]
    )
