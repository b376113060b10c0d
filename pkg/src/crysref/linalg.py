"""Vectors, matrices and reflections over a cyclotomic field with the standard Hermitian form."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .cyclo import CycloField, CycloNum
from .errors import DimensionMismatch, OrderCapExceeded, ZeroRoot

ORDER_SEARCH_CAP = 10000


def _as_scalar(field: CycloField, v) -> CycloNum:
    if isinstance(v, CycloNum):
        return v if v.field is field else v.embed(field.order)
    return field.from_rational(v)


class CVec:
    """Vector with exact cyclotomic coordinates."""

    __slots__ = ("field", "coords")

    def __init__(self, field: CycloField, coords: Sequence):
        self.field = field
        self.coords = tuple(_as_scalar(field, c) for c in coords)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __add__(self, other: "CVec") -> "CVec":
        self._check(other)
        return CVec(self.field, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: "CVec") -> "CVec":
        self._check(other)
        return CVec(self.field, [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self) -> "CVec":
        return CVec(self.field, [-a for a in self.coords])

    def scale(self, c) -> "CVec":
        c = _as_scalar(self.field, c)
        return CVec(self.field, [c * a for a in self.coords])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coords)

    def _check(self, other: "CVec") -> None:
        if self.dim != other.dim:
            raise DimensionMismatch(f"dims {self.dim} != {other.dim}")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CVec)
            and self.field is other.field
            and self.coords == other.coords
        )

    def __hash__(self) -> int:
        return hash((self.field.order, self.coords))

    def __repr__(self) -> str:
        return "CVec(" + ", ".join(c.text() for c in self.coords) + ")"


def basis_vector(field: CycloField, dim: int, k: int) -> CVec:
    coords = [field.zero] * dim
    coords[k] = field.one
    return CVec(field, coords)


def inner(u: CVec, v: CVec) -> CycloNum:
    """Standard Hermitian form <u|v> = sum u_k conj(v_k), linear in the first slot."""
    if u.dim != v.dim:
        raise DimensionMismatch(f"dims {u.dim} != {v.dim}")
    acc = u.field.zero
    for a, b in zip(u.coords, v.coords):
        if a and b:
            acc = acc + a * b.conj()
    return acc


class CMat:
    """Rectangular matrix with exact cyclotomic entries."""

    __slots__ = ("field", "entries", "_hash")

    def __init__(self, field: CycloField, entries: Sequence[Sequence]):
        self.field = field
        self.entries = tuple(
            tuple(_as_scalar(field, v) for v in row) for row in entries
        )
        if self.entries:
            w = len(self.entries[0])
            if any(len(r) != w for r in self.entries):
                raise DimensionMismatch("ragged matrix")
        self._hash: Optional[int] = None

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @classmethod
    def identity(cls, field: CycloField, n: int) -> "CMat":
        return cls(
            field,
            [[field.one if i == j else field.zero for j in range(n)] for i in range(n)],
        )

    @classmethod
    def diagonal(cls, field: CycloField, diag: Sequence) -> "CMat":
        n = len(diag)
        return cls(
            field,
            [
                [_as_scalar(field, diag[i]) if i == j else field.zero for j in range(n)]
                for i in range(n)
            ],
        )

    def __mul__(self, other):
        if isinstance(other, CMat):
            if self.cols != other.rows:
                raise DimensionMismatch("matrix product shape mismatch")
            zero = self.field.zero
            bt = list(zip(*other.entries))
            out = []
            for row in self.entries:
                new_row = []
                for col in bt:
                    acc = zero
                    for a, b in zip(row, col):
                        if a and b:
                            acc = acc + a * b
                    new_row.append(acc)
                out.append(new_row)
            return CMat(self.field, out)
        if isinstance(other, CVec):
            if self.cols != other.dim:
                raise DimensionMismatch("matrix-vector shape mismatch")
            zero = self.field.zero
            out = []
            for row in self.entries:
                acc = zero
                for a, b in zip(row, other.coords):
                    if a and b:
                        acc = acc + a * b
                out.append(acc)
            return CVec(self.field, out)
        return NotImplemented

    def __add__(self, other: "CMat") -> "CMat":
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionMismatch("matrix sum shape mismatch")
        return CMat(
            self.field,
            [
                [a + b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.entries, other.entries)
            ],
        )

    def __sub__(self, other: "CMat") -> "CMat":
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionMismatch("matrix difference shape mismatch")
        return CMat(
            self.field,
            [
                [a - b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.entries, other.entries)
            ],
        )

    def scale(self, c) -> "CMat":
        c = _as_scalar(self.field, c)
        return CMat(self.field, [[c * v for v in row] for row in self.entries])

    def conj_transpose(self) -> "CMat":
        return CMat(
            self.field,
            [
                [self.entries[i][j].conj() for i in range(self.rows)]
                for j in range(self.cols)
            ],
        )

    def transpose(self) -> "CMat":
        return CMat(self.field, list(zip(*self.entries)))

    def trace(self) -> CycloNum:
        acc = self.field.zero
        for i in range(min(self.rows, self.cols)):
            acc = acc + self.entries[i][i]
        return acc

    def det(self) -> CycloNum:
        if self.rows != self.cols:
            raise DimensionMismatch("determinant of a non-square matrix")
        n = self.rows
        m = [list(row) for row in self.entries]
        det = self.field.one
        for col in range(n):
            piv = next((r for r in range(col, n) if m[r][col]), None)
            if piv is None:
                return self.field.zero
            if piv != col:
                m[col], m[piv] = m[piv], m[col]
                det = -det
            det = det * m[col][col]
            inv = m[col][col].inverse()
            for r in range(col + 1, n):
                if m[r][col]:
                    f = m[r][col] * inv
                    m[r] = [v - f * w for v, w in zip(m[r], m[col])]
        return det

    def rank(self) -> int:
        m = [list(row) for row in self.entries]
        rank = 0
        rows, cols = self.rows, self.cols
        for col in range(cols):
            piv = next((r for r in range(rank, rows) if m[r][col]), None)
            if piv is None:
                continue
            m[rank], m[piv] = m[piv], m[rank]
            inv = m[rank][col].inverse()
            m[rank] = [v * inv for v in m[rank]]
            for r in range(rows):
                if r != rank and m[r][col]:
                    f = m[r][col]
                    m[r] = [v - f * w for v, w in zip(m[r], m[rank])]
            rank += 1
            if rank == rows:
                break
        return rank

    def inverse(self) -> "CMat":
        if self.rows != self.cols:
            raise DimensionMismatch("inverse of a non-square matrix")
        n = self.rows
        field = self.field
        aug = [
            list(row) + [field.one if i == j else field.zero for j in range(n)]
            for i, row in enumerate(self.entries)
        ]
        for col in range(n):
            piv = next((r for r in range(col, n) if aug[r][col]), None)
            if piv is None:
                raise ZeroDivisionError("singular matrix")
            aug[col], aug[piv] = aug[piv], aug[col]
            inv = aug[col][col].inverse()
            aug[col] = [v * inv for v in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
        return CMat(field, [row[n:] for row in aug])

    def column(self, j: int) -> CVec:
        return CVec(self.field, [self.entries[i][j] for i in range(self.rows)])

    def is_identity(self) -> bool:
        if self.rows != self.cols:
            return False
        one, zero = self.field.one, self.field.zero
        return all(
            self.entries[i][j] == (one if i == j else zero)
            for i in range(self.rows)
            for j in range(self.cols)
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CMat)
            and self.field is other.field
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.field.order, self.entries))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(
            ", ".join(v.text() for v in row) for row in self.entries
        )
        return f"CMat[{body}]"


def nullspace(m: CMat) -> list[CVec]:
    """Basis of the right kernel over the cyclotomic field."""
    rows = [list(r) for r in m.entries]
    n_rows, n_cols = m.rows, m.cols
    pivots: list[int] = []
    rank = 0
    for col in range(n_cols):
        piv = next((r for r in range(rank, n_rows) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [v * inv for v in rows[rank]]
        for r in range(n_rows):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [v - f * w for v, w in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    field = m.field
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [field.zero] * n_cols
        vec[fc] = field.one
        for r, pc in enumerate(pivots):
            vec[pc] = -rows[r][fc]
        basis.append(CVec(field, vec))
    return basis


@dataclass(frozen=True)
class Reflection:
    """A linear reflection R_{e,theta}: root vector e (not necessarily unit) and
    a primitive m-th root of unity theta, m >= 2."""

    root: CVec
    theta: CycloNum
    order: int

    def __post_init__(self):
        norm = inner(self.root, self.root)
        if norm.is_zero():
            raise ZeroRoot("reflection root has <e|e> = 0")
        if self.order < 2:
            raise ValueError("reflection order must be >= 2")
        if (self.theta ** self.order) != 1:
            raise ValueError("theta^m != 1")
        for k in range(1, self.order):
            if (self.theta ** k) == 1:
                raise ValueError("theta is not a primitive m-th root of unity")

    @property
    def field(self) -> CycloField:
        return self.root.field

    def matrix(self) -> CMat:
        return reflection_matrix(self)

    def apply(self, v: CVec) -> CVec:
        """R v = v - (1-theta) (<v|e>/<e|e>) e."""
        e = self.root
        factor = (self.field.one - self.theta) * inner(v, e) / inner(e, e)
        return v - e.scale(factor)


def reflection_matrix(r: Reflection) -> CMat:
    field = r.field
    n = r.root.dim
    cols = [r.apply(basis_vector(field, n, k)) for k in range(n)]
    return CMat(field, [[cols[j].coords[i] for j in range(n)] for i in range(n)])


def is_unitary(p: CMat) -> bool:
    if p.rows != p.cols:
        return False
    return (p * p.conj_transpose()).is_identity()


def fixed_codim(p: CMat) -> int:
    """codim of the fixed space, i.e. rank(I - P)."""
    if p.rows != p.cols:
        raise DimensionMismatch("fixed_codim of a non-square matrix")
    return (CMat.identity(p.field, p.rows) - p).rank()


def matrix_order(p: CMat, cap: int = ORDER_SEARCH_CAP) -> int:
    """Multiplicative order of P, searching up to cap."""
    if p.rows != p.cols:
        raise DimensionMismatch("order of a non-square matrix")
    q = p
    for k in range(1, cap + 1):
        if q.is_identity():
            return k
        q = q * p
    raise OrderCapExceeded(f"no order found below {cap}")


def is_reflection_matrix(p: CMat, cap: int = ORDER_SEARCH_CAP) -> bool:
    """Unitary, finite order, and rank(I - P) = 1."""
    if p.rows != p.cols:
        return False
    if not is_unitary(p):
        return False
    if fixed_codim(p) != 1:
        return False
    matrix_order(p, cap)  # raises OrderCapExceeded if order search fails
    return True


def reflection_data(p: CMat, cap: int = ORDER_SEARCH_CAP) -> Optional[Reflection]:
    """Extract (root, theta, order) from a reflection matrix, or None."""
    if not is_reflection_matrix(p, cap):
        return None
    n = p.rows
    diff = CMat.identity(p.field, n) - p
    # image of (I - P) is the root line
    root = None
    for j in range(n):
        col = diff.column(j)
        if not col.is_zero():
            root = col
            break
    assert root is not None
    # theta from R e = theta e
    img = p * root
    for k, c in enumerate(root.coords):
        if c:
            theta = img.coords[k] / c
            break
    order = 1
    power = theta
    while power != 1:
        power = power * theta
        order += 1
        if order > cap:
            raise OrderCapExceeded("eigenvalue order search exceeded cap")
    return Reflection(root=root, theta=theta, order=order)
