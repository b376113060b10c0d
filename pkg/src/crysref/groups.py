"""Finite matrix group closure and derived data: reflections, mirrors,
essentiality, irreducibility, and the trace ring Z[Tr K].

Closure strategy: realify the generators over Q, stabilize a common invariant
Z-lattice, and run the BFS over integer matrices in that lattice basis (numpy
int64).  This keeps the enumeration of groups like the 46080-element flagship
exact and fast; elements are converted back to cyclotomic matrices on demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

from .cyclo import CycloField, CycloNum
from .errors import CapExceeded, NoStabilization
from .linalg import (
    CMat,
    CVec,
    Reflection,
    basis_vector,
    fixed_codim,
    inner,
    is_unitary,
    nullspace,
    reflection_data,
)
from .zmod import RealStructure, ZLattice, hnf, rat_mat_mul, rat_mat_vec

CLOSURE_CAP = 10**6
_STABILIZE_ITER_CAP = 512


@dataclass
class MirrorDatum:
    """A mirror hyperplane (by its normal), the order m(H) of the cyclic group
    of reflections fixing it, and one representative element index."""

    normal: CVec
    m: int
    representative: int
    reflection_indices: list[int]


class MatrixGroup:
    """A finite group of unitary matrices, closed under product and inverse.

    Elements are held as integer matrices in a stabilized invariant lattice
    basis; `element(i)` converts back to the cyclotomic form.  The element
    ordering is canonical: lexicographic on the integer-matrix encoding in the
    deterministic stabilized basis.
    """

    def __init__(
        self,
        generators: list[CMat],
        structure: RealStructure,
        basis: list[list[Fraction]],
        basis_inv: list[list[Fraction]],
        int_elements: np.ndarray,
        words: list[tuple[int, ...]],
        int_generators: np.ndarray,
    ):
        self.generators = generators
        self.structure = structure
        self.field: CycloField = structure.field
        self.n = structure.n
        self._basis = basis
        self._basis_inv = basis_inv
        self.int_elements = int_elements
        self.generator_words = words
        self.int_generators = int_generators
        self.order = len(int_elements)
        self._index: dict[bytes, int] = {
            int_elements[i].tobytes(): i for i in range(self.order)
        }
        self._cmat_cache: dict[int, CMat] = {}

    # -- element access -----------------------------------------------------

    def element(self, i: int) -> CMat:
        hit = self._cmat_cache.get(i)
        if hit is not None:
            return hit
        m = self._int_to_cmat(self.int_elements[i])
        if len(self._cmat_cache) < 8192:
            self._cmat_cache[i] = m
        return m

    def elements(self) -> Iterator[CMat]:
        for i in range(self.order):
            yield self.element(i)

    def _int_to_cmat(self, mat: np.ndarray) -> CMat:
        d = self.structure.dim
        rat = [[Fraction(int(mat[i, j])) for j in range(d)] for i in range(d)]
        full = rat_mat_mul(rat_mat_mul(self._basis, rat), self._basis_inv)
        cols = []
        for k in range(self.n):
            e_k = [Fraction(0)] * d
            e_k[k * self.structure.phi] = Fraction(1)
            cols.append(self.structure.rational_to_vec(rat_mat_vec(full, e_k)))
        return CMat(
            self.field,
            [[cols[j].coords[i] for j in range(self.n)] for i in range(self.n)],
        )

    def index_of_int(self, mat: np.ndarray) -> Optional[int]:
        return self._index.get(mat.tobytes())

    def index_of(self, m: CMat) -> Optional[int]:
        return self.index_of_int(self._cmat_to_int(m))

    def _cmat_to_int(self, m: CMat) -> np.ndarray:
        real = self.structure.realify(m)
        in_basis = rat_mat_mul(rat_mat_mul(self._basis_inv, real), self._basis)
        d = self.structure.dim
        out = np.zeros((d, d), dtype=np.int64)
        for i in range(d):
            for j in range(d):
                x = in_basis[i][j]
                if x.denominator != 1:
                    raise ValueError("matrix does not preserve the group lattice")
                out[i, j] = int(x)
        return out

    def contains(self, m: CMat) -> bool:
        try:
            return self.index_of(m) is not None
        except ValueError:
            return False

    def identity_index(self) -> int:
        d = self.structure.dim
        return self._index[np.eye(d, dtype=np.int64).tobytes()]

    def int_trace(self) -> np.ndarray:
        return np.einsum("kii->k", self.int_elements)

    def multiply_indices(self, i: int, j: int) -> int:
        prod = self.int_elements[i] @ self.int_elements[j]
        return self._index[prod.tobytes()]

    def word_for(self, i: int) -> tuple[int, ...]:
        return self.generator_words[i]

    def complex_traces(self) -> list[CycloNum]:
        """Exact Tr_C of every element, recovered from the integer matrices."""
        phi = self.structure.phi
        field = self.field
        # J_l = matrix of multiplication by zeta^l in the lattice basis
        j_ints = []
        j_den = 1
        from math import gcd

        j_rats = []
        for l in range(phi):
            zl = field.zeta(l)
            real = self.structure.scalar_matrix(zl)
            in_basis = rat_mat_mul(rat_mat_mul(self._basis_inv, real), self._basis)
            j_rats.append(in_basis)
            for row in in_basis:
                for x in row:
                    j_den = j_den * x.denominator // gcd(j_den, x.denominator)
        for in_basis in j_rats:
            j_ints.append(
                np.array(
                    [[int(x * j_den) for x in row] for row in in_basis], dtype=np.int64
                )
            )
        # tr_l[k] = Tr_Q(M_k @ J_l) * j_den
        trs = [np.einsum("kij,ji->k", self.int_elements, j) for j in j_ints]
        # Solve sum_k c_k Tr_Q(zeta^(k+l)) = tr_l for the coefficients c of Tr_C.
        gram = [
            [_rational_trace_of_power(field, k + l) for k in range(phi)]
            for l in range(phi)
        ]
        ginv = _rat_inverse(gram)
        out = []
        for idx in range(self.order):
            rhs = [Fraction(int(trs[l][idx]), j_den) for l in range(phi)]
            coeffs = tuple(
                sum((ginv[k][l] * rhs[l] for l in range(phi)), Fraction(0))
                for k in range(phi)
            )
            out.append(CycloNum(field, coeffs))
        return out


def _rational_trace_of_power(field: CycloField, k: int) -> Fraction:
    """Tr_{Q(zeta)/Q}(zeta^k): trace of the multiplication matrix."""
    row = field.power_table[k % field.order]
    # trace of mult-by-zeta^k: sum over basis index i of coeff of zeta^i in zeta^(k+i)
    total = 0
    for i in range(field.degree):
        total += field.power_table[(k + i) % field.order][i]
    return Fraction(total)


def _rat_inverse(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    aug = [
        [Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(n)]
        for i, row in enumerate(m)
    ]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        f = aug[col][col]
        aug[col] = [x / f for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                g = aug[r][col]
                aug[r] = [x - g * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _stabilize_lattice(structure: RealStructure, gens_real: list) -> ZLattice:
    """Smallest lattice containing Z^d and invariant under the generators."""
    d = structure.dim
    ident_cols = [[Fraction(1 if i == j else 0) for i in range(d)] for j in range(d)]
    lat = ZLattice.from_rational_columns(structure, ident_cols)
    for _ in range(_STABILIZE_ITER_CAP):
        nxt = lat
        for g in gens_real:
            nxt = nxt.sum(lat.apply_rational(g))
        if nxt == lat:
            return lat
        lat = nxt
        if lat.denominator > 10**40:
            break
    raise CapExceeded(CLOSURE_CAP)


def closure(generators: Sequence[CMat], cap: int = CLOSURE_CAP) -> MatrixGroup:
    """BFS closure of unitary generators into a finite MatrixGroup.

    Raises CapExceeded when more than `cap` elements appear (infinite or
    too-large group)."""
    if not generators:
        raise ValueError("need at least one generator")
    field = generators[0].field
    n = generators[0].rows
    for g in generators:
        if g.rows != n or g.cols != n:
            raise ValueError("generators must share dimensions")
        if g.field is not field:
            raise ValueError("generators must share the scalar field")
        if not is_unitary(g):
            raise ValueError("generators must be unitary")
    structure = RealStructure(n, field.order)
    gens_real = [structure.realify(g) for g in generators]
    lat = _stabilize_lattice(structure, gens_real)
    d = structure.dim
    basis = lat.basis_columns_rational()
    basis_mat = [[basis[j][i] for j in range(d)] for i in range(d)]
    basis_inv = _rat_inverse(basis_mat)
    int_gens = []
    for g in gens_real:
        in_basis = rat_mat_mul(rat_mat_mul(basis_inv, g), basis_mat)
        arr = np.zeros((d, d), dtype=np.int64)
        for i in range(d):
            for j in range(d):
                x = in_basis[i][j]
                assert x.denominator == 1, "stabilized lattice is not invariant"
                arr[i, j] = int(x)
        int_gens.append(arr)
    int_gens_arr = np.stack(int_gens)

    ident = np.eye(d, dtype=np.int64)
    elements = [ident]
    keys = {ident.tobytes(): 0}
    parents = [(-1, -1)]  # (parent index, generator index)
    frontier = [0]
    while frontier:
        batch = np.stack([elements[i] for i in frontier])
        next_frontier = []
        for gi in range(len(int_gens)):
            prods = batch @ int_gens_arr[gi]
            if np.abs(prods).max() > 2**52:
                raise CapExceeded(cap)
            for bi, src in enumerate(frontier):
                key = prods[bi].tobytes()
                if key not in keys:
                    keys[key] = len(elements)
                    elements.append(prods[bi])
                    parents.append((src, gi))
                    next_frontier.append(len(elements) - 1)
                    if len(elements) > cap:
                        raise CapExceeded(cap)
        frontier = next_frontier

    # canonical ordering: lexicographic on the integer encoding
    order = sorted(range(len(elements)), key=lambda i: elements[i].tobytes())
    rank = {old: new for new, old in enumerate(order)}
    arr = np.stack([elements[i] for i in order])

    def word_of(old_idx: int) -> tuple[int, ...]:
        out = []
        i = old_idx
        while i != 0:
            p, g = parents[i]
            out.append(g)
            i = p
        return tuple(reversed(out))

    words = [word_of(order[new]) for new in range(len(order))]
    return MatrixGroup(
        generators=list(generators),
        structure=structure,
        basis=basis_mat,
        basis_inv=basis_inv,
        int_elements=arr,
        words=words,
        int_generators=int_gens_arr,
    )


# ---------------------------------------------------------------------------
# reflections and mirrors
# ---------------------------------------------------------------------------


def _allowed_reflection_traces(group: MatrixGroup) -> set[int]:
    """Integer traces (in the lattice basis) a reflection can have."""
    field = group.field
    n = group.n
    allowed = set()
    # theta ranges over roots of unity in the field, theta != 1
    units = {field.zeta(k) for k in range(field.order)}
    units |= {-field.zeta(k) for k in range(field.order)}
    for theta in units:
        if theta == 1:
            continue
        tr = Fraction(n - 1) * _rational_trace_of_power(field, 0) + _trace_q(theta)
        if tr.denominator == 1:
            allowed.add(int(tr))
    return allowed


def _trace_q(z: CycloNum) -> Fraction:
    total = Fraction(0)
    for k, c in enumerate(z.coeffs):
        if c:
            total += c * _rational_trace_of_power(z.field, k)
    return total


def reflections_of(group: MatrixGroup) -> list[tuple[int, Reflection]]:
    """Every element with rank(I - P) = 1, with its root line and eigenvalue."""
    allowed = _allowed_reflection_traces(group)
    traces = group.int_trace()
    out = []
    for i in range(group.order):
        if int(traces[i]) not in allowed:
            continue
        m = group.element(i)
        data = reflection_data(m)
        if data is not None:
            out.append((i, data))
    return out


def _line_key(group: MatrixGroup, v: CVec) -> tuple:
    """Canonical key of the complex line C*v: scale so the first nonzero
    coordinate is 1."""
    for c in v.coords:
        if c:
            w = v.scale(c.inverse())
            return tuple(x.coeffs for x in w.coords)
    raise ValueError("zero vector has no line")


def mirrors_of(group: MatrixGroup) -> list[MirrorDatum]:
    refl = reflections_of(group)
    by_line: dict[tuple, list[tuple[int, Reflection]]] = {}
    for i, r in refl:
        by_line.setdefault(_line_key(group, r.root), []).append((i, r))
    out = []
    for key in sorted(by_line):
        items = by_line[key]
        rep = min(i for i, _ in items)
        root = items[0][1].root
        out.append(
            MirrorDatum(
                normal=root,
                m=len(items) + 1,
                representative=rep,
                reflection_indices=sorted(i for i, _ in items),
            )
        )
    return out


def is_essential(group: MatrixGroup) -> bool:
    """Common fixed space of the generators is zero."""
    field = group.field
    n = group.n
    ident = CMat.identity(field, n)
    rows = []
    for g in group.generators:
        diff = ident - g
        rows.extend(diff.entries)
    stacked = CMat(field, rows)
    return len(nullspace(stacked)) == 0


def is_irreducible(group: MatrixGroup) -> bool:
    """Irreducible over C iff the commutant of the generators has dimension 1.

    The commutant is cut out by linear equations over Q(zeta_N); its dimension
    over C equals its dimension over the field, so exact Gaussian elimination
    decides complex irreducibility."""
    field = group.field
    n = group.n
    rows = []
    for g in group.generators:
        # equation g X - X g = 0, unknowns X_{ab} column-stacked
        for i in range(n):
            for j in range(n):
                row = [field.zero] * (n * n)
                for k in range(n):
                    row[k * n + j] = row[k * n + j] + g.entries[i][k]
                    row[i * n + k] = row[i * n + k] - g.entries[k][j]
                rows.append(row)
    stacked = CMat(field, rows)
    return len(nullspace(stacked)) == 1


# ---------------------------------------------------------------------------
# trace ring
# ---------------------------------------------------------------------------


@dataclass
class TraceRing:
    """The unital ring Z[gen_1, gen_2, ...] inside Q(zeta_N), held as a
    canonical Z-module basis (HNF of coefficient vectors)."""

    generators: list[CycloNum]
    zmodule_basis: list[CycloNum]

    def contains(self, z: CycloNum) -> bool:
        return _module_contains(self.zmodule_basis, z)

    def rank(self) -> int:
        return len(self.zmodule_basis)

    def same_module(self, other: "TraceRing") -> bool:
        return [b.coeffs for b in self.zmodule_basis] == [
            b.coeffs for b in other.zmodule_basis
        ]


def _module_canonical(field: CycloField, vecs: list[CycloNum]) -> list[CycloNum]:
    cols = [list(v.coeffs) for v in vecs if not v.is_zero()]
    if not cols:
        return []
    from math import gcd

    den = 1
    for col in cols:
        for x in col:
            den = den * x.denominator // gcd(den, x.denominator)
    mat = [[int(cols[j][i] * den) for j in range(len(cols))] for i in range(field.degree)]
    h, _ = hnf(mat)
    out = []
    for j in range(len(h[0]) if h and h[0] else 0):
        coeffs = tuple(Fraction(h[i][j], den) for i in range(field.degree))
        out.append(CycloNum(field, coeffs))
    return out


def _module_contains(basis: list[CycloNum], z: CycloNum) -> bool:
    if z.is_zero():
        return True
    if not basis:
        return False
    field = z.field
    from math import gcd

    den = 1
    for v in basis + [z]:
        for x in v.coeffs:
            den = den * x.denominator // gcd(den, x.denominator)
    mat = [[int(v.coeffs[i] * den) for v in basis] for i in range(field.degree)]
    target = [int(z.coeffs[i] * den) for i in range(field.degree)]
    # solve integer system via HNF
    h, u = hnf(mat)
    # express target on h columns
    r = len(h[0]) if h and h[0] else 0
    residue = list(target)
    piv_rows = []
    for j in range(r):
        piv_rows.append(next(i for i in range(field.degree) if h[i][j]))
    for j in range(r):
        p = piv_rows[j]
        if residue[p] % h[p][j]:
            return False
        c = residue[p] // h[p][j]
        if c:
            for i in range(field.degree):
                residue[i] -= c * h[i][j]
    return not any(residue)


def ring_from_generators(field: CycloField, gens: list[CycloNum]) -> TraceRing:
    """Unital ring closure as a stabilized Z-module."""
    basis = _module_canonical(field, [field.one] + list(gens))
    for _ in range(field.degree + 4):
        extended = list(basis)
        for g in gens:
            extended.extend(g * b for b in basis)
        nxt = _module_canonical(field, extended)
        if [b.coeffs for b in nxt] == [b.coeffs for b in basis]:
            return TraceRing(generators=list(gens), zmodule_basis=basis)
        basis = nxt
        if len(basis) > field.degree:
            raise NoStabilization("module rank exceeded the field degree")
    raise NoStabilization("ring closure did not stabilize")


def trace_ring(group: MatrixGroup) -> TraceRing:
    """Z[Tr K]: the unital ring generated by the traces of all elements."""
    traces = group.complex_traces()
    distinct = []
    seen = set()
    for t in traces:
        if t.coeffs not in seen:
            seen.add(t.coeffs)
            distinct.append(t)
    return ring_from_generators(group.field, distinct)


# ---------------------------------------------------------------------------
# conjugacy diagnostic
# ---------------------------------------------------------------------------


def reflection_conjugacy_diagnostic(
    group: MatrixGroup, generating_reflections: Sequence[Reflection]
) -> bool:
    """True iff every reflection of the group is conjugate to a power of one
    of the given generators, decided by mirror orbits."""
    mirrors = mirrors_of(group)
    if not mirrors:
        return True
    key_to_idx = {_line_key(group, m.normal): i for i, m in enumerate(mirrors)}
    gen_keys = {_line_key(group, r.root) for r in generating_reflections}
    # orbits of mirrors under the generator action
    seen: set[tuple] = set()
    orbits: list[set] = []
    for m in mirrors:
        k0 = _line_key(group, m.normal)
        if k0 in seen:
            continue
        orbit = {k0}
        queue = [m.normal]
        while queue:
            v = queue.pop()
            for g in group.generators:
                w = g * v
                kw = _line_key(group, w)
                if kw not in orbit:
                    orbit.add(kw)
                    queue.append(w)
        seen |= orbit
        orbits.append(orbit)
    for orbit in orbits:
        if not (orbit & gen_keys):
            return False
    return True
