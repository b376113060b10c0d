"""Root sublattices, the operator S, dual lattices, and the constructive
enumeration of invariant lattices for reflection systems with s = n and
s = n + 1 generators."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .cyclo import CycloField, CycloNum
from .errors import (
    ChainConditionViolated,
    DeltaNotStable,
    NotInvariant,
    PathConditionViolated,
    SingularS,
    SubsystemReducible,
    WrongGeneratorCount,
)
from .graphs import GroupGraph, LineSystem, build_graph
from .groups import MatrixGroup, TraceRing, closure, is_irreducible, ring_from_generators
from .linalg import CMat, CVec, Reflection, inner, reflection_matrix
from .zmod import RealStructure, ZLattice, enumerate_between, intersect_with_complex_line, preimage

SIMILARITY_COEFF_BOUND = 3


class ReflectionSystem:
    """A generating system of reflections R_1..R_s of an n-dimensional group."""

    def __init__(self, gens: Sequence[Reflection], closure_cap: int = 10**6):
        if not gens:
            raise ValueError("need at least one reflection")
        self.gens = list(gens)
        self.field: CycloField = gens[0].field
        self.n = gens[0].root.dim
        self.s = len(gens)
        self.matrices = [reflection_matrix(r) for r in self.gens]
        self.structure = RealStructure(self.n, self.field.order)
        self._closure_cap = closure_cap
        self._group: Optional[MatrixGroup] = None
        self._identity = CMat.identity(self.field, self.n)
        self._c_cache: dict[tuple[int, int], CycloNum] = {}

    @property
    def group(self) -> MatrixGroup:
        if self._group is None:
            self._group = closure(self.matrices, cap=self._closure_cap)
        return self._group

    def line_system(self) -> LineSystem:
        return LineSystem([(r.root, r.order) for r in self.gens])

    def graph(self) -> GroupGraph:
        return build_graph(self.line_system())

    def one_minus(self, j: int) -> CMat:
        return self._identity - self.matrices[j]

    def c_pair(self, j: int, k: int) -> CycloNum:
        """The two-index cyclic product, read off the operator identity
        (I - R_j)(I - R_k) e_j = c_{jk} e_j (valid for j = k as well)."""
        key = (j, k)
        v = self._c_cache.get(key)
        if v is not None:
            return v
        image = self.one_minus(j) * (self.one_minus(k) * self.gens[j].root)
        root = self.gens[j].root
        c = self.field.zero
        for a, b in zip(image.coords, root.coords):
            if b:
                c = a / b
                break
        # consistency: image must be proportional to the root
        if not (image == root.scale(c)):
            raise ArithmeticError("cyclic-product identity violated (bad system)")
        self._c_cache[key] = c
        return c

    def lattice_from_scalars(self, scalars: Sequence[CycloNum], v: CVec) -> ZLattice:
        return ZLattice.from_vectors(self.structure, [v.scale(c) for c in scalars])


@dataclass
class OperatorS:
    matrix: CMat
    det: CycloNum
    system: ReflectionSystem

    def inverse_applied(self, lat: ZLattice) -> ZLattice:
        inv = self.matrix.inverse()
        return lat.apply_matrix(inv)


def operator_S(sys: ReflectionSystem) -> OperatorS:
    """S = (I - R_1) + ... + (I - R_n); requires s = n and spanning root lines."""
    if sys.s != sys.n:
        raise WrongGeneratorCount(f"operator S needs s = n, got s={sys.s}, n={sys.n}")
    m = sys.one_minus(0)
    for j in range(1, sys.n):
        m = m + sys.one_minus(j)
    det = m.det()
    if det.is_zero():
        raise SingularS("root lines of the generators do not span the space")
    return OperatorS(matrix=m, det=det, system=sys)


def is_invariant(lat: ZLattice, group_or_mats) -> bool:
    """P * lat == lat for every generator P."""
    mats = group_or_mats.generators if isinstance(group_or_mats, MatrixGroup) else list(group_or_mats)
    for p in mats:
        if lat.apply_matrix(p) != lat:
            return False
    return True


def root_sublattice(lat: ZLattice, sys: ReflectionSystem, check: bool = True) -> ZLattice:
    """Gamma^0 = sum_j (Gamma intersect C e_j) over the generating system."""
    if check and not is_invariant(lat, sys.matrices):
        raise NotInvariant("lattice is not invariant under the system")
    out = ZLattice.zero(sys.structure)
    for r in sys.gens:
        out = out.sum(intersect_with_complex_line(lat, r.root))
    return out


def line_component(lat: ZLattice, sys: ReflectionSystem, j: int) -> ZLattice:
    return intersect_with_complex_line(lat, sys.gens[j].root)


def dual_star(
    lat: ZLattice, sys: ReflectionSystem, method: str = "auto", check: bool = True
) -> ZLattice:
    """Gamma* = {v : (I - R_j) v in Gamma_j for all j}.

    method: 'constraints' solves the stacked integer system; 'inverse_s' uses
    Lambda* = S^-1 Lambda (valid when s = n and Lambda is a root lattice);
    'auto' picks the fast path when it applies."""
    if check and not is_invariant(lat, sys.matrices):
        raise NotInvariant("lattice is not invariant under the system")
    if method not in ("auto", "constraints", "inverse_s"):
        raise ValueError(f"unknown method {method}")
    if method in ("auto", "inverse_s"):
        if sys.s == sys.n:
            lat0 = root_sublattice(lat, sys, check=False)
            if lat0 == lat:
                return operator_S(sys).inverse_applied(lat)
        if method == "inverse_s":
            raise ValueError("inverse_s path needs s = n and a root lattice")
    constraints = []
    for j in range(sys.s):
        a = sys.structure.realify(sys.one_minus(j))
        t = line_component(lat, sys, j)
        constraints.append((a, t))
    return preimage(constraints, sys.structure)


def star_components(lat: ZLattice, sys: ReflectionSystem) -> list[ZLattice]:
    """Gamma*_j = intersection over k with c_jk != 0 of c_jk^-1 (I-R_j) Gamma_k."""
    out = []
    for j in range(sys.s):
        acc: Optional[ZLattice] = None
        for k in range(sys.s):
            c = sys.c_pair(j, k)
            if c.is_zero():
                continue
            gk = line_component(lat, sys, k)
            piece = gk.apply_matrix(sys.one_minus(j)).scale_scalar(c.inverse())
            acc = piece if acc is None else acc.intersect(piece)
        out.append(acc if acc is not None else ZLattice.zero(sys.structure))
    return out


# ---------------------------------------------------------------------------
# rings attached to the system
# ---------------------------------------------------------------------------


def cyclic_product_values(sys: ReflectionSystem, through: Optional[int] = None) -> list[CycloNum]:
    """All simple cyclic products (nodes, pairs, and simple cycles in both
    orientations), optionally restricted to those passing through one index."""
    from .graphs import cyclic_product

    ls = sys.line_system()
    g = build_graph(ls)
    values = []
    n = sys.s
    for j in range(n):
        if through is None or j == through:
            values.append(cyclic_product(ls, [j]))
    for j in range(n):
        for k in range(j + 1, n):
            if through is not None and through not in (j, k):
                continue
            c = cyclic_product(ls, [j, k])
            if not c.is_zero():
                values.append(c)
    for seq, c in g.oriented_simple_cycles:
        if through is not None and through not in seq:
            continue
        values.append(c)
        values.append(cyclic_product(ls, list(reversed(seq))))
    return values


def cyclic_product_ring(sys: ReflectionSystem, through: Optional[int] = None) -> TraceRing:
    return ring_from_generators(sys.field, cyclic_product_values(sys, through))


@dataclass
class AdmissibilityReport:
    admissible: bool
    ring: Optional[TraceRing]
    generator_checks: list[tuple[CycloNum, bool]]
    reason: str

    def __bool__(self) -> bool:
        return self.admissible


def admissible(sys: ReflectionSystem) -> AdmissibilityReport:
    """The crystallographic gate: every cyclic product must be an algebraic
    integer of one purely imaginary quadratic extension of Q (or of Q itself)."""
    values = cyclic_product_values(sys)
    checks = [(v, v.is_imag_quadratic_integer()) for v in values]
    if not all(ok for _, ok in checks):
        return AdmissibilityReport(False, None, checks, "a cyclic product fails the integrality test")
    ring = ring_from_generators(sys.field, values)
    if ring.rank() > 2:
        return AdmissibilityReport(False, ring, checks, "cyclic products generate a ring of rank > 2")
    if ring.rank() == 2:
        # basis {1, alpha}; the ring is an order of Q(alpha), which must be imaginary
        alpha = next(b for b in ring.zmodule_basis if b.as_rational() is None)
        if alpha.is_real():
            return AdmissibilityReport(False, ring, checks, "cyclic products generate a real quadratic ring")
    return AdmissibilityReport(True, ring, checks, "ok")


# ---------------------------------------------------------------------------
# root lattice construction, case 1 (unit-weight paths)
# ---------------------------------------------------------------------------


def _unit_edges(sys: ReflectionSystem) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {j: [] for j in range(sys.s)}
    for j in range(sys.s):
        for k in range(sys.s):
            if j == k:
                continue
            c = sys.c_pair(j, k)
            if not c.is_zero() and c.norm_sq() == 1:
                adj[j].append(k)
    return adj


def _bfs_paths(adj: dict[int, list[int]], start: int, count: int) -> dict[int, list[int]]:
    """Shortest path (as node list from start) to every node, or raise."""
    paths = {start: [start]}
    queue = [start]
    while queue:
        v = queue.pop(0)
        for w in adj[v]:
            if w not in paths:
                paths[w] = paths[v] + [w]
                queue.append(w)
    if len(paths) != count:
        raise PathConditionViolated(
            f"only {len(paths)} of {count} nodes reachable by unit-weight edges"
        )
    return paths


def propagate_along_path(sys: ReflectionSystem, lam1: ZLattice, path: Sequence[int]) -> ZLattice:
    """Lambda_l = (I - R_{j_r}) ... (I - R_{j_2}) Lambda_1 for path (j_1 ... j_r)."""
    lat = lam1
    for j in path[1:]:
        lat = lat.apply_matrix(sys.one_minus(j))
    return lat


def _check_delta_stable(sys: ReflectionSystem, delta: ZLattice) -> TraceRing:
    ring = cyclic_product_ring(sys)
    for b in ring.zmodule_basis:
        if delta.scale_scalar(b).sum(delta) != delta:
            raise DeltaNotStable("Z[Tr K] * Delta is not inside Delta")
    return ring


def delta_to_scalars(delta: ZLattice) -> list[CycloNum]:
    """Basis scalars of a rank-2 lattice in C (structure n = 1)."""
    return [v.coords[0] for v in delta.basis_vectors()]


def build_root_lattices_case1(
    sys: ReflectionSystem,
    delta: ZLattice,
    paths: Optional[dict[int, Sequence[int]]] = None,
) -> ZLattice:
    """Case 1: every node reachable from node 0 along |c| = 1 edges.

    delta is a rank-2 lattice in C (RealStructure(1, N)) stable under the
    trace ring; the result is the K-invariant root lattice of rank 2n."""
    if delta.rank != 2:
        raise ValueError("delta must have rank 2")
    _check_delta_stable(sys, delta)
    adj = _unit_edges(sys)
    found = _bfs_paths(adj, 0, sys.s)
    if paths is None:
        paths = found
    else:
        for node, p in paths.items():
            if p[0] != 0 or p[-1] != node:
                raise ValueError(f"path for node {node} must run from node 0 to it")
            for a, b in zip(p, p[1:]):
                if b not in adj[a]:
                    raise PathConditionViolated(f"edge {a}-{b} is not a unit-weight edge")
        missing = set(range(sys.s)) - set(paths)
        if missing:
            raise ValueError(f"paths missing for nodes {sorted(missing)}")
    scalars = delta_to_scalars(delta)
    lam1 = sys.lattice_from_scalars(scalars, sys.gens[0].root)
    total = lam1
    for node in range(1, sys.s):
        total = total.sum(propagate_along_path(sys, lam1, list(paths[node])))
    return total


# ---------------------------------------------------------------------------
# root lattice construction, case 2 (chain graphs)
# ---------------------------------------------------------------------------


def _check_chain(sys: ReflectionSystem) -> list[CycloNum]:
    """Verify the graph is the chain 0-1-...-s-1; return the edge products."""
    cs = []
    for j in range(sys.s):
        for k in range(j + 1, sys.s):
            c = sys.c_pair(j, k)
            if k == j + 1:
                if c.is_zero():
                    raise ChainConditionViolated(f"missing chain edge {j}-{k}")
                cs.append(c)
            elif not c.is_zero():
                raise ChainConditionViolated(f"non-chain edge {j}-{k} present")
    return cs


def build_root_lattices_case2(
    sys: ReflectionSystem,
    delta1: Optional[ZLattice] = None,
    tau: Optional[CycloNum] = None,
) -> list[ZLattice]:
    """Case 2: chain graphs.  Enumerates all towers
    Delta_1 <= Delta_2 <= c_12^-1 Delta_1, ..., of trace-ring-stable rank-2
    lattices and emits Gamma = sum_l Delta_l (I-R_l)...(I-R_2) e_1."""
    edge_c = _check_chain(sys)
    ring = cyclic_product_ring(sys)
    scalar_structure = RealStructure(1, sys.field.order)
    if delta1 is None:
        if ring.rank() == 2:
            delta1 = ZLattice.from_vectors(
                scalar_structure, [CVec(sys.field, [b]) for b in ring.zmodule_basis]
            )
        else:
            if tau is None:
                raise ValueError("Z[Tr K] = Z: supply tau (or delta1) to fix Delta_1 = [1, tau]")
            delta1 = ZLattice.from_vectors(
                scalar_structure, [CVec(sys.field, [sys.field.one]), CVec(sys.field, [tau])]
            )
    _check_delta_stable(sys, delta1)

    def stable(lat: ZLattice) -> bool:
        return all(lat.scale_scalar(b).sum(lat) == lat for b in ring.zmodule_basis)

    towers: list[list[ZLattice]] = [[delta1]]
    for l in range(1, sys.s):
        c = edge_c[l - 1]
        new_towers = []
        for tower in towers:
            prev = tower[-1]
            upper = prev.scale_scalar(c.inverse())
            for mid in enumerate_between(prev, upper, predicate=stable):
                new_towers.append(tower + [mid])
        towers = new_towers

    # propagate the root vectors along the chain
    vectors = [sys.gens[0].root]
    for l in range(1, sys.s):
        vectors.append(sys.one_minus(l) * vectors[-1])
    out = []
    seen = set()
    for tower in towers:
        total = None
        for l, dl in enumerate(tower):
            piece = sys.lattice_from_scalars(delta_to_scalars(dl), vectors[l])
            total = piece if total is None else total.sum(piece)
        if total.key() not in seen:
            seen.add(total.key())
            out.append(total)
    out.sort(key=lambda L: L.key())
    return out


# ---------------------------------------------------------------------------
# s = n + 1
# ---------------------------------------------------------------------------


def subsystem(sys: ReflectionSystem, count: int) -> ReflectionSystem:
    return ReflectionSystem(sys.gens[:count], closure_cap=sys._closure_cap)


def build_lattices_s_n_plus_1(
    sys: ReflectionSystem,
    tau: Optional[CycloNum] = None,
) -> list[ZLattice]:
    """s = n+1 procedure: build the K'-invariant lattices from the first n
    generators, then keep the ones invariant under R_{n+1}."""
    if sys.s != sys.n + 1:
        raise WrongGeneratorCount(f"needs s = n + 1, got s={sys.s}, n={sys.n}")
    sub = subsystem(sys, sys.n)
    if not is_irreducible_system(sub):
        raise SubsystemReducible("the first n generators do not act irreducibly")
    # K' root lattices
    roots: list[ZLattice]
    try:
        adj = _unit_edges(sub)
        _bfs_paths(adj, 0, sub.s)
        case1 = True
    except PathConditionViolated:
        case1 = False
    if case1:
        ring = cyclic_product_ring(sub)
        scalar_structure = RealStructure(1, sys.field.order)
        if ring.rank() == 2:
            delta = ZLattice.from_vectors(
                scalar_structure, [CVec(sys.field, [b]) for b in ring.zmodule_basis]
            )
        else:
            if tau is None:
                raise ValueError("Z[Tr K'] = Z: supply tau for Delta = [1, tau]")
            delta = ZLattice.from_vectors(
                scalar_structure,
                [CVec(sys.field, [sys.field.one]), CVec(sys.field, [tau])],
            )
        roots = [build_root_lattices_case1(sub, delta)]
    else:
        roots = build_root_lattices_case2(sub, tau=tau)

    r_extra = sys.matrices[sys.n]
    out = []
    seen = set()
    for lam in roots:
        star = dual_star(lam, sub, check=False)
        lam_lines = [line_component(lam, sub, j) for j in range(sub.s)]

        def keeps_lines(gamma: ZLattice) -> bool:
            return all(
                line_component(gamma, sub, j) == lam_lines[j] for j in range(sub.s)
            )

        for gamma in enumerate_between(lam, star, predicate=keeps_lines):
            if gamma.apply_matrix(r_extra) == gamma:
                if gamma.key() not in seen:
                    seen.add(gamma.key())
                    out.append(gamma)
    out.sort(key=lambda L: L.key())
    return out


def is_irreducible_system(sys: ReflectionSystem) -> bool:
    """Complex irreducibility decided from the generators (commutant rank)."""
    from .linalg import nullspace

    field = sys.field
    n = sys.n
    rows = []
    for g in sys.matrices:
        for i in range(n):
            for j in range(n):
                row = [field.zero] * (n * n)
                for k in range(n):
                    row[k * n + j] = row[k * n + j] + g.entries[i][k]
                    row[i * n + k] = row[i * n + k] - g.entries[k][j]
                rows.append(row)
    return len(nullspace(CMat(field, rows))) == 1


# ---------------------------------------------------------------------------
# similarity
# ---------------------------------------------------------------------------


def lattices_similar(
    a: ZLattice, b: ZLattice, coeff_bound: int = SIMILARITY_COEFF_BOUND
) -> Optional[CycloNum]:
    """A scalar mu with mu * a = b, searched over small combinations of the
    (b intersect C v)-generators for a basis vector v of a; None if no
    candidate verifies."""
    if a.rank != b.rank:
        return None
    if a.is_zero() and b.is_zero():
        return a.structure.field.one
    v = a.basis_vectors()[0]
    target_line = intersect_with_complex_line(b, v)
    if target_line.is_zero():
        return None
    # scalars w/v for w in the line lattice
    ratios = []
    for w in target_line.basis_vectors():
        for cv, cw in zip(v.coords, w.coords):
            if cv:
                ratios.append(cw / cv)
                break
    field = a.structure.field
    candidates = []
    rng = range(-coeff_bound, coeff_bound + 1)
    for x, y in itertools.product(rng, repeat=2):
        if x == 0 and y == 0:
            continue
        mu = ratios[0] * x
        if len(ratios) > 1:
            mu = mu + ratios[1] * y
        elif y != 0:
            continue
        candidates.append(mu)
    seen = set()
    for mu in candidates:
        if mu.is_zero() or mu.coeffs in seen:
            continue
        seen.add(mu.coeffs)
        if a.apply_rational(a.structure.scalar_matrix(mu)) == b:
            return mu
    return None
