"""Cyclic products of a system of lines with multiplicities, the group graph,
and the combinatorial determinant of the operator S read off the graph."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional, Sequence

from .cyclo import CycloField, CycloNum, lcm, zeta_in_field
from .errors import DisconnectedOverlapGraph, IndexOutOfRange
from .linalg import CVec, inner

CYCLE_LENGTH_BOUND = 6


@dataclass
class LineSystem:
    """Lines C*e_j with multiplicities m_j >= 2.

    Root vectors need not be unit: every derived quantity divides by <e|e>,
    so all values agree with the unit-vector convention while staying inside
    the declared cyclotomic field.
    """

    lines: list[tuple[CVec, int]]

    def __post_init__(self):
        if not self.lines:
            raise ValueError("empty line system")
        self.field: CycloField = self.lines[0][0].field
        for e, m in self.lines:
            if e.is_zero():
                raise ValueError("zero root in line system")
            if m < 2:
                raise ValueError("multiplicity must be >= 2")
            zeta_in_field(self.field, m)  # raises if zeta_m is unavailable
        self._norms = [inner(e, e) for e, _ in self.lines]
        self._pair: dict[tuple[int, int], CycloNum] = {}

    def __len__(self) -> int:
        return len(self.lines)

    def root(self, j: int) -> CVec:
        return self.lines[j][0]

    def mult(self, j: int) -> int:
        return self.lines[j][1]

    def zeta_factor(self, j: int) -> CycloNum:
        """1 - e^(2 pi i / m_j)."""
        return self.field.one - zeta_in_field(self.field, self.mult(j))

    def pairing(self, j: int, k: int) -> CycloNum:
        """<e_j | e_k>, cached."""
        key = (j, k)
        v = self._pair.get(key)
        if v is None:
            v = inner(self.root(j), self.root(k))
            self._pair[key] = v
        return v


def cyclic_product(sys: LineSystem, indices: Sequence[int]) -> CycloNum:
    """c_{j1...jd} = h * prod(1 - zeta_{m_jl}), with h normalized for non-unit roots."""
    if not indices:
        raise IndexOutOfRange("empty index sequence")
    n = len(sys)
    for j in indices:
        if not 0 <= j < n:
            raise IndexOutOfRange(f"index {j} out of range 0..{n - 1}")
    seq = list(indices)
    num = sys.field.one
    for a, b in zip(seq, seq[1:] + seq[:1]):
        num = num * sys.pairing(a, b)
    den = sys.field.one
    for j in seq:
        den = den * sys._norms[j]
    out = num / den
    for j in seq:
        out = out * sys.zeta_factor(j)
    return out


@dataclass
class GroupGraph:
    """Weighted graph of a generating line system: node weights m_j, edge
    weights c_jk, and one fixed orientation per simple cycle with its weight."""

    nodes: list[tuple[int, int]]  # (id, m_j)
    edges: list[tuple[int, int, CycloNum]]  # j < k, weight c_jk
    oriented_simple_cycles: list[tuple[tuple[int, ...], CycloNum]]
    node_weights: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        self.edge_weight = {}
        for j, k, c in self.edges:
            self.edge_weight[(j, k)] = c
            self.edge_weight[(k, j)] = c
        self.node_weights = {j: m for j, m in self.nodes}
        self.cycle_weight = {tuple(seq): c for seq, c in self.oriented_simple_cycles}

    def adjacent(self, j: int) -> list[int]:
        return sorted(k for (a, k) in self.edge_weight if a == j)

    def is_connected(self) -> bool:
        ids = [j for j, _ in self.nodes]
        if not ids:
            return True
        seen = {ids[0]}
        stack = [ids[0]]
        while stack:
            v = stack.pop()
            for w in self.adjacent(v):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(ids)


def _canonical_cycle(seq: tuple[int, ...]) -> tuple[int, ...]:
    """Rotate so the smallest node leads; orientation is kept as given."""
    lo = seq.index(min(seq))
    return seq[lo:] + seq[:lo]


def build_graph(sys: LineSystem, cycle_bound: int = CYCLE_LENGTH_BOUND) -> GroupGraph:
    n = len(sys)
    nodes = [(j, sys.mult(j)) for j in range(n)]
    edges = []
    adj: dict[int, list[int]] = {j: [] for j in range(n)}
    for j in range(n):
        for k in range(j + 1, n):
            c = cyclic_product(sys, [j, k])
            if not c.is_zero():
                edges.append((j, k, c))
                adj[j].append(k)
                adj[k].append(j)
    cycles: list[tuple[tuple[int, ...], CycloNum]] = []
    seen: set[tuple[int, ...]] = set()

    def extend(path: list[int]):
        if len(path) > cycle_bound:
            return
        head = path[0]
        for nxt in adj[path[-1]]:
            if nxt == head and len(path) >= 3:
                canon = _canonical_cycle(tuple(path))
                rev = _canonical_cycle(tuple([canon[0]] + list(reversed(canon[1:]))))
                if canon in seen or rev in seen:
                    continue
                # fix orientation: the lexicographically smaller sequence
                chosen = min(canon, rev)
                seen.add(chosen)
                cycles.append((chosen, cyclic_product(sys, list(chosen))))
            elif nxt > head and nxt not in path:
                extend(path + [nxt])

    for start in range(n):
        extend([start])
    cycles.sort(key=lambda t: (len(t[0]), t[0]))
    return GroupGraph(nodes=nodes, edges=edges, oriented_simple_cycles=cycles)


def det_S_from_graph(g: GroupGraph) -> CycloNum:
    """det S = sum over permutations sigma of sgn(sigma) * a_sigma, where
    a_sigma is the product of the cyclic products of the cycles of sigma.

    Only permutations all of whose cycles are cycles of the graph contribute,
    so the sum is taken over vertex-disjoint cycle covers.
    """
    ids = sorted(j for j, _ in g.nodes)
    if not ids:
        raise ValueError("empty graph")
    if g.edges:
        field = g.edges[0][2].field
    elif g.oriented_simple_cycles:
        field = g.oriented_simple_cycles[0][1].field
    else:
        # edgeless graph: the field only needs the node 1-cycles c_j = 1 - zeta_m
        order = 1
        for _, m in g.nodes:
            order = lcm(order, m)
        field = CycloField(order)

    options: list[tuple[frozenset, CycloNum, int]] = []
    for j, m in g.nodes:
        c_node = field.one - zeta_in_field(field, m)
        options.append((frozenset([j]), c_node, +1))
    for j, k, c in g.edges:
        options.append((frozenset([j, k]), c, -1))
    for seq, c in g.oriented_simple_cycles:
        sgn = 1 if len(seq) % 2 else -1
        options.append((frozenset(seq), c, sgn))
        # reverse orientation via c_sigma * c_sigma^-1 = prod of edge weights
        prod = field.one
        for a, b in zip(seq, seq[1:] + (seq[0],)):
            prod = prod * g.edge_weight[(a, b) if (a, b) in g.edge_weight else (b, a)]
        options.append((frozenset(seq), prod / c, sgn))

    total = field.zero
    ids_set = frozenset(ids)

    def walk(remaining: frozenset, acc: CycloNum, sign: int):
        nonlocal total
        if not remaining:
            total = total + (acc if sign > 0 else -acc)
            return
        v = min(remaining)
        for support, weight, sgn in options:
            if v in support and support <= remaining:
                walk(remaining - support, acc * weight, sign * sgn)

    walk(ids_set, field.one, +1)
    return total


def line_systems_isometric(a: LineSystem, b: LineSystem) -> bool:
    """Equality of all cyclic products, tested on the sufficient set: node and
    pair products plus one product per fundamental cycle of the edge graph."""
    if len(a) != len(b):
        return False
    n = len(a)
    for j in range(n):
        if a.mult(j) != b.mult(j):
            return False
        for k in range(j + 1, n):
            if cyclic_product(a, [j, k]) != cyclic_product(b, [j, k]):
                return False
    # identical zero patterns now guaranteed; walk a spanning forest and
    # compare the fundamental cycle products
    adj: dict[int, list[int]] = {j: [] for j in range(n)}
    for j in range(n):
        for k in range(n):
            if j != k and not a.pairing(j, k).is_zero():
                adj[j].append(k)
    parent: dict[int, Optional[int]] = {}
    order: list[int] = []
    for root in range(n):
        if root in parent:
            continue
        parent[root] = None
        queue = [root]
        while queue:
            v = queue.pop(0)
            order.append(v)
            for w in adj[v]:
                if w not in parent:
                    parent[w] = v
                    queue.append(w)

    def tree_path(u: int, v: int) -> list[int]:
        up, vp = [u], [v]
        while parent[up[-1]] is not None:
            up.append(parent[up[-1]])
        while parent[vp[-1]] is not None:
            vp.append(parent[vp[-1]])
        common = None
        uset = {x: i for i, x in enumerate(up)}
        for i, x in enumerate(vp):
            if x in uset:
                common = x
                break
        iu = uset[common]
        iv = vp.index(common)
        return up[: iu + 1] + list(reversed(vp[:iv]))

    for j in range(n):
        for k in adj[j]:
            if k < j or parent.get(k) == j or parent.get(j) == k:
                continue
            cycle = tree_path(j, k)
            if cyclic_product(a, cycle) != cyclic_product(b, cycle):
                return False
    return True


def rescale_factors(a: LineSystem, b: LineSystem, base: int = 0) -> list[CycloNum]:
    """Scalars lambda_j with Gram({lambda_j e_j}) = Gram({e'_j}).

    Requires equal cyclic products, equal root norms per index, and a
    connected overlap graph.  lambda_j is the product of pairing ratios along
    a path from j to the base index.
    """
    n = len(a)
    if len(b) != n:
        raise ValueError("systems must share the index set")
    for j in range(n):
        if a._norms[j] != b._norms[j]:
            raise ValueError(
                "rescale_factors requires matching root norms per index "
                "(rescale inputs to a common normalization first)"
            )
    adj: dict[int, list[int]] = {j: [] for j in range(n)}
    for j in range(n):
        for k in range(n):
            if j != k and not a.pairing(j, k).is_zero():
                adj[j].append(k)
    lam: dict[int, CycloNum] = {base: a.field.one}
    queue = [base]
    while queue:
        v = queue.pop(0)
        for w in adj[v]:
            if w not in lam:
                # path w -> v contributes <e'_w|e'_v>/<e_w|e_v>
                lam[w] = lam[v] * (b.pairing(w, v) / a.pairing(w, v))
                queue.append(w)
    if len(lam) != n:
        raise DisconnectedOverlapGraph(
            f"only {len(lam)} of {n} nodes reachable from base {base}"
        )
    return [lam[j] for j in range(n)]
