import itertools
import random
from fractions import Fraction

import pytest

from crysref.cyclo import CycloField
from crysref.errors import DegenerateLattice, NotASublattice, StructureMismatch
from crysref.linalg import CMat, CVec, basis_vector
from crysref.zmod import (
    RealStructure,
    ZLattice,
    enumerate_between,
    hnf,
    in_modular_strip,
    int_det_abs,
    int_kernel,
    intersect_with_complex_line,
    modular_reduce,
    preimage,
    quotient,
    rank2_lattice_in_C,
    snf,
)

S24 = RealStructure(2, 4)
F4 = S24.field


def rand_int_matrix(rng, rows, cols, span=6):
    return [[rng.randint(-span, span) for _ in range(cols)] for _ in range(rows)]


def mat_mul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(r, c)) for c in bt] for r in a]


# -- normal forms -----------------------------------------------------------


def test_hnf_identity():
    h, u = hnf([[1, 0], [0, 1]])
    assert h == [[1, 0], [0, 1]]
    assert int_det_abs(u) == 1


def test_snf_cartan_a2():
    # oracle: hand reduction of [[2,-1],[-1,2]] gives diag(1,3)
    d, u, v = snf([[2, -1], [-1, 2]])
    assert [d[0][0], d[1][1]] == [1, 3]
    assert int_det_abs(u) == 1 and int_det_abs(v) == 1
    assert mat_mul(mat_mul(u, [[2, -1], [-1, 2]]), v) == d


def test_snf_diag_2_2():
    d, _, _ = snf([[2, 0], [0, 2]])
    assert [d[0][0], d[1][1]] == [2, 2]


def test_hnf_factorization_and_unimodularity():
    rng = random.Random(2)
    for _ in range(50):
        m = rand_int_matrix(rng, rng.randint(1, 4), rng.randint(1, 5))
        h, u = hnf(m)
        assert int_det_abs(u) == 1
        full = mat_mul(m, u)
        # h is full with zero columns dropped
        nonzero = [
            [full[i][j] for j in range(len(full[0])) if any(full[r][j] for r in range(len(full)))]
            for i in range(len(full))
        ]
        assert h == nonzero


def test_hnf_canonical_under_unimodular_transform():
    rng = random.Random(4)
    for _ in range(40):
        m = rand_int_matrix(rng, 3, 3)
        # random unimodular: product of elementary column ops
        u = [[1 if i == j else 0 for j in range(3)] for i in range(3)]
        for _ in range(6):
            a, b = rng.sample(range(3), 2)
            c = rng.randint(-3, 3)
            for row in u:
                row[a] += c * row[b]
        h1, _ = hnf(m)
        h2, _ = hnf(mat_mul(m, u))
        assert h1 == h2


def test_snf_divisibility_and_invariance():
    rng = random.Random(6)
    for _ in range(40):
        m = rand_int_matrix(rng, rng.randint(1, 4), rng.randint(1, 4))
        d, u, v = snf(m)
        assert int_det_abs(u) == 1 and int_det_abs(v) == 1
        assert mat_mul(mat_mul(u, m), v) == d
        diag = [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]
        for a, b in zip(diag, diag[1:]):
            if a:
                assert b % a == 0
            else:
                assert b == 0
        # invariant factors unchanged under unimodular pre/post multiplication
        w = [[1 if i == j else 0 for j in range(len(m))] for i in range(len(m))]
        for _ in range(4):
            a, b = (rng.sample(range(len(m)), 2) if len(m) > 1 else (0, 0))
            if a != b:
                c = rng.randint(-2, 2)
                for j in range(len(m)):
                    w[a][j] += c * w[b][j]
        d2, _, _ = snf(mat_mul(w, m))
        diag2 = [d2[i][i] for i in range(min(len(d2), len(d2[0]) if d2 else 0))]
        assert diag == diag2


def test_int_kernel_saturated():
    ker = int_kernel([[2, -4]])
    assert len(ker) == 2 and len(ker[0]) == 1
    # saturated: (2,1) not (4,2)
    col = [ker[0][0], ker[1][0]]
    assert sorted(map(abs, col)) == [1, 2]


# -- lattices ---------------------------------------------------------------


def gauss_lattice(structure, vecs):
    return ZLattice.from_vectors(structure, vecs)


def full_gaussian_lattice():
    i_ = F4.zeta()
    e1 = basis_vector(F4, 2, 0)
    e2 = basis_vector(F4, 2, 1)
    return gauss_lattice(S24, [e1, e1.scale(i_), e2, e2.scale(i_)])


def test_member_generated():
    L = full_gaussian_lattice()
    e1 = basis_vector(F4, 2, 0)
    assert L.member(e1)
    assert not L.member(e1.scale(Fraction(1, 2)))


def test_equal_canonical_form():
    i_ = F4.zeta()
    e1 = basis_vector(F4, 2, 0)
    L1 = gauss_lattice(S24, [e1, e1.scale(i_)])
    L2 = gauss_lattice(S24, [e1.scale(i_), e1, e1 + e1.scale(i_)])
    assert L1 == L2


def test_index_by_coset_enumeration_oracle():
    i_ = F4.zeta()
    e1 = basis_vector(F4, 2, 0)
    big = gauss_lattice(S24, [e1, e1.scale(i_)])
    small = gauss_lattice(S24, [e1.scale(2), e1.scale(i_ * 2)])
    assert small.index_in(big) == 4
    # oracle: count residues of big points in a box modulo small
    reps = set()
    for a, b in itertools.product(range(-2, 3), repeat=2):
        v = e1.scale(a).__add__(e1.scale(i_).scale(b))
        reps.add(small.reduce_mod(S24.vec_to_rational(v)))
    assert len(reps) == 4


def test_sum_and_index_axioms_random():
    rng = random.Random(8)
    i_ = F4.zeta()
    e1 = basis_vector(F4, 2, 0)
    e2 = basis_vector(F4, 2, 1)
    gens = [e1, e1.scale(i_), e2, e2.scale(i_)]
    for _ in range(30):
        vs = [
            sum(
                (g.scale(rng.randint(-2, 2)) for g in gens),
                CVec(F4, [F4.zero, F4.zero]),
            )
            for _ in range(5)
        ]
        L = gauss_lattice(S24, vs)
        full = full_gaussian_lattice()
        assert full.contains_lattice(L)
        assert (L + L) == L
        for v in vs:
            assert L.member(v)


def test_intersect_with_complex_line():
    L = full_gaussian_lattice()
    e1 = basis_vector(F4, 2, 0)
    i_ = F4.zeta()
    line = intersect_with_complex_line(L, e1)
    assert line == gauss_lattice(S24, [e1, e1.scale(i_)])
    assert line.rank == 2
    # lattice with nothing on a generic line
    L2 = gauss_lattice(S24, [e1, e1.scale(i_)])
    e2 = basis_vector(F4, 2, 1)
    assert intersect_with_complex_line(L2, e2).is_zero()


def test_preimage_identity_and_scaling():
    L = full_gaussian_lattice()
    ident = S24.realify(CMat.identity(F4, 2))
    assert preimage([(ident, L)], S24) == L
    twice = [[x * 2 for x in row] for row in ident]
    half = ZLattice.from_rational_columns(
        S24, [[c / 2 for c in col] for col in L.basis_columns_rational()]
    )
    assert preimage([(twice, L)], S24) == half


def test_quotient_klein_four():
    i_ = F4.zeta()
    e1 = basis_vector(F4, 2, 0)
    small = gauss_lattice(S24, [e1, e1.scale(i_)])
    big = ZLattice.from_rational_columns(
        S24, [[c / 2 for c in col] for col in small.basis_columns_rational()]
    )
    q = quotient(big, small)
    assert q.invariant_factors == [2, 2]
    assert q.order == 4
    assert len(q.coset_reps) == 4
    reps = {small.reduce_mod(S24.vec_to_rational(r)) for r in q.coset_reps}
    assert len(reps) == 4
    subs = enumerate_between(small, big)
    assert len(subs) == 5  # subgroup count of the Klein four-group
    assert all(s.contains_lattice(small) and big.contains_lattice(s) for s in subs)


def test_enumerate_between_trivial():
    L = full_gaussian_lattice()
    assert enumerate_between(L, L) == [L]


def test_structure_mismatch():
    other = RealStructure(3, 4)
    L1 = full_gaussian_lattice()
    e1 = basis_vector(F4, 3, 0)
    L2 = ZLattice.from_vectors(other, [e1])
    with pytest.raises(StructureMismatch):
        L1.sum(L2)


def test_not_a_sublattice():
    i_ = F4.zeta()
    e1 = basis_vector(F4, 2, 0)
    L1 = gauss_lattice(S24, [e1, e1.scale(i_)])
    L3 = gauss_lattice(S24, [e1.scale(Fraction(1, 3))])
    with pytest.raises(NotASublattice):
        L3.index_in(L1)


# -- modular strip ----------------------------------------------------------


def test_modular_reduce_examples():
    i_ = F4.zeta()
    one4 = F4.one
    assert modular_reduce(one4, i_) == i_
    assert modular_reduce(one4 * 2, i_ * 2) == i_
    # [1, zeta_6] reduces to omega = zeta_3
    F12 = CycloField(12)
    z6 = F12.zeta(2)
    w = F12.zeta(4)
    assert modular_reduce(F12.one, z6) == w


def test_modular_strip_membership():
    i_ = F4.zeta()
    assert in_modular_strip(i_)
    F12 = CycloField(12)
    assert in_modular_strip(F12.zeta(4))  # omega, on the boundary Re = -1/2
    assert not in_modular_strip(F12.zeta(2))  # zeta_6: |z| = 1 with Re > 0
    assert not in_modular_strip(-i_)


def test_modular_reduce_idempotent_and_similarity_invariant():
    rng = random.Random(17)
    F12 = CycloField(12)
    count = 0
    while count < 60:
        a = F12.element((k, rng.randint(-3, 3)) for k in range(4))
        b = F12.element((k, rng.randint(-3, 3)) for k in range(4))
        if a.is_zero() or b.is_zero():
            continue
        try:
            tau = modular_reduce(a, b)
        except DegenerateLattice:
            continue
        count += 1
        assert in_modular_strip(tau)
        assert modular_reduce(F12.one, tau) == tau
        c = F12.element((k, rng.randint(-2, 2)) for k in range(4))
        if not c.is_zero():
            assert modular_reduce(a * c, b * c) == tau


def test_modular_reduce_degenerate():
    with pytest.raises(DegenerateLattice):
        modular_reduce(F4.one, F4.from_rational(3))


def test_rank2_lattice_in_C():
    i_ = F4.zeta()
    L = rank2_lattice_in_C(F4.one, i_)
    assert L.rank == 2
    assert L.member(CVec(F4, [F4.one + i_]))
