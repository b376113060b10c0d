import random
from fractions import Fraction

import pytest

from crysref.cyclo import CycloField
from crysref.errors import DimensionMismatch, ZeroRoot
from crysref.linalg import (
    CMat,
    CVec,
    Reflection,
    basis_vector,
    fixed_codim,
    inner,
    is_reflection_matrix,
    is_unitary,
    matrix_order,
    nullspace,
    reflection_data,
    reflection_matrix,
)

F3 = CycloField(3)
F4 = CycloField(4)
F8 = CycloField(8)


def rand_vec(field, dim, rng, span=3):
    return CVec(
        field,
        [
            field.element((k, rng.randint(-span, span)) for k in range(field.degree))
            for _ in range(dim)
        ],
    )


def test_inner_standard_basis():
    e1 = basis_vector(F4, 2, 0)
    e2 = basis_vector(F4, 2, 1)
    assert inner(e1, e1) == 1
    assert inner(e1, e2) == 0
    with pytest.raises(DimensionMismatch):
        inner(e1, basis_vector(F4, 3, 0))


def test_inner_conjugate_symmetry_and_sesquilinearity():
    rng = random.Random(5)
    for _ in range(40):
        u = rand_vec(F8, 3, rng)
        v = rand_vec(F8, 3, rng)
        w = rand_vec(F8, 3, rng)
        assert inner(u, v) == inner(v, u).conj()
        assert inner(u + v, w) == inner(u, w) + inner(v, w)
        c = F8.zeta(3) + F8.from_rational(2)
        assert inner(u.scale(c), v) == c * inner(u, v)
        assert inner(u, v.scale(c)) == c.conj() * inner(u, v)


def test_reflection_diag_minus_one():
    r = Reflection(root=basis_vector(F4, 2, 0), theta=F4.from_rational(-1), order=2)
    m = reflection_matrix(r)
    assert m == CMat.diagonal(F4, [-1, 1])
    assert is_reflection_matrix(m)


def test_reflection_diag_omega():
    r = Reflection(root=basis_vector(F3, 2, 0), theta=F3.zeta(), order=3)
    m = reflection_matrix(r)
    assert m == CMat.diagonal(F3, [F3.zeta(), F3.one])


def test_reflection_eigen_relation_and_mirror():
    rng = random.Random(9)
    for _ in range(25):
        root = rand_vec(F8, 3, rng)
        if inner(root, root).is_zero():
            continue
        r = Reflection(root=root, theta=F8.from_rational(-1), order=2)
        m = reflection_matrix(r)
        # R e = theta e
        assert m * root == root.scale(r.theta)
        # R fixes the orthogonal complement pointwise
        v = rand_vec(F8, 3, rng)
        proj = v - root.scale(inner(v, root) / inner(root, root))
        assert m * proj == proj
        assert is_reflection_matrix(m)


def test_reflection_unitary_and_order():
    roots = [
        (F4, CVec(F4, [F4.one, F4.zeta()]), F4.from_rational(-1), 2),
        (F3, CVec(F3, [F3.one, F3.zeta()]), F3.zeta(), 3),
    ]
    for field, root, theta, order in roots:
        r = Reflection(root=root, theta=theta, order=order)
        m = reflection_matrix(r)
        assert is_unitary(m)
        assert matrix_order(m) == order


def test_rank_one_image_property():
    rng = random.Random(13)
    root = CVec(F4, [F4.one, F4.zeta(), F4.from_rational(2)])
    r = Reflection(root=root, theta=F4.zeta(), order=4)
    m = reflection_matrix(r)
    ident = CMat.identity(F4, 3)
    for _ in range(20):
        v = rand_vec(F4, 3, rng)
        image = (ident - m) * v
        factor = (F4.one - r.theta) * inner(v, root) / inner(root, root)
        assert image == root.scale(factor)


def test_non_reflections():
    ident = CMat.identity(F4, 2)
    assert is_unitary(ident)
    assert fixed_codim(ident) == 0
    assert not is_reflection_matrix(ident)
    m = CMat.diagonal(F4, [-1, -1])
    assert is_unitary(m)
    assert fixed_codim(m) == 2
    assert not is_reflection_matrix(m)


def test_zero_root_rejected():
    # <e|e> = 0 is possible for nonzero e only if the form were indefinite;
    # here only the zero vector has zero norm, supplied directly.
    with pytest.raises(ZeroRoot):
        Reflection(root=CVec(F4, [F4.zero, F4.zero]), theta=F4.from_rational(-1), order=2)


def test_reflection_data_roundtrip():
    root = CVec(F3, [F3.one, F3.one - F3.zeta()])
    r = Reflection(root=root, theta=F3.zeta(), order=3)
    m = reflection_matrix(r)
    data = reflection_data(m)
    assert data is not None
    # recovered root spans the same line
    ratio = None
    for a, b in zip(data.root.coords, root.coords):
        if b:
            ratio = a / b
            break
    assert data.root == root.scale(ratio)
    assert data.theta == r.theta
    assert data.order == 3


def test_nullspace():
    m = CMat(F4, [[F4.one, F4.one], [F4.one, F4.one]])
    ker = nullspace(m)
    assert len(ker) == 1
    assert (m * ker[0]).is_zero()


def test_matrix_inverse_and_det():
    rng = random.Random(21)
    for _ in range(10):
        m = CMat(F4, [[rand_vec(F4, 1, rng).coords[0] for _ in range(3)] for _ in range(3)])
        if m.det().is_zero():
            continue
        assert (m * m.inverse()).is_identity()
