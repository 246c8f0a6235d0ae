import random

import pytest

from orthofactor.errors import (
    DimensionMismatch,
    NotIsotropic,
    NotOrthogonalPair,
    NotUnimodular,
    UnsupportedRing,
)
from orthofactor.rings import Ring, SquareMatrix
from orthofactor.spaces import (
    AmbientSpace,
    QuadraticSpace,
    check_transvection_data,
    complete_hyperbolic_pair,
    is_orthogonal,
    is_unimodular,
    standard_gram,
    unit_vector,
    vec,
    vec_add,
    vec_zero,
    witt_frame,
)
from orthofactor.generators import oe_matrix

from helpers import QQ, F3, F5, F7, Z9, Z25, rand_vector


def test_standard_gram_small_cases():
    assert standard_gram(QQ, 2) == SquareMatrix(QQ, [[0, 1], [1, 0]])
    assert standard_gram(QQ, 3) == SquareMatrix(QQ, [[2, 0, 0], [0, 0, 1], [0, 1, 0]])
    assert standard_gram(QQ, 1) == SquareMatrix(QQ, [[2]])


@pytest.mark.parametrize("ring", [QQ, Z9, Z25, F3, F5])
@pytest.mark.parametrize("n", range(1, 8))
def test_standard_gram_symmetric_unit_det(ring, n):
    g = standard_gram(ring, n)
    assert g == g.transpose()
    assert g.det().is_unit()


def test_is_orthogonal_examples():
    sp = QuadraticSpace.standard(Z9, 4)
    assert sp.is_orthogonal(SquareMatrix.identity(Z9, 4))
    rng = random.Random(0)
    for _ in range(10):
        z = Z9.of(rng.randrange(9))
        assert sp.is_orthogonal(oe_matrix(Z9, 4, 1, 3, z))
    sp2 = QuadraticSpace.standard(QQ, 2)
    shear = SquareMatrix.identity(QQ, 2).with_entries({(0, 1): QQ.of(1)})
    assert not sp2.is_orthogonal(shear)
    with pytest.raises(DimensionMismatch):
        is_orthogonal(SquareMatrix.identity(QQ, 3), sp2)


def test_degenerate_gram_rejected():
    from orthofactor.errors import NonUnitDeterminant

    with pytest.raises(NonUnitDeterminant):
        QuadraticSpace(SquareMatrix(Z9, [[3, 0], [0, 3]]))
    with pytest.raises(ValueError):
        QuadraticSpace(SquareMatrix(Z9, [[0, 1], [2, 0]]))


@pytest.mark.parametrize("ring", [QQ, Z9, F5])
def test_polarization_identity(ring):
    rng = random.Random(1)
    sp = QuadraticSpace.standard(ring, 5)
    for _ in range(40):
        a = rand_vector(ring, 5, rng)
        b = rand_vector(ring, 5, rng)
        assert sp.quad(vec_add(a, b)) == sp.quad(a) + sp.quad(b) + sp.bilinear(a, b)


def test_ambient_block_interleave_roundtrip():
    amb = AmbientSpace.standard(F5, 3, 2)
    assert amb.gram == standard_gram(F5, 7)
    rng = random.Random(2)
    v = rand_vector(F5, 7, rng)
    assert amb.deinterleave_vector(amb.interleave_vector(v)) == v
    m = SquareMatrix(F5, [[rng.randrange(5) for _ in range(7)] for _ in range(7)])
    back = amb.interleave_matrix(m)
    # conjugating by a permutation preserves the multiset of entries rowwise
    assert sorted(x.payload for row in m.rows for x in row) == sorted(
        x.payload for row in back.rows for x in row
    )


def test_unimodularity_by_ring():
    assert is_unimodular(QQ, vec(QQ, [0, 3]))
    assert not is_unimodular(QQ, vec(QQ, [0, 0]))
    assert is_unimodular(Z9, vec(Z9, [3, 2]))
    assert not is_unimodular(Z9, vec(Z9, [3, 6]))
    p9 = Ring.polynomial(Z9)
    assert is_unimodular(p9, (p9.of([3, 1]), p9.of([2])))
    assert not is_unimodular(p9, (p9.of([3, 6]), p9.of([0, 3])))


def test_check_transvection_data():
    amb = AmbientSpace.standard(F5, 3, 1)
    tot = amb.total
    u = unit_vector(F5, 5, 3)  # x_1 slot
    v = vec(F5, [1, 2, 0, 3, 0])  # f_1 coordinate zero keeps <u, v> = 0
    assert tot.bilinear(u, v).is_zero()
    r = check_transvection_data(tot, u, v)
    assert r == tot.quad(v)
    with pytest.raises(NotUnimodular):
        check_transvection_data(tot, vec_zero(F5, 5), v)
    bad_u = vec(F5, [1, 0, 0, 0, 0])  # q = 1
    with pytest.raises(NotIsotropic):
        check_transvection_data(tot, bad_u, v)
    bad_v = vec(F5, [0, 0, 0, 0, 1])
    with pytest.raises(NotOrthogonalPair):
        check_transvection_data(tot, u, bad_v)


def test_pairing_example_dim5():
    sp = QuadraticSpace.standard(F5, 5)
    u = vec(F5, [0, 1, 0, 0, 0])
    v = vec(F5, [1, 2, 0, 3, 4])
    assert sp.bilinear(u, v).is_zero()
    check_transvection_data(sp, u, v)


def test_complete_hyperbolic_pair_basic():
    sp = QuadraticSpace.standard(QQ, 4)
    u = unit_vector(QQ, 4, 0)
    w = complete_hyperbolic_pair(sp, u)
    assert w == unit_vector(QQ, 4, 1)
    u2 = vec_add(unit_vector(QQ, 4, 0), unit_vector(QQ, 4, 2))
    w2 = complete_hyperbolic_pair(sp, u2)
    assert sp.bilinear(u2, w2).is_one()
    assert sp.quad(w2).is_zero()


@pytest.mark.parametrize("ring", [QQ, F5, Ring.modular(15)])
def test_complete_hyperbolic_pair_random(ring):
    rng = random.Random(3)
    sp = QuadraticSpace.standard(ring, 6)
    checked = 0
    attempts = 0
    while checked < 100 and attempts < 10000:
        attempts += 1
        u = rand_vector(ring, 6, rng)
        if not is_unimodular(ring, u) or not sp.quad(u).is_zero():
            continue
        w = complete_hyperbolic_pair(sp, u)
        assert sp.bilinear(u, w).is_one()
        assert sp.quad(w).is_zero()
        checked += 1
    assert checked == 100


def test_complete_hyperbolic_pair_errors():
    sp = QuadraticSpace.standard(F5, 4)
    with pytest.raises(NotIsotropic):
        complete_hyperbolic_pair(sp, vec(F5, [1, 1, 0, 0]))
    sp9 = QuadraticSpace.standard(Z9, 4)
    with pytest.raises(UnsupportedRing):
        complete_hyperbolic_pair(sp9, unit_vector(Z9, 4, 0))


def test_witt_frame_standard_is_identity():
    sp = QuadraticSpace.standard(F5, 7)
    eps = witt_frame(sp, unit_vector(F5, 7, 1), unit_vector(F5, 7, 2))
    assert eps.is_identity()


@pytest.mark.parametrize("ring,dim", [(F5, 7), (F7, 7), (F5, 9), (F3, 7)])
def test_witt_frame_random_pairs(ring, dim):
    from helpers import rand_isotropic

    rng = random.Random(dim * ring.modulus)
    sp = QuadraticSpace.standard(ring, dim)
    for _ in range(10):
        u = rand_isotropic(sp, rng)
        w = complete_hyperbolic_pair(sp, u)
        eps = witt_frame(sp, u, w)
        assert eps.transpose() @ sp.gram @ eps == sp.gram
        assert tuple(eps.rows[k][1] for k in range(dim)) == u
        assert tuple(eps.rows[k][2] for k in range(dim)) == w


def test_witt_frame_restrictions():
    with pytest.raises(UnsupportedRing):
        witt_frame(QuadraticSpace.standard(QQ, 7), unit_vector(QQ, 7, 1), unit_vector(QQ, 7, 2))
    big = Ring.modular(17)
    with pytest.raises(UnsupportedRing):
        witt_frame(
            QuadraticSpace.standard(big, 7),
            unit_vector(big, 7, 1),
            unit_vector(big, 7, 2),
        )
    with pytest.raises(DimensionMismatch):
        witt_frame(QuadraticSpace.standard(F5, 4), unit_vector(F5, 4, 0), unit_vector(F5, 4, 1))
    with pytest.raises(NotOrthogonalPair):
        witt_frame(QuadraticSpace.standard(F5, 7), unit_vector(F5, 7, 1), unit_vector(F5, 7, 4))
