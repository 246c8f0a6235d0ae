import itertools
import random

import pytest

from orthofactor.errors import (
    DetNotOne,
    FormMismatch,
    NonUnitDeterminant,
    UnsupportedRing,
    UnsupportedShape,
    UnsupportedToken,
)
from orthofactor.rings import SquareMatrix, matrix_poly_eval
from orthofactor.spaces import (
    AmbientSpace,
    QuadraticSpace,
    unit_vector,
    vec,
    vec_zero,
)
from orthofactor.generators import (
    ConjToken,
    DserToken,
    EichlerToken,
    EvenElementaryToken,
    OddElementaryToken,
    TransvectionToken,
    Word,
    partner_index,
    sigma_matrix,
)
from orthofactor.factor import (
    conjugate_word,
    elementarize_alt_block,
    elementarize_gl_block,
    factor_e1_to_oe,
    factor_e2_to_oe,
    factor_oe_to_transvections,
    factor_sigma_axis,
    factor_sigma_full,
    homotopy_lift,
    odd_correspondence,
    split_dser,
)

from helpers import (
    F3,
    F5,
    F7,
    QQ,
    Z9,
    Z25,
    rand_element,
    rand_isotropic,
    rand_orthogonal,
    rand_orthogonal_to,
    rand_vector,
    sigma_triple,
)


def all_vectors(ring, n):
    return [vec(ring, c) for c in itertools.product(range(ring.modulus), repeat=n)]


# -- transvections into even elementary words ------------------------------------


@pytest.mark.parametrize("n", [2, 4])
def test_e1_e2_exhaustive_f3(n):
    amb = AmbientSpace.standard(F3, n, 1)
    for w in all_vectors(F3, n):
        c1 = factor_e1_to_oe(amb, w)
        c2 = factor_e2_to_oe(amb, w)
        assert c1.verified and c2.verified
        assert c1.re_verify() and c2.re_verify()


def test_e1_token_layout_n2():
    amb = AmbientSpace.standard(QQ, 2, 1)
    cert = factor_e1_to_oe(amb, vec(QQ, [4, 6]))
    toks = cert.word.tokens
    assert [(t.i, t.j, t.z) for t in toks] == [
        (1, 4, QQ.of(-2)),
        (2, 4, QQ.of(-6)),
        (1, 4, QQ.of(-2)),
    ]
    assert cert.provenance == ("Eq1", "Eq1", "Eq1")


def test_e1_zero_gives_identity_word():
    amb = AmbientSpace.standard(F5, 4, 1)
    cert = factor_e1_to_oe(amb, vec_zero(F5, 4))
    assert cert.target.is_identity()
    assert all(t.z.is_zero() for t in cert.word.tokens)


@pytest.mark.parametrize("ring", [QQ, Z9, Z25, F5])
def test_e1_e2_random_n6(ring):
    rng = random.Random(30)
    amb = AmbientSpace.standard(ring, 6, 1)
    for _ in range(25):
        w = rand_vector(ring, 6, rng)
        assert factor_e1_to_oe(amb, w).verified
        assert factor_e2_to_oe(amb, w).verified


def test_e_factor_rejects_bad_space():
    with pytest.raises(UnsupportedShape):
        factor_e1_to_oe(AmbientSpace.standard(QQ, 3, 1), vec_zero(QQ, 3))
    with pytest.raises(UnsupportedShape):
        factor_e1_to_oe(AmbientSpace.standard(QQ, 2, 2), vec_zero(QQ, 2))


# -- oe as commutator ---------------------------------------------------------------


def test_oe_commutator_zero():
    amb = AmbientSpace.standard(QQ, 4, 1)
    cert = factor_oe_to_transvections(amb, 1, 3, 0)
    assert cert.target.is_identity()
    assert len(cert.word) == 4


def test_oe_commutator_example_and_primary_variant():
    amb = AmbientSpace.standard(QQ, 4, 1)
    cert = factor_oe_to_transvections(amb, 1, 3, 1)
    assert cert.verified
    # the first-listed placement w1 = -z e_i, w2 = +e_{p(j)} verifies directly
    assert "w1=-z" in cert.provenance[0] and "w2=+e" in cert.provenance[0]
    g = cert.word.tokens[0]
    assert isinstance(g, TransvectionToken) and g.which == 1
    assert g.w == vec(QQ, [-1, 0, 0, 0])


def test_oe_commutator_random_z25():
    rng = random.Random(31)
    amb = AmbientSpace.standard(Z25, 4, 1)
    pairs = [(i, j) for i in range(1, 5) for j in range(1, 5) if i != j and i != partner_index(4, j)]
    for _ in range(20):
        i, j = rng.choice(pairs)
        cert = factor_oe_to_transvections(amb, i, j, rand_element(Z25, rng))
        assert cert.verified


# -- splitting ------------------------------------------------------------------------


def test_split_single_entry_is_single_token():
    amb = AmbientSpace.standard(Z9, 3, 2)
    mat = [[0, 0, 0], [0, 7, 0]]
    cert = split_dser(amb, mat)
    assert len(cert.word) == 1
    assert cert.verified


def test_split_zero_map_empty_word():
    amb = AmbientSpace.standard(Z9, 2, 1)
    cert = split_dser(amb, [[0, 0]])
    assert len(cert.word) == 0 and cert.target.is_identity()


def test_split_two_entries_shape():
    amb = AmbientSpace.standard(QQ, 2, 1)
    cert = split_dser(amb, [[4, 6]])
    toks = cert.word.tokens
    assert len(toks) == 3
    assert toks[0] is toks[2]
    assert toks[0].mat == ((QQ.of(2), QQ.of(0)),)
    assert toks[1].mat == ((QQ.of(0), QQ.of(6)),)


@pytest.mark.parametrize("ring", [QQ, Z9, Z25, F3, F5])
@pytest.mark.parametrize("dual", [False, True])
def test_split_random(ring, dual):
    rng = random.Random(32)
    amb = AmbientSpace.standard(ring, 3, 2)
    for _ in range(10):
        mat = [[rand_element(ring, rng) for _ in range(3)] for _ in range(2)]
        cert = split_dser(amb, mat, dual)
        assert cert.verified
        for t in cert.word.tokens:
            assert sum(0 if x.is_zero() else 1 for row in t.mat for x in row) <= 1


# -- odd correspondence ------------------------------------------------------------


def test_odd_correspondence_display():
    amb = AmbientSpace.standard(QQ, 1, 1)
    token = OddElementaryToken(amb, 1, 1, 1)
    assert token.matrix() == SquareMatrix(QQ, [[1, 0, 1], [-2, 1, -1], [0, 0, 1]])
    cert = odd_correspondence(token)
    assert cert.verified
    inner = cert.word.tokens[0]
    assert isinstance(inner, DserToken) and not inner.dual
    assert inner.mat == ((QQ.of(-2),),)


def test_odd_correspondence_zero():
    amb = AmbientSpace.standard(F5, 1, 2)
    cert = odd_correspondence(OddElementaryToken(amb, 2, 1, 0))
    assert cert.target.is_identity()


@pytest.mark.parametrize("ring", [F3, F5, Z25])
def test_odd_correspondence_exhaustive(ring):
    for m in (1, 2, 3):
        amb = AmbientSpace.standard(ring, 1, m)
        for kind in (1, 2):
            for i in range(1, m + 1):
                for lam in ring.elements():
                    assert odd_correspondence(OddElementaryToken(amb, kind, i, lam)).verified


def test_odd_correspondence_rejects_two_index_kinds():
    amb = AmbientSpace.standard(F5, 1, 2)
    with pytest.raises(UnsupportedToken):
        odd_correspondence(OddElementaryToken(amb, 3, 1, 1, 2))


# -- sigma axis -------------------------------------------------------------------


def test_sigma_axis_empty_cases():
    amb = AmbientSpace.standard(F5, 1, 3)
    u = unit_vector(F5, 7, 1)
    assert len(factor_sigma_axis(amb, u, vec_zero(F5, 7)).word) == 0
    assert len(factor_sigma_axis(amb, u, unit_vector(F5, 7, 1, 3)).word) == 0


def test_sigma_axis_z_supported_five_tokens():
    amb = AmbientSpace.standard(F5, 1, 3)
    u = unit_vector(F5, 7, 1)
    v = unit_vector(F5, 7, 0, 2)
    cert = factor_sigma_axis(amb, u, v)
    assert cert.verified and len(cert.word) == 5
    assert cert.provenance == ("SigmaAxis",) * 5


@pytest.mark.parametrize("ring", [F5, Z9, QQ])
def test_sigma_axis_all_slot_combinations(ring):
    amb = AmbientSpace.standard(ring, 1, 3)
    tot = amb.total
    for uk in range(1, 7):
        u = unit_vector(ring, 7, uk, 2 if ring is not QQ else 1)
        for vk in range(7):
            for c in (1, 2):
                v = unit_vector(ring, 7, vk, c)
                if not tot.bilinear(u, v).is_zero():
                    continue
                assert factor_sigma_axis(amb, u, v).verified


def test_sigma_axis_shape_errors():
    amb = AmbientSpace.standard(F5, 1, 3)
    with pytest.raises(UnsupportedShape):
        # valid transvection data but u not a single-slot vector
        u = vec(F5, [0, 1, 0, 1, 0, 0, 0])
        factor_sigma_axis(amb, u, vec_zero(F5, 7))
    with pytest.raises(UnsupportedShape):
        u = unit_vector(F5, 7, 1)
        v = vec(F5, [1, 0, 0, 1, 0, 0, 0])  # two coordinates
        factor_sigma_axis(amb, u, v)


# -- elementarization ---------------------------------------------------------------


def test_elementarize_gl_identity_empty():
    amb = AmbientSpace.standard(F5, 1, 3)
    cert = elementarize_gl_block(amb, SquareMatrix.identity(F5, 3).rows)
    assert len(cert.word) == 0


def test_elementarize_gl_single_elementary():
    amb = AmbientSpace.standard(QQ, 1, 3)
    a = SquareMatrix.identity(QQ, 3).with_entries({(0, 1): QQ.of(5)})
    cert = elementarize_gl_block(amb, a.rows)
    assert cert.verified
    assert len(cert.word) == 1
    tok = cert.word.tokens[0]
    assert (tok.fkind, tok.i, tok.j, tok.lam) == (3, 1, 2, QQ.of(5))


def test_elementarize_gl_unipotent_and_random_sl():
    rng = random.Random(33)
    for ring in (F5, F7, QQ):
        amb = AmbientSpace.standard(ring, 1, 3)
        # I + u' v''^T with u'.v'' = 0
        a = SquareMatrix.identity(ring, 3).with_entries({(0, 2): ring.of(3)})
        assert elementarize_gl_block(amb, a.rows).verified
        for _ in range(10):
            m = SquareMatrix.identity(ring, 3)
            for _ in range(6):
                i, j = rng.sample(range(3), 2)
                m = m @ SquareMatrix.identity(ring, 3).with_entries(
                    {(i, j): rand_element(ring, rng, 4)}
                )
            assert elementarize_gl_block(amb, m.rows).verified


def test_elementarize_gl_rejections():
    amb = AmbientSpace.standard(F5, 1, 2)
    with pytest.raises(DetNotOne):
        elementarize_gl_block(amb, [[2, 0], [0, 1]])
    with pytest.raises(NonUnitDeterminant):
        elementarize_gl_block(amb, [[0, 0], [0, 1]])
    amb9 = AmbientSpace.standard(Z9, 1, 2)
    with pytest.raises(UnsupportedRing):
        elementarize_gl_block(amb9, [[1, 0], [0, 1]])


def test_elementarize_alt():
    amb = AmbientSpace.standard(Z9, 1, 3)
    z = Z9.zero()
    cert = elementarize_alt_block(amb, [[z] * 3 for _ in range(3)], 1)
    assert len(cert.word) == 0
    a = Z9.of(4)
    single = [[z, a, z], [-a, z, z], [z, z, z]]
    cert = elementarize_alt_block(amb, single, 1)
    assert len(cert.word) == 1 and cert.word.tokens[0].fkind == 4
    cert = elementarize_alt_block(amb, single, 2)
    assert cert.word.tokens[0].fkind == 5
    rng = random.Random(34)
    for kind in (1, 2):
        for _ in range(10):
            c12, c13, c23 = (rand_element(Z9, rng) for _ in range(3))
            mat = [[z, c12, c13], [-c12, z, c23], [-c13, -c23, z]]
            assert elementarize_alt_block(amb, mat, kind).verified


# -- full pipeline -----------------------------------------------------------------


def test_sigma_full_zero_v():
    amb = AmbientSpace.standard(F5, 1, 3)
    u = rand_isotropic(amb, random.Random(35))
    cert = factor_sigma_full(amb, u, vec_zero(F5, 7))
    assert len(cert.word) == 0


def test_sigma_full_standard_slot_no_conjugation():
    amb = AmbientSpace.standard(F5, 1, 3)
    u = unit_vector(F5, 7, 1)
    v = vec(F5, [2, 0, 0, 1, 3, 0, 4])
    cert = factor_sigma_full(amb, u, v)
    assert cert.verified
    assert all(not isinstance(t, ConjToken) for t in cert.word.tokens)


@pytest.mark.parametrize("ring,m", [(F5, 3), (F7, 3), (F5, 4)])
def test_sigma_full_random(ring, m):
    rng = random.Random(36 + m)
    amb = AmbientSpace.standard(ring, 1, m)
    for _ in range(10):
        u = rand_isotropic(amb, rng)
        v = rand_orthogonal_to(amb, u, rng)
        cert = factor_sigma_full(amb, u, v)
        assert cert.verified
        assert cert.re_verify()


def test_sigma_full_restrictions():
    with pytest.raises(UnsupportedShape):
        factor_sigma_full(AmbientSpace.standard(F5, 1, 2), unit_vector(F5, 5, 1), vec_zero(F5, 5))
    with pytest.raises(UnsupportedRing):
        factor_sigma_full(AmbientSpace.standard(QQ, 1, 3), unit_vector(QQ, 7, 1), vec_zero(QQ, 7))


# -- conjugation transport ----------------------------------------------------------


def test_conjugate_word_identity_eps():
    rng = random.Random(37)
    amb = AmbientSpace.standard(F5, 1, 3)
    u, v, _ = sigma_triple(amb, rng)
    word = Word(amb, [EichlerToken(amb, u, v)])
    out = conjugate_word(word, SquareMatrix.identity(F5, 7), amb)
    assert out.tokens[0].u == u and out.tokens[0].v == v


def test_conjugate_sigma_against_direct_matrices():
    rng = random.Random(38)
    amb = AmbientSpace.standard(Z9, 3, 2)
    tot = amb.total
    for _ in range(10):
        u, v, _ = sigma_triple(amb, rng)
        eps = rand_orthogonal(amb, rng)
        word = Word(amb, [EichlerToken(amb, u, v)])
        out = conjugate_word(word, eps, amb)
        tok = out.tokens[0]
        assert isinstance(tok, EichlerToken)
        assert tok.u == eps.inverse().apply(u)
        assert out.eval() == eps.inverse() @ word.eval() @ eps


def test_conjugate_e1_block_diagonal_changes_form():
    rng = random.Random(39)
    while True:
        eq = SquareMatrix(Z9, [[rng.randrange(9) for _ in range(2)] for _ in range(2)])
        if eq.det().is_unit():
            break
    src = AmbientSpace.standard(Z9, 2, 1)
    dst = AmbientSpace(QuadraticSpace(eq.transpose() @ src.q.gram @ eq), 1)
    eps = SquareMatrix.identity(Z9, 4).with_entries(
        {(a, b): eq.rows[a][b] for a in range(2) for b in range(2)}
    )
    w = rand_vector(Z9, 2, rng)
    word = Word(src, [TransvectionToken(src, 1, w), DserToken(src, [[1, 2]], dual=True)])
    out = conjugate_word(word, eps, dst)
    assert out.eval() == eps.inverse() @ word.eval() @ eps
    assert isinstance(out.tokens[0], TransvectionToken)
    assert out.tokens[0].w == tuple(eq.inverse().apply(w))
    assert isinstance(out.tokens[1], DserToken)


def test_conjugate_wraps_foreign_tokens():
    rng = random.Random(40)
    amb = AmbientSpace.standard(Z9, 2, 1)
    eps = rand_orthogonal(amb, rng)
    word = Word(amb, [EvenElementaryToken(amb, 1, 3, 2)])
    out = conjugate_word(word, eps, amb)
    assert isinstance(out.tokens[0], ConjToken)
    assert out.eval() == eps.inverse() @ word.eval() @ eps


def test_conjugate_naturality_mixed_words():
    rng = random.Random(41)
    amb = AmbientSpace.standard(Z9, 2, 1)
    for _ in range(10):
        tokens = []
        for _ in range(rng.randrange(1, 7)):
            kind = rng.choice(["sigma", "e1", "dser", "oe"])
            if kind == "sigma":
                u, v, _ = sigma_triple(amb, rng)
                tokens.append(EichlerToken(amb, u, v))
            elif kind == "e1":
                tokens.append(TransvectionToken(amb, rng.choice([1, 2]), rand_vector(Z9, 2, rng)))
            elif kind == "dser":
                tokens.append(DserToken(amb, [[rng.randrange(9), rng.randrange(9)]], rng.random() < 0.5))
            else:
                tokens.append(EvenElementaryToken(amb, 1, 3, rng.randrange(9)))
        word = Word(amb, tokens)
        eps = rand_orthogonal(amb, rng)
        out = conjugate_word(word, eps, amb)
        assert out.eval() == eps.inverse() @ word.eval() @ eps


def test_conjugate_form_mismatch():
    amb = AmbientSpace.standard(F5, 2, 1)
    bad = SquareMatrix.identity(F5, 4).with_entries({(0, 1): F5.of(1)})
    with pytest.raises(FormMismatch):
        conjugate_word(Word(amb, []), bad, amb)


# -- homotopy lift -----------------------------------------------------------------


def test_homotopy_lift_empty():
    amb = AmbientSpace.standard(Z9, 2, 1)
    lifted = homotopy_lift(Word(amb, []))
    m = lifted.eval()
    assert matrix_poly_eval(m, Z9.of(0)).is_identity()
    assert matrix_poly_eval(m, Z9.of(1)).is_identity()


def test_homotopy_lift_single_sigma():
    rng = random.Random(42)
    amb = AmbientSpace.standard(Z9, 2, 1)
    u, v, _ = sigma_triple(amb, rng)
    lifted = homotopy_lift(Word(amb, [EichlerToken(amb, u, v)]))
    m = lifted.eval()
    assert matrix_poly_eval(m, Z9.of(0)).is_identity()
    assert matrix_poly_eval(m, Z9.of(1)) == sigma_matrix(amb.total, u, v)


def test_homotopy_lift_word_endpoints():
    rng = random.Random(43)
    amb = AmbientSpace.standard(Z9, 3, 1)
    tokens = []
    for _ in range(3):
        u, v, _ = sigma_triple(amb, rng)
        tokens.append(EichlerToken(amb, u, v))
    word = Word(amb, tokens)
    lifted = homotopy_lift(word)
    m = lifted.eval()
    assert matrix_poly_eval(m, Z9.of(0)).is_identity()
    assert matrix_poly_eval(m, Z9.of(1)) == word.eval()


def test_homotopy_lift_rejects_non_sigma():
    amb = AmbientSpace.standard(Z9, 2, 1)
    word = Word(amb, [EvenElementaryToken(amb, 1, 3, 1)])
    with pytest.raises(UnsupportedToken):
        homotopy_lift(word)
