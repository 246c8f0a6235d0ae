"""Constructive factorizations of orthogonal transformations into elementary
generator words.

Every public function returns a ``FactorizationCertificate`` whose word has
been re-multiplied and compared entry-wise against the target before it is
handed back; a mismatch raises ``InternalInconsistency`` instead of returning
a bad certificate.  Printed product formulas from the literature are treated
as claims: where a sign or index convention is ambiguous, a small bounded
variant search runs and the verified variant is recorded in the provenance.
"""

from __future__ import annotations

from typing import Sequence

from .errors import (
    ConventionMismatch,
    DetNotOne,
    FormMismatch,
    InternalInconsistency,
    NonUnitDeterminant,
    UnsupportedRing,
    UnsupportedShape,
    UnsupportedToken,
)
from .rings import Ring, SquareMatrix
from .spaces import (
    AmbientSpace,
    Vector,
    complete_hyperbolic_pair,
    is_zero_vector,
    unit_vector,
    witt_frame,
)
from .generators import (
    AltBlockToken,
    ConjToken,
    DserToken,
    EichlerToken,
    EvenElementaryToken,
    GLBlockToken,
    OddElementaryToken,
    TransvectionToken,
    Word,
    _convert_space,
    block_embed,
    dser_matrix,
    e_transvection_matrix,
    oe_matrix,
    partner_index,
    sigma_matrix,
    total_space,
)

TAG_EQ1 = "Eq1"
TAG_EQ2 = "Eq2"
TAG_COMMUTATOR = "Commutator"
TAG_SPLITTING = "Splitting"
TAG_ODD_CORRESPONDENCE = "OddCorrespondence"
TAG_SIGMA_AXIS = "SigmaAxis"
TAG_GL_ELEMENTARIZE = "GLElementarize"
TAG_ALT_ELEMENTARIZE = "AltElementarize"
TAG_WITT_CONJUGATE = "WittConjugate"
TAG_HOMOTOPY_LIFT = "HomotopyLift"


class FactorizationCertificate:
    """A target matrix, a word multiplying out to it, and per-token tags.

    Construction recomputes the product; ``verified`` is therefore always
    True on any certificate that exists.
    """

    __slots__ = ("target", "word", "provenance", "verified")

    def __init__(self, target: SquareMatrix, word: Word, provenance: Sequence[str]):
        if len(provenance) != len(word.tokens):
            raise InternalInconsistency("provenance must tag every token")
        if word.eval() != target:
            raise InternalInconsistency("factorization product differs from its target")
        self.target = target
        self.word = word
        self.provenance = tuple(provenance)
        self.verified = True

    def re_verify(self) -> bool:
        """Independent re-check: multiply the word out again."""
        return self.word.eval() == self.target

    def __repr__(self):
        return f"Certificate({len(self.word)} tokens, verified={self.verified})"


def _require_even_standard(space: AmbientSpace) -> int:
    if not isinstance(space, AmbientSpace) or space.m != 1:
        raise UnsupportedShape("need an ambient space Q perp H(R) with one hyperbolic pair")
    n = space.q.rank
    if n % 2 != 0 or not space.q.is_standard():
        raise UnsupportedShape("Q must carry the standard form of even rank")
    return n


def factor_e1_to_oe(space: AmbientSpace, w: Vector) -> FactorizationCertificate:
    """Write the transvection E_1^w on Q perp H(R), Q standard of even rank n,
    as the palindromic word of even elementary generators in column n+2:

        prod_{i<n} oe_{i,n+2}(-w_i/2) . oe_{n,n+2}(-w_n) . prod back down.
    """
    n = _require_even_standard(space)
    ring = space.ring
    w = tuple(ring.of(x) for x in w)
    col = n + 2
    wings = [EvenElementaryToken(space, i, col, -w[i - 1].half()) for i in range(1, n)]
    middle = EvenElementaryToken(space, n, col, -w[n - 1])
    tokens = wings + [middle] + wings[::-1]
    word = Word(space, tokens)
    target = e_transvection_matrix(space, 1, w)
    return FactorizationCertificate(target, word, [TAG_EQ1] * len(tokens))


def factor_e2_to_oe(space: AmbientSpace, w: Vector) -> FactorizationCertificate:
    """Mirror of ``factor_e1_to_oe`` targeting E_2^w through column n+1."""
    n = _require_even_standard(space)
    ring = space.ring
    w = tuple(ring.of(x) for x in w)
    col = n + 1
    wings = [EvenElementaryToken(space, i, col, -w[i - 1].half()) for i in range(1, n)]
    middle = EvenElementaryToken(space, n, col, -w[n - 1])
    tokens = wings + [middle] + wings[::-1]
    word = Word(space, tokens)
    target = e_transvection_matrix(space, 2, w)
    return FactorizationCertificate(target, word, [TAG_EQ2] * len(tokens))


def factor_oe_to_transvections(space: AmbientSpace, i: int, j: int, z) -> FactorizationCertificate:
    """Express oe_{i,j}(z) (both indices inside the Q block) as a commutator
    [E_1^{w1}, E_2^{w2}] of elementary transvections.

    The expected placement is w1 = -z e_i, w2 = e_{p(j)}; if that fails to
    verify, the four sign variants are searched and the winner recorded.
    """
    n = _require_even_standard(space)
    ring = space.ring
    z = ring.of(z)
    if not (1 <= i <= n and 1 <= j <= n):
        raise UnsupportedShape("commutator factorization needs Q-block indices")
    target = oe_matrix(ring, n + 2, i, j, z)
    pj = partner_index(n, j)
    variants = [(-1, 1), (1, -1), (1, 1), (-1, -1)]
    for s1, s2 in variants:
        w1 = unit_vector(ring, n, i - 1, s1 * z)
        w2 = unit_vector(ring, n, pj - 1, ring.of(s2))
        g = TransvectionToken(space, 1, w1)
        h = TransvectionToken(space, 2, w2)
        word = Word(space, [g, h, g.inverse(), h.inverse()])
        if word.eval() == target:
            tag = f"{TAG_COMMUTATOR}[w1={'-' if s1 < 0 else '+'}z*e{i}, w2={'-' if s2 < 0 else '+'}e{pj}]"
            return FactorizationCertificate(target, word, [tag] * 4)
    raise InternalInconsistency("no sign variant of the commutator reproduces oe")


def split_dser(space: AmbientSpace, mat, dual: bool = False) -> FactorizationCertificate:
    """Split a full map into single-entry tokens with the halving identity
    E_{a+b} = E_{a/2} E_b E_{a/2}, peeling nonzero entries in row-major order."""
    ring = space.ring
    mat = [[ring.of(x) for x in row] for row in mat]
    m, n = space.m, space.q.rank
    if len(mat) != m or any(len(r) != n for r in mat):
        raise UnsupportedShape(f"map must be {m} x {n}")

    def single(iv, jv, value):
        entry = [[ring.zero()] * n for _ in range(m)]
        entry[iv][jv] = value
        return DserToken(space, entry, dual)

    def build(entries):
        if not entries:
            return []
        if len(entries) == 1:
            iv, jv, value = entries[0]
            return [single(iv, jv, value)]
        iv, jv, value = entries[0]
        wing = single(iv, jv, value.half())
        return [wing] + build(entries[1:]) + [wing]

    entries = [
        (iv, jv, mat[iv][jv])
        for iv in range(m)
        for jv in range(n)
        if not mat[iv][jv].is_zero()
    ]
    tokens = build(entries)
    word = Word(space, tokens)
    target = dser_matrix(space, mat, dual)
    return FactorizationCertificate(target, word, [TAG_SPLITTING] * len(tokens))


def odd_correspondence(token: OddElementaryToken) -> FactorizationCertificate:
    """Identify a one-index odd generator with a single hyperbolic elementary
    token: F1_i(lam) = E_{(-2 lam) a_i} and F2_i(lam) = E*_{(-2 lam) b_i},
    where a_i (b_i) sends the rank-one Q generator to x_i (f_i)."""
    space = token.space
    if not isinstance(space, AmbientSpace) or space.q.rank != 1 or not space.q.is_standard():
        raise UnsupportedShape("odd correspondence needs Q = R with the form (2)")
    if token.fkind not in (1, 2):
        raise UnsupportedToken("only kinds 1 and 2 correspond to single hyperbolic tokens")
    ring = space.ring
    c = ring.of(-2) * token.lam
    mat = [[ring.zero()] for _ in range(space.m)]
    mat[token.i - 1][0] = c
    dser = DserToken(space, mat, dual=(token.fkind == 2))
    word = Word(space, [dser])
    target = token.matrix()
    try:
        return FactorizationCertificate(target, word, [TAG_ODD_CORRESPONDENCE])
    except InternalInconsistency:
        raise ConventionMismatch(
            f"pinned reading F{token.fkind}_i(lam) = E_{{(-2 lam) map_i}} failed for {token!r}"
        ) from None


def _split_uv_parts(space: AmbientSpace, v: Vector):
    """Decompose an interleaved odd-ambient vector into (z-part, x-coeffs, f-coeffs)."""
    m = space.m
    z_part = v[0]
    x_part = [v[2 * a - 1] for a in range(1, m + 1)]
    f_part = [v[2 * a] for a in range(1, m + 1)]
    return z_part, x_part, f_part


def _require_odd_rank_one(space) -> AmbientSpace:
    if not isinstance(space, AmbientSpace) or space.q.rank != 1 or not space.q.is_standard():
        raise UnsupportedShape("need the odd standard ambient space R perp H(R)^m")
    return space


def factor_sigma_axis(space: AmbientSpace, u: Vector, v: Vector) -> FactorizationCertificate:
    """Five-factor decomposition of an axis transvection: u a unit multiple of
    one hyperbolic basis vector (first coordinate 0), v supported on at most
    one coordinate.

    The factors are two hyperbolic elementary tokens, a unipotent GL block and
    an alternating block, read off the coordinate parts of u and v:

        v'' side: [E*_{v1 u''}, E_{2 v1 u'}, E*_{v1 u''}, GL(I + u' v''^T), AltII(u'' v''^T - v'' u''^T)]
        v'  side: the x/f mirror with AltI and GL(I - v' u''^T).

    A v supported in the u direction gives the identity and an empty word.
    """
    space = _require_odd_rank_one(space)
    ring = space.ring
    u = tuple(ring.of(x) for x in u)
    v = tuple(ring.of(x) for x in v)
    target = sigma_matrix(space, u, v)  # runs the data checks

    support_u = [k for k, c in enumerate(u) if not c.is_zero()]
    if len(support_u) != 1 or support_u[0] == 0 or not u[support_u[0]].is_unit():
        raise UnsupportedShape(
            "u must be a unit multiple of one hyperbolic basis vector; conjugate by a Witt frame first"
        )
    support_v = [k for k, c in enumerate(v) if not c.is_zero()]
    if len(support_v) > 1:
        raise UnsupportedShape("v must be supported on at most one coordinate")

    if not support_v or support_v[0] == support_u[0]:
        # sigma_{u,0} and sigma_{u,cu} are the identity
        word = Word(space, [])
        return FactorizationCertificate(target, word, [])

    m = space.m
    v1, v_x, v_f = _split_uv_parts(space, v)
    _, u_x, u_f = _split_uv_parts(space, u)
    zero = ring.zero()
    two = ring.of(2)

    def col(coeffs):
        return [[c] for c in coeffs]

    def outer(a, b):
        return [[ai * bj for bj in b] for ai in a]

    def eye_plus(mat, sign):
        out = [[mat[i][j] * sign for j in range(m)] for i in range(m)]
        for i in range(m):
            out[i][i] = out[i][i] + ring.one()
        return out

    def alt_of(a, b):
        ab = outer(a, b)
        ba = outer(b, a)
        return [[ab[i][j] - ba[i][j] for j in range(m)] for i in range(m)]

    if not is_zero_vector(tuple(v_f)):
        # v supported at an f slot
        s1 = DserToken(space, col([v1 * c for c in u_f]), dual=True)
        s2 = DserToken(space, col([two * v1 * c for c in u_x]), dual=False)
        s3 = GLBlockToken(space, eye_plus(outer(u_x, v_f), ring.one()))
        s4 = AltBlockToken(space, alt_of(u_f, v_f), 2)
    elif not is_zero_vector(tuple(v_x)):
        # v supported at an x slot: the x/f mirror of the branch above
        s1 = DserToken(space, col([v1 * c for c in u_x]), dual=False)
        s2 = DserToken(space, col([two * v1 * c for c in u_f]), dual=True)
        s3 = GLBlockToken(space, eye_plus(outer(v_x, u_f), -ring.one()))
        s4 = AltBlockToken(space, alt_of(u_x, v_x), 1)
    else:
        # v supported at the z coordinate only: both mirrors degenerate
        s1 = DserToken(space, col([v1 * c for c in u_f]), dual=True)
        s2 = DserToken(space, col([two * v1 * c for c in u_x]), dual=False)
        s3 = GLBlockToken(space, eye_plus([[zero] * m for _ in range(m)], ring.one()))
        s4 = AltBlockToken(space, [[zero] * m for _ in range(m)], 2)
    word = Word(space, [s1, s2, s1, s3, s4])
    return FactorizationCertificate(target, word, [TAG_SIGMA_AXIS] * 5)


def _require_small_prime_field(ring: Ring) -> int:
    if ring.kind != "mod":
        raise UnsupportedRing("elementarization works over prime fields and QQ")
    p = ring.modulus
    d = 2
    while d * d <= p:
        if p % d == 0:
            raise UnsupportedRing(f"{p} is not prime")
        d += 1
    return p


def elementarize_gl_block(space: AmbientSpace, a) -> FactorizationCertificate:
    """Factor the GL embedding of a determinant-one block over a field into
    kind-3 odd generators, one per recorded row operation.

    Row additions alone reduce A to the identity: a pivot is first made
    exactly 1 using a lower row (manufacturing a helper row when the column
    is otherwise empty), then its column is cleared.
    """
    ring = space.ring
    if ring.kind != "QQ":
        _require_small_prime_field(ring)
    a = SquareMatrix(ring, a)
    det = a.det()
    if not det.is_unit():
        raise NonUnitDeterminant("block determinant must be a unit")
    if not det.is_one():
        raise DetNotOne("only determinant-one blocks factor into elementary words")
    n = a.n
    work = [list(row) for row in a.rows]
    ops = []  # (r, s, c): row_r += c * row_s

    def row_add(r, s, c):
        if c.is_zero():
            return
        work[r] = [x + c * y for x, y in zip(work[r], work[s])]
        ops.append((r, s, c))

    for colx in range(n):
        if not work[colx][colx].is_one():
            k = next(
                (r for r in range(colx + 1, n) if not work[r][colx].is_zero()),
                None,
            )
            if k is None:
                if work[colx][colx].is_zero():
                    raise InternalInconsistency("singular block slipped past the det check")
                if colx + 1 >= n:
                    # determinant 1 forces the last pivot to already be 1
                    raise InternalInconsistency("last pivot differs from 1 despite det = 1")
                # column empty below a non-1 pivot: manufacture a helper row
                row_add(colx + 1, colx, ring.one())
                k = colx + 1
            pivot = work[colx][colx]
            row_add(colx, k, (ring.one() - pivot) * work[k][colx].inv())
        for r in range(n):
            if r != colx and not work[r][colx].is_zero():
                row_add(r, colx, -work[r][colx])
    if work != [list(row) for row in SquareMatrix.identity(ring, n).rows]:
        raise InternalInconsistency("row reduction did not reach the identity")

    tokens = [
        OddElementaryToken(space, 3, r + 1, -c, s + 1) for (r, s, c) in ops
    ]
    word = Word(space, tokens)
    target = block_embed(ring, n, "gl", a.rows)
    return FactorizationCertificate(target, word, [TAG_GL_ELEMENTARIZE] * len(tokens))


def elementarize_alt_block(space: AmbientSpace, a, kind: int) -> FactorizationCertificate:
    """Factor an alternating block embedding into one two-index odd generator
    per upper-triangle entry (the embedded blocks multiply additively)."""
    ring = space.ring
    a = SquareMatrix(ring, a)
    fkind = 4 if kind == 1 else 5
    tokens = []
    for i in range(a.n):
        for j in range(i + 1, a.n):
            c = a.rows[i][j]
            if not c.is_zero():
                tokens.append(OddElementaryToken(space, fkind, i + 1, c, j + 1))
    word = Word(space, tokens)
    target = block_embed(ring, a.n, f"alt{kind}", a.rows)
    return FactorizationCertificate(target, word, [TAG_ALT_ELEMENTARIZE] * len(tokens))


def factor_sigma_full(space: AmbientSpace, u: Vector, v: Vector) -> FactorizationCertificate:
    """Full pipeline for an arbitrary isotropic transvection on the odd
    standard space of rank 2n+1, n >= 3, over a prime field with p <= 13:

    complete u to a hyperbolic pair, build the Witt frame eps, split the
    transported v coordinate-wise (the w-coordinate is verified to vanish),
    factor each axis transvection and elementarize its block factors, then
    conjugate the concatenation back through eps.
    """
    space = _require_odd_rank_one(space)
    ring = space.ring
    _require_small_prime_field(ring)
    if space.m < 3:
        raise UnsupportedShape("the pipeline needs at least three hyperbolic pairs")
    u = tuple(ring.of(x) for x in u)
    v = tuple(ring.of(x) for x in v)
    target = sigma_matrix(space, u, v)  # data checks run here

    if is_zero_vector(v):
        return FactorizationCertificate(target, Word(space, []), [])

    total = space.total
    w = complete_hyperbolic_pair(total, u)
    eps = witt_frame(total, u, w)
    eps_inv = eps.inverse()
    u_new = eps_inv.apply(u)
    v_new = eps_inv.apply(v)
    if u_new != unit_vector(ring, total.rank, 1):
        raise InternalInconsistency("frame did not carry u to the standard slot")
    if not v_new[2].is_zero():
        raise InternalInconsistency("transported v has a nonzero w-coordinate")

    tokens = []
    tags = []
    for l in range(total.rank):
        if l == 2 or v_new[l].is_zero():
            continue
        axis_v = unit_vector(ring, total.rank, l, v_new[l])
        axis = factor_sigma_axis(space, u_new, axis_v)
        for tok, tag in zip(axis.word.tokens, axis.provenance):
            if isinstance(tok, GLBlockToken):
                sub = elementarize_gl_block(space, tok.a.rows)
                tokens.extend(sub.word.tokens)
                tags.extend(sub.provenance)
            elif isinstance(tok, AltBlockToken):
                sub = elementarize_alt_block(space, tok.a.rows, tok.alt_kind)
                tokens.extend(sub.word.tokens)
                tags.extend(sub.provenance)
            else:
                tokens.append(tok)
                tags.append(tag)
    inner = Word(space, tokens)

    if eps.is_identity():
        return FactorizationCertificate(target, inner, tags)
    conj = ConjToken(space, eps_inv, inner)
    return FactorizationCertificate(target, Word(space, [conj]), [TAG_WITT_CONJUGATE])


def _is_q_block_diagonal(space: AmbientSpace, eps: SquareMatrix) -> bool:
    """Is eps of the shape eps_Q perp identity on the hyperbolic pairs?"""
    n, d = space.q.rank, space.dim
    one, zero = eps.ring.one(), eps.ring.zero()
    for a in range(d):
        for b in range(d):
            x = eps.rows[a][b]
            if a < n and b < n:
                continue
            if a == b:
                if x != one:
                    return False
            elif not x.is_zero():
                return False
    return True


def _q_block(eps: SquareMatrix, n: int) -> SquareMatrix:
    return SquareMatrix(eps.ring, [row[:n] for row in eps.rows[:n]])


def conjugate_word(word: Word, eps: SquareMatrix, target_space) -> Word:
    """Transport a word across a congruence of forms G_target = eps^T G eps,
    token by token: transvections move their vectors through eps^{-1},
    hyperbolic elementary maps compose with the Q block of eps, and anything
    else is wrapped in a conjugation token.  The evaluation satisfies
    eval(out) = eps^{-1} . eval(word) . eps exactly."""
    source = total_space(word.space)
    target = total_space(target_space)
    if eps.transpose() @ source.gram @ eps != target.gram:
        raise FormMismatch("eps^T G eps does not equal the target Gram matrix")
    eps_inv = eps.inverse()

    ambient_ok = (
        isinstance(word.space, AmbientSpace)
        and isinstance(target_space, AmbientSpace)
        and word.space.m == target_space.m
        and _is_q_block_diagonal(word.space, eps)
    )
    if ambient_ok:
        eps_q = _q_block(eps, word.space.q.rank)
        eps_q_inv = eps_q.inverse()

    out = []
    for tok in word.tokens:
        if isinstance(tok, EichlerToken):
            out.append(
                EichlerToken(target_space, eps_inv.apply(tok.u), eps_inv.apply(tok.v))
            )
        elif ambient_ok and isinstance(tok, TransvectionToken):
            out.append(
                TransvectionToken(target_space, tok.which, eps_q_inv.apply(tok.w), tok.slot)
            )
        elif ambient_ok and isinstance(tok, DserToken):
            composed = [
                [
                    sum(
                        (tok.mat[r][k] * eps_q.rows[k][c] for k in range(1, eps_q.n)),
                        tok.mat[r][0] * eps_q.rows[0][c],
                    )
                    for c in range(eps_q.n)
                ]
                for r in range(len(tok.mat))
            ]
            out.append(DserToken(target_space, composed, tok.dual))
        else:
            out.append(ConjToken(target_space, eps, Word(word.space, [tok])))
    return Word(target_space, out)


def homotopy_lift(word: Word) -> Word:
    """Lift a word of isotropic transvections to the polynomial ring: each
    sigma_{u, v} becomes sigma_{u, vX}, so evaluating the lifted product at
    X = 0 gives the identity and at X = 1 the original product."""
    base = total_space(word.space).ring
    if base.kind == "poly":
        raise UnsupportedRing("the word must live over QQ or Z/N, not a polynomial ring")
    poly = Ring.polynomial(base)
    lift = poly.of
    lifted_space = _convert_space(word.space, lift)
    x_var = poly.variable()
    out = []
    for tok in word.tokens:
        if not isinstance(tok, EichlerToken):
            raise UnsupportedToken(f"homotopy lift accepts transvection tokens only, got {tok!r}")
        u_l = tuple(lift(c) for c in tok.u)
        v_l = tuple(lift(c) * x_var for c in tok.v)
        out.append(EichlerToken(lifted_space, u_l, v_l))
    return Word(lifted_space, out)
