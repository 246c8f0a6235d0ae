"""Generator families of the elementary orthogonal groups and words thereof.

All matrices act on column vectors in interleaved coordinates; a word
evaluates as the left-to-right product of its tokens' matrices.  Public
generator indices are 1-based.  Every token checks at construction that its
realized matrix preserves the ambient form, so convention drift between
modules fails fast instead of corrupting downstream factorizations.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .errors import (
    BadIndices,
    DescriptorMismatch,
    DimensionMismatch,
    FormMismatch,
    InternalInconsistency,
    NonUnitDeterminant,
    NotAlternating,
)
from .rings import Ring, SquareMatrix
from .spaces import (
    AmbientSpace,
    QuadraticSpace,
    Vector,
    check_transvection_data,
    vec_neg,
)


def total_space(space) -> QuadraticSpace:
    """The full quadratic space of an ambient or plain space."""
    return space.total if isinstance(space, AmbientSpace) else space


def partner_index(dim: int, k: int) -> int:
    """Hyperbolic partner of index k (1-based) in the standard form of the
    given rank: pairs (2i-1, 2i) for even rank, (2i, 2i+1) for odd rank."""
    if not 1 <= k <= dim:
        raise BadIndices(f"index {k} out of range 1..{dim}")
    if dim % 2 == 0:
        return k - 1 if k % 2 == 0 else k + 1
    if k == 1:
        raise BadIndices("index 1 of an odd standard form has no hyperbolic partner")
    return k + 1 if k % 2 == 0 else k - 1


# -- rectangular helpers (lists of element lists) -----------------------------


def _rect(ring: Ring, rows, cols, fill=None):
    z = ring.zero() if fill is None else ring.of(fill)
    return [[z] * cols for _ in range(rows)]


def _rect_of(ring: Ring, data) -> list:
    return [[ring.of(x) for x in row] for row in data]


def _rect_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    out = []
    for i in range(rows):
        out_row = []
        for j in range(cols):
            acc = a[i][0] * b[0][j]
            for k in range(1, inner):
                acc = acc + a[i][k] * b[k][j]
            out_row.append(acc)
        out.append(out_row)
    return out


def _rect_transpose(a):
    return [list(col) for col in zip(*a)]


def _rect_scale(c, a):
    return [[c * x for x in row] for row in a]


# -- matrix constructions ------------------------------------------------------


def oe_matrix(ring: Ring, dim: int, i: int, j: int, z) -> SquareMatrix:
    """Even-type elementary orthogonal matrix I + z e_{i,j} - z e_{p(j),p(i)}
    for the standard form, where p is the hyperbolic partner involution.  In
    odd rank both indices must avoid the unpaired first slot."""
    z = ring.of(z)
    if i == j:
        raise BadIndices("indices must differ")
    pj = partner_index(dim, j)
    pi = partner_index(dim, i)
    if i == pj:
        raise BadIndices(f"indices {i}, {j} form a hyperbolic pair")
    m = SquareMatrix.identity(ring, dim)
    return m.with_entries({(i - 1, j - 1): z, (pj - 1, pi - 1): -z})


def fasel_matrix(ring: Ring, r: int, kind: int, i: int, lam, j: Optional[int] = None) -> SquareMatrix:
    """Odd-rank elementary generator of type ``kind`` in O_{2r+1}; kinds 3-5
    need a second index j != i."""
    lam = ring.of(lam)
    dim = 2 * r + 1
    if not 1 <= i <= r:
        raise BadIndices(f"index {i} out of range 1..{r}")
    if kind in (1, 2):
        if j is not None:
            raise BadIndices("kinds 1 and 2 take a single index")
    else:
        if j is None or not 1 <= j <= r or j == i:
            raise BadIndices(f"kinds 3-5 need a second index in 1..{r} distinct from {i}")
    m = SquareMatrix.identity(ring, dim)
    x = lambda k: 2 * k - 1  # 0-based position of x_k
    f = lambda k: 2 * k      # 0-based position of f_k
    if kind == 1:
        return m.with_entries({(0, f(i)): lam, (x(i), 0): -2 * lam, (x(i), f(i)): -lam * lam})
    if kind == 2:
        return m.with_entries({(0, x(i)): lam, (f(i), 0): -2 * lam, (f(i), x(i)): -lam * lam})
    if kind == 3:
        return m.with_entries({(x(i), x(j)): lam, (f(j), f(i)): -lam})
    if kind == 4:
        return m.with_entries({(x(i), f(j)): lam, (x(j), f(i)): -lam})
    if kind == 5:
        return m.with_entries({(f(i), x(j)): lam, (f(j), x(i)): -lam})
    raise BadIndices(f"unknown generator kind {kind}")


def dser_matrix(space: AmbientSpace, mat: Sequence[Sequence], dual: bool = False) -> SquareMatrix:
    """Matrix of the hyperbolic elementary transformation attached to a linear
    map Q -> P (rows index the x_i) or, with ``dual``, Q -> P*.

    The block form over (Q | P | P*) is
        [[I, 0, -a*], [a, I, -a a*/2], [0, 0, I]]
    and its dual mirror, with a* = G_Q^{-1} a^T; the result is returned in
    interleaved coordinates.
    """
    ring = space.ring
    n, m = space.q.rank, space.m
    a = _rect_of(ring, mat)
    if len(a) != m or any(len(row) != n for row in a):
        raise DimensionMismatch(f"map must be {m} x {n}")
    g_inv = space.q.gram_inverse()
    a_star = _rect_mul([list(row) for row in g_inv.rows], _rect_transpose(a))  # n x m
    aa_star = _rect_scale(-ring.of(2).inv(), _rect_mul(a, a_star))             # m x m
    d = space.dim
    zero = ring.zero()
    out = [[zero] * d for _ in range(d)]
    for k in range(d):
        out[k][k] = ring.one()
    if not dual:
        for q_row in range(n):
            for c in range(m):
                out[q_row][n + m + c] = -a_star[q_row][c]
        for x_row in range(m):
            for c in range(n):
                out[n + x_row][c] = a[x_row][c]
            for c in range(m):
                out[n + x_row][n + m + c] = aa_star[x_row][c]
    else:
        for q_row in range(n):
            for c in range(m):
                out[q_row][n + c] = -a_star[q_row][c]
        for f_row in range(m):
            for c in range(n):
                out[n + m + f_row][c] = a[f_row][c]
            for c in range(m):
                out[n + m + f_row][n + c] = aa_star[f_row][c]
    return space.interleave_matrix(SquareMatrix(ring, out))


def e_transvection_matrix(space: AmbientSpace, which: int, w: Vector, slot: int = 1) -> SquareMatrix:
    """Elementary orthogonal transvection for w in Q at a hyperbolic slot:
    the rank-one case of ``dser_matrix`` with map z -> <z, w> x_slot (or f_slot)."""
    if which not in (1, 2):
        raise BadIndices(f"which must be 1 or 2, got {which}")
    if not 1 <= slot <= space.m:
        raise BadIndices(f"slot {slot} out of range 1..{space.m}")
    if len(w) != space.q.rank:
        raise DimensionMismatch(f"w must lie in Q (length {space.q.rank})")
    ring = space.ring
    gw = space.q.gram.apply(w)
    mat = [[ring.zero()] * space.q.rank for _ in range(space.m)]
    mat[slot - 1] = list(gw)
    return dser_matrix(space, mat, dual=(which == 2))


def sigma_matrix(space, u: Vector, v: Vector) -> SquareMatrix:
    """Isotropic transvection x -> x + u<v,x> - v<u,x> - u q(v) <u,x>."""
    tot = total_space(space)
    r = check_transvection_data(tot, u, v)
    ring = tot.ring
    gu = tot.gram.apply(u)
    gv = tot.gram.apply(v)
    n = tot.rank
    rows = []
    for a in range(n):
        row = []
        for b in range(n):
            x = u[a] * gv[b] - v[a] * gu[b] - r * u[a] * gu[b]
            if a == b:
                x = x + ring.one()
            row.append(x)
        rows.append(row)
    return SquareMatrix(ring, rows)


def _check_alternating(a: SquareMatrix) -> None:
    if a.transpose() != -a:
        raise NotAlternating("matrix must satisfy A^T = -A")
    for k in range(a.n):
        if not a.rows[k][k].is_zero():
            raise NotAlternating("alternating matrix needs a zero diagonal")


def block_embed(ring: Ring, r: int, kind: str, a: Sequence[Sequence]) -> SquareMatrix:
    """Embed an r x r matrix into the odd standard space of rank 2r+1.

    kind "gl": A acts on the x_i and (A^T)^{-1} on the f_i, first slot fixed.
    kind "alt1": I plus A spread over the (x_k, f_l) positions (A alternating).
    kind "alt2": the same over the (f_k, x_l) positions.
    """
    a = SquareMatrix(ring, a)
    if a.n != r:
        raise DimensionMismatch(f"block must be {r} x {r}")
    dim = 2 * r + 1
    out = SquareMatrix.identity(ring, dim)
    x = lambda k: 2 * k - 1
    f = lambda k: 2 * k
    updates = {}
    if kind == "gl":
        if not a.det().is_unit():
            raise NonUnitDeterminant("block determinant must be a unit")
        b = a.inverse().transpose()
        for i in range(1, r + 1):
            for j in range(1, r + 1):
                updates[(x(i), x(j))] = a.rows[i - 1][j - 1]
                updates[(f(i), f(j))] = b.rows[i - 1][j - 1]
        return out.with_entries(updates)
    if kind in ("alt1", "alt2"):
        _check_alternating(a)
        for i in range(1, r + 1):
            for j in range(1, r + 1):
                if a.rows[i - 1][j - 1].is_zero():
                    continue
                if kind == "alt1":
                    updates[(x(i), f(j))] = a.rows[i - 1][j - 1]
                else:
                    updates[(f(i), x(j))] = a.rows[i - 1][j - 1]
        return out.with_entries(updates)
    raise BadIndices(f"unknown block kind {kind!r}")


# -- tokens ---------------------------------------------------------------------


class Token:
    """One tagged generator over an ambient space; realizes to a matrix."""

    kind = "?"

    def __init__(self, space):
        self.space = space
        self._matrix = None

    def matrix(self) -> SquareMatrix:
        if self._matrix is None:
            m = self._build()
            if not total_space(self.space).is_orthogonal(m):
                raise InternalInconsistency(
                    f"{self!r} does not preserve the ambient form"
                )
            self._matrix = m
        return self._matrix

    def _build(self) -> SquareMatrix:
        raise NotImplementedError

    def inverse(self) -> "Token":
        raise NotImplementedError

    def params(self) -> list:
        """Ring elements whose ideal levels classify this token."""
        raise NotImplementedError

    def map_ring(self, convert, new_space) -> "Token":
        """Rebuild the token with every parameter pushed through ``convert``."""
        raise NotImplementedError

    def _fields(self):
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self._fields() == other._fields()

    def __hash__(self):
        return hash((type(self).__name__, self._fields()))


class EvenElementaryToken(Token):
    kind = "oe"

    def __init__(self, space, i: int, j: int, z):
        super().__init__(space)
        self.i, self.j = i, j
        self.z = space.ring.of(z)
        self.matrix()

    def _build(self):
        return oe_matrix(self.space.ring, total_space(self.space).rank, self.i, self.j, self.z)

    def inverse(self):
        return EvenElementaryToken(self.space, self.i, self.j, -self.z)

    def params(self):
        return [self.z]

    def map_ring(self, convert, new_space):
        return EvenElementaryToken(new_space, self.i, self.j, convert(self.z))

    def _fields(self):
        return (self.space, self.i, self.j, self.z)

    def __repr__(self):
        return f"oe[{self.i},{self.j}]({self.z!r})"


class OddElementaryToken(Token):
    def __init__(self, space, fkind: int, i: int, lam, j: Optional[int] = None):
        super().__init__(space)
        self.fkind, self.i, self.j = fkind, i, j
        self.lam = space.ring.of(lam)
        self.kind = f"f{fkind}"
        self.matrix()

    def _build(self):
        dim = total_space(self.space).rank
        if dim % 2 == 0:
            raise BadIndices("odd-type generators need an odd-rank space")
        return fasel_matrix(self.space.ring, dim // 2, self.fkind, self.i, self.lam, self.j)

    def inverse(self):
        return OddElementaryToken(self.space, self.fkind, self.i, -self.lam, self.j)

    def params(self):
        return [self.lam]

    def map_ring(self, convert, new_space):
        return OddElementaryToken(new_space, self.fkind, self.i, convert(self.lam), self.j)

    def _fields(self):
        return (self.space, self.fkind, self.i, self.j, self.lam)

    def __repr__(self):
        ix = f"{self.i}" if self.j is None else f"{self.i},{self.j}"
        return f"F{self.fkind}[{ix}]({self.lam!r})"


class DserToken(Token):
    """Hyperbolic elementary transformation given by a full m x n map."""

    def __init__(self, space: AmbientSpace, mat, dual: bool = False):
        super().__init__(space)
        self.mat = tuple(tuple(space.ring.of(x) for x in row) for row in mat)
        self.dual = dual
        self.kind = "e_beta" if dual else "e_alpha"
        self.matrix()

    def _build(self):
        return dser_matrix(self.space, self.mat, self.dual)

    def inverse(self):
        return DserToken(self.space, tuple(tuple(-x for x in r) for r in self.mat), self.dual)

    def params(self):
        return [x for row in self.mat for x in row]

    def map_ring(self, convert, new_space):
        return DserToken(
            new_space, tuple(tuple(convert(x) for x in r) for r in self.mat), self.dual
        )

    def _fields(self):
        return (self.space, self.mat, self.dual)

    def __repr__(self):
        star = "*" if self.dual else ""
        return f"E{star}({self.mat!r})"


class TransvectionToken(Token):
    """Rank-one elementary transvection for w in Q at one hyperbolic slot."""

    def __init__(self, space: AmbientSpace, which: int, w: Vector, slot: int = 1):
        super().__init__(space)
        self.which = which
        self.w = tuple(space.ring.of(x) for x in w)
        self.slot = slot
        self.kind = f"e{which}"
        self.matrix()

    def _build(self):
        return e_transvection_matrix(self.space, self.which, self.w, self.slot)

    def inverse(self):
        return TransvectionToken(self.space, self.which, vec_neg(self.w), self.slot)

    def params(self):
        return list(self.w)

    def map_ring(self, convert, new_space):
        return TransvectionToken(new_space, self.which, tuple(convert(x) for x in self.w), self.slot)

    def _fields(self):
        return (self.space, self.which, self.w, self.slot)

    def __repr__(self):
        return f"E{self.which}^{self.w!r}[slot {self.slot}]"


class EichlerToken(Token):
    """Isotropic transvection token; lives on any quadratic space."""

    kind = "sigma"

    def __init__(self, space, u: Vector, v: Vector):
        super().__init__(space)
        ring = total_space(space).ring
        self.u = tuple(ring.of(x) for x in u)
        self.v = tuple(ring.of(x) for x in v)
        self.matrix()

    def _build(self):
        return sigma_matrix(self.space, self.u, self.v)

    def inverse(self):
        return EichlerToken(self.space, self.u, vec_neg(self.v))

    def params(self):
        return list(self.v)  # the level of a transvection sits in v

    def map_ring(self, convert, new_space):
        return EichlerToken(
            new_space, tuple(convert(x) for x in self.u), tuple(convert(x) for x in self.v)
        )

    def _fields(self):
        return (self.space, self.u, self.v)

    def __repr__(self):
        return f"sigma(u={self.u!r}, v={self.v!r})"


class GLBlockToken(Token):
    kind = "gl"

    def __init__(self, space, a):
        super().__init__(space)
        self.a = SquareMatrix(space.ring, a)
        self.matrix()

    def _build(self):
        dim = total_space(self.space).rank
        return block_embed(self.space.ring, dim // 2, "gl", self.a.rows)

    def inverse(self):
        return GLBlockToken(self.space, self.a.inverse().rows)

    def params(self):
        delta = self.a - SquareMatrix.identity(self.a.ring, self.a.n)
        return [x for row in delta.rows for x in row]

    def map_ring(self, convert, new_space):
        return GLBlockToken(new_space, [[convert(x) for x in row] for row in self.a.rows])

    def _fields(self):
        return (self.space, self.a)

    def __repr__(self):
        return f"GL~({self.a!r})"


class AltBlockToken(Token):
    def __init__(self, space, a, alt_kind: int):
        super().__init__(space)
        self.a = SquareMatrix(space.ring, a)
        self.alt_kind = alt_kind
        self.kind = f"alt{alt_kind}"
        self.matrix()

    def _build(self):
        dim = total_space(self.space).rank
        return block_embed(self.space.ring, dim // 2, f"alt{self.alt_kind}", self.a.rows)

    def inverse(self):
        return AltBlockToken(self.space, (-self.a).rows, self.alt_kind)

    def params(self):
        return [x for row in self.a.rows for x in row]

    def map_ring(self, convert, new_space):
        return AltBlockToken(
            new_space, [[convert(x) for x in row] for row in self.a.rows], self.alt_kind
        )

    def _fields(self):
        return (self.space, self.a, self.alt_kind)

    def __repr__(self):
        return f"Alt{self.alt_kind}~({self.a!r})"


class ConjToken(Token):
    """eps^{-1} . eval(inner) . eps, transporting a word across a congruence
    of forms: the inner word's Gram G* must satisfy G = eps^T G* eps."""

    kind = "conj"

    def __init__(self, space, eps: SquareMatrix, inner: "Word"):
        super().__init__(space)
        self.eps = eps
        self.inner = inner
        target = total_space(space).gram
        source = total_space(inner.space).gram
        if eps.transpose() @ source @ eps != target:
            raise FormMismatch("conjugator does not carry the inner form to the outer form")
        self._eps_inv = eps.inverse()
        self.matrix()

    def _build(self):
        return self._eps_inv @ self.inner.eval() @ self.eps

    def inverse(self):
        return ConjToken(self.space, self.eps, self.inner.inverse())

    def params(self):
        return [x for t in self.inner.tokens for x in t.params()]

    def map_ring(self, convert, new_space):
        eps = self.eps.map_entries(convert)
        inner_space = _convert_space(self.inner.space, convert)
        inner = Word(inner_space, [t.map_ring(convert, inner_space) for t in self.inner.tokens])
        return ConjToken(new_space, eps, inner)

    def _fields(self):
        return (self.space, self.eps, tuple(self.inner.tokens))

    def __repr__(self):
        return f"Conj(eps, {self.inner!r})"


def _convert_space(space, convert):
    """Rebuild a space with every Gram entry pushed through ``convert``."""
    if isinstance(space, AmbientSpace):
        return AmbientSpace(QuadraticSpace(space.q.gram.map_entries(convert)), space.m)
    return QuadraticSpace(space.gram.map_entries(convert))


class Word:
    """Sequence of tokens over one space; evaluates left to right."""

    def __init__(self, space, tokens: Sequence[Token] = ()):
        self.space = space
        self.tokens = tuple(tokens)
        self._eval = None
        gram = total_space(space).gram
        for t in self.tokens:
            if total_space(t.space).gram != gram:
                raise DescriptorMismatch("all tokens of a word must share the space's form")

    def eval(self) -> SquareMatrix:
        if self._eval is None:
            tot = total_space(self.space)
            out = SquareMatrix.identity(tot.ring, tot.rank)
            for t in self.tokens:
                out = out @ t.matrix()
            self._eval = out
        return self._eval

    def inverse(self) -> "Word":
        return Word(self.space, [t.inverse() for t in reversed(self.tokens)])

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __add__(self, other: "Word") -> "Word":
        if total_space(self.space).gram != total_space(other.space).gram:
            raise DescriptorMismatch("cannot concatenate words over different forms")
        return Word(self.space, self.tokens + other.tokens)

    def __eq__(self, other):
        return (
            isinstance(other, Word)
            and self.space == other.space
            and self.tokens == other.tokens
        )

    def __repr__(self):
        return f"Word[{', '.join(repr(t) for t in self.tokens)}]"


def word_eval(word: Word) -> SquareMatrix:
    return word.eval()


def commutator_word(space, g: Token, h: Token) -> Word:
    """g h g^{-1} h^{-1} as a four-token word."""
    return Word(space, [g, h, g.inverse(), h.inverse()])


def fasel_commutator_identity(space, fkind: int, i: int, j: int, z):
    """The commutator expression of an odd generator of kind 3, 4 or 5 in
    terms of the one-index kinds, as verified against the definitions:

        kind 3:  [F1_i(-z/2), F2_j(1)]
        kind 4:  [F1_i(-z/2), F1_j(1)]
        kind 5:  [F2_i(-z/2), F2_j(1)]

    Returns (target token, commutator word); the pairing printed in the
    source material swaps kinds 3 and 5 and rescales the argument, which
    cannot hold (any word in one-index kind-2 generators fixes every f
    coordinate, while a kind-3 generator does not), so the identity above is
    the one this library pins and tests.
    """
    ring = space.ring
    z = ring.of(z)
    half = z.half()
    target = OddElementaryToken(space, fkind, i, z, j)
    if fkind == 3:
        g = OddElementaryToken(space, 1, i, -half)
        h = OddElementaryToken(space, 2, j, 1)
    elif fkind == 4:
        g = OddElementaryToken(space, 1, i, -half)
        h = OddElementaryToken(space, 1, j, 1)
    elif fkind == 5:
        g = OddElementaryToken(space, 2, i, -half)
        h = OddElementaryToken(space, 2, j, 1)
    else:
        raise BadIndices("commutator identities exist for kinds 3, 4, 5")
    return target, commutator_word(space, g, h)
