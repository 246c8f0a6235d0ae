"""Quadratic spaces over commutative rings with 2 invertible.

A space is a free module with a symmetric invertible Gram matrix G; the
bilinear form is <x, y> = x^T G y and the quadratic form is q(x) = <x, x>/2.
``AmbientSpace`` models Q perp H(R)^m with two bases: the block order
(z_1..z_n | x_1..x_m | f_1..f_m) used by the block-matrix constructions, and
the interleaved order (z_1..z_n | x_1 f_1 | x_2 f_2 | ...) in which a standard
Q makes the total Gram the standard form of rank n + 2m.
"""

from __future__ import annotations

from math import gcd
from typing import Sequence

from .errors import (
    DimensionMismatch,
    NonUnitDeterminant,
    NoSolution,
    NotIsotropic,
    NotOrthogonalPair,
    NotUnimodular,
    SearchExhausted,
    UnsupportedRing,
)
from .rings import Ring, RingElement, SquareMatrix

Vector = tuple  # coordinate tuple of RingElements in a declared basis


_STANDARD_GRAM_CACHE: dict = {}


def standard_gram(ring: Ring, n: int) -> SquareMatrix:
    """Standard symmetric form of rank n: hyperbolic pairs (2i-1, 2i) for even
    rank, and (2) perp pairs for odd rank."""
    if n < 1:
        raise DimensionMismatch(f"rank must be positive, got {n}")
    key = (ring, n)
    cached = _STANDARD_GRAM_CACHE.get(key)
    if cached is None:
        g = [[0] * n for _ in range(n)]
        start = 0
        if n % 2 == 1:
            g[0][0] = 2
            start = 1
        for a in range(start, n - 1, 2):
            g[a][a + 1] = 1
            g[a + 1][a] = 1
        cached = _STANDARD_GRAM_CACHE[key] = SquareMatrix(ring, g)
    return cached


def vec(ring: Ring, coords: Sequence) -> Vector:
    return tuple(ring.of(c) for c in coords)


def vec_zero(ring: Ring, n: int) -> Vector:
    return tuple(ring.zero() for _ in range(n))


def unit_vector(ring: Ring, n: int, k: int, value=1) -> Vector:
    """0-based coordinate vector value * e_k."""
    out = [ring.zero()] * n
    out[k] = ring.of(value)
    return tuple(out)


def vec_add(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a: Vector, b: Vector) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(c: RingElement, a: Vector) -> Vector:
    return tuple(c * x for x in a)


def vec_neg(a: Vector) -> Vector:
    return tuple(-x for x in a)


def is_zero_vector(a: Vector) -> bool:
    return all(x.is_zero() for x in a)


class QuadraticSpace:
    """Free quadratic space described by its Gram matrix."""

    __slots__ = ("ring", "rank", "gram", "_gram_inv", "_is_standard")

    def __init__(self, gram: SquareMatrix):
        if gram != gram.transpose():
            raise ValueError("Gram matrix must be symmetric")
        if not gram.det().is_unit():
            raise NonUnitDeterminant("Gram determinant must be a unit (non-degeneracy)")
        self.ring = gram.ring
        self.rank = gram.n
        self.gram = gram
        self._gram_inv = None
        self._is_standard = None

    @classmethod
    def standard(cls, ring: Ring, n: int) -> "QuadraticSpace":
        return cls(standard_gram(ring, n))

    def gram_inverse(self) -> SquareMatrix:
        if self._gram_inv is None:
            self._gram_inv = self.gram.inverse()
        return self._gram_inv

    def _check_len(self, x: Vector) -> None:
        if len(x) != self.rank:
            raise DimensionMismatch(f"vector length {len(x)} vs rank {self.rank}")

    def bilinear(self, x: Vector, y: Vector) -> RingElement:
        self._check_len(x)
        self._check_len(y)
        gy = self.gram.apply(y)
        acc = x[0] * gy[0]
        for k in range(1, self.rank):
            acc = acc + x[k] * gy[k]
        return acc

    def quad(self, x: Vector) -> RingElement:
        return self.bilinear(x, x).half()

    def is_orthogonal(self, t: SquareMatrix) -> bool:
        if t.n != self.rank:
            raise DimensionMismatch(f"matrix size {t.n} vs rank {self.rank}")
        return t.transpose() @ self.gram @ t == self.gram

    def is_standard(self) -> bool:
        if self._is_standard is None:
            self._is_standard = self.gram == standard_gram(self.ring, self.rank)
        return self._is_standard

    def __eq__(self, other):
        return isinstance(other, QuadraticSpace) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    def __repr__(self):
        return f"QuadraticSpace(rank={self.rank}, ring={self.ring!r})"


def is_orthogonal(t: SquareMatrix, space: QuadraticSpace) -> bool:
    return space.is_orthogonal(t)


class AmbientSpace:
    """Q perp H(R)^m with stored permutation between block and interleaved
    bases.  All public generator constructions use interleaved coordinates."""

    __slots__ = ("q", "m", "ring", "dim", "_total")

    def __init__(self, q: QuadraticSpace, m: int):
        if m < 1:
            raise DimensionMismatch(f"need at least one hyperbolic pair, got m={m}")
        self.q = q
        self.m = m
        self.ring = q.ring
        self.dim = q.rank + 2 * m
        self._total = None

    @classmethod
    def standard(cls, ring: Ring, n: int, m: int) -> "AmbientSpace":
        return cls(QuadraticSpace.standard(ring, n), m)

    # -- index bookkeeping (0-based) ---------------------------------------

    def x_index(self, i: int) -> int:
        """Interleaved position of x_i (1-based slot i)."""
        if not 1 <= i <= self.m:
            raise DimensionMismatch(f"slot {i} out of range 1..{self.m}")
        return self.q.rank + 2 * (i - 1)

    def f_index(self, i: int) -> int:
        if not 1 <= i <= self.m:
            raise DimensionMismatch(f"slot {i} out of range 1..{self.m}")
        return self.q.rank + 2 * (i - 1) + 1

    def _block_to_inter(self) -> list:
        n, m = self.q.rank, self.m
        perm = list(range(n))
        perm += [n + 2 * i for i in range(m)]       # x_i
        perm += [n + 2 * i + 1 for i in range(m)]   # f_i
        return perm

    def interleave_vector(self, v: Vector) -> Vector:
        """Block-order coordinates to interleaved order."""
        if len(v) != self.dim:
            raise DimensionMismatch(f"vector length {len(v)} vs dim {self.dim}")
        out = [None] * self.dim
        for b, t in enumerate(self._block_to_inter()):
            out[t] = v[b]
        return tuple(out)

    def deinterleave_vector(self, v: Vector) -> Vector:
        if len(v) != self.dim:
            raise DimensionMismatch(f"vector length {len(v)} vs dim {self.dim}")
        perm = self._block_to_inter()
        return tuple(v[t] for t in perm)

    def interleave_matrix(self, m_block: SquareMatrix) -> SquareMatrix:
        perm = self._block_to_inter()
        out = [[None] * self.dim for _ in range(self.dim)]
        for a in range(self.dim):
            for b in range(self.dim):
                out[perm[a]][perm[b]] = m_block.rows[a][b]
        return SquareMatrix(self.ring, out)

    # -- forms --------------------------------------------------------------

    def block_gram(self) -> SquareMatrix:
        """Gram in block order: G_Q plus the x_i/f_i pairing block."""
        n, m, d = self.q.rank, self.m, self.dim
        zero, one = self.ring.zero(), self.ring.one()
        g = [[zero] * d for _ in range(d)]
        for a in range(n):
            for b in range(n):
                g[a][b] = self.q.gram.rows[a][b]
        for i in range(m):
            g[n + i][n + m + i] = one
            g[n + m + i][n + i] = one
        return SquareMatrix(self.ring, g)

    @property
    def total(self) -> QuadraticSpace:
        """The whole space with its interleaved Gram matrix."""
        if self._total is None:
            self._total = QuadraticSpace(self.interleave_matrix(self.block_gram()))
        return self._total

    @property
    def gram(self) -> SquareMatrix:
        return self.total.gram

    def bilinear(self, x: Vector, y: Vector) -> RingElement:
        return self.total.bilinear(x, y)

    def quad(self, x: Vector) -> RingElement:
        return self.total.quad(x)

    def is_orthogonal(self, t: SquareMatrix) -> bool:
        return self.total.is_orthogonal(t)

    def is_standard(self) -> bool:
        return self.q.is_standard()

    def __eq__(self, other):
        return (
            isinstance(other, AmbientSpace)
            and self.q == other.q
            and self.m == other.m
        )

    def __hash__(self):
        return hash((self.q, self.m))

    def __repr__(self):
        return f"AmbientSpace(q_rank={self.q.rank}, pairs={self.m}, ring={self.ring!r})"


# -- unimodularity and transvection data -------------------------------------


def is_unimodular(ring: Ring, coords: Sequence[RingElement]) -> bool:
    """Do the coordinates generate the unit ideal?"""
    if ring.kind == "QQ":
        return any(not c.is_zero() for c in coords)
    if ring.kind == "mod":
        g = ring.modulus
        for c in coords:
            g = gcd(g, c.payload)
        return g == 1
    if ring.kind == "poly":
        # content test: all base coefficients of all coordinates together
        flat = [c for p in coords for c in p.payload]
        if not flat:
            return False
        return is_unimodular(ring.base, flat)
    raise UnsupportedRing(f"unimodularity test unsupported over {ring}")


def check_transvection_data(space, u: Vector, v: Vector):
    """Validate the data (u, v) of an isotropic transvection: q(u) = 0,
    <u, v> = 0 and u unimodular.  Returns r = q(v)."""
    if not space.quad(u).is_zero():
        raise NotIsotropic("q(u) must vanish")
    if not space.bilinear(u, v).is_zero():
        raise NotOrthogonalPair("<u, v> must vanish")
    if not is_unimodular(space.ring, u):
        raise NotUnimodular("u must be unimodular")
    return space.quad(v)


def _squarefree_odd(n: int) -> bool:
    if n % 2 == 0:
        return False
    d, m = 3, n
    while d * d <= m:
        if m % d == 0:
            m //= d
            if m % d == 0:
                return False
        else:
            d += 2
    return True


def _solve_unimodular_row(ring: Ring, row: Sequence[RingElement]) -> Vector:
    """Deterministic y with row . y = 1; requires the row to be unimodular."""
    n = len(row)
    if ring.kind == "QQ":
        for k, c in enumerate(row):
            if not c.is_zero():
                return unit_vector(ring, n, k, c.inv())
        raise NoSolution("zero row")
    if ring.kind == "mod":
        big_n = ring.modulus
        combo = [0] * n
        g = big_n
        for k, c in enumerate(row):
            ck = c.payload
            g2, s, t = _xgcd(g, ck)
            combo = [(s * x) % big_n for x in combo]
            combo[k] = (combo[k] + t) % big_n
            g = g2
            if g == 1:
                break
        if g != 1:
            raise NoSolution("row is not unimodular")
        return vec(ring, combo)
    raise UnsupportedRing(f"linear solve unsupported over {ring}")


def _xgcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_s, s = s, old_s - qt * s
        old_t, t = t, old_t - qt * t
    return old_r, old_s, old_t


def complete_hyperbolic_pair(space, u: Vector) -> Vector:
    """Extend an isotropic unimodular u to a hyperbolic pair (u, w):
    solve <u, y> = 1, then correct w = y - q(y) u so q(w) = 0."""
    ring = space.ring
    if ring.kind == "QQ":
        pass
    elif ring.kind == "mod":
        if not _squarefree_odd(ring.modulus):
            raise UnsupportedRing(
                f"hyperbolic completion needs a squarefree odd modulus, got {ring.modulus}"
            )
    else:
        raise UnsupportedRing(f"hyperbolic completion unsupported over {ring}")
    if not space.quad(u).is_zero():
        raise NotIsotropic("q(u) must vanish")
    if not is_unimodular(ring, u):
        raise NotUnimodular("u must be unimodular")
    gram = space.gram if isinstance(space, QuadraticSpace) else space.total.gram
    row = gram.apply(u)  # <u, e_k> since gram is symmetric
    y = _solve_unimodular_row(ring, row)
    w = vec_sub(y, vec_scale(space.quad(y), u))
    if not space.bilinear(u, w).is_one() or not space.quad(w).is_zero():
        raise NoSolution("hyperbolic completion postcondition failed")
    return w


# -- Witt frame over small prime fields --------------------------------------


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _mod_nullspace(rows, p: int, width: int):
    """Deterministic nullspace basis over F_p via reduced row echelon form."""
    mat = [list(r) for r in rows]
    pivots = []
    rank = 0
    for col in range(width):
        pivot_row = None
        for r in range(rank, len(mat)):
            if mat[r][col] % p:
                pivot_row = r
                break
        if pivot_row is None:
            continue
        mat[rank], mat[pivot_row] = mat[pivot_row], mat[rank]
        inv = pow(mat[rank][col], -1, p)
        mat[rank] = [(x * inv) % p for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] % p:
                c = mat[r][col]
                mat[r] = [(x - c * y) % p for x, y in zip(mat[r], mat[rank])]
        pivots.append(col)
        rank += 1
    basis = []
    pivot_set = set(pivots)
    for free in range(width):
        if free in pivot_set:
            continue
        v = [0] * width
        v[free] = 1
        for r, col in enumerate(pivots):
            v[col] = (-mat[r][free]) % p
        basis.append(v)
    return basis


def _combo(coeffs, basis, p: int, width: int):
    out = [0] * width
    for c, b in zip(coeffs, basis):
        if c:
            for k in range(width):
                out[k] = (out[k] + c * b[k]) % p
    return out


def _search_in_span(basis, p: int, width: int, predicate):
    """First vector of the span satisfying ``predicate``, enumerating
    coefficient tuples with the first coordinate varying fastest."""
    k = len(basis)
    total = p**k
    for idx in range(1, total):
        coeffs = []
        t = idx
        for _ in range(k):
            coeffs.append(t % p)
            t //= p
        cand = _combo(coeffs, basis, p, width)
        if predicate(cand):
            return cand
    raise SearchExhausted("no vector in the span satisfies the predicate")


def witt_frame(space, u: Vector, w: Vector) -> SquareMatrix:
    """Orthogonal change of basis for a standard odd-rank space that carries
    (u, w) to the first hyperbolic pair.

    Returns an invertible eps with eps^T G eps = G whose columns are the new
    basis (z', u, w, x_1, y_1, ...): column 1 is a vector of square length 2,
    columns 2 and 3 are u and w, the rest are hyperbolic pairs spanning the
    orthogonal complement.  Vectors are found by exhaustive search in a
    deterministic enumeration order, so the output is reproducible; in the
    already-standard frame the result is the identity.
    """
    ring = space.ring
    total = space if isinstance(space, QuadraticSpace) else space.total
    d = total.rank
    if d % 2 == 0 or d < 3:
        raise DimensionMismatch(f"odd rank >= 3 required, got {d}")
    if ring.kind != "mod" or not _is_prime(ring.modulus) or ring.modulus > 13:
        raise UnsupportedRing("Witt frames are built over prime fields with p <= 13")
    if not total.is_standard():
        raise UnsupportedRing("Witt frames require the standard odd Gram matrix")
    p = ring.modulus
    if not total.quad(u).is_zero() or not total.quad(w).is_zero():
        raise NotIsotropic("(u, w) must both be isotropic")
    if not total.bilinear(u, w).is_one():
        raise NotOrthogonalPair("<u, w> must equal 1")

    gram_int = [[x.payload for x in row] for row in total.gram.rows]
    inv2 = pow(2, -1, p)

    def pairing_row(v_int):
        return [sum(v_int[a] * gram_int[a][b] for a in range(d)) % p for b in range(d)]

    def quad_int(v_int):
        row = pairing_row(v_int)
        return (sum(r * x for r, x in zip(row, v_int)) * inv2) % p

    def dot_pairing(row, v_int):
        return sum(r * x for r, x in zip(row, v_int)) % p

    u_int = [c.payload for c in u]
    w_int = [c.payload for c in w]
    chosen = [u_int, w_int]

    def complement():
        return _mod_nullspace([pairing_row(c) for c in chosen], p, d)

    z_prime = _search_in_span(complement(), p, d, lambda v: quad_int(v) == 1)
    chosen.append(z_prime)

    pairs = []
    while True:
        basis = complement()
        if not basis:
            break
        ui = _search_in_span(basis, p, d, lambda v: quad_int(v) == 0 and any(v))
        ui_row = pairing_row(ui)
        partner = None
        for b in basis:
            c = dot_pairing(ui_row, b)
            if c:
                partner = [(x * pow(c, -1, p)) % p for x in b]
                break
        if partner is None:
            raise SearchExhausted("isotropic vector pairs with nothing in the complement")
        qy = quad_int(partner)
        wi = [(y - qy * x) % p for y, x in zip(partner, ui)]
        pairs.append((ui, wi))
        chosen.append(ui)
        chosen.append(wi)

    columns = [z_prime, u_int, w_int]
    for a, b in pairs:
        columns.append(a)
        columns.append(b)
    eps = SquareMatrix(ring, [[columns[j][i] for j in range(d)] for i in range(d)])
    if eps.transpose() @ total.gram @ eps != total.gram:
        raise SearchExhausted("constructed frame is not orthogonal")
    return eps
