"""Ideal-level bookkeeping, relative word shapes, CRT localization and the
brute-force closure oracle.

The oracle enumerates the subgroup generated by a finite matrix set over
Z/N by breadth-first products and is the ground truth for the group-equality
claims this package certifies at desk scale.  Relative membership is only
ever certified through word shapes; nothing here decides membership for an
arbitrary matrix.
"""

from __future__ import annotations

import hashlib
import os
from math import gcd
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import CapExceeded, DimensionMismatch, UnsupportedRing
from .rings import Ring, RingElement, SquareMatrix
from .spaces import AmbientSpace
from .generators import (
    ConjToken,
    DserToken,
    EvenElementaryToken,
    OddElementaryToken,
    Token,
    TransvectionToken,
    Word,
    _convert_space,
    partner_index,
    total_space,
)

DEFAULT_CLOSURE_CAP = 10**6
TRUE_RELATIVE = "true-relative"
NORMAL_CLOSURE = "relative-normal-closure"


class IdealSpec:
    """Decidable ideal of a supported ring: {0} or R for QQ, a divisor ideal
    (d) for Z/N, and I[X] for polynomial extensions."""

    __slots__ = ("ring", "data")

    def __init__(self, ring: Ring, data):
        self.ring = ring
        self.data = data

    @classmethod
    def zero(cls, ring: Ring) -> "IdealSpec":
        if ring.kind == "QQ":
            return cls(ring, "zero")
        if ring.kind == "mod":
            return cls(ring, ring.modulus)
        return cls(ring, cls.zero(ring.base))

    @classmethod
    def unit(cls, ring: Ring) -> "IdealSpec":
        if ring.kind == "QQ":
            return cls(ring, "unit")
        if ring.kind == "mod":
            return cls(ring, 1)
        return cls(ring, cls.unit(ring.base))

    @classmethod
    def of_divisor(cls, ring: Ring, d: int) -> "IdealSpec":
        if ring.kind != "mod":
            raise UnsupportedRing("divisor ideals only exist for modular rings")
        return cls(ring, gcd(d, ring.modulus) or ring.modulus)

    @classmethod
    def extension(cls, base_ideal: "IdealSpec", ring: Ring) -> "IdealSpec":
        if ring.kind != "poly" or ring.base != base_ideal.ring:
            raise UnsupportedRing("extension needs the matching polynomial ring")
        return cls(ring, base_ideal)

    def contains_element(self, x: RingElement) -> bool:
        if x.ring != self.ring:
            raise UnsupportedRing(f"element of {x.ring} against ideal of {self.ring}")
        if self.ring.kind == "QQ":
            return self.data == "unit" or x.is_zero()
        if self.ring.kind == "mod":
            return x.payload % self.data == 0
        return all(self.data.contains_element(c) for c in x.payload)

    def contains_ideal(self, other: "IdealSpec") -> bool:
        if self.ring != other.ring:
            raise UnsupportedRing("ideals of different rings are incomparable")
        if self.ring.kind == "QQ":
            return self.data == "unit" or other.data == "zero"
        if self.ring.kind == "mod":
            return other.data % self.data == 0
        return self.data.contains_ideal(other.data)

    def __eq__(self, other):
        return (
            isinstance(other, IdealSpec)
            and self.ring == other.ring
            and self.data == other.data
        )

    def __hash__(self):
        return hash((self.ring, str(self.data)))

    def __repr__(self):
        if self.ring.kind == "mod":
            return f"({self.data}) in Z/{self.ring.modulus}"
        if self.ring.kind == "QQ":
            return f"({'0' if self.data == 'zero' else '1'}) in QQ"
        return f"{self.data!r}[X]"


def level_of_elements(ring: Ring, elems: Sequence[RingElement]) -> IdealSpec:
    """Smallest supported ideal containing every element."""
    if ring.kind == "QQ":
        if all(x.is_zero() for x in elems):
            return IdealSpec.zero(ring)
        return IdealSpec.unit(ring)
    if ring.kind == "mod":
        g = ring.modulus
        for x in elems:
            g = gcd(g, x.payload)
        return IdealSpec(ring, g or ring.modulus)
    if ring.kind == "poly":
        coeffs = [c for x in elems for c in x.payload]
        return IdealSpec.extension(level_of_elements(ring.base, coeffs), ring)
    raise UnsupportedRing(f"no ideal arithmetic over {ring}")


def token_level(token: Token) -> IdealSpec:
    """Smallest ideal containing the token's parameters (v for transvections,
    the block minus the identity for GL embeddings)."""
    ring = total_space(token.space).ring
    return level_of_elements(ring, token.params())


def word_level(word: Word) -> IdealSpec:
    ring = total_space(word.space).ring
    return level_of_elements(ring, [p for t in word.tokens for p in t.params()])


class LevelledWord:
    """A word together with a declared ideal level and shape claim."""

    __slots__ = ("word", "level", "shape")

    def __init__(self, word: Word, level: IdealSpec, shape: str):
        if shape not in (TRUE_RELATIVE, NORMAL_CLOSURE):
            raise ValueError(f"unknown shape {shape!r}")
        self.word = word
        self.level = level
        self.shape = shape


def check_relative_shape(lw: LevelledWord):
    """Syntactic certificate check of the declared shape.  Returns
    (True, None) or (False, index of the first offending token).  This checks
    word shapes only; it does not decide group membership of matrices."""
    tokens = lw.word.tokens
    level = lw.level
    if lw.shape == TRUE_RELATIVE:
        for idx, t in enumerate(tokens):
            if not level.contains_ideal(token_level(t)):
                return False, idx
        return True, None

    def block_ok(t: Token) -> bool:
        if level.contains_ideal(token_level(t)):
            return True
        if isinstance(t, ConjToken):
            return all(
                level.contains_ideal(token_level(s)) for s in t.inner.tokens
            )
        return False

    def matches(start: int, end: int) -> bool:
        if start == end:
            return True
        t = tokens[start]
        if block_ok(t) and matches(start + 1, end):
            return True
        inv_m = t.inverse().matrix()
        for q in range(start + 1, end):
            if tokens[q].matrix() == inv_m:
                if matches(start + 1, q) and matches(q + 1, end):
                    return True
        return False

    pos = 0
    while pos < len(tokens):
        if block_ok(tokens[pos]):
            pos += 1
            continue
        if matches(pos, len(tokens)):
            return True, None
        return False, pos
    return True, None


# -- CRT localization ---------------------------------------------------------


def factorize(n: int) -> list:
    """Prime-power factorization by trial division, [(p, e), ...]."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def crt_localize(word: Word) -> list:
    """Reduce every token parameter modulo each prime-power factor of N.
    Returns [(modulus, word over Z/modulus), ...]; evaluation commutes with
    the reduction component-wise."""
    ring = total_space(word.space).ring
    if ring.kind != "mod":
        raise UnsupportedRing("localization is defined over Z/N")
    factors = factorize(ring.modulus)
    if len(factors) == 1:
        return [(ring.modulus, word)]
    out = []
    for p, e in factors:
        m = p**e
        target = Ring.modular(m)
        convert = lambda x, t=target: t.of(x.payload)
        new_space = _convert_space(word.space, convert)
        toks = [t.map_ring(convert, new_space) for t in word.tokens]
        out.append((m, Word(new_space, toks)))
    return out


def crt_reconstruct(parts: Sequence) -> SquareMatrix:
    """Glue matrices over coprime moduli back together over Z/prod."""
    total = 1
    for m, _ in parts:
        total *= m
    ring = Ring.modular(total)
    n = parts[0][1].n
    rows = []
    for a in range(n):
        row = []
        for b in range(n):
            x = 0
            for m, mat in parts:
                rest = total // m
                x += mat.rows[a][b].payload * rest * pow(rest, -1, m)
            row.append(x % total)
        rows.append(row)
    return SquareMatrix(ring, rows)


# -- closure oracle -----------------------------------------------------------


def default_closure_cap() -> int:
    env = os.environ.get("ORTHOFACTOR_CAP")
    return int(env) if env else DEFAULT_CLOSURE_CAP


class ClosureSet:
    """The subgroup generated by a finite matrix set over Z/N, stored as
    canonical integer tuples in deterministic discovery order."""

    __slots__ = ("modulus", "dim", "_keys", "_order")

    def __init__(self, modulus: int, dim: int, keys: frozenset, order: list):
        self.modulus = modulus
        self.dim = dim
        self._keys = keys
        self._order = order

    @property
    def order(self) -> int:
        return len(self._keys)

    def canonical_hash(self) -> str:
        h = hashlib.sha256()
        h.update(f"zmod:{self.modulus}:dim:{self.dim}".encode())
        for key in sorted(self._keys):
            h.update(b"|")
            h.update(",".join(str(x) for x in key).encode())
        return h.hexdigest()

    def contains(self, m: SquareMatrix) -> bool:
        return tuple(x.payload for row in m.rows for x in row) in self._keys

    def same_set(self, other: "ClosureSet") -> bool:
        return (
            self.modulus == other.modulus
            and self.dim == other.dim
            and self._keys == other._keys
        )

    def matrices(self) -> Iterator[SquareMatrix]:
        ring = Ring.modular(self.modulus)
        d = self.dim
        for flat in self._order:
            yield SquareMatrix(ring, [flat[a * d : (a + 1) * d] for a in range(d)])

    def __len__(self):
        return len(self._keys)

    def __repr__(self):
        return f"ClosureSet(order={self.order}, dim={self.dim}, mod={self.modulus})"


def closure_enumerate(
    generators: Sequence[SquareMatrix], cap: Optional[int] = None
) -> ClosureSet:
    """Breadth-first closure of the generated subgroup: start at the identity
    and multiply by every generator and its inverse until nothing new appears
    or the cap is exceeded.  Deterministic given the generator order.

    The arithmetic runs on integer arrays; results are exact residues."""
    if not generators:
        raise DimensionMismatch("need at least one generator")
    ring = generators[0].ring
    if ring.kind != "mod":
        raise UnsupportedRing("closure enumeration needs a finite ring Z/N")
    dim = generators[0].n
    for g in generators:
        if g.ring != ring or g.n != dim:
            raise DimensionMismatch("generators must share one ring and dimension")
    if cap is None:
        cap = default_closure_cap()
    modulus = ring.modulus

    gen_arrays = []
    seen_gen = set()
    for g in generators:
        for mat in (g, g.inverse()):
            arr = np.array(
                [[x.payload for x in row] for row in mat.rows], dtype=np.int64
            )
            key = arr.tobytes()
            if key not in seen_gen:
                seen_gen.add(key)
                gen_arrays.append(arr)

    identity = np.eye(dim, dtype=np.int64)
    visited = {identity.tobytes()}
    order = [tuple(int(x) for x in identity.reshape(-1))]
    frontier = [identity]
    while frontier:
        batch = np.stack(frontier)
        frontier = []
        for garr in gen_arrays:
            prods = (batch @ garr) % modulus
            for arr in prods:
                key = arr.tobytes()
                if key not in visited:
                    visited.add(key)
                    if len(visited) > cap:
                        raise CapExceeded(f"closure exceeded cap {cap}")
                    order.append(tuple(int(x) for x in arr.reshape(-1)))
                    frontier.append(arr)
    keys = frozenset(order)
    return ClosureSet(modulus, dim, keys, order)


# -- generator families for the desk-scale equality experiments ----------------


def _nonzero_elements(ring: Ring):
    return [x for x in ring.elements() if not x.is_zero()]


def oe_family(space: AmbientSpace) -> list:
    """All even elementary generators of the standard space, one per valid
    index pair and nonzero parameter."""
    dim = space.dim
    out = []
    for z in _nonzero_elements(space.ring):
        for i in range(1, dim + 1):
            for j in range(1, dim + 1):
                if i == j:
                    continue
                if i == partner_index(dim, j):
                    continue
                out.append(EvenElementaryToken(space, i, j, z))
    return out


def fasel_family(space: AmbientSpace) -> list:
    """One-index odd generators of both kinds over all nonzero parameters."""
    out = []
    for lam in _nonzero_elements(space.ring):
        for kind in (1, 2):
            for i in range(1, space.m + 1):
                out.append(OddElementaryToken(space, kind, i, lam))
    return out


def transvection_family(space: AmbientSpace) -> list:
    """E_1 and E_2 tokens for every nonzero w in the finite Q block and every
    hyperbolic slot."""
    ring = space.ring
    n = space.q.rank
    vectors = [()]
    for _ in range(n):
        vectors = [v + (c,) for v in vectors for c in ring.elements()]
    out = []
    for w in vectors:
        if all(c.is_zero() for c in w):
            continue
        for which in (1, 2):
            for slot in range(1, space.m + 1):
                out.append(TransvectionToken(space, which, w, slot))
    return out


def dser_family(space: AmbientSpace) -> list:
    """Single-entry hyperbolic elementary tokens in both orientations."""
    ring = space.ring
    n, m = space.q.rank, space.m
    out = []
    for c in _nonzero_elements(ring):
        for i in range(m):
            for j in range(n):
                mat = [[ring.zero()] * n for _ in range(m)]
                mat[i][j] = c
                out.append(DserToken(space, mat, dual=False))
                out.append(DserToken(space, mat, dual=True))
    return out


def family_space(ring: Ring, dim: int) -> AmbientSpace:
    """The ambient split used for the closure experiments: one hyperbolic pair
    against an even standard Q, or all pairs against the rank-one odd Q."""
    if dim < 3:
        raise DimensionMismatch("closure experiments need dim >= 3")
    if dim % 2 == 0:
        return AmbientSpace.standard(ring, dim - 2, 1)
    return AmbientSpace.standard(ring, 1, (dim - 1) // 2)


def family_tokens(space: AmbientSpace, family: str) -> list:
    if family == "elementary":
        return oe_family(space) if space.dim % 2 == 0 else fasel_family(space)
    if family == "transvection":
        return transvection_family(space)
    if family == "dser":
        return dser_family(space)
    raise ValueError(f"unknown family {family!r}")

FAMILIES = ("elementary", "transvection", "dser")


def equality_report(ring: Ring, dim: int, cap: Optional[int] = None, seed=None) -> dict:
    """Enumerate the three generator families' closures and compare them as
    sets; the computational counterpart of the generated-group equalities."""
    space = family_space(ring, dim)
    rows = []
    closures = []
    for family in FAMILIES:
        tokens = family_tokens(space, family)
        mats = [t.matrix() for t in tokens]
        if seed is not None:
            import random

            random.Random(seed).shuffle(mats)
        cl = closure_enumerate(mats, cap)
        closures.append(cl)
        rows.append(
            {
                "ring": f"mod:{ring.modulus}",
                "dim": dim,
                "family": family,
                "generators": len(mats),
                "order": cl.order,
                "hash": cl.canonical_hash(),
            }
        )
    equal = all(closures[0].same_set(c) for c in closures[1:])
    return {"rows": rows, "equal": equal}
