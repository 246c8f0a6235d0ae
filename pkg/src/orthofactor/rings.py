"""Exact arithmetic over Q, Z/N (odd N) and univariate polynomials, plus dense
square matrices over those rings.

Every value is immutable and kept in a canonical form, so structural equality
is value equality and results are reproducible bit for bit.  2 is a unit in
every supported ring: modular rings reject even moduli at construction.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterator, Sequence

from .errors import (
    DescriptorMismatch,
    DimensionMismatch,
    NonUnit,
    NonUnitDeterminant,
)

_QQ = "QQ"
_MOD = "mod"
_POLY = "poly"


class Ring:
    """Descriptor of a supported coefficient ring.

    Use the factory classmethods: ``Ring.rationals()``, ``Ring.modular(N)``
    (odd N >= 3) and ``Ring.polynomial(base)`` (one variable, base must not
    itself be polynomial).
    """

    __slots__ = ("kind", "modulus", "base", "var", "_key")

    def __init__(self, kind, modulus=None, base=None, var=None):
        self.kind = kind
        self.modulus = modulus
        self.base = base
        self.var = var
        if kind == _QQ:
            self._key = (_QQ,)
        elif kind == _MOD:
            self._key = (_MOD, modulus)
        else:
            self._key = (_POLY, base._key, var)

    @classmethod
    def rationals(cls) -> "Ring":
        return _RATIONALS

    @classmethod
    def modular(cls, n: int) -> "Ring":
        if n < 3 or n % 2 == 0:
            raise ValueError(f"modulus must be odd and >= 3, got {n}")
        ring = _MODULAR_CACHE.get(n)
        if ring is None:
            ring = _MODULAR_CACHE[n] = cls(_MOD, modulus=n)
        return ring

    @classmethod
    def polynomial(cls, base: "Ring", var: str = "X") -> "Ring":
        if base.kind == _POLY:
            raise ValueError("polynomial rings over polynomial rings are not supported")
        key = (base._key, var)
        ring = _POLY_CACHE.get(key)
        if ring is None:
            ring = _POLY_CACHE[key] = cls(_POLY, base=base, var=var)
        return ring

    # -- canonical construction ------------------------------------------

    def of(self, value) -> "RingElement":
        """Coerce ``value`` into this ring (ints always work)."""
        if isinstance(value, RingElement):
            if value.ring is self or value.ring == self:
                return value
            if self.kind == _POLY and value.ring == self.base:
                return self._make(() if value.is_zero() else (value,))
            raise DescriptorMismatch(f"cannot coerce element of {value.ring} into {self}")
        if self.kind == _QQ:
            if isinstance(value, str):
                value = Fraction(value)
            if isinstance(value, (int, Fraction)):
                return self._make(Fraction(value))
        elif self.kind == _MOD:
            if isinstance(value, int):
                return self._make(value % self.modulus)
        else:
            if isinstance(value, int):
                return self.of([value])
            if isinstance(value, (list, tuple)):
                coeffs = [self.base.of(c) for c in value]
                while coeffs and coeffs[-1].is_zero():
                    coeffs.pop()
                return self._make(tuple(coeffs))
        raise TypeError(f"cannot coerce {value!r} into {self}")

    def _make(self, payload) -> "RingElement":
        return RingElement(self, payload)

    def zero(self) -> "RingElement":
        return self.of(0)

    def one(self) -> "RingElement":
        return self.of(1)

    def variable(self) -> "RingElement":
        if self.kind != _POLY:
            raise ValueError("variable() only makes sense for polynomial rings")
        return self.of([0, 1])

    def elements(self) -> Iterator["RingElement"]:
        """All elements, for finite rings only."""
        if self.kind != _MOD:
            raise ValueError(f"{self} is not finite")
        for a in range(self.modulus):
            yield self.of(a)

    def is_finite(self) -> bool:
        return self.kind == _MOD

    def __eq__(self, other):
        return self is other or (isinstance(other, Ring) and self._key == other._key)

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        if self.kind == _QQ:
            return "QQ"
        if self.kind == _MOD:
            return f"Z/{self.modulus}"
        return f"{self.base!r}[{self.var}]"


_RATIONALS = Ring(_QQ)
_MODULAR_CACHE: dict = {}
_POLY_CACHE: dict = {}


def _check_same_ring(a: "RingElement", b: "RingElement") -> None:
    if a.ring != b.ring:
        raise DescriptorMismatch(f"mixed rings {a.ring} and {b.ring}")


class RingElement:
    """One exact ring value; payload is a Fraction, a residue int in [0, N),
    or a trimmed tuple of base coefficients (constant term first)."""

    __slots__ = ("ring", "payload")

    def __init__(self, ring: Ring, payload):
        self.ring = ring
        self.payload = payload

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RingElement):
            _check_same_ring(self, other)
            return other
        if isinstance(other, int):
            return self.ring.of(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        kind = self.ring.kind
        if kind == _QQ:
            return self.ring._make(self.payload + other.payload)
        if kind == _MOD:
            return self.ring._make((self.payload + other.payload) % self.ring.modulus)
        a, b = self.payload, other.payload
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        while out and out[-1].is_zero():
            out.pop()
        return self.ring._make(tuple(out))

    __radd__ = __add__

    def __neg__(self):
        kind = self.ring.kind
        if kind == _QQ:
            return self.ring._make(-self.payload)
        if kind == _MOD:
            return self.ring._make((-self.payload) % self.ring.modulus)
        return self.ring._make(tuple(-c for c in self.payload))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        kind = self.ring.kind
        if kind == _QQ:
            return self.ring._make(self.payload * other.payload)
        if kind == _MOD:
            return self.ring._make((self.payload * other.payload) % self.ring.modulus)
        a, b = self.payload, other.payload
        if not a or not b:
            return self.ring._make(())
        zero = self.ring.base.zero()
        out = [zero] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca.is_zero():
                continue
            for j, cb in enumerate(b):
                out[i + j] = out[i + j] + ca * cb
        while out and out[-1].is_zero():
            out.pop()
        return self.ring._make(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        out = self.ring.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inv()

    def is_zero(self) -> bool:
        kind = self.ring.kind
        if kind == _QQ:
            return self.payload == 0
        if kind == _MOD:
            return self.payload == 0
        return not self.payload

    def is_one(self) -> bool:
        return self == self.ring.one()

    def is_unit(self) -> bool:
        kind = self.ring.kind
        if kind == _QQ:
            return self.payload != 0
        if kind == _MOD:
            return gcd(self.payload, self.ring.modulus) == 1
        # unit in R[X]: unit constant term, all higher coefficients nilpotent
        if not self.payload:
            return False
        if not self.payload[0].is_unit():
            return False
        return all(_is_nilpotent(c) for c in self.payload[1:])

    def inv(self) -> "RingElement":
        kind = self.ring.kind
        if kind == _QQ:
            if self.payload == 0:
                raise NonUnit("0 has no inverse in QQ")
            return self.ring._make(1 / self.payload)
        if kind == _MOD:
            try:
                return self.ring._make(pow(self.payload, -1, self.ring.modulus))
            except ValueError:
                raise NonUnit(f"{self.payload} is not a unit mod {self.ring.modulus}") from None
        return _poly_inv(self)

    def half(self) -> "RingElement":
        """Exact division by 2 (2 is a unit in every supported ring)."""
        return self * _inv2(self.ring)

    def degree(self) -> int:
        """Degree of a polynomial; zero polynomial has degree -1."""
        if self.ring.kind != _POLY:
            raise ValueError("degree() only makes sense for polynomials")
        return len(self.payload) - 1

    def coefficients(self) -> tuple:
        if self.ring.kind != _POLY:
            raise ValueError("coefficients() only makes sense for polynomials")
        return self.payload

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.of(other)
        return (
            isinstance(other, RingElement)
            and self.ring == other.ring
            and self.payload == other.payload
        )

    def __hash__(self):
        return hash((self.ring._key, self.payload))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        kind = self.ring.kind
        if kind == _QQ:
            return str(self.payload)
        if kind == _MOD:
            return str(self.payload)
        if not self.payload:
            return "0"
        var = self.ring.var
        parts = []
        for i, c in enumerate(self.payload):
            if c.is_zero():
                continue
            if i == 0:
                parts.append(repr(c))
            elif i == 1:
                parts.append(f"{c!r}*{var}")
            else:
                parts.append(f"{c!r}*{var}^{i}")
        return " + ".join(parts)


def _inv2(ring: Ring) -> RingElement:
    return ring.of(2).inv()


def _is_nilpotent(c: RingElement) -> bool:
    ring = c.ring
    if ring.kind == _QQ:
        return c.is_zero()
    if ring.kind == _MOD:
        n = ring.modulus
        v = c.payload
        # nilpotent iff every prime of N divides v
        while True:
            g = gcd(v, n)
            if n == 1:
                return True
            if g == 1:
                return False
            while n % g == 0:
                n //= g
    raise NonUnit("nilpotency test unsupported for this ring")


def _poly_inv(p: RingElement) -> RingElement:
    """Inverse of a polynomial unit: invert the constant term, then sum the
    terminating geometric series of the nilpotent tail."""
    ring = p.ring
    if not p.is_unit():
        raise NonUnit(f"{p!r} is not a unit in {ring}")
    c0_inv = ring.of(p.payload[0].inv())
    tail = p * c0_inv - ring.one()  # nilpotent
    out = ring.one()
    power = ring.one()
    for _ in range(256):
        power = power * (-tail)
        if power.is_zero():
            break
        out = out + power
    result = out * c0_inv
    if not (result * p).is_one():
        raise NonUnit(f"{p!r} is not a unit in {ring}")
    return result


def poly_eval(p: RingElement, t: RingElement) -> RingElement:
    """Exact substitution of the variable by ``t`` (an element of the base)."""
    if p.ring.kind != _POLY:
        raise DescriptorMismatch(f"{p.ring} is not a polynomial ring")
    if t.ring != p.ring.base:
        raise DescriptorMismatch(f"evaluation point must lie in {p.ring.base}, got {t.ring}")
    acc = t.ring.zero()
    for c in reversed(p.payload):
        acc = acc * t + c
    return acc


class SquareMatrix:
    """Dense n x n matrix over one ring, stored as a tuple of row tuples."""

    __slots__ = ("ring", "n", "rows")

    def __init__(self, ring: Ring, rows: Sequence[Sequence]):
        self.ring = ring
        self.rows = tuple(tuple(ring.of(x) for x in row) for row in rows)
        self.n = len(self.rows)
        for row in self.rows:
            if len(row) != self.n:
                raise DimensionMismatch("matrix is not square")

    @classmethod
    def _raw(cls, ring: Ring, rows: tuple) -> "SquareMatrix":
        """Internal constructor for rows already in canonical element form."""
        m = cls.__new__(cls)
        m.ring = ring
        m.rows = rows
        m.n = len(rows)
        return m

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "SquareMatrix":
        key = (ring._key, n)
        cached = _IDENTITY_CACHE.get(key)
        if cached is None:
            one, zero = ring.one(), ring.zero()
            rows = tuple(
                tuple(one if i == j else zero for j in range(n)) for i in range(n)
            )
            cached = _IDENTITY_CACHE[key] = cls._raw(ring, rows)
        return cached

    @classmethod
    def zero(cls, ring: Ring, n: int) -> "SquareMatrix":
        z = ring.zero()
        return cls(ring, [[z] * n for _ in range(n)])

    def entry(self, i: int, j: int) -> RingElement:
        return self.rows[i][j]

    def with_entries(self, updates: dict) -> "SquareMatrix":
        """Copy with ``{(i, j): value}`` replaced (0-based)."""
        rows = [list(r) for r in self.rows]
        for (i, j), v in updates.items():
            rows[i][j] = self.ring.of(v)
        return SquareMatrix._raw(self.ring, tuple(tuple(r) for r in rows))

    def __matmul__(self, other: "SquareMatrix") -> "SquareMatrix":
        if not isinstance(other, SquareMatrix):
            return NotImplemented
        if self.ring != other.ring:
            raise DescriptorMismatch(f"mixed rings {self.ring} and {other.ring}")
        if self.n != other.n:
            raise DimensionMismatch(f"sizes {self.n} and {other.n}")
        n = self.n
        ring = self.ring
        if ring.kind == _MOD:
            # same exact arithmetic, done on the int payloads in bulk
            mod = ring.modulus
            make = ring._make
            cols = tuple(
                tuple(x.payload for x in col) for col in zip(*other.rows)
            )
            out = tuple(
                tuple(
                    make(sum(r[k] * c[k] for k in range(n)) % mod) for c in cols
                )
                for r in (tuple(x.payload for x in row) for row in self.rows)
            )
            return SquareMatrix._raw(ring, out)
        if ring.kind == _QQ:
            make = ring._make
            zero = ring.zero()
            cols = tuple(tuple(x.payload for x in col) for col in zip(*other.rows))
            out = []
            for row in self.rows:
                support = [(k, x.payload) for k, x in enumerate(row) if x.payload]
                if not support:
                    out.append((zero,) * n)
                    continue
                out.append(
                    tuple(make(sum(x * col[k] for k, x in support)) for col in cols)
                )
            return SquareMatrix._raw(ring, tuple(out))
        cols = tuple(zip(*other.rows))
        zero = ring.zero()
        out = []
        for row in self.rows:
            support = [(k, x) for k, x in enumerate(row) if not x.is_zero()]
            if not support:
                out.append((zero,) * n)
                continue
            out_row = []
            for col in cols:
                k0, x0 = support[0]
                acc = x0 * col[k0]
                for k, x in support[1:]:
                    acc = acc + x * col[k]
                out_row.append(acc)
            out.append(tuple(out_row))
        return SquareMatrix._raw(self.ring, tuple(out))

    def __add__(self, other: "SquareMatrix") -> "SquareMatrix":
        if self.ring != other.ring:
            raise DescriptorMismatch(f"mixed rings {self.ring} and {other.ring}")
        if self.n != other.n:
            raise DimensionMismatch(f"sizes {self.n} and {other.n}")
        return SquareMatrix._raw(
            self.ring,
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.rows, other.rows)
            ),
        )

    def __sub__(self, other: "SquareMatrix") -> "SquareMatrix":
        return self + (-other)

    def __neg__(self) -> "SquareMatrix":
        return SquareMatrix._raw(self.ring, tuple(tuple(-a for a in row) for row in self.rows))

    def scale(self, c) -> "SquareMatrix":
        c = self.ring.of(c)
        return SquareMatrix._raw(self.ring, tuple(tuple(c * a for a in row) for row in self.rows))

    def transpose(self) -> "SquareMatrix":
        return SquareMatrix._raw(self.ring, tuple(zip(*self.rows)))

    def apply(self, vec: Sequence[RingElement]) -> tuple:
        """Matrix times column vector."""
        if len(vec) != self.n:
            raise DimensionMismatch(f"vector length {len(vec)} vs size {self.n}")
        vec = tuple(self.ring.of(x) for x in vec)
        out = []
        for row in self.rows:
            acc = row[0] * vec[0]
            for k in range(1, self.n):
                acc = acc + row[k] * vec[k]
            out.append(acc)
        return tuple(out)

    def map_entries(self, fn) -> "SquareMatrix":
        """Apply ``fn`` to every entry; result ring inferred from outputs."""
        rows = [[fn(a) for a in row] for row in self.rows]
        return SquareMatrix(rows[0][0].ring, rows)

    def _minor_table(self):
        """Shared memo of sub-determinants, keyed by (rows, cols) index tuples."""
        memo = {}

        def det_of(rows: tuple, cols: tuple) -> RingElement:
            if not rows:
                return self.ring.one()
            key = (rows, cols)
            hit = memo.get(key)
            if hit is not None:
                return hit
            r0 = rows[0]
            rest = rows[1:]
            acc = self.ring.zero()
            for pos, c in enumerate(cols):
                a = self.rows[r0][c]
                if a.is_zero():
                    continue
                sub = det_of(rest, cols[:pos] + cols[pos + 1 :])
                term = a * sub
                acc = acc + term if pos % 2 == 0 else acc - term
            memo[key] = acc
            return acc

        return det_of

    def det(self) -> RingElement:
        idx = tuple(range(self.n))
        return self._minor_table()(idx, idx)

    def inverse(self) -> "SquareMatrix":
        """Inverse via adjugate over the determinant; works over any
        commutative ring as long as det is a unit."""
        idx = tuple(range(self.n))
        det_of = self._minor_table()
        d = det_of(idx, idx)
        if not d.is_unit():
            raise NonUnitDeterminant(f"determinant {d!r} is not a unit in {self.ring}")
        d_inv = d.inv()
        n = self.n
        out = [[None] * n for _ in range(n)]
        for i in range(n):
            rows_wo = idx[:i] + idx[i + 1 :]
            for j in range(n):
                cofactor = det_of(rows_wo, idx[:j] + idx[j + 1 :])
                if (i + j) % 2:
                    cofactor = -cofactor
                out[j][i] = cofactor * d_inv  # adjugate transposes indices
        return SquareMatrix(self.ring, out)

    def is_identity(self) -> bool:
        return self == SquareMatrix.identity(self.ring, self.n)

    def __eq__(self, other):
        return (
            isinstance(other, SquareMatrix)
            and self.ring == other.ring
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.ring._key, self.rows))

    def __repr__(self):
        body = "; ".join(" ".join(repr(a) for a in row) for row in self.rows)
        return f"[{body}] over {self.ring!r}"


_IDENTITY_CACHE: dict = {}


def matrix_poly_eval(m: SquareMatrix, t: RingElement) -> SquareMatrix:
    """Entry-wise substitution lifting poly_eval to matrices."""
    return m.map_entries(lambda p: poly_eval(p, t))


def vector_poly_eval(vec: Sequence[RingElement], t: RingElement) -> tuple:
    return tuple(poly_eval(p, t) for p in vec)
