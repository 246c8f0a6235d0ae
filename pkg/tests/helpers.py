"""Shared builders for randomized test data."""

from orthofactor.rings import Ring, SquareMatrix
from orthofactor.spaces import (
    AmbientSpace,
    complete_hyperbolic_pair,
    is_zero_vector,
    unit_vector,
    vec,
    vec_scale,
    vec_sub,
)
from orthofactor.generators import (
    EvenElementaryToken,
    OddElementaryToken,
    Word,
    partner_index,
    total_space,
)

QQ = Ring.rationals()
F3 = Ring.modular(3)
F5 = Ring.modular(5)
F7 = Ring.modular(7)
Z9 = Ring.modular(9)
Z25 = Ring.modular(25)
Z45 = Ring.modular(45)

ACCEPTANCE_RINGS = (QQ, Z9, Z25, F3, F5)


def rand_element(ring, rng, span=9):
    if ring.kind == "mod":
        return ring.of(rng.randrange(ring.modulus))
    return ring.of(rng.randrange(-span, span + 1))


def rand_vector(ring, n, rng, span=9):
    return tuple(rand_element(ring, rng, span) for _ in range(n))


def rand_orthogonal(space: AmbientSpace, rng, length=5) -> SquareMatrix:
    """Product of random standard generators: orthogonal by construction."""
    dim = space.dim
    tokens = []
    for _ in range(length):
        if dim % 2 == 0:
            while True:
                i, j = rng.sample(range(1, dim + 1), 2)
                if i != partner_index(dim, j):
                    break
            tokens.append(EvenElementaryToken(space, i, j, rand_element(space.ring, rng, 3)))
        else:
            kind = rng.choice([1, 2])
            i = rng.randrange(1, space.m + 1)
            tokens.append(OddElementaryToken(space, kind, i, rand_element(space.ring, rng, 3)))
    return Word(space, tokens).eval()


def sigma_triple(space: AmbientSpace, rng):
    """(u, v, w) with q(u) = 0, <u, v> = <u, w> = 0, u unimodular; valid over
    any supported ring because it is a moved copy of a hyperbolic-slot datum."""
    tot = total_space(space)
    dim = tot.rank
    k = space.x_index(rng.randrange(1, space.m + 1))
    partner = k + 1
    a = unit_vector(space.ring, dim, k)

    def orth_to_a():
        coords = list(rand_vector(space.ring, dim, rng, 4))
        coords[partner] = space.ring.zero()
        return tuple(coords)

    eps = rand_orthogonal(space, rng)
    u = eps.apply(a)
    v = eps.apply(orth_to_a())
    w = eps.apply(orth_to_a())
    return u, v, w


def rand_isotropic(space, rng):
    """Nonzero isotropic vector over a finite field, by rejection."""
    tot = total_space(space)
    p = tot.ring.modulus
    while True:
        u = vec(tot.ring, [rng.randrange(p) for _ in range(tot.rank)])
        if not is_zero_vector(u) and tot.quad(u).is_zero():
            return u


def rand_orthogonal_to(space, u, rng):
    """Random v with <u, v> = 0, over a field or squarefree modulus."""
    tot = total_space(space)
    p = tot.ring.modulus
    y = complete_hyperbolic_pair(tot, u)
    t = vec(tot.ring, [rng.randrange(p) for _ in range(tot.rank)])
    return vec_sub(t, vec_scale(tot.bilinear(u, t), y))
