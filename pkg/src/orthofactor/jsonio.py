"""JSON encoding of rings, elements, matrices, spaces, tokens, words and
certificates.

Ring descriptors encode as "QQ" | {"mod": N} | {"poly": <base>}; rationals as
"p/q" strings, residues as integers, polynomials as coefficient arrays with
the constant term first; matrices as row arrays under "entries".  Everything
round-trips losslessly, so reports are diffable golden files.
"""

from __future__ import annotations

from fractions import Fraction

from .rings import Ring, RingElement, SquareMatrix
from .spaces import AmbientSpace, QuadraticSpace, standard_gram
from .generators import (
    AltBlockToken,
    ConjToken,
    DserToken,
    EichlerToken,
    EvenElementaryToken,
    GLBlockToken,
    OddElementaryToken,
    Token,
    TransvectionToken,
    Word,
)
from .factor import FactorizationCertificate


def encode_ring(ring: Ring):
    if ring.kind == "QQ":
        return "QQ"
    if ring.kind == "mod":
        return {"mod": ring.modulus}
    return {"poly": encode_ring(ring.base)}


def decode_ring(value) -> Ring:
    if value == "QQ":
        return Ring.rationals()
    if isinstance(value, dict) and "mod" in value:
        return Ring.modular(int(value["mod"]))
    if isinstance(value, dict) and "poly" in value:
        return Ring.polynomial(decode_ring(value["poly"]))
    raise ValueError(f"unknown ring descriptor {value!r}")


def encode_element(x: RingElement):
    kind = x.ring.kind
    if kind == "QQ":
        return str(x.payload)
    if kind == "mod":
        return x.payload
    return [encode_element(c) for c in x.payload]


def decode_element(ring: Ring, value) -> RingElement:
    if ring.kind == "QQ":
        if isinstance(value, str):
            return ring.of(Fraction(value))
        if isinstance(value, int):
            return ring.of(value)
    elif ring.kind == "mod":
        if isinstance(value, int):
            return ring.of(value)
    else:
        if isinstance(value, list):
            return ring.of([decode_element(ring.base, c) for c in value])
        return ring.of([decode_element(ring.base, value)])
    raise ValueError(f"cannot decode {value!r} as an element of {ring}")


def encode_matrix(m: SquareMatrix) -> dict:
    return {"entries": [[encode_element(x) for x in row] for row in m.rows]}


def decode_matrix(ring: Ring, value) -> SquareMatrix:
    rows = value["entries"] if isinstance(value, dict) else value
    return SquareMatrix(ring, [[decode_element(ring, x) for x in row] for row in rows])


def encode_vector(v, basis: str = "interleaved") -> dict:
    return {"coords": [encode_element(x) for x in v], "basis": basis}


def decode_vector(ring: Ring, value, space=None):
    """Accept a bare coordinate array (interleaved) or a tagged object; a
    block-basis vector is converted when the ambient space is known."""
    if isinstance(value, dict):
        coords = [decode_element(ring, x) for x in value["coords"]]
        if value.get("basis", "interleaved") == "block":
            if not isinstance(space, AmbientSpace):
                raise ValueError("block-basis vectors need an ambient space")
            return space.interleave_vector(tuple(coords))
        return tuple(coords)
    return tuple(decode_element(ring, x) for x in value)


def encode_space(space) -> dict:
    if isinstance(space, AmbientSpace):
        return {
            "q": encode_space(space.q),
            "pairs": space.m,
        }
    return {
        "rank": space.rank,
        "gram": encode_matrix(space.gram),
        "ring": encode_ring(space.ring),
    }


def decode_space(value):
    """Quadratic spaces are {"rank", "gram"?, "ring"}; ambient spaces are
    {"q": <space>, "pairs": m}.  A missing gram means the standard form."""
    if "q" in value:
        q = decode_space(value["q"])
        return AmbientSpace(q, int(value["pairs"]))
    ring = decode_ring(value["ring"])
    rank = int(value["rank"])
    if "gram" in value:
        gram = decode_matrix(ring, value["gram"])
    else:
        gram = standard_gram(ring, rank)
    return QuadraticSpace(gram)


def encode_token(t: Token) -> dict:
    if isinstance(t, EvenElementaryToken):
        return {"kind": "oe", "i": t.i, "j": t.j, "z": encode_element(t.z)}
    if isinstance(t, OddElementaryToken):
        out = {"kind": f"f{t.fkind}", "i": t.i, "lam": encode_element(t.lam)}
        if t.j is not None:
            out["j"] = t.j
        return out
    if isinstance(t, DserToken):
        return {
            "kind": "e_beta" if t.dual else "e_alpha",
            "map": [[encode_element(x) for x in row] for row in t.mat],
        }
    if isinstance(t, TransvectionToken):
        return {
            "kind": f"e{t.which}",
            "w": [encode_element(x) for x in t.w],
            "slot": t.slot,
        }
    if isinstance(t, EichlerToken):
        return {
            "kind": "sigma",
            "u": [encode_element(x) for x in t.u],
            "v": [encode_element(x) for x in t.v],
        }
    if isinstance(t, GLBlockToken):
        return {"kind": "gl", "block": encode_matrix(t.a)}
    if isinstance(t, AltBlockToken):
        return {"kind": f"alt{t.alt_kind}", "block": encode_matrix(t.a)}
    if isinstance(t, ConjToken):
        return {
            "kind": "conj",
            "eps": encode_matrix(t.eps),
            "word": encode_word(t.inner),
        }
    raise ValueError(f"cannot encode token {t!r}")


def decode_token(space, value) -> Token:
    ring = space.ring
    kind = value["kind"]
    if kind == "oe":
        return EvenElementaryToken(
            space, int(value["i"]), int(value["j"]), decode_element(ring, value["z"])
        )
    if kind in ("f1", "f2", "f3", "f4", "f5"):
        j = int(value["j"]) if "j" in value else None
        return OddElementaryToken(
            space, int(kind[1]), int(value["i"]), decode_element(ring, value["lam"]), j
        )
    if kind in ("e_alpha", "e_beta"):
        mat = [[decode_element(ring, x) for x in row] for row in value["map"]]
        return DserToken(space, mat, dual=(kind == "e_beta"))
    if kind in ("e1", "e2"):
        w = tuple(decode_element(ring, x) for x in value["w"])
        return TransvectionToken(space, int(kind[1]), w, int(value.get("slot", 1)))
    if kind == "sigma":
        u = decode_vector(ring, value["u"], space)
        v = decode_vector(ring, value["v"], space)
        return EichlerToken(space, u, v)
    if kind == "gl":
        return GLBlockToken(space, decode_matrix(ring, value["block"]).rows)
    if kind in ("alt1", "alt2"):
        return AltBlockToken(space, decode_matrix(ring, value["block"]).rows, int(kind[3]))
    if kind == "conj":
        inner = decode_word(value["word"])
        eps = decode_matrix(inner.space.ring, value["eps"])
        return ConjToken(space, eps, inner)
    raise ValueError(f"unknown token kind {kind!r}")


def encode_word(w: Word) -> dict:
    return {
        "space": encode_space(w.space),
        "tokens": [encode_token(t) for t in w.tokens],
    }


def decode_word(value) -> Word:
    space = decode_space(value["space"])
    tokens = [decode_token(space, t) for t in value.get("tokens", [])]
    return Word(space, tokens)


def encode_certificate(cert: FactorizationCertificate) -> dict:
    return {
        "target": encode_matrix(cert.target),
        "word": encode_word(cert.word),
        "provenance": list(cert.provenance),
        "verified": cert.verified,
    }
