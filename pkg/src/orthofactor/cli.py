"""Command-line surface: batch verification, factorization, closure reports.

All input and output is JSON.  Identical inputs produce byte-identical
reports (keys are sorted, separators fixed).  Exit codes: 0 on success, 1 on
a domain error (structured {"error", "detail"} emitted), 2 on malformed
input.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import OrthoError
from .rings import Ring, matrix_poly_eval
from .generators import total_space
from . import factor as fac
from . import jsonio
from .relgroup import (
    FAMILIES,
    closure_enumerate,
    crt_localize,
    equality_report,
    family_space,
    family_tokens,
)

DEFAULT_EQUALITY_SUITE = [(3, 3), (3, 4), (3, 5), (5, 3)]


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _emit(args, obj) -> None:
    text = _dump(obj)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_ring(text: str) -> Ring:
    if text.lower() == "qq":
        return Ring.rationals()
    if text.startswith("mod:"):
        return Ring.modular(int(text.split(":", 1)[1]))
    raise ValueError(f"unknown ring {text!r}; use qq or mod:N")


def _load_payload(args) -> dict:
    if not getattr(args, "input", None):
        return {}
    text = args.input
    if not text.lstrip().startswith(("{", "[")):
        with open(text, "r", encoding="utf-8") as fh:
            text = fh.read()
    return json.loads(text)


def _load_space(args, payload):
    if "space" in payload:
        return jsonio.decode_space(payload["space"])
    if getattr(args, "space", None):
        with open(args.space, "r", encoding="utf-8") as fh:
            return jsonio.decode_space(json.load(fh))
    if getattr(args, "ring", None) and getattr(args, "dim", None):
        return family_space(_parse_ring(args.ring), args.dim)
    raise ValueError("no space given: supply it in the input, via --space, or via --ring/--dim")


def _cmd_check_orth(args):
    payload = _load_payload(args)
    space = _load_space(args, payload)
    tot = total_space(space)
    matrix = jsonio.decode_matrix(tot.ring, payload["matrix"])
    return {"orthogonal": tot.is_orthogonal(matrix)}


def _cmd_gen(args):
    payload = _load_payload(args)
    space = _load_space(args, payload)
    token = jsonio.decode_token(space, payload["token"])
    return {"matrix": jsonio.encode_matrix(token.matrix())}


def _cmd_factor(args):
    payload = _load_payload(args)
    space = _load_space(args, payload)
    ring = space.ring
    kind = args.kind
    if kind in ("e1", "e2"):
        w = jsonio.decode_vector(ring, payload["w"], space)
        fn = fac.factor_e1_to_oe if kind == "e1" else fac.factor_e2_to_oe
        cert = fn(space, w)
    elif kind == "oe-commutator":
        cert = fac.factor_oe_to_transvections(
            space,
            int(payload["i"]),
            int(payload["j"]),
            jsonio.decode_element(ring, payload["z"]),
        )
    elif kind == "split":
        mat = [[jsonio.decode_element(ring, x) for x in row] for row in payload["map"]]
        cert = fac.split_dser(space, mat, bool(payload.get("dual", False)))
    elif kind == "sigma-axis":
        u = jsonio.decode_vector(ring, payload["u"], space)
        v = jsonio.decode_vector(ring, payload["v"], space)
        cert = fac.factor_sigma_axis(space, u, v)
    elif kind == "sigma-full":
        u = jsonio.decode_vector(ring, payload["u"], space)
        v = jsonio.decode_vector(ring, payload["v"], space)
        cert = fac.factor_sigma_full(space, u, v)
    else:
        raise ValueError(f"unknown factor kind {kind!r}")
    return jsonio.encode_certificate(cert)


def _cmd_verify_word(args):
    payload = _load_payload(args)
    word = jsonio.decode_word(payload["word"])
    product = word.eval()
    out = {"product": jsonio.encode_matrix(product)}
    if "target" in payload:
        target = jsonio.decode_matrix(product.ring, payload["target"])
        out["equals_target"] = product == target
    else:
        out["equals_target"] = None
    return out


def _cmd_closure(args):
    ring = _parse_ring(args.ring)
    space = family_space(ring, args.dim)
    tokens = family_tokens(space, args.family)
    mats = [t.matrix() for t in tokens]
    if args.seed is not None:
        import random

        random.Random(args.seed).shuffle(mats)
    cl = closure_enumerate(mats, args.cap)
    return {
        "ring": args.ring,
        "dim": args.dim,
        "family": args.family,
        "order": cl.order,
        "hash": cl.canonical_hash(),
    }


def _cmd_lift(args):
    payload = _load_payload(args)
    word = jsonio.decode_word(payload["word"])
    lifted = fac.homotopy_lift(word)
    base = total_space(word.space).ring
    product = lifted.eval()
    at0 = matrix_poly_eval(product, base.zero())
    at1 = matrix_poly_eval(product, base.one())
    return {
        "word": jsonio.encode_word(lifted),
        "checks": {
            "at_zero_identity": at0.is_identity(),
            "at_one_matches": at1 == word.eval(),
        },
    }


def _cmd_localize(args):
    payload = _load_payload(args)
    word = jsonio.decode_word(payload["word"])
    parts = crt_localize(word)
    return {
        "components": [
            {"modulus": m, "word": jsonio.encode_word(w)} for m, w in parts
        ]
    }


def _cmd_equality_report(args):
    if args.ring and args.dim:
        suite = [(_parse_ring(args.ring), args.dim)]
    else:
        suite = [(Ring.modular(n), d) for n, d in DEFAULT_EQUALITY_SUITE]
    reports = []
    all_equal = True
    for ring, dim in suite:
        rep = equality_report(ring, dim, args.cap, seed=args.seed)
        all_equal = all_equal and rep["equal"]
        reports.append(rep)
    return {"reports": reports, "all_equal": all_equal}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orthofactor",
        description="exact orthogonal-group generators, factorizations and closure oracles",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, ring_dim=True, space=True):
        p.add_argument("--input", help="input file path or inline JSON")
        p.add_argument("--output", help="write the JSON report here instead of stdout")
        if space:
            p.add_argument("--space", help="JSON file describing the space")
        if ring_dim:
            p.add_argument("--ring", help="qq or mod:N")
            p.add_argument("--dim", type=int, help="total rank of the standard space")

    p = sub.add_parser("check-orth", help="test T^t G T = G for a matrix")
    common(p)
    p.set_defaults(fn=_cmd_check_orth)

    p = sub.add_parser("gen", help="realize one generator token as a matrix")
    common(p)
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("factor", help="produce a self-verified factorization certificate")
    common(p)
    p.add_argument(
        "--kind",
        required=True,
        choices=["e1", "e2", "oe-commutator", "split", "sigma-axis", "sigma-full"],
    )
    p.set_defaults(fn=_cmd_factor)

    p = sub.add_parser("verify-word", help="multiply a word out and compare to a target")
    common(p, ring_dim=False, space=False)
    p.set_defaults(fn=_cmd_verify_word)

    p = sub.add_parser("closure", help="enumerate the subgroup generated by a family")
    p.add_argument("--ring", required=True, help="mod:N")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--family", choices=list(FAMILIES), default="elementary")
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--seed", type=int, default=None, help="shuffle generator order")
    p.add_argument("--output")
    p.set_defaults(fn=_cmd_closure)

    p = sub.add_parser("lift", help="lift a transvection word to the polynomial ring")
    common(p, ring_dim=False, space=False)
    p.set_defaults(fn=_cmd_lift)

    p = sub.add_parser("localize", help="reduce a word modulo the prime-power factors")
    common(p, ring_dim=False, space=False)
    p.set_defaults(fn=_cmd_localize)

    p = sub.add_parser("equality-report", help="closure equalities of the generator families")
    p.add_argument("--ring", help="mod:N (with --dim); default runs the desk suite")
    p.add_argument("--dim", type=int)
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output")
    p.set_defaults(fn=_cmd_equality_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.fn(args)
    except OrthoError as exc:
        _emit(args, {"error": type(exc).__name__, "detail": str(exc)})
        return 1
    except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        _emit(args, {"error": "ParseError", "detail": str(exc)})
        return 2
    _emit(args, report)
    return 0


if __name__ == "__main__":
    sys.exit(main())
