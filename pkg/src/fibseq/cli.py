"""Command-line front end. Every run prints {"config": ..., "result": ...} as JSON.

Examples:
  fibseq fib --n 6
  fibseq transform --x '{"prefix": ["1"], "tail": {"kind": "zero"}}' --n 2
  fibseq classify --x '{"tail": {"kind": "constant", "c": "1"}}' --space 'c(F,p)' --p '{"constant": "1"}'
  fibseq dual --a '{"prefix": ["1"]}' --space 'c0(F,p)' --kind beta --p '{"constant": "2"}'
  fibseq matmap --matrix '{"kind": "builtin", "name": "fhat"}' --source 'c0(F,p)' --target 'c0(q)'
  fibseq identities --cassini-max 100

Exit status: 0 on success, 1 for an inconclusive verdict under --strict,
2 for invalid input (reported as JSON on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .conditions import WitnessSearchConfig
from .duals import dual_membership, dual_set_check
from .errors import FibseqError, SchemaError
from .fib import cassini_residual, fib, fib_prefix_sum
from .matmaps import classify_mapping, condition_check, parse_matrix
from .numeric import DEFAULT_PRECISION, to_json
from .seq import Status, Verdict, parse_exponent_seq, parse_seq
from .spaces import classify, g_paranorm, gstar_paranorm, h1, h2
from .transform import basis_expand, fhat_apply, inverse_apply

DEFAULT_TRUNC = 64


def _document(text: str):
    """Inline JSON, or the path of a file holding it."""
    stripped = text.lstrip()
    if not stripped.startswith(("{", "[")):
        path = Path(text)
        if not path.is_file():
            raise SchemaError(f"expected inline JSON or a file path, got {text!r}")
        stripped = path.read_text(encoding="utf-8")
    try:
        return json.loads(stripped)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None


def _trunc(args, default: int) -> int:
    N = default if args.trunc is None else args.trunc
    if N < 1:
        raise SchemaError("--trunc must be positive")
    return N


def _witness_config(args) -> WitnessSearchConfig:
    try:
        return WitnessSearchConfig(truncation=_trunc(args, WitnessSearchConfig.truncation),
                                   grid_max_exponent=args.witness_max, tol=args.tol)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None


def _exponents(text: str | None):
    return parse_exponent_seq(_document(text if text is not None else '{"constant": "1"}'))


# ---------------------------------------------------------------------------
# subcommands: each returns (result, resolved config extras)
# ---------------------------------------------------------------------------

def cmd_fib(args):
    if args.n < 0:
        raise SchemaError("--n must be nonnegative")
    return str(fib(args.n)), {}


def cmd_transform(args):
    return fhat_apply(parse_seq(_document(args.x)), args.n), {}


def cmd_inverse(args):
    return inverse_apply(parse_seq(_document(args.y)), args.n), {}


_PARANORMS = {"g": g_paranorm, "gstar": gstar_paranorm, "h1": h1, "h2": h2}


def cmd_paranorm(args):
    x = parse_seq(_document(args.x))
    p = _exponents(args.p)
    N = _trunc(args, DEFAULT_TRUNC)
    value = _PARANORMS[args.kind](x, p, N, args.precision, include_tail=not args.no_tail)
    return {"kind": args.kind, "value": value}, {"trunc": N}


def cmd_classify(args):
    x = parse_seq(_document(args.x))
    N = _trunc(args, DEFAULT_TRUNC)
    report = classify(x, args.space, _exponents(args.p), N, args.tol, args.precision)
    return report, {"trunc": N}


def cmd_basis(args):
    x = parse_seq(_document(args.x))
    N = _trunc(args, max(args.n, len(x.prefix)) + 8)
    return basis_expand(x, args.n, _exponents(args.p), N, args.precision), {"trunc": N}


def cmd_dual(args):
    a = parse_seq(_document(args.a))
    p = _exponents(args.p)
    cfg = _witness_config(args)
    if args.set is not None:
        verdict = dual_set_check(args.set, a, p, cfg, args.precision)
    else:
        if not args.space or not args.kind:
            raise SchemaError("dual needs --set, or both --space and --kind")
        verdict = dual_membership(args.space, args.kind, a, p, cfg, args.precision)
    return verdict, {"witness": cfg.to_dict()}


def cmd_matmap(args):
    A = parse_matrix(_document(args.matrix))
    p, q = _exponents(args.p), _exponents(args.q)
    cfg = _witness_config(args)
    if args.condition:
        verdict = condition_check(args.condition, A, p, q, cfg, args.precision)
    else:
        if not args.source or not args.target:
            raise SchemaError("matmap needs --condition, or both --source and --target")
        verdict = classify_mapping(A, args.source, args.target, p, q, cfg, args.precision)
    return verdict, {"witness": cfg.to_dict()}


def cmd_identities(args):
    if args.cassini_max < 1:
        raise SchemaError("--cassini-max must be at least 1")
    cassini = all(cassini_residual(n) == (-1) ** (n + 1) for n in range(1, args.cassini_max + 1))
    prefix = all(fib_prefix_sum(n) == fib(n + 2) - 1 for n in range(args.cassini_max + 1))
    return {"cassini": "ok" if cassini else "failed",
            "prefix_sum": "ok" if prefix else "failed"}, {}


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trunc", type=int, default=None, help="truncation index N")
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION, help="binary precision in bits")
    common.add_argument("--tol", type=float, default=1e-12, help="stabilization tolerance")
    common.add_argument("--witness-max", type=int, default=20,
                        help="witness grid is 2, 4, ..., 2**EXP")
    common.add_argument("--strict", action="store_true", help="exit 1 on an inconclusive verdict")

    ap = argparse.ArgumentParser(prog="fibseq", description="Fibonacci difference sequence spaces")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("fib", parents=[common], help="the Fibonacci number f_n (f_0 = f_1 = 1)")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(run=cmd_fib)

    s = sub.add_parser("transform", parents=[common], help="y = F x, entries 0..n")
    s.add_argument("--x", required=True, help="sequence JSON or file")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(run=cmd_transform)

    s = sub.add_parser("inverse", parents=[common], help="x = V y, entries 0..n")
    s.add_argument("--y", required=True, help="sequence JSON or file")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(run=cmd_inverse)

    s = sub.add_parser("paranorm", parents=[common], help="g, g*, h1 or h2 of a sequence")
    s.add_argument("--x", required=True)
    s.add_argument("--p", default=None, help="exponent sequence JSON (default constant 1)")
    s.add_argument("--kind", choices=sorted(_PARANORMS), default="g")
    s.add_argument("--no-tail", action="store_true", help="only indices up to the truncation")
    s.set_defaults(run=cmd_paranorm)

    s = sub.add_parser("classify", parents=[common], help="membership in a sequence space")
    s.add_argument("--x", required=True)
    s.add_argument("--space", required=True, help="e.g. c0(p), c(F,p), linf_fhat, l(F,p)")
    s.add_argument("--p", default=None)
    s.set_defaults(run=cmd_classify)

    s = sub.add_parser("basis", parents=[common], help="basis coefficients, partial sum, residual")
    s.add_argument("--x", required=True)
    s.add_argument("--n", type=int, required=True, help="last basis index in the partial sum")
    s.add_argument("--p", default=None)
    s.set_defaults(run=cmd_basis)

    s = sub.add_parser("dual", parents=[common], help="dual set or dual space membership")
    s.add_argument("--a", required=True)
    s.add_argument("--p", default=None)
    s.add_argument("--set", default=None, help="a single set, 1..16")
    s.add_argument("--space", default=None, help="c0(F,p), c(F,p), linf(F,p) or l(F,p)")
    s.add_argument("--kind", choices=("alpha", "beta", "gamma"), default=None)
    s.set_defaults(run=cmd_dual)

    s = sub.add_parser("matmap", parents=[common], help="matrix map conditions")
    s.add_argument("--matrix", required=True, help="matrix JSON or file")
    s.add_argument("--p", default=None)
    s.add_argument("--q", default=None)
    s.add_argument("--source", default=None)
    s.add_argument("--target", default=None)
    s.add_argument("--condition", default=None, help="mt23..mt41, 3.3..3.21 or a lemma id")
    s.set_defaults(run=cmd_matmap)

    s = sub.add_parser("identities", parents=[common], help="exact Fibonacci identity checks")
    s.add_argument("--cassini-max", type=int, required=True)
    s.set_defaults(run=cmd_identities)
    return ap


def _config(args, extras: dict) -> dict:
    skip = {"run", "strict"}
    cfg = {k: v for k, v in vars(args).items() if k not in skip}
    cfg.update(extras)
    cfg["strict"] = args.strict
    return cfg


def _status_of(result) -> Status | None:
    if isinstance(result, Verdict):
        return result.status
    verdict = getattr(result, "verdict", None)
    return verdict.status if isinstance(verdict, Verdict) else None


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.precision < 53:
            raise SchemaError("--precision must be at least 53 bits")
        result, extras = args.run(args)
        out = {"config": _config(args, extras), "result": result}
        text = json.dumps(to_json(out, args.precision), sort_keys=True)
    except ValueError as exc:
        # library input errors are FibseqError; other ValueErrors are bad indices or names
        kind = type(exc).__name__ if isinstance(exc, FibseqError) else "InputError"
        err = {"error": {"type": kind, "message": str(exc)}}
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return 2
    print(text)
    if args.strict and _status_of(result) is Status.INCONCLUSIVE:
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
