"""Command-line front end.

Every subcommand prints JSON documents on stdout, one per line; diagnostics
and ``--trace`` logs go to stderr.  Exit codes: 0 ok, 1 malformed input,
2 verdict unknown, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from mfrf import zoo
from mfrf.classify import InvariantViolation, UnrecognizedMFRF, classify_three_qubit, slocc_equivalent, verify_certificate
from mfrf.elo import SingularMatrix, decompose_invertible
from mfrf.exactnum import DEFAULT_TOL, OrderCapExceeded, as_exact, root_of_unity
from mfrf.gje import mfrf_reduce
from mfrf.jsonio import (
    FormatError,
    certificate_from_json,
    certificate_to_json,
    dumps,
    matrix_from_json,
    op_to_json,
    reduction_to_json,
    state_from_json,
    state_to_json,
    verdict_to_json,
)
from mfrf.state import StateError

EXIT_OK, EXIT_INPUT, EXIT_UNKNOWN, EXIT_INTERNAL = 0, 1, 2, 3


class InputError(Exception):
    pass


def _load(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def _tol(args) -> float | None:
    return args.tol if args.float else None


def _state(path: str, args):
    return state_from_json(_load(path), tol=_tol(args))


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj) + "\n")


# -- subcommands ------------------------------------------------------------------


def _reduce_one(job):
    path, max_passes, tol = job
    state = state_from_json(_load(path), tol=tol)
    res = mfrf_reduce(state, max_passes)
    if not res.replay() == res.reduced:
        raise InvariantViolation("certificate does not replay onto the reduced form")
    return reduction_to_json(res), [op_to_json(s) for s in res.certificate]


def cmd_reduce(args) -> int:
    jobs = [(p, args.max_passes, _tol(args)) for p in args.states]
    results = _map(_reduce_one, jobs, args.jobs)
    for doc, trace in results:
        if args.trace:
            for line in trace:
                sys.stderr.write(dumps(line) + "\n")
        _emit(doc)
    return EXIT_OK


def cmd_classify3(args) -> int:
    state = _state(args.state, args)
    res = classify_three_qubit(state, with_result=True)
    _emit({"class": res.label, "certificate": certificate_to_json(res.certificate)})
    return EXIT_OK


def _equiv_one(job):
    pa, pb, max_passes, tol = job
    a = state_from_json(_load(pa), tol=tol)
    b = state_from_json(_load(pb), tol=tol)
    v = slocc_equivalent(a, b, max_passes)
    return verdict_to_json(v)


def cmd_equiv(args) -> int:
    if len(args.states) % 2:
        raise InputError("equiv takes pairs of state files")
    pairs = list(zip(args.states[::2], args.states[1::2]))
    jobs = [(a, b, args.max_passes, _tol(args)) for a, b in pairs]
    code = EXIT_OK
    for doc in _map(_equiv_one, jobs, args.jobs):
        _emit(doc)
        if doc["verdict"] == "unknown":
            code = EXIT_UNKNOWN
    return code


def cmd_decompose(args) -> int:
    m = matrix_from_json(_load(args.matrix), tol=_tol(args))
    seq = decompose_invertible(m, args.site)
    _emit(certificate_to_json(seq))
    return EXIT_OK


def cmd_verify(args) -> int:
    a, b = _state(args.a, args), _state(args.b, args)
    seq = certificate_from_json(_load(args.cert), tol=_tol(args))
    _emit(verify_certificate(a, b, seq))
    return EXIT_OK


def _param_scalar(text: str):
    if text.startswith("zeta:"):
        try:
            _, n, k = text.split(":")
            return root_of_unity(int(n), int(k))
        except ValueError as exc:
            raise InputError(f"bad root of unity {text!r}; use zeta:n:k") from exc
    return as_exact(text)


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise InputError(f"expected an integer, got {text!r}") from exc


def cmd_zoo(args) -> int:
    p = args.params
    fam = args.family
    if fam is None:
        _emit({"families": zoo.FAMILIES})
        return EXIT_OK
    if fam == "ghz":
        state = zoo.ghz(_int(p[0]), _int(p[1]) if len(p) > 1 else 2)
    elif fam == "w":
        state = zoo.w(_int(p[0]))
    elif fam == "lme":
        state = zoo.lme_elementary(_int(p[0]), _param_scalar(p[1]) if len(p) > 1 else as_exact(-1))
    elif fam == "hankel":
        state = zoo.hankel_state(_int(p[0]), _int(p[1]), [_param_scalar(x) for x in p[2:]])
    elif fam == "named":
        state = zoo.hypergraph_named(p[0])
    elif fam == "h4-form":
        state = zoo.h4_reduced_form()
    else:
        raise InputError(f"unknown family {fam!r}; choose from {sorted(zoo.FAMILIES)}")
    _emit(state_to_json(state))
    return EXIT_OK


def _map(fn, jobs, workers: int):
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


# -- entry point ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mfrf", description="SLOCC classification by elementary local operations")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--float", action="store_true", help="use the double-precision scalar backend")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="zero tolerance for --float (default 1e-10)")
    common.add_argument("--max-passes", type=int, default=32)
    common.add_argument("--jobs", type=int, default=1, help="worker processes for reduce/equiv over many files")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", parents=[common], help="reduce states to their canonical reduced form")
    p.add_argument("states", nargs="+")
    p.add_argument("--trace", action="store_true", help="log each applied op to stderr")
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("classify3", parents=[common], help="three-qubit SLOCC class")
    p.add_argument("state")
    p.set_defaults(fn=cmd_classify3)

    p = sub.add_parser("equiv", parents=[common], help="SLOCC verdict for pairs of states")
    p.add_argument("states", nargs="+", metavar="a b")
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("decompose", parents=[common], help="factor an invertible matrix into elementary ops")
    p.add_argument("matrix")
    p.add_argument("--site", type=int, default=1)
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("verify", parents=[common], help="replay a certificate from a onto b")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("cert")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("zoo", parents=[common], help="emit a named state family")
    p.add_argument("family", nargs="?")
    p.add_argument("params", nargs="*")
    p.set_defaults(fn=cmd_zoo)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    if args.max_passes < 1:
        sys.stderr.write("error: --max-passes must be >= 1\n")
        return EXIT_INPUT
    try:
        return args.fn(args)
    except (InvariantViolation, UnrecognizedMFRF) as exc:
        sys.stderr.write(f"internal error: {exc}\n")
        return EXIT_INTERNAL
    except (InputError, FormatError, StateError, SingularMatrix, OrderCapExceeded, ValueError, IndexError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
