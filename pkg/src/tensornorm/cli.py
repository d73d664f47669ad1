"""Batch command-line front end.

Subcommands: ``check`` (structure verdicts), ``norm`` (maximal singular
value by hgpm, pm, or the brute-force oracle), ``eigen`` (block
eigenproblem of a partially symmetric tensor), ``verify`` (residuals of
a candidate pair).  Output is deterministic: identical inputs and seed
produce byte-identical JSON.

Exit codes: 0 success, 1 file/usage errors, 2 exponent condition
violated, 3 structurally unsolvable (disconnected support or zero
tensor), 4 numerical breakdown or failed verification, 5 not partially
symmetric.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .errors import (
    ConditionViolatedError,
    NegativeEntryError,
    NotPartiallySymmetricError,
    NotWeaklyIrreducibleError,
    NumericalBreakdownError,
    TensorFormatError,
    TensorNormError,
    ZeroTensorError,
)
from .maps import PVector, SingularPair, normalized, residual_check
from .oracle import oracle_norm
from .power import solve_pm
from .solver import SolveResult, SolverConfig, solve_hgpm
from .structure import admissible_indices, analyze_structure
from .symmetry import (
    SymmetryStructure,
    admissibility_note,
    eigen_residuals,
    solve_eigenproblem,
)
from .tensor import SparseTensor, TupleVector, read_tensor

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONDITION = 2
EXIT_STRUCTURE = 3
EXIT_NUMERICAL = 4
EXIT_NOT_SYMMETRIC = 5

VERIFY_TOL = 1e-8


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; keep 2 for the exponent
    # condition and route usage problems to exit 1 instead.
    def error(self, message):
        raise _UsageError(message)


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise _UsageError(f"expected a comma-separated list of numbers, got {text!r}")


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise _UsageError(f"expected a comma-separated list of integers, got {text!r}")


def _load_tensor(path: str) -> SparseTensor:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return read_tensor(handle)
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}")


def _pvector(values: list[float], order: int) -> PVector:
    if len(values) == 1:
        values = values * order
    if len(values) != order:
        raise _UsageError(
            f"got {len(values)} exponents for an order-{order} tensor"
        )
    try:
        return PVector(values)
    except ValueError as exc:
        raise _UsageError(str(exc))


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("TENSORNORM_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise _UsageError(f"TENSORNORM_SEED={env!r} is not an integer")
    return 0


def _result_payload(f, p, result: SolveResult) -> dict:
    payload = {
        "lambda": result.lam,
        "bracket": list(result.bracket) if result.bracket is not None else None,
        "iterations": result.iterations,
        "status": result.status,
        "method": result.method,
        "parts": None,
        "residuals": None,
    }
    if result.vector is not None:
        payload["parts"] = [part.tolist() for part in result.vector.vector.parts]
        payload["residuals"] = residual_check(f, p, result.vector).tolist()
    return payload


def _print_human(payload: dict) -> None:
    print(f"lambda     = {payload['lambda']!r}")
    if payload.get("bracket"):
        lo, hi = payload["bracket"]
        print(f"bracket    = [{lo!r}, {hi!r}]  (width {hi - lo!r})")
    print(f"status     = {payload['status']}  ({payload.get('iterations')} iterations)")
    if payload.get("residuals") is not None:
        print(f"residuals  = {payload['residuals']}")


def _write_trace(path: str, result: SolveResult) -> None:
    final = None
    for rec in reversed(result.trace):
        if rec.x is not None:
            final = rec.x
            break
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("k,lambda_minus,lambda_plus,err_vs_final\n")
        for rec in result.trace:
            if rec.x is not None and final is not None:
                err = float(np.linalg.norm(rec.x.concat() - final.concat()))
                err_text = repr(err)
            else:
                err_text = ""
            handle.write(f"{rec.k},{rec.lambda_minus!r},{rec.lambda_plus!r},{err_text}\n")


def _cmd_check(args) -> int:
    f = _load_tensor(args.tensor)
    p = _pvector(_parse_floats(args.p), f.order)
    if not f.is_nonnegative:
        raise _UsageError("structure analysis requires a nonnegative tensor")
    report = analyze_structure(f, p)
    _emit(
        {
            "weakly_irreducible": report.weakly_irreducible,
            "irreducible": report.irreducible,
            "admissible_indices": list(report.admissible_indices),
            "chosen_index": report.chosen_index,
        }
    )
    if not report.admissible_indices:
        return EXIT_CONDITION
    if not report.weakly_irreducible:
        return EXIT_STRUCTURE
    return EXIT_OK


def _cmd_norm(args) -> int:
    f = _load_tensor(args.tensor)
    p = _pvector(_parse_floats(args.p), f.order)
    keep = args.trace is not None
    if args.method == "hgpm":
        config = SolverConfig(
            epsilon=args.eps,
            max_iter=args.max_iter,
            index_override=args.index,
            keep_iterates=keep,
        )
        result = solve_hgpm(f, p, config)
    elif args.method == "pm":
        exps = set(p.exponents)
        if len(exps) != 1:
            raise ConditionViolatedError(
                f"pm needs one shared exponent, got {p.exponents}"
            )
        if args.index is not None:
            raise _UsageError("--index applies to hgpm only")
        result = solve_pm(
            f, p.p(1), epsilon=args.eps, max_iter=args.max_iter, keep_iterates=keep
        )
    else:  # oracle
        if args.trace is not None:
            raise _UsageError("--trace applies to hgpm and pm only")
        if args.index is not None:
            raise _UsageError("--index applies to hgpm only")
        lam, vector = oracle_norm(f, p, restarts=100, seed=_seed(args))
        pair = SingularPair(lam, vector, p)
        payload = {
            "lambda": lam,
            "bracket": None,
            "iterations": None,
            "status": "oracle",
            "method": "oracle",
            "parts": [part.tolist() for part in vector.parts],
            "residuals": residual_check(f, p, pair).tolist(),
        }
        _emit(payload) if args.json else _print_human(payload)
        return EXIT_OK

    if args.trace is not None:
        _write_trace(args.trace, result)
    payload = _result_payload(f, p, result)
    _emit(payload) if args.json else _print_human(payload)
    if result.status == "numerical_breakdown":
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_eigen(args) -> int:
    f = _load_tensor(args.tensor)
    sizes = _parse_ints(args.blocks)
    if sum(sizes) != f.order:
        raise _UsageError(
            f"block sizes {sizes} do not sum to the tensor order {f.order}"
        )
    exps = _parse_floats(args.p)
    if len(exps) != len(sizes):
        raise _UsageError(
            f"got {len(exps)} exponents for {len(sizes)} blocks"
        )
    block_dims = []
    upto = 0
    for q in sizes:
        chunk = f.dims[upto : upto + q]
        if len(set(chunk)) != 1:
            raise _UsageError(
                f"dims {chunk} are not constant within a block of size {q}"
            )
        block_dims.append(chunk[0])
        upto += q
    try:
        structure = SymmetryStructure(sizes, block_dims, exps)
    except ValueError as exc:
        raise _UsageError(str(exc))
    result = solve_eigenproblem(f, structure, epsilon=args.eps, max_iter=args.max_iter)
    payload = {
        "lambda": result.lam,
        "bracket": list(result.bracket) if result.bracket is not None else None,
        "iterations": result.iterations,
        "status": result.status,
        "method": result.method,
        "blocks": list(structure.block_sizes),
        "parts": None,
        "residuals": None,
        "note": admissibility_note(structure),
    }
    if result.vector is not None:
        ys = [part for part in result.vector.vector.parts]
        payload["parts"] = [part.tolist() for part in ys]
        payload["residuals"] = eigen_residuals(f, structure, result.lam, ys).tolist()
    _emit(payload) if args.json else _print_human(payload)
    if result.status == "numerical_breakdown":
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_verify(args) -> int:
    f = _load_tensor(args.tensor)
    p = _pvector(_parse_floats(args.p), f.order)
    try:
        with open(args.vector, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise _UsageError(f"cannot read {args.vector}: {exc}")
    except json.JSONDecodeError as exc:
        raise TensorFormatError(f"bad vector JSON: {exc}")
    try:
        lam = float(data["lambda"])
        raw_parts = [np.asarray(part, dtype=np.float64) for part in data["parts"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise TensorFormatError(f"bad vector JSON: {exc}")
    omitted = data.get("omitted_mode")
    if not lam > 0:
        raise TensorFormatError(f"lambda must be positive, got {lam}")

    if omitted is not None:
        from .maps import ReducedSingularPair, lift_phi
        from .tensor import ReducedTupleVector

        reduced = ReducedTupleVector(int(omitted), raw_parts)
        parts = [normalized(reduced.part(k), p.p(k)) for k in reduced.modes]
        pair = lift_phi(
            f,
            p,
            int(omitted),
            ReducedSingularPair(lam, ReducedTupleVector(int(omitted), parts), p),
            check_residual=False,
        )
    else:
        if len(raw_parts) != f.order:
            raise TensorFormatError(
                f"vector has {len(raw_parts)} parts for an order-{f.order} tensor"
            )
        parts = [normalized(v, p.p(k)) for k, v in enumerate(raw_parts, start=1)]
        pair = SingularPair(lam, TupleVector(parts), p)

    residuals = residual_check(f, p, pair)
    for mode, value in enumerate(residuals, start=1):
        print(f"mode {mode} residual = {float(value)!r}")
    worst = float(np.max(residuals))
    ok = worst < VERIFY_TOL
    print(f"{'PASS' if ok else 'FAIL'}  (max residual {worst!r}, tolerance {VERIFY_TOL})")
    return EXIT_OK if ok else EXIT_NUMERICAL


def _build_parser() -> _Parser:
    parser = _Parser(prog="tensornorm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="structure and exponent-condition verdicts")
    check.add_argument("tensor")
    check.add_argument("--p", required=True, help="comma-separated exponents")
    check.set_defaults(func=_cmd_check)

    norm = sub.add_parser("norm", help="maximal singular value and vector")
    norm.add_argument("tensor")
    norm.add_argument("--p", required=True, help="comma-separated exponents")
    norm.add_argument("--method", choices=("hgpm", "pm", "oracle"), default="hgpm")
    norm.add_argument("--eps", type=float, default=1e-10)
    norm.add_argument("--max-iter", type=int, default=10000)
    norm.add_argument("--index", type=int, default=None, help="eliminated mode (hgpm)")
    norm.add_argument("--seed", type=int, default=None, help="oracle seed")
    norm.add_argument("--trace", default=None, metavar="PATH", help="per-iteration CSV")
    norm.add_argument("--json", action="store_true")
    norm.set_defaults(func=_cmd_norm)

    eigen = sub.add_parser("eigen", help="block eigenproblem of a symmetric tensor")
    eigen.add_argument("tensor")
    eigen.add_argument("--blocks", required=True, help="comma-separated block sizes")
    eigen.add_argument("--p", required=True, help="one exponent per block")
    eigen.add_argument("--eps", type=float, default=1e-10)
    eigen.add_argument("--max-iter", type=int, default=10000)
    eigen.add_argument("--json", action="store_true")
    eigen.set_defaults(func=_cmd_eigen)

    verify = sub.add_parser("verify", help="residuals of a candidate pair")
    verify.add_argument("tensor")
    verify.add_argument("vector", help="JSON file with lambda and parts")
    verify.add_argument("--p", required=True, help="comma-separated exponents")
    verify.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TensorFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NegativeEntryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConditionViolatedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONDITION
    except (NotWeaklyIrreducibleError, ZeroTensorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURE
    except NumericalBreakdownError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NotPartiallySymmetricError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_SYMMETRIC
    except TensorNormError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
