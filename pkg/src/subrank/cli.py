"""Command-line surface: bounds, certification, tables, witnesses, oracle.

Exit codes are uniform across commands: 0 means certified or verified,
2 means inconclusive or unverified (never a disproof), 1 means a usage,
format, or I/O error. The default modulus comes from SUBRANK_MODULUS when
set; --modulus overrides either, which makes cross-prime replication of a
certificate a one-flag affair.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .bounds import certify_lower, generic_subrank_estimate, upper_bound_generic
from .decomp import (
    DecompSpec,
    InconclusiveError,
    blow_up_witness,
    random_witness,
    verify_witness,
    witness_333,
    witness_from_json_dict,
    witness_order_n,
)
from .field import DEFAULT_MODULUS, FieldSpec
from .oracle import brute_subrank, non_additivity_demo
from .serialize import canonical_dumps, load_json
from .tensor import Tensor

ENV_MODULUS = "SUBRANK_MODULUS"


class CliUsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Shared knobs for the randomized commands."""

    modulus: int = DEFAULT_MODULUS
    base_seed: int = 0
    retries: int = 5
    workers: int = 0  # 0 means all cores
    output_path: str = None
    format: str = "csv"

    def __post_init__(self):
        FieldSpec(self.modulus)  # validates primality
        if self.retries < 1:
            raise ValueError("retries must be >= 1")
        if self.workers < 0:
            raise ValueError("workers must be >= 0")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")

    @property
    def field(self):
        return FieldSpec(self.modulus)

    @property
    def effective_workers(self):
        return self.workers or os.cpu_count() or 1


def _default_modulus():
    raw = os.environ.get(ENV_MODULUS)
    return int(raw) if raw else DEFAULT_MODULUS


def _resolve_modulus(args):
    return args.modulus if args.modulus is not None else _default_modulus()


def _parse_dims(text):
    try:
        dims = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ValueError(f"malformed dims {text!r}; expected comma-separated integers")
    if not dims or any(n < 1 for n in dims):
        raise ValueError("dims must be positive integers")
    return dims


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def cmd_upper(args):
    print(upper_bound_generic(_parse_dims(args.dims)))
    return 0


def cmd_certify(args):
    config = RunConfig(
        modulus=_resolve_modulus(args), base_seed=args.seed, retries=args.retries
    )
    dims = _parse_dims(args.dims)
    result = certify_lower(
        config.field, dims, args.r, mode=args.mode,
        seed=config.base_seed, retries=config.retries,
    )
    payload = {
        "dims": list(dims),
        "r": args.r,
        "mode": args.mode,
        "modulus": config.modulus,
        "certified": result.certified,
        "outcome": result.outcome,
        "seed": result.seed,
        "retries": result.retries_used,
        "immediate": result.immediate,
        "reason": result.reason,
    }
    _emit(canonical_dumps(payload), args.out)
    return 0 if result.certified else 2


def _table_row(payload):
    n, mode, modulus, base_seed, retries = payload
    field = FieldSpec(modulus)
    start = time.perf_counter()
    report = generic_subrank_estimate(
        field, (n, n, n), mode=mode, base_seed=base_seed, retries=retries
    )
    seconds = time.perf_counter() - start
    return {
        "n": n,
        "upper": report.upper_bound,
        "certified_lower": report.certified_lower,
        "match": report.certified_lower == report.upper_bound,
        "seconds": round(seconds, 3),
    }


def table_rows(config, max_n, mode="strong", start_n=1):
    payloads = [
        (n, mode, config.modulus, config.base_seed, config.retries)
        for n in range(start_n, max_n + 1)
    ]
    workers = config.effective_workers
    if workers > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_table_row, payloads))
    return [_table_row(p) for p in payloads]


def _format_table(rows, fmt):
    if fmt == "json":
        return canonical_dumps(rows)
    lines = ["n,upper,certified_lower,match,seconds"]
    for row in rows:
        lines.append(
            f"{row['n']},{row['upper']},{row['certified_lower']},"
            f"{str(row['match']).lower()},{row['seconds']:.3f}"
        )
    return "\n".join(lines)


def cmd_table(args):
    if args.max_n > 100 and not args.allow_large:
        raise ValueError("max-n above 100 needs --allow-large")
    if args.max_n < 1:
        raise ValueError("max-n must be >= 1")
    config = RunConfig(
        modulus=_resolve_modulus(args), base_seed=args.seed, retries=args.retries,
        workers=args.workers, output_path=args.out, format=args.format,
    )
    rows = table_rows(config, args.max_n, mode=args.mode)
    _emit(_format_table(rows, config.format), args.out)
    return 0


def cmd_witness(args):
    config = RunConfig(
        modulus=_resolve_modulus(args), base_seed=args.seed, retries=args.retries
    )
    field = config.field
    if args.order_n is not None:
        w = witness_order_n(field, args.order_n, seed=config.base_seed, retries=config.retries)
    else:
        spec = DecompSpec.parse(args.spec)
        if spec == DecompSpec.of([3, 3, 3], [3, 3, 3]):
            w = witness_333(field, method=args.method, seed=config.base_seed,
                            retries=config.retries)
        elif args.method == "random":
            w = random_witness(field, spec, seed=config.base_seed, retries=config.retries)
        else:
            raise ValueError(
                f"method {args.method!r} is only available for the 3,3,3;3,3,3 spec; "
                "use --method random for other specs"
            )
    if args.blow_up is not None:
        w = blow_up_witness(w, args.blow_up)
    _emit(canonical_dumps(w.to_json_dict()), args.out)
    return 0 if w.verified else 2


def cmd_verify_witness(args):
    w = witness_from_json_dict(load_json(args.file))
    return 0 if verify_witness(w) else 2


def cmd_brute(args):
    d = load_json(args.tensor)
    field = FieldSpec(args.field)
    t = Tensor.from_entries(field, tuple(int(x) for x in d["shape"]), d["entries"])
    print(brute_subrank(t))
    return 0


def cmd_demo(args):
    config = RunConfig(modulus=_resolve_modulus(args), base_seed=args.seed)
    report = non_additivity_demo(config.field, args.n, seed=config.base_seed)
    _emit(canonical_dumps(report), args.out)
    return 0


class _Parser(argparse.ArgumentParser):
    # route usage errors through the uniform exit-code contract
    def error(self, message):
        raise CliUsageError(message)


def build_parser():
    parser = _Parser(prog="subrank", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("upper", cmd_upper, "generic subrank upper bound for given dims")
    p.add_argument("--dims", required=True, help="comma-separated leg sizes, e.g. 10,10,10")

    p = add("certify", cmd_certify, "randomized lower-bound certification")
    p.add_argument("--dims", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--mode", choices=["weak", "strong"], default="strong")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--retries", type=int, default=5)
    p.add_argument("--modulus", type=int, default=None)
    p.add_argument("--out", default=None)

    p = add("table", cmd_table, "upper vs certified lower for cubes n = 1..max-n")
    p.add_argument("--max-n", type=int, default=20)
    p.add_argument("--mode", choices=["weak", "strong"], default="strong")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--retries", type=int, default=5)
    p.add_argument("--modulus", type=int, default=None)
    p.add_argument("--workers", type=int, default=0, help="0 means all cores")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--allow-large", action="store_true")
    p.add_argument("--out", default=None)

    p = add("witness", cmd_witness, "build a verified decomposition witness")
    p.add_argument("--spec", default="3,3,3;3,3,3", help='e.g. "3,3,3;3,3,3"')
    p.add_argument("--method", choices=["derived", "random", "binary"], default="derived")
    p.add_argument("--order-n", type=int, default=None, dest="order_n")
    p.add_argument("--blow-up", type=int, default=None, dest="blow_up")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--retries", type=int, default=5)
    p.add_argument("--modulus", type=int, default=None)
    p.add_argument("--out", default=None)

    p = add("verify-witness", cmd_verify_witness, "re-verify a witness file")
    p.add_argument("file")

    p = add("brute", cmd_brute, "exhaustive subrank of a tiny tensor over GF(2)/GF(3)")
    p.add_argument("--tensor", required=True)
    p.add_argument("--field", type=int, choices=[2, 3], required=True)

    p = add("demo-nonadditive", cmd_demo, "certified direct-sum gap report")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--modulus", type=int, default=None)
    p.add_argument("--out", default=None)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            parser.print_usage(sys.stderr)
            return 1
        return args.func(args)
    except CliUsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InconclusiveError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
