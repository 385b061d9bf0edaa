"""Command-line front end: ``frobsplit <kind> --instance FILE --primes 2..23``."""

from __future__ import annotations

import argparse
import sys

from frobsplit.errors import EngineError, FrobSplitError, ParseError, ValidationError
from frobsplit.lattice import hirzebruch_fan, product_fan, projective_space_fan
from frobsplit.pairs import ComplexityOneInstance, instance_to_json
from frobsplit.report import (
    DEFAULT_QUERIES,
    KINDS,
    Instance,
    Request,
    format_table,
    parse_instance,
    parse_instance_text,
    parse_primes,
    run,
)
from frobsplit.verdict import Value


def _fan_preset(text: str):
    """``P2``, ``P1xP1``, ``F3`` (Hirzebruch)."""
    parts = text.split("x")
    fans = []
    for part in parts:
        if part.startswith("P"):
            fans.append(projective_space_fan(int(part[1:])))
        elif part.startswith("F"):
            fans.append(hirzebruch_fan(int(part[1:])))
        else:
            raise ValidationError(f"unknown fan preset {part!r}", "--fan")
    return fans[0] if len(fans) == 1 else product_fan(*fans)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="frobsplit", description="Decide F-splitting, F-regularity and diagonal splitting.")
    sub = ap.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind)
        sp.add_argument("--instance", help="instance JSON file, '-' for stdin")
        sp.add_argument("--prime", action="append", default=[], help="a prime; repeatable")
        sp.add_argument("--primes", help="range A..B or comma list")
        sp.add_argument("--query", help="comma list of fsplit,fregular,diagonal")
        sp.add_argument("--format", choices=("table", "json"), default="table")
        sp.add_argument("--expect", choices=("yes", "no", "unknown"))
        sp.add_argument("--allow-large-primes", action="store_true",
                        help="lift the 10^4 cap on primes; f^(p-1) grows quickly")
        if kind == "complexity-one":
            sp.add_argument("--orders", help="stabilizer orders on P^1, e.g. 2,3,6")
        if kind == "toric-diagonal":
            sp.add_argument("--fan", help="fan preset: P2, P1xP1, F3")
    return ap


def _load_instance(args) -> Instance:
    if getattr(args, "orders", None):
        orders = [int(x) for x in args.orders.split(",") if x.strip()]
        return parse_instance(instance_to_json(ComplexityOneInstance.from_orders(orders)), args.kind)
    if getattr(args, "fan", None):
        return parse_instance({"kind": "toric-diagonal", "fan": _fan_preset(args.fan).to_json()}, args.kind)
    if not args.instance:
        raise ValidationError("an --instance file is required", "--instance")
    if args.instance == "-":
        return parse_instance_text(sys.stdin.read(), "<stdin>", args.kind)
    try:
        with open(args.instance, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {args.instance}: {exc.strerror}", "--instance") from None
    return parse_instance_text(text, args.instance, args.kind)


def build_request(args) -> Request:
    inst = _load_instance(args)
    primes: list[int] = []
    for q in args.prime:
        primes += parse_primes(q, args.allow_large_primes)
    if args.primes:
        primes += parse_primes(args.primes, args.allow_large_primes)
    if args.query:
        queries = tuple(q.strip() for q in args.query.split(",") if q.strip())
    else:
        queries = DEFAULT_QUERIES.get(inst.kind, ("fsplit", "fregular"))
    return Request(inst, tuple(primes), queries, args.format, Value(args.expect) if args.expect else None)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        req = build_request(args)
        report = run(req)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    except EngineError as exc:
        print(f"engine error at p={exc.prime}: {exc.cause}", file=sys.stderr)
        return 1
    except (FrobSplitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(report.dumps() + "\n" if req.output_format == "json" else format_table(report))
    if req.expect is not None:
        bad = report.mismatches(req.expect)
        if bad:
            for r in bad:
                print(f"expected {req.expect} at p={r.prime} ({r.query}), got {r.verdict.value}", file=sys.stderr)
            return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
