"""Requests, reports and sweep digests for the command-line front end."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Any, Callable

from frobsplit.errors import (
    EngineError,
    FrobSplitError,
    ParseError,
    ResourceExceeded,
    ValidationError,
)
from frobsplit.fppoly import Prime, RationalPoly
from frobsplit.lattice import Fan, diag_split_toric, toric_fsplit
from frobsplit.pairs import (
    ComplexityOneInstance,
    complexity_one_verdict,
    diag_necessary_complexity_one,
    instance_from_json,
    instance_to_json,
)
from frobsplit.toricpairs import (
    RULE_TORIC,
    BranchDatum,
    ToricAmbient,
    cyclic_cover_verdict,
    fedder_cox,
    toric_pair_verdict,
)
from frobsplit.tvb import TwoStepBundle, bundle_verdict
from frobsplit.verdict import Decision, Value, Verdict

KINDS = ("complexity-one", "cyclic-cover", "toric-pair", "fedder", "toric-diagonal", "tvb")
QUERIES = ("fsplit", "fregular", "diagonal")
DEFAULT_QUERIES = {
    "toric-diagonal": ("diagonal",),
    "fedder": ("fsplit",),
}
PRIME_CAP = 10**4
RULE_NOT_APPLICABLE = "cli:query-not-covered-by-engine"


def to_plain(obj):
    """Make certificates JSON-safe: fractions become strings, tuples lists."""
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else obj.numerator
    if isinstance(obj, Value):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, (frozenset, set)):
        return sorted(to_plain(v) for v in obj)
    return obj


# Instances -----------------------------------------------------------------

@dataclass(frozen=True)
class Instance:
    """A parsed instance: its kind, the engine object and the normalized JSON."""

    kind: str
    payload: Any
    data: dict

    def decide(self, p: int) -> Decision:
        return ENGINES[self.kind](self.payload, p)


def _flags(data):
    return tuple(str(f) for f in data.get("flags", ()))


def _parse_toric_pair(data):
    X = ToricAmbient.from_json(_require(data, "ambient"))
    branches = tuple(BranchDatum.from_json(b) for b in data.get("branches", []))
    return X, branches, _flags(data)


def _parse_cyclic(data):
    X = ToricAmbient.from_json(_require(data, "ambient"))
    return X, BranchDatum.from_json(_require(data, "branch")), _flags(data)


def _parse_fedder(data):
    X = ToricAmbient.from_json(data["ambient"]) if data.get("ambient") else None
    return X, RationalPoly.from_json(_require(data, "f")), _flags(data)


def _parse_diagonal(data):
    return Fan.from_json(_require(data, "fan"))


def _require(data, key):
    if key not in data:
        raise ValidationError(f"missing field {key!r}", key)
    return data[key]


PARSERS: dict[str, Callable] = {
    "complexity-one": instance_from_json,
    "toric-pair": _parse_toric_pair,
    "cyclic-cover": _parse_cyclic,
    "fedder": _parse_fedder,
    "toric-diagonal": _parse_diagonal,
    "tvb": TwoStepBundle.from_json,
}


def _complexity_one(inst: ComplexityOneInstance, p):
    dec = complexity_one_verdict(inst, p)
    try:
        diag = diag_necessary_complexity_one(inst, p)
    except FrobSplitError as exc:
        diag = Verdict.unknown(type(exc).__name__, RULE_NOT_APPLICABLE, {"detail": str(exc)})
    return Decision(dec.fsplit, dec.fregular, diag)


def _toric_diagonal(fan: Fan, p):
    v = Verdict.yes("toric", RULE_TORIC)
    return Decision(toric_fsplit(fan, p), v, diag_split_toric(fan, p))


def _fedder(payload, p):
    X, f, flags = payload
    return Decision(
        fedder_cox(X, f, p, flags),
        Verdict.unknown("no-f-regularity-rule", RULE_NOT_APPLICABLE),
    )


ENGINES: dict[str, Callable] = {
    "complexity-one": _complexity_one,
    "toric-pair": lambda pl, p: toric_pair_verdict(pl[0], pl[1], p, pl[2]),
    "cyclic-cover": lambda pl, p: cyclic_cover_verdict(pl[0], pl[1], p, pl[2]),
    "fedder": _fedder,
    "toric-diagonal": _toric_diagonal,
    "tvb": bundle_verdict,
}


def parse_instance_text(text: str, source: str = "<instance>", kind: str | None = None) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno, source) from None
    return parse_instance(data, kind)


def parse_instance(data: dict, kind: str | None = None) -> Instance:
    if not isinstance(data, dict):
        raise ValidationError("instance must be a JSON object", "$")
    declared = data.get("kind")
    if declared is None and kind is None:
        raise ValidationError("instance has no 'kind'", "kind")
    if declared is not None and kind is not None and declared != kind:
        raise ValidationError(f"instance kind {declared!r} does not match subcommand {kind!r}", "kind")
    kind = kind or declared
    if kind not in PARSERS:
        raise ValidationError(f"unknown instance kind {kind!r}", "kind")
    try:
        payload = PARSERS[kind](data)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed {kind} instance: {exc}", kind) from None
    return Instance(kind, payload, dict(data, kind=kind))


# Requests and reports ------------------------------------------------------

def parse_primes(text: str, allow_large=False) -> list[int]:
    """``"7"``, ``"2..23"`` or ``"2,3,5"``; ranges keep only the primes."""
    from sympy import primerange

    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..", 1)
            a, b = int(a), int(b)
            if b < a:
                raise ValidationError(f"empty prime range {part}", "primes")
            if b > PRIME_CAP and not allow_large:
                raise ResourceExceeded(f"prime range upper end (pass --allow-large-primes to exceed)", PRIME_CAP, b)
            out.extend(int(q) for q in primerange(a, b + 1))
        else:
            q = int(Prime(int(part)))
            if q > PRIME_CAP and not allow_large:
                raise ResourceExceeded("prime (pass --allow-large-primes to exceed)", PRIME_CAP, q)
            out.append(q)
    return out


@dataclass(frozen=True)
class Request:
    instance: Instance
    primes: tuple[int, ...]
    queries: tuple[str, ...] = ("fsplit", "fregular")
    output_format: str = "table"
    expect: Value | None = None

    def __post_init__(self):
        primes = tuple(sorted({int(Prime(q)) for q in self.primes}))
        if not primes:
            raise ValidationError("request needs at least one prime", "primes")
        object.__setattr__(self, "primes", primes)
        queries = tuple(dict.fromkeys(self.queries))
        if not queries or any(q not in QUERIES for q in queries):
            raise ValidationError(f"queries must be a nonempty subset of {QUERIES}", "query")
        object.__setattr__(self, "queries", queries)
        if self.output_format not in ("table", "json"):
            raise ValidationError("format must be table or json", "format")
        if self.expect is not None:
            object.__setattr__(self, "expect", Value(self.expect))


@dataclass(frozen=True)
class Record:
    prime: int
    query: str
    verdict: Verdict

    def to_json(self) -> dict:
        v = self.verdict.to_json()
        v["certificate"] = to_plain(v["certificate"])
        return {"prime": self.prime, "query": self.query, "verdict": v}

    @classmethod
    def from_json(cls, data: dict) -> Record:
        return cls(int(data["prime"]), data["query"], Verdict.from_json(data["verdict"]))


@dataclass(frozen=True)
class Report:
    kind: str
    instance: dict
    primes: tuple[int, ...]
    queries: tuple[str, ...]
    records: tuple[Record, ...] = field(default_factory=tuple)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "instance": self.instance,
            "primes": list(self.primes),
            "queries": list(self.queries),
            "records": [r.to_json() for r in self.records],
            "summary": sweep_summary(self),
        }

    @classmethod
    def from_json(cls, data: dict) -> Report:
        return cls(
            data["kind"],
            data["instance"],
            tuple(data["primes"]),
            tuple(data["queries"]),
            tuple(Record.from_json(r) for r in data["records"]),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def mismatches(self, expect: Value) -> list[Record]:
        return [r for r in self.records if r.verdict.value is not expect]


def run(request: Request) -> Report:
    """Evaluate every requested prime, in ascending order."""
    inst = request.instance
    records = []
    for p in request.primes:
        try:
            dec = inst.decide(p)
        except ValidationError:
            raise
        except Exception as exc:
            raise EngineError(p, exc) from exc
        for q in request.queries:
            v = getattr(dec, q)
            if v is None:
                v = Verdict.unknown("query-not-applicable", RULE_NOT_APPLICABLE, {"kind": inst.kind})
            # normalize the certificate so the report round-trips through JSON
            v = Verdict.from_json(json.loads(json.dumps(dict(v.to_json(), certificate=to_plain(v.certificate)))))
            records.append(Record(p, q, v))
    return Report(inst.kind, to_plain(inst.data), request.primes, request.queries, tuple(records))


# Digest ---------------------------------------------------------------------

def _threshold(yes: list[int], other: list[int]):
    if yes and other and max(other) < min(yes):
        return min(yes)
    return None


def _congruence(yes: list[int], other: list[int]):
    for m in range(2, 13):
        ry = {q % m for q in yes}
        ro = {q % m for q in other}
        if not ry & ro:
            return m, sorted(ry)
    return None


def _digest_one(values: list[tuple[int, Verdict]]) -> dict:
    yes = [p for p, v in values if v.value is Value.YES]
    no = [p for p, v in values if v.value is Value.NO]
    unknown = [(p, v.reason) for p, v in values if v.value is Value.UNKNOWN]
    total = len(values)
    decided = [p for p, v in values if v.value is not Value.UNKNOWN]
    if len(yes) == total:
        pattern, text = "all-yes", "Yes for all tested primes"
    elif len(no) == total:
        pattern, text = "all-no", "No for all tested primes"
    elif not yes:
        pattern, text = "no-yes", f"Yes for 0/{total} primes"
    elif len(yes) == len(decided) and not no:
        pattern, text = "yes-where-decided", f"Yes for {len(yes)}/{total} primes, the rest Unknown"
    else:
        t = _threshold(yes, no)
        cong = _congruence(yes, no)
        if t is not None:
            pattern = f"p>={t}"
            text = f"Yes exactly for p >= {t} among tested primes ({len(yes)}/{total})"
        elif cong is not None:
            m, res = cong
            res_s = ",".join(map(str, res))
            pattern = f"p%{m} in {{{res_s}}}"
            text = f"Yes for {len(yes)}/{total} primes, all ≡ {res_s} mod {m}"
        else:
            pattern, text = "irregular", f"Yes for {len(yes)}/{total} primes, no simple pattern"
    out = {"yes": yes, "no": no, "unknown": [p for p, _ in unknown], "pattern": pattern, "text": text}
    if unknown:
        reasons = Counter(r for _, r in unknown)
        out["unknown_reasons"] = dict(sorted(reasons.items()))
        out["text"] += "; Unknown for {} primes ({})".format(
            len(unknown), ", ".join(f"{r}: {c}" for r, c in sorted(reasons.items()))
        )
    return out


def sweep_summary(report: Report) -> dict:
    """Per-query digest of the observed verdicts; patterns are never extrapolated."""
    by_query: dict[str, list] = {q: [] for q in report.queries}
    for r in report.records:
        by_query[r.query].append((r.prime, r.verdict))
    return {q: _digest_one(vals) for q, vals in by_query.items()}


def format_table(report: Report) -> str:
    headers = ("prime", "query", "verdict", "reason", "rule")
    rows = [
        (str(r.prime), r.query, str(r.verdict.value), r.verdict.reason, r.verdict.rule)
        for r in report.records
    ]
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h) for i, h in enumerate(headers)]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()
    out = [f"instance: {report.kind}", line, "  ".join("-" * w for w in widths)]
    for row in rows:
        out.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    out.append("")
    for q, d in sweep_summary(report).items():
        out.append(f"{q}: {d['text']}".replace("≡", "="))  # table stays ASCII
    return "\n".join(out) + "\n"


def load_schema() -> dict:
    return json.loads(resources.files("frobsplit").joinpath("schemas/report.schema.json").read_text())
