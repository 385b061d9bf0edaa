from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import pytest

from frobsplit.cli import main
from frobsplit.errors import ParseError, ResourceExceeded, ValidationError
from frobsplit.report import (
    Report,
    Request,
    load_schema,
    parse_instance,
    parse_instance_text,
    parse_primes,
    run,
    sweep_summary,
)
from frobsplit.verdict import Value

EXAMPLES = Path(__file__).resolve().parent.parent / "examples_instances"


def cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def values(report, query="fsplit"):
    return {r.prime: r.verdict.value for r in report.records if r.query == query}


def test_parse_primes():
    assert parse_primes("2..13") == [2, 3, 5, 7, 11, 13]
    assert parse_primes("5,7") == [5, 7]
    with pytest.raises(ResourceExceeded):
        parse_primes("2..20000")
    assert parse_primes("10007", allow_large=True) == [10007]


def test_complexity_one_sweep():
    inst = parse_instance({"kind": "complexity-one", "base": "P1", "stabilizers": [
        {"point": "0", "order": 2}, {"point": "1", "order": 2}, {"point": "inf", "order": 2}]})
    rep = run(Request(inst, tuple(parse_primes("2..7")), ("fsplit",)))
    assert values(rep) == {2: Value.NO, 3: Value.YES, 5: Value.YES, 7: Value.YES}
    assert sweep_summary(rep)["fsplit"]["pattern"] == "p>=3"


def test_toric_diagonal_p2():
    inst = parse_instance_text((EXAMPLES / "p2_diagonal.json").read_text())
    rep = run(Request(inst, (2, 3), ("diagonal",)))
    assert values(rep, "diagonal") == {2: Value.YES, 3: Value.YES}


def test_triple_cover_sweep():
    inst = parse_instance_text((EXAMPLES / "triple_cover_p1.json").read_text())
    rep = run(Request(inst, tuple(parse_primes("5..13"))))
    assert values(rep) == {5: Value.NO, 7: Value.YES, 11: Value.NO, 13: Value.YES}
    rep = run(Request(inst, tuple(parse_primes("5..100")), ("fsplit",)))
    digest = sweep_summary(rep)["fsplit"]
    assert digest["text"] == "Yes for 11/23 primes, all ≡ 1 mod 3"


def test_summary_all_yes_and_unknown():
    inst = parse_instance({"kind": "toric-pair", "ambient": {"preset": "P", "m": 2}, "branches": []})
    rep = run(Request(inst, (2, 3, 5), ("fsplit", "fregular", "diagonal")))
    s = sweep_summary(rep)
    assert s["fsplit"]["text"] == "Yes for all tested primes"
    assert s["diagonal"]["unknown_reasons"] == {"query-not-applicable": 3}


def test_report_round_trip_and_schema():
    for path in sorted(EXAMPLES.glob("*.json")):
        inst = parse_instance_text(path.read_text(), str(path))
        rep = run(Request(inst, (5, 7), ("fsplit", "fregular", "diagonal")))
        data = json.loads(rep.dumps())
        jsonschema.validate(data, load_schema())
        assert Report.from_json(data) == rep


def test_deterministic_output(capsys):
    args = ["toric-pair", "--instance", str(EXAMPLES / "fano_quartic_double_cover.json"),
            "--primes", "3..13", "--format", "json"]
    first = cli(capsys, *args)
    second = cli(capsys, *args)
    assert first == second and first[0] == 0


def test_expect_exit_codes(capsys):
    base = ["complexity-one", "--orders", "2,3,6", "--prime", "7", "--query", "fsplit"]
    assert cli(capsys, *base, "--expect", "yes")[0] == 0
    code, _, err = cli(capsys, *base, "--expect", "no")
    assert code == 2 and "expected No" in err


def test_parse_error_location(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "tvb",\n  "rank": }')
    with pytest.raises(ParseError) as exc:
        parse_instance_text(bad.read_text(), str(bad))
    assert exc.value.line == 2
    code, _, err = cli(capsys, "tvb", "--instance", str(bad), "--prime", "3")
    assert code == 1 and "parse error" in err and ":2:" in err


def test_validation_and_engine_errors(capsys, tmp_path):
    with pytest.raises(ValidationError):
        parse_instance({"kind": "tvb"}, "fedder")
    code, _, err = cli(capsys, "cyclic-cover", "--instance", str(EXAMPLES / "triple_cover_p1.json"), "--prime", "3")
    assert code == 1 and "p=3" in err
    code, _, err = cli(capsys, "complexity-one", "--orders", "2,2", "--prime", "4")
    assert code == 1


def test_table_output(capsys):
    code, out, _ = cli(capsys, "toric-diagonal", "--fan", "F3", "--primes", "2..5")
    assert code == 0
    lines = out.splitlines()
    assert lines[1].split() == ["prime", "query", "verdict", "reason", "rule"]
    assert out.isascii()
