import json
import subprocess
import sys

import pytest

from rulesys import fixtures
from rulesys.cli import main
from rulesys.textio import parse_interchange, parse_system

TOY_SCHEMA = str(fixtures.path("toy.schema"))
TOY_RULES = str(fixtures.path("toy.rules"))
TOY_REDUCED = str(fixtures.path("toy_reduced.rules"))
TOY_CSV = str(fixtures.path("toy.csv"))
BK_SCHEMA = str(fixtures.path("bankruptcy.schema"))
GA_RULES = str(fixtures.path("bankruptcy_ga.rules"))


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as e:
        code = e.code
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_ok(capsys):
    code, out, err = run(capsys, "validate", TOY_SCHEMA, TOY_RULES)
    assert code == 0 and out.startswith("ok: 3 rules, 6 conditions") and err == ""


def test_validate_unknown_attribute(capsys, tmp_path):
    bad = tmp_path / "bad.rules"
    bad.write_text("rule NB :- CO = P\nrule B :- XX = N\n")
    code, out, err = run(capsys, "validate", BK_SCHEMA, str(bad))
    assert code == 2 and out == ""
    assert f"{bad}:2:11" in err and "XX" in err


def test_validate_single_class_schema(capsys, tmp_path):
    schema = tmp_path / "one.schema"
    schema.write_text("attribute CO : {N, A, P}\nclasses { NB }\n")
    code, _, err = run(capsys, "validate", str(schema), GA_RULES)
    assert code == 1 and "two classes" in err


def test_validate_warns_on_empty_class(capsys, tmp_path):
    rules = tmp_path / "nb.rules"
    rules.write_text("rule NB :- CO = P\n")
    code, out, err = run(capsys, "validate", BK_SCHEMA, str(rules))
    assert code == 0 and "warning" in err and "'B'" in err


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 64
    assert run(capsys, "validate", TOY_SCHEMA)[0] == 64
    assert run(capsys, "evaluate", TOY_SCHEMA, TOY_RULES, TOY_CSV, "--policy", "loose")[0] == 64
    code, _, err = run(capsys, "reduce", TOY_SCHEMA, TOY_RULES, "--guard", "data")
    assert code == 64 and "--dataset" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "validate", TOY_SCHEMA, str(tmp_path / "none.rules"))
    assert code == 64 and "cannot read" in err


def test_evaluate_table(capsys):
    code, out, _ = run(capsys, "evaluate", TOY_SCHEMA, TOY_RULES, TOY_CSV, "--space")
    assert code == 0 and "4/5" in out and "3/4" in out


def test_evaluate_json(capsys):
    code, out, _ = run(capsys, "evaluate", TOY_SCHEMA, TOY_REDUCED, TOY_CSV, "--format", "json", "--space")
    doc = json.loads(out)
    assert code == 0 and doc["accuracy"]["value"] == 1.0 and doc["space_coverage"]["n"] == 31


def test_evaluate_markdown_to_file(capsys, tmp_path):
    target = tmp_path / "m.md"
    code, out, _ = run(capsys, "evaluate", TOY_SCHEMA, TOY_RULES, TOY_CSV, "--format", "markdown", "-o", str(target))
    assert code == 0 and out == "" and target.read_text().startswith("| metric |")


def test_evaluate_space_limit(capsys):
    code, _, err = run(capsys, "evaluate", TOY_SCHEMA, TOY_RULES, TOY_CSV, "--space", "--space-limit", "10")
    assert code == 1 and "40" in err


def test_evaluate_bad_csv(capsys, tmp_path):
    csv = tmp_path / "bad.csv"
    csv.write_text("P,W,class\n2,LE3\n")
    code, _, err = run(capsys, "evaluate", TOY_SCHEMA, TOY_RULES, str(csv))
    assert code == 2 and "expected 3 fields" in err


def test_reduce_stdout(capsys):
    code, out, _ = run(capsys, "reduce", TOY_SCHEMA, TOY_RULES)
    assert code == 0 and out.rstrip().splitlines()[-1].startswith("# 2 removal(s)")
    assert parse_system(out, fixtures.toy_schema()) == fixtures.toy_reduced()


def test_reduce_files(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "reduce", TOY_SCHEMA, TOY_RULES, "--format", "interchange", "-o", str(target))
    assert code == 0 and out.startswith("2 removal(s)")
    assert parse_interchange(target.read_text()) == fixtures.toy_reduced()
    log = json.loads((tmp_path / "out.json.log.json").read_text())
    assert log["kind"] == "reduction_log" and len(log["events"]) == 6


def test_reduce_prune_ga(capsys, tmp_path):
    target, log = tmp_path / "ga.rules", tmp_path / "ga.log"
    code, _, _ = run(capsys, "reduce", BK_SCHEMA, GA_RULES, "--prune", "-o", str(target), "--log", str(log))
    assert code == 0 and log.exists()
    assert len(parse_system(target.read_text(), fixtures.bankruptcy_schema())) == 5


def test_reduce_data_guard(capsys):
    code, out, _ = run(capsys, "reduce", TOY_SCHEMA, TOY_RULES, "--guard", "data", "--dataset", TOY_CSV)
    assert code == 0 and "# 2 removal(s)" in out


def test_verify(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", TOY_SCHEMA, TOY_RULES, TOY_REDUCED, "--dataset", TOY_CSV)
    assert code == 0 and "valid" in out and "4/5 -> 1" in out
    tampered = tmp_path / "t.rules"
    tampered.write_text(
        "rule NotCar:R1_1 :- W = LE3\nrule NotCar:R1_2 :- P > 10\nrule Car:R2_1 :- W = GE4\n"
    )
    code, out, _ = run(capsys, "verify", TOY_SCHEMA, TOY_RULES, str(tampered), "--format", "json")
    doc = json.loads(out)
    assert code == 1 and doc["verdict"] == "invalid" and ["R2_1", "R1_2"] in doc["blocking_pairs"]


def test_report(capsys, tmp_path):
    code, out, _ = run(capsys, "report", "--fixture", "toy")
    assert code == 0 and out.startswith("#")
    target = tmp_path / "bk.md"
    code, out, _ = run(capsys, "report", "--fixture", "bankruptcy", "-o", str(target))
    assert code == 0 and out == "" and "Genetic algorithm" in target.read_text()


def test_console_script_entry():
    proc = subprocess.run(
        [sys.executable, "-m", "rulesys.cli", "validate", TOY_SCHEMA, TOY_RULES],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("ok:")
