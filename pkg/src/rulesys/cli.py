"""Command-line front end.

Exit codes: 0 success, 1 invariant violation or failed verification,
2 parse error, 64 usage error. Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .metrics import (
    ANY_CORRECT,
    DEFAULT_SPACE_LIMIT,
    STRICT,
    compactness,
    evaluate,
    format_metrics_table,
    fraction_dict,
    space_coverage,
)
from .model import DomainError, RuleSystem, Schema, SpaceTooLargeError
from .reduce import (
    GUARD_DATA,
    GUARDS,
    greedy_reduce,
    reduction_summary,
    subsumption_prune,
    verify_reduction,
)
from .report import FIXTURES, build_report
from .textio import (
    INVARIANT,
    ParseDiagnostic,
    ParseError,
    _schema_from_text,
    _system_from_text,
    dump_json,
    load_system,
    parse_dataset,
    parse_schema,
    serialize_system,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_USAGE = 64

POLICY_FLAGS = {"strict": STRICT, "any-correct": ANY_CORRECT, "any_correct": ANY_CORRECT}
FORMATS = ("table", "interchange", "json", "markdown")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    schema: Path | None = None
    system: Path | None = None
    reduced: Path | None = None
    dataset: Path | None = None
    policy: str = STRICT
    guard: str = "rules"
    prune: bool = False
    space: bool = False
    space_limit: int = DEFAULT_SPACE_LIMIT
    format: str = "table"
    output: Path | None = None
    log: Path | None = None
    fixture: str | None = None
    label_column: str = "class"
    columns: list[str] | None = None

    def __post_init__(self) -> None:
        if self.guard == GUARD_DATA and self.dataset is None:
            raise UsageError("--guard data requires --dataset")


def _read(path: Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _print_diags(path: Path | str, diags: Sequence[ParseDiagnostic]) -> None:
    for d in diags:
        print(f"{path}:{d}", file=sys.stderr)


def _load_schema(cfg: RunConfig) -> Schema:
    try:
        return parse_schema(_read(cfg.schema))
    except ParseError as e:
        _print_diags(cfg.schema, e.diagnostics)
        raise


def _load_system(path: Path, schema: Schema) -> RuleSystem:
    try:
        return load_system(_read(path), schema)
    except ParseError as e:
        _print_diags(path, e.diagnostics)
        raise


def _load_dataset(cfg: RunConfig, schema: Schema):
    try:
        return parse_dataset(_read(cfg.dataset), schema, cfg.columns, cfg.label_column)
    except ParseError as e:
        _print_diags(cfg.dataset, e.diagnostics)
        raise


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output is not None:
        Path(cfg.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_validate(cfg: RunConfig) -> int:
    schema, diags = _schema_from_text(_read(cfg.schema))
    _print_diags(cfg.schema, diags)
    if schema is None:
        return _diag_exit(diags)
    system, diags = _system_from_text(_read(cfg.system), schema)
    _print_diags(cfg.system, diags)
    if system is None:
        return _diag_exit(diags)
    rules, conds, _ = compactness(system)
    print(f"ok: {rules} rules, {conds} conditions, {len(schema.attributes)} attributes")
    return EXIT_OK


def _diag_exit(diags: Sequence[ParseDiagnostic]) -> int:
    errors = [d for d in diags if d.severity == "error"]
    return EXIT_INVALID if all(d.kind == INVARIANT for d in errors) else EXIT_PARSE


def cmd_evaluate(cfg: RunConfig) -> int:
    schema = _load_schema(cfg)
    system = _load_system(cfg.system, schema)
    data = _load_dataset(cfg, schema)
    metrics, outcomes = evaluate(system, data, cfg.policy)
    space = space_coverage(system, cfg.space_limit) if cfg.space else None
    if cfg.format in ("interchange", "json"):
        doc = {"format_version": 1, "kind": "metrics", **metrics.to_dict()}
        if space is not None:
            doc["space_coverage"] = fraction_dict(space)
        doc["rows_detail"] = [
            {"row": o.index, "fired": list(o.fired), "verdict": o.verdict} for o in outcomes
        ]
        text = dump_json(doc)
    elif cfg.format == "markdown":
        lines = ["| metric | value |", "|---|---|"]
        for k, v in (
            ("accuracy", metrics.accuracy),
            ("coverage", metrics.coverage),
            ("accuracy on covered", metrics.accuracy_on_covered),
        ):
            lines.append(f"| {k} | {v} ({float(v):.4f}) |")
        lines.append(f"| conflict rows | {metrics.conflict_rows} |")
        lines.append(f"| rules | {metrics.rule_count} |")
        lines.append(f"| conditions | {metrics.condition_count} |")
        if space is not None:
            lines.append(f"| space coverage | {space} ({float(space):.4f}) |")
        text = "\n".join(lines) + "\n"
    else:
        text = format_metrics_table(metrics, space)
    _emit(cfg, text)
    return EXIT_OK


def cmd_reduce(cfg: RunConfig) -> int:
    schema = _load_schema(cfg)
    system = _load_system(cfg.system, schema)
    data = _load_dataset(cfg, schema) if cfg.dataset is not None else None
    reduced, log = greedy_reduce(system, cfg.guard, data)
    if cfg.prune:
        reduced = subsumption_prune(reduced)
    fmt = "interchange" if cfg.format in ("interchange", "json") else "dsl"
    summary = reduction_summary(log)
    text = serialize_system(reduced, fmt)
    log_path = cfg.log
    if cfg.output is not None:
        Path(cfg.output).write_text(text, encoding="utf-8")
        if log_path is None:
            log_path = Path(f"{cfg.output}.log.json")
        print(summary)
    else:
        sys.stdout.write(text)
        if fmt == "dsl":
            print(f"# {summary}")
    if log_path is not None:
        Path(log_path).write_text(dump_json(log.to_dict()), encoding="utf-8")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    schema = _load_schema(cfg)
    original = _load_system(cfg.system, schema)
    reduced = _load_system(cfg.reduced, schema)
    data = _load_dataset(cfg, schema) if cfg.dataset is not None else None
    report = verify_reduction(original, reduced, data, cfg.space_limit)
    if cfg.format in ("interchange", "json"):
        text = dump_json(report.to_dict())
    else:
        lines = [report.summary()]
        for clause, message in report.violations:
            lines.append(f"  ({clause}) {message}")
        if report.blocking_pairs:
            lines.append("blocking pairs: " + ", ".join(f"{a}/{b}" for a, b in report.blocking_pairs))
        lines.append("modified rules: " + (", ".join(report.modified_rules) or "none"))
        if report.dropped_rules:
            lines.append("dropped rules: " + ", ".join(report.dropped_rules))
        if report.dataset_coverage is not None:
            a, b = report.dataset_coverage
            lines.append(f"dataset coverage: {a} -> {b}")
        if report.space_coverage is not None:
            a, b = report.space_coverage
            lines.append(f"space coverage: {a} -> {b}")
            lines.append(
                f"descriptions changed: {report.changed_descriptions} "
                f"(newly covered {report.newly_covered_descriptions}, lost {report.lost_descriptions})"
            )
        elif report.space_note:
            lines.append(f"space not enumerated: {report.space_note}")
        text = "\n".join(lines) + "\n"
    _emit(cfg, text)
    return EXIT_OK if report.valid else EXIT_INVALID


def cmd_report(cfg: RunConfig) -> int:
    _emit(cfg, build_report(cfg.fixture, cfg.dataset))
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "evaluate": cmd_evaluate,
    "reduce": cmd_reduce,
    "verify": cmd_verify,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rulesys", description="Evaluate, reduce and verify rule-based classifiers.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def data_flags(sp, required=False):
        sp.add_argument("--dataset", type=Path, required=required, help="CSV dataset")
        sp.add_argument("--label-column", default="class")
        sp.add_argument("--columns", help="comma-separated column order of a headerless CSV")

    sp = sub.add_parser("validate", help="parse and check a schema and rule system")
    sp.add_argument("schema", type=Path)
    sp.add_argument("system", type=Path)

    sp = sub.add_parser("evaluate", help="accuracy, coverage and compactness on a dataset")
    sp.add_argument("schema", type=Path)
    sp.add_argument("system", type=Path)
    sp.add_argument("dataset", type=Path)
    sp.add_argument("--label-column", default="class")
    sp.add_argument("--columns")
    sp.add_argument("--policy", choices=sorted(POLICY_FLAGS), default="strict")
    sp.add_argument("--space", action="store_true", help="add description-space coverage")
    sp.add_argument("--space-limit", type=int, default=DEFAULT_SPACE_LIMIT)
    sp.add_argument("--format", choices=FORMATS, default="table")
    sp.add_argument("-o", "--output", type=Path)

    sp = sub.add_parser("reduce", help="greedy condition removal")
    sp.add_argument("schema", type=Path)
    sp.add_argument("system", type=Path)
    sp.add_argument("--guard", choices=GUARDS, default="rules")
    sp.add_argument("--prune", action="store_true", help="drop subsumed rules afterwards")
    data_flags(sp)
    sp.add_argument("--format", choices=("dsl", "interchange", "json"), default="dsl")
    sp.add_argument("-o", "--output", type=Path)
    sp.add_argument("--log", type=Path, help="reduction log path (default: OUTPUT.log.json)")

    sp = sub.add_parser("verify", help="check a reduced system against its original")
    sp.add_argument("schema", type=Path)
    sp.add_argument("original", type=Path)
    sp.add_argument("reduced", type=Path)
    data_flags(sp)
    sp.add_argument("--space-limit", type=int, default=DEFAULT_SPACE_LIMIT)
    sp.add_argument("--format", choices=("table", "interchange", "json"), default="table")
    sp.add_argument("-o", "--output", type=Path)

    sp = sub.add_parser("report", help="markdown report over a bundled fixture")
    sp.add_argument("--fixture", choices=FIXTURES, required=True)
    sp.add_argument("--dataset", type=Path, help="bankruptcy data file")
    sp.add_argument("-o", "--output", type=Path)
    return p


def _config(ns: argparse.Namespace) -> RunConfig:
    get = lambda name, default=None: getattr(ns, name, default)  # noqa: E731
    columns = get("columns")
    return RunConfig(
        command=ns.command,
        schema=get("schema"),
        system=get("system") or get("original"),
        reduced=get("reduced"),
        dataset=get("dataset"),
        policy=POLICY_FLAGS[get("policy", "strict")],
        guard=get("guard", "rules"),
        prune=get("prune", False),
        space=get("space", False),
        space_limit=get("space_limit", DEFAULT_SPACE_LIMIT),
        format=get("format", "table"),
        output=get("output"),
        log=get("log"),
        fixture=get("fixture"),
        label_column=get("label_column", "class"),
        columns=[c.strip() for c in columns.split(",")] if columns else None,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = _config(ns)
        return COMMANDS[cfg.command](cfg)
    except UsageError as e:
        print(f"rulesys: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as e:
        return EXIT_INVALID if e.kind == INVARIANT else EXIT_PARSE
    except (SpaceTooLargeError, DomainError) as e:
        print(f"rulesys: error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except FileNotFoundError as e:
        print(f"rulesys: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
