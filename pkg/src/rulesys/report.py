"""Markdown reports over the bundled fixtures."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from . import fixtures
from .metrics import compactness, conflict_pairs, evaluate, space_covered_count
from .model import Dataset, RuleSystem
from .reduce import (
    greedy_reduce,
    reduction_summary,
    semantic_diff,
    subsumed_pairs,
    subsumption_prune,
    verify_reduction,
)
from .textio import serialize_system

FIXTURES = ("toy", "bankruptcy")

# Reducibility as stated for the three induced bankruptcy systems.
REFERENCE_VERDICTS = {"ga": "reducible", "il": "irreducible", "nn": "irreducible"}
LABELS = {"ga": "Genetic algorithm", "il": "Inductive learning", "nn": "Neural network"}


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator} ({float(x):.2%})"


def _space(system: RuleSystem) -> str:
    covered, size = space_covered_count(system)
    return f"{covered}/{size}"


def _code(system: RuleSystem) -> list[str]:
    return ["```", serialize_system(system).rstrip("\n"), "```"]


def toy_report() -> str:
    original = fixtures.toy_system()
    data = fixtures.toy_dataset()
    reduced, log = greedy_reduce(original)
    published = fixtures.toy_reduced()
    before, rows_before = evaluate(original, data)
    after, rows_after = evaluate(reduced, data)
    check = verify_reduction(original, reduced, data)

    out = ["# Reduction report: toy", ""]
    out += ["## Original system", "", *_code(original), ""]
    out += ["## Reduced system", "", *_code(reduced), ""]
    out.append(f"Reduction: {reduction_summary(log)}.")
    out.append(f"Matches the published reduced table: {'yes' if reduced == published else 'no'}.")
    out += ["", "## Metrics", ""]
    out += [
        "| system | rules | conditions | accuracy | coverage | space coverage |",
        "|---|---|---|---|---|---|",
    ]
    for name, sys_, m in (("original", original, before), ("reduced", reduced, after)):
        rules, conds, _ = compactness(sys_)
        out.append(
            f"| {name} | {rules} | {conds} | {_frac(m.accuracy)} | {_frac(m.coverage)} | {_space(sys_)} |"
        )
    out += ["", "## Reduction log", ""]
    for e in log.events:
        extra = f", blocked by {e.blocking_rule}" if e.blocking_rule else ""
        reason = f" ({e.reason}{extra})" if e.reason else ""
        out.append(f"- {e.rule_id}: {e.attribute} {e.decision}{reason}")
    out += ["", "## Verification", "", f"- {check.summary()}"]
    out.append(
        f"- dataset coverage {_frac(check.dataset_coverage[0])} -> {_frac(check.dataset_coverage[1])}"
    )
    newly = [
        o.index + 1
        for o, p in zip(rows_before, rows_after)
        if o.verdict == "uncovered" and p.verdict != "uncovered"
    ]
    if newly:
        out.append(f"- newly covered objects: {', '.join(map(str, newly))}")
    return "\n".join(out) + "\n"


def bankruptcy_report(data_path: str | Path | None = None) -> str:
    systems = {n: fixtures.bankruptcy_system(n) for n in ("ga", "il", "nn")}
    published = fixtures.bankruptcy_system("ga_reduced")
    found = fixtures.find_bankruptcy_data(data_path)
    data: Dataset | None = fixtures.bankruptcy_dataset(found) if found is not None else None

    reductions = {n: greedy_reduce(s) for n, s in systems.items()}
    out = ["# Reduction report: qualitative bankruptcy", ""]
    out += [
        "| system | rules | conditions | space coverage | conflict pairs | removals | verdict | reference verdict |",
        "|---|---|---|---|---|---|---|---|",
    ]
    for n, s in systems.items():
        rules, conds, _ = compactness(s)
        log = reductions[n][1]
        verdict = "reducible" if log.removals else "irreducible"
        out.append(
            f"| {LABELS[n]} | {rules} | {conds} | {_space(s)} | {len(conflict_pairs(s))} "
            f"| {len(log.removals)} | {verdict} | {REFERENCE_VERDICTS[n]} |"
        )
    out += ["", "## After reduction", ""]
    out += [
        "| system | rules | conditions | space coverage | rules after pruning | verification |",
        "|---|---|---|---|---|---|",
    ]
    for n, s in systems.items():
        reduced, _ = reductions[n]
        pruned = subsumption_prune(reduced)
        rules, conds, _ = compactness(reduced)
        check = verify_reduction(s, pruned, data)
        out.append(
            f"| {LABELS[n]} | {rules} | {conds} | {_space(reduced)} | {len(pruned)} | {check.summary()} |"
        )

    ga_pruned = subsumption_prune(reductions["ga"][0])
    changed, _, _, samples = semantic_diff(ga_pruned, published)
    out += ["", "## Genetic algorithm system, reduced and pruned", "", *_code(ga_pruned), ""]
    out.append(
        f"Descriptions whose assigned classes differ from the published reduced form: {changed} of "
        f"{systems['ga'].schema.space_size()}."
    )
    for s in samples:
        out.append(f"- {s['description']}: {s['before']} vs {s['after']}")

    out += ["", "## Removals found in systems listed as irreducible", ""]
    any_listed = False
    for n in ("il", "nn"):
        log = reductions[n][1]
        for e in log.removals:
            any_listed = True
            proof = ", ".join(f"{r} on {a}" for r, a in e.witnesses)
            out.append(f"- {LABELS[n]} {e.rule_id}: drop {e.attribute}; exclusive with {proof}")
    if not any_listed:
        out.append("None.")

    out += ["", "## Subsumed rules in the induced systems", ""]
    listed = False
    for n, s in systems.items():
        for dropped, by in subsumed_pairs(s):
            listed = True
            out.append(f"- {LABELS[n]}: {dropped} is subsumed by {by}")
    if not listed:
        out.append("None.")

    out += ["", "## Dataset metrics", ""]
    if data is None:
        out.append("Bankruptcy data file not available; dataset metrics skipped.")
    else:
        out += [
            f"Rows: {len(data)}.",
            "",
            "| system | accuracy | coverage | reduced accuracy | reduced coverage |",
            "|---|---|---|---|---|",
        ]
        for n, s in systems.items():
            m0, _ = evaluate(s, data)
            m1, _ = evaluate(reductions[n][0], data)
            out.append(
                f"| {LABELS[n]} | {_frac(m0.accuracy)} | {_frac(m0.coverage)} "
                f"| {_frac(m1.accuracy)} | {_frac(m1.coverage)} |"
            )
        mp, _ = evaluate(published, data)
        out.append(f"| Published reduced form | {_frac(mp.accuracy)} | {_frac(mp.coverage)} | | |")
    return "\n".join(out) + "\n"


def build_report(fixture: str, data_path: str | Path | None = None) -> str:
    if fixture == "toy":
        return toy_report()
    if fixture == "bankruptcy":
        return bankruptcy_report(data_path)
    raise ValueError(f"unknown fixture {fixture!r}; expected one of {FIXTURES}")
