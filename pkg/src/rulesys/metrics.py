"""Accuracy, coverage and compactness of a rule system.

All counters are integers and every ratio is a :class:`fractions.Fraction`,
so reported values are exact. Description-space quantities are computed by
enumerating the Cartesian product of the domains as boolean tensors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .model import (
    Dataset,
    DomainError,
    Rule,
    RuleSystem,
    Schema,
    SchemaMismatchError,
    SpaceTooLargeError,
    matches,
    overlaps,
)

STRICT = "strict"
ANY_CORRECT = "any_correct"
POLICIES = (STRICT, ANY_CORRECT)
DEFAULT_SPACE_LIMIT = 1_000_000

CORRECT = "correct"
MISCLASSIFIED = "misclassified"
CONFLICT = "conflict"
UNCOVERED = "uncovered"


def _ratio(num: int, den: int) -> Fraction:
    return Fraction(num, den) if den else Fraction(0)


def fraction_dict(value: Fraction) -> dict[str, Any]:
    return {"n": value.numerator, "d": value.denominator, "value": round(float(value), 6)}


@dataclass(frozen=True)
class RowOutcome:
    index: int
    fired: tuple[str, ...]
    verdict: str


@dataclass(frozen=True)
class Metrics:
    n_rows: int
    n_covered: int
    n_correct: int
    conflict_rows: int
    rule_count: int
    condition_count: int
    per_rule_fire_counts: dict[str, int] = field(default_factory=dict)
    policy: str = STRICT

    @property
    def accuracy(self) -> Fraction:
        return _ratio(self.n_correct, self.n_rows)

    @property
    def coverage(self) -> Fraction:
        return _ratio(self.n_covered, self.n_rows)

    @property
    def accuracy_on_covered(self) -> Fraction:
        return _ratio(self.n_correct, self.n_covered)

    def to_dict(self) -> dict[str, Any]:
        return {
            "policy": self.policy,
            "rows": self.n_rows,
            "covered_rows": self.n_covered,
            "correct_rows": self.n_correct,
            "conflict_rows": self.conflict_rows,
            "accuracy": fraction_dict(self.accuracy),
            "coverage": fraction_dict(self.coverage),
            "accuracy_on_covered": fraction_dict(self.accuracy_on_covered),
            "rule_count": self.rule_count,
            "condition_count": self.condition_count,
            "per_rule_fire_counts": dict(self.per_rule_fire_counts),
        }


def _check_same_schema(system: RuleSystem, dataset: Dataset) -> None:
    if system.schema != dataset.schema:
        raise SchemaMismatchError("rule system and dataset use different schemas")


def evaluate(
    system: RuleSystem, dataset: Dataset, policy: str = STRICT
) -> tuple[Metrics, list[RowOutcome]]:
    """Score ``system`` on every row of ``dataset``.

    Under ``strict`` a covered row is correct only when every firing rule
    agrees with its label; under ``any_correct`` one agreeing rule
    suffices. Uncovered rows count as incorrect.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    _check_same_schema(system, dataset)
    if len(dataset) == 0:
        raise DomainError("cannot evaluate on an empty dataset")
    fire_counts = {r.id: 0 for r in system.rules}
    outcomes: list[RowOutcome] = []
    covered = correct = conflicts = 0
    for i, row in enumerate(dataset.rows):
        fired = [r for r in system.rules if matches(r, row)]
        for r in fired:
            fire_counts[r.id] += 1
        classes = {r.class_label for r in fired}
        if not fired:
            verdict = UNCOVERED
        else:
            covered += 1
            if len(classes) > 1:
                conflicts += 1
            if classes == {row.label}:
                verdict = CORRECT
            elif len(classes) > 1:
                verdict = CORRECT if policy == ANY_CORRECT and row.label in classes else CONFLICT
            else:
                verdict = MISCLASSIFIED
        if verdict == CORRECT:
            correct += 1
        outcomes.append(RowOutcome(i, tuple(r.id for r in fired), verdict))
    metrics = Metrics(
        n_rows=len(dataset),
        n_covered=covered,
        n_correct=correct,
        conflict_rows=conflicts,
        rule_count=len(system.rules),
        condition_count=sum(len(r) for r in system.rules),
        per_rule_fire_counts=fire_counts,
        policy=policy,
    )
    return metrics, outcomes


def strict_accuracy(system: RuleSystem, dataset: Dataset) -> Fraction:
    return evaluate(system, dataset, STRICT)[0].accuracy


# -- description space -------------------------------------------------------


def check_space(schema: Schema, limit: int = DEFAULT_SPACE_LIMIT) -> int:
    size = schema.space_size()
    if size > limit:
        raise SpaceTooLargeError(size, limit)
    return size


def rule_mask(rule: Rule, schema: Schema) -> np.ndarray:
    """Boolean tensor over the description space, True where ``rule`` fires.

    Axis ``q`` indexes the domain of the q-th schema attribute.
    """
    dims = [len(a.domain) for a in schema.attributes]
    mask = np.ones(dims, dtype=bool)
    for axis, a in enumerate(schema.attributes):
        allowed = rule.conditions.get(a.name)
        if allowed is None:
            continue
        line = np.fromiter((v in allowed for v in a.domain), dtype=bool, count=len(a.domain))
        shape = [1] * len(dims)
        shape[axis] = len(a.domain)
        mask &= line.reshape(shape)
    return mask


def class_masks(system: RuleSystem, limit: int = DEFAULT_SPACE_LIMIT) -> dict[str, np.ndarray]:
    """Per class, the descriptions at which at least one rule of that class fires."""
    check_space(system.schema, limit)
    dims = [len(a.domain) for a in system.schema.attributes]
    out = {c: np.zeros(dims, dtype=bool) for c in system.schema.classes}
    for r in system.rules:
        out[r.class_label] |= rule_mask(r, system.schema)
    return out


def space_covered_count(system: RuleSystem, limit: int = DEFAULT_SPACE_LIMIT) -> tuple[int, int]:
    size = check_space(system.schema, limit)
    masks = class_masks(system, limit)
    if not masks:
        return 0, size
    covered = np.logical_or.reduce(list(masks.values()))
    return int(covered.sum()), size


def space_coverage(system: RuleSystem, limit: int = DEFAULT_SPACE_LIMIT) -> Fraction:
    """Exact fraction of all descriptions matched by at least one rule."""
    covered, size = space_covered_count(system, limit)
    return Fraction(covered, size)


def description_at(schema: Schema, index: tuple[int, ...]) -> dict[str, str]:
    return {a.name: a.domain[i] for a, i in zip(schema.attributes, index)}


def conflict_pairs(system: RuleSystem) -> list[tuple[str, str]]:
    """Different-class rule pairs that some description satisfies jointly."""
    out = []
    rules = system.rules
    for i, a in enumerate(rules):
        for b in rules[i + 1 :]:
            if a.class_label != b.class_label and overlaps(a, b, system.schema):
                out.append((a.id, b.id))
    return out


def compactness(system: RuleSystem) -> tuple[int, int, float]:
    rules = len(system.rules)
    conds = sum(len(r) for r in system.rules)
    return rules, conds, (conds / rules if rules else 0.0)


def format_metrics_table(metrics: Metrics, space: Fraction | None = None) -> str:
    rows = [
        ("rows", str(metrics.n_rows)),
        ("policy", metrics.policy),
        ("accuracy", f"{metrics.accuracy} ({float(metrics.accuracy):.4f})"),
        ("coverage", f"{metrics.coverage} ({float(metrics.coverage):.4f})"),
        ("accuracy on covered", f"{metrics.accuracy_on_covered} ({float(metrics.accuracy_on_covered):.4f})"),
        ("conflict rows", str(metrics.conflict_rows)),
        ("rules", str(metrics.rule_count)),
        ("conditions", str(metrics.condition_count)),
    ]
    if space is not None:
        rows.append(("space coverage", f"{space} ({float(space):.4f})"))
    width = max(len(k) for k, _ in rows)
    lines = [f"{k:<{width}}  {v}" for k, v in rows]
    lines.append("")
    lines.append("rule fires")
    for rid, n in metrics.per_rule_fire_counts.items():
        lines.append(f"  {rid:<{width - 2}}  {n}")
    return "\n".join(lines) + "\n"
