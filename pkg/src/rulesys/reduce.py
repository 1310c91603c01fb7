"""Reducibility testing and greedy single-condition reduction.

A condition can be dropped from a rule when the relaxed rule still cannot
fire together with any rule of another class. Since unconstrained
attributes range over the full domain, only attributes constrained in both
rules can separate them; :func:`corollary_filter` exposes that set.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from .metrics import (
    DEFAULT_SPACE_LIMIT,
    class_masks,
    description_at,
    evaluate,
    fraction_dict,
    space_coverage,
    strict_accuracy,
)
from .model import (
    Dataset,
    DomainError,
    Rule,
    RuleSystem,
    SchemaMismatchError,
    SpaceTooLargeError,
    exclusion_witness,
    overlaps,
    subsumes,
)
from .textio import serialize_system

GUARD_RULES = "rules"
GUARD_DATA = "data"
GUARDS = (GUARD_RULES, GUARD_DATA)

REMOVED = "removed"
BLOCKED = "blocked"

REASON_OVERLAP = "overlap"
REASON_LAST = "last-condition"
REASON_DATA = "data-guard"


class UsageError(DomainError):
    pass


class OracleLimitError(DomainError):
    pass


def system_hash(system: RuleSystem) -> str:
    return hashlib.sha256(serialize_system(system, "interchange").encode()).hexdigest()


def corollary_filter(candidate: Rule, other: Rule) -> frozenset[str]:
    """Attributes constrained by both rules.

    Only these can witness exclusivity; an empty result means the two rules
    necessarily overlap.
    """
    if candidate.class_label == other.class_label:
        raise DomainError(
            f"rules {candidate.id!r} and {other.id!r} share class {candidate.class_label!r}"
        )
    return candidate.attributes & other.attributes


def _opposing(rule: Rule, rules: Iterable[Rule]) -> list[Rule]:
    return [r for r in rules if r.class_label != rule.class_label]


def _member(rule: Rule, system: RuleSystem) -> None:
    try:
        found = system.rule(rule.id)
    except KeyError:
        raise DomainError(f"rule {rule.id!r} is not part of the system") from None
    if found != rule:
        raise DomainError(f"rule {rule.id!r} differs from the system's rule of that id")


def reducible_conditions(rule: Rule, system: RuleSystem) -> frozenset[str]:
    """Attributes whose condition alone can be dropped from ``rule``.

    A rule with a single condition is never reducible.
    """
    _member(rule, system)
    if len(rule) < 2:
        return frozenset()
    opposing = _opposing(rule, system.rules)
    out = set()
    for attr in rule.conditions:
        cand = rule.without(attr)
        if not any(overlaps(cand, o, system.schema) for o in opposing):
            out.add(attr)
    return frozenset(out)


@dataclass(frozen=True)
class ReductionEvent:
    rule_id: str
    attribute: str
    decision: str
    reason: str | None = None
    blocking_rule: str | None = None
    # (opposing rule id, attribute with empty intersection) for each opposing rule
    witnesses: tuple[tuple[str, str], ...] = ()
    guard: dict[str, str] | None = None

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "rule": self.rule_id,
            "attribute": self.attribute,
            "decision": self.decision,
        }
        if self.reason is not None:
            d["reason"] = self.reason
        if self.blocking_rule is not None:
            d["blocking_rule"] = self.blocking_rule
        if self.witnesses:
            d["witnesses"] = [{"rule": r, "attribute": a} for r, a in self.witnesses]
        if self.guard is not None:
            d["guard"] = dict(self.guard)
        return d


@dataclass(frozen=True)
class ReductionLog:
    guard: str
    events: tuple[ReductionEvent, ...]
    original_hash: str
    final_hash: str

    @property
    def removals(self) -> list[ReductionEvent]:
        return [e for e in self.events if e.decision == REMOVED]

    @property
    def modified_rules(self) -> list[str]:
        seen: dict[str, None] = {}
        for e in self.removals:
            seen.setdefault(e.rule_id)
        return list(seen)

    def to_dict(self) -> dict[str, Any]:
        return {
            "format_version": 1,
            "kind": "reduction_log",
            "guard": self.guard,
            "summary": {
                "removals": len(self.removals),
                "blocked": len(self.events) - len(self.removals),
                "modified_rules": self.modified_rules,
                "original_hash": self.original_hash,
                "final_hash": self.final_hash,
            },
            "events": [e.to_dict() for e in self.events],
        }


def greedy_reduce(
    system: RuleSystem, guard: str = GUARD_RULES, dataset: Dataset | None = None
) -> tuple[RuleSystem, ReductionLog]:
    """Single pass of greedy condition removal.

    Rules are visited in declared order and, within a rule, conditions in
    schema attribute order. Each candidate is tested against the current
    (possibly already reduced) rules of every other class. With
    ``guard="data"`` a removal is also refused when it lowers strict
    accuracy on ``dataset``.
    """
    if guard not in GUARDS:
        raise UsageError(f"unknown guard {guard!r}; expected one of {GUARDS}")
    if guard == GUARD_DATA and dataset is None:
        raise UsageError("guard 'data' needs a dataset")
    schema = system.schema
    live = list(system.rules)
    events: list[ReductionEvent] = []
    accuracy = strict_accuracy(system, dataset) if guard == GUARD_DATA else None

    for idx, original in enumerate(system.rules):
        for attr in schema.attribute_names:
            if attr not in original.conditions:
                continue
            current = live[idx]
            if len(current) == 1:
                events.append(ReductionEvent(current.id, attr, BLOCKED, REASON_LAST))
                continue
            cand = current.without(attr)
            blocker = None
            witnesses = []
            for other in _opposing(cand, live):
                w = exclusion_witness(cand, other, schema)
                if w is None:
                    blocker = other.id
                    break
                witnesses.append((other.id, w))
            if blocker is not None:
                events.append(ReductionEvent(current.id, attr, BLOCKED, REASON_OVERLAP, blocker))
                continue
            verdict = None
            if guard == GUARD_DATA:
                trial = live[:idx] + [cand] + live[idx + 1 :]
                after = strict_accuracy(system.with_rules(trial), dataset)
                verdict = {"accuracy_before": str(accuracy), "accuracy_after": str(after)}
                if after < accuracy:
                    events.append(
                        ReductionEvent(current.id, attr, BLOCKED, REASON_DATA, guard=verdict)
                    )
                    continue
                accuracy = after
            live[idx] = cand
            events.append(
                ReductionEvent(current.id, attr, REMOVED, witnesses=tuple(witnesses), guard=verdict)
            )

    reduced = system.with_rules(live)
    log = ReductionLog(guard, tuple(events), system_hash(system), system_hash(reduced))
    return reduced, log


def replay_log(original: RuleSystem, log: ReductionLog) -> RuleSystem:
    """Apply the accepted removals of ``log`` to ``original``."""
    rules = {r.id: r for r in original.rules}
    for e in log.removals:
        rules[e.rule_id] = rules[e.rule_id].without(e.attribute)
    return original.with_rules([rules[r.id] for r in original.rules])


def minimal_reductions_oracle(
    rule: Rule,
    system: RuleSystem,
    max_conditions: int = 20,
    max_opposing: int = 100_000,
) -> list[frozenset[str]]:
    """Every subset-minimal condition set that keeps ``rule`` exclusive.

    Brute force over the subset lattice by increasing size; supersets of a
    set already found are skipped since exclusivity is upward closed. The
    full condition set appears when no strict subset works but the rule as
    given is exclusive; the result is empty when even the full rule
    overlaps some other-class rule.
    """
    if len(rule) > max_conditions:
        raise OracleLimitError(f"rule {rule.id!r} has {len(rule)} conditions, limit {max_conditions}")
    opposing = _opposing(rule, system.rules)
    if len(opposing) > max_opposing:
        raise OracleLimitError(f"{len(opposing)} opposing rules, limit {max_opposing}")
    attrs = [a for a in system.schema.attribute_names if a in rule.conditions]
    found: list[frozenset[str]] = []
    for k in range(1, len(attrs) + 1):
        for combo in itertools.combinations(attrs, k):
            s = frozenset(combo)
            if any(f <= s for f in found):
                continue
            restricted = rule.restricted(s)
            if not any(overlaps(restricted, o, system.schema) for o in opposing):
                found.append(s)
    return found


def subsumed_pairs(system: RuleSystem) -> list[tuple[str, str]]:
    """``(dropped, kept)`` id pairs; a rule is dropped when another rule of
    its class subsumes it, the earlier one winning between equal rules."""
    out = []
    rules = system.rules
    for j, r in enumerate(rules):
        for i, s in enumerate(rules):
            if i == j or s.class_label != r.class_label:
                continue
            if subsumes(s, r, system.schema) and (i < j or not subsumes(r, s, system.schema)):
                out.append((r.id, s.id))
                break
    return out


def subsumption_prune(system: RuleSystem) -> RuleSystem:
    dropped = {d for d, _ in subsumed_pairs(system)}
    return system.with_rules([r for r in system.rules if r.id not in dropped])


@dataclass
class VerificationReport:
    valid: bool = True
    first_violation: str | None = None
    violations: list[tuple[str, str]] = field(default_factory=list)
    modified_rules: list[str] = field(default_factory=list)
    dropped_rules: list[str] = field(default_factory=list)
    blocking_pairs: list[tuple[str, str]] = field(default_factory=list)
    dataset_coverage: tuple[Fraction, Fraction] | None = None
    dataset_accuracy: tuple[Fraction, Fraction] | None = None
    space_coverage: tuple[Fraction, Fraction] | None = None
    space_note: str | None = None
    changed_descriptions: int = 0
    newly_covered_descriptions: int = 0
    lost_descriptions: int = 0
    diff_samples: list[dict[str, Any]] = field(default_factory=list)

    def fail(self, clause: str, message: str) -> None:
        self.violations.append((clause, message))
        if self.valid:
            self.valid = False
            self.first_violation = clause

    def to_dict(self) -> dict[str, Any]:
        def pair(p):
            return None if p is None else {"before": fraction_dict(p[0]), "after": fraction_dict(p[1])}

        return {
            "format_version": 1,
            "kind": "verification_report",
            "verdict": "valid" if self.valid else "invalid",
            "first_violation": self.first_violation,
            "violations": [{"clause": c, "message": m} for c, m in self.violations],
            "modified_rules": list(self.modified_rules),
            "dropped_rules": list(self.dropped_rules),
            "blocking_pairs": [list(p) for p in self.blocking_pairs],
            "dataset_coverage": pair(self.dataset_coverage),
            "dataset_accuracy": pair(self.dataset_accuracy),
            "space_coverage": pair(self.space_coverage),
            "space_note": self.space_note,
            "semantic_diff": {
                "changed": self.changed_descriptions,
                "newly_covered": self.newly_covered_descriptions,
                "lost": self.lost_descriptions,
                "samples": list(self.diff_samples),
            },
        }

    def summary(self) -> str:
        if self.valid:
            return f"valid: {len(self.modified_rules)} modified rule(s)"
        clause, message = self.violations[0]
        return f"invalid: clause ({clause}) {message}"


def semantic_diff(
    before: RuleSystem,
    after: RuleSystem,
    limit: int = DEFAULT_SPACE_LIMIT,
    max_samples: int = 20,
) -> tuple[int, int, int, list[dict[str, Any]]]:
    """Compare fired-class sets over the whole description space.

    Returns counts of changed, newly covered and class-losing descriptions
    plus up to ``max_samples`` changed descriptions in enumeration order.
    """
    if before.schema != after.schema:
        raise SchemaMismatchError("systems use different schemas")
    mb = class_masks(before, limit)
    ma = class_masks(after, limit)
    classes = before.schema.classes
    changed = np.zeros_like(next(iter(mb.values())))
    lost = np.zeros_like(changed)
    for c in classes:
        changed |= mb[c] != ma[c]
        lost |= mb[c] & ~ma[c]
    any_before = np.logical_or.reduce([mb[c] for c in classes])
    any_after = np.logical_or.reduce([ma[c] for c in classes])
    newly = ~any_before & any_after
    samples = []
    for idx in np.argwhere(changed)[:max_samples]:
        key = tuple(int(i) for i in idx)
        samples.append(
            {
                "description": description_at(before.schema, key),
                "before": [c for c in classes if mb[c][key]],
                "after": [c for c in classes if ma[c][key]],
            }
        )
    return int(changed.sum()), int(newly.sum()), int(lost.sum()), samples


def verify_reduction(
    original: RuleSystem,
    reduced: RuleSystem,
    dataset: Dataset | None = None,
    space_limit: int = DEFAULT_SPACE_LIMIT,
) -> VerificationReport:
    """Check that ``reduced`` is a sound condition-removal of ``original``.

    Clauses: (a) every reduced rule keeps a subset of its original
    conditions, unchanged; (b) every modified rule is exclusive with all
    other-class rules of ``reduced``; (c) coverage does not drop on the
    dataset or the description space; (d) no description loses a class it
    used to receive.
    """
    if original.schema != reduced.schema:
        raise SchemaMismatchError("systems use different schemas")
    orig = {r.id: r for r in original.rules}
    unknown = [r.id for r in reduced.rules if r.id not in orig]
    if unknown:
        raise DomainError(f"reduced system has rule ids absent from the original: {unknown}")
    report = VerificationReport()
    schema = original.schema
    present = {r.id for r in reduced.rules}
    report.dropped_rules = [r.id for r in original.rules if r.id not in present]

    for r in reduced.rules:
        o = orig[r.id]
        if r.class_label != o.class_label:
            report.fail("a", f"rule {r.id!r} changed class from {o.class_label!r} to {r.class_label!r}")
            continue
        extra = r.attributes - o.attributes
        if extra:
            report.fail("a", f"rule {r.id!r} gained condition(s) on {sorted(extra)}")
            continue
        altered = [a for a in r.conditions if r.conditions[a] != o.conditions[a]]
        if altered:
            report.fail("a", f"rule {r.id!r} altered condition(s) on {altered}")
            continue
        if r.attributes < o.attributes:
            report.modified_rules.append(r.id)

    modified = set(report.modified_rules)
    for r in reduced.rules:
        if r.id not in modified:
            continue
        for other in _opposing(r, reduced.rules):
            if overlaps(r, other, schema):
                report.blocking_pairs.append((r.id, other.id))
    if report.blocking_pairs:
        a, b = report.blocking_pairs[0]
        report.fail("b", f"modified rule {a!r} overlaps rule {b!r} of another class")

    if dataset is not None:
        mo = evaluate(original, dataset)[0]
        mr = evaluate(reduced, dataset)[0]
        report.dataset_coverage = (mo.coverage, mr.coverage)
        report.dataset_accuracy = (mo.accuracy, mr.accuracy)
        if mr.coverage < mo.coverage:
            report.fail("c", f"dataset coverage fell from {mo.coverage} to {mr.coverage}")
    try:
        so, sr = space_coverage(original, space_limit), space_coverage(reduced, space_limit)
    except SpaceTooLargeError as e:
        report.space_note = str(e)
    else:
        report.space_coverage = (so, sr)
        if sr < so:
            report.fail("c", f"space coverage fell from {so} to {sr}")
        changed, newly, lost, samples = semantic_diff(original, reduced, space_limit)
        report.changed_descriptions = changed
        report.newly_covered_descriptions = newly
        report.lost_descriptions = lost
        report.diff_samples = samples
        if lost:
            report.fail("d", f"{lost} description(s) lost a class they were assigned before")
    return report


def reducible(system: RuleSystem) -> bool:
    """True when some rule of ``system`` has a droppable condition."""
    return any(reducible_conditions(r, system) for r in system.rules)


def reduction_summary(log: ReductionLog) -> str:
    n = len(log.removals)
    rules = log.modified_rules
    tail = f" in {len(rules)} rule(s): {', '.join(rules)}" if rules else ""
    return f"{n} removal(s){tail}"


def explain_blocks(log: ReductionLog) -> Sequence[str]:
    return [
        f"{e.rule_id} - {e.attribute}: {e.reason}"
        + (f" ({e.blocking_rule})" if e.blocking_rule else "")
        for e in log.events
        if e.decision == BLOCKED
    ]
