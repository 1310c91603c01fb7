"""Value types for schemas, rules and rule systems, plus the overlap algebra.

Every attribute domain is an explicit finite tuple of string values. A rule
is a pure conjunction: a partial map from attribute name to a non-empty
value-set. An attribute a rule does not mention is treated as its full
domain, which turns overlap, exclusivity and subsumption into per-attribute
set operations.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

DEFAULT_MAX_DOMAIN = 10_000


class RuleSystemError(Exception):
    """Base class for errors raised by this package."""


class SchemaMismatchError(RuleSystemError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class DomainError(RuleSystemError, ValueError):
    """A value, label or rule violates a schema or type invariant."""


class SpaceTooLargeError(RuleSystemError, ValueError):
    def __init__(self, size: int, limit: int):
        self.size = size
        self.limit = limit
        super().__init__(
            f"description space has {size} descriptions, above the limit of {limit}"
        )


class EmptyClassWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Attribute:
    name: str
    domain: tuple[str, ...]
    ordered: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "domain", tuple(str(v) for v in self.domain))
        if not self.domain:
            raise DomainError(f"attribute {self.name!r} has an empty domain")
        if len(set(self.domain)) != len(self.domain):
            raise DomainError(f"attribute {self.name!r} repeats a domain value")

    @property
    def values(self) -> frozenset[str]:
        return frozenset(self.domain)

    def sort_values(self, values: Iterable[str]) -> list[str]:
        """Return ``values`` in declared domain order."""
        wanted = set(values)
        return [v for v in self.domain if v in wanted]


@dataclass(frozen=True)
class Schema:
    attributes: tuple[Attribute, ...]
    classes: tuple[str, ...]
    max_domain: int = field(default=DEFAULT_MAX_DOMAIN, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "classes", tuple(str(c) for c in self.classes))
        names = [a.name for a in self.attributes]
        if not names:
            raise DomainError("a schema needs at least one attribute")
        if len(set(names)) != len(names):
            dup = next(n for n in names if names.count(n) > 1)
            raise DomainError(f"duplicate attribute name {dup!r}")
        if len(self.classes) < 2:
            raise DomainError("a schema needs at least two classes")
        if len(set(self.classes)) != len(self.classes):
            dup = next(c for c in self.classes if self.classes.count(c) > 1)
            raise DomainError(f"duplicate class name {dup!r}")
        for a in self.attributes:
            if len(a.domain) > self.max_domain:
                raise DomainError(
                    f"attribute {a.name!r} has {len(a.domain)} values, "
                    f"above the bound of {self.max_domain}"
                )
        object.__setattr__(self, "_index", {a.name: a for a in self.attributes})

    @property
    def attribute_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    def attribute(self, name: str) -> Attribute:
        try:
            return self._index[name]  # type: ignore[attr-defined]
        except KeyError:
            raise SchemaMismatchError(f"unknown attribute {name!r}") from None

    def __contains__(self, name: object) -> bool:
        return name in self._index  # type: ignore[attr-defined]

    def space_size(self) -> int:
        size = 1
        for a in self.attributes:
            size *= len(a.domain)
        return size

    def descriptions(self) -> Iterator[dict[str, str]]:
        """Yield every description of the space in lexicographic schema order."""
        names = self.attribute_names
        for combo in itertools.product(*(a.domain for a in self.attributes)):
            yield dict(zip(names, combo))


class Rule:
    """A conjunctive assignment rule.

    ``conditions`` maps attribute names to the set of admitted values. The
    map is stored read-only; two rules are equal when id, class and
    conditions agree, regardless of the order conditions were written in.
    """

    __slots__ = ("id", "class_label", "conditions", "_key")

    def __init__(
        self,
        id: str,
        class_label: str,
        conditions: Mapping[str, Iterable[str]],
    ):
        conds = {str(k): frozenset(str(v) for v in vs) for k, vs in conditions.items()}
        if not conds:
            raise DomainError(f"rule {id!r} has no conditions")
        for attr, vs in conds.items():
            if not vs:
                raise DomainError(f"rule {id!r}: condition on {attr!r} admits no value")
        object.__setattr__(self, "id", str(id))
        object.__setattr__(self, "class_label", str(class_label))
        object.__setattr__(self, "conditions", MappingProxyType(conds))
        object.__setattr__(
            self, "_key", (self.id, self.class_label, frozenset(conds.items()))
        )

    def __setattr__(self, name, value):
        raise AttributeError("Rule is immutable")

    def __reduce__(self):
        return (Rule, (self.id, self.class_label, dict(self.conditions)))

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Rule):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        body = ", ".join(f"{k}∈{{{','.join(sorted(v))}}}" for k, v in self.conditions.items())
        return f"Rule({self.id!r}, {self.class_label!r}, [{body}])"

    def __len__(self) -> int:
        return len(self.conditions)

    @property
    def attributes(self) -> frozenset[str]:
        return frozenset(self.conditions)

    def without(self, attribute: str) -> "Rule":
        """Copy of this rule with the condition on ``attribute`` dropped."""
        if attribute not in self.conditions:
            raise SchemaMismatchError(f"rule {self.id!r} does not constrain {attribute!r}")
        return Rule(
            self.id,
            self.class_label,
            {k: v for k, v in self.conditions.items() if k != attribute},
        )

    def restricted(self, attributes: Iterable[str]) -> "Rule":
        keep = set(attributes)
        return Rule(
            self.id,
            self.class_label,
            {k: v for k, v in self.conditions.items() if k in keep},
        )

    def validate(self, schema: Schema) -> None:
        if self.class_label not in schema.classes:
            raise DomainError(f"rule {self.id!r}: unknown class {self.class_label!r}")
        for attr, vs in self.conditions.items():
            domain = schema.attribute(attr).values
            extra = vs - domain
            if extra:
                raise DomainError(
                    f"rule {self.id!r}: value(s) {sorted(extra)} not in domain of {attr!r}"
                )


@dataclass(frozen=True)
class RuleSystem:
    schema: Schema
    rules: tuple[Rule, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", tuple(self.rules))
        seen: set[str] = set()
        for r in self.rules:
            if r.id in seen:
                raise DomainError(f"duplicate rule id {r.id!r}")
            seen.add(r.id)
            r.validate(self.schema)

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def rule(self, rule_id: str) -> Rule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.rules)

    def by_class(self) -> dict[str, list[Rule]]:
        """Group rules into the per-class disjunctions, in schema class order."""
        groups: dict[str, list[Rule]] = {c: [] for c in self.schema.classes}
        for r in self.rules:
            groups[r.class_label].append(r)
        return groups

    def empty_classes(self) -> list[str]:
        return [c for c, rs in self.by_class().items() if not rs]

    def warn_empty_classes(self) -> list[str]:
        empty = self.empty_classes()
        for c in empty:
            warnings.warn(f"class {c!r} has no rules", EmptyClassWarning, stacklevel=2)
        return empty

    def replace(self, rule: Rule) -> "RuleSystem":
        """Return a copy with the rule sharing ``rule.id`` swapped for ``rule``."""
        rules = [rule if r.id == rule.id else r for r in self.rules]
        return RuleSystem(self.schema, rules)

    def with_rules(self, rules: Sequence[Rule]) -> "RuleSystem":
        return RuleSystem(self.schema, rules)


@dataclass(frozen=True)
class DataObject:
    values: Mapping[str, str]
    label: str

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "values", MappingProxyType({str(k): str(v) for k, v in self.values.items()})
        )

    def __hash__(self) -> int:
        return hash((frozenset(self.values.items()), self.label))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DataObject):
            return NotImplemented
        return dict(self.values) == dict(other.values) and self.label == other.label

    def __reduce__(self):
        return (DataObject, (dict(self.values), self.label))


@dataclass(frozen=True)
class Dataset:
    schema: Schema
    rows: tuple[DataObject, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(self.rows))
        names = set(self.schema.attribute_names)
        for i, row in enumerate(self.rows):
            if set(row.values) != names:
                raise SchemaMismatchError(
                    f"row {i}: attributes {sorted(row.values)} do not match schema"
                )
            for a in self.schema.attributes:
                if row.values[a.name] not in a.values:
                    raise DomainError(
                        f"row {i}: value {row.values[a.name]!r} not in domain of {a.name!r}"
                    )
            if row.label not in self.schema.classes:
                raise DomainError(f"row {i}: unknown class label {row.label!r}")

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[DataObject]:
        return iter(self.rows)


def effective_constraint(rule: Rule, attribute: str, schema: Schema) -> frozenset[str]:
    """Values ``rule`` admits on ``attribute``; the full domain when unconstrained."""
    attr = schema.attribute(attribute)
    return rule.conditions.get(attribute, attr.values)


def matches(rule: Rule, obj: DataObject) -> bool:
    for attr, allowed in rule.conditions.items():
        try:
            value = obj.values[attr]
        except KeyError:
            raise SchemaMismatchError(
                f"rule {rule.id!r} constrains {attr!r}, which the object lacks"
            ) from None
        if value not in allowed:
            return False
    return True


def _check_attrs(rule: Rule, schema: Schema) -> None:
    for attr in rule.conditions:
        if attr not in schema:
            raise SchemaMismatchError(f"rule {rule.id!r} uses unknown attribute {attr!r}")


def overlaps(a: Rule, b: Rule, schema: Schema) -> bool:
    """True when some description of the space satisfies both rules.

    Only attributes constrained by both rules can have an empty
    intersection, so the test walks the shared ones.
    """
    _check_attrs(a, schema)
    _check_attrs(b, schema)
    for attr in a.conditions.keys() & b.conditions.keys():
        if a.conditions[attr].isdisjoint(b.conditions[attr]):
            return False
    return True


def exclusive(a: Rule, b: Rule, schema: Schema) -> bool:
    return not overlaps(a, b, schema)


def exclusion_witness(a: Rule, b: Rule, schema: Schema) -> str | None:
    """First attribute (schema order) on which the two rules cannot agree."""
    _check_attrs(a, schema)
    _check_attrs(b, schema)
    for name in schema.attribute_names:
        if name in a.conditions and name in b.conditions:
            if a.conditions[name].isdisjoint(b.conditions[name]):
                return name
    return None


def subsumes(a: Rule, b: Rule, schema: Schema) -> bool:
    """True when ``a`` matches every description ``b`` matches."""
    if a.class_label != b.class_label:
        raise DomainError(
            f"subsumption compares same-class rules, got {a.class_label!r} and {b.class_label!r}"
        )
    _check_attrs(a, schema)
    _check_attrs(b, schema)
    for attr, allowed in a.conditions.items():
        if not effective_constraint(b, attr, schema) <= allowed:
            return False
    return True


def condition_count(system: RuleSystem) -> int:
    return sum(len(r) for r in system.rules)
