"""Brute-force oracles and hypothesis strategies shared by the tests.

The oracles walk the description space with ``itertools.product`` and test
membership directly; they do not call into the package's overlap or
coverage code, so they can check it.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from hypothesis import strategies as st

from rulesys.model import Attribute, DataObject, Dataset, Rule, RuleSystem, Schema


def all_descriptions(schema: Schema):
    names = [a.name for a in schema.attributes]
    for combo in itertools.product(*(a.domain for a in schema.attributes)):
        yield dict(zip(names, combo))


def fires(rule: Rule, desc: dict) -> bool:
    return all(desc[a] in vs for a, vs in rule.conditions.items())


def matched_set(rule: Rule, schema: Schema) -> set[tuple]:
    names = [a.name for a in schema.attributes]
    return {tuple(d[n] for n in names) for d in all_descriptions(schema) if fires(rule, d)}


def enum_overlap(a: Rule, b: Rule, schema: Schema) -> bool:
    return any(fires(a, d) and fires(b, d) for d in all_descriptions(schema))


def enum_space_coverage(system: RuleSystem) -> Fraction:
    descs = list(all_descriptions(system.schema))
    hit = sum(1 for d in descs if any(fires(r, d) for r in system.rules))
    return Fraction(hit, len(descs))


def enum_fired_classes(system: RuleSystem) -> list[frozenset]:
    return [
        frozenset(r.class_label for r in system.rules if fires(r, d))
        for d in all_descriptions(system.schema)
    ]


def enum_conflicting_pairs(system: RuleSystem) -> set[frozenset]:
    out = set()
    for a, b in itertools.combinations(system.rules, 2):
        if a.class_label != b.class_label and enum_overlap(a, b, system.schema):
            out.add(frozenset((a.id, b.id)))
    return out


def dataset_coverage(system: RuleSystem, data: Dataset) -> Fraction:
    hit = sum(1 for row in data.rows if any(fires(r, row.values) for r in system.rules))
    return Fraction(hit, len(data))


def dataset_strict_accuracy(system: RuleSystem, data: Dataset) -> Fraction:
    ok = 0
    for row in data.rows:
        classes = {r.class_label for r in system.rules if fires(r, row.values)}
        ok += classes == {row.label}
    return Fraction(ok, len(data))


# -- strategies --------------------------------------------------------------


@st.composite
def schemas(draw, max_attrs=4, max_domain=4, max_classes=3):
    n = draw(st.integers(1, max_attrs))
    attrs = []
    for i in range(n):
        size = draw(st.integers(1, max_domain))
        attrs.append(Attribute(f"A{i}", tuple(f"v{j}" for j in range(size)), draw(st.booleans())))
    k = draw(st.integers(2, max_classes))
    return Schema(tuple(attrs), tuple(f"C{i}" for i in range(k)))


@st.composite
def rules_for(draw, schema: Schema, rule_id: str, max_conditions=4):
    names = list(schema.attribute_names)
    picked = draw(
        st.lists(st.sampled_from(names), min_size=1, max_size=min(max_conditions, len(names)), unique=True)
    )
    conds = {}
    for name in picked:
        domain = schema.attribute(name).domain
        conds[name] = draw(st.sets(st.sampled_from(domain), min_size=1))
    return Rule(rule_id, draw(st.sampled_from(schema.classes)), conds)


@st.composite
def systems(draw, max_rules=8, min_rules=0, schema=None):
    schema = schema if schema is not None else draw(schemas())
    n = draw(st.integers(min_rules, max_rules))
    rules = [draw(rules_for(schema, f"R{i + 1}")) for i in range(n)]
    return RuleSystem(schema, tuple(rules))


@st.composite
def datasets(draw, schema: Schema, rows=50):
    out = []
    for _ in range(rows):
        values = {a.name: draw(st.sampled_from(a.domain)) for a in schema.attributes}
        out.append(DataObject(values, draw(st.sampled_from(schema.classes))))
    return Dataset(schema, tuple(out))


@st.composite
def systems_with_data(draw, rows=50):
    system = draw(systems())
    return system, draw(datasets(system.schema, rows))
