"""Parsing and serialization for schemas, rule systems and datasets.

Schema DSL::

    schema {
      attribute P  : ordered 1..20
      attribute W  : ordered {LE3, GE4}
      attribute CO : {N, A, P}
      classes { NotCar, Car }
    }

The ``schema { ... }`` wrapper is optional. Rule DSL, one rule per line::

    rule NotCar:R1_1 :- P > 1, W = LE3
    rule NB :- FF in {A, P}, CO != N

Conditions are ``=``, ``!=``, ``in {..}``, ``in lo..hi`` and, on ordered
domains only, ``<``, ``<=``, ``>``, ``>=``. Everything is expanded to an
explicit value-set at parse time. ``#`` starts a comment.

The interchange format is a JSON document carrying ``format_version``,
the schema, the rules and free-form comments; see README for the keys.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .model import (
    Attribute,
    DataObject,
    Dataset,
    DomainError,
    Rule,
    RuleSystem,
    Schema,
)

FORMAT_VERSION = 1

SYNTAX = "syntax"
INVARIANT = "invariant"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" | "warning"
    line: int
    column: int
    message: str
    kind: str = SYNTAX

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class ParseError(DomainError):
    """Raised when text cannot be turned into a valid value.

    ``diagnostics`` holds every error and warning found; ``kind`` is
    ``"syntax"`` if any error is syntactic, else ``"invariant"``.
    """

    def __init__(self, diagnostics: Sequence[ParseDiagnostic]):
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.severity == "error"]
        self.kind = SYNTAX if any(d.kind == SYNTAX for d in errors) else INVARIANT
        super().__init__("; ".join(str(d) for d in errors) or "parse failed")


# -- tokenizer ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<turnstile>:-)
  | (?P<range>\.\.)
  | (?P<op>!=|>=|<=|>|<|=)
  | (?P<punct>[{},:])
  | (?P<str>"[^"\n]*")
  | (?P<word>-?[A-Za-z0-9_][A-Za-z0-9_\-]*)
    """,
    re.VERBOSE,
)
_WORD_RE = re.compile(r"-?[A-Za-z0-9_][A-Za-z0-9_\-]*\Z")
_INT_RE = re.compile(r"-?\d+\Z")


@dataclass(frozen=True)
class _Tok:
    type: str
    text: str
    line: int
    col: int

    @property
    def value(self) -> str:
        return self.text[1:-1] if self.type == "str" else self.text


class _Fail(Exception):
    def __init__(self, tok: _Tok | None, message: str, kind: str = SYNTAX):
        self.tok = tok
        self.message = message
        self.kind = kind


def _tokenize(text: str, diags: list[ParseDiagnostic]) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            diags.append(ParseDiagnostic("error", line, col, f"unexpected character {text[pos]!r}"))
            toks.append(_Tok("bad", text[pos], line, col))
            pos += 1
            continue
        kind = m.lastgroup
        if kind == "nl":
            toks.append(_Tok("nl", "\n", line, col))
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, col))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Cursor:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0

    def peek(self, skip_nl: bool = True) -> _Tok:
        j = self.i
        while skip_nl and self.toks[j].type == "nl":
            j += 1
        return self.toks[j]

    def next(self, skip_nl: bool = True) -> _Tok:
        if skip_nl:
            self.skip_nl()
        tok = self.toks[self.i]
        if tok.type != "eof":
            self.i += 1
        return tok

    def skip_nl(self) -> None:
        while self.toks[self.i].type == "nl":
            self.i += 1

    def expect(self, text: str, skip_nl: bool = True) -> _Tok:
        tok = self.next(skip_nl)
        if tok.text != text or tok.type == "str":
            raise _Fail(tok, f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return tok

    def name(self, what: str, skip_nl: bool = True) -> _Tok:
        tok = self.next(skip_nl)
        if tok.type not in ("word", "str"):
            raise _Fail(tok, f"expected {what}, found {tok.text or 'end of input'!r}")
        return tok

    def skip_line(self) -> None:
        while self.toks[self.i].type not in ("nl", "eof"):
            self.i += 1


def _value_list(cur: _Cursor, what: str) -> list[_Tok]:
    """Parse ``{a, b, ...}`` after the opening brace has been checked."""
    cur.expect("{")
    items: list[_Tok] = []
    if cur.peek().text == "}":
        cur.next()
        return items
    while True:
        items.append(cur.name(what))
        tok = cur.next()
        if tok.text == "}":
            return items
        if tok.text != ",":
            raise _Fail(tok, f"expected ',' or '}}', found {tok.text or 'end of input'!r}")


# -- schema ------------------------------------------------------------------


def _parse_domain(cur: _Cursor, name: str) -> tuple[tuple[str, ...], bool]:
    ordered = False
    if cur.peek().text == "ordered" and cur.peek().type == "word":
        cur.next()
        ordered = True
    tok = cur.peek()
    if tok.text == "{":
        items = _value_list(cur, "domain value")
        if not items:
            raise _Fail(tok, f"attribute {name!r} has an empty domain", INVARIANT)
        values = [t.value for t in items]
        seen: set[str] = set()
        for t in items:
            if t.value in seen:
                raise _Fail(t, f"value {t.value!r} repeated in domain of {name!r}", INVARIANT)
            seen.add(t.value)
        return tuple(values), ordered
    lo = cur.name("domain")
    cur.expect("..")
    hi = cur.name("range bound")
    if not (_INT_RE.match(lo.text) and _INT_RE.match(hi.text)):
        raise _Fail(lo, f"malformed range {lo.text}..{hi.text}: bounds must be integers")
    a, b = int(lo.text), int(hi.text)
    if a > b:
        raise _Fail(lo, f"malformed range {lo.text}..{hi.text}: empty")
    if b - a + 1 > 10_000_000:
        raise _Fail(lo, f"range {lo.text}..{hi.text} is too large", INVARIANT)
    return tuple(str(v) for v in range(a, b + 1)), True


def _schema_from_text(
    text: str, max_domain: int | None = None
) -> tuple[Schema | None, list[ParseDiagnostic]]:
    diags: list[ParseDiagnostic] = []
    cur = _Cursor(_tokenize(text, diags))
    attributes: list[tuple[_Tok, Attribute]] = []
    classes: list[_Tok] = []
    classes_tok: _Tok | None = None
    try:
        wrapped = cur.peek().text == "schema"
        if wrapped:
            cur.next()
            cur.expect("{")
        while True:
            tok = cur.peek()
            if tok.type == "eof" or (wrapped and tok.text == "}"):
                break
            if tok.text == "attribute":
                cur.next()
                name = cur.name("attribute name")
                cur.expect(":")
                domain, ordered = _parse_domain(cur, name.value)
                attributes.append((name, Attribute(name.value, domain, ordered)))
            elif tok.text == "classes":
                classes_tok = cur.next()
                if classes:
                    raise _Fail(tok, "classes declared twice", INVARIANT)
                if cur.peek().text == ":":
                    cur.next()
                classes = _value_list(cur, "class name")
            else:
                raise _Fail(tok, f"expected 'attribute' or 'classes', found {tok.text!r}")
        if wrapped:
            cur.expect("}")
            end = cur.next()
            if end.type != "eof":
                raise _Fail(end, f"unexpected {end.text!r} after schema block")
    except _Fail as e:
        t = e.tok or cur.peek()
        diags.append(ParseDiagnostic("error", t.line, t.col, e.message, e.kind))
        return None, diags

    def inv(tok: _Tok, msg: str) -> None:
        diags.append(ParseDiagnostic("error", tok.line, tok.col, msg, INVARIANT))

    seen: set[str] = set()
    for tok, a in attributes:
        if a.name in seen:
            inv(tok, f"duplicate attribute name {a.name!r}")
        seen.add(a.name)
        if max_domain is not None and len(a.domain) > max_domain:
            inv(tok, f"attribute {a.name!r} has {len(a.domain)} values, above the bound of {max_domain}")
    eof = cur.toks[-1]
    if not attributes:
        inv(eof, "schema declares no attributes")
    if classes_tok is None:
        inv(eof, "schema declares no classes")
    elif len(classes) < 2:
        inv(classes_tok, "schema needs at least two classes")
    cseen: set[str] = set()
    for tok in classes:
        if tok.value in cseen:
            inv(tok, f"duplicate class name {tok.value!r}")
        cseen.add(tok.value)
    if any(d.severity == "error" for d in diags):
        return None, diags
    kwargs = {} if max_domain is None else {"max_domain": max_domain}
    try:
        schema = Schema(tuple(a for _, a in attributes), tuple(t.value for t in classes), **kwargs)
    except DomainError as e:
        diags.append(ParseDiagnostic("error", 1, 1, str(e), INVARIANT))
        return None, diags
    return schema, diags


def parse_schema(text: str, max_domain: int | None = None) -> Schema:
    """Parse schema DSL text; raise :class:`ParseError` on any error."""
    schema, diags = _schema_from_text(text, max_domain)
    if schema is None:
        raise ParseError(diags)
    return schema


# -- rules -------------------------------------------------------------------


def _expand_condition(cur: _Cursor, schema: Schema) -> tuple[_Tok, frozenset[str]]:
    attr_tok = cur.name("attribute name", skip_nl=False)
    if attr_tok.value not in schema:
        raise _Fail(attr_tok, f"unknown attribute {attr_tok.value!r}")
    attr = schema.attribute(attr_tok.value)
    op = cur.next(skip_nl=False)

    def domain_value(tok: _Tok) -> str:
        if tok.type not in ("word", "str"):
            raise _Fail(tok, f"expected a value, found {tok.text or 'end of line'!r}")
        if tok.value not in attr.values:
            raise _Fail(tok, f"value {tok.value!r} not in domain of {attr.name!r}")
        return tok.value

    if op.type == "word" and op.text == "in":
        nxt = cur.peek(skip_nl=False)
        if nxt.text == "{":
            items = _value_list(cur, "value")
            if not items:
                raise _Fail(nxt, f"empty value-set for {attr.name!r}")
            return attr_tok, frozenset(domain_value(t) for t in items)
        lo = domain_value(cur.next(skip_nl=False))
        cur.expect("..", skip_nl=False)
        hi = domain_value(cur.next(skip_nl=False))
        if not attr.ordered:
            raise _Fail(op, f"range condition on unordered attribute {attr.name!r}")
        i, j = attr.domain.index(lo), attr.domain.index(hi)
        return attr_tok, frozenset(attr.domain[i : j + 1])
    if op.type != "op":
        raise _Fail(op, f"expected an operator after {attr.name!r}, found {op.text or 'end of line'!r}")
    value = domain_value(cur.next(skip_nl=False))
    if op.text == "=":
        return attr_tok, frozenset([value])
    if op.text == "!=":
        return attr_tok, attr.values - {value}
    if not attr.ordered:
        raise _Fail(op, f"operator {op.text!r} needs an ordered domain; {attr.name!r} is nominal")
    k = attr.domain.index(value)
    picked = {
        ">": attr.domain[k + 1 :],
        ">=": attr.domain[k:],
        "<": attr.domain[:k],
        "<=": attr.domain[: k + 1],
    }[op.text]
    return attr_tok, frozenset(picked)


def _parse_rule_line(
    cur: _Cursor, schema: Schema, index: int, diags: list[ParseDiagnostic]
) -> tuple[_Tok, Rule | None, _Tok | None]:
    kw = cur.next(skip_nl=False)
    cls = cur.name("class name", skip_nl=False)
    if cls.value not in schema.classes:
        raise _Fail(cls, f"unknown class {cls.value!r}")
    rid_tok = None
    if cur.peek(skip_nl=False).text == ":":
        cur.next(skip_nl=False)
        rid_tok = cur.name("rule id", skip_nl=False)
    cur.expect(":-", skip_nl=False)
    conds: dict[str, frozenset[str]] = {}
    while True:
        if cur.peek(skip_nl=False).type in ("nl", "eof"):
            raise _Fail(cur.peek(skip_nl=False), "rule has no conditions" if not conds else "dangling ','")
        attr_tok, values = _expand_condition(cur, schema)
        name = attr_tok.value
        if not values:
            raise _Fail(attr_tok, f"condition on {name!r} admits no value", INVARIANT)
        if name in conds:
            merged = conds[name] & values
            diags.append(
                ParseDiagnostic(
                    "warning", attr_tok.line, attr_tok.col,
                    f"{name!r} constrained twice; conditions intersected",
                )
            )
            if not merged:
                raise _Fail(attr_tok, f"conditions on {name!r} admit no common value", INVARIANT)
            values = merged
        conds[name] = values
        tok = cur.next(skip_nl=False)
        if tok.type in ("nl", "eof"):
            break
        if tok.text != ",":
            raise _Fail(tok, f"expected ',' or end of line, found {tok.text!r}")
    rid = rid_tok.value if rid_tok is not None else f"R{index}"
    return kw, Rule(rid, cls.value, conds), rid_tok


def _system_from_text(
    text: str, schema: Schema
) -> tuple[RuleSystem | None, list[ParseDiagnostic]]:
    diags: list[ParseDiagnostic] = []
    cur = _Cursor(_tokenize(text, diags))
    rules: list[tuple[_Tok, Rule]] = []
    index = 0
    while True:
        cur.skip_nl()
        tok = cur.peek(skip_nl=False)
        if tok.type == "eof":
            break
        if tok.text != "rule" or tok.type != "word":
            diags.append(ParseDiagnostic("error", tok.line, tok.col, f"expected 'rule', found {tok.text!r}"))
            cur.skip_line()
            continue
        index += 1
        try:
            kw, rule, rid_tok = _parse_rule_line(cur, schema, index, diags)
            rules.append((rid_tok or kw, rule))
        except _Fail as e:
            t = e.tok or cur.peek(skip_nl=False)
            diags.append(ParseDiagnostic("error", t.line, t.col, e.message, e.kind))
            cur.skip_line()
    seen: dict[str, _Tok] = {}
    for tok, r in rules:
        if r.id in seen:
            diags.append(
                ParseDiagnostic("error", tok.line, tok.col, f"duplicate rule id {r.id!r}", INVARIANT)
            )
        seen[r.id] = tok
    if any(d.severity == "error" for d in diags):
        return None, diags
    system = RuleSystem(schema, tuple(r for _, r in rules))
    for c in system.empty_classes():
        diags.append(ParseDiagnostic("warning", 0, 0, f"class {c!r} has no rules", INVARIANT))
    return system, diags


def parse_system(
    text: str, schema: Schema, diagnostics: list[ParseDiagnostic] | None = None
) -> RuleSystem:
    """Parse rule DSL text against ``schema``.

    Warnings (and errors, before raising) are appended to ``diagnostics``
    when a list is supplied.
    """
    system, diags = _system_from_text(text, schema)
    if diagnostics is not None:
        diagnostics.extend(diags)
    if system is None:
        raise ParseError(diags)
    return system


# -- datasets ----------------------------------------------------------------


def _data_lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = next(csv.reader([stripped]))
        out.append((lineno, [f.strip() for f in fields]))
    return out


def parse_dataset(
    csv_text: str,
    schema: Schema,
    columns: Sequence[str] | None = None,
    label_column: str = "class",
) -> Dataset:
    """Read comma-separated rows into a :class:`Dataset`.

    Column order comes from ``columns`` if given, else from a header line
    naming every attribute plus ``label_column``, else it defaults to the
    schema attribute order followed by the label.
    """
    lines = _data_lines(csv_text)
    expected = set(schema.attribute_names) | {label_column}
    if columns is None:
        if lines and set(lines[0][1]) == expected and len(lines[0][1]) == len(expected):
            columns = lines[0][1]
            lines = lines[1:]
        else:
            columns = [*schema.attribute_names, label_column]
    else:
        columns = list(columns)
        if lines and lines[0][1] == columns:
            lines = lines[1:]
    if set(columns) != expected or len(columns) != len(expected):
        raise ParseError(
            [ParseDiagnostic("error", 1, 1, f"columns {list(columns)} must name every attribute and {label_column!r} once")]
        )
    diags: list[ParseDiagnostic] = []
    rows: list[DataObject] = []
    for lineno, fields in lines:
        if len(fields) != len(columns):
            diags.append(
                ParseDiagnostic("error", lineno, 1, f"expected {len(columns)} fields, found {len(fields)}")
            )
            continue
        record = dict(zip(columns, fields))
        label = record.pop(label_column)
        bad = False
        for a in schema.attributes:
            if record[a.name] not in a.values:
                col = columns.index(a.name) + 1
                diags.append(
                    ParseDiagnostic("error", lineno, col, f"value {record[a.name]!r} not in domain of {a.name!r}")
                )
                bad = True
        if label not in schema.classes:
            diags.append(
                ParseDiagnostic("error", lineno, columns.index(label_column) + 1, f"unknown class label {label!r}")
            )
            bad = True
        if not bad:
            rows.append(DataObject(record, label))
    if diags:
        raise ParseError(diags)
    return Dataset(schema, tuple(rows))


def serialize_dataset(dataset: Dataset, label_column: str = "class") -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = dataset.schema.attribute_names
    writer.writerow([*names, label_column])
    for row in dataset.rows:
        writer.writerow([*(row.values[n] for n in names), row.label])
    return buf.getvalue()


# -- serialization -----------------------------------------------------------


def _quote(value: str) -> str:
    if _WORD_RE.match(value):
        return value
    if '"' in value or "\n" in value:
        raise DomainError(f"value {value!r} cannot be written in the DSL")
    return f'"{value}"'


def serialize_schema(schema: Schema) -> str:
    lines = ["schema {"]
    width = max(len(_quote(a.name)) for a in schema.attributes)
    for a in schema.attributes:
        if a.ordered and _is_int_run(a.domain):
            domain = f"ordered {a.domain[0]}..{a.domain[-1]}"
        else:
            body = "{" + ", ".join(_quote(v) for v in a.domain) + "}"
            domain = f"ordered {body}" if a.ordered else body
        lines.append(f"  attribute {_quote(a.name):<{width}} : {domain}")
    lines.append("  classes { " + ", ".join(_quote(c) for c in schema.classes) + " }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _is_int_run(domain: tuple[str, ...]) -> bool:
    if not all(_INT_RE.match(v) for v in domain):
        return False
    ints = [int(v) for v in domain]
    return ints == list(range(ints[0], ints[0] + len(ints))) and [str(i) for i in ints] == list(domain)


def format_condition(attr: Attribute, values: frozenset[str]) -> str:
    """Shortest DSL condition that expands back to exactly ``values``."""
    name = _quote(attr.name)
    picked = attr.sort_values(values)
    n, k = len(attr.domain), len(picked)
    if k == 1:
        return f"{name} = {_quote(picked[0])}"
    if k == n - 1:
        (missing,) = attr.values - values
        return f"{name} != {_quote(missing)}"
    if attr.ordered:
        first = attr.domain.index(picked[0])
        if list(attr.domain[first : first + k]) == picked:
            if first == 0:
                return f"{name} <= {_quote(picked[-1])}"
            if first + k == n:
                return f"{name} >= {_quote(picked[0])}"
            return f"{name} in {_quote(picked[0])}..{_quote(picked[-1])}"
    return f"{name} in {{" + ", ".join(_quote(v) for v in picked) + "}"


def format_rule(rule: Rule, schema: Schema) -> str:
    conds = [
        format_condition(a, rule.conditions[a.name])
        for a in schema.attributes
        if a.name in rule.conditions
    ]
    return f"rule {_quote(rule.class_label)}:{_quote(rule.id)} :- " + ", ".join(conds)


def _rule_dict(rule: Rule, schema: Schema) -> dict[str, Any]:
    return {
        "id": rule.id,
        "class": rule.class_label,
        "conditions": {
            a.name: a.sort_values(rule.conditions[a.name])
            for a in schema.attributes
            if a.name in rule.conditions
        },
    }


def schema_to_dict(schema: Schema) -> dict[str, Any]:
    return {
        "attributes": [
            {"name": a.name, "domain": list(a.domain), "ordered": a.ordered}
            for a in schema.attributes
        ],
        "classes": list(schema.classes),
    }


def system_to_dict(system: RuleSystem, comments: Iterable[str] = ()) -> dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "rule_system",
        "comments": list(comments),
        "warnings": [f"class {c!r} has no rules" for c in system.empty_classes()],
        "schema": schema_to_dict(system.schema),
        "rules": [_rule_dict(r, system.schema) for r in system.rules],
    }


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def serialize_system(
    system: RuleSystem, format: str = "dsl", comments: Iterable[str] = ()
) -> str:
    """Deterministic text form of ``system`` (``"dsl"`` or ``"interchange"``)."""
    if format == "interchange":
        return dump_json(system_to_dict(system, comments))
    if format != "dsl":
        raise ValueError(f"unknown format {format!r}")
    lines = [f"# {c}" for c in comments]
    for c in system.empty_classes():
        lines.append(f"# warning: class {c!r} has no rules")
    lines.extend(format_rule(r, system.schema) for r in system.rules)
    return "\n".join(lines) + "\n"


def schema_from_dict(doc: dict[str, Any]) -> Schema:
    return Schema(
        tuple(
            Attribute(a["name"], tuple(a["domain"]), bool(a.get("ordered", False)))
            for a in doc["attributes"]
        ),
        tuple(doc["classes"]),
    )


def system_from_dict(doc: dict[str, Any]) -> RuleSystem:
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ParseError(
            [ParseDiagnostic("error", 1, 1, f"unsupported format_version {version!r}")]
        )
    schema = schema_from_dict(doc["schema"])
    rules = tuple(Rule(r["id"], r["class"], r["conditions"]) for r in doc["rules"])
    return RuleSystem(schema, rules)


def parse_interchange(text: str) -> RuleSystem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError([ParseDiagnostic("error", e.lineno, e.colno, e.msg)]) from None
    try:
        return system_from_dict(doc)
    except (KeyError, TypeError) as e:
        raise ParseError([ParseDiagnostic("error", 1, 1, f"malformed interchange document: {e}")]) from None
    except DomainError as e:
        if isinstance(e, ParseError):
            raise
        raise ParseError([ParseDiagnostic("error", 1, 1, str(e), INVARIANT)]) from None


def load_system(text: str, schema: Schema | None = None) -> RuleSystem:
    """Parse either format; DSL text needs ``schema``."""
    if text.lstrip().startswith("{"):
        system = parse_interchange(text)
        if schema is not None and system.schema != schema:
            raise ParseError(
                [ParseDiagnostic("error", 1, 1, "interchange schema differs from the given schema", INVARIANT)]
            )
        return system
    if schema is None:
        raise ValueError("a schema is required to parse rule DSL")
    return parse_system(text, schema)
