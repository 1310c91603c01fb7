"""Evaluate, reduce and verify conjunctive rule-based classification systems."""

from .estimator import RuleSystemClassifier
from .metrics import (
    Metrics,
    compactness,
    conflict_pairs,
    evaluate,
    space_coverage,
)
from .model import (
    Attribute,
    DataObject,
    Dataset,
    DomainError,
    Rule,
    RuleSystem,
    RuleSystemError,
    Schema,
    SchemaMismatchError,
    SpaceTooLargeError,
    effective_constraint,
    exclusive,
    matches,
    overlaps,
    subsumes,
)
from .reduce import (
    ReductionLog,
    VerificationReport,
    corollary_filter,
    greedy_reduce,
    minimal_reductions_oracle,
    reducible_conditions,
    replay_log,
    subsumption_prune,
    verify_reduction,
)
from .textio import (
    ParseDiagnostic,
    ParseError,
    parse_dataset,
    parse_schema,
    parse_system,
    serialize_system,
)

__version__ = "0.1.0"

__all__ = [
    "Attribute",
    "DataObject",
    "Dataset",
    "DomainError",
    "Metrics",
    "ParseDiagnostic",
    "ParseError",
    "ReductionLog",
    "Rule",
    "RuleSystem",
    "RuleSystemClassifier",
    "RuleSystemError",
    "Schema",
    "SchemaMismatchError",
    "SpaceTooLargeError",
    "VerificationReport",
    "compactness",
    "conflict_pairs",
    "corollary_filter",
    "effective_constraint",
    "evaluate",
    "exclusive",
    "greedy_reduce",
    "matches",
    "minimal_reductions_oracle",
    "overlaps",
    "parse_dataset",
    "parse_schema",
    "parse_system",
    "reducible_conditions",
    "replay_log",
    "serialize_system",
    "space_coverage",
    "subsumes",
    "subsumption_prune",
    "verify_reduction",
]
