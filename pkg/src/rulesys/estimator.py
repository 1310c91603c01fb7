"""scikit-learn wrapper around a fixed rule system.

``fit`` does not induce rules: it validates the training data against the
schema and, when ``reduce=True``, runs greedy condition removal (using the
training data as accuracy guard when ``guard="data"``). The result composes
with pipelines, ``cross_val_score`` and ``clone``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .metrics import STRICT, evaluate
from .model import DataObject, Dataset, DomainError, RuleSystem, matches
from .reduce import GUARD_RULES, greedy_reduce, subsumption_prune


def check_objects(X, schema) -> list[dict[str, str]]:
    """Convert ``X`` to attribute→value dicts and check every value.

    Accepts a pandas DataFrame (columns named after attributes, any order)
    or a 2-D array-like whose columns follow the schema attribute order.
    """
    names = schema.attribute_names
    if hasattr(X, "columns"):
        missing = [n for n in names if n not in X.columns]
        if missing:
            raise DomainError(f"input lacks attribute column(s) {missing}")
        rows = X[list(names)].astype(str).to_numpy()
    else:
        rows = np.asarray(X, dtype=object)
        if rows.ndim != 2 or rows.shape[1] != len(names):
            raise DomainError(
                f"expected a 2-D input with {len(names)} columns, got shape {rows.shape}"
            )
    out = []
    for i, row in enumerate(rows):
        record = {n: str(v) for n, v in zip(names, row)}
        for a in schema.attributes:
            if record[a.name] not in a.values:
                raise DomainError(f"row {i}: value {record[a.name]!r} not in domain of {a.name!r}")
        out.append(record)
    return out


def to_dataset(X, y, schema) -> Dataset:
    records = check_objects(X, schema)
    labels = [str(v) for v in np.asarray(y, dtype=object).ravel()]
    if len(labels) != len(records):
        raise DomainError(f"X has {len(records)} rows but y has {len(labels)} labels")
    return Dataset(schema, tuple(DataObject(r, lab) for r, lab in zip(records, labels)))


class RuleSystemClassifier(ClassifierMixin, BaseEstimator):
    """Classify with a rule system, optionally reducing it on ``fit``.

    Parameters
    ----------
    system : RuleSystem
        The rules to apply.
    reduce : bool
        Run greedy condition removal during ``fit``.
    guard : {"rules", "data"}
        Reduction guard; ``"data"`` refuses removals that lower strict
        accuracy on the training data.
    prune : bool
        Drop subsumed rules after reduction.
    default_label : str or None
        Prediction for uncovered or conflicting objects.
    """

    def __init__(self, system=None, reduce=False, guard=GUARD_RULES, prune=False, default_label=None):
        self.system = system
        self.reduce = reduce
        self.guard = guard
        self.prune = prune
        self.default_label = default_label

    def fit(self, X, y):
        if not isinstance(self.system, RuleSystem):
            raise DomainError("RuleSystemClassifier needs a RuleSystem")
        schema = self.system.schema
        data = to_dataset(X, y, schema)
        system = self.system
        self.reduction_log_ = None
        if self.reduce:
            system, self.reduction_log_ = greedy_reduce(system, self.guard, data)
            if self.prune:
                system = subsumption_prune(system)
        self.system_ = system
        self.classes_ = np.array(schema.classes, dtype=object)
        self.n_features_in_ = len(schema.attributes)
        self.feature_names_in_ = np.array(schema.attribute_names, dtype=object)
        return self

    def fired_classes(self, X) -> list[frozenset[str]]:
        check_is_fitted(self, "system_")
        out = []
        for record in check_objects(X, self.system_.schema):
            obj = DataObject(record, self.system_.schema.classes[0])
            out.append(frozenset(r.class_label for r in self.system_.rules if matches(r, obj)))
        return out

    def predict(self, X):
        preds = []
        for classes in self.fired_classes(X):
            preds.append(next(iter(classes)) if len(classes) == 1 else self.default_label)
        return np.array(preds, dtype=object)

    def score(self, X, y, sample_weight=None):
        """Strict accuracy: uncovered and conflicting rows count as errors."""
        if sample_weight is not None:
            return super().score(X, y, sample_weight=sample_weight)
        check_is_fitted(self, "system_")
        metrics, _ = evaluate(self.system_, to_dataset(X, y, self.system_.schema), STRICT)
        return float(metrics.accuracy)
