import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from rulesys.estimator import RuleSystemClassifier
from rulesys.model import DomainError


def toy_xy(data):
    X = [[r.values["P"], r.values["W"]] for r in data]
    y = [r.label for r in data]
    return X, y


def test_fit_predict_score(toy_system, toy_data):
    X, y = toy_xy(toy_data)
    clf = RuleSystemClassifier(toy_system).fit(X, y)
    assert list(clf.predict(X)) == ["NotCar", "NotCar", "Car", "NotCar", None]
    assert clf.score(X, y) == pytest.approx(0.8)
    assert list(clf.classes_) == ["NotCar", "Car"] and clf.n_features_in_ == 2


def test_reduce_on_fit(toy_system, toy_reduced, toy_data):
    X, y = toy_xy(toy_data)
    clf = RuleSystemClassifier(toy_system, reduce=True, guard="data").fit(X, y)
    assert clf.system_ == toy_reduced and len(clf.reduction_log_.removals) == 2
    assert clf.score(X, y) == 1.0


def test_default_label_and_conflicts(toy_system, toy_data):
    X, y = toy_xy(toy_data)
    clf = RuleSystemClassifier(toy_system, default_label="NotCar").fit(X, y)
    assert clf.predict([["1", "LE3"]])[0] == "NotCar"
    assert clf.fired_classes([["1", "LE3"]]) == [frozenset()]


def test_params_and_clone(ga):
    clf = RuleSystemClassifier(ga, reduce=True, prune=True)
    params = clf.get_params()
    assert params["reduce"] is True and params["system"] is ga
    copy = clone(clf)
    assert copy.get_params()["prune"] is True and not hasattr(copy, "system_")


def test_not_fitted(toy_system):
    with pytest.raises(NotFittedError):
        RuleSystemClassifier(toy_system).predict([["1", "LE3"]])


def test_input_checks(toy_system, toy_data):
    X, y = toy_xy(toy_data)
    clf = RuleSystemClassifier(toy_system).fit(X, y)
    with pytest.raises(DomainError):
        clf.predict([["0", "LE3"]])
    with pytest.raises(DomainError):
        clf.predict([["1"]])
    with pytest.raises(DomainError):
        RuleSystemClassifier(None).fit(X, y)
    with pytest.raises(DomainError):
        RuleSystemClassifier(toy_system).fit(X, y[:-1])


def test_dataframe_columns_any_order(toy_system, toy_data):
    pd = pytest.importorskip("pandas")
    X, y = toy_xy(toy_data)
    frame = pd.DataFrame(X, columns=["P", "W"])[["W", "P"]]
    clf = RuleSystemClassifier(toy_system).fit(frame, y)
    assert list(clf.predict(frame)) == list(clf.predict(np.array(X, dtype=object)))
    with pytest.raises(DomainError, match="lacks"):
        clf.predict(frame[["W"]])
