import numpy as np
import pytest
from sklearn.base import clone

from polycontact.estimators import CoarseGrainingCensus, ContactMapTransformer
from polycontact.lattice import Walk, enumerate_walks


def test_transformer_bits():
    walks = [Walk.from_tokens("+1,-1", 2), Walk.from_tokens("+1,+1", 2)]
    X = ContactMapTransformer().fit_transform(walks)
    # pairs (0,1), (0,2), (1,2)
    assert X.tolist() == [[0, 1, 0], [0, 0, 0]]


def test_transformer_matrix_output_and_params():
    t = ContactMapTransformer(rule="adjacency", output="matrix")
    assert clone(t).get_params() == {"rule": "adjacency", "output": "matrix"}
    out = t.fit_transform([Walk.from_tokens("+1,+2,-1", 2, "saw")])
    assert out[0].pairs() == [(0, 3)]


def test_transformer_rejects_mixed_lengths():
    with pytest.raises(ValueError):
        ContactMapTransformer().fit([Walk.from_tokens("+1", 2), Walk.from_tokens("+1,+1", 2)])
    t = ContactMapTransformer().fit([Walk.from_tokens("+1", 2)])
    with pytest.raises(ValueError):
        t.transform([Walk.from_tokens("+1,+1", 2)])


def test_census_estimator():
    est = CoarseGrainingCensus(dimension=2, length=2).fit()
    assert est.num_matrices_ == 2 and est.gamma_ == pytest.approx(0.25)
    assert est.score() == pytest.approx(0.20282, abs=1e-4)
    degs = est.transform([Walk.from_tokens("+1,-1", 2), Walk.from_tokens("+1,+2", 2)])
    assert degs.ravel().tolist() == [4, 12]


def test_census_estimator_from_walks():
    walks = list(enumerate_walks("srw", 2, 3))
    a = CoarseGrainingCensus(length=3).fit(walks)
    b = CoarseGrainingCensus(length=3).fit()
    assert a.census_.to_json() == b.census_.to_json()


def test_unfitted():
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        CoarseGrainingCensus().transform([Walk.from_tokens("+1", 2)])
