import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from henonblender import BlenderCertifier

X = np.array([[1.185, -9.5], [1.181, -9.9], [1.185, -6.0], [1.185, -3.0]])


def test_transform_gives_condition_margins():
    est = BlenderCertifier().fit(X)
    M = est.transform(X)
    assert M.shape == (4, 6)
    assert np.all(M[0] > 1e-2)
    assert np.all(np.isnan(M[3]))
    assert M[2].min() < 0


def test_predict_labels():
    est = BlenderCertifier().fit(X)
    assert est.predict(X).tolist() == ["PASS", "PASS", "FAIL", "FAIL"]


def test_four_column_input_with_perturbation():
    X4 = np.array([[1.185, -9.5, 0.0, 0.0], [1.185, -9.5, 1e-6, -1e-6], [1.185, -9.5, 0.05, 0.05]])
    labels = BlenderCertifier().fit(X4).predict(X4).tolist()
    assert labels[:2] == ["PASS", "PASS"]
    assert labels[2] != "PASS"


def test_params_and_clone():
    est = BlenderCertifier(theta=0.4, rigorous=False)
    assert est.get_params() == {"theta": 0.4, "vartheta": 0.1, "rigorous": False}
    c = clone(est)
    assert c.get_params() == est.get_params()


def test_validation():
    with pytest.raises(NotFittedError):
        BlenderCertifier().transform(X)
    with pytest.raises(ValueError):
        BlenderCertifier().fit(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        BlenderCertifier(vartheta=10.0).fit(X)
    est = BlenderCertifier().fit(X)
    with pytest.raises(ValueError):
        est.transform(np.zeros((1, 4)))
    assert est.n_features_in_ == 2


def test_works_in_a_pipeline():
    pipe = make_pipeline(BlenderCertifier(rigorous=False))
    assert pipe.fit_transform(X[:2]).shape == (2, 6)
