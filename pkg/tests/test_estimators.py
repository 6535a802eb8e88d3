import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ttm import entropy as E
from ttm.estimators import EscapeTimeTransformer, RegimeClassifier, TopologicalEntropyEstimator
from ttm.raster import SURVIVED, ShaderConfig, shade_dynamical_pixel
from ttm.validation import check_int, check_parameter, check_points, check_window


def test_escape_transformer_matches_shader():
    zs = np.array([0j, -1j, 3 + 3j, 0.4 - 0.2j])
    tr = EscapeTimeTransformer(c=0.5567 + 0.8471j, max_iter=200, N=20)
    out = tr.fit_transform(zs)
    assert out.shape == (4, 2)
    for z, row in zip(zs, out):
        assert tuple(row) == shade_dynamical_pixel(0.5567 + 0.8471j, z, ShaderConfig(200, 0.0, 20))
    xy = np.column_stack([zs.real, zs.imag])
    assert np.array_equal(tr.transform(xy), out)


def test_escape_transformer_params_and_errors():
    tr = EscapeTimeTransformer(c=2.0, N=7)
    assert clone(tr).get_params()["N"] == 7
    with pytest.raises(NotFittedError):
        EscapeTimeTransformer().transform([0j])
    with pytest.raises(ValueError):
        EscapeTimeTransformer(c=0.5).fit()
    with pytest.raises(ValueError):
        EscapeTimeTransformer(mode="x").fit()
    assert EscapeTimeTransformer(c=2.0).fit_transform([0j])[0, 0] == SURVIVED


def test_regime_classifier():
    pred = RegimeClassifier().fit().predict([1.5, -1.06 + 0.5j, 0.5 + 0.5j])
    assert list(pred) == ["RealSegment", "ComplexPolygonWithHoles", "GlobalAttractorAtOrigin"]


def test_entropy_estimator():
    s = E.segment_samples(-4j / 3, 0, 100_000)
    est = TopologicalEntropyEstimator(c=1.5).fit(s)
    assert est.score() == pytest.approx(math.log(1.5), abs=0.05)
    assert len(est.counts_) == 14
    with pytest.raises(NotFittedError):
        TopologicalEntropyEstimator().score()
    with pytest.raises(ValueError):
        TopologicalEntropyEstimator(window=(6, 7)).fit(s)


def test_validation_helpers():
    assert check_points([1 + 2j]).dtype == complex
    assert check_points(np.array([[1.0, 2.0]]))[0] == 1 + 2j
    assert check_points([1.5])[0] == 1.5
    with pytest.raises(ValueError):
        check_points(["a"])
    with pytest.raises(ValueError):
        check_points([np.nan])
    assert check_parameter(0.5 - 0.8j, canonical=True).was_conjugated
    with pytest.raises(ValueError):
        check_parameter("1.5")
    with pytest.raises(ValueError):
        check_parameter(1.5, nonreal=True)
    with pytest.raises(ValueError):
        check_int("n", True)
    with pytest.raises(ValueError):
        check_int("n", 0)
    assert check_int("n", 5, 1, 10) == 5
    assert check_window([6, 14]) == (6, 14)
    with pytest.raises(ValueError):
        check_window((3,))
