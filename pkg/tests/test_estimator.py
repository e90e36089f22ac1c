import numpy as np
import pytest

from cropfold.errors import ValidationError
from cropfold.estimator import CropFoldTransform, validate_batch

from conftest import rand_image


def small_transform(**kw):
    params = dict(resolution=32, seed=7)
    params.update(kw)
    return CropFoldTransform(**params)


def test_get_set_params_round_trip():
    t = small_transform()
    params = t.get_params()
    assert params["resolution"] == 32
    assert params["seed"] == 7
    clone = CropFoldTransform(**params)
    assert clone.get_params() == params
    t.set_params(resolution=64, seed=1)
    assert t.resolution == 64 and t.seed == 1
    with pytest.raises(ValidationError):
        t.set_params(bogus=3)


def test_transform_shapes_and_determinism():
    X = np.stack([rand_image(3, 60, 80, seed=i) for i in range(4)])
    t = small_transform().fit()
    a = t.transform(X)
    b = small_transform().fit().transform(X)
    assert a.shape == (4, 3, 32, 32)
    assert a.dtype == np.float32
    assert np.array_equal(a, b)


def test_variable_sized_inputs_as_list():
    X = [rand_image(3, 50, 70, seed=1), rand_image(3, 81, 41, seed=2)]
    out = small_transform().fit().transform(X)
    assert out.shape == (2, 3, 32, 32)


def test_index_offset_splits_batches():
    X = [rand_image(3, 64, 64, seed=i) for i in range(6)]
    whole = small_transform().fit().transform(X)
    head = small_transform().fit().transform(X[:3])
    tail = small_transform(index_offset=3).fit().transform(X[3:])
    assert np.array_equal(whole, np.concatenate([head, tail]))


def test_transform_with_plans():
    X = [rand_image(3, 64, 64, seed=9)]
    out, plans = small_transform().fit().transform_with_plans(X)
    assert len(plans) == 1
    assert plans[0].n in (2, 3, 4)
    assert out.shape[0] == 1


def test_requires_fit_first():
    with pytest.raises(ValidationError, match="before fit"):
        small_transform().transform([rand_image(3, 32, 32)])


def test_validation_errors_name_sample():
    t = small_transform().fit()
    with pytest.raises(ValidationError, match=r"X\[0\]"):
        t.transform([np.zeros((32, 32), np.float32)])
    bad = np.zeros((1, 3, 8, 8), np.float32)
    bad[0, 0, 0, 0] = 1.5
    with pytest.raises(ValidationError, match="outside"):
        t.transform(bad)
    with pytest.raises(ValidationError, match="4 dims"):
        t.transform(np.zeros((3, 8, 8), np.float32))


def test_validate_batch_casts_to_float32():
    out = validate_batch([np.zeros((1, 2, 2), np.float64)])
    assert out[0].dtype == np.float32


def test_invalid_params_fail_at_fit():
    t = small_transform(interpolation="area")
    with pytest.raises(Exception):
        t.fit()


def test_baseline_mode():
    X = [rand_image(3, 64, 64, seed=3)]
    t = small_transform(baseline_rrc=True).fit()
    out, plans = t.transform_with_plans(X)
    assert plans[0].n == 1
    assert out.shape == (1, 3, 32, 32)


def test_sklearn_pipeline_compatibility():
    sklearn = pytest.importorskip("sklearn")
    from sklearn.pipeline import Pipeline

    X = np.stack([rand_image(3, 48, 48, seed=i) for i in range(2)])
    pipe = Pipeline([("augment", small_transform())])
    out = pipe.fit_transform(X)
    assert out.shape == (2, 3, 32, 32)
