import numpy as np
import pytest

from skeltex.baseline import CentroidModel, TrainingError, featurize, score, train
from skeltex.encode import TextureImage, bilinear_resize
from skeltex.fusion import predict


def test_uniform_image_constant_vector():
    v = featurize(TextureImage(np.full((64, 48, 3), 128, dtype=np.uint8)))
    assert v.shape == (3072,)
    assert np.allclose(v, 128 / 255, atol=1e-12)


def test_identical_images_identical_vectors(rng):
    px = rng.integers(0, 256, (40, 40, 3), dtype=np.uint8)
    assert np.array_equal(featurize(px), featurize(px.copy()))


def test_downsample_of_upsampled_constant():
    big = bilinear_resize(np.full((4, 4), 0.37), 256, 256)
    px = np.repeat(np.round(big * 255).astype(np.uint8)[..., None], 3, axis=2)
    assert np.abs(featurize(px) - px[0, 0, 0] / 255).max() <= 1e-9


def test_channel_layout(rng):
    px = np.zeros((32, 32, 3), dtype=np.uint8)
    px[..., 1] = 255
    v = featurize(px).reshape(32, 32, 3)
    assert (v[..., 1] == 1).all() and (v[..., [0, 2]] == 0).all()


def test_one_sample_per_class():
    samples = [(np.full(6, float(c)), c) for c in range(3)]
    model = train(samples)
    assert np.array_equal(model.centroids, [s for s, _ in samples])


def test_duplicates_do_not_move_centroid(rng):
    samples = [(rng.random(5), c) for c in range(3) for _ in range(2)]
    m1 = train(samples)
    m2 = train(samples + samples)
    assert np.allclose(m1.centroids, m2.centroids, rtol=0, atol=1e-15)


def test_mean_oracle(rng):
    X = rng.random((30, 8))
    y = rng.integers(0, 3, 30)
    y[:3] = [0, 1, 2]
    model = train(zip(X, y))
    for c in range(3):
        rows = [x for x, t in zip(X.tolist(), y.tolist()) if t == c]
        oracle = [sum(col) / len(rows) for col in zip(*rows)]
        assert np.abs(model.centroids[c] - oracle).max() <= 1e-12


def test_empty_class_is_an_error():
    with pytest.raises(TrainingError, match="class"):
        train([(np.zeros(3), 0), (np.ones(3), 2)], n_classes=3)
    with pytest.raises(TrainingError):
        train([])


def _model(rng, c=4, d=10):
    return train([(rng.random(d), k) for k in range(c)], label="JJd-JS1-EM1")


def test_score_at_centroid(rng):
    model = _model(rng)
    s = score(model, model.centroids[2]).scores
    assert s[2] == 1.0
    assert predict(s) == 2 and (np.delete(s, 2) < 1).all()


def test_equidistant_scores_equal():
    model = train([(np.array([1.0, 0.0]), 0), (np.array([-1.0, 0.0]), 1)])
    s = score(model, np.array([0.0, 5.0])).scores
    assert s[0] == s[1]


def test_score_formula(rng):
    model = _model(rng)
    v = rng.random(10)
    c = model.centroids
    tau = np.mean([np.sum((c[i] - c[j]) ** 2) for i in range(4) for j in range(i + 1, 4)])
    expect = [np.exp(-np.sum((v - c[i]) ** 2) / tau) for i in range(4)]
    assert model.tau == pytest.approx(tau, rel=1e-12)
    assert np.allclose(score(model, v).scores, expect, rtol=1e-12)
    assert score(model, v).model_label == "JJd-JS1-EM1"


def test_scores_strictly_positive(rng):
    model = _model(rng)
    assert (score(model, np.full(10, 1e6)).scores > 0).all()


def test_prediction_invariant_to_bandwidth(rng):
    model = _model(rng)
    for _ in range(50):
        v = rng.random(10)
        base = predict(score(model, v).scores)
        for tau in (1e-2, 0.5, 7.0, 300.0):
            other = CentroidModel(model.centroids, model.classes, tau)
            assert predict(score(other, v).scores) == base


def test_dimension_mismatch(rng):
    with pytest.raises(ValueError):
        score(_model(rng), np.zeros(3))


def test_save_load(tmp_path, rng):
    model = _model(rng)
    model.save(tmp_path / "m.npz")
    back = CentroidModel.load(tmp_path / "m.npz")
    assert np.array_equal(back.centroids, model.centroids)
    assert back.tau == model.tau and back.label == model.label and back.size == 32
