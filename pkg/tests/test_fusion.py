from functools import reduce

import numpy as np
import pytest

from skeltex.fusion import (DEFAULT_FUSION_LABELS, FusionError, ScoreVector, accuracy, fuse_samples,
                            multiply_fuse, predict, read_scores_csv, write_scores_csv)


def sv(label, scores):
    return ScoreVector(label, scores)


def test_single_vector_identity():
    assert multiply_fuse([sv("a", [0.2, 0.8])]).tolist() == [0.2, 0.8]


def test_two_vectors():
    out = multiply_fuse([sv("a", [0.6, 0.4]), sv("b", [0.5, 0.5])])
    assert out.tolist() == pytest.approx([0.30, 0.20], abs=1e-15)


def test_fold_oracle(rng):
    for _ in range(100):
        vecs = [sv(f"m{i}", rng.random(6)) for i in range(5)]
        oracle = reduce(lambda acc, v: [a * b for a, b in zip(acc, v.scores.tolist())], vecs[1:],
                        vecs[0].scores.tolist())
        assert np.abs(multiply_fuse(vecs) - oracle).max() <= 1e-12


def test_permutation_bit_identical(rng):
    vecs = [sv(f"m{i}", rng.random(8)) for i in range(7)]
    base = multiply_fuse(vecs).tobytes()
    for _ in range(20):
        assert multiply_fuse([vecs[i] for i in rng.permutation(7)]).tobytes() == base


def test_zero_forces_zero(rng):
    vecs = [sv(f"m{i}", rng.random(4) + 0.1) for i in range(3)]
    vecs[1].scores[2] = 0.0
    assert multiply_fuse(vecs)[2] == 0.0


def test_errors():
    with pytest.raises(FusionError):
        multiply_fuse([])
    with pytest.raises(FusionError):
        multiply_fuse([sv("a", [1, 2]), sv("b", [1, 2, 3])])
    with pytest.raises(FusionError):
        sv("a", [0.1, -0.2])
    with pytest.raises(FusionError):
        sv("a", [np.nan])


def test_predict():
    assert predict([0.2, 0.7, 0.1]) == 1
    assert predict([0.5, 0.5]) == 0
    with pytest.raises(FusionError):
        predict([])


def test_predict_linear_scan(rng):
    for _ in range(200):
        v = rng.integers(0, 5, 7).astype(float)  # plenty of ties
        best = 0
        for i in range(1, len(v)):
            if v[i] > v[best]:
                best = i
        assert predict(v) == best


def test_positive_rescaling_never_changes_prediction(rng):
    for _ in range(1000):
        vecs = [sv(f"m{i}", rng.random(5)) for i in range(4)]
        base = predict(multiply_fuse(vecs))
        k = rng.integers(4)
        vecs[k] = sv(vecs[k].model_label, vecs[k].scores * rng.uniform(1e-3, 1e3))
        assert predict(multiply_fuse(vecs)) == base


def test_default_set_excludes_jjo_js2():
    assert len(DEFAULT_FUSION_LABELS) == 12
    assert "JJo-JS2-EM2" not in DEFAULT_FUSION_LABELS


def test_csv_round_trip_and_fuse(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    write_scores_csv(a, [("JJd-JS1-EM1", "s1", [0.9, 0.1]), ("JJd-JS1-EM1", "s2", [0.4, 0.6])])
    write_scores_csv(b, [("JJv-JS3-EM2", "s1", [0.6, 0.4]), ("JJv-JS3-EM2", "s2", [0.7, 0.3])])
    assert a.read_text().splitlines()[0] == "model_label,sample_id,score_0,score_1"
    scores = read_scores_csv(a)
    assert scores["s2"][0].scores.tolist() == [0.4, 0.6]
    preds = fuse_samples([read_scores_csv(a), read_scores_csv(b)])
    assert preds == {"s1": 0, "s2": 0}  # s2: 0.28 vs 0.18
    assert fuse_samples([read_scores_csv(a), read_scores_csv(b)], ["JJd-JS1-EM1"]) == {"s1": 0, "s2": 1}
    assert accuracy(preds, {"s1": 0, "s2": 1}) == 0.5


def test_bad_header(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("label,sample,a\n")
    with pytest.raises(FusionError):
        read_scores_csv(p)
