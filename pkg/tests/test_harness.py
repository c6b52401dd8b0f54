import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swdetect.classifier import classify_knn
from swdetect.errors import EmptyTestSet, IncompatibleModel, SingleClass, TooFewAugment, TooFewPoints
from swdetect.features import FeatureVector
from swdetect.harness import (
    EvalReport,
    FeatureConfig,
    augment_patient,
    evaluate,
    featurize_dataset,
    featurize_recording,
    run_pipeline,
    train,
    window_label,
)
from swdetect.segmenter import WindowSpec, segment_count
from swdetect.signal import Annotation, ClassLabel, EegRecording
from swdetect.synthgen import SynthSpec, gen_dataset, gen_recording

SWD, NON = ClassLabel.SWD, ClassLabel.NON_SWD


@pytest.fixture(scope="module")
def features_212():
    return featurize_dataset(gen_dataset(106, 106, seed=77))


@pytest.fixture(scope="module")
def model_212(features_212):
    return train(features_212, 10)


def test_train_counts(model_212):
    assert (model_212.train.n0, model_212.train.n1) == (106, 106)
    assert model_212.k == 10
    assert model_212.metadata["features"]["sample_rate_hz"] == 256.0


def test_train_too_few(features_212):
    with pytest.raises(TooFewPoints):
        train(features_212[:5], 10)


def test_train_single_class(features_212):
    with pytest.raises(SingleClass):
        train([p for p in features_212 if p.label is SWD], 10)


def test_augment_counts(model_212, features_212):
    extra = featurize_dataset(gen_dataset(10, 1, seed=5))[:10]
    m = augment_patient(model_212, extra)
    assert (m.train.n0, m.train.n1) == (106, 116)
    assert (model_212.train.n0, model_212.train.n1) == (106, 106)


def test_augment_too_few(model_212, features_212):
    with pytest.raises(TooFewAugment):
        augment_patient(model_212, [p for p in features_212 if p.label is SWD][:9])


def test_augment_with_duplicates(model_212, features_212):
    dups = [p for p in features_212 if p.label is SWD][:10]
    m = augment_patient(model_212, dups)
    assert m.train.n1 == 116
    # same points, only the refit scaling differs
    assert not np.allclose(m.train.scaling.offset, model_212.train.scaling.offset)
    agree = sum(classify_knn(m, q)[0] == classify_knn(model_212, q)[0] for q in features_212)
    assert agree >= 0.9 * len(features_212)


def test_evaluate_self_k1(features_212):
    report = evaluate(train(features_212, 1), features_212)
    assert report.accuracy == 1.0
    assert report.total == 212 and len(report.per_segment) == 212


def test_evaluate_all_positive(model_212):
    swd_only = [p for p in featurize_dataset(gen_dataset(5, 1, seed=8)) if p.label is SWD]
    report = evaluate(model_212, swd_only)
    assert report.specificity is None
    assert report.sensitivity is not None
    assert report.to_json()["specificity"] is None


def test_evaluate_empty(model_212):
    with pytest.raises(EmptyTestSet):
        evaluate(model_212, [FeatureVector(1.0, 1.0, 0.0)])


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_metric_identities(tp, tn, fp, fn):
    if tp + tn + fp + fn == 0:
        return
    r = EvalReport.from_counts(tp, tn, fp, fn)
    assert r.accuracy == (tp + tn) / (tp + tn + fp + fn)
    assert r.sensitivity == (tp / (tp + fn) if tp + fn else None)
    assert r.specificity == (tn / (tn + fp) if tn + fp else None)
    for v in (r.accuracy, r.sensitivity, r.specificity):
        assert v is None or 0.0 <= v <= 1.0


def test_report_dumps_deterministic(model_212, features_212):
    a = evaluate(model_212, features_212[:30]).dumps()
    b = evaluate(model_212, features_212[:30]).dumps()
    assert a == b
    assert set(["accuracy", "sensitivity", "specificity", "tp", "tn", "fp", "fn", "per_segment"]) <= set(
        __import__("json").loads(a)
    )


@pytest.mark.parametrize(
    "spans, expected",
    [([(0.0, 1.0)], SWD), ([(0.0, 0.99)], NON), ([(0.0, 0.6), (1.5, 0.5)], SWD), ([(0.0, 0.6), (0.2, 0.6)], NON)],
)
def test_window_label_half_rule(spans, expected):
    ann = [Annotation("Cz", on, d, SWD) for on, d in spans]
    assert window_label(ann, "Cz", 0.0, 2.0) is expected


def test_window_label_other_channel():
    assert window_label([Annotation("Pz", 0.0, 2.0, SWD)], "Cz", 0.0, 2.0) is NON


def test_pipeline_all_zero(model_212):
    rec = EegRecording(256.0, ("A", "B"), np.zeros((2, 2048)))
    res = run_pipeline(rec, model_212)
    assert len(res) == 2 * 7
    assert all(r.label is None and r.skipped for r in res)


def test_pipeline_detects_sixty_second_discharge(model_212):
    rec, _ = gen_recording(SynthSpec(duration_s=60.0, seed=4), episodes=[(0.0, 60.0)], labels=("Cz",))
    res = run_pipeline(rec, model_212)
    assert len(res) == 59
    assert sum(r.label is SWD for r in res) >= 0.9 * len(res)


def test_pipeline_episodes(model_212):
    rec, ann = gen_recording(SynthSpec(duration_s=60.0, seed=5), episodes=[(5.0, 10.0), (25.0, 10.0), (45.0, 10.0)])
    res = run_pipeline(rec, model_212)
    inside = [r for r in res if any(a.onset_s <= r.start_s and r.start_s + 2.0 <= a.offset_s for a in ann)]
    outside = [r for r in res if not any(a.onset_s < r.start_s + 2.0 and r.start_s < a.offset_s for a in ann)]
    assert sum(r.label is SWD for r in inside) >= 0.9 * len(inside)
    assert sum(r.label is SWD for r in outside) <= 0.1 * len(outside)


def test_pipeline_order_count_and_workers(model_212):
    rec, _ = gen_recording(SynthSpec(duration_s=9.5, seed=6), episodes=[(2.0, 4.0)], labels=("O2", "Fp1", "Cz"))
    serial = run_pipeline(rec, model_212)
    per_channel = segment_count(rec.n_samples, 512, 256)
    assert len(serial) == 3 * per_channel
    keys = [(rec.labels.index(r.channel), r.start_index) for r in serial]
    assert keys == sorted(keys)
    assert run_pipeline(rec, model_212, workers=3) == serial
    assert run_pipeline(rec, model_212) == serial


def test_pipeline_custom_window(model_212):
    rec, _ = gen_recording(SynthSpec(duration_s=10.0, seed=7))
    res = run_pipeline(rec, model_212, WindowSpec(2.0, 0.0))
    assert [r.start_index for r in res] == [0, 512, 1024, 1536, 2048]


def test_pipeline_rate_mismatch(model_212):
    rec = EegRecording(128.0, ("Cz",), np.ones((1, 1024)))
    with pytest.raises(IncompatibleModel):
        run_pipeline(rec, model_212)


def test_featurize_recording_labels():
    rec, ann = gen_recording(SynthSpec(duration_s=6.0, seed=1), episodes=[(2.0, 2.0)], labels=("Cz",))
    fv = featurize_recording(rec, ann, FeatureConfig())
    assert [(v.segment_start_index, v.label) for v in fv] == [(0, NON), (256, SWD), (512, SWD), (768, SWD), (1024, NON)]
