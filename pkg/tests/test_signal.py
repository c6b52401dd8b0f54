import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swdetect.errors import (
    BadLabel,
    EmptyFile,
    InconsistentRate,
    InvalidRecording,
    MalformedCsv,
    OutOfRange,
    UnknownChannel,
)
from swdetect.signal import (
    ClassLabel,
    EegRecording,
    load_annotations_json,
    load_recording_csv,
    save_recording_csv,
)


def write(path, text):
    path.write_text(text)
    return path


def test_three_rows_at_256_hz(tmp_path):
    p = write(tmp_path / "r.csv", "time_s,Cz\n0.0,1\n0.00390625,2\n0.0078125,3\n")
    rec = load_recording_csv(p)
    assert rec.sample_rate_hz == 256.0
    assert rec.labels == ("Cz",)
    np.testing.assert_array_equal(rec.channel("Cz"), [1.0, 2.0, 3.0])


def test_ragged_rows_rejected(tmp_path):
    p = write(tmp_path / "r.csv", "time_s,A,B\n0.0,1,2\n0.1,3\n")
    with pytest.raises(MalformedCsv):
        load_recording_csv(p)


@pytest.mark.parametrize("body", ["0.0,1\n0.1,abc\n", "0.0,1\n0.1,nan\n", "0.1,1\n0.0,2\n"])
def test_bad_cells_and_time_order(tmp_path, body):
    p = write(tmp_path / "r.csv", "time_s,A\n" + body)
    with pytest.raises(MalformedCsv):
        load_recording_csv(p)


@pytest.mark.parametrize("text", ["", "time_s,A\n"])
def test_empty_files(tmp_path, text):
    with pytest.raises(EmptyFile):
        load_recording_csv(write(tmp_path / "r.csv", text))


def test_bad_header(tmp_path):
    with pytest.raises(MalformedCsv):
        load_recording_csv(write(tmp_path / "r.csv", "t,A\n0,1\n1,2\n"))


def test_jitter_over_one_percent(tmp_path):
    p = write(tmp_path / "r.csv", "time_s,A\n0.0,1\n0.1,1\n0.2,1\n0.3015,1\n0.4,1\n")
    with pytest.raises(InconsistentRate):
        load_recording_csv(p)


def test_jitter_under_one_percent_loads(tmp_path):
    p = write(tmp_path / "r.csv", "time_s,A\n0.0,1\n0.1,1\n0.2,1\n0.3005,1\n0.4,1\n")
    assert load_recording_csv(p).sample_rate_hz == pytest.approx(10.0)


def test_two_channel_512_rows_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    rec = EegRecording(256.0, ("Fp1", "Fp2"), rng.normal(scale=50, size=(2, 512)))
    save_recording_csv(rec, tmp_path / "r.csv")
    back = load_recording_csv(tmp_path / "r.csv")
    assert (back.n_samples, back.n_channels) == (512, 2)
    assert back.duration_s == pytest.approx(2.0)
    np.testing.assert_array_equal(back.data, rec.data)


@settings(max_examples=30, deadline=None)
@given(
    rate=st.floats(1.0, 5000.0),
    n=st.integers(2, 60),
    m=st.integers(1, 4),
    seed=st.integers(0, 2**32 - 1),
)
def test_round_trip_property(tmp_path_factory, rate, n, m, seed):
    rng = np.random.default_rng(seed)
    data = rng.normal(scale=rng.uniform(1e-3, 1e4), size=(m, n))
    rec = EegRecording(rate, tuple(f"ch{i}" for i in range(m)), data)
    path = tmp_path_factory.mktemp("rt") / "r.csv"
    save_recording_csv(rec, path)
    back = load_recording_csv(path)
    np.testing.assert_array_equal(back.data, rec.data)
    assert back.sample_rate_hz == pytest.approx(rate, rel=1e-9)
    assert back.labels == rec.labels


def test_recording_invariants():
    with pytest.raises(InvalidRecording):
        EegRecording(0.0, ("A",), [[1.0]])
    with pytest.raises(InvalidRecording):
        EegRecording(256.0, ("A", "A"), np.zeros((2, 4)))
    with pytest.raises(InvalidRecording):
        EegRecording(256.0, ("A",), np.zeros((2, 4)))
    rec = EegRecording(256.0, ("A",), np.zeros((1, 4)))
    with pytest.raises(ValueError):
        rec.data[0, 0] = 1.0


@pytest.fixture
def minute_rec():
    return EegRecording(256.0, ("Fp1", "Cz"), np.zeros((2, 60 * 256)))


def test_annotation_parse(tmp_path, minute_rec):
    p = write(tmp_path / "a.json", json.dumps([{"channel": "Fp1", "onset_s": 10.0, "duration_s": 2.0, "label": "swd"}]))
    (ann,) = load_annotations_json(p, minute_rec)
    assert ann.label is ClassLabel.SWD
    assert (ann.channel_label, ann.onset_s, ann.duration_s) == ("Fp1", 10.0, 2.0)


@pytest.mark.parametrize(
    "item, exc",
    [
        ({"channel": "ZZ9", "onset_s": 1.0, "duration_s": 2.0, "label": "swd"}, UnknownChannel),
        ({"channel": "Fp1", "onset_s": 59.5, "duration_s": 2.0, "label": "swd"}, OutOfRange),
        ({"channel": "Fp1", "onset_s": 1.0, "duration_s": 0.0, "label": "swd"}, OutOfRange),
        ({"channel": "Fp1", "onset_s": 1.0, "duration_s": 2.0, "label": "spike"}, BadLabel),
    ],
)
def test_annotation_errors(tmp_path, minute_rec, item, exc):
    p = write(tmp_path / "a.json", json.dumps([item]))
    with pytest.raises(exc):
        load_annotations_json(p, minute_rec)


def test_annotation_ending_exactly_at_recording_end(tmp_path, minute_rec):
    p = write(tmp_path / "a.json", json.dumps([{"channel": "Cz", "onset_s": 58.0, "duration_s": 2.0, "label": "non-swd"}]))
    (ann,) = load_annotations_json(p, minute_rec)
    assert ann.label is ClassLabel.NON_SWD


def test_class_label_values():
    assert int(ClassLabel.SWD) == 1 and int(ClassLabel.NON_SWD) == 0
    assert len(ClassLabel) == 2
    assert ClassLabel.parse("swd") is ClassLabel.SWD
    assert ClassLabel.parse(0) is ClassLabel.NON_SWD
    with pytest.raises(BadLabel):
        ClassLabel.parse(2)
