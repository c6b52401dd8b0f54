import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swdetect.errors import DegenerateCoefficients, MalformedCsv
from swdetect.features import (
    FeatureVector,
    check_class_envelope,
    extract_features,
    load_features_csv,
    save_features_csv,
)
from swdetect.ggd import GgdParams, sample_ggd
from swdetect.morlet import WaveletCoefficients, build_scale_grid
from swdetect.signal import ClassLabel

GRID = build_scale_grid(256.0)


def coeffs(matrix):
    return WaveletCoefficients(np.asarray(matrix, dtype=float), GRID, "Cz", 256)


def test_gaussian_coefficients():
    x = sample_ggd(GgdParams(1.0, 2.0), 100_000, seed=31).reshape(100, 1000)
    fv = extract_features(coeffs(x))
    assert fv.ggd_scale == pytest.approx(1.0, rel=0.03)
    assert fv.variance == pytest.approx(0.5, rel=0.03)
    assert abs(fv.median) < 0.02
    assert (fv.channel_label, fv.segment_start_index) == ("Cz", 256)


def test_single_spike_pattern():
    # [0, 0, 0, 10] repeated to meet the 8-sample minimum of the scale fit
    fv = extract_features(coeffs(np.tile([0.0, 0.0, 0.0, 10.0], (2, 1))))
    assert fv.median == 0.0
    assert fv.variance == pytest.approx(18.75)


def test_degenerate():
    with pytest.raises(DegenerateCoefficients):
        extract_features(coeffs(np.full((3, 8), 4.0)))


def test_homogeneity():
    x = sample_ggd(GgdParams(2.0, 1.2), 4000, seed=1).reshape(4, 1000) + 0.1
    a = extract_features(coeffs(x))
    b = extract_features(coeffs(7.0 * x))
    assert b.ggd_scale == pytest.approx(7.0 * a.ggd_scale, rel=1e-6)
    assert b.median == pytest.approx(7.0 * a.median, rel=1e-12)
    assert b.variance == pytest.approx(49.0 * a.variance, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    x = rng.laplace(size=(7, 64))
    a = extract_features(coeffs(x))
    b = extract_features(coeffs(rng.permutation(x.ravel()).reshape(16, 28)))
    assert a.values() == pytest.approx(b.values(), rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_negation(seed):
    x = np.random.default_rng(seed).standard_t(5, size=(5, 100)) + 0.2
    a = extract_features(coeffs(x))
    b = extract_features(coeffs(-x))
    assert b.median == -a.median
    assert b.variance == pytest.approx(a.variance, rel=1e-12)
    assert b.ggd_scale == pytest.approx(a.ggd_scale, rel=1e-7)


def test_envelope_inside_swd():
    assert check_class_envelope(FeatureVector(500.0, 1e6, 0.0), ClassLabel.SWD).ok


def test_envelope_outside_non_swd():
    report = check_class_envelope(FeatureVector(5.0, 100.0, 0.0), ClassLabel.NON_SWD)
    assert not report.ok
    assert report.violations == ["sigma", "variance"]


def test_envelope_closed_boundary():
    assert check_class_envelope(FeatureVector(12.0, 950.0, 22e3), ClassLabel.NON_SWD).ok


def test_csv_round_trip(tmp_path):
    vs = [
        FeatureVector(1.5, 2.25, -0.125, "Fp1", 0, ClassLabel.SWD),
        FeatureVector(0.1, 0.01, 1e-17, "O2", 256, ClassLabel.NON_SWD),
        FeatureVector(3.0, 9.0, 0.0, "Cz", 512, None),
    ]
    save_features_csv(vs, tmp_path / "f.csv")
    assert (tmp_path / "f.csv").read_text().splitlines()[0] == "channel,start_index,sigma,variance,median,label"
    assert load_features_csv(tmp_path / "f.csv") == vs
    with pytest.raises(MalformedCsv):
        load_features_csv(tmp_path / "f.csv", require_labels=True)


def test_csv_rejects_garbage(tmp_path):
    (tmp_path / "f.csv").write_text("channel,start_index,sigma,variance,median,label\nA,0,x,1,1,1\n")
    with pytest.raises(MalformedCsv):
        load_features_csv(tmp_path / "f.csv")
