"""Three-predictor summary of a segment's wavelet coefficients.

Every coefficient of the scales x time matrix is pooled into one sample,
from which we take the GGD scale, the population variance and the median.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DegenerateCoefficients, DegenerateData, EmptyFile, MalformedCsv
from .ggd import fit_ggd_mle
from .morlet import WaveletCoefficients
from .signal import ClassLabel

FEATURE_NAMES = ("sigma", "variance", "median")
CSV_HEADER = ("channel", "start_index", "sigma", "variance", "median", "label")

# per-class envelopes observed on the clinical training data: (low, high)
CLASS_ENVELOPES = {
    ClassLabel.NON_SWD: {"sigma": (12.0, 1300.0), "variance": (950.0, 32e6), "median": (-28e3, 22e3)},
    ClassLabel.SWD: {"sigma": (31.0, 1800.0), "variance": (2800.0, 43e6), "median": (-73e3, 74e3)},
}


@dataclass(frozen=True)
class FeatureVector:
    ggd_scale: float
    variance: float
    median: float
    channel_label: str = ""
    segment_start_index: int = 0
    label: Optional[ClassLabel] = None

    def __post_init__(self):
        for name in ("ggd_scale", "variance", "median"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "segment_start_index", int(self.segment_start_index))
        if not all(math.isfinite(v) for v in self.values()):
            raise ValueError("feature values must be finite")
        if self.variance < 0:
            raise ValueError("variance must be non-negative")

    def values(self) -> tuple[float, float, float]:
        return (self.ggd_scale, self.variance, self.median)

    def as_array(self) -> np.ndarray:
        return np.array(self.values())

    def with_label(self, label) -> "FeatureVector":
        return replace(self, label=None if label is None else ClassLabel.parse(label))


def summarize(sample) -> tuple[float, float, float]:
    x = np.asarray(sample, dtype=float).ravel()
    try:
        fit = fit_ggd_mle(x)
    except DegenerateData as exc:
        raise DegenerateCoefficients(str(exc)) from None
    return fit.scale, float(np.var(x)), float(np.median(x))


def extract_features(coeffs: WaveletCoefficients, label=None) -> FeatureVector:
    sigma, var, med = summarize(coeffs.matrix)
    return FeatureVector(
        sigma,
        var,
        med,
        coeffs.channel_label,
        coeffs.segment_start_index,
        None if label is None else ClassLabel.parse(label),
    )


@dataclass(frozen=True)
class BoundsReport:
    label: ClassLabel
    inside: dict

    @property
    def ok(self) -> bool:
        return all(self.inside.values())

    @property
    def violations(self) -> list[str]:
        return [name for name, ok in self.inside.items() if not ok]


def check_class_envelope(fv: FeatureVector, label=None) -> BoundsReport:
    """Advisory: is the vector inside the reference envelope of its class? Closed intervals."""
    label = ClassLabel.parse(label if label is not None else fv.label)
    bounds = CLASS_ENVELOPES[label]
    inside = {
        name: bounds[name][0] <= value <= bounds[name][1]
        for name, value in zip(FEATURE_NAMES, fv.values())
    }
    return BoundsReport(label, inside)


def save_features_csv(vectors: Iterable[FeatureVector], path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for fv in vectors:
            writer.writerow([
                fv.channel_label,
                fv.segment_start_index,
                repr(fv.ggd_scale),
                repr(fv.variance),
                repr(fv.median),
                "" if fv.label is None else int(fv.label),
            ])


def load_features_csv(path, require_labels: bool = False) -> list[FeatureVector]:
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise EmptyFile(f"{path}: empty file")
    if tuple(h.strip() for h in rows[0]) != CSV_HEADER:
        raise MalformedCsv(f"{path}: header must be {','.join(CSV_HEADER)}")
    out = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(CSV_HEADER):
            raise MalformedCsv(f"{path}: row {i} has {len(row)} cells, expected {len(CSV_HEADER)}")
        try:
            start = int(row[1])
            vals = [float(c) for c in row[2:5]]
            label = ClassLabel.parse(row[5]) if row[5].strip() else None
            fv = FeatureVector(*vals, row[0], start, label)
        except ValueError as exc:
            raise MalformedCsv(f"{path}: row {i}: {exc}") from None
        if require_labels and label is None:
            raise MalformedCsv(f"{path}: row {i} has no label")
        out.append(fv)
    return out


def feature_matrix(vectors: Sequence[FeatureVector]) -> np.ndarray:
    return np.array([fv.values() for fv in vectors], dtype=float).reshape(len(vectors), 3)


def label_array(vectors: Sequence[FeatureVector]) -> np.ndarray:
    return np.array([int(fv.label) for fv in vectors], dtype=int)
