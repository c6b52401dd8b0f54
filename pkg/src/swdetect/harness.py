"""Training, evaluation and whole-recording detection.

Windows are labelled for evaluation by annotation overlap: a window is
SWD when at least half of its duration is covered by SWD annotations on
its channel. Windows whose coefficients are degenerate (flat signal) are
skipped and logged instead of aborting the run.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .classifier import KernelBayesModel, KnnModel, build_knn, classify_knn, log_posterior_ratio
from .errors import (
    DegenerateCoefficients,
    EmptyTestSet,
    IncompatibleModel,
    SingleClass,
    TooFewAugment,
    TooFewPoints,
)
from .features import FeatureVector, extract_features
from .morlet import build_scale_grid, cwt
from .segmenter import Segment, WindowSpec, segment_channel
from .signal import Annotation, ClassLabel, EegRecording

log = logging.getLogger(__name__)

MIN_AUGMENT = 10
OVERLAP_FRACTION = 0.5


@dataclass(frozen=True)
class FeatureConfig:
    sample_rate_hz: float = 256.0
    window_s: float = 2.0
    overlap_s: float = 1.0
    f_min: float = 1.0
    f_max: float = 3.0
    n_scales: int = 21

    @property
    def window(self) -> WindowSpec:
        return WindowSpec(self.window_s, self.overlap_s)

    def grid(self):
        return build_scale_grid(self.sample_rate_hz, self.f_min, self.f_max, self.n_scales)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> "FeatureConfig":
        return cls(**{k: obj[k] for k in cls.__dataclass_fields__ if k in obj})


def window_label(annotations: Iterable[Annotation], channel: str, start_s: float, duration_s: float) -> ClassLabel:
    """SWD iff SWD annotations on ``channel`` cover >= 50% of the window."""
    end_s = start_s + duration_s
    spans = sorted(
        (max(a.onset_s, start_s), min(a.offset_s, end_s))
        for a in annotations
        if a.channel_label == channel and a.label is ClassLabel.SWD
    )
    covered, cursor = 0.0, start_s
    for lo, hi in spans:
        lo = max(lo, cursor)
        if hi > lo:
            covered += hi - lo
            cursor = hi
    return ClassLabel.SWD if covered >= OVERLAP_FRACTION * duration_s - 1e-12 else ClassLabel.NON_SWD


def featurize_segment(seg: Segment, grid, label=None) -> FeatureVector:
    return extract_features(cwt(seg, grid), label)


def featurize_recording(
    rec: EegRecording,
    annotations: Optional[Sequence[Annotation]] = None,
    config: Optional[FeatureConfig] = None,
) -> list[FeatureVector]:
    """Feature vector for every non-degenerate window; labelled when annotations are given."""
    config = config or FeatureConfig(sample_rate_hz=rec.sample_rate_hz)
    _check_rate(config, rec)
    grid = config.grid()
    out = []
    for label, samples in rec.channels():
        for seg in segment_channel(samples, rec.sample_rate_hz, config.window, label):
            truth = None
            if annotations is not None:
                truth = window_label(annotations, label, seg.start_s, seg.duration_s)
            try:
                out.append(featurize_segment(seg, grid, truth))
            except DegenerateCoefficients as exc:
                log.info("skipping %s@%d: %s", label, seg.start_index, exc)
    return out


def _check_rate(config: FeatureConfig, rec: EegRecording) -> None:
    if not math.isclose(config.sample_rate_hz, rec.sample_rate_hz, rel_tol=1e-6):
        raise IncompatibleModel(
            f"features configured for {config.sample_rate_hz:g} Hz, recording is {rec.sample_rate_hz:g} Hz"
        )


# training


def train(points: Sequence[FeatureVector], k: int = 10, mode: str = "zscore", config: Optional[FeatureConfig] = None) -> KnnModel:
    labeled = [p for p in points if p.label is not None]
    if len(labeled) < max(k, 2):
        raise TooFewPoints(f"{len(labeled)} labelled vectors, need at least {max(k, 2)}")
    if len({int(p.label) for p in labeled}) < 2:
        raise SingleClass("training vectors contain only one class")
    metadata = {"features": (config or FeatureConfig()).to_json()}
    return build_knn(labeled, k, mode, metadata)


def augment_patient(model: KnnModel, new_swd: Sequence[FeatureVector]) -> KnnModel:
    """Append a patient's SWD exemplars to the training set and refit the scaling."""
    new_swd = list(new_swd)
    if any(p.label is not ClassLabel.SWD for p in new_swd):
        raise ValueError("augmentation vectors must all be labelled SWD")
    if len(new_swd) < MIN_AUGMENT:
        raise TooFewAugment(f"{len(new_swd)} SWD vectors supplied, need at least {MIN_AUGMENT}")
    points = list(model.train.points) + new_swd
    return build_knn(points, model.k, model.mode, model.metadata)


# evaluation


@dataclass(frozen=True)
class SegmentResult:
    channel: str
    start_index: int
    true_label: int
    predicted_label: int
    votes: tuple[int, int]
    log_posterior_ratio: float


@dataclass(frozen=True)
class EvalReport:
    tp: int
    tn: int
    fp: int
    fn: int
    per_segment: list = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total

    @property
    def sensitivity(self) -> Optional[float]:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else None

    @property
    def specificity(self) -> Optional[float]:
        return self.tn / (self.tn + self.fp) if self.tn + self.fp else None

    @classmethod
    def from_counts(cls, tp: int, tn: int, fp: int, fn: int) -> "EvalReport":
        return cls(tp, tn, fp, fn)

    def to_json(self) -> dict:
        return {
            "tp": self.tp,
            "tn": self.tn,
            "fp": self.fp,
            "fn": self.fn,
            "accuracy": self.accuracy,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "per_segment": [
                {
                    "channel": r.channel,
                    "start_index": r.start_index,
                    "true_label": r.true_label,
                    "predicted_label": r.predicted_label,
                    "votes": list(r.votes),
                    "log_posterior_ratio": r.log_posterior_ratio,
                }
                for r in self.per_segment
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)


def evaluate(model: KnnModel, test: Sequence[FeatureVector], bandwidth_sq: float = 1.0) -> EvalReport:
    """Confusion counts of k-NN predictions, SWD as the positive class.

    Each segment also records the kernel-Bayes log posterior ratio
    (class 0 over class 1) at ``bandwidth_sq`` in the scaled space.
    """
    test = [q for q in test if q.label is not None]
    if not test:
        raise EmptyTestSet("no labelled test vectors")
    kernel = KernelBayesModel(model.train, bandwidth_sq)
    counts = {"tp": 0, "tn": 0, "fp": 0, "fn": 0}
    rows = []
    for q in test:
        pred, votes = classify_knn(model, q)
        truth = q.label
        key = ("t" if pred == truth else "f") + ("p" if pred is ClassLabel.SWD else "n")
        counts[key] += 1
        rows.append(SegmentResult(q.channel_label, q.segment_start_index, int(truth), int(pred), votes,
                                  log_posterior_ratio(kernel, q)))
    return EvalReport(per_segment=rows, **counts)


# whole-recording detection


@dataclass(frozen=True)
class WindowResult:
    channel: str
    start_index: int
    start_s: float
    label: Optional[ClassLabel]
    votes: Optional[tuple[int, int]] = None
    skipped: Optional[str] = None


def model_config(model: KnnModel) -> FeatureConfig:
    return FeatureConfig.from_json(model.metadata.get("features", {}))


def _run_channel(label: str, samples: np.ndarray, rate: float, model: KnnModel, spec: WindowSpec, grid) -> list[WindowResult]:
    out = []
    for seg in segment_channel(samples, rate, spec, label):
        try:
            fv = featurize_segment(seg, grid)
        except DegenerateCoefficients as exc:
            log.info("skipping %s@%d: %s", label, seg.start_index, exc)
            out.append(WindowResult(label, seg.start_index, seg.start_s, None, None, str(exc)))
            continue
        pred, votes = classify_knn(model, fv)
        out.append(WindowResult(label, seg.start_index, seg.start_s, pred, votes))
    return out


def run_pipeline(rec: EegRecording, model: KnnModel, spec: Optional[WindowSpec] = None, workers: int = 1) -> list[WindowResult]:
    """Label every window of every channel, ordered by (channel position, start index)."""
    config = model_config(model)
    _check_rate(config, rec)
    spec = spec or config.window
    grid = config.grid()
    jobs = list(rec.channels())
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _run_channel(job[0], job[1], rec.sample_rate_hz, model, spec, grid), jobs))
    else:
        parts = [_run_channel(label, x, rec.sample_rate_hz, model, spec, grid) for label, x in jobs]
    return [r for part in parts for r in part]


# synthetic reproduction of the train/test protocol


def featurize_dataset(dataset, config: Optional[FeatureConfig] = None) -> list[FeatureVector]:
    out = []
    for item in dataset:
        out.extend(featurize_recording(item.recording, item.annotations, config))
    return out


def _seed(seed: int, stream: int) -> int:
    return int(np.random.SeedSequence([seed, stream]).generate_state(1)[0])


def end_to_end(
    seed: int = 0,
    n_train: tuple[int, int] = (106, 106),
    n_test: tuple[int, int] = (35, 34),
    k: int = 10,
    mode: str = "zscore",
    spec=None,
) -> EvalReport:
    """Generate train/test sets, featurize, train k-NN and evaluate; fully determined by ``seed``."""
    from .synthgen import SynthSpec, gen_dataset

    spec = spec or SynthSpec()
    config = FeatureConfig(sample_rate_hz=spec.sample_rate_hz)
    train_set = featurize_dataset(gen_dataset(*n_train, seed=_seed(seed, 0), spec=spec), config)
    test_set = featurize_dataset(gen_dataset(*n_test, seed=_seed(seed, 1), spec=spec), config)
    model = train(train_set, k, mode, config)
    return evaluate(model, test_set)


@dataclass(frozen=True)
class AugmentationOutcome:
    before: EvalReport
    after: EvalReport


def patient_augmentation_trial(seed: int = 0, n_augment: int = MIN_AUGMENT, n_test: tuple[int, int] = (10, 10), k: int = 10) -> AugmentationOutcome:
    """Score a held-out synthetic patient before and after adding its SWD exemplars."""
    from .synthgen import PATIENT_FREQ_RANGE, PATIENT_SPEC, SynthSpec, gen_dataset

    config = FeatureConfig(sample_rate_hz=SynthSpec().sample_rate_hz)
    model = train(featurize_dataset(gen_dataset(106, 106, seed=_seed(seed, 0)), config), k, config=config)
    patient = featurize_dataset(
        gen_dataset(n_augment + n_test[0], n_test[1], seed=_seed(seed, 2), spec=PATIENT_SPEC, freq_range=PATIENT_FREQ_RANGE),
        config,
    )
    swd = [p for p in patient if p.label is ClassLabel.SWD]
    test = swd[n_augment:] + [p for p in patient if p.label is ClassLabel.NON_SWD]
    return AugmentationOutcome(evaluate(model, test), evaluate(augment_patient(model, swd[:n_augment]), test))
