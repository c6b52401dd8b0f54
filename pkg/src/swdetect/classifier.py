"""Kernel-density Bayes classifier and k-nearest-neighbour voting.

Each class density is an isotropic Gaussian-kernel mixture over that
class's training points (bandwidth ``h**2``). Combined with maximum-
likelihood priors, the posterior ratio of class 0 to class 1 decides the
label, and as ``h**2 -> 0`` that decision collapses onto the single
nearest neighbour. The k-NN model generalises the limit to a majority
vote among ``k`` neighbours.

All distances are Euclidean in the space produced by the training-set
scaling (z-score by default, identity in ``raw`` mode).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import EmptyModel, IncompatibleModel, MalformedJson, SingleClass, ZeroSpread
from .features import FeatureVector, feature_matrix, label_array
from .signal import ClassLabel

MODEL_SCHEMA = "swdetect.knn-model/1"
DIM = 3
LIMIT_SCHEDULE = tuple(10.0**-p for p in range(7))


@dataclass(frozen=True)
class Scaling:
    offset: np.ndarray
    factor: np.ndarray
    mode: str = "zscore"

    def apply(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.offset) * self.factor

    @classmethod
    def identity(cls, dim: int = DIM) -> "Scaling":
        return cls(np.zeros(dim), np.ones(dim), "raw")

    def to_json(self) -> dict:
        return {"mode": self.mode, "offset": self.offset.tolist(), "factor": self.factor.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "Scaling":
        return cls(np.array(obj["offset"], dtype=float), np.array(obj["factor"], dtype=float), obj["mode"])


def fit_scaling(points, mode: str = "zscore") -> Scaling:
    """Per-dimension z-score (population std); ``mode="raw"`` gives the identity."""
    x = points if isinstance(points, np.ndarray) else feature_matrix(points)
    x = np.asarray(x, dtype=float)
    if mode == "raw":
        return Scaling.identity(x.shape[1])
    if mode != "zscore":
        raise ValueError(f"unknown scaling mode {mode!r}")
    std = x.std(axis=0)
    if x.shape[0] < 2 or np.any(std == 0):
        bad = [i for i, s in enumerate(std) if s == 0]
        raise ZeroSpread(f"feature dimension(s) {bad or 'all'} have zero spread")
    return Scaling(x.mean(axis=0), 1.0 / std, mode)


@dataclass(frozen=True)
class TrainingSet:
    points: tuple[FeatureVector, ...]
    scaling: Scaling
    X: np.ndarray = field(repr=False, compare=False)
    y: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def build(cls, points: Sequence[FeatureVector], mode: str = "zscore") -> "TrainingSet":
        points = tuple(points)
        if not points:
            raise EmptyModel("training set is empty")
        if any(p.label is None for p in points):
            raise ValueError("every training point needs a class label")
        y = label_array(points)
        if not (np.any(y == 0) and np.any(y == 1)):
            raise SingleClass("training set must contain both classes")
        raw = feature_matrix(points)
        scaling = fit_scaling(raw, mode)
        X = scaling.apply(raw)
        X.setflags(write=False)
        y.setflags(write=False)
        return cls(points, scaling, X, y)

    @property
    def n0(self) -> int:
        return int(np.sum(self.y == 0))

    @property
    def n1(self) -> int:
        return int(np.sum(self.y == 1))

    def __len__(self) -> int:
        return len(self.points)

    def scale_query(self, q) -> np.ndarray:
        raw = q.as_array() if isinstance(q, FeatureVector) else np.asarray(q, dtype=float)
        return self.scaling.apply(raw)


# kernel-density Bayes


@dataclass(frozen=True)
class KernelBayesModel:
    train: TrainingSet
    bandwidth_sq: float = 1.0

    def __post_init__(self):
        if not self.bandwidth_sq > 0:
            raise ValueError("bandwidth_sq must be positive")

    @property
    def priors(self) -> tuple[float, float]:
        n = len(self.train)
        return self.train.n0 / n, self.train.n1 / n

    def with_bandwidth(self, bandwidth_sq: float) -> "KernelBayesModel":
        return KernelBayesModel(self.train, bandwidth_sq)


def log_class_density(m: KernelBayesModel, q, c) -> float:
    c = int(ClassLabel.parse(c))
    z = m.train.scale_query(q)
    pts = m.train.X[m.train.y == c]
    d2 = np.sum((pts - z) ** 2, axis=1)
    h2 = m.bandwidth_sq
    dim = pts.shape[1]
    return float(logsumexp(-d2 / (2.0 * h2)) - math.log(len(pts)) - 0.5 * dim * math.log(2.0 * math.pi * h2))


def class_density(m: KernelBayesModel, q, c) -> float:
    return math.exp(log_class_density(m, q, c))


def _log_joint(m: KernelBayesModel, q) -> tuple[float, float]:
    p0, p1 = m.priors
    return (
        log_class_density(m, q, ClassLabel.NON_SWD) + math.log(p0),
        log_class_density(m, q, ClassLabel.SWD) + math.log(p1),
    )


def log_posterior_ratio(m: KernelBayesModel, q) -> float:
    """log of p(c=0 | q) / p(c=1 | q)."""
    j0, j1 = _log_joint(m, q)
    return j0 - j1


def posterior_ratio(m: KernelBayesModel, q) -> float:
    lr = log_posterior_ratio(m, q)
    return math.exp(lr) if lr < 709.0 else math.inf


def posteriors(m: KernelBayesModel, q) -> tuple[float, float]:
    j0, j1 = _log_joint(m, q)
    norm = logsumexp([j0, j1])
    return math.exp(j0 - norm), math.exp(j1 - norm)


def classify_kernel(m: KernelBayesModel, q) -> ClassLabel:
    # a ratio of exactly one goes to SWD
    return ClassLabel.NON_SWD if log_posterior_ratio(m, q) > 0 else ClassLabel.SWD


def nearest_neighbor_label(train: TrainingSet, q) -> ClassLabel:
    z = train.scale_query(q)
    d2 = np.sum((train.X - z) ** 2, axis=1)
    return ClassLabel(int(train.y[int(np.argmin(d2))]))


def knn_limit_check(m: KernelBayesModel, q, schedule: Sequence[float] = LIMIT_SCHEDULE) -> bool:
    """Do kernel decisions over a shrinking bandwidth schedule settle on the 1-NN label?

    Convergence means the two smallest bandwidths both reproduce the
    nearest-neighbour decision.
    """
    target = nearest_neighbor_label(m.train, q)
    decisions = [classify_kernel(m.with_bandwidth(h2), q) for h2 in sorted(schedule, reverse=True)]
    return all(d == target for d in decisions[-2:])


# k-NN


@dataclass(frozen=True)
class KnnModel:
    train: TrainingSet
    k: int = 10
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not 1 <= self.k <= len(self.train):
            raise ValueError(f"k must be in [1, {len(self.train)}], got {self.k}")

    @property
    def mode(self) -> str:
        return self.train.scaling.mode


def knn_vote(X: np.ndarray, y: np.ndarray, z: np.ndarray, k: int) -> tuple[int, tuple[int, int], np.ndarray]:
    """Vote among the ``k`` nearest rows of ``X`` to ``z``.

    Distance ties at the cut-off keep the lower training index; an even
    split of votes goes to the class of the single nearest neighbour.
    """
    d2 = np.sum((X - z) ** 2, axis=1)
    order = np.argsort(d2, kind="stable")[:k]
    ones = int(np.sum(y[order]))
    votes = (k - ones, ones)
    if votes[0] == votes[1]:
        label = int(y[order[0]])
    else:
        label = int(votes[1] > votes[0])
    return label, votes, order


def classify_knn(m: KnnModel, q) -> tuple[ClassLabel, tuple[int, int]]:
    if len(m.train) == 0:
        raise EmptyModel("model has no training points")
    label, votes, _ = knn_vote(m.train.X, m.train.y, m.train.scale_query(q), m.k)
    return ClassLabel(label), votes


def build_knn(points: Sequence[FeatureVector], k: int = 10, mode: str = "zscore", metadata: dict | None = None) -> KnnModel:
    return KnnModel(TrainingSet.build(points, mode), k, dict(metadata or {}))


# persistence


def model_to_json(m: KnnModel) -> dict:
    return {
        "schema": MODEL_SCHEMA,
        "k": m.k,
        "scaling": m.train.scaling.to_json(),
        "metadata": m.metadata,
        "points": [
            {
                "channel": p.channel_label,
                "start_index": p.segment_start_index,
                "sigma": p.ggd_scale,
                "variance": p.variance,
                "median": p.median,
                "label": int(p.label),
            }
            for p in m.train.points
        ],
    }


def model_from_json(obj: dict) -> KnnModel:
    if obj.get("schema") != MODEL_SCHEMA:
        raise IncompatibleModel(f"expected schema {MODEL_SCHEMA!r}, got {obj.get('schema')!r}")
    try:
        points = [
            FeatureVector(p["sigma"], p["variance"], p["median"], p["channel"], p["start_index"], ClassLabel(p["label"]))
            for p in obj["points"]
        ]
        mode = obj["scaling"]["mode"]
        k = int(obj["k"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedJson(f"bad model file: {exc}") from None
    m = build_knn(points, k, mode, obj.get("metadata"))
    stored = Scaling.from_json(obj["scaling"])
    if not (np.allclose(stored.offset, m.train.scaling.offset, rtol=1e-12, atol=0)
            and np.allclose(stored.factor, m.train.scaling.factor, rtol=1e-12, atol=0)):
        raise IncompatibleModel("stored scaling does not match the stored training points")
    return m


def save_model(m: KnnModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_json(m), indent=1, sort_keys=True) + "\n")


def load_model(path) -> KnnModel:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"{path}: invalid JSON ({exc.msg})") from None
    return model_from_json(obj)
