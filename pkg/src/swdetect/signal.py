"""Recordings, annotations and their on-disk formats.

Recording CSV::

    time_s,Fp1,Fp2
    0.0,12.5,-3.25
    0.00390625,11.0,-2.5

Annotation JSON is an array of
``{"channel": str, "onset_s": float, "duration_s": float, "label": "swd" | "non-swd"}``.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadLabel,
    EmptyFile,
    InconsistentRate,
    InvalidRecording,
    MalformedCsv,
    MalformedJson,
    OutOfRange,
    UnknownChannel,
)

UNITS = "uV"
RATE_JITTER = 0.01


class ClassLabel(enum.IntEnum):
    NON_SWD = 0
    SWD = 1

    @property
    def token(self) -> str:
        return "swd" if self is ClassLabel.SWD else "non-swd"

    @classmethod
    def parse(cls, value) -> "ClassLabel":
        if isinstance(value, ClassLabel):
            return value
        if isinstance(value, str):
            key = value.strip().lower()
            if key in ("swd", "1"):
                return cls.SWD
            if key in ("non-swd", "nonswd", "0"):
                return cls.NON_SWD
        elif isinstance(value, (int, np.integer)) and not isinstance(value, bool) and value in (0, 1):
            return cls(int(value))
        raise BadLabel(f"unrecognised class label {value!r}")


@dataclass(frozen=True)
class EegRecording:
    """Multichannel recording, one row of ``data`` per channel (microvolts)."""

    sample_rate_hz: float
    labels: tuple[str, ...]
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=float, copy=True)
        if data.ndim == 1:
            data = data[np.newaxis, :]
        if data.ndim != 2:
            raise InvalidRecording(f"data must be 2-D (channels, samples), got shape {data.shape}")
        labels = tuple(str(lab) for lab in self.labels)
        if not (self.sample_rate_hz > 0 and math.isfinite(self.sample_rate_hz)):
            raise InvalidRecording(f"sample rate must be positive, got {self.sample_rate_hz}")
        if len(labels) != data.shape[0]:
            raise InvalidRecording(f"{len(labels)} labels for {data.shape[0]} channels")
        if len(set(labels)) != len(labels):
            raise InvalidRecording("channel labels must be unique")
        if data.shape[1] < 1:
            raise InvalidRecording("recording has no samples")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sample_rate_hz

    @property
    def units(self) -> str:
        return UNITS

    def channel(self, label: str) -> np.ndarray:
        try:
            return self.data[self.labels.index(label)]
        except ValueError:
            raise UnknownChannel(f"no channel {label!r}") from None

    def channels(self) -> Iterable[tuple[str, np.ndarray]]:
        return zip(self.labels, self.data)


@dataclass(frozen=True)
class Annotation:
    channel_label: str
    onset_s: float
    duration_s: float
    label: ClassLabel

    @property
    def offset_s(self) -> float:
        return self.onset_s + self.duration_s

    def to_json(self) -> dict:
        return {
            "channel": self.channel_label,
            "onset_s": self.onset_s,
            "duration_s": self.duration_s,
            "label": self.label.token,
        }


def _parse_float(cell: str, row: int, col: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise MalformedCsv(f"row {row}, column {col}: non-numeric cell {cell!r}") from None
    if not math.isfinite(value):
        raise MalformedCsv(f"row {row}, column {col}: non-finite value {cell!r}")
    return value


def load_recording_csv(path) -> EegRecording:
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise EmptyFile(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2 or header[0] != "time_s":
        raise MalformedCsv(f"{path}: header must be 'time_s,<label>,...'")
    labels = header[1:]
    if any(not lab for lab in labels):
        raise MalformedCsv(f"{path}: empty channel label in header")
    if len(set(labels)) != len(labels):
        raise MalformedCsv(f"{path}: duplicate channel labels")
    body = rows[1:]
    if not body:
        raise EmptyFile(f"{path}: header only, no samples")

    width = len(header)
    values = np.empty((len(body), width))
    for i, row in enumerate(body, start=2):
        if len(row) != width:
            raise MalformedCsv(f"{path}: row {i} has {len(row)} cells, expected {width}")
        values[i - 2] = [_parse_float(c, i, j) for j, c in enumerate(row, start=1)]

    if len(body) < 2:
        raise MalformedCsv(f"{path}: need at least two rows to infer the sample rate")
    dt = np.diff(values[:, 0])
    if np.any(dt <= 0):
        raise MalformedCsv(f"{path}: time column is not strictly increasing")
    step = float(np.median(dt))
    if np.max(np.abs(dt - step)) > RATE_JITTER * step:
        raise InconsistentRate(f"{path}: sampling interval jitter exceeds 1% of {step:g} s")
    return EegRecording(1.0 / step, tuple(labels), values[:, 1:].T)


def save_recording_csv(rec: EegRecording, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["time_s", *rec.labels])
        times = np.arange(rec.n_samples) / rec.sample_rate_hz
        for n in range(rec.n_samples):
            writer.writerow([repr(float(times[n]))] + [repr(float(v)) for v in rec.data[:, n]])


def _require_number(item: dict, key: str, idx: int) -> float:
    value = item.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedJson(f"annotation {idx}: {key!r} must be a number")
    return float(value)


def parse_annotations(items: Sequence[dict], rec: EegRecording) -> list[Annotation]:
    out = []
    for idx, item in enumerate(items):
        if not isinstance(item, dict):
            raise MalformedJson(f"annotation {idx}: expected an object")
        channel = item.get("channel")
        if channel not in rec.labels:
            raise UnknownChannel(f"annotation {idx}: unknown channel {channel!r}")
        onset = _require_number(item, "onset_s", idx)
        duration = _require_number(item, "duration_s", idx)
        label = item.get("label")
        if label not in ("swd", "non-swd"):
            raise BadLabel(f"annotation {idx}: label must be 'swd' or 'non-swd', got {label!r}")
        if onset < 0 or duration <= 0:
            raise OutOfRange(f"annotation {idx}: need onset_s >= 0 and duration_s > 0")
        # half-sample slack absorbs float noise in the recording duration
        if onset + duration > rec.duration_s + 0.5 / rec.sample_rate_hz:
            raise OutOfRange(
                f"annotation {idx}: ends at {onset + duration:g} s, recording is {rec.duration_s:g} s"
            )
        out.append(Annotation(channel, onset, duration, ClassLabel.parse(label)))
    return out


def load_annotations_json(path, rec: EegRecording) -> list[Annotation]:
    path = Path(path)
    text = path.read_text()
    if not text.strip():
        raise EmptyFile(f"{path}: empty file")
    try:
        items = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"{path}: invalid JSON ({exc.msg})") from None
    if not isinstance(items, list):
        raise MalformedJson(f"{path}: expected a JSON array")
    return parse_annotations(items, rec)


def save_annotations_json(annotations: Iterable[Annotation], path) -> None:
    Path(path).write_text(json.dumps([a.to_json() for a in annotations], indent=1) + "\n")
