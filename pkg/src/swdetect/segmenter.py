"""Rectangular sliding-window segmentation.

Window ``t`` selects samples ``[t*hop, t*hop + L)`` of a channel, which is
what multiplying by a block selection matrix ``[0 | I | 0]`` does; the
selection is done by slicing. Trailing samples that cannot fill a whole
window are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SignalTooShort
from .signal import EegRecording


@dataclass(frozen=True)
class WindowSpec:
    window_s: float = 2.0
    overlap_s: float = 1.0

    def __post_init__(self):
        if not self.window_s > 0:
            raise ValueError(f"window_s must be positive, got {self.window_s}")
        if not 0 <= self.overlap_s < self.window_s:
            raise ValueError(f"need 0 <= overlap_s < window_s, got {self.overlap_s}")

    def length(self, rate: float) -> int:
        return int(round(self.window_s * rate))

    def hop(self, rate: float) -> int:
        hop = int(round((self.window_s - self.overlap_s) * rate))
        if hop < 1:
            raise ValueError("window hop rounds to zero samples at this rate")
        return hop


@dataclass(frozen=True)
class Segment:
    channel_label: str
    start_index: int
    samples: np.ndarray
    sample_rate_hz: float

    @property
    def start_s(self) -> float:
        return self.start_index / self.sample_rate_hz

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


def segment_count(n: int, length: int, hop: int) -> int:
    if n < length:
        return 0
    return (n - length) // hop + 1


def segment_channel(samples, rate: float, spec: WindowSpec = WindowSpec(), channel_label: str = "") -> list[Segment]:
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    length, hop = spec.length(rate), spec.hop(rate)
    if n < length:
        raise SignalTooShort(f"{n} samples, window needs {length}")
    out = []
    for t in range(segment_count(n, length, hop)):
        window = samples[t * hop : t * hop + length].copy()
        window.setflags(write=False)
        out.append(Segment(channel_label, t * hop, window, float(rate)))
    return out


def segment_recording(rec: EegRecording, spec: WindowSpec = WindowSpec()) -> list[Segment]:
    """Segments of every channel, ordered by (channel position, start index)."""
    out = []
    for label, samples in rec.channels():
        out.extend(segment_channel(samples, rec.sample_rate_hz, spec, label))
    return out
