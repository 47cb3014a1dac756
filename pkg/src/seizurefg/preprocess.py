"""Notch filtering, seizure-centered trimming, and 4-second block segmentation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal as sig

from .errors import (
    AnnotationError,
    FilterConfigError,
    SegmentationError,
    ShapeError,
)
from .recording import Recording, SeizureAnnotation

BLOCK_SAMPLES = 1024
BLOCK_CHANNELS = 18
WINDOW_S = 4.0
STRIDE_S = 1.0
#: Non-seizure context kept on each side of a seizure, as a multiple of its duration.
TRIM_RATIO = 3.0


@dataclass(frozen=True)
class FilterSpec:
    """Second-order IIR notch: center ``notch_freq``, bandwidth ``notch_freq / quality_factor``."""

    sample_rate: float
    notch_freq: float = 60.0
    quality_factor: float = 30.0

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise FilterConfigError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.quality_factor <= 0:
            raise FilterConfigError(f"quality_factor must be positive, got {self.quality_factor}")
        if not 0 < self.notch_freq < self.sample_rate / 2:
            raise FilterConfigError(
                f"notch_freq {self.notch_freq} Hz must lie strictly below the "
                f"Nyquist frequency {self.sample_rate / 2} Hz"
            )


def notch_filter(samples: np.ndarray, spec: FilterSpec) -> np.ndarray:
    """Zero-phase biquad notch. Forward-backward application keeps block
    boundaries free of phase shift; DC gain is exactly one."""
    x = np.asarray(samples, dtype=np.float64)
    if x.size == 0:
        raise FilterConfigError("cannot filter an empty signal")
    b, a = sig.iirnotch(spec.notch_freq, spec.quality_factor, fs=spec.sample_rate)
    return sig.filtfilt(b, a, x)


def filter_recording(recording: Recording, spec: FilterSpec | None = None) -> Recording:
    """Apply the notch to every channel of ``recording``."""
    if spec is None:
        spec = FilterSpec(sample_rate=recording.sample_rate)
    channels = [(label, notch_filter(samples, spec)) for label, samples in recording.channels]
    return Recording(
        patient_id=recording.patient_id,
        file_id=recording.file_id,
        sample_rate=recording.sample_rate,
        channels=channels,
        duration_s=recording.duration_s,
    )


@dataclass
class TrimmedSegment:
    """A contiguous slice of a recording with segment-local annotations."""

    recording: Recording
    annotations: list[SeizureAnnotation]
    offset_s: float  # segment start in source-recording time


def trim_around_seizures(
    recording: Recording, annotations: list[SeizureAnnotation]
) -> list[TrimmedSegment]:
    """Keep ``TRIM_RATIO`` seizure-durations of context before and after each
    seizure, clipping at the file edges and merging overlapping windows."""
    if not annotations:
        raise AnnotationError("no annotations supplied for trimming")
    duration = recording.duration_s
    for ann in annotations:
        if ann.end_s > duration + 1e-9:
            raise AnnotationError(
                f"annotation [{ann.start_s}, {ann.end_s}] extends past the "
                f"recording end at {duration}s"
            )

    windows = []
    for ann in annotations:
        d = ann.duration_s
        windows.append((max(0.0, ann.start_s - TRIM_RATIO * d),
                        min(duration, ann.end_s + TRIM_RATIO * d)))
    windows.sort()
    merged: list[list[float]] = [list(windows[0])]
    for lo, hi in windows[1:]:
        if lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])

    rate = recording.sample_rate
    segments: list[TrimmedSegment] = []
    for lo, hi in merged:
        i0 = int(round(lo * rate))
        i1 = int(round(hi * rate))
        channels = [(label, samples[i0:i1].copy()) for label, samples in recording.channels]
        seg = Recording(
            patient_id=recording.patient_id,
            file_id=recording.file_id,
            sample_rate=rate,
            channels=channels,
            duration_s=(i1 - i0) / rate,
        )
        local = [
            SeizureAnnotation(ann.start_s - lo, ann.end_s - lo, ann.file_id)
            for ann in annotations
            if lo - 1e-9 <= ann.start_s and ann.end_s <= hi + 1e-9
        ]
        segments.append(TrimmedSegment(recording=seg, annotations=local, offset_s=lo))
    return segments


@dataclass
class EegBlock:
    """One 4-second window: 1024 samples x 18 channels, binary label."""

    samples: np.ndarray
    start_s: float
    label: int

    def __post_init__(self):
        if self.samples.shape != (BLOCK_SAMPLES, BLOCK_CHANNELS):
            raise ShapeError(
                f"block samples must be ({BLOCK_SAMPLES}, {BLOCK_CHANNELS}), "
                f"got {self.samples.shape}"
            )
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label}")


@dataclass
class BlockSequence:
    """Consecutive blocks from one recording, one stride apart."""

    blocks: list[EegBlock]
    patient_id: str
    file_id: str
    stride_s: float = STRIDE_S

    def __post_init__(self):
        if not self.blocks:
            raise SegmentationError("block sequence is empty")
        starts = [b.start_s for b in self.blocks]
        diffs = np.diff(starts)
        if diffs.size and not np.allclose(diffs, self.stride_s, atol=1e-9):
            raise SegmentationError("consecutive block starts must differ by the stride")

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def labels(self) -> np.ndarray:
        return np.array([b.label for b in self.blocks], dtype=np.int64)


def block_starts(duration_s: float, window_s: float = WINDOW_S, stride_s: float = STRIDE_S) -> list[float]:
    """Start offsets 0, stride, 2*stride, ... with ``start + window <= duration``.

    For integer durations and the default 4s/1s geometry this yields
    ``floor(duration) - 3`` blocks.
    """
    if duration_s < window_s:
        return []
    n = int(math.floor((duration_s - window_s) / stride_s + 1e-9)) + 1
    return [i * stride_s for i in range(n)]


def _merge_intervals(intervals: list[tuple[float, float]]) -> list[tuple[float, float]]:
    if not intervals:
        return []
    intervals = sorted(intervals)
    merged = [list(intervals[0])]
    for lo, hi in intervals[1:]:
        if lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


def label_block(
    interval: tuple[float, float], annotations: list[SeizureAnnotation]
) -> int:
    """1 iff the block overlaps the seizure union for at least half its width.

    A tie at exactly half the window counts as seizure.
    """
    lo, hi = interval
    union = _merge_intervals([(a.start_s, a.end_s) for a in annotations])
    overlap = sum(max(0.0, min(hi, b) - max(lo, a)) for a, b in union)
    return 1 if overlap >= (hi - lo) / 2.0 - 1e-9 else 0


def segment(
    recording: Recording,
    annotations: list[SeizureAnnotation],
    window_s: float = WINDOW_S,
    stride_s: float = STRIDE_S,
) -> BlockSequence:
    """Slice ``recording`` into labeled overlapping blocks.

    Requires the 18-channel montage at 256 Hz so each block is exactly
    1024 x 18. Recordings shorter than one window are an error.
    """
    n_channels = len(recording.channels)
    if n_channels != BLOCK_CHANNELS:
        raise ShapeError(f"expected {BLOCK_CHANNELS} channels, got {n_channels}")
    rate = recording.sample_rate
    if int(round(window_s * rate)) != BLOCK_SAMPLES:
        raise SegmentationError(
            f"window of {window_s}s at {rate} Hz gives {int(round(window_s * rate))} "
            f"samples per block; expected {BLOCK_SAMPLES} (use 256 Hz input)"
        )
    starts = block_starts(recording.duration_s, window_s, stride_s)
    if not starts:
        raise SegmentationError(
            f"recording of {recording.duration_s}s is shorter than one "
            f"{window_s}s window"
        )
    matrix = recording.as_matrix().astype(np.float32)
    blocks = []
    for start in starts:
        i0 = int(round(start * rate))
        samples = matrix[i0:i0 + BLOCK_SAMPLES]
        label = label_block((start, start + window_s), annotations)
        blocks.append(EegBlock(samples=samples, start_s=start, label=label))
    return BlockSequence(
        blocks=blocks,
        patient_id=recording.patient_id,
        file_id=recording.file_id,
        stride_s=stride_s,
    )
