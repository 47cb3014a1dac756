"""EEG recording containers, seizure annotations, and bipolar montage selection."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import AnnotationError, MontageError

logger = logging.getLogger(__name__)

#: The 18 bipolar derivations used throughout the pipeline, in fixed order.
DEFAULT_MONTAGE_PAIRS = (
    "FP1-F7", "F7-T7", "T7-P7", "P7-O1",
    "FP1-F3", "F3-T3", "T3-P3", "P3-O1",
    "FP2-F4", "F4-C4", "C4-P4", "P4-O2",
    "FP2-F8", "F8-T8", "T8-P8", "P8-O2",
    "FZ-CZ", "CZ-PZ",
)


@dataclass
class Recording:
    """Multichannel EEG recording in physical units (microvolts).

    ``channels`` is an ordered list of ``(label, samples)`` pairs; all
    channels must hold the same number of samples and
    ``duration_s * sample_rate`` must equal that count.
    """

    patient_id: str
    file_id: str
    sample_rate: int
    channels: list[tuple[str, np.ndarray]]
    duration_s: float

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if not self.channels:
            raise ValueError("recording has no channels")
        counts = {len(samples) for _, samples in self.channels}
        if len(counts) != 1:
            raise ValueError(f"channels have differing sample counts: {sorted(counts)}")
        n = counts.pop()
        expected = self.duration_s * self.sample_rate
        if abs(expected - n) > 1e-6:
            raise ValueError(
                f"duration_s * sample_rate = {expected} does not match "
                f"sample count {n}"
            )

    @property
    def n_samples(self) -> int:
        return len(self.channels[0][1])

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.channels]

    def as_matrix(self) -> np.ndarray:
        """Samples as a ``(n_samples, n_channels)`` float array."""
        return np.column_stack([samples for _, samples in self.channels])


@dataclass(frozen=True)
class SeizureAnnotation:
    """One seizure interval ``[start_s, end_s]`` within a recording."""

    start_s: float
    end_s: float
    file_id: str = ""

    def __post_init__(self):
        if self.start_s < 0:
            raise AnnotationError(f"seizure start {self.start_s} is negative")
        if self.end_s <= self.start_s:
            raise AnnotationError(
                f"seizure interval [{self.start_s}, {self.end_s}] has nonpositive length"
            )

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class MontageSpec:
    """Ordered list of exactly 18 bipolar channel labels."""

    pairs: tuple[str, ...] = DEFAULT_MONTAGE_PAIRS

    def __post_init__(self):
        if len(self.pairs) != 18:
            raise MontageError(f"montage must list exactly 18 pairs, got {len(self.pairs)}")
        if len({_canon_label(p) for p in self.pairs}) != len(self.pairs):
            raise MontageError("montage pairs must be unique")


def _canon_label(label: str) -> str:
    return label.strip().upper()


def apply_montage(recording: Recording, spec: MontageSpec | None = None) -> Recording:
    """Select (or derive) the montage channels from ``recording``.

    Labels are matched case-insensitively with surrounding whitespace ignored.
    A pair absent from the source is derived as ``left - right`` when both
    referential channels named by the hyphen-split parts exist. Duplicate
    source labels are tolerated only when samplewise identical (first
    occurrence wins, with a warning).
    """
    if spec is None:
        spec = MontageSpec()
    by_label: dict[str, np.ndarray] = {}
    for label, samples in recording.channels:
        key = _canon_label(label)
        if key in by_label:
            if np.array_equal(by_label[key], samples):
                logger.warning(
                    "duplicate channel %r in %s: identical samples, keeping first",
                    label, recording.file_id,
                )
            else:
                raise MontageError(
                    f"duplicate channel label {label!r} with differing samples"
                )
        else:
            by_label[key] = np.asarray(samples, dtype=np.float64)

    out: list[tuple[str, np.ndarray]] = []
    for pair in spec.pairs:
        key = _canon_label(pair)
        if key in by_label:
            out.append((pair, by_label[key].copy()))
            continue
        left, sep, right = key.partition("-")
        if sep and left in by_label and right in by_label:
            out.append((pair, by_label[left] - by_label[right]))
            continue
        raise MontageError(f"channel {pair!r} not present and not derivable")

    return Recording(
        patient_id=recording.patient_id,
        file_id=recording.file_id,
        sample_rate=recording.sample_rate,
        channels=out,
        duration_s=recording.duration_s,
    )
