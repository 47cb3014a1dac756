"""Per-block seizure probabilities and their CSV interchange.

The CSV schema is ``patient_id,file_id,start_s,probability``; rows are keyed
by ``(file_id, start_s)`` rather than position so misalignment against a
block manifest is always detectable.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .blocks_io import ManifestRow, atomic_write_text, canon_time, format_time
from .errors import AlignmentError
from .preprocess import BlockSequence

#: Evidence clamp bound; keeps exact-zero messages out of the chain.
EPSILON = 1e-12

PROBABILITY_FIELDS = ("patient_id", "file_id", "start_s", "probability")


@dataclass
class ProbabilitySeries:
    """Seizure probability per block, aligned with its manifest rows."""

    values: np.ndarray
    rows: list[ManifestRow]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1:
            raise ValueError("probability values must be 1-D")
        if len(self.values) != len(self.rows):
            raise ValueError(
                f"{len(self.values)} probabilities for {len(self.rows)} manifest rows"
            )
        if self.values.size and (self.values.min() < 0.0 or self.values.max() > 1.0):
            raise ValueError("probabilities must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.values)


def evidence_from_probability(q: float) -> tuple[float, float]:
    """Evidence pair ``(P(y|s=0), P(y|s=1))`` for one block.

    The classifier output is used directly as the state-conditional pair
    ``(1 - q, q)``; converting through Bayes' rule would divide by an
    estimated state marginal and is deliberately avoided. Components are
    clamped to ``[EPSILON, 1 - EPSILON]``.
    """
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"probability {q} outside [0, 1]")
    p0 = min(max(1.0 - q, EPSILON), 1.0 - EPSILON)
    p1 = min(max(q, EPSILON), 1.0 - EPSILON)
    return (p0, p1)


def evidence_series(values: np.ndarray) -> np.ndarray:
    """Vectorized :func:`evidence_from_probability`: ``(N, 2)`` clamped pairs."""
    q = np.asarray(values, dtype=np.float64)
    pairs = np.stack([1.0 - q, q], axis=-1)
    return np.clip(pairs, EPSILON, 1.0 - EPSILON)


def save_probabilities(path: str | Path, series: ProbabilitySeries) -> None:
    lines = [",".join(PROBABILITY_FIELDS)]
    for row, value in zip(series.rows, series.values):
        lines.append(
            f"{row.patient_id},{row.file_id},{format_time(row.start_s)},{float(value)!r}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_probabilities(path: str | Path, manifest: list[ManifestRow]) -> ProbabilitySeries:
    """Load a probability CSV and align it to ``manifest`` order.

    Errors: out-of-range value (with row number), duplicate block, a manifest
    block missing from the file, or a file row naming an unknown block.
    """
    by_key: dict[tuple[str, float], float] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing_cols = set(PROBABILITY_FIELDS) - set(reader.fieldnames or ())
        if missing_cols:
            raise AlignmentError(f"probability file is missing columns: {sorted(missing_cols)}")
        for line_no, record in enumerate(reader, start=2):
            try:
                value = float(record["probability"])
                key = (record["file_id"], canon_time(float(record["start_s"])))
            except (TypeError, ValueError) as exc:
                raise AlignmentError(f"row {line_no}: unparseable fields ({exc})") from exc
            if not 0.0 <= value <= 1.0:
                raise AlignmentError(
                    f"row {line_no}: probability {value} outside [0, 1]"
                )
            if key in by_key:
                raise AlignmentError(f"row {line_no}: duplicate block {key}")
            by_key[key] = value

    values = np.empty(len(manifest), dtype=np.float64)
    seen = set()
    for i, row in enumerate(manifest):
        if row.key not in by_key:
            raise AlignmentError(
                f"manifest block {row.key} missing from probability file"
            )
        values[i] = by_key[row.key]
        seen.add(row.key)
    extras = set(by_key) - seen
    if extras:
        raise AlignmentError(
            f"probability file has {len(extras)} rows not present in the manifest, "
            f"e.g. {sorted(extras)[0]}"
        )
    return ProbabilitySeries(values=values, rows=list(manifest))


def series_from_blocks(values: np.ndarray, sequence: BlockSequence) -> ProbabilitySeries:
    rows = [
        ManifestRow(sequence.patient_id, sequence.file_id, block.start_s, block.label)
        for block in sequence.blocks
    ]
    return ProbabilitySeries(values=np.asarray(values, dtype=np.float64), rows=rows)
