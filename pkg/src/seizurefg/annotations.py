"""Parser for CHB-MIT style ``*-summary.txt`` seizure annotation files.

Each file block looks like::

    File Name: chb01_03.edf
    Number of Seizures in File: 1
    Seizure Start Time: 2996 seconds
    Seizure End Time: 3036 seconds

Later cases number the seizures ("Seizure 1 Start Time: ..."); both
spellings are accepted. Files declaring zero seizures contribute no
annotations.
"""

from __future__ import annotations

import re
from pathlib import Path

from .errors import AnnotationError
from .recording import SeizureAnnotation

_FILE_RE = re.compile(r"^\s*File Name\s*:\s*(\S+)", re.IGNORECASE)
_COUNT_RE = re.compile(r"^\s*Number of Seizures in File\s*:\s*(\d+)", re.IGNORECASE)
_START_RE = re.compile(
    r"^\s*Seizure(?:\s+\d+)?\s+Start Time\s*:\s*([0-9]+(?:\.[0-9]+)?)\s*sec", re.IGNORECASE
)
_END_RE = re.compile(
    r"^\s*Seizure(?:\s+\d+)?\s+End Time\s*:\s*([0-9]+(?:\.[0-9]+)?)\s*sec", re.IGNORECASE
)


def _close_block(
    file_name: str | None,
    declared: int | None,
    starts: list[float],
    ends: list[float],
    out: list[SeizureAnnotation],
) -> None:
    if file_name is None:
        return
    file_id = file_name[:-4] if file_name.lower().endswith(".edf") else file_name
    if declared is None:
        raise AnnotationError(f"file block {file_name!r} lacks a seizure count line")
    if len(starts) != len(ends):
        raise AnnotationError(
            f"file block {file_name!r} has {len(starts)} start times but {len(ends)} end times"
        )
    if len(starts) != declared:
        raise AnnotationError(
            f"file block {file_name!r} declares {declared} seizures but lists {len(starts)}"
        )
    for start, end in zip(starts, ends):
        if end <= start:
            raise AnnotationError(
                f"file block {file_name!r}: seizure interval [{start}, {end}] "
                "has nonpositive length"
            )
        out.append(SeizureAnnotation(start_s=start, end_s=end, file_id=file_id))


def parse_annotations(path: str | Path) -> list[SeizureAnnotation]:
    """Parse a summary file into one :class:`SeizureAnnotation` per seizure."""
    out: list[SeizureAnnotation] = []
    file_name: str | None = None
    declared: int | None = None
    starts: list[float] = []
    ends: list[float] = []

    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        for line in fh:
            m = _FILE_RE.match(line)
            if m:
                _close_block(file_name, declared, starts, ends, out)
                file_name, declared, starts, ends = m.group(1), None, [], []
                continue
            m = _COUNT_RE.match(line)
            if m:
                declared = int(m.group(1))
                continue
            m = _START_RE.match(line)
            if m:
                starts.append(float(m.group(1)))
                continue
            m = _END_RE.match(line)
            if m:
                ends.append(float(m.group(1)))
    _close_block(file_name, declared, starts, ends, out)
    return out
