"""On-disk interchange for segmented blocks.

Two artifacts travel together:

* a manifest CSV (``patient_id,file_id,start_s,label``), one row per block,
  in tensor order;
* a block tensor file: 8-byte magic ``EEGBLK1\\0``, then three little-endian
  uint32 fields (version, block count, samples, channels), then the blocks
  as row-major float32.
"""

from __future__ import annotations

import csv
import os
import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import TensorFormatError
from .preprocess import BLOCK_CHANNELS, BLOCK_SAMPLES

TENSOR_MAGIC = b"EEGBLK1\x00"
TENSOR_VERSION = 1


def canon_time(t: float) -> float:
    """Canonical block-start key used wherever (file_id, start_s) pairs align."""
    return round(float(t), 6)


def format_time(t: float) -> str:
    text = f"{float(t):.6f}".rstrip("0").rstrip(".")
    return text if text else "0"


@dataclass(frozen=True)
class ManifestRow:
    patient_id: str
    file_id: str
    start_s: float
    label: int

    @property
    def key(self) -> tuple[str, float]:
        return (self.file_id, canon_time(self.start_s))


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: str | Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def write_block_tensor(path: str | Path, blocks: np.ndarray) -> None:
    blocks = np.asarray(blocks, dtype="<f4")
    if blocks.ndim != 3:
        raise TensorFormatError(f"block tensor must be 3-D, got shape {blocks.shape}")
    n, t, c = blocks.shape
    header = TENSOR_MAGIC + struct.pack("<IIII", TENSOR_VERSION, n, t, c)
    atomic_write_bytes(path, header + np.ascontiguousarray(blocks).tobytes())


def read_block_tensor(path: str | Path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    head_len = len(TENSOR_MAGIC) + 16
    if len(data) < head_len:
        raise TensorFormatError("file too short for a block tensor header")
    if data[:len(TENSOR_MAGIC)] != TENSOR_MAGIC:
        raise TensorFormatError("bad magic; not a block tensor file")
    version, n, t, c = struct.unpack_from("<IIII", data, len(TENSOR_MAGIC))
    if version != TENSOR_VERSION:
        raise TensorFormatError(f"unsupported tensor version {version}")
    expected = n * t * c * 4
    if len(data) - head_len != expected:
        raise TensorFormatError(
            f"tensor payload is {len(data) - head_len} bytes, expected {expected}"
        )
    return np.frombuffer(data, dtype="<f4", offset=head_len).reshape(n, t, c).copy()


def expected_block_shape() -> tuple[int, int]:
    return (BLOCK_SAMPLES, BLOCK_CHANNELS)


MANIFEST_FIELDS = ("patient_id", "file_id", "start_s", "label")


def write_manifest(path: str | Path, rows: list[ManifestRow]) -> None:
    lines = [",".join(MANIFEST_FIELDS)]
    for row in rows:
        lines.append(
            f"{row.patient_id},{row.file_id},{format_time(row.start_s)},{row.label}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_manifest(path: str | Path) -> list[ManifestRow]:
    rows: list[ManifestRow] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(MANIFEST_FIELDS) - set(reader.fieldnames or ())
        if missing:
            raise TensorFormatError(f"manifest is missing columns: {sorted(missing)}")
        for record in reader:
            rows.append(
                ManifestRow(
                    patient_id=record["patient_id"],
                    file_id=record["file_id"],
                    start_s=float(record["start_s"]),
                    label=int(record["label"]),
                )
            )
    return rows
