"""Readers and writers for the engine's interchange files.

These are independent implementations of the documented formats (block
tensor, manifest CSV, fold plan JSON, weight binary, probability CSV); the
trainer deliberately shares no code with the inference engine so the files
themselves are the only contract.
"""

from __future__ import annotations

import csv
import json
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

TENSOR_MAGIC = b"EEGBLK1\x00"
TENSOR_VERSION = 1
WEIGHT_MAGIC = b"NNWF"
WEIGHT_VERSION = 1


@dataclass(frozen=True)
class ManifestRow:
    patient_id: str
    file_id: str
    start_s: float
    label: int


def read_block_tensor(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    head = len(TENSOR_MAGIC) + 16
    if data[:len(TENSOR_MAGIC)] != TENSOR_MAGIC:
        raise ValueError("not a block tensor file")
    version, n, t, c = struct.unpack_from("<IIII", data, len(TENSOR_MAGIC))
    if version != TENSOR_VERSION:
        raise ValueError(f"unsupported tensor version {version}")
    if len(data) - head != n * t * c * 4:
        raise ValueError("tensor payload size mismatch")
    return np.frombuffer(data, dtype="<f4", offset=head).reshape(n, t, c).copy()


def read_manifest(path: str | Path) -> list[ManifestRow]:
    rows = []
    with open(path, newline="") as fh:
        for record in csv.DictReader(fh):
            rows.append(ManifestRow(
                patient_id=record["patient_id"],
                file_id=record["file_id"],
                start_s=float(record["start_s"]),
                label=int(record["label"]),
            ))
    return rows


def read_fold_plan(path: str | Path) -> list[dict]:
    with open(path) as fh:
        plan = json.load(fh)
    return plan["folds"]


def _format_time(t: float) -> str:
    text = f"{float(t):.6f}".rstrip("0").rstrip(".")
    return text if text else "0"


def write_probabilities_csv(path: str | Path, rows: list[ManifestRow], values: np.ndarray) -> None:
    if len(rows) != len(values):
        raise ValueError(f"{len(values)} probabilities for {len(rows)} rows")
    lines = ["patient_id,file_id,start_s,probability"]
    for row, value in zip(rows, values):
        lines.append(
            f"{row.patient_id},{row.file_id},{_format_time(row.start_s)},{float(value)!r}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_weight_file(path: str | Path, arch: dict, tensors: list[np.ndarray]) -> None:
    """Emit the engine's weight format: magic, version, JSON descriptor,
    (rank, dims, float32 data) per tensor, trailing CRC-32."""
    payload = bytearray()
    payload += WEIGHT_MAGIC
    payload += struct.pack("<I", WEIGHT_VERSION)
    descriptor = json.dumps(arch, sort_keys=True, separators=(",", ":")).encode("utf-8")
    payload += struct.pack("<I", len(descriptor))
    payload += descriptor
    payload += struct.pack("<I", len(tensors))
    for tensor in tensors:
        data = np.ascontiguousarray(tensor, dtype="<f4")
        payload += struct.pack("<I", data.ndim)
        payload += struct.pack(f"<{data.ndim}I", *data.shape)
        payload += data.tobytes()
    payload += struct.pack("<I", zlib.crc32(bytes(payload)))
    Path(path).write_bytes(bytes(payload))


def write_training_log(path: str | Path, log: dict) -> None:
    Path(path).write_text(json.dumps(log, indent=2) + "\n")
