"""Portable binary weight files.

Byte layout (all integers little-endian uint32):

====================  =========================================================
magic                 4 bytes, ``NNWF``
version               uint32, currently 1
descriptor length     uint32
descriptor            UTF-8 JSON architecture (see ``CnnArchitecture.to_json``)
tensor count          uint32
tensors               per tensor: ndim uint32, dims uint32 * ndim, then
                      row-major little-endian float32 data
checksum              uint32, CRC-32 of every preceding byte
====================  =========================================================

Tensors appear as weight-then-bias for each conv/dense layer in network
order. The same layout is produced by any compliant trainer, so files are
interchangeable across implementations.
"""

from __future__ import annotations

import json
import struct
import zlib
from pathlib import Path

import numpy as np

from .arch import CnnArchitecture
from .blocks_io import atomic_write_bytes
from .cnn import Weights
from .errors import ChecksumError, WeightFormatError

MAGIC = b"NNWF"
VERSION = 1


def save_weights(path: str | Path, arch: CnnArchitecture, weights: Weights) -> None:
    arch.validate()
    expected = arch.parameterized_layers()
    if len(weights) != len(expected):
        raise WeightFormatError(
            f"got {len(weights)} weight pairs for {len(expected)} parameterized layers"
        )
    payload = bytearray()
    payload += MAGIC
    payload += struct.pack("<I", VERSION)
    descriptor = json.dumps(arch.to_json(), sort_keys=True, separators=(",", ":")).encode("utf-8")
    payload += struct.pack("<I", len(descriptor))
    payload += descriptor

    tensors: list[np.ndarray] = []
    for (idx, layer, w_shape, b_shape), (w, b) in zip(expected, weights):
        w = np.asarray(w)
        b = np.asarray(b)
        if tuple(w.shape) != tuple(w_shape):
            raise WeightFormatError(
                f"layer {idx} ({layer.kind}): weight shape {tuple(w.shape)} != {tuple(w_shape)}"
            )
        if tuple(b.shape) != tuple(b_shape):
            raise WeightFormatError(
                f"layer {idx} ({layer.kind}): bias shape {tuple(b.shape)} != {tuple(b_shape)}"
            )
        tensors.extend([w, b])

    payload += struct.pack("<I", len(tensors))
    for tensor in tensors:
        data = np.ascontiguousarray(tensor, dtype="<f4")
        payload += struct.pack("<I", data.ndim)
        payload += struct.pack(f"<{data.ndim}I", *data.shape)
        payload += data.tobytes()
    payload += struct.pack("<I", zlib.crc32(bytes(payload)))
    atomic_write_bytes(path, bytes(payload))


def load_weights(path: str | Path) -> tuple[CnnArchitecture, Weights]:
    """Read and validate a weight file; shapes are checked against the descriptor."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 16:
        raise WeightFormatError("file too short to be a weight file")
    (stored_crc,) = struct.unpack_from("<I", data, len(data) - 4)
    if zlib.crc32(data[:-4]) != stored_crc:
        raise ChecksumError("weight file checksum mismatch")
    if data[:4] != MAGIC:
        raise WeightFormatError("bad magic; not a weight file")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != VERSION:
        raise WeightFormatError(f"unsupported weight file version {version}")
    (desc_len,) = struct.unpack_from("<I", data, 8)
    offset = 12
    if offset + desc_len > len(data) - 4:
        raise WeightFormatError("descriptor extends past end of file")
    try:
        descriptor = json.loads(data[offset:offset + desc_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise WeightFormatError(f"bad architecture descriptor: {exc}") from exc
    offset += desc_len
    arch = CnnArchitecture.from_json(descriptor)
    arch.validate()

    expected = arch.parameterized_layers()
    (tensor_count,) = struct.unpack_from("<I", data, offset)
    offset += 4
    if tensor_count != 2 * len(expected):
        raise WeightFormatError(
            f"file holds {tensor_count} tensors, architecture needs {2 * len(expected)}"
        )

    def read_tensor(expected_shape: tuple, what: str) -> np.ndarray:
        nonlocal offset
        if offset + 4 > len(data) - 4:
            raise WeightFormatError(f"truncated tensor header for {what}")
        (ndim,) = struct.unpack_from("<I", data, offset)
        offset += 4
        if ndim > 8:
            raise WeightFormatError(f"implausible tensor rank {ndim} for {what}")
        if offset + 4 * ndim > len(data) - 4:
            raise WeightFormatError(f"truncated tensor dims for {what}")
        shape = struct.unpack_from(f"<{ndim}I", data, offset)
        offset += 4 * ndim
        if tuple(shape) != tuple(expected_shape):
            raise WeightFormatError(f"{what}: stored shape {tuple(shape)} != {tuple(expected_shape)}")
        count = 1
        for d in shape:
            count *= d
        if offset + 4 * count > len(data) - 4:
            raise WeightFormatError(f"truncated tensor data for {what}")
        tensor = np.frombuffer(data, dtype="<f4", count=count, offset=offset).reshape(shape).copy()
        offset += 4 * count
        return tensor

    weights: Weights = []
    for idx, layer, w_shape, b_shape in expected:
        w = read_tensor(w_shape, f"layer {idx} ({layer.kind}) weight")
        b = read_tensor(b_shape, f"layer {idx} ({layer.kind}) bias")
        weights.append((w, b))
    if offset != len(data) - 4:
        raise WeightFormatError(f"{len(data) - 4 - offset} unexpected trailing bytes")
    return arch, weights
