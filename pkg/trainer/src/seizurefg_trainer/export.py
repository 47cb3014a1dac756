"""Export trained models into the engine's interchange files."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch

from .formats import ManifestRow, write_probabilities_csv, write_weight_file
from .model import BlockClassifier

EXPORT_BATCH = 64


def export_weights(model: BlockClassifier, path: str | Path) -> None:
    write_weight_file(path, model.arch, model.export_tensors())


def predict_probabilities(model: BlockClassifier, blocks: np.ndarray) -> np.ndarray:
    """Per-block seizure probabilities, batched, in manifest order."""
    model.eval()
    out = np.empty(len(blocks), dtype=np.float64)
    for lo in range(0, len(blocks), EXPORT_BATCH):
        chunk = torch.from_numpy(
            np.ascontiguousarray(blocks[lo:lo + EXPORT_BATCH], dtype=np.float32)
        )
        out[lo:lo + len(chunk)] = model.predict_proba(chunk).numpy()
    return np.clip(out, 0.0, 1.0)


def export_probabilities(
    model: BlockClassifier,
    rows: list[ManifestRow],
    blocks: np.ndarray,
    path: str | Path,
) -> np.ndarray:
    if len(rows) != len(blocks):
        raise ValueError(f"manifest has {len(rows)} rows but tensor holds {len(blocks)}")
    values = predict_probabilities(model, blocks)
    write_probabilities_csv(path, rows, values)
    return values
