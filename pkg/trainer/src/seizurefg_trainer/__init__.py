"""Trainer for the seizure block classifier.

Consumes the engine's block tensors and manifests, fits the 1D CNN, and
exports weights and per-block probabilities in the engine's file formats.
"""

__version__ = "0.1.0"

from .export import export_probabilities, export_weights, predict_probabilities
from .formats import (
    ManifestRow,
    read_block_tensor,
    read_fold_plan,
    read_manifest,
    write_probabilities_csv,
    write_training_log,
    write_weight_file,
)
from .model import BlockClassifier
from .train import DEFAULT_ARCH, TrainConfig, train
