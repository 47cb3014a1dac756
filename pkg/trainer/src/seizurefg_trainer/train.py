"""Training loop for the block classifier.

Defaults follow the target recipe: Adam at learning rate 0.001, batch size
128, 10 epochs, binary cross-entropy on the logits. Class imbalance (about
six non-seizure blocks per seizure block after trimming) can be countered
with inverse-frequency loss weighting, off by default.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from .model import BlockClassifier

logger = logging.getLogger(__name__)

#: A compact default; any descriptor in the engine's schema works.
DEFAULT_ARCH = {
    "input_shape": [1024, 18],
    "layers": [
        {"kind": "conv1d", "out_channels": 8, "kernel_size": 65, "stride": 1,
         "activation": "relu"},
        {"kind": "max_pool", "width": 8},
        {"kind": "conv1d", "out_channels": 8, "kernel_size": 9, "stride": 1,
         "activation": "relu"},
        {"kind": "global_pool", "pool": "avg"},
        {"kind": "dense", "out_units": 1, "activation": "sigmoid"},
    ],
}


@dataclass
class TrainConfig:
    arch: dict = field(default_factory=lambda: dict(DEFAULT_ARCH))
    learning_rate: float = 0.001
    batch_size: int = 128
    epochs: int = 10
    seed: int = 0
    class_weighting: bool = False


def train(config: TrainConfig, blocks: np.ndarray, labels: np.ndarray) -> tuple[BlockClassifier, dict]:
    """Fit the classifier; returns the model and a per-epoch loss log."""
    if len(blocks) == 0:
        raise ValueError("training set is empty")
    if len(blocks) != len(labels):
        raise ValueError(f"{len(blocks)} blocks but {len(labels)} labels")
    labels = np.asarray(labels)
    if not np.isin(labels, (0, 1)).all():
        raise ValueError("labels must be binary")

    torch.manual_seed(config.seed)
    model = BlockClassifier(config.arch)
    x = torch.from_numpy(np.ascontiguousarray(blocks, dtype=np.float32))
    y = torch.from_numpy(labels.astype(np.float32))

    n_pos = float(labels.sum())
    n_neg = float(len(labels) - labels.sum())
    if config.class_weighting and n_pos > 0 and n_neg > 0:
        pos_weight = torch.tensor(n_neg / n_pos)
    else:
        pos_weight = None

    two_class = model.head_units == 2
    if two_class:
        weight = None
        if pos_weight is not None:
            weight = torch.tensor([1.0, float(pos_weight)])
        criterion = nn.CrossEntropyLoss(weight=weight)
        targets = y.long()
    else:
        criterion = nn.BCEWithLogitsLoss(pos_weight=pos_weight)
        targets = y

    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    generator = torch.Generator().manual_seed(config.seed)
    history: list[float] = []
    model.train()
    for epoch in range(config.epochs):
        order = torch.randperm(len(x), generator=generator)
        total = 0.0
        for lo in range(0, len(x), config.batch_size):
            idx = order[lo:lo + config.batch_size]
            optimizer.zero_grad()
            logits = model(x[idx])
            if two_class:
                loss = criterion(logits, targets[idx])
            else:
                loss = criterion(logits[:, 0], targets[idx])
            loss.backward()
            optimizer.step()
            total += loss.item() * len(idx)
        epoch_loss = total / len(x)
        history.append(epoch_loss)
        logger.info("epoch %d/%d: loss %.6f", epoch + 1, config.epochs, epoch_loss)

    log = {
        "epochs": config.epochs,
        "learning_rate": config.learning_rate,
        "batch_size": config.batch_size,
        "seed": config.seed,
        "class_weighting": config.class_weighting,
        "n_blocks": int(len(x)),
        "n_positive": int(n_pos),
        "loss": history,
    }
    return model, log
