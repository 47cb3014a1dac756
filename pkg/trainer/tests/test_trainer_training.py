"""Training behavior: overfit sanity, determinism, error paths."""

from __future__ import annotations

import numpy as np
import pytest
import torch

from seizurefg_trainer import BlockClassifier, TrainConfig, train
from seizurefg_trainer.train import DEFAULT_ARCH

from trainer_conftest_helpers import separable_blocks


def small_arch() -> dict:
    return {
        "input_shape": [1024, 18],
        "layers": [
            {"kind": "conv1d", "out_channels": 4, "kernel_size": 33, "stride": 4,
             "activation": "relu"},
            {"kind": "max_pool", "width": 4},
            {"kind": "global_pool", "pool": "avg"},
            {"kind": "dense", "out_units": 1, "activation": "sigmoid"},
        ],
    }


class TestTrain:
    def test_empty_training_set_rejected(self):
        config = TrainConfig(arch=small_arch())
        with pytest.raises(ValueError, match="empty"):
            train(config, np.empty((0, 1024, 18), dtype=np.float32), np.empty(0))

    def test_label_length_mismatch_rejected(self):
        config = TrainConfig(arch=small_arch())
        blocks, labels = separable_blocks(8, seed=0)
        with pytest.raises(ValueError):
            train(config, blocks, labels[:4])

    def test_overfit_smoke(self):
        # 64 separable blocks, 50 epochs: training loss collapses
        blocks, labels = separable_blocks(64, seed=3)
        config = TrainConfig(arch=small_arch(), epochs=50, seed=1)
        model, log = train(config, blocks, labels)
        assert log["loss"][-1] < 0.05, f"final loss {log['loss'][-1]}"
        assert len(log["loss"]) == 50

    def test_deterministic_under_fixed_seed(self):
        blocks, labels = separable_blocks(32, seed=5)
        probe, _ = separable_blocks(16, seed=6)
        outputs = []
        for _ in range(2):
            config = TrainConfig(arch=small_arch(), epochs=3, seed=7)
            model, _ = train(config, blocks, labels)
            outputs.append(model.predict_proba(torch.from_numpy(probe)).numpy())
        np.testing.assert_allclose(outputs[0], outputs[1], atol=1e-6)

    def test_class_weighting_runs(self):
        blocks, labels = separable_blocks(32, seed=8)
        config = TrainConfig(arch=small_arch(), epochs=2, seed=0, class_weighting=True)
        _, log = train(config, blocks, labels)
        assert log["class_weighting"] is True

    def test_softmax_head_trains(self):
        arch = small_arch()
        arch["layers"][-1] = {"kind": "dense", "out_units": 2, "activation": "softmax"}
        blocks, labels = separable_blocks(32, seed=9)
        config = TrainConfig(arch=arch, epochs=2, seed=0)
        model, log = train(config, blocks, labels)
        probs = model.predict_proba(torch.from_numpy(blocks[:4])).numpy()
        assert np.all((probs >= 0) & (probs <= 1))

    def test_default_arch_builds(self):
        model = BlockClassifier(DEFAULT_ARCH)
        x = torch.zeros((2, 1024, 18))
        assert model.predict_proba(x).shape == (2,)
