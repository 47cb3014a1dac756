"""Forward-pass engine against the naive direct-convolution oracle."""

from __future__ import annotations

import numpy as np
import pytest

from seizurefg.arch import (
    Conv1d,
    CnnArchitecture,
    DEFAULT_ARCHITECTURE,
    Dense,
    Dropout,
    GlobalPool,
    MaxPool,
)
from seizurefg.cnn import forward, forward_batch, random_weights
from seizurefg.errors import ArchitectureError, ShapeError

from oracles import naive_forward


def small_arch(head=("sigmoid", 1)) -> CnnArchitecture:
    activation, units = head
    return CnnArchitecture(
        layers=(
            Conv1d(out_channels=3, kernel_size=5, activation="relu"),
            MaxPool(width=4),
            Conv1d(out_channels=4, kernel_size=5, activation="tanh"),
            GlobalPool(pool="avg"),
            Dense(out_units=units, activation=activation),
        ),
        input_shape=(64, 6),
    )


def random_small_arch(rng) -> CnnArchitecture:
    while True:
        layers = []
        channels_options = (2, 3, 4, 8)
        n_conv = int(rng.integers(1, 4))
        for _ in range(n_conv):
            layers.append(Conv1d(
                out_channels=int(rng.choice(channels_options)),
                kernel_size=int(rng.integers(2, 9)),
                stride=int(rng.integers(1, 3)),
                activation=str(rng.choice(["relu", "tanh", "linear"])),
            ))
            if rng.random() < 0.5:
                layers.append(MaxPool(width=int(rng.integers(2, 4))))
        if rng.random() < 0.3:
            layers.append(Dropout(rate=0.5))
        if rng.random() < 0.7:
            layers.append(GlobalPool(pool=str(rng.choice(["avg", "max"]))))
        if rng.random() < 0.5:
            layers.append(Dense(out_units=int(rng.integers(2, 6)), activation="relu"))
        if rng.random() < 0.5:
            layers.append(Dense(out_units=1, activation="sigmoid"))
        else:
            layers.append(Dense(out_units=2, activation="softmax"))
        arch = CnnArchitecture(layers=tuple(layers), input_shape=(64, 5))
        try:
            arch.output_shapes()
        except ArchitectureError:
            continue  # incompatible draw (kernel outgrew the sequence); redraw
        return arch


class TestArchitecture:
    def test_default_validates(self):
        DEFAULT_ARCHITECTURE.validate()
        assert DEFAULT_ARCHITECTURE.conv_stack_receptive_field() >= 256

    def test_default_shapes(self):
        shapes = DEFAULT_ARCHITECTURE.output_shapes()
        assert shapes[0] == ("seq", 896, 32)
        assert shapes[-1] == ("vec", 1)

    def test_conv_length_formula(self, rng):
        for _ in range(30):
            length = int(rng.integers(10, 200))
            kernel = int(rng.integers(1, 10))
            stride = int(rng.integers(1, 4))
            if kernel > length:
                continue
            arch = CnnArchitecture(
                layers=(
                    Conv1d(out_channels=1, kernel_size=kernel, stride=stride),
                    GlobalPool(),
                    Dense(1, "sigmoid"),
                ),
                input_shape=(length, 1),
            )
            got = arch.output_shapes()[0][1]
            assert got == (length - kernel) // stride + 1

    def test_bad_head_rejected(self):
        arch = CnnArchitecture(
            layers=(Conv1d(2, 3), GlobalPool(), Dense(3, "softmax")),
            input_shape=(64, 4),
        )
        with pytest.raises(ArchitectureError):
            arch.validate()

    def test_kernel_larger_than_input_rejected(self):
        arch = CnnArchitecture(
            layers=(Conv1d(2, 100), GlobalPool(), Dense(1, "sigmoid")),
            input_shape=(64, 4),
        )
        with pytest.raises(ArchitectureError):
            arch.output_shapes()

    def test_parameter_count_fixture(self):
        # conv(2, k=3) over 18 channels: 3*18*2 + 2 = 110; dense 2 -> 1: 3
        arch = CnnArchitecture(
            layers=(Conv1d(2, 3), GlobalPool(), Dense(1, "sigmoid")),
            input_shape=(1024, 18),
        )
        assert arch.parameter_count() == 113

    def test_json_round_trip(self):
        restored = CnnArchitecture.from_json(DEFAULT_ARCHITECTURE.to_json())
        assert restored == DEFAULT_ARCHITECTURE

    def test_unknown_layer_kind_rejected(self):
        spec = {"input_shape": [64, 4], "layers": [{"kind": "gru", "units": 8}]}
        with pytest.raises(ArchitectureError, match="gru"):
            CnnArchitecture.from_json(spec)

    def test_receptive_field_with_global_head_covers_input(self):
        arch = small_arch()
        assert arch.receptive_field() == 64
        arch.validate()


class TestForward:
    def test_zero_weights_give_half(self, rng):
        arch = small_arch()
        weights = [(np.zeros(w), np.zeros(b)) for _, _, w, b in arch.parameterized_layers()]
        block = rng.normal(size=(64, 6)).astype(np.float32)
        assert forward(block, arch, weights) == 0.5

    def test_unit_kernel_copies_channel(self, rng):
        # conv kernel e_1 with one output channel reproduces channel 0
        arch = CnnArchitecture(
            layers=(Conv1d(1, 1, activation="linear"), GlobalPool(), Dense(1, "sigmoid")),
            input_shape=(32, 4),
        )
        w = np.zeros((1, 1, 4), dtype=np.float32)
        w[0, 0, 0] = 1.0
        weights = [
            (w, np.zeros(1, dtype=np.float32)),
            (np.ones((1, 1), dtype=np.float32), np.zeros(1, dtype=np.float32)),
        ]
        block = rng.normal(size=(32, 4)).astype(np.float32)
        got = forward(block, arch, weights)
        expected = 1.0 / (1.0 + np.exp(-block[:, 0].mean(dtype=np.float64)))
        assert got == pytest.approx(float(expected), abs=1e-6)

    def test_two_conv_net_matches_oracle(self, rng):
        arch = CnnArchitecture(
            layers=(
                Conv1d(3, 5, activation="relu"),
                Conv1d(2, 5, activation="linear"),
                GlobalPool(pool="avg"),
                Dense(1, "sigmoid"),
            ),
            input_shape=(48, 4),
        )
        weights = random_weights(arch, seed=3, scale=0.5)
        block = rng.normal(size=(48, 4)).astype(np.float32)
        assert forward(block, arch, weights) == pytest.approx(
            naive_forward(block, arch, weights), abs=1e-5
        )

    def test_random_architectures_match_oracle(self):
        rng = np.random.default_rng(99)
        for case in range(20):
            arch = random_small_arch(rng)
            weights = random_weights(arch, seed=case, scale=0.4)
            block = rng.normal(size=(64, 5)).astype(np.float32)
            engine = forward(block, arch, weights)
            oracle = naive_forward(block, arch, weights)
            assert engine == pytest.approx(oracle, abs=1e-5), f"case {case}: {arch}"

    def test_deterministic(self, rng):
        arch = small_arch()
        weights = random_weights(arch, seed=0)
        block = rng.normal(size=(64, 6)).astype(np.float32)
        assert forward(block, arch, weights) == forward(block.copy(), arch, weights)

    def test_output_in_unit_interval_for_wild_weights(self, rng):
        arch = small_arch()
        for seed in range(10):
            weights = random_weights(arch, seed=seed, scale=50.0)
            block = rng.normal(scale=100.0, size=(64, 6)).astype(np.float32)
            q = forward(block, arch, weights)
            assert 0.0 <= q <= 1.0

    def test_softmax_head_selects_seizure_unit(self, rng):
        arch = small_arch(head=("softmax", 2))
        weights = random_weights(arch, seed=5)
        block = rng.normal(size=(64, 6)).astype(np.float32)
        q = forward(block, arch, weights)
        assert 0.0 <= q <= 1.0
        assert q == pytest.approx(naive_forward(block, arch, weights), abs=1e-5)

    def test_dropout_is_identity(self, rng):
        base = small_arch()
        with_dropout = CnnArchitecture(
            layers=base.layers[:2] + (Dropout(0.5),) + base.layers[2:],
            input_shape=base.input_shape,
        )
        weights = random_weights(base, seed=1)
        block = rng.normal(size=(64, 6)).astype(np.float32)
        assert forward(block, base, weights) == forward(block, with_dropout, weights)

    def test_shape_mismatch_rejected(self, rng):
        arch = small_arch()
        weights = random_weights(arch, seed=0)
        with pytest.raises(ShapeError):
            forward(rng.normal(size=(65, 6)).astype(np.float32), arch, weights)

    def test_batch_agrees_with_single(self, rng):
        arch = small_arch()
        weights = random_weights(arch, seed=2)
        blocks = rng.normal(size=(7, 64, 6)).astype(np.float32)
        batch = forward_batch(blocks, arch, weights)
        singles = [forward(b, arch, weights) for b in blocks]
        np.testing.assert_allclose(batch, singles, atol=1e-7)
