#!/usr/bin/env python3
"""The block classifier: shipped architecture, its cost, and the weight file.

Walks the default 1D-CNN layer by layer, prints the shape and FLOP ledger,
compares against the published complexity figures, and round-trips random
weights through the portable file format.
"""

import tempfile
from pathlib import Path

import numpy as np

from seizurefg import (
    DEFAULT_ARCHITECTURE,
    LITERATURE_MFLOPS,
    cnn_flop_count,
    forward,
    load_weights,
    mflops,
    random_weights,
    save_weights,
)


def main():
    arch = DEFAULT_ARCHITECTURE
    arch.validate()
    print(f"input shape: {arch.input_shape} (4 s x 18 channels at 256 Hz)")
    print(f"conv-stack receptive field: {arch.conv_stack_receptive_field()} samples "
          f"({arch.conv_stack_receptive_field() / 256:.2f} s)")
    print(f"parameters: {arch.parameter_count():,}\n")

    print("layer                                    output shape")
    for layer, shape in zip(arch.layers, arch.output_shapes()):
        print(f"{str(layer):<40} {shape}")

    total = cnn_flop_count(arch)
    print(f"\nforward cost: {total:,} FLOPs = {mflops(total):.2f} MFLOPs per block")
    print("published figures for comparison (MFLOPs):")
    for name, value in LITERATURE_MFLOPS.items():
        print(f"  {name:<22} {value:g}")

    weights = random_weights(arch, seed=1, scale=0.01)
    rng = np.random.default_rng(0)
    block = rng.normal(0.0, 30.0, size=(1024, 18)).astype(np.float32)
    q = forward(block, arch, weights)
    print(f"\nrandom-weight forward pass on a random block: q = {q:.6f}")

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "weights.bin"
        save_weights(path, arch, weights)
        arch2, weights2 = load_weights(path)
        q2 = forward(block, arch2, weights2)
        print(f"after weight-file round trip ({path.stat().st_size:,} bytes): "
              f"q = {q2:.6f} (bit-identical: {q == q2})")


if __name__ == "__main__":
    main()
