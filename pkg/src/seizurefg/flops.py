"""FLOP accounting for the network forward pass.

Multiplications and additions count separately (one FLOP each). Per layer:

* conv1d: ``2 * kernel * C_in * C_out * L_out`` plus one FLOP per output
  element for a non-linear activation;
* dense: ``2 * n_in * n_out`` plus activation;
* max pooling: ``width`` comparison FLOPs per output element;
* global pooling: one FLOP per input element;
* dropout: free at inference.
"""

from __future__ import annotations

from .arch import Conv1d, CnnArchitecture, Dense, Dropout, GlobalPool, MaxPool
from .errors import ArchitectureError

#: Published complexity figures (MegaFLOPs) for the comparison models; these
#: are cited constants, not recomputed here.
LITERATURE_MFLOPS = {
    "2d-cnn-raw-blocks": 14.5,
    "2d-cnn-plot-images": 200.0,
    "reference-1d-cnn": 9.81,
    "reference-1d-cnn-fg": 9.81,
    "1d-cnn-gru": 29.4,
}


def cnn_flop_count(arch: CnnArchitecture) -> int:
    """Inference FLOPs for one block through ``arch``."""
    shapes = arch.output_shapes()  # raises on incompatible architectures
    length, channels = arch.input_shape
    state = ("seq", length, channels)
    total = 0
    for layer, out_shape in zip(arch.layers, shapes):
        if isinstance(layer, Conv1d):
            _, l_out, c_out = out_shape
            total += 2 * layer.kernel_size * state[2] * c_out * l_out
            if layer.activation != "linear":
                total += l_out * c_out
        elif isinstance(layer, MaxPool):
            _, l_out, c = out_shape
            total += l_out * c * layer.width
        elif isinstance(layer, GlobalPool):
            total += state[1] * state[2]
        elif isinstance(layer, Dense):
            n_in = state[1] if state[0] == "vec" else state[1] * state[2]
            total += 2 * n_in * layer.out_units
            if layer.activation != "linear":
                total += layer.out_units
        elif isinstance(layer, Dropout):
            pass
        else:
            raise ArchitectureError(f"unsupported layer {layer!r}")
        state = out_shape
    return total


def mflops(flop_count: float) -> float:
    return flop_count / 1e6
