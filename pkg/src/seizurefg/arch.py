"""Declarative 1D-CNN architecture: layer specs, shape chaining, validation.

Convolutions run along the time axis and mix all input channels per tap
(valid mode, no padding). Dense layers consume the flattened (time-major)
feature vector; a global pooling layer collapses time first. The head must
be either ``dense(1, sigmoid)`` or ``dense(2, softmax)``; with a softmax
head, unit 1 is the seizure class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import ArchitectureError

INPUT_SHAPE = (1024, 18)
MIN_RECEPTIVE_FIELD = 256  # about one second at 256 Hz

ACTIVATIONS = ("linear", "relu", "sigmoid", "softmax", "tanh")


@dataclass(frozen=True)
class Conv1d:
    out_channels: int
    kernel_size: int
    stride: int = 1
    activation: str = "relu"

    kind = "conv1d"


@dataclass(frozen=True)
class MaxPool:
    width: int

    kind = "max_pool"


@dataclass(frozen=True)
class GlobalPool:
    pool: str = "avg"  # "avg" or "max"

    kind = "global_pool"


@dataclass(frozen=True)
class Dense:
    out_units: int
    activation: str = "linear"

    kind = "dense"


@dataclass(frozen=True)
class Dropout:
    rate: float  # inference no-op; kept so trained descriptors round-trip

    kind = "dropout"


Layer = Union[Conv1d, MaxPool, GlobalPool, Dense, Dropout]

#: Shapes flowing between layers: ("seq", length, channels) or ("vec", units).
Shape = tuple


@dataclass(frozen=True)
class CnnArchitecture:
    layers: tuple[Layer, ...]
    input_shape: tuple[int, int] = INPUT_SHAPE

    def validate(self) -> None:
        self.output_shapes()
        if not self.layers:
            raise ArchitectureError("architecture has no layers")
        head = self.layers[-1]
        ok = isinstance(head, Dense) and (
            (head.out_units == 1 and head.activation == "sigmoid")
            or (head.out_units == 2 and head.activation == "softmax")
        )
        if not ok:
            raise ArchitectureError(
                "final layer must be dense(1, sigmoid) or dense(2, softmax)"
            )
        rf = self.receptive_field()
        required = min(MIN_RECEPTIVE_FIELD, self.input_shape[0])
        if rf < required:
            raise ArchitectureError(
                f"receptive field {rf} samples is below the required {required}"
            )

    def output_shapes(self) -> list[Shape]:
        """Shape after each layer, raising on any incompatibility."""
        length, channels = self.input_shape
        state: Shape = ("seq", int(length), int(channels))
        shapes: list[Shape] = []
        for idx, layer in enumerate(self.layers):
            state = _apply_shape(state, layer, idx)
            shapes.append(state)
        return shapes

    def receptive_field(self) -> int:
        """Input samples seen by one output of the conv/pool stack.

        Any global pooling or dense layer mixes the whole time axis, so the
        effective field becomes the full input length.
        """
        for layer in self.layers:
            if isinstance(layer, (GlobalPool, Dense)):
                return self.input_shape[0]
        return self.conv_stack_receptive_field()

    def conv_stack_receptive_field(self) -> int:
        """Receptive field of the conv/pool stack alone (no global mixing)."""
        rf, jump = 1, 1
        for layer in self.layers:
            if isinstance(layer, Conv1d):
                rf += (layer.kernel_size - 1) * jump
                jump *= layer.stride
            elif isinstance(layer, MaxPool):
                rf += (layer.width - 1) * jump
                jump *= layer.width
            elif isinstance(layer, (GlobalPool, Dense)):
                break
        return min(rf, self.input_shape[0])

    def parameterized_layers(self) -> list[tuple[int, Layer, tuple, tuple]]:
        """(index, layer, weight shape, bias shape) for conv and dense layers.

        Conv weights are (out_channels, kernel, in_channels); dense weights
        are (out_units, in_features). Biases are 1-D.
        """
        length, channels = self.input_shape
        state: Shape = ("seq", int(length), int(channels))
        out = []
        for idx, layer in enumerate(self.layers):
            if isinstance(layer, Conv1d):
                out.append((idx, layer,
                            (layer.out_channels, layer.kernel_size, state[2]),
                            (layer.out_channels,)))
            elif isinstance(layer, Dense):
                n_in = state[1] if state[0] == "vec" else state[1] * state[2]
                out.append((idx, layer, (layer.out_units, n_in), (layer.out_units,)))
            state = _apply_shape(state, layer, idx)
        return out

    def parameter_count(self) -> int:
        total = 0
        for _, _, w_shape, b_shape in self.parameterized_layers():
            w = 1
            for d in w_shape:
                w *= d
            total += w + b_shape[0]
        return total

    def to_json(self) -> dict:
        layers = []
        for layer in self.layers:
            if isinstance(layer, Conv1d):
                layers.append({"kind": "conv1d", "out_channels": layer.out_channels,
                               "kernel_size": layer.kernel_size, "stride": layer.stride,
                               "activation": layer.activation})
            elif isinstance(layer, MaxPool):
                layers.append({"kind": "max_pool", "width": layer.width})
            elif isinstance(layer, GlobalPool):
                layers.append({"kind": "global_pool", "pool": layer.pool})
            elif isinstance(layer, Dense):
                layers.append({"kind": "dense", "out_units": layer.out_units,
                               "activation": layer.activation})
            elif isinstance(layer, Dropout):
                layers.append({"kind": "dropout", "rate": layer.rate})
        return {"input_shape": list(self.input_shape), "layers": layers}

    @classmethod
    def from_json(cls, spec: dict) -> "CnnArchitecture":
        try:
            input_shape = tuple(int(v) for v in spec["input_shape"])
            raw_layers = spec["layers"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ArchitectureError(f"bad architecture descriptor: {exc}") from exc
        layers: list[Layer] = []
        for entry in raw_layers:
            kind = entry.get("kind")
            if kind == "conv1d":
                layers.append(Conv1d(int(entry["out_channels"]), int(entry["kernel_size"]),
                                     int(entry.get("stride", 1)),
                                     str(entry.get("activation", "relu"))))
            elif kind == "max_pool":
                layers.append(MaxPool(int(entry["width"])))
            elif kind == "global_pool":
                layers.append(GlobalPool(str(entry.get("pool", "avg"))))
            elif kind == "dense":
                layers.append(Dense(int(entry["out_units"]),
                                    str(entry.get("activation", "linear"))))
            elif kind == "dropout":
                layers.append(Dropout(float(entry["rate"])))
            else:
                raise ArchitectureError(f"unknown layer kind {kind!r}")
        return cls(layers=tuple(layers), input_shape=input_shape)


def _apply_shape(state: Shape, layer: Layer, idx: int) -> Shape:
    if isinstance(layer, Conv1d):
        if state[0] != "seq":
            raise ArchitectureError(f"layer {idx}: conv1d needs a sequence input")
        if layer.kernel_size < 1 or layer.stride < 1 or layer.out_channels < 1:
            raise ArchitectureError(f"layer {idx}: bad conv1d parameters {layer}")
        if layer.activation not in ACTIVATIONS:
            raise ArchitectureError(f"layer {idx}: unknown activation {layer.activation!r}")
        length = (state[1] - layer.kernel_size) // layer.stride + 1
        if layer.kernel_size > state[1] or length < 1:
            raise ArchitectureError(
                f"layer {idx}: kernel {layer.kernel_size} exceeds input length {state[1]}"
            )
        return ("seq", length, layer.out_channels)
    if isinstance(layer, MaxPool):
        if state[0] != "seq":
            raise ArchitectureError(f"layer {idx}: max_pool needs a sequence input")
        if layer.width < 1:
            raise ArchitectureError(f"layer {idx}: pool width must be >= 1")
        length = state[1] // layer.width
        if length < 1:
            raise ArchitectureError(
                f"layer {idx}: pool width {layer.width} exceeds input length {state[1]}"
            )
        return ("seq", length, state[2])
    if isinstance(layer, GlobalPool):
        if state[0] != "seq":
            raise ArchitectureError(f"layer {idx}: global_pool needs a sequence input")
        if layer.pool not in ("avg", "max"):
            raise ArchitectureError(f"layer {idx}: unknown global pool {layer.pool!r}")
        return ("vec", state[2])
    if isinstance(layer, Dense):
        if layer.out_units < 1:
            raise ArchitectureError(f"layer {idx}: dense needs >= 1 unit")
        if layer.activation not in ACTIVATIONS:
            raise ArchitectureError(f"layer {idx}: unknown activation {layer.activation!r}")
        return ("vec", layer.out_units)
    if isinstance(layer, Dropout):
        if not 0.0 <= layer.rate < 1.0:
            raise ArchitectureError(f"layer {idx}: dropout rate must be in [0, 1)")
        return state
    raise ArchitectureError(f"layer {idx}: unsupported layer {layer!r}")


#: Shipped default: large first kernel so the conv stack alone spans over a
#: second of signal before the head mixes globally.
DEFAULT_ARCHITECTURE = CnnArchitecture(
    layers=(
        Conv1d(out_channels=32, kernel_size=129, activation="relu"),
        MaxPool(width=4),
        Conv1d(out_channels=32, kernel_size=15, activation="relu"),
        MaxPool(width=4),
        Conv1d(out_channels=64, kernel_size=7, activation="relu"),
        GlobalPool(pool="avg"),
        Dense(out_units=32, activation="relu"),
        Dense(out_units=1, activation="sigmoid"),
    ),
)
