"""Torch model built from the engine's JSON architecture descriptor.

Blocks arrive as (batch, time, channels); convolutions run channels-first
internally. Dense layers consume the time-major flattened features (the
tensor is permuted back before flattening) so exported weights index
features in the same order as the inference engine. The head's sigmoid or
softmax is NOT part of the module: ``forward`` returns logits for the loss,
``predict_proba`` applies the head.
"""

from __future__ import annotations

import numpy as np
import torch
from torch import nn


class BlockClassifier(nn.Module):
    def __init__(self, arch: dict):
        super().__init__()
        self.arch = arch
        length, channels = (int(v) for v in arch["input_shape"])
        self.head_units = None
        ops: list[tuple[str, nn.Module | str]] = []
        for entry in arch["layers"]:
            kind = entry["kind"]
            if kind == "conv1d":
                conv = nn.Conv1d(
                    in_channels=channels,
                    out_channels=int(entry["out_channels"]),
                    kernel_size=int(entry["kernel_size"]),
                    stride=int(entry.get("stride", 1)),
                )
                ops.append(("module", conv))
                ops.append(("activation", entry.get("activation", "relu")))
                channels = int(entry["out_channels"])
                length = (length - int(entry["kernel_size"])) // int(entry.get("stride", 1)) + 1
            elif kind == "max_pool":
                ops.append(("module", nn.MaxPool1d(int(entry["width"]))))
                length = length // int(entry["width"])
            elif kind == "global_pool":
                ops.append(("global_pool", entry.get("pool", "avg")))
                length = 0
            elif kind == "dense":
                n_in = channels if length == 0 else length * channels
                ops.append(("dense", nn.Linear(n_in, int(entry["out_units"]))))
                ops.append(("activation", entry.get("activation", "linear")))
                channels = int(entry["out_units"])
                length = 0
                self.head_units = int(entry["out_units"])
            elif kind == "dropout":
                ops.append(("module", nn.Dropout(float(entry["rate"]))))
            else:
                raise ValueError(f"unknown layer kind {kind!r}")
        if not arch["layers"] or arch["layers"][-1]["kind"] != "dense":
            raise ValueError("architecture must end in a dense head")
        if self.head_units not in (1, 2):
            raise ValueError("head must be dense(1, sigmoid) or dense(2, softmax)")
        # strip the head activation: the loss works on logits
        self.ops = ops[:-1]
        self.modules_list = nn.ModuleList(
            module for tag, module in self.ops if isinstance(module, nn.Module)
        )
        self.head_activation = arch["layers"][-1].get("activation")

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        # x: (B, time, channels) -> channels-first for convs
        x = x.permute(0, 2, 1)
        flattened = False
        for tag, op in self.ops:
            if tag == "module":
                x = op(x)
            elif tag == "activation":
                if op == "relu":
                    x = torch.relu(x)
                elif op == "tanh":
                    x = torch.tanh(x)
                elif op == "sigmoid":
                    x = torch.sigmoid(x)
                elif op == "linear":
                    pass
                else:
                    raise ValueError(f"unsupported hidden activation {op!r}")
            elif tag == "global_pool":
                x = x.mean(dim=2) if op == "avg" else x.amax(dim=2)
                flattened = True
            elif tag == "dense":
                if not flattened:
                    if x.dim() == 3:  # back to time-major before flattening
                        x = x.permute(0, 2, 1).flatten(1)
                    flattened = True
                x = op(x)
        return x

    @torch.no_grad()
    def predict_proba(self, x: torch.Tensor) -> torch.Tensor:
        """Seizure probability per block (head activation applied)."""
        self.eval()
        logits = self.forward(x)
        if self.head_units == 2:
            return torch.softmax(logits, dim=1)[:, 1]
        return torch.sigmoid(logits[:, 0])

    def export_tensors(self) -> list[np.ndarray]:
        """Weight/bias pairs in the engine's layout: conv (out, k, in),
        dense (out, in), float32."""
        out: list[np.ndarray] = []
        for tag, op in self.ops:
            if tag == "module" and isinstance(op, nn.Conv1d):
                w = op.weight.detach().permute(0, 2, 1).contiguous().numpy()
                out.extend([w.astype(np.float32), op.bias.detach().numpy().astype(np.float32)])
            elif tag == "dense":
                out.extend([
                    op.weight.detach().numpy().astype(np.float32),
                    op.bias.detach().numpy().astype(np.float32),
                ])
        return out
