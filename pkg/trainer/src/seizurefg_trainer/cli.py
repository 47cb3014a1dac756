"""Trainer command line: fit on ingested tensors, export engine files."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .export import export_probabilities, export_weights
from .formats import (
    read_block_tensor,
    read_fold_plan,
    read_manifest,
    write_training_log,
)
from .model import BlockClassifier
from .train import DEFAULT_ARCH, TrainConfig, train


def _load_arch(path: str | None) -> dict:
    if not path:
        return dict(DEFAULT_ARCH)
    with open(path) as fh:
        return json.load(fh)


def _load_dataset(manifest_path: str, tensor_path: str):
    rows = read_manifest(manifest_path)
    blocks = read_block_tensor(tensor_path)
    if len(rows) != len(blocks):
        raise ValueError(
            f"manifest has {len(rows)} rows but tensor holds {len(blocks)} blocks"
        )
    return rows, blocks


def cmd_train(args) -> int:
    rows, blocks = _load_dataset(args.manifest, args.tensors)
    keep = np.ones(len(rows), dtype=bool)
    if args.fold_plan is not None:
        folds = read_fold_plan(args.fold_plan)
        if not 0 <= args.fold < len(folds):
            print(f"fatal: fold {args.fold} not in plan of {len(folds)}", file=sys.stderr)
            return 1
        train_patients = set(folds[args.fold]["train"])
        keep = np.array([row.patient_id in train_patients for row in rows])
    labels = np.array([row.label for row in rows])[keep]
    config = TrainConfig(
        arch=_load_arch(args.arch),
        learning_rate=args.learning_rate,
        batch_size=args.batch_size,
        epochs=args.epochs,
        seed=args.seed,
        class_weighting=args.class_weighting,
    )
    model, log = train(config, blocks[keep], labels)
    export_weights(model, args.out_weights)
    if args.log:
        log["weights"] = str(Path(args.out_weights).name)
        write_training_log(args.log, log)
    print(f"trained on {int(keep.sum())} blocks ({int(labels.sum())} positive); "
          f"final loss {log['loss'][-1]:.6f}")
    print(f"weights written to {args.out_weights}")
    return 0


def cmd_export_probs(args) -> int:
    rows, blocks = _load_dataset(args.manifest, args.tensors)
    arch, tensors = _read_weight_file(args.weights)
    model = BlockClassifier(arch)
    _load_tensors_into(model, tensors)
    values = export_probabilities(model, rows, blocks, args.out)
    print(f"{len(values)} probabilities written to {args.out}")
    return 0


def _read_weight_file(path: str):
    """Minimal reader for the weight format (descriptor + raw tensors)."""
    import struct
    import zlib

    data = Path(path).read_bytes()
    if len(data) < 16 or data[:4] != b"NNWF":
        raise ValueError("not a weight file")
    (crc,) = struct.unpack_from("<I", data, len(data) - 4)
    if zlib.crc32(data[:-4]) != crc:
        raise ValueError("weight file checksum mismatch")
    (desc_len,) = struct.unpack_from("<I", data, 8)
    offset = 12
    arch = json.loads(data[offset:offset + desc_len].decode("utf-8"))
    offset += desc_len
    (count,) = struct.unpack_from("<I", data, offset)
    offset += 4
    tensors = []
    for _ in range(count):
        (ndim,) = struct.unpack_from("<I", data, offset)
        offset += 4
        shape = struct.unpack_from(f"<{ndim}I", data, offset)
        offset += 4 * ndim
        size = int(np.prod(shape)) if ndim else 1
        tensors.append(
            np.frombuffer(data, dtype="<f4", count=size, offset=offset).reshape(shape).copy()
        )
        offset += 4 * size
    return arch, tensors


def _load_tensors_into(model: BlockClassifier, tensors: list[np.ndarray]) -> None:
    import torch
    from torch import nn

    it = iter(tensors)
    for tag, op in model.ops:
        if tag == "module" and isinstance(op, nn.Conv1d):
            w, b = next(it), next(it)
            op.weight.data = torch.from_numpy(np.ascontiguousarray(w.transpose(0, 2, 1)))
            op.bias.data = torch.from_numpy(b.copy())
        elif tag == "dense":
            w, b = next(it), next(it)
            op.weight.data = torch.from_numpy(w.copy())
            op.bias.data = torch.from_numpy(b.copy())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seizurefg-trainer",
        description="Train the block classifier and export engine-format files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit on a block tensor, write a weight file")
    p.add_argument("--manifest", required=True)
    p.add_argument("--tensors", required=True)
    p.add_argument("--arch", help="architecture descriptor JSON (default: shipped)")
    p.add_argument("--out-weights", dest="out_weights", required=True)
    p.add_argument("--log", help="training log JSON path")
    p.add_argument("--fold-plan", dest="fold_plan", help="fold plan JSON")
    p.add_argument("--fold", type=int, default=0, help="fold index for --fold-plan")
    p.add_argument("--learning-rate", dest="learning_rate", type=float, default=0.001)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=128)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--class-weighting", dest="class_weighting", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("export-probs", help="run a weight file over a tensor, write CSV")
    p.add_argument("--weights", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--tensors", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_probs)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"fatal: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
