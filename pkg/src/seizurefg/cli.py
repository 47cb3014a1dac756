"""Command-line front end: ingest, infer, smooth, evaluate, flops.

Flags can come from a JSON config file (``--config``); explicit flags win.
All outputs are written atomically and contain no timestamps, so reruns on
identical inputs are byte-identical. Exit status is nonzero exactly when a
fatal error occurred.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .annotations import parse_annotations
from .arch import CnnArchitecture, DEFAULT_ARCHITECTURE
from .blocks_io import (
    ManifestRow,
    atomic_write_text,
    canon_time,
    format_time,
    read_block_tensor,
    read_manifest,
    write_block_tensor,
    write_manifest,
)
from .cnn import forward_batch
from .edf import read_edf
from .errors import AlignmentError, PipelineError
from .evaluation import build_report, evaluate_fold, write_pr_csv, write_roc_csv
from .flops import LITERATURE_MFLOPS, cnn_flop_count, mflops
from .folds import make_folds
from .hmm import DetectorConfig, TransitionModel, detect, fg_flop_count, smooth, smooth_fixed_lag
from .metrics import MetricError
from .preprocess import FilterSpec, filter_recording, segment, trim_around_seizures
from .probabilities import ProbabilitySeries, save_probabilities
from .recording import MontageSpec, apply_montage
from .weights_io import load_weights

INFER_BATCH = 64


def _config_hash(settings: dict) -> str:
    canonical = json.dumps(settings, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _provenance(settings: dict) -> dict:
    return {"tool_version": __version__, "config_hash": _config_hash(settings)}


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path) as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise PipelineError(f"config file {path} must hold a JSON object")
    return config


def _setting(args, config: dict, name: str, default=None):
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in config:
        return config[name]
    return default


def _load_arch(path: str | None) -> CnnArchitecture:
    if not path:
        return DEFAULT_ARCHITECTURE
    with open(path) as fh:
        arch = CnnArchitecture.from_json(json.load(fh))
    arch.validate()
    return arch


def cmd_ingest(args) -> int:
    config = _load_config(args.config)
    data_root = Path(_setting(args, config, "data_root") or "")
    out_dir = Path(_setting(args, config, "out_dir") or "")
    if not data_root.is_dir():
        print(f"fatal: data root {data_root} is not a directory", file=sys.stderr)
        return 1
    out_dir.mkdir(parents=True, exist_ok=True)
    notch = float(_setting(args, config, "notch_freq", 60.0))
    quality = float(_setting(args, config, "quality_factor", 30.0))
    montage_pairs = _setting(args, config, "montage")
    montage = MontageSpec(tuple(montage_pairs)) if montage_pairs else MontageSpec()

    patient_dirs = sorted(d for d in data_root.iterdir() if d.is_dir())
    if not patient_dirs:
        print(f"fatal: no patient directories under {data_root}", file=sys.stderr)
        return 1

    all_rows: list[ManifestRow] = []
    all_blocks: list[np.ndarray] = []
    failures: list[str] = []
    per_patient: dict[str, tuple[int, int]] = {}

    for patient_dir in patient_dirs:
        patient_id = patient_dir.name
        summaries = sorted(patient_dir.glob("*-summary.txt"))
        if not summaries:
            print(f"fatal: patient {patient_id} has no summary file", file=sys.stderr)
            return 1
        annotations = []
        for summary in summaries:
            annotations.extend(parse_annotations(summary))
        by_file: dict[str, list] = {}
        for ann in annotations:
            by_file.setdefault(ann.file_id, []).append(ann)

        blocks_count = positives = 0
        for file_id in sorted(by_file):  # only files with >= 1 seizure appear here
            edf_path = patient_dir / f"{file_id}.edf"
            try:
                recording = read_edf(edf_path, patient_id=patient_id, file_id=file_id)
                recording = apply_montage(recording, montage)
                recording = filter_recording(
                    recording,
                    FilterSpec(sample_rate=recording.sample_rate,
                               notch_freq=notch, quality_factor=quality),
                )
                segments = trim_around_seizures(recording, by_file[file_id])
                for seg in segments:
                    sequence = segment(seg.recording, seg.annotations)
                    for block in sequence.blocks:
                        all_rows.append(ManifestRow(
                            patient_id=patient_id,
                            file_id=file_id,
                            start_s=seg.offset_s + block.start_s,
                            label=block.label,
                        ))
                        all_blocks.append(block.samples)
                        blocks_count += 1
                        positives += block.label
            except (PipelineError, OSError) as exc:
                failures.append(f"{edf_path}: {exc}")
                print(f"error: {edf_path}: {exc}", file=sys.stderr)
        per_patient[patient_id] = (blocks_count, positives)

    if not all_blocks:
        print("fatal: no usable blocks produced", file=sys.stderr)
        return 1

    write_block_tensor(out_dir / "blocks.bin", np.stack(all_blocks))
    write_manifest(out_dir / "manifest.csv", all_rows)
    for patient_id, (count, positives) in per_patient.items():
        print(f"{patient_id}: {count} blocks, {positives} positive")
    total_pos = sum(p for _, p in per_patient.values())
    print(f"total: {len(all_rows)} blocks, {total_pos} positive")
    if failures:
        print(f"{len(failures)} file(s) skipped due to errors", file=sys.stderr)
    return 0


def cmd_infer(args) -> int:
    config = _load_config(args.config)
    manifest = read_manifest(_setting(args, config, "manifest"))
    blocks = read_block_tensor(_setting(args, config, "tensors"))
    if len(manifest) != len(blocks):
        print(
            f"fatal: manifest has {len(manifest)} rows but tensor holds "
            f"{len(blocks)} blocks", file=sys.stderr,
        )
        return 1
    if len(blocks) == 0:
        print("fatal: no blocks", file=sys.stderr)
        return 1
    arch, weights = load_weights(_setting(args, config, "weights"))

    values = np.empty(len(blocks), dtype=np.float64)
    for lo in range(0, len(blocks), INFER_BATCH):
        chunk = blocks[lo:lo + INFER_BATCH]
        values[lo:lo + len(chunk)] = forward_batch(chunk, arch, weights)
    series = ProbabilitySeries(values=np.clip(values, 0.0, 1.0), rows=manifest)
    save_probabilities(_setting(args, config, "out"), series)

    per_block = cnn_flop_count(arch)
    total = per_block * len(blocks)
    print(f"blocks: {len(blocks)}")
    print(f"cnn flops per block: {per_block} ({mflops(per_block):.2f} MFLOPs)")
    print(f"cnn flops total: {total} ({mflops(total):.2f} MFLOPs)")
    return 0


def _read_probability_csv(path: str | Path) -> list[dict]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        needed = {"patient_id", "file_id", "start_s", "probability"}
        missing = needed - set(reader.fieldnames or ())
        if missing:
            raise AlignmentError(f"probability file is missing columns: {sorted(missing)}")
        for line_no, record in enumerate(reader, start=2):
            value = float(record["probability"])
            if not 0.0 <= value <= 1.0:
                raise AlignmentError(f"row {line_no}: probability {value} outside [0, 1]")
            rows.append({
                "patient_id": record["patient_id"],
                "file_id": record["file_id"],
                "start_s": float(record["start_s"]),
                "probability": value,
            })
    return rows


def _split_chains(rows: list[dict], stride: float) -> list[list[dict]]:
    """Group rows into per-file chains, splitting at stride gaps.

    Chains never span file boundaries; a gap inside one file (separate
    trimmed segments) also breaks the chain.
    """
    by_file: dict[str, list[dict]] = {}
    order: list[str] = []
    for row in rows:
        if row["file_id"] not in by_file:
            order.append(row["file_id"])
        by_file.setdefault(row["file_id"], []).append(row)
    chains = []
    for file_id in order:
        file_rows = sorted(by_file[file_id], key=lambda r: r["start_s"])
        chain = [file_rows[0]]
        for row in file_rows[1:]:
            if abs(row["start_s"] - chain[-1]["start_s"] - stride) <= 1e-6:
                chain.append(row)
            else:
                chains.append(chain)
                chain = [row]
        chains.append(chain)
    return chains


def cmd_smooth(args) -> int:
    config = _load_config(args.config)
    rows = _read_probability_csv(_setting(args, config, "probs"))
    if not rows:
        print("fatal: probability file has no rows", file=sys.stderr)
        return 1
    model = TransitionModel(
        p01=float(_setting(args, config, "p01", TransitionModel().p01)),
        p10=float(_setting(args, config, "p10", TransitionModel().p10)),
        initial_dist=tuple(config["initial_dist"]) if "initial_dist" in config else None,
    )
    threshold = DetectorConfig(float(_setting(args, config, "theta", 0.5)))
    stride = float(_setting(args, config, "stride", 1.0))
    lag = _setting(args, config, "lag")

    out_lines = ["file_id,start_s,q_raw,q_smoothed,detected"]
    total_blocks = 0
    for chain in _split_chains(rows, stride):
        q = np.array([row["probability"] for row in chain])
        if lag is None:
            marginals = smooth(q, model)
        else:
            marginals = smooth_fixed_lag(q, model, lag=int(lag))
        states = detect(marginals, threshold)
        for row, q_raw, q_smoothed, state in zip(chain, q, marginals.values, states):
            out_lines.append(
                f"{row['file_id']},{format_time(row['start_s'])},"
                f"{float(q_raw)!r},{float(q_smoothed)!r},{int(state)}"
            )
        total_blocks += len(chain)
    atomic_write_text(_setting(args, config, "out"), "\n".join(out_lines) + "\n")
    print(f"blocks: {total_blocks}")
    print(f"fg flops total: {fg_flop_count(total_blocks)}")
    return 0


def _read_marginals_csv(path: str | Path) -> dict[tuple[str, float], tuple[float, float]]:
    out: dict[tuple[str, float], tuple[float, float]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        needed = {"file_id", "start_s", "q_raw", "q_smoothed"}
        missing = needed - set(reader.fieldnames or ())
        if missing:
            raise AlignmentError(f"marginal file is missing columns: {sorted(missing)}")
        for record in reader:
            key = (record["file_id"], canon_time(float(record["start_s"])))
            out[key] = (float(record["q_raw"]), float(record["q_smoothed"]))
    return out


def cmd_evaluate(args) -> int:
    config = _load_config(args.config)
    seed = _setting(args, config, "fold_seed")
    if seed is None:
        print("fatal: --fold-seed is required (no hidden randomness)", file=sys.stderr)
        return 1
    manifest = read_manifest(_setting(args, config, "manifest"))
    marginals = _read_marginals_csv(_setting(args, config, "marginals"))
    if len(marginals) != len(manifest):
        print(
            f"fatal: marginal file has {len(marginals)} blocks, manifest has "
            f"{len(manifest)}", file=sys.stderr,
        )
        return 1
    q_raw = np.empty(len(manifest))
    q_smoothed = np.empty(len(manifest))
    truth = np.empty(len(manifest), dtype=np.int64)
    patients = np.array([row.patient_id for row in manifest])
    for i, row in enumerate(manifest):
        if row.key not in marginals:
            print(f"fatal: manifest block {row.key} missing from marginals", file=sys.stderr)
            return 1
        q_raw[i], q_smoothed[i] = marginals[row.key]
        truth[i] = row.label

    threshold = float(_setting(args, config, "theta", 0.5))
    n_folds = _setting(args, config, "folds")
    plan = make_folds(sorted(set(patients)), seed=int(seed),
                      n_folds=int(n_folds) if n_folds is not None else None)

    fold_results = []
    for idx, fold in enumerate(plan.folds):
        mask = np.isin(patients, fold.test_patients)
        fold_results.append(evaluate_fold(
            q_raw[mask], q_smoothed[mask], truth[mask],
            threshold=threshold, fold_index=idx, test_patients=fold.test_patients,
        ))

    arch_path = _setting(args, config, "arch")
    flops_info: dict = {
        "fg_total": fg_flop_count(len(manifest)),
        "literature_mflops": LITERATURE_MFLOPS,
    }
    if arch_path:
        arch = _load_arch(arch_path)
        flops_info["cnn_per_block"] = cnn_flop_count(arch)
        flops_info["cnn_total"] = cnn_flop_count(arch) * len(manifest)

    settings = {
        "fold_seed": int(seed), "theta": threshold,
        "folds": n_folds, "n_blocks": len(manifest),
    }
    report = build_report(fold_results, threshold, plan, flops_info, _provenance(settings))

    out_dir = Path(_setting(args, config, "out_dir") or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    report.save_json(out_dir / "report.json")
    report.save_fold_csv(out_dir / "folds.csv")
    plan.save(out_dir / "fold_plan.json")
    try:
        write_roc_csv(out_dir / "roc_raw.csv", q_raw, truth)
        write_roc_csv(out_dir / "roc_smoothed.csv", q_smoothed, truth)
        write_pr_csv(out_dir / "pr_raw.csv", q_raw, truth)
        write_pr_csv(out_dir / "pr_smoothed.csv", q_smoothed, truth)
    except MetricError as exc:
        print(f"warning: curves not written: {exc}", file=sys.stderr)

    for series in ("raw", "smoothed"):
        stats = report.aggregates[series]
        cells = []
        for name in ("auc_roc", "auc_pr", "f1"):
            mean = stats[name]["mean"]
            std = stats[name]["std"]
            cells.append(
                f"{name}=n/a" if mean is None else f"{name}={100 * mean:.2f}±{100 * std:.2f}"
            )
        print(f"{series}: " + "  ".join(cells))
    print(f"report written to {out_dir / 'report.json'}")
    return 0


def cmd_flops(args) -> int:
    config = _load_config(args.config)
    arch = _load_arch(_setting(args, config, "arch"))
    n_blocks = int(_setting(args, config, "n_blocks", 1000))
    per_block = cnn_flop_count(arch)
    fg_total = fg_flop_count(n_blocks)

    rows = [
        ("configured 1d cnn (computed, per block)", f"{mflops(per_block):.2f} MFLOPs"),
        (f"chain smoothing (computed, N={n_blocks})", f"{fg_total} FLOPs"),
    ]
    for name, value in LITERATURE_MFLOPS.items():
        rows.append((f"{name} (published)", f"{value:.2f} MFLOPs"))
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name:<{width}}  {value}")

    out = _setting(args, config, "out")
    if out:
        payload = {
            "cnn_per_block_flops": per_block,
            "cnn_per_block_mflops": mflops(per_block),
            "fg_total_flops": fg_total,
            "n_blocks": n_blocks,
            "literature_mflops": LITERATURE_MFLOPS,
            "provenance": _provenance({"arch": _setting(args, config, "arch"),
                                       "n_blocks": n_blocks}),
        }
        atomic_write_text(out, json.dumps(payload, indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seizurefg",
        description="EEG seizure detection: per-block probabilities smoothed "
                    "over a binary Markov chain.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="EDF dataset -> filtered, labeled block tensor")
    p.add_argument("--config")
    p.add_argument("--data-root", dest="data_root")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--notch-freq", dest="notch_freq", type=float)
    p.add_argument("--quality-factor", dest="quality_factor", type=float)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("infer", help="block tensor + weight file -> probability CSV")
    p.add_argument("--config")
    p.add_argument("--manifest")
    p.add_argument("--tensors")
    p.add_argument("--weights")
    p.add_argument("--out")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("smooth", help="probability CSV -> smoothed marginal CSV")
    p.add_argument("--config")
    p.add_argument("--probs")
    p.add_argument("--out")
    p.add_argument("--p01", type=float)
    p.add_argument("--p10", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--stride", type=float)
    p.add_argument("--lag", type=int, help="fixed-lag streaming mode (approximate)")
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("evaluate", help="marginal CSV + manifest -> fold report")
    p.add_argument("--config")
    p.add_argument("--marginals")
    p.add_argument("--manifest")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--fold-seed", dest="fold_seed", type=int)
    p.add_argument("--folds", type=int, help="override the 6-fold protocol")
    p.add_argument("--theta", type=float)
    p.add_argument("--arch", help="architecture JSON for CNN FLOP totals")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("flops", help="FLOP table: computed vs published")
    p.add_argument("--config")
    p.add_argument("--arch")
    p.add_argument("--n-blocks", dest="n_blocks", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_flops)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"fatal: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"fatal: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
