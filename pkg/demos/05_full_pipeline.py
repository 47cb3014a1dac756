#!/usr/bin/env python3
"""The whole pipeline on a synthetic dataset, via the CLI commands.

Creates two synthetic patients worth of EDF files with annotated seizures,
then runs ingest -> infer -> smooth -> evaluate exactly as one would on the
real corpus, and summarizes the emitted report.
"""

import json
import tempfile
from pathlib import Path

from seizurefg.cli import main as cli
from seizurefg.synthetic import synth_weight_file, write_synthetic_dataset


def run(argv):
    print(f"\n$ seizurefg {' '.join(argv)}")
    code = cli(argv)
    if code != 0:
        raise SystemExit(f"command failed with exit code {code}")


def main():
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        data = root / "data"
        work = root / "work"
        work.mkdir()
        write_synthetic_dataset(data, n_patients=2, seed=9)
        synth_weight_file(work / "weights.bin", seed=2)
        print(f"synthetic dataset at {data} (2 patients, CHB-style layout)")

        run(["ingest", "--data-root", str(data), "--out-dir", str(work)])
        run(["infer", "--manifest", str(work / 'manifest.csv'),
             "--tensors", str(work / 'blocks.bin'),
             "--weights", str(work / 'weights.bin'),
             "--out", str(work / 'probabilities.csv')])
        run(["smooth", "--probs", str(work / 'probabilities.csv'),
             "--out", str(work / 'marginals.csv')])
        run(["evaluate", "--marginals", str(work / 'marginals.csv'),
             "--manifest", str(work / 'manifest.csv'),
             "--out-dir", str(work / 'eval'),
             "--fold-seed", "7", "--folds", "2"])
        run(["flops", "--n-blocks", "162"])

        report = json.loads((work / "eval" / "report.json").read_text())
        print("\nreport.json fold summary:")
        for fold in report["folds"]:
            raw = fold["raw"]["auc_roc"]
            smoothed = fold["smoothed"]["auc_roc"]
            print(f"  fold {fold['fold']} (test={fold['test_patients']}): "
                  f"auc_roc raw={raw:.3f} smoothed={smoothed:.3f} "
                  f"[{fold['n_positive']}/{fold['n_blocks']} positive]")
        print("\nemitted files:", sorted(p.name for p in (work / "eval").iterdir()))


if __name__ == "__main__":
    main()
