"""Gate criteria for the primary engine, one test per criterion.

Each test prints a single ``[PASS] <criterion>`` line on success (visible
with ``pytest -s`` or in the verbose test listing); a failed assertion marks
the criterion red. Tolerances are fixed here, not tuned at runtime.
"""

from __future__ import annotations

import json
import time

import numpy as np
import pytest

from seizurefg.blocks_io import read_manifest
from seizurefg.cli import main
from seizurefg.edf import DIGITAL_MAX, DIGITAL_MIN, read_edf_raw, write_edf
from seizurefg.errors import EdfFormatError, EdfScalingError, EdfTruncationError
from seizurefg.evaluation import validate_report_dict
from seizurefg.hmm import TransitionModel, fg_flop_count, smooth, smooth_evidence
from seizurefg.metrics import auc_roc, confusion, f1_precision_recall
from seizurefg.cnn import forward, random_weights
from seizurefg.preprocess import FilterSpec, block_starts, label_block, notch_filter
from seizurefg.probabilities import evidence_series
from seizurefg.recording import Recording, SeizureAnnotation
from seizurefg.synthetic import (
    noisy_probabilities,
    simulate_states,
    synth_weight_file,
    write_synthetic_dataset,
)

from oracles import brute_force_marginals, naive_forward, pairwise_auc, tone_amplitude
from test_cnn import random_small_arch
from test_edf import build_edf_bytes


def test_criterion_sum_product_exactness():
    """200 random chains, N <= 12: smoothed marginals match brute force to 1e-9."""
    rng = np.random.default_rng(7)
    started = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 13))
        q = rng.uniform(0.0, 1.0, size=n)
        model = TransitionModel(
            p01=float(rng.uniform(0.01, 0.99)),
            p10=float(rng.uniform(0.01, 0.99)),
        )
        evidence = evidence_series(q)
        expected = brute_force_marginals(evidence, model.p01, model.p10, model.initial)
        got = smooth_evidence(evidence, model)
        worst = max(worst, float(np.max(np.abs(got - expected))))
    elapsed = time.perf_counter() - started
    assert worst <= 1e-9, f"worst deviation {worst}"
    assert elapsed < 10.0, f"took {elapsed:.1f}s"
    print(f"\n[PASS] sum-product exactness: worst |err| = {worst:.2e} over 200 chains "
          f"in {elapsed:.2f}s")


def test_criterion_numerical_robustness():
    """100k-block adversarial chain stays finite; scaling evidence is a no-op."""
    n = 100_000
    q = np.where(np.arange(n) % 2 == 0, 1e-12, 1.0 - 1e-12)
    marginals = smooth(q, TransitionModel()).values
    assert np.all(np.isfinite(marginals))
    assert marginals.min() >= 0.0 and marginals.max() <= 1.0

    rng = np.random.default_rng(11)
    evidence = evidence_series(rng.uniform(size=500))
    base = smooth_evidence(evidence, TransitionModel())
    scaled = evidence.copy()
    scaled[123] *= 1e6
    scaled[321] *= 1e-6
    deviation = float(np.max(np.abs(smooth_evidence(scaled, TransitionModel()) - base)))
    assert deviation <= 1e-12, f"scale invariance broke by {deviation}"
    print(f"\n[PASS] numerical robustness: N={n} finite, scale invariance "
          f"|err| = {deviation:.2e}")


def test_criterion_fg_complexity_and_linearity():
    """fg_flop_count(N) == 12N, and smoothing wall time grows linearly in N."""
    for n in (1, 2, 10, 100, 12345, 10**6):
        assert fg_flop_count(n) == 12 * n

    rng = np.random.default_rng(3)
    sizes = [1_000, 10_000, 100_000, 400_000, 1_000_000]
    times = []
    model = TransitionModel()
    for n in sizes:
        evidence = evidence_series(rng.uniform(size=n))
        best = np.inf
        for _ in range(2):
            started = time.perf_counter()
            smooth_evidence(evidence, model)
            best = min(best, time.perf_counter() - started)
        times.append(best)
    x = np.array(sizes, dtype=np.float64)
    y = np.array(times)
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    r_squared = 1.0 - float(np.sum(residuals**2) / np.sum((y - y.mean())**2))
    assert r_squared > 0.99, f"R^2 = {r_squared:.4f}, times {times}"
    print(f"\n[PASS] fg complexity: 12N exact; wall-time linear, R^2 = {r_squared:.4f} "
          f"({1e9 * slope:.0f} ns/block)")


def test_criterion_smoothing_benefit_on_synthetic_chains():
    """Chain smoothing beats raw probabilities on corrupted draws (mean AUC)."""
    rng = np.random.default_rng(2718)
    model = TransitionModel()
    raw_aucs, smoothed_aucs = [], []
    for _ in range(100):
        states = simulate_states(500, model, rng)
        if states.min() == states.max():  # degenerate draw: AUC undefined
            continue
        q = noisy_probabilities(states, rng)
        marginals = smooth(q, model).values
        raw_aucs.append(auc_roc(q, states))
        smoothed_aucs.append(auc_roc(marginals, states))
    assert len(raw_aucs) >= 95
    raw_mean = float(np.mean(raw_aucs))
    smoothed_mean = float(np.mean(smoothed_aucs))
    assert smoothed_mean > raw_mean, (
        f"smoothing did not help: raw {raw_mean:.4f} vs smoothed {smoothed_mean:.4f}"
    )
    print(f"\n[PASS] smoothing benefit: mean AUC {raw_mean:.4f} -> {smoothed_mean:.4f} "
          f"over {len(raw_aucs)} chains")


def test_criterion_metric_oracles():
    """auc_roc equals the pairwise oracle to 1e-12; confusion fixtures exact."""
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 300))
        truth = rng.integers(0, 2, size=n)
        if truth.min() == truth.max():
            truth[0] = 1 - truth[0]
        scores = np.round(rng.uniform(size=n), 2)  # coarse grid forces ties
        worst = max(worst, abs(auc_roc(scores, truth) - pairwise_auc(scores, truth)))
    assert worst <= 1e-12

    c = confusion([1, 1, 0, 0], [1, 0, 1, 0])
    assert (c.tp, c.fp, c.fn, c.tn) == (1, 1, 1, 1)
    assert f1_precision_recall(c) == (0.5, 0.5, 0.5)
    c2 = confusion([1, 0, 1, 1], [1, 0, 0, 1])
    f1, precision, recall = f1_precision_recall(c2)
    assert (precision, recall) == (2 / 3, 1.0)
    assert f1 == pytest.approx(0.8)
    print(f"\n[PASS] metric oracles: auc_roc worst |err| = {worst:.2e} over 100 instances; "
          "confusion fixtures exact")


def test_criterion_notch_filter():
    """>= 40 dB notch at 60 Hz, <= 1 dB at 10 Hz, unit DC gain, fs = 256."""
    fs = 256.0
    spec = FilterSpec(sample_rate=fs)
    t = np.arange(int(10 * fs)) / fs

    dc = notch_filter(np.full(len(t), 3.0), spec)
    dc_error = float(np.max(np.abs(dc - 3.0)))
    assert dc_error <= 1e-9

    def steady_amplitude(freq: float) -> float:
        y = notch_filter(np.sin(2 * np.pi * freq * t), spec)
        n = len(y)
        return tone_amplitude(y[n // 4:3 * n // 4], freq, fs)

    at_60 = steady_amplitude(60.0)
    at_10 = steady_amplitude(10.0)
    assert at_60 <= 10 ** (-40 / 20), f"only {-20 * np.log10(at_60):.1f} dB at 60 Hz"
    assert 10 ** (-1 / 20) <= at_10 <= 10 ** (1 / 20)
    print(f"\n[PASS] notch filter: {-20 * np.log10(at_60):.0f} dB at 60 Hz, "
          f"{-20 * np.log10(at_10):.3f} dB at 10 Hz, DC error {dc_error:.1e}")


def test_criterion_segmentation():
    """Block count is floor(T) - 3 for every integer T in [4, 10000]."""
    for duration in range(4, 10001):
        count = len(block_starts(float(duration)))
        assert count == duration - 3, f"T={duration}: {count}"

    assert label_block((10.0, 14.0), [SeizureAnnotation(0, 30)]) == 1
    assert label_block((10.0, 14.0), [SeizureAnnotation(13, 40)]) == 0
    assert label_block((10.0, 14.0), [SeizureAnnotation(12, 40)]) == 1
    print("\n[PASS] segmentation: count formula exact on T in [4, 10000]; "
          "label fixtures exact")


def test_criterion_edf_round_trip(tmp_path):
    """50 random recordings: stored digital words survive write -> read bit-exactly."""
    rng = np.random.default_rng(13)
    for case in range(50):
        n_channels = int(rng.integers(1, 5))
        seconds = int(rng.integers(1, 4))
        digital = rng.integers(
            DIGITAL_MIN, DIGITAL_MAX + 1, size=(n_channels, seconds * 256)
        ).astype(np.int16)
        recording = Recording(
            patient_id="p", file_id=f"f{case}", sample_rate=256,
            channels=[(f"CH{i}", digital[i].astype(np.float64)) for i in range(n_channels)],
            duration_s=float(seconds),
        )
        path = tmp_path / f"rt{case}.edf"
        write_edf(recording, path,
                  physical_ranges=[(DIGITAL_MIN, DIGITAL_MAX)] * n_channels)
        _, signals = read_edf_raw(path)
        for i in range(n_channels):
            np.testing.assert_array_equal(signals[i], digital[i])

    # malformed headers produce their distinct error types
    digital = np.zeros(256, dtype=np.int16)
    flat = build_edf_bytes([("C3", digital)], physical=[(-100, 100)], digital=[(7, 7)])
    bad_scale = tmp_path / "scale.edf"
    bad_scale.write_bytes(flat)
    with pytest.raises(EdfScalingError):
        read_edf_raw(bad_scale)

    bad_field = build_edf_bytes(
        [("C3", digital)], physical=[(-100, 100)], digital=[(-100, 100)],
        overrides={"236": b"oops    "},
    )
    bad_path = tmp_path / "field.edf"
    bad_path.write_bytes(bad_field)
    with pytest.raises(EdfFormatError, match="number of data records"):
        read_edf_raw(bad_path)

    good = build_edf_bytes([("C3", digital)], physical=[(-100, 100)], digital=[(-100, 100)])
    short = tmp_path / "short.edf"
    short.write_bytes(good[:-8])
    with pytest.raises(EdfTruncationError):
        read_edf_raw(short)
    print("\n[PASS] edf round trip: 50 fixtures bit-exact; malformed headers rejected")


def test_criterion_forward_pass_oracle():
    """Engine forward pass vs naive direct convolution, 20 random nets, 1e-5."""
    rng = np.random.default_rng(99)
    worst = 0.0
    for case in range(20):
        arch = random_small_arch(rng)
        weights = random_weights(arch, seed=case, scale=0.4)
        block = rng.normal(size=(64, 5)).astype(np.float32)
        worst = max(worst, abs(forward(block, arch, weights) - naive_forward(block, arch, weights)))
    assert worst <= 1e-5, f"worst |err| = {worst}"
    print(f"\n[PASS] forward-pass oracle: worst |err| = {worst:.2e} over 20 architectures")


def test_criterion_end_to_end_smoke(tmp_path):
    """ingest -> infer -> smooth -> evaluate on a synthetic dataset, < 60 s."""
    started = time.perf_counter()
    data_root = tmp_path / "data"
    work = tmp_path / "work"
    work.mkdir()
    write_synthetic_dataset(data_root, n_patients=2, seed=21)
    synth_weight_file(work / "weights.bin", seed=4)

    assert main(["ingest", "--data-root", str(data_root), "--out-dir", str(work)]) == 0
    assert main([
        "infer",
        "--manifest", str(work / "manifest.csv"),
        "--tensors", str(work / "blocks.bin"),
        "--weights", str(work / "weights.bin"),
        "--out", str(work / "probabilities.csv"),
    ]) == 0
    assert main([
        "smooth",
        "--probs", str(work / "probabilities.csv"),
        "--out", str(work / "marginals.csv"),
    ]) == 0
    assert main([
        "evaluate",
        "--marginals", str(work / "marginals.csv"),
        "--manifest", str(work / "manifest.csv"),
        "--out-dir", str(work / "eval"),
        "--fold-seed", "1",
        "--folds", "2",
    ]) == 0

    report = json.loads((work / "eval" / "report.json").read_text())
    validate_report_dict(report)
    manifest = read_manifest(work / "manifest.csv")
    assert sum(entry["n_blocks"] for entry in report["folds"]) == len(manifest)
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0, f"took {elapsed:.1f}s"
    print(f"\n[PASS] end-to-end smoke: {len(manifest)} blocks through "
          f"ingest/infer/smooth/evaluate in {elapsed:.1f}s")
