"""Synthetic recordings, datasets, chains, and weight files.

Everything here is seeded and deterministic. The dataset writer produces a
CHB-style directory tree (one folder per patient holding EDF files plus a
``*-summary.txt``) so the full pipeline can run without the real corpus.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .arch import Conv1d, CnnArchitecture, Dense, GlobalPool, MaxPool
from .cnn import Weights, random_weights
from .edf import write_edf
from .hmm import TransitionModel
from .recording import DEFAULT_MONTAGE_PAIRS, Recording
from .weights_io import save_weights

#: Compact random architecture for fixtures: far cheaper than the default
#: stack but exercises every layer kind.
SMALL_ARCHITECTURE = CnnArchitecture(
    layers=(
        Conv1d(out_channels=8, kernel_size=65, activation="relu"),
        MaxPool(width=8),
        Conv1d(out_channels=8, kernel_size=9, activation="relu"),
        GlobalPool(pool="avg"),
        Dense(out_units=1, activation="sigmoid"),
    ),
)


def synth_recording(
    patient_id: str,
    file_id: str,
    duration_s: int,
    seizures: list[tuple[float, float]],
    seed: int = 0,
    sample_rate: int = 256,
) -> Recording:
    """18-channel recording: pink-ish background plus a strong low-frequency
    oscillation inside the seizure intervals."""
    rng = np.random.default_rng(seed)
    n = duration_s * sample_rate
    t = np.arange(n) / sample_rate
    seizure_mask = np.zeros(n)
    for start, end in seizures:
        seizure_mask[int(start * sample_rate):int(end * sample_rate)] = 1.0

    channels = []
    common = rng.normal(0.0, 5.0, size=n)
    for idx, label in enumerate(DEFAULT_MONTAGE_PAIRS):
        background = (
            rng.normal(0.0, 12.0, size=n)
            + common
            + 20.0 * np.sin(2 * np.pi * 10.0 * t + rng.uniform(0, 2 * np.pi))
        )
        ictal = 80.0 * np.sin(2 * np.pi * 3.5 * t + 0.3 * idx) * seizure_mask
        line_noise = 8.0 * np.sin(2 * np.pi * 60.0 * t)
        channels.append((label, background + ictal + line_noise))
    return Recording(
        patient_id=patient_id,
        file_id=file_id,
        sample_rate=sample_rate,
        channels=channels,
        duration_s=float(duration_s),
    )


def write_synthetic_dataset(
    root: str | Path,
    n_patients: int = 2,
    seed: int = 0,
    include_no_seizure_file: bool = True,
) -> list[str]:
    """Write a CHB-style dataset tree under ``root``; returns patient ids."""
    root = Path(root)
    patient_ids = [f"pat{idx:02d}" for idx in range(1, n_patients + 1)]
    for p_idx, patient_id in enumerate(patient_ids):
        patient_dir = root / patient_id
        patient_dir.mkdir(parents=True, exist_ok=True)
        summary_lines = [f"Data Sampling Rate: 256 Hz", ""]

        file_id = f"{patient_id}_01"
        duration = 400
        seizure = (100.0 + 10 * p_idx, 112.0 + 10 * p_idx)
        recording = synth_recording(
            patient_id, file_id, duration, [seizure], seed=seed + 17 * p_idx
        )
        write_edf(recording, patient_dir / f"{file_id}.edf")
        summary_lines += [
            f"File Name: {file_id}.edf",
            "Number of Seizures in File: 1",
            f"Seizure Start Time: {int(seizure[0])} seconds",
            f"Seizure End Time: {int(seizure[1])} seconds",
            "",
        ]

        if include_no_seizure_file:
            file_id2 = f"{patient_id}_02"
            quiet = synth_recording(
                patient_id, file_id2, 60, [], seed=seed + 17 * p_idx + 1
            )
            write_edf(quiet, patient_dir / f"{file_id2}.edf")
            summary_lines += [
                f"File Name: {file_id2}.edf",
                "Number of Seizures in File: 0",
                "",
            ]

        summary = patient_dir / f"{patient_id}-summary.txt"
        summary.write_text("\n".join(summary_lines))
    return patient_ids


def synth_weight_file(
    path: str | Path,
    arch: CnnArchitecture | None = None,
    seed: int = 0,
) -> tuple[CnnArchitecture, Weights]:
    """Random-weight file in the portable format (stand-in for a trained one)."""
    if arch is None:
        arch = SMALL_ARCHITECTURE
    weights = random_weights(arch, seed=seed, scale=0.05)
    save_weights(path, arch, weights)
    return arch, weights


def simulate_states(n: int, model: TransitionModel, rng: np.random.Generator) -> np.ndarray:
    """Draw one state sequence from the chain, starting at its initial law."""
    states = np.empty(n, dtype=np.int64)
    pi0, _ = model.initial
    state = 0 if rng.random() < pi0 else 1
    states[0] = state
    for i in range(1, n):
        if state == 0:
            state = 1 if rng.random() < model.p01 else 0
        else:
            state = 0 if rng.random() < model.p10 else 1
        states[i] = state
    return states


def noisy_probabilities(
    states: np.ndarray,
    rng: np.random.Generator,
    pos_beta: tuple[float, float] = (2.4, 1.6),
    neg_beta: tuple[float, float] = (1.6, 2.4),
) -> np.ndarray:
    """Corrupt true states into classifier-style probabilities with beta noise."""
    n = len(states)
    q = np.where(
        states == 1,
        rng.beta(*pos_beta, size=n),
        rng.beta(*neg_beta, size=n),
    )
    return q
