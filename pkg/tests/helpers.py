from __future__ import annotations

import numpy as np

from seizurefg.recording import DEFAULT_MONTAGE_PAIRS, Recording


def random_recording(
    rng: np.random.Generator,
    n_channels: int = 2,
    seconds: int = 3,
    sample_rate: int = 256,
    labels: list[str] | None = None,
) -> Recording:
    n = seconds * sample_rate
    channels = []
    for i in range(n_channels):
        label = labels[i] if labels else f"CH{i + 1}"
        channels.append((label, rng.uniform(-500.0, 500.0, size=n)))
    return Recording(
        patient_id="patX",
        file_id="patX_01",
        sample_rate=sample_rate,
        channels=channels,
        duration_s=float(seconds),
    )


def montage_recording(rng: np.random.Generator, seconds: int = 8) -> Recording:
    return random_recording(
        rng, n_channels=18, seconds=seconds, labels=list(DEFAULT_MONTAGE_PAIRS)
    )
