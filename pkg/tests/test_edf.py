"""EDF parsing, writing, calibration, and the bit-exact round trip."""

from __future__ import annotations

import numpy as np
import pytest

from seizurefg.edf import (
    DIGITAL_MAX,
    DIGITAL_MIN,
    read_edf,
    read_edf_raw,
    read_header,
    write_edf,
)
from seizurefg.errors import (
    EdfFormatError,
    EdfRangeError,
    EdfScalingError,
    EdfTruncationError,
)
from seizurefg.recording import Recording

from helpers import random_recording


def build_edf_bytes(
    signals: list[tuple[str, np.ndarray]],
    physical: list[tuple[float, float]],
    digital: list[tuple[int, int]],
    sample_rate: int = 256,
    n_records: int | None = None,
    overrides: dict[str, bytes] | None = None,
) -> bytes:
    """Independent EDF byte builder used as the reader's fixture source."""
    ns = len(signals)
    if n_records is None:
        n_records = len(signals[0][1]) // sample_rate

    def pad(text: str, size: int) -> bytes:
        return text.encode("ascii").ljust(size)[:size]

    head = b"".join([
        pad("0", 8),
        pad("test patient", 80),
        pad("test recording", 80),
        pad("01.01.00", 8),
        pad("00.00.00", 8),
        pad(str(256 + ns * 256), 8),
        pad("", 44),
        pad(str(n_records), 8),
        pad("1", 8),
        pad(str(ns), 4),
    ])
    head += b"".join(pad(label, 16) for label, _ in signals)
    head += b"".join(pad("", 80) for _ in signals)
    head += b"".join(pad("uV", 8) for _ in signals)
    head += b"".join(pad(str(p[0]), 8) for p in physical)
    head += b"".join(pad(str(p[1]), 8) for p in physical)
    head += b"".join(pad(str(d[0]), 8) for d in digital)
    head += b"".join(pad(str(d[1]), 8) for d in digital)
    head += b"".join(pad("", 80) for _ in signals)
    head += b"".join(pad(str(sample_rate), 8) for _ in signals)
    head += b"".join(pad("", 32) for _ in signals)

    if overrides:
        head = bytearray(head)
        for raw_offset, raw in overrides.items():
            offset = int(raw_offset)
            head[offset:offset + len(raw)] = raw
        head = bytes(head)

    body = b""
    for record in range(n_records):
        for _, samples in signals:
            chunk = samples[record * sample_rate:(record + 1) * sample_rate]
            body += np.asarray(chunk, dtype="<i2").tobytes()
    return head + body


class TestReadEdf:
    def test_identity_scaling_fixture(self, tmp_path):
        # physical range equals digital range: gain 1, offset 0
        digital = np.zeros(256, dtype=np.int16)
        digital[:3] = [0, 100, -100]
        raw = build_edf_bytes(
            [("C3", digital)], physical=[(-1000, 1000)], digital=[(-1000, 1000)]
        )
        path = tmp_path / "identity.edf"
        path.write_bytes(raw)
        recording = read_edf(path)
        np.testing.assert_allclose(recording.channels[0][1][:3], [0.0, 100.0, -100.0])

    def test_affine_scaling_fixture(self, tmp_path):
        # gain = (200 - 0) / (100 - (-100)) = 1, offset = 0 - (-100) * 1 = 100
        digital = np.zeros(256, dtype=np.int16)
        digital[:3] = [0, 100, -100]
        raw = build_edf_bytes(
            [("C3", digital)], physical=[(0, 200)], digital=[(-100, 100)]
        )
        path = tmp_path / "affine.edf"
        path.write_bytes(raw)
        recording = read_edf(path)
        np.testing.assert_allclose(recording.channels[0][1][:3], [100.0, 200.0, 0.0])

    def test_degenerate_calibration_rejected(self, tmp_path):
        digital = np.zeros(256, dtype=np.int16)
        raw = build_edf_bytes(
            [("C3", digital)], physical=[(-100, 100)], digital=[(5, 5)]
        )
        path = tmp_path / "flat.edf"
        path.write_bytes(raw)
        with pytest.raises(EdfScalingError):
            read_edf(path)

    def test_malformed_numeric_field_names_it(self, tmp_path):
        digital = np.zeros(256, dtype=np.int16)
        raw = build_edf_bytes(
            [("C3", digital)], physical=[(-100, 100)], digital=[(-100, 100)],
            overrides={"236": b"oops    "},  # number of data records
        )
        path = tmp_path / "badrecords.edf"
        path.write_bytes(raw)
        with pytest.raises(EdfFormatError, match="number of data records"):
            read_header(path)

    def test_wrong_header_size_field(self, tmp_path):
        digital = np.zeros(256, dtype=np.int16)
        raw = build_edf_bytes(
            [("C3", digital)], physical=[(-100, 100)], digital=[(-100, 100)],
            overrides={"184": b"9999    "},  # bytes in header record
        )
        path = tmp_path / "badsize.edf"
        path.write_bytes(raw)
        with pytest.raises(EdfFormatError, match="bytes in header record"):
            read_header(path)

    def test_truncated_data_record_reports_offset(self, tmp_path):
        digital = np.zeros(512, dtype=np.int16)
        raw = build_edf_bytes(
            [("C3", digital)], physical=[(-100, 100)], digital=[(-100, 100)]
        )
        path = tmp_path / "short.edf"
        path.write_bytes(raw[:-10])
        with pytest.raises(EdfTruncationError) as err:
            read_edf_raw(path)
        assert err.value.byte_offset == len(raw) - 10

    def test_too_short_for_header(self, tmp_path):
        path = tmp_path / "stub.edf"
        path.write_bytes(b"0" * 100)
        with pytest.raises(EdfFormatError):
            read_header(path)

    def test_channels_share_sample_count(self, tmp_path):
        rng = np.random.default_rng(7)
        digital = rng.integers(-500, 500, size=(2, 512)).astype(np.int16)
        raw = build_edf_bytes(
            [("C3", digital[0]), ("C4", digital[1])],
            physical=[(-1000, 1000)] * 2,
            digital=[(-1000, 1000)] * 2,
        )
        path = tmp_path / "two.edf"
        path.write_bytes(raw)
        recording = read_edf(path)
        assert recording.n_samples == 512
        assert recording.duration_s == 2.0
        recording.validate()


class TestWriteEdf:
    def test_empty_channel_list_rejected(self, tmp_path):
        with pytest.raises((EdfFormatError, ValueError)):
            recording = Recording.__new__(Recording)
            recording.patient_id = "p"
            recording.file_id = "f"
            recording.sample_rate = 256
            recording.channels = []
            recording.duration_s = 0.0
            write_edf(recording, tmp_path / "empty.edf")

    def test_file_size_arithmetic(self, tmp_path, rng):
        recording = random_recording(rng, n_channels=1, seconds=1)
        path = tmp_path / "one.edf"
        write_edf(recording, path)
        assert path.stat().st_size == 256 + 256 * 1 + 2 * 256

    def test_out_of_range_sample_names_channel_and_index(self, tmp_path, rng):
        recording = random_recording(rng, n_channels=1, seconds=1)
        recording.channels[0][1][17] = 9999.0
        with pytest.raises(EdfRangeError, match=r"channel 0 .*sample 17"):
            write_edf(recording, tmp_path / "range.edf", physical_ranges=[(-500.0, 500.0)])

    def test_non_integer_seconds_rejected(self, tmp_path):
        recording = Recording(
            patient_id="p", file_id="f", sample_rate=256,
            channels=[("C3", np.zeros(300))], duration_s=300 / 256,
        )
        with pytest.raises(EdfFormatError):
            write_edf(recording, tmp_path / "frac.edf")

    def test_constant_channel_widens_range(self, tmp_path):
        recording = Recording(
            patient_id="p", file_id="f", sample_rate=256,
            channels=[("C3", np.full(256, 42.0))], duration_s=1.0,
        )
        path = tmp_path / "const.edf"
        write_edf(recording, path)
        out = read_edf(path)
        np.testing.assert_allclose(out.channels[0][1], 42.0, atol=1e-3)


class TestRoundTrip:
    def test_digital_round_trip_is_bit_exact(self, tmp_path):
        # integer-valued physical samples under identity scaling: the stored
        # digital words must reproduce them exactly
        rng = np.random.default_rng(42)
        for case in range(50):
            n_channels = int(rng.integers(1, 4))
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
            write_edf(
                recording, path,
                physical_ranges=[(DIGITAL_MIN, DIGITAL_MAX)] * n_channels,
            )
            _, signals = read_edf_raw(path)
            for i in range(n_channels):
                np.testing.assert_array_equal(signals[i], digital[i])

    def test_physical_round_trip_close(self, tmp_path, rng):
        recording = random_recording(rng, n_channels=2, seconds=2)
        path = tmp_path / "phys.edf"
        write_edf(recording, path)
        out = read_edf(path)
        for (_, original), (_, restored) in zip(recording.channels, out.channels):
            # quantization error is bounded by one digital step
            step = np.ptp(original) / (DIGITAL_MAX - DIGITAL_MIN)
            assert np.max(np.abs(original - restored)) <= step

    def test_round_trip_preserves_labels_and_rate(self, tmp_path, rng):
        recording = random_recording(rng, n_channels=3, seconds=1)
        path = tmp_path / "meta.edf"
        write_edf(recording, path)
        out = read_edf(path)
        assert out.labels == recording.labels
        assert out.sample_rate == 256
