"""Reading and writing plain EDF (European Data Format) files.

Layout: a 256-byte fixed header, then 256 bytes of per-signal header fields
(16-byte label, 80-byte transducer, 8-byte physical dimension, 8-byte
physical min/max, 8-byte digital min/max, 80-byte prefiltering, 8-byte
samples-per-record, 32 reserved bytes -- each field stored for all signals
consecutively), then data records of 16-bit little-endian two's-complement
samples, signal-major within each record.

Digital values map to physical units through the per-signal affine
calibration ``physical = digital * gain + offset`` with
``gain = (physical_max - physical_min) / (digital_max - digital_min)`` and
``offset = physical_min - digital_min * gain``.

Only plain EDF is supported (no EDF+ annotations channel).
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    EdfFormatError,
    EdfRangeError,
    EdfScalingError,
    EdfTruncationError,
)
from .recording import Recording

FIXED_HEADER_BYTES = 256
PER_SIGNAL_HEADER_BYTES = 256
DIGITAL_MIN = -32768
DIGITAL_MAX = 32767


@dataclass
class EdfHeader:
    """Parsed EDF header (fixed part plus per-signal arrays)."""

    version: str
    patient_info: str
    recording_info: str
    startdate: str
    starttime: str
    header_bytes: int
    n_records: int
    record_duration_s: float
    n_signals: int
    labels: list[str]
    physical_min: np.ndarray
    physical_max: np.ndarray
    digital_min: np.ndarray
    digital_max: np.ndarray
    samples_per_record: np.ndarray

    @property
    def sample_rates(self) -> np.ndarray:
        return self.samples_per_record / self.record_duration_s

    @property
    def gains(self) -> np.ndarray:
        return (self.physical_max - self.physical_min) / (
            self.digital_max - self.digital_min
        )

    @property
    def offsets(self) -> np.ndarray:
        return self.physical_min - self.digital_min * self.gains


def _ascii(raw: bytes, field: str) -> str:
    try:
        return raw.decode("ascii").strip()
    except UnicodeDecodeError as exc:
        raise EdfFormatError(f"header field {field!r} is not ASCII") from exc


def _ascii_int(raw: bytes, field: str) -> int:
    text = _ascii(raw, field)
    try:
        return int(text)
    except ValueError as exc:
        raise EdfFormatError(f"header field {field!r} is not an integer: {text!r}") from exc


def _ascii_float(raw: bytes, field: str) -> float:
    text = _ascii(raw, field)
    try:
        return float(text)
    except ValueError as exc:
        raise EdfFormatError(f"header field {field!r} is not a number: {text!r}") from exc


def read_header(path: str | Path) -> EdfHeader:
    """Parse the EDF header, raising :class:`EdfFormatError` on any bad field."""
    with open(path, "rb") as fh:
        fixed = fh.read(FIXED_HEADER_BYTES)
        if len(fixed) < FIXED_HEADER_BYTES:
            raise EdfFormatError(
                f"file too short for fixed header: {len(fixed)} < {FIXED_HEADER_BYTES} bytes"
            )
        version = _ascii(fixed[0:8], "version")
        patient_info = _ascii(fixed[8:88], "local patient identification")
        recording_info = _ascii(fixed[88:168], "local recording identification")
        startdate = _ascii(fixed[168:176], "startdate")
        starttime = _ascii(fixed[176:184], "starttime")
        header_bytes = _ascii_int(fixed[184:192], "bytes in header record")
        n_records = _ascii_int(fixed[236:244], "number of data records")
        record_duration_s = _ascii_float(fixed[244:252], "duration of a data record")
        n_signals = _ascii_int(fixed[252:256], "number of signals")
        if n_signals <= 0:
            raise EdfFormatError(f"header field 'number of signals' must be positive, got {n_signals}")
        if record_duration_s <= 0:
            raise EdfFormatError(
                f"header field 'duration of a data record' must be positive, got {record_duration_s}"
            )
        expected_header = FIXED_HEADER_BYTES + n_signals * PER_SIGNAL_HEADER_BYTES
        if header_bytes != expected_header:
            raise EdfFormatError(
                f"header field 'bytes in header record' is {header_bytes}, "
                f"expected {expected_header} for {n_signals} signals"
            )

        per_signal = fh.read(n_signals * PER_SIGNAL_HEADER_BYTES)
        if len(per_signal) < n_signals * PER_SIGNAL_HEADER_BYTES:
            raise EdfFormatError("file too short for per-signal header")

    def fields(offset: int, size: int) -> list[bytes]:
        base = offset * n_signals
        return [per_signal[base + i * size: base + (i + 1) * size] for i in range(n_signals)]

    labels = [_ascii(raw, "label") for raw in fields(0, 16)]
    # transducer (80), physical dimension (8) are skipped but positions matter
    physical_min = np.array(
        [_ascii_float(raw, "physical minimum") for raw in fields(16 + 80 + 8, 8)]
    )
    physical_max = np.array(
        [_ascii_float(raw, "physical maximum") for raw in fields(16 + 80 + 8 + 8, 8)]
    )
    digital_min = np.array(
        [_ascii_int(raw, "digital minimum") for raw in fields(16 + 80 + 8 + 16, 8)]
    )
    digital_max = np.array(
        [_ascii_int(raw, "digital maximum") for raw in fields(16 + 80 + 8 + 24, 8)]
    )
    samples_per_record = np.array(
        [_ascii_int(raw, "samples per record") for raw in fields(16 + 80 + 8 + 32 + 80, 8)]
    )
    if np.any(samples_per_record <= 0):
        raise EdfFormatError("header field 'samples per record' must be positive for every signal")
    if np.any(digital_min == digital_max):
        bad = int(np.argmax(digital_min == digital_max))
        raise EdfScalingError(
            f"signal {bad} ({labels[bad]!r}): digital_min == digital_max == {digital_min[bad]}"
        )

    return EdfHeader(
        version=version,
        patient_info=patient_info,
        recording_info=recording_info,
        startdate=startdate,
        starttime=starttime,
        header_bytes=header_bytes,
        n_records=n_records,
        record_duration_s=record_duration_s,
        n_signals=n_signals,
        labels=labels,
        physical_min=physical_min,
        physical_max=physical_max,
        digital_min=digital_min,
        digital_max=digital_max,
        samples_per_record=samples_per_record,
    )


def read_edf_raw(path: str | Path) -> tuple[EdfHeader, list[np.ndarray]]:
    """Parse an EDF file into its header and per-signal int16 digital arrays."""
    header = read_header(path)
    record_samples = int(header.samples_per_record.sum())
    record_bytes = record_samples * 2

    with open(path, "rb") as fh:
        fh.seek(header.header_bytes)
        data = fh.read()

    n_records = header.n_records
    if n_records < 0:  # unknown record count: infer from file size
        n_records = len(data) // record_bytes
    expected = n_records * record_bytes
    if len(data) < expected:
        offset = header.header_bytes + len(data)
        raise EdfTruncationError(
            f"data section holds {len(data)} bytes, expected {expected} "
            f"for {n_records} records",
            byte_offset=offset,
        )
    if len(data) > expected:
        raise EdfFormatError(
            f"{len(data) - expected} trailing bytes after {n_records} data records"
        )

    flat = np.frombuffer(data, dtype="<i2").reshape(n_records, record_samples)
    signals: list[np.ndarray] = []
    col = 0
    for n in header.samples_per_record:
        n = int(n)
        signals.append(np.ascontiguousarray(flat[:, col:col + n]).reshape(-1))
        col += n
    header.n_records = n_records
    return header, signals


def read_edf(
    path: str | Path,
    patient_id: str | None = None,
    file_id: str | None = None,
) -> Recording:
    """Read an EDF file into a :class:`Recording` in physical units.

    ``patient_id``/``file_id`` default to the CHB-style filename convention
    (``<patient>_<nn>.edf``).
    """
    path = Path(path)
    header, signals = read_edf_raw(path)
    rates = header.sample_rates
    if np.ptp(rates) != 0:
        raise EdfFormatError(f"signals have differing sample rates: {sorted(set(rates))}")
    rate = float(rates[0])
    if abs(rate - round(rate)) > 1e-9:
        raise EdfFormatError(f"non-integer sample rate {rate}")

    gains = header.gains
    offsets = header.offsets
    channels = [
        (header.labels[i], signals[i].astype(np.float64) * gains[i] + offsets[i])
        for i in range(header.n_signals)
    ]
    if file_id is None:
        file_id = path.stem
    if patient_id is None:
        patient_id = file_id.split("_")[0]
    return Recording(
        patient_id=patient_id,
        file_id=file_id,
        sample_rate=int(round(rate)),
        channels=channels,
        duration_s=header.n_records * header.record_duration_s,
    )


def _format_header_number(value: float, field: str) -> str:
    """Render a number into at most 8 ASCII characters."""
    if value == int(value) and abs(value) < 1e8:
        text = str(int(value))
        if len(text) <= 8:
            return text
    for precision in range(7, -1, -1):
        text = f"{value:.{precision}g}"
        if len(text) <= 8 and "inf" not in text and "nan" not in text:
            return text
    raise EdfFormatError(f"cannot format {field} value {value} into 8 bytes")


def _physical_range(samples: np.ndarray, explicit: tuple[float, float] | None) -> tuple[float, float]:
    if explicit is not None:
        lo, hi = float(explicit[0]), float(explicit[1])
    else:
        lo, hi = float(samples.min()), float(samples.max())
        if lo == hi:  # constant channel: widen so the gain is nonzero
            lo, hi = lo - 1.0, hi + 1.0
    if hi <= lo:
        raise EdfFormatError(f"physical range [{lo}, {hi}] is empty")
    # round-trip through the 8-char header encoding so the written
    # calibration matches the one used to digitize the samples
    lo = float(_format_header_number(lo, "physical minimum"))
    hi = float(_format_header_number(hi, "physical maximum"))
    if hi <= lo:
        raise EdfFormatError(f"physical range collapsed to [{lo}, {hi}] after encoding")
    return lo, hi


def write_edf(
    recording: Recording,
    path: str | Path,
    physical_ranges: list[tuple[float, float]] | None = None,
) -> None:
    """Write ``recording`` as a plain EDF file with one-second data records.

    Each channel is digitized into the full 16-bit range against its
    physical min/max (taken from the data unless ``physical_ranges``
    supplies explicit per-channel bounds). A sample falling outside the
    digital range after scaling raises :class:`EdfRangeError`.
    """
    if not recording.channels:
        raise EdfFormatError("cannot write an EDF file with no channels")
    recording.validate()
    n_samples = recording.n_samples
    rate = recording.sample_rate
    if n_samples % rate != 0:
        raise EdfFormatError(
            f"sample count {n_samples} is not a whole number of one-second "
            f"records at {rate} Hz"
        )
    n_records = n_samples // rate
    if n_records == 0:
        raise EdfFormatError("recording is shorter than one data record")
    n_signals = len(recording.channels)
    if physical_ranges is not None and len(physical_ranges) != n_signals:
        raise EdfFormatError(
            f"physical_ranges has {len(physical_ranges)} entries for {n_signals} channels"
        )

    digital: list[np.ndarray] = []
    phys_lo: list[float] = []
    phys_hi: list[float] = []
    for idx, (label, samples) in enumerate(recording.channels):
        samples = np.asarray(samples, dtype=np.float64)
        explicit = physical_ranges[idx] if physical_ranges is not None else None
        lo, hi = _physical_range(samples, explicit)
        gain = (hi - lo) / (DIGITAL_MAX - DIGITAL_MIN)
        dig = np.rint((samples - lo) / gain + DIGITAL_MIN)
        bad = np.nonzero((dig < DIGITAL_MIN) | (dig > DIGITAL_MAX))[0]
        if bad.size:
            raise EdfRangeError(
                f"channel {idx} ({label!r}) sample {int(bad[0])} = "
                f"{samples[bad[0]]} is outside the digital range for "
                f"physical range [{lo}, {hi}]"
            )
        digital.append(dig.astype("<i2"))
        phys_lo.append(lo)
        phys_hi.append(hi)

    def fixed(text: str, size: int, field: str) -> bytes:
        raw = text.encode("ascii", errors="replace")[:size]
        return raw.ljust(size)

    header = bytearray()
    header += fixed("0", 8, "version")
    header += fixed(recording.patient_id, 80, "patient")
    header += fixed(recording.file_id, 80, "recording")
    header += fixed("01.01.00", 8, "startdate")
    header += fixed("00.00.00", 8, "starttime")
    header += fixed(str(FIXED_HEADER_BYTES + n_signals * PER_SIGNAL_HEADER_BYTES), 8, "header bytes")
    header += fixed("", 44, "reserved")
    header += fixed(str(n_records), 8, "records")
    header += fixed("1", 8, "record duration")
    header += fixed(str(n_signals), 4, "signals")

    def per_signal(values: list[str], size: int, field: str) -> bytes:
        return b"".join(fixed(v, size, field) for v in values)

    labels = [label for label, _ in recording.channels]
    header += per_signal(labels, 16, "label")
    header += per_signal([""] * n_signals, 80, "transducer")
    header += per_signal(["uV"] * n_signals, 8, "dimension")
    header += per_signal([_format_header_number(v, "physical minimum") for v in phys_lo], 8, "pmin")
    header += per_signal([_format_header_number(v, "physical maximum") for v in phys_hi], 8, "pmax")
    header += per_signal([str(DIGITAL_MIN)] * n_signals, 8, "dmin")
    header += per_signal([str(DIGITAL_MAX)] * n_signals, 8, "dmax")
    header += per_signal([""] * n_signals, 80, "prefiltering")
    header += per_signal([str(rate)] * n_signals, 8, "samples per record")
    header += per_signal([""] * n_signals, 32, "reserved")

    body = bytearray()
    for rec in range(n_records):
        for sig in digital:
            body += sig[rec * rate:(rec + 1) * rate].tobytes()

    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header)
            fh.write(body)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
