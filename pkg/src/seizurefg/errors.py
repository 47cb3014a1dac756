"""Exception hierarchy shared across the package."""


class PipelineError(Exception):
    """Base class for every error raised by this package."""


class EdfFormatError(PipelineError):
    """Malformed EDF header or data section."""


class EdfScalingError(EdfFormatError):
    """Degenerate digital calibration (digital_min == digital_max)."""


class EdfTruncationError(EdfFormatError):
    """Data section ends before the header-declared record count."""

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} (byte offset {byte_offset})")
        self.byte_offset = byte_offset


class EdfRangeError(PipelineError):
    """Sample not representable in the 16-bit digital range."""


class AnnotationError(PipelineError):
    """Invalid or inconsistent seizure annotation data."""


class MontageError(PipelineError):
    """Montage channel cannot be resolved from the recording."""


class FilterConfigError(PipelineError):
    """Invalid notch filter configuration."""


class SegmentationError(PipelineError):
    """Recording cannot be segmented as requested."""


class ShapeError(PipelineError):
    """Array shape does not match the expected block/tensor geometry."""


class TensorFormatError(PipelineError):
    """Malformed block tensor file."""


class ArchitectureError(PipelineError):
    """Invalid or shape-incompatible network architecture."""


class WeightFormatError(PipelineError):
    """Malformed weight file."""


class ChecksumError(WeightFormatError):
    """Weight file checksum mismatch."""


class AlignmentError(PipelineError):
    """Probability rows do not align with the block manifest."""


class EvidenceError(PipelineError):
    """Degenerate evidence passed to message passing."""


class MetricError(PipelineError):
    """Metric undefined for the given inputs."""


class FoldPlanError(PipelineError):
    """Cross-validation plan cannot be constructed."""
