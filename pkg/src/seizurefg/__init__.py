"""EEG seizure detection engine.

A per-block neural classifier supplies seizure probabilities; exact
sum-product inference over a first-order binary Markov chain smooths them
into posteriors, which a threshold detector turns into states. Alongside sit
the EDF/annotation readers, notch filtering and segmentation, metric and
cross-validation machinery, and FLOP accounting needed to run the whole
protocol from raw recordings.
"""

__version__ = "0.1.0"

from .arch import (
    Conv1d,
    CnnArchitecture,
    DEFAULT_ARCHITECTURE,
    Dense,
    Dropout,
    GlobalPool,
    MaxPool,
)
from .blocks_io import ManifestRow, read_block_tensor, read_manifest, write_block_tensor, write_manifest
from .cnn import forward, forward_batch, random_weights
from .edf import read_edf, read_edf_raw, write_edf
from .annotations import parse_annotations
from .evaluation import EvalReport, FoldResult, build_report, evaluate_fold
from .flops import LITERATURE_MFLOPS, cnn_flop_count, mflops
from .folds import Fold, FoldPlan, make_folds
from .hmm import (
    DetectorConfig,
    MarginalSeries,
    MessageSeries,
    MessageVector,
    TransitionModel,
    backward_messages,
    detect,
    fg_flop_count,
    forward_messages,
    smooth,
    smooth_evidence,
    smooth_fixed_lag,
)
from .metrics import ConfusionCounts, auc_pr, auc_roc, confusion, f1_precision_recall
from .preprocess import (
    BlockSequence,
    EegBlock,
    FilterSpec,
    TrimmedSegment,
    block_starts,
    label_block,
    notch_filter,
    segment,
    trim_around_seizures,
)
from .probabilities import (
    EPSILON,
    ProbabilitySeries,
    evidence_from_probability,
    evidence_series,
    load_probabilities,
    save_probabilities,
)
from .recording import DEFAULT_MONTAGE_PAIRS, MontageSpec, Recording, SeizureAnnotation, apply_montage
from .weights_io import load_weights, save_weights
