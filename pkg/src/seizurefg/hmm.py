"""Exact sum-product inference on a first-order binary Markov chain.

Per-block evidence pairs ``(P(y_i|s=0), P(y_i|s=1))`` combine with the
transition model through forward and backward message recursions

    alpha_1(s) = pi(s) * P(y_1|s)
    alpha_i(s) = P(y_i|s) * sum_{s'} P(s|s') * alpha_{i-1}(s')
    beta_N(s)  = 1
    beta_i(s)  = sum_{s'} P(s'|s) * P(y_{i+1}|s') * beta_{i+1}(s')

and the smoothed posterior at block k is ``normalize(alpha_k * beta_k)``.
Messages are renormalized to sum one at every step, with the running log of
the normalizers kept alongside, so chains of any length stay in range while
the marginals are unchanged. The smoothing is exact; a fixed-lag variant
(bounded lookahead, approximate) is provided for streaming use.

The per-block cost is fixed: with two states and a first-order chain each
message update takes 4 multiplications and 2 additions, so a length-N chain
costs 12N FLOPs across both sweeps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import EvidenceError
from .probabilities import ProbabilitySeries, evidence_series

#: Transition defaults: tuned switching rates, not corpus frequencies.
DEFAULT_P01 = 0.1046
DEFAULT_P10 = 0.179


@dataclass(frozen=True)
class TransitionModel:
    """Row-stochastic 2x2 transition model plus an initial distribution.

    ``p01`` is the probability of switching non-seizure -> seizure, ``p10``
    the reverse. ``initial_dist`` defaults to the stationary distribution of
    the transition matrix.
    """

    p01: float = DEFAULT_P01
    p10: float = DEFAULT_P10
    initial_dist: tuple[float, float] | None = None

    def __post_init__(self):
        if not 0.0 < self.p01 < 1.0 or not 0.0 < self.p10 < 1.0:
            raise ValueError(
                f"transition probabilities must lie in (0, 1): p01={self.p01}, p10={self.p10}"
            )
        if self.initial_dist is not None:
            pi0, pi1 = self.initial_dist
            if pi0 < 0 or pi1 < 0 or abs(pi0 + pi1 - 1.0) > 1e-9:
                raise ValueError(f"initial distribution {self.initial_dist} must sum to 1")

    @property
    def p00(self) -> float:
        return 1.0 - self.p01

    @property
    def p11(self) -> float:
        return 1.0 - self.p10

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.p00, self.p01], [self.p10, self.p11]])

    @property
    def stationary(self) -> tuple[float, float]:
        """The distribution fixed by the chain: pi = pi @ matrix."""
        total = self.p01 + self.p10
        return (self.p10 / total, self.p01 / total)

    @property
    def initial(self) -> tuple[float, float]:
        return self.initial_dist if self.initial_dist is not None else self.stationary


class MessageVector(NamedTuple):
    values: np.ndarray  # (2,), normalized to sum 1
    log_scale: float    # log of the product of normalizers absorbed so far


@dataclass
class MessageSeries:
    """One message per block, values row-normalized, scales accumulated."""

    values: np.ndarray     # (N, 2)
    log_scale: np.ndarray  # (N,)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> MessageVector:
        return MessageVector(self.values[i], float(self.log_scale[i]))


@dataclass
class MarginalSeries:
    """Smoothed posterior P(s_k = 1 | all evidence) per block."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class DetectorConfig:
    threshold: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")


def _check_evidence(evidence: np.ndarray) -> np.ndarray:
    e = np.asarray(evidence, dtype=np.float64)
    if e.ndim != 2 or e.shape[1] != 2 or e.shape[0] == 0:
        raise EvidenceError(f"evidence must be a nonempty (N, 2) array, got {e.shape}")
    if not np.all(np.isfinite(e)) or np.any(e < 0.0):
        raise EvidenceError("evidence must be finite and nonnegative")
    both_zero = np.nonzero((e[:, 0] == 0.0) & (e[:, 1] == 0.0))[0]
    if both_zero.size:
        raise EvidenceError(f"evidence vector at index {int(both_zero[0])} is all zero")
    return e


def forward_messages(evidence: np.ndarray, model: TransitionModel) -> MessageSeries:
    """Forward sweep over ``(N, 2)`` evidence pairs."""
    e = _check_evidence(evidence)
    n = len(e)
    values = np.empty((n, 2))
    scales = np.empty(n)
    rows = e.tolist()
    p00, p01, p10, p11 = model.p00, model.p01, model.p10, model.p11
    pi0, pi1 = model.initial

    a0 = pi0 * rows[0][0]
    a1 = pi1 * rows[0][1]
    z = a0 + a1
    if z <= 0.0:
        raise EvidenceError("forward message at index 0 vanished")
    a0 /= z
    a1 /= z
    log_z = math.log(z)
    values[0, 0], values[0, 1] = a0, a1
    scales[0] = log_z
    for i in range(1, n):
        e0, e1 = rows[i]
        t0 = e0 * (p00 * a0 + p10 * a1)
        t1 = e1 * (p01 * a0 + p11 * a1)
        z = t0 + t1
        if z <= 0.0:
            raise EvidenceError(f"forward message at index {i} vanished")
        a0 = t0 / z
        a1 = t1 / z
        log_z += math.log(z)
        values[i, 0], values[i, 1] = a0, a1
        scales[i] = log_z
    return MessageSeries(values=values, log_scale=scales)


def backward_messages(evidence: np.ndarray, model: TransitionModel) -> MessageSeries:
    """Backward sweep; the boundary message is uniform by construction."""
    e = _check_evidence(evidence)
    n = len(e)
    values = np.empty((n, 2))
    scales = np.empty(n)
    rows = e.tolist()
    p00, p01, p10, p11 = model.p00, model.p01, model.p10, model.p11

    b0 = b1 = 0.5
    log_z = math.log(2.0)
    values[n - 1, 0] = values[n - 1, 1] = 0.5
    scales[n - 1] = log_z
    for i in range(n - 2, -1, -1):
        e0, e1 = rows[i + 1]
        t0 = p00 * e0 * b0 + p01 * e1 * b1
        t1 = p10 * e0 * b0 + p11 * e1 * b1
        z = t0 + t1
        if z <= 0.0:
            raise EvidenceError(f"backward message at index {i} vanished")
        b0 = t0 / z
        b1 = t1 / z
        log_z += math.log(z)
        values[i, 0], values[i, 1] = b0, b1
        scales[i] = log_z
    return MessageSeries(values=values, log_scale=scales)


def smooth_evidence(evidence: np.ndarray, model: TransitionModel) -> np.ndarray:
    """Exact smoothed posteriors P(s_k = 1 | y) from raw evidence pairs."""
    alpha = forward_messages(evidence, model)
    beta = backward_messages(evidence, model)
    joint = alpha.values * beta.values
    totals = joint.sum(axis=1)
    if np.any(totals <= 0.0):
        raise EvidenceError("posterior vanished; evidence is degenerate")
    return joint[:, 1] / totals


def smooth(probs: ProbabilitySeries | np.ndarray, model: TransitionModel) -> MarginalSeries:
    """Smooth per-block probabilities through the chain (exact inference)."""
    values = probs.values if isinstance(probs, ProbabilitySeries) else np.asarray(probs)
    return MarginalSeries(values=smooth_evidence(evidence_series(values), model))


def smooth_fixed_lag(
    probs: ProbabilitySeries | np.ndarray,
    model: TransitionModel,
    lag: int = 30,
) -> MarginalSeries:
    """Fixed-lag approximation: each block sees only ``lag`` future blocks.

    The backward sweep restarts from a uniform message at the window edge,
    so the result is approximate; it converges to :func:`smooth` as ``lag``
    reaches the chain length. Cost is O(N * lag).
    """
    if lag < 0:
        raise ValueError(f"lag must be nonnegative, got {lag}")
    values = probs.values if isinstance(probs, ProbabilitySeries) else np.asarray(probs)
    e = _check_evidence(evidence_series(values))
    alpha = forward_messages(e, model)
    rows = e.tolist()
    p00, p01, p10, p11 = model.p00, model.p01, model.p10, model.p11
    n = len(e)
    out = np.empty(n)
    for k in range(n):
        end = min(n - 1, k + lag)
        b0 = b1 = 0.5
        for i in range(end - 1, k - 1, -1):
            e0, e1 = rows[i + 1]
            t0 = p00 * e0 * b0 + p01 * e1 * b1
            t1 = p10 * e0 * b0 + p11 * e1 * b1
            z = t0 + t1
            if z <= 0.0:
                raise EvidenceError(f"backward message at index {i} vanished")
            b0 = t0 / z
            b1 = t1 / z
        a0, a1 = alpha.values[k]
        m0 = a0 * b0
        m1 = a1 * b1
        out[k] = m1 / (m0 + m1)
    return MarginalSeries(values=out)


def detect(marginals: MarginalSeries | np.ndarray, config: DetectorConfig | float = 0.5) -> np.ndarray:
    """Binary states: 1 where the marginal strictly exceeds the threshold."""
    if not isinstance(config, DetectorConfig):
        config = DetectorConfig(threshold=float(config))
    values = marginals.values if isinstance(marginals, MarginalSeries) else np.asarray(marginals)
    return (values > config.threshold).astype(np.int64)


def fg_flop_count(n: int) -> int:
    """FLOPs for exact smoothing over an ``n``-block chain: always ``12 * n``.

    Each of the two sweeps costs 4 multiplications and 2 additions per block
    (two states, first-order chain), i.e. 6 FLOPs per sweep per block.
    """
    if n < 1:
        raise ValueError(f"chain length must be >= 1, got {n}")
    return 12 * int(n)
