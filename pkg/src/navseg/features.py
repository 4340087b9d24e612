"""Block feature vectors: link count plus smoothed anchor-text statistics.

Anchor word counts are smoothed once over the page's whole hyperlink
sequence with a truncated, renormalized Gaussian kernel (edges handled
by index clamping), then each block reports the mean and population
variance of the smoothed values at its own hyperlinks.  Features are
min-max normalized with statistics learned on training data so each
dimension contributes comparably to kernel distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .clustering import BlockPartition
from .dom import IndexedDom
from .errors import ContractViolation

DEFAULT_SIGMA = 2.0


@dataclass(frozen=True)
class SmoothingConfig:
    """Gaussian smoothing parameters; radius defaults to ceil(3 * sigma)."""

    sigma: float = DEFAULT_SIGMA
    radius: int | None = None

    def __post_init__(self):
        if self.sigma <= 0:
            raise ContractViolation("sigma must be positive")
        if self.radius is not None and self.radius < 1:
            raise ContractViolation("radius must be a positive integer")

    @property
    def effective_radius(self) -> int:
        return self.radius if self.radius is not None else math.ceil(3 * self.sigma)


@dataclass(frozen=True)
class BlockFeatures:
    """[link count, smoothed text-length mean, smoothed text-length variance]."""

    count: int
    text_mean: float
    text_var: float

    def vector(self) -> np.ndarray:
        return np.array([float(self.count), self.text_mean, self.text_var])


@dataclass(frozen=True)
class FeatureScaler:
    """Per-feature training minima and maxima for min-max normalization."""

    minimums: tuple[float, float, float]
    maximums: tuple[float, float, float]

    def __post_init__(self):
        if any(hi < lo for lo, hi in zip(self.minimums, self.maximums)):
            raise ContractViolation("scaler maxima must not be below minima")


#: Scaler that leaves vectors unchanged, for models trained on raw vectors.
IDENTITY_SCALER = FeatureScaler((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))


def gaussian_kernel(sigma: float, radius: int) -> np.ndarray:
    """Discrete Gaussian taps for offsets -radius..radius, renormalized to sum 1."""
    offsets = np.arange(-radius, radius + 1, dtype=float)
    weights = np.exp(-(offsets ** 2) / (2.0 * sigma * sigma))
    return weights / weights.sum()


def smooth_text_lengths(lengths: Sequence[float],
                        cfg: SmoothingConfig = SmoothingConfig()) -> list[float]:
    """Clamped Gaussian convolution of a sequence; output length = input length.

    Written as x[i] + sum_d w_d * (x[clamp(i+d)] - x[i]) so that constant
    sequences are reproduced bit-exactly regardless of kernel rounding.
    """
    n = len(lengths)
    if n == 0:
        return []
    x = np.asarray(lengths, dtype=float)
    radius = cfg.effective_radius
    weights = gaussian_kernel(cfg.sigma, radius)
    positions = np.clip(np.arange(n)[:, None] + np.arange(-radius, radius + 1)[None, :],
                        0, n - 1)
    deltas = x[positions] - x[:, None]
    return list(x + deltas @ weights)


def block_features(dom: IndexedDom, partition: BlockPartition,
                   cfg: SmoothingConfig = SmoothingConfig()) -> list[BlockFeatures]:
    """Feature triples for each block of `partition`, in block order.

    Smoothing runs once over the page-wide anchor-word sequence in
    document order; block statistics are read off the smoothed values.
    """
    position = {h.index: k for k, h in enumerate(dom.hyperlinks)}
    missing = [i for block in partition.blocks for i in block if i not in position]
    if missing:
        raise ContractViolation(
            f"partition references unknown hyperlink indices: {sorted(missing)[:5]}")
    smoothed = np.asarray(smooth_text_lengths(
        [h.anchor_words for h in dom.hyperlinks], cfg))
    out = []
    for block in partition.blocks:
        values = smoothed[[position[i] for i in sorted(block)]]
        out.append(BlockFeatures(
            count=len(block),
            text_mean=float(values.mean()),
            text_var=float(values.var()),
        ))
    return out


def fit_scaler(features: Iterable[BlockFeatures]) -> FeatureScaler:
    """Learn per-feature min/max from training blocks."""
    matrix = np.array([f.vector() for f in features])
    if matrix.size == 0:
        raise ContractViolation("cannot fit a scaler on an empty feature list")
    return FeatureScaler(tuple(matrix.min(axis=0)), tuple(matrix.max(axis=0)))


def apply_scaler(scaler: FeatureScaler, f: BlockFeatures | np.ndarray) -> np.ndarray:
    """Map a feature triple to (x - min) / (max - min) per component.

    A degenerate training range (max == min) maps to 0.5; values outside
    the training range are not clipped.
    """
    x = f.vector() if isinstance(f, BlockFeatures) else np.asarray(f, dtype=float)
    lo = np.asarray(scaler.minimums)
    hi = np.asarray(scaler.maximums)
    span = hi - lo
    out = np.empty(3)
    for k in range(3):
        out[k] = 0.5 if span[k] == 0 else (x[k] - lo[k]) / span[k]
    return out
