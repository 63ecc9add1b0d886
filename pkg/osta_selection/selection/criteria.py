# This code is part of OSTA Selection.
#
# (C) Copyright OSTA Selection Developers 2026.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
#
# Any modifications or derivative works of this code must retain this
# copyright notice, and modified files need to carry a notice indicating
# that they have been altered from the originals.

"""Pruning criteria: a score per IC, higher means keep."""

import logging
import math
import threading
import time
from typing import Optional, Sequence

import numpy as np

from ..combinatorics import ChannelCombination
from ..data.batching import PatchSet
from ..data.dataset import SegmentationDataset, pixel_matrix
from ..data.sample import McSample
from ..exceptions import InvalidArgumentError
from ..substrate.meter import AllocationMeter
from ..substrate.model import ModelParams
from ..substrate.rng import stream
from .config import CRITERIA, RunConfig
from .supernet import evaluate_ic

logger = logging.getLogger(__name__)

ENTROPY_BINS = 256
SINGULAR_EIGENVALUE = 1e-10


def channel_entropy(
    values: np.ndarray, low: float, high: float, bins: int = ENTROPY_BINS
) -> float:
    """Shannon entropy in bits of ``values`` over ``bins`` equal-width bins on ``[low, high]``."""
    if high <= low:
        return 0.0
    counts, _ = np.histogram(values, bins=bins, range=(low, high))
    probabilities = counts[counts > 0] / counts.sum()
    return float(-(probabilities * np.log2(probabilities)).sum())


def channel_entropies(samples: Sequence[McSample]) -> np.ndarray:
    """Per-channel entropy over each channel's own range on ``samples``."""
    pixels = np.concatenate([s.values.reshape(s.channels, -1) for s in samples], axis=1)
    return np.array(
        [channel_entropy(row, float(row.min()), float(row.max())) for row in pixels]
    )


def correlation_matrix(pixels: np.ndarray) -> np.ndarray:
    """Channel correlation matrix; rows and columns of constant channels are NaN."""
    with np.errstate(divide="ignore", invalid="ignore"):
        centred = pixels - pixels.mean(axis=0)
        covariance = centred.T @ centred / pixels.shape[0]
        scale = np.sqrt(np.diag(covariance))
        return covariance / np.outer(scale, scale)


def entropy_score(entropies: np.ndarray, comb: ChannelCombination) -> float:
    """Mean entropy of the channels of ``comb``."""
    return float(np.mean([entropies[c - 1] for c in comb.channels]))


def pca_score(correlation: np.ndarray, comb: ChannelCombination) -> float:
    """Log-determinant of the IC's correlation submatrix; ``-inf`` when degenerate."""
    positions = [c - 1 for c in comb.channels]
    sub = correlation[np.ix_(positions, positions)]
    if not np.isfinite(sub).all():
        return -math.inf
    eigenvalues = np.linalg.eigvalsh(sub)
    if eigenvalues.min() <= SINGULAR_EIGENVALUE:
        return -math.inf
    return float(np.log(eigenvalues).sum())


def probe_subset(dataset: SegmentationDataset, seed: int, key: int = 0) -> Sequence[McSample]:
    """Sub-train samples probed by the ``train_acc`` criterion, as many as in sub-validation.

    Drawn once per run from the ``probe`` stream.
    """
    training = dataset.training()
    size = min(len(dataset.validation()) or 1, len(training))
    order = stream(seed, "probe", 0, key).permutation(len(training))
    return [training[i] for i in sorted(order[:size])]


class CriterionScorer:
    """Scores ICs under one criterion for the whole of a run."""

    def __init__(self, config: RunConfig, dataset: SegmentationDataset, key: int = 0):
        if config.criterion not in CRITERIA:
            raise InvalidArgumentError(f"Unknown criterion '{config.criterion}'.")
        self.criterion = config.criterion
        self.metric = config.metric
        self.batch_size = config.batch_size
        self.eval_set: Optional[PatchSet] = None
        self.entropies: Optional[np.ndarray] = None
        self.correlation: Optional[np.ndarray] = None
        if self.criterion == "val_acc":
            self.eval_set = PatchSet.from_samples(dataset.validation(), config.patch_size)
        elif self.criterion == "train_acc":
            probe = probe_subset(dataset, config.seed, key)
            self.eval_set = PatchSet.from_samples(probe, config.patch_size)
        elif self.criterion == "entropy":
            self.entropies = channel_entropies(dataset.train_pixels())
        else:
            self.correlation = correlation_matrix(pixel_matrix(dataset.train_pixels()))
        self.seconds = 0.0
        self.batches = 0
        self._lock = threading.Lock()

    @property
    def uses_model(self) -> bool:
        """True for the accuracy criteria."""
        return self.eval_set is not None

    @property
    def patches_per_epoch(self) -> int:
        """Patches in one pass over the evaluation set; 0 for data-only criteria."""
        return len(self.eval_set) if self.eval_set is not None else 0

    def score(
        self,
        params: ModelParams,
        comb: ChannelCombination,
        meter: Optional[AllocationMeter] = None,
    ) -> float:
        """Score of ``comb`` under the current shared parameters."""
        if self.criterion == "entropy":
            return entropy_score(self.entropies, comb)
        if self.criterion == "pca":
            return pca_score(self.correlation, comb)
        started = time.perf_counter()
        value = evaluate_ic(params, comb, self.eval_set, self.metric, self.batch_size, meter)
        with self._lock:
            self.seconds += time.perf_counter() - started
            self.batches += math.ceil(len(self.eval_set) / self.batch_size)
        return value
