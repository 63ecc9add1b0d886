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

"""Principal component feature extraction."""

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from ..data.dataset import SegmentationDataset, pixel_matrix
from ..data.sample import McSample
from ..exceptions import InvalidArgumentError

logger = logging.getLogger(__name__)

# eigenvalues below this share of the largest one count as rank deficiency
RANK_TOLERANCE = 1e-10


@dataclass
class PcaModel:
    """Centre and component matrix of a fitted projection."""

    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    flagged: List[int] = field(default_factory=list)

    @property
    def m(self) -> int:
        """Number of output channels."""
        return self.components.shape[1]

    def project(self, sample: McSample) -> McSample:
        """Project one sample onto the components."""
        pixels = sample.values.reshape(sample.channels, -1).T.astype(np.float64)
        projected = (pixels - self.mean) @ self.components
        values = projected.T.reshape(self.m, sample.height, sample.width)
        return McSample(values=values.astype(np.float32), labels=sample.labels, name=sample.name)


def fit_pca(pixels: np.ndarray, m: int) -> PcaModel:
    """Fit ``m`` principal components to ``(N, C)`` pixel rows.

    Components are orthonormal and ordered by decreasing variance; each is
    signed so that its largest-magnitude coefficient is positive. Components
    beyond the numerical rank are zero and listed in ``flagged`` (1-based).
    """
    mean = pixels.mean(axis=0)
    centred = pixels - mean
    covariance = centred.T @ centred / pixels.shape[0]
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    order = np.argsort(eigenvalues)[::-1][:m]
    eigenvalues = eigenvalues[order]
    components = eigenvectors[:, order].copy()
    largest = eigenvalues[0] if eigenvalues.size else 0.0
    flagged = []
    for position in range(m):
        if largest <= 0 or eigenvalues[position] <= RANK_TOLERANCE * largest:
            components[:, position] = 0.0
            eigenvalues[position] = 0.0
            flagged.append(position + 1)
            continue
        pivot = int(np.argmax(np.abs(components[:, position])))
        if components[pivot, position] < 0:
            components[:, position] *= -1.0
    return PcaModel(
        mean=mean, components=components, explained_variance=eigenvalues, flagged=flagged
    )


def pca_extract(
    dataset: SegmentationDataset, m: int = 3
) -> Tuple[SegmentationDataset, PcaModel]:
    """Replace the channels of every split by ``m`` principal components.

    The covariance is estimated on a stride subsample of at most a million
    training pixels.

    Raises:
        InvalidArgumentError: If ``m`` exceeds the channel count or there are
            fewer than ``10 * C`` training pixels.
    """
    channels = dataset.n_channels
    if not 1 <= m <= channels:
        raise InvalidArgumentError(f"Cannot extract {m} components from {channels} channels.")
    pixels = pixel_matrix(dataset.train_pixels())
    if pixels.shape[0] < 10 * channels:
        raise InvalidArgumentError(
            f"PCA needs at least {10 * channels} training pixels, got {pixels.shape[0]}."
        )
    model = fit_pca(pixels, m)
    if model.flagged:
        logger.warning("pca rank_deficient components=%s action=zero_padded", model.flagged)
    total = float(pixels.var(axis=0).sum())
    logger.info(
        "pca m=%d explained=%.6f",
        m,
        float(model.explained_variance.sum()) / total if total > 0 else 0.0,
    )
    names = [f"pc{i}" for i in range(1, m + 1)]
    return dataset.transformed(model.project, names), model
