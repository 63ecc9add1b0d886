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

"""Marginal-entropy channel ranking."""

import logging

import numpy as np

from ..combinatorics import ChannelCombination
from ..data.dataset import SegmentationDataset
from ..exceptions import InvalidArgumentError
from ..selection.criteria import channel_entropies

logger = logging.getLogger(__name__)


def entropy_select(dataset: SegmentationDataset, m: int = 3) -> ChannelCombination:
    """The ``m`` channels of highest Shannon entropy on the training split.

    Entropy uses 256 equal-width bins over each channel's training range; equal
    entropies prefer the lower ordinal.

    Raises:
        InvalidArgumentError: If ``m`` is outside ``[1, C]``.
    """
    if not 1 <= m <= dataset.n_channels:
        raise InvalidArgumentError(f"Cannot select {m} of {dataset.n_channels} channels.")
    entropies = channel_entropies(dataset.train_pixels())
    ranked = np.argsort(-entropies, kind="stable")[:m]
    comb = ChannelCombination.of(sorted(int(c) + 1 for c in ranked), dataset.n_channels)
    logger.info(
        "entropy_select m=%d selected=%s bits=%s",
        m,
        comb,
        ",".join(f"{entropies[c - 1]:.4f}" for c in comb.channels),
    )
    return comb
