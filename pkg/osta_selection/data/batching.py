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

"""Training windows and stacked evaluation patches."""

from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..combinatorics import ChannelCombination
from ..exceptions import InvalidArgumentError
from .sample import McSample, crop_patches


def _channel_positions(comb: Optional[ChannelCombination], channels: int) -> List[int]:
    if comb is None:
        return list(range(channels))
    if comb.channels[-1] > channels:
        raise InvalidArgumentError(f"Combination {comb} exceeds {channels} channels.")
    return [c - 1 for c in comb.channels]


def sample_batch(
    pool: Sequence[McSample],
    comb: Optional[ChannelCombination],
    batch_size: int,
    patch_size: int,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    """Draw ``batch_size`` random square windows from the pool.

    Each window picks a sample, then a top-left corner, from ``rng``. Only the
    channels of ``comb`` are gathered (all channels when ``comb`` is None).

    Returns:
        ``(values, labels)`` of shapes ``(B, k, p, p)`` and ``(B, p, p)``.
    """
    if not pool:
        raise InvalidArgumentError("Cannot draw a batch from an empty pool.")
    positions = _channel_positions(comb, pool[0].channels)
    values = np.empty((batch_size, len(positions), patch_size, patch_size), dtype=np.float32)
    labels = np.empty((batch_size, patch_size, patch_size), dtype=np.uint8)
    for item in range(batch_size):
        sample = pool[int(rng.integers(len(pool)))]
        if sample.height < patch_size or sample.width < patch_size:
            raise InvalidArgumentError(
                f"Sample {sample.name} is smaller than the {patch_size}px training window."
            )
        top = int(rng.integers(sample.height - patch_size + 1))
        left = int(rng.integers(sample.width - patch_size + 1))
        window = sample.values[:, top : top + patch_size, left : left + patch_size]
        values[item] = window[positions]
        labels[item] = sample.labels[top : top + patch_size, left : left + patch_size]
    return values, labels


@dataclass
class PatchSet:
    """Evaluation patches of a split, stacked once and gathered per combination."""

    values: np.ndarray
    labels: np.ndarray

    @classmethod
    def from_samples(cls, samples: Sequence[McSample], patch_size: int) -> "PatchSet":
        """Crop every sample into a grid of ``patch_size`` squares."""
        patches = [p for s in samples for p in crop_patches(s, patch_size, patch_size)]
        if not patches:
            raise InvalidArgumentError("Evaluation set is empty.")
        return cls(
            values=np.stack([p.values for p in patches]),
            labels=np.stack([p.labels for p in patches]),
        )

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def channels(self) -> int:
        """Channel count of the stacked patches."""
        return self.values.shape[1]

    def batches(
        self, comb: Optional[ChannelCombination], batch_size: int
    ) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        """Yield ``(values, labels)`` batches of at most ``batch_size`` patches."""
        positions = _channel_positions(comb, self.channels)
        for start in range(0, len(self), batch_size):
            stop = start + batch_size
            yield self.values[start:stop][:, positions], self.labels[start:stop]
