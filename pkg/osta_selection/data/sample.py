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

"""Multichannel samples and the pixel operations defined on them."""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..combinatorics import ChannelCombination
from ..exceptions import InvalidArgumentError

IGNORE_LABEL = 255


@dataclass(frozen=True)
class McSample:
    """A multichannel raster with per-pixel labels.

    ``values`` is channel-planar float32 with shape ``(C, H, W)``; ``labels`` is
    uint8 with shape ``(H, W)``, holding class ids or :data:`IGNORE_LABEL`.
    Both arrays are read-only once the sample is built.
    """

    values: np.ndarray
    labels: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        values = np.ascontiguousarray(self.values, dtype=np.float32)
        labels = np.ascontiguousarray(self.labels, dtype=np.uint8)
        if values.ndim != 3:
            raise InvalidArgumentError(f"Expected (C, H, W) values, got shape {values.shape}.")
        if labels.shape != values.shape[1:]:
            raise InvalidArgumentError(
                f"Label shape {labels.shape} does not match raster shape {values.shape[1:]}."
            )
        values.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)

    @property
    def channels(self) -> int:
        """Number of channels."""
        return self.values.shape[0]

    @property
    def height(self) -> int:
        """Height in pixels."""
        return self.values.shape[1]

    @property
    def width(self) -> int:
        """Width in pixels."""
        return self.values.shape[2]

    def validate_labels(self, n_classes: int) -> None:
        """Check that every non-ignore label is a valid class id.

        Raises:
            InvalidArgumentError: If a label is out of range.
        """
        scored = self.labels[self.labels != IGNORE_LABEL]
        if scored.size and int(scored.max()) >= n_classes:
            raise InvalidArgumentError(
                f"Sample '{self.name}' has label {int(scored.max())} "
                f"but only {n_classes} classes."
            )

    def class_histogram(self, n_classes: int) -> np.ndarray:
        """Return per-class pixel counts, ignoring :data:`IGNORE_LABEL`."""
        scored = self.labels[self.labels != IGNORE_LABEL]
        return np.bincount(scored.ravel(), minlength=n_classes)[:n_classes]

    def labeled_pixels(self) -> int:
        """Number of non-ignore pixels."""
        return int(np.count_nonzero(self.labels != IGNORE_LABEL))

    def window(
        self, top: int, left: int, height: int, width: int, name: Optional[str] = None
    ) -> "McSample":
        """Return the sub-raster starting at ``(top, left)``."""
        return McSample(
            values=self.values[:, top : top + height, left : left + width],
            labels=self.labels[top : top + height, left : left + width],
            name=self.name if name is None else name,
        )

    def equals(self, other: "McSample") -> bool:
        """Bit-level equality of values and labels."""
        return (
            self.values.shape == other.values.shape
            and self.values.tobytes() == other.values.tobytes()
            and self.labels.tobytes() == other.labels.tobytes()
        )


def crop_patches(sample: McSample, patch_h: int, patch_w: int) -> List[McSample]:
    """Cut a sample into non-overlapping patches.

    Patches follow a row-major grid; remainder rows and columns that do not fill
    a whole patch are dropped.

    Raises:
        InvalidArgumentError: If the patch is larger than the sample.
    """
    if patch_h <= 0 or patch_w <= 0:
        raise InvalidArgumentError(f"Patch size must be positive, got {patch_h}x{patch_w}.")
    if patch_h > sample.height or patch_w > sample.width:
        raise InvalidArgumentError(
            f"Patch {patch_h}x{patch_w} is larger than sample {sample.height}x{sample.width}."
        )
    patches = []
    for row in range(sample.height // patch_h):
        for col in range(sample.width // patch_w):
            patches.append(
                sample.window(
                    row * patch_h,
                    col * patch_w,
                    patch_h,
                    patch_w,
                    name=f"{sample.name}[{row},{col}]",
                )
            )
    return patches


def select_channels(sample: McSample, comb: ChannelCombination) -> McSample:
    """Gather the channels of ``comb`` in order; labels are shared unchanged.

    Raises:
        InvalidArgumentError: If an ordinal exceeds the sample's channel count.
    """
    if comb.channels[-1] > sample.channels:
        raise InvalidArgumentError(
            f"Combination {comb} needs channel {comb.channels[-1]} "
            f"but the sample has {sample.channels}."
        )
    planes = np.take(sample.values, [c - 1 for c in comb.channels], axis=0)
    return McSample(values=planes, labels=sample.labels, name=sample.name)
