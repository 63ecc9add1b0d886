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

"""Per-class confusion counts."""

from typing import Optional

import numpy as np

from ..data.sample import IGNORE_LABEL
from ..exceptions import InvalidArgumentError


class ConfusionMatrix:
    """Pixel counts indexed by ``[actual class, predicted class]``."""

    def __init__(self, n_classes: int, counts: Optional[np.ndarray] = None):
        if n_classes < 1:
            raise InvalidArgumentError(f"Need at least one class, got {n_classes}.")
        if counts is None:
            counts = np.zeros((n_classes, n_classes), dtype=np.int64)
        counts = np.asarray(counts, dtype=np.int64)
        if counts.shape != (n_classes, n_classes) or (counts < 0).any():
            raise InvalidArgumentError(f"Invalid confusion counts of shape {counts.shape}.")
        self.n_classes = n_classes
        self.counts = counts.copy()

    @property
    def total(self) -> int:
        """Number of scored pixels."""
        return int(self.counts.sum())

    @property
    def true_positives(self) -> np.ndarray:
        """Diagonal counts per class."""
        return np.diag(self.counts)

    @property
    def actual(self) -> np.ndarray:
        """Labeled pixels per class (row sums)."""
        return self.counts.sum(axis=1)

    @property
    def predicted(self) -> np.ndarray:
        """Predicted pixels per class (column sums)."""
        return self.counts.sum(axis=0)

    def accumulate(self, predicted: np.ndarray, labels: np.ndarray) -> "ConfusionMatrix":
        """Add a prediction map; pixels labeled 255 are skipped.

        Raises:
            InvalidArgumentError: If the shapes differ or a class id is out of range.
        """
        predicted = np.asarray(predicted)
        labels = np.asarray(labels)
        if predicted.shape != labels.shape:
            raise InvalidArgumentError(
                f"Prediction shape {predicted.shape} does not match label shape {labels.shape}."
            )
        mask = labels != IGNORE_LABEL
        actual = labels[mask].astype(np.int64)
        guessed = predicted[mask].astype(np.int64)
        if actual.size == 0:
            return self
        if actual.max() >= self.n_classes or guessed.min() < 0 or guessed.max() >= self.n_classes:
            raise InvalidArgumentError(f"Class id outside [0, {self.n_classes}).")
        self.counts += np.bincount(
            actual * self.n_classes + guessed, minlength=self.n_classes**2
        ).reshape(self.n_classes, self.n_classes)
        return self

    def merge(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        """Return the sum of two matrices."""
        if other.n_classes != self.n_classes:
            raise InvalidArgumentError(
                f"Cannot merge {other.n_classes}-class counts into {self.n_classes} classes."
            )
        return ConfusionMatrix(self.n_classes, self.counts + other.counts)

    __add__ = merge

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ConfusionMatrix)
            and other.n_classes == self.n_classes
            and np.array_equal(other.counts, self.counts)
        )

    def to_list(self):
        """Nested list form for JSON."""
        return self.counts.tolist()

    @classmethod
    def from_list(cls, counts) -> "ConfusionMatrix":
        """Inverse of :meth:`to_list`."""
        counts = np.asarray(counts, dtype=np.int64)
        return cls(counts.shape[0], counts)

    def __repr__(self) -> str:
        return f"ConfusionMatrix(n_classes={self.n_classes}, total={self.total})"
