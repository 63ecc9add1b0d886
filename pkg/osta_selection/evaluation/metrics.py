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

"""Segmentation accuracy, selection quality and efficiency metrics.

Accuracies are percentages. ``CAP`` places an accuracy inside the accuracy
distribution of a supervised grid search; ``DCA`` compares the accuracy of the
selected combination with its grid-search accuracy; ``RAT`` and ``RAM`` are the
extra time and memory of a selection run over one direct training run.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..combinatorics import ChannelCombination
from ..exceptions import InvalidArgumentError, InvalidStateError, UndefinedMetricError
from .confusion import ConfusionMatrix

logger = logging.getLogger(__name__)

METRICS = ("miou", "ma")


def per_class_accuracy(conf: ConfusionMatrix) -> np.ndarray:
    """``TP_c / points_c`` per class; NaN for classes without labeled pixels."""
    actual = conf.actual.astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(actual > 0, conf.true_positives / actual, np.nan)


def per_class_iou(conf: ConfusionMatrix) -> np.ndarray:
    """``TP_c / (TP_c + FP_c + FN_c)`` per class; NaN where the denominator is 0."""
    union = (conf.actual + conf.predicted - conf.true_positives).astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(union > 0, conf.true_positives / union, np.nan)


def _mean_percent(values: np.ndarray, name: str) -> float:
    defined = values[~np.isnan(values)]
    if defined.size == 0:
        raise UndefinedMetricError(f"{name} is undefined: no class has scored pixels.")
    return float(defined.mean() * 100.0)


def mean_accuracy(conf: ConfusionMatrix) -> float:
    """Mean per-class accuracy (mA) in percent, over classes present in the labels.

    Raises:
        UndefinedMetricError: If no class has labeled pixels.
    """
    return _mean_percent(per_class_accuracy(conf), "mA")


def mean_iou(conf: ConfusionMatrix) -> float:
    """Mean intersection over union (mIoU) in percent, over non-degenerate classes.

    Raises:
        UndefinedMetricError: If every class has ``TP + FP + FN = 0``.
    """
    return _mean_percent(per_class_iou(conf), "mIoU")


def pixel_accuracy(conf: ConfusionMatrix) -> float:
    """Share of correctly classified pixels in percent."""
    if conf.total == 0:
        raise UndefinedMetricError("Pixel accuracy is undefined without scored pixels.")
    return float(conf.true_positives.sum() / conf.total * 100.0)


def metric_value(conf: ConfusionMatrix, metric: str) -> float:
    """Value of ``metric`` (``miou`` or ``ma``)."""
    if metric == "miou":
        return mean_iou(conf)
    if metric == "ma":
        return mean_accuracy(conf)
    raise InvalidArgumentError(f"Unknown metric '{metric}', expected one of {METRICS}.")


def cap(accuracy: float, sgs_accuracies: Sequence[float]) -> float:
    """Combination accuracy percentile of ``accuracy`` within a grid-search table.

    At a value ``v`` of the table the percentile is the share of entries ``<= v``.
    Between two neighbouring table values it is interpolated linearly; above
    the maximum it is 100 and below the minimum 0.

    Raises:
        InvalidArgumentError: If the table is empty.
    """
    values = np.sort(np.asarray(list(sgs_accuracies), dtype=np.float64))
    if values.size == 0:
        raise InvalidArgumentError("Cannot compute CAP against an empty table.")
    total = values.size
    if accuracy >= values[-1]:
        return 100.0
    if accuracy < values[0]:
        return 0.0

    def at(value: float) -> float:
        return 100.0 * np.searchsorted(values, value, side="right") / total

    upper_pos = np.searchsorted(values, accuracy, side="left")
    if values[upper_pos] == accuracy:
        return float(at(accuracy))
    upper = values[upper_pos]
    lower = values[upper_pos - 1]
    weight = (accuracy - lower) / (upper - lower)
    return float(at(lower) + weight * (at(upper) - at(lower)))


def dca(
    osta_accuracy: float,
    sgs_accuracy: float,
    osta_comb: Optional[ChannelCombination] = None,
    sgs_comb: Optional[ChannelCombination] = None,
) -> float:
    """Difference in combination accuracy, in percentage points.

    Raises:
        InvalidArgumentError: If both combinations are given and differ.
    """
    if osta_comb is not None and sgs_comb is not None and osta_comb != sgs_comb:
        raise InvalidArgumentError(
            f"DCA compares {osta_comb} with a different combination {sgs_comb}."
        )
    return float(osta_accuracy - sgs_accuracy)


def pruning_epoch_total(initial: int) -> int:
    """Evaluation-set epochs of progressive pruning from ``initial`` ICs.

    Raises:
        InvalidArgumentError: If fewer than 2 ICs are given.
    """
    if initial < 2:
        raise InvalidArgumentError(f"Pruning needs at least 2 ICs, got {initial}.")
    return initial * (initial + 1) // 2 - 1


def estimate_rat(
    patches_per_epoch: int,
    epoch_total: int,
    batch_size: int,
    train_iters: int,
    time_ratio_pct: float,
) -> float:
    """Estimated extra training time in percent.

    The pruning passes amount to ``patches_per_epoch * epoch_total / batch_size``
    forward-only iterations; relative to ``train_iters`` they are weighted by the
    time of a forward-only iteration as a percentage of a training iteration.
    """
    if min(patches_per_epoch, epoch_total, batch_size, train_iters) <= 0 or time_ratio_pct < 0:
        raise InvalidArgumentError("RAT estimation inputs must be positive.")
    equivalent = patches_per_epoch * epoch_total / batch_size
    return equivalent / train_iters * time_ratio_pct


@dataclass
class RunInstrumentation:
    """Wall time and peak tracked allocation of one training run."""

    wall_seconds: Optional[float] = None
    peak_bytes: Optional[int] = None
    stage_seconds: Dict[str, float] = field(default_factory=dict)
    peaks: Dict[str, int] = field(default_factory=dict)
    train_iterations: int = 0
    train_seconds: float = 0.0
    eval_batches: int = 0
    eval_seconds: float = 0.0

    @property
    def time_ratio_pct(self) -> Optional[float]:
        """Seconds per forward-only batch as a percentage of a training iteration."""
        if not self.eval_batches or not self.train_iterations or not self.train_seconds:
            return None
        per_eval = self.eval_seconds / self.eval_batches
        per_train = self.train_seconds / self.train_iterations
        return per_eval / per_train * 100.0

    def to_dict(self) -> dict:
        """JSON form."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunInstrumentation":
        """Inverse of :meth:`to_dict`."""
        return cls(**data)


def _relative_percent(value, reference, what: str) -> float:
    if value is None or reference is None or not reference:
        raise InvalidStateError(f"Missing {what} instrumentation.")
    return round((value / reference - 1.0) * 100.0, 1)


def measure_rat(osta: RunInstrumentation, direct: RunInstrumentation) -> float:
    """Measured extra wall time of ``osta`` over ``direct``, in percent to 0.1.

    Raises:
        InvalidStateError: If either run lacks timings.
    """
    return _relative_percent(osta.wall_seconds, direct.wall_seconds, "timing")


def measure_ram(osta: RunInstrumentation, direct: RunInstrumentation) -> float:
    """Measured extra peak allocation of ``osta`` over ``direct``, in percent to 0.1.

    Raises:
        InvalidStateError: If either run lacks allocation peaks.
    """
    return _relative_percent(osta.peak_bytes, direct.peak_bytes, "allocation")


def mrc_summary(cap_values: Sequence[float]) -> Tuple[float, float]:
    """Mean and sample standard deviation of CAP values, to 2 decimals.

    Raises:
        InvalidArgumentError: If fewer than 2 values are given.
    """
    series = pd.Series(list(cap_values), dtype="float64")
    if len(series) < 2:
        raise InvalidArgumentError(f"MRC needs at least 2 runs, got {len(series)}.")
    return round(float(series.mean()), 2), round(float(series.std(ddof=1)), 2)


@dataclass
class MetricsReport:
    """Accuracy and efficiency figures of one run."""

    metric: str
    accuracy: float
    ma: float
    miou: float
    pixel_accuracy: float
    per_class_accuracy: List[Optional[float]]
    per_class_iou: List[Optional[float]]
    confusion: List[List[int]]
    cap: Optional[float] = None
    dca: Optional[float] = None
    rat_estimated: Optional[float] = None
    rat_measured: Optional[float] = None
    ram_measured: Optional[float] = None
    instrumentation: Optional[RunInstrumentation] = None

    @classmethod
    def from_confusion(cls, conf: ConfusionMatrix, metric: str = "miou") -> "MetricsReport":
        """Accuracy figures of a confusion matrix."""

        def optional(values: np.ndarray) -> List[Optional[float]]:
            return [None if np.isnan(v) else float(v) * 100.0 for v in values]

        return cls(
            metric=metric,
            accuracy=metric_value(conf, metric),
            ma=mean_accuracy(conf),
            miou=mean_iou(conf),
            pixel_accuracy=pixel_accuracy(conf),
            per_class_accuracy=optional(per_class_accuracy(conf)),
            per_class_iou=optional(per_class_iou(conf)),
            confusion=conf.to_list(),
        )

    def to_dict(self) -> dict:
        """JSON form."""
        data = asdict(self)
        if self.instrumentation is not None:
            data["instrumentation"] = self.instrumentation.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "MetricsReport":
        """Inverse of :meth:`to_dict`."""
        data = dict(data)
        if data.get("instrumentation") is not None:
            data["instrumentation"] = RunInstrumentation.from_dict(data["instrumentation"])
        return cls(**data)
