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

"""Direct feeding: one training run on every channel."""

import logging
from dataclasses import dataclass
from typing import Optional

from ..combinatorics import ChannelCombination
from ..data.dataset import SegmentationDataset
from ..evaluation.metrics import MetricsReport
from ..selection.config import RunConfig
from ..selection.pipeline import OstaResult, evaluate_test, run_osta
from ..substrate.meter import AllocationMeter

logger = logging.getLogger(__name__)


@dataclass
class BaselineOutcome:
    """Trained combination of a baseline and its test figures."""

    method: str
    combination: ChannelCombination
    result: OstaResult
    report: MetricsReport

    @property
    def accuracy(self) -> float:
        """Test accuracy under the run metric."""
        return self.report.accuracy


def train_combination(
    method: str,
    comb: ChannelCombination,
    dataset: SegmentationDataset,
    train_config: RunConfig,
    seed: Optional[int] = None,
    meter: Optional[AllocationMeter] = None,
    checkpoint_dir: Optional[str] = None,
) -> BaselineOutcome:
    """Plain training of one combination followed by test evaluation."""
    config = train_config.fixed_to(comb, seed)
    result = run_osta(config, dataset, meter=meter, checkpoint_dir=checkpoint_dir)
    report = evaluate_test(result.params, comb, dataset, config)
    report.instrumentation = result.instrumentation
    logger.info(
        "method=%s combination=%s %s=%.4f", method, comb, config.metric, report.accuracy
    )
    return BaselineOutcome(method=method, combination=comb, result=result, report=report)


def run_df(
    dataset: SegmentationDataset,
    train_config: RunConfig,
    meter: Optional[AllocationMeter] = None,
    checkpoint_dir: Optional[str] = None,
) -> BaselineOutcome:
    """Train on all channels of ``dataset``; the network takes ``k_in = C``."""
    everything = ChannelCombination.of(range(1, dataset.n_channels + 1), dataset.n_channels)
    return train_combination(
        "df", everything, dataset, train_config, meter=meter, checkpoint_dir=checkpoint_dir
    )
