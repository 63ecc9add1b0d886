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

"""Weight-sharing supernet state, IC sampling, evaluation and pruning."""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Mapping, Optional

import numpy as np

from ..combinatorics import ChannelCombination, combination_from_index
from ..data.batching import PatchSet
from ..evaluation.confusion import ConfusionMatrix
from ..evaluation.metrics import metric_value
from ..exceptions import InvalidArgumentError, InvalidStateError
from ..substrate.checkpoint import Checkpoint
from ..substrate.meter import AllocationMeter
from ..substrate.model import ModelParams, predict
from ..substrate.optimizer import OptimizerState

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Elimination:
    """One removal: the pause it happened at, the removed IC and its score."""

    pause: int
    index: int
    score: float

    def to_row(self) -> List:
        """``pause,index,score`` CSV row."""
        return [self.pause, self.index, self.score]


@dataclass
class SupernetState:
    """Shared parameters plus the ICs still competing for selection."""

    params: ModelParams
    optimizer: OptimizerState
    remaining: List[ChannelCombination]
    universe: int
    k: int
    seed: int = 0
    key: int = 0
    iteration: int = 0
    eliminated: List[Elimination] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.remaining = sorted(self.remaining)
        if not self.remaining:
            raise InvalidStateError("A supernet needs at least one IC.")

    @property
    def remaining_indices(self) -> List[int]:
        """Indices of the remaining ICs, ascending."""
        return [c.index for c in self.remaining]

    def to_checkpoint(self) -> Checkpoint:
        """Snapshot for :func:`~osta_selection.substrate.save_checkpoint`."""
        return Checkpoint(
            params=self.params.copy(),
            optimizer=self.optimizer.copy(),
            seed=self.seed,
            iteration=self.iteration,
            universe=self.universe,
            k=self.k,
            remaining=self.remaining_indices,
            eliminated=[(e.pause, e.index, e.score) for e in self.eliminated],
        )

    @classmethod
    def from_checkpoint(cls, checkpoint: Checkpoint, key: int = 0) -> "SupernetState":
        """Rebuild a state saved with :meth:`to_checkpoint`."""
        return cls(
            params=checkpoint.params,
            optimizer=checkpoint.optimizer,
            remaining=[
                combination_from_index(checkpoint.universe, checkpoint.k, i)
                for i in checkpoint.remaining
            ],
            universe=checkpoint.universe,
            k=checkpoint.k,
            seed=checkpoint.seed,
            key=key,
            iteration=checkpoint.iteration,
            eliminated=[Elimination(p, i, s) for p, i, s in checkpoint.eliminated],
        )


def sample_ic(
    remaining: List[ChannelCombination], rng: np.random.Generator
) -> ChannelCombination:
    """Uniform draw of one remaining IC.

    Raises:
        InvalidStateError: If nothing remains.
    """
    if not remaining:
        raise InvalidStateError("Cannot sample from an empty IC set.")
    return remaining[int(rng.integers(len(remaining)))]


def evaluate_confusion(
    params: ModelParams,
    comb: Optional[ChannelCombination],
    eval_set: PatchSet,
    batch_size: int = 8,
    meter: Optional[AllocationMeter] = None,
) -> ConfusionMatrix:
    """Forward-only pass over ``eval_set``, accumulating one confusion matrix.

    Raises:
        InvalidArgumentError: If the evaluation set is empty.
    """
    if eval_set is None or len(eval_set) == 0:
        raise InvalidArgumentError("Cannot evaluate on an empty set.")
    conf = ConfusionMatrix(params.n_classes)
    for values, labels in eval_set.batches(comb, batch_size):
        conf.accumulate(predict(params, values, meter), labels)
    return conf


def evaluate_ic(
    params: ModelParams,
    ic: Optional[ChannelCombination],
    eval_set: PatchSet,
    metric: str = "miou",
    batch_size: int = 8,
    meter: Optional[AllocationMeter] = None,
) -> float:
    """Accuracy of the shared parameters fed with the channels of ``ic``.

    The parameters are only read.
    """
    return metric_value(evaluate_confusion(params, ic, eval_set, batch_size, meter), metric)


def prune_step(state: SupernetState, scores: Mapping[int, float], pause: int) -> SupernetState:
    """Remove the IC with the lowest score, recording the removal.

    Among tied lowest scores the IC with the largest index is removed. NaN
    scores count as the lowest possible.

    Raises:
        InvalidStateError: If fewer than 2 ICs remain.
        InvalidArgumentError: If the scores do not cover exactly the remaining ICs.
    """
    if len(state.remaining) < 2:
        raise InvalidStateError(f"Cannot prune with {len(state.remaining)} IC remaining.")
    if set(scores) != set(state.remaining_indices):
        raise InvalidArgumentError("Scores must cover exactly the remaining ICs.")

    def badness(comb: ChannelCombination):
        value = scores[comb.index]
        value = -math.inf if math.isnan(value) else value
        return (value, -comb.index)

    removed = min(state.remaining, key=badness)
    state.remaining = [c for c in state.remaining if c.index != removed.index]
    entry = Elimination(pause=pause, index=removed.index, score=float(scores[removed.index]))
    state.eliminated.append(entry)
    logger.info(
        "pause=%d removed=%d score=%.6f remaining=%d",
        pause,
        removed.index,
        entry.score,
        len(state.remaining),
    )
    return state
