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

"""Stage boundaries, the learning-rate law and the pruning pause schedule."""

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import List, Tuple

from ..exceptions import InvalidArgumentError

# guards floor(f * T) against products such as 0.29 * 100 = 28.999999999999996
_FLOOR_EPS = 1e-9


class Stage(enum.Enum):
    """Training stage of an iteration."""

    SUPERNET_TRAINING = "supernet_training"
    PRUNING = "pruning"
    FINE_TUNING = "fine_tuning"


@dataclass
class ScheduleConfig:
    """Iteration budget and learning-rate settings of one run."""

    total_iterations: int = 2000
    fractions: Tuple[float, float, float] = (0.15, 0.35, 0.50)
    base_lr: float = 0.05
    poly_power: float = 0.9
    warmup_enabled: bool = True
    supernet_stage_enabled: bool = True

    def __post_init__(self) -> None:
        self.fractions = tuple(float(f) for f in self.fractions)

    def validate(self) -> "ScheduleConfig":
        """Check the schedule invariants.

        Raises:
            InvalidArgumentError: If a field is out of range.
        """
        if len(self.fractions) != 3 or any(f < 0 for f in self.fractions):
            raise InvalidArgumentError(f"Invalid stage fractions {self.fractions}.")
        if abs(sum(self.fractions) - 1.0) > 1e-9:
            raise InvalidArgumentError(f"Stage fractions {self.fractions} do not sum to 1.")
        if self.fractions[1] <= 0:
            raise InvalidArgumentError("The pruning stage needs a positive fraction.")
        if self.total_iterations < 20:
            raise InvalidArgumentError(
                f"Total iterations must be at least 20, got {self.total_iterations}."
            )
        if self.base_lr <= 0 or self.poly_power <= 0:
            raise InvalidArgumentError(
                f"Need base_lr > 0 and poly_power > 0, got {self.base_lr}, {self.poly_power}."
            )
        return self

    @property
    def warmup_end(self) -> int:
        """``floor(f1 * T)``: end of the warmup segment and of supernet training."""
        return math.floor(self.fractions[0] * self.total_iterations + _FLOOR_EPS)

    @property
    def pruning_start(self) -> int:
        """First pruning iteration; 0 when the supernet stage is disabled."""
        return self.warmup_end if self.supernet_stage_enabled else 0

    @property
    def pruning_end(self) -> int:
        """``floor((f1 + f2) * T)``."""
        return math.floor(
            (self.fractions[0] + self.fractions[1]) * self.total_iterations + _FLOOR_EPS
        )

    def to_dict(self) -> dict:
        """JSON form."""
        data = asdict(self)
        data["fractions"] = list(self.fractions)
        return data


def stage_of(iteration: int, config: ScheduleConfig) -> Stage:
    """Return the stage an iteration belongs to.

    Raises:
        InvalidArgumentError: If ``iteration`` is outside ``[0, T)``.
    """
    if not 0 <= iteration < config.total_iterations:
        raise InvalidArgumentError(
            f"Iteration {iteration} is outside [0, {config.total_iterations})."
        )
    if iteration < config.pruning_start:
        return Stage.SUPERNET_TRAINING
    if iteration < config.pruning_end:
        return Stage.PRUNING
    return Stage.FINE_TUNING


def lr_at(iteration: int, config: ScheduleConfig) -> float:
    """Learning rate of an iteration.

    Linear warmup from 0 to ``base_lr`` over ``[0, floor(f1*T))``, then poly
    decay to 0 at ``T`` over the remaining stages. Without warmup the poly law
    covers ``[0, T]``.
    """
    if not 0 <= iteration <= config.total_iterations:
        raise InvalidArgumentError(
            f"Iteration {iteration} is outside [0, {config.total_iterations}]."
        )
    start = config.warmup_end if config.warmup_enabled else 0
    if iteration < start:
        return config.base_lr * iteration / start
    remaining = 1.0 - (iteration - start) / (config.total_iterations - start)
    return config.base_lr * remaining**config.poly_power


@dataclass
class PruningPlan:
    """Iterations at which the pruning stage pauses to remove one IC each."""

    initial: int
    pauses: List[int] = field(default_factory=list)

    @property
    def n_pauses(self) -> int:
        """Number of pauses, one fewer than the initial IC count."""
        return len(self.pauses)

    def evaluations_at(self, pause: int) -> int:
        """Number of ICs evaluated at the 1-based ``pause``."""
        return self.initial - pause + 1

    @property
    def total_evaluations(self) -> int:
        """Evaluation-set passes over the whole pruning stage."""
        return sum(self.evaluations_at(j) for j in range(1, self.n_pauses + 1))


def pause_schedule(config: ScheduleConfig, initial: int) -> PruningPlan:
    """Spread ``initial - 1`` pauses uniformly over the pruning stage.

    Pause ``j`` sits at ``s + ceil(j * P / n)`` with ``s`` the pruning start,
    ``P`` the pruning length and ``n`` the pause count, so the last pause lands
    on the pruning-stage boundary.

    Raises:
        InvalidArgumentError: If fewer than 2 ICs are given or the pruning stage
            is shorter than the number of pauses.
    """
    if initial < 2:
        raise InvalidArgumentError(f"Pruning needs at least 2 ICs, got {initial}.")
    count = initial - 1
    start = config.pruning_start
    length = config.pruning_end - start
    if length < count:
        raise InvalidArgumentError(
            f"Pruning stage of {length} iterations cannot hold {count} pauses."
        )
    pauses = [start + (j * length + count - 1) // count for j in range(1, count + 1)]
    return PruningPlan(initial=initial, pauses=pauses)
