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

"""Run configuration of a selection or training run."""

from dataclasses import asdict, dataclass, field, replace
from typing import List, Optional

from ..combinatorics import ChannelCombination
from ..exceptions import InvalidArgumentError
from .schedule import ScheduleConfig

STRATEGIES = ("progressive", "rank_once", "none")
CRITERIA = ("val_acc", "train_acc", "entropy", "pca")
INIT_MODES = ("random", "checkpoint")
METRICS = ("miou", "ma")


@dataclass
class InitConfig:
    """Parameter initialization: ``random`` from a seed or ``checkpoint`` from a file.

    A random init without its own seed uses the run seed.
    """

    mode: str = "random"
    seed: Optional[int] = None
    path: Optional[str] = None

    def validate(self) -> "InitConfig":
        """Check the mode and its argument."""
        if self.mode not in INIT_MODES:
            raise InvalidArgumentError(
                f"Unknown init mode '{self.mode}', expected {INIT_MODES}."
            )
        if self.mode == "checkpoint" and not self.path:
            raise InvalidArgumentError("Checkpoint init needs a path.")
        return self

    def label(self) -> str:
        """Short description used in reports."""
        if self.mode == "checkpoint":
            return f"checkpoint({self.path})"
        return "random" if self.seed is None else f"random({self.seed})"


@dataclass
class RunConfig:
    """Everything that determines one run, together with the dataset."""

    k: int = 3
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    strategy: str = "progressive"
    criterion: str = "val_acc"
    init: InitConfig = field(default_factory=InitConfig)
    metric: str = "miou"
    fixed: Optional[List[int]] = None
    batch_size: int = 8
    patch_size: int = 64
    seed: int = 0
    eval_workers: int = 1
    checkpoint_iterations: List[int] = field(default_factory=list)

    def validate(self) -> "RunConfig":
        """Check the field ranges and their combinations.

        Raises:
            InvalidArgumentError: If the configuration is illegal.
        """
        self.schedule.validate()
        self.init.validate()
        if self.strategy not in STRATEGIES:
            raise InvalidArgumentError(
                f"Unknown strategy '{self.strategy}', expected {STRATEGIES}."
            )
        if self.criterion not in CRITERIA:
            raise InvalidArgumentError(
                f"Unknown criterion '{self.criterion}', expected {CRITERIA}."
            )
        if self.metric not in METRICS:
            raise InvalidArgumentError(f"Unknown metric '{self.metric}', expected {METRICS}.")
        if self.k < 1:
            raise InvalidArgumentError(f"Subset size must be positive, got {self.k}.")
        if self.strategy == "none" and not self.fixed:
            raise InvalidArgumentError("Strategy 'none' trains a fixed combination; set 'fixed'.")
        if self.fixed is not None and len(self.fixed) != self.k:
            raise InvalidArgumentError(
                f"Fixed combination {self.fixed} does not have {self.k} channels."
            )
        if self.batch_size < 1 or self.patch_size < 1 or self.seed < 0 or self.eval_workers < 1:
            raise InvalidArgumentError(
                "batch_size, patch_size and eval_workers must be positive; seed non-negative."
            )
        return self

    @property
    def init_seed(self) -> int:
        """Seed of a random initialization."""
        return self.seed if self.init.seed is None else self.init.seed

    def fixed_combination(self, universe: int) -> Optional[ChannelCombination]:
        """The fixed combination, if any."""
        if self.fixed is None:
            return None
        return ChannelCombination.of(sorted(self.fixed), universe)

    def fixed_to(self, comb: ChannelCombination, seed: Optional[int] = None) -> "RunConfig":
        """Plain single-combination training of ``comb``."""
        return replace(
            self,
            k=comb.k,
            strategy="none",
            fixed=list(comb.channels),
            seed=self.seed if seed is None else seed,
        )

    def to_dict(self) -> dict:
        """JSON form."""
        data = asdict(self)
        data["schedule"] = self.schedule.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        """Build a configuration from its JSON form; missing fields keep defaults."""
        data = dict(data)
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise InvalidArgumentError(f"Unknown run configuration fields {sorted(unknown)}.")
        if "schedule" in data:
            data["schedule"] = ScheduleConfig(**data["schedule"])
        if "init" in data:
            data["init"] = InitConfig(**data["init"])
        return cls(**data)
