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

"""Dataclasses for recorded runs"""
import os
from dataclasses import dataclass
from datetime import datetime
from typing import Optional, Tuple

from .constants import NO_INDEX, RUNS_DIR, RunStatus


def cell_path(method: str, seed: int, variant: str = "", index: int = NO_INDEX) -> str:
    """Directory of one run relative to the result root.

    ``runs/<method>[/<variant>]/seed-<seed>[/index-<index>]``; the index level
    only exists for grid-search members.
    """
    parts = [RUNS_DIR, method]
    if variant:
        parts.append(variant)
    parts.append(f"seed-{seed}")
    if index != NO_INDEX:
        parts.append(f"index-{index:04d}")
    return os.path.join(*parts)


@dataclass
class RunRecord:
    """Dataclass for one run of an experiment"""

    method: str
    seed: int
    variant: str = ""
    index: int = NO_INDEX
    status: RunStatus = RunStatus.DONE
    accuracy: Optional[float] = None
    path: str = ""
    completed_at: Optional[datetime] = None

    def __post_init__(self) -> None:
        if not self.path:
            self.path = cell_path(self.method, self.seed, self.variant, self.index)

    @property
    def key(self) -> Tuple[str, str, int, int]:
        """Identity of the run within an experiment."""
        return self.method, self.variant, self.seed, self.index

    def __str__(self):
        ret = f"Run: {self.method}"
        if self.variant:
            ret += f" [{self.variant}]"
        ret += f" seed={self.seed}"
        if self.index != NO_INDEX:
            ret += f" index={self.index}"
        ret += f"\nStatus: {self.status.value}"
        if self.accuracy is not None:
            ret += f"\nAccuracy: {self.accuracy:.2f}"
        if self.completed_at:
            ret += f"\nCompleted at: {self.completed_at}"
        return ret
