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

"""Registry of the runs of an experiment, kept next to the result tree."""

# pylint treats the dataframes as JsonReader for some reason
# pylint: disable=no-member

import logging
import os
import threading
from typing import List, Optional

import pandas as pd

from ..service.constants import METRICS_FILE, NO_INDEX, REGISTRY_FILE, RunStatus
from ..service.experiment_dataclasses import RunRecord
from ..service.utils import str_to_utc

logger = logging.getLogger(__name__)


class LocalRunStore:
    """Client for the run registry of one result tree."""

    registry_columns = [
        "method",
        "variant",
        "seed",
        "index",
        "status",
        "accuracy",
        "path",
        "completed_at",
    ]
    key_columns = ["method", "variant", "seed", "index"]

    def __init__(self, main_dir: str, local_save: bool = True) -> None:
        """LocalRunStore constructor.

        Args:
            main_dir: Root of the result tree holding the registry file.
            local_save: Whether to store the registry on disk or not.
        """
        self._lock = threading.Lock()
        self._local_save = local_save
        self.set_paths(main_dir)
        if local_save:
            os.makedirs(self.main_dir, exist_ok=True)
        self.init_db()

    def set_paths(self, main_dir: str) -> None:
        """Creates the path to the registry file"""
        self.main_dir = main_dir
        self.registry_file = os.path.join(main_dir, REGISTRY_FILE)

    def init_db(self) -> None:
        """Initializes the registry"""
        if self._local_save and os.path.exists(self.registry_file):
            runs = pd.read_json(
                self.registry_file, orient="records", dtype=False, convert_dates=False
            )
            self._runs = runs.reindex(columns=self.registry_columns)
        else:
            self._runs = pd.DataFrame(columns=self.registry_columns)

    def save(self) -> None:
        """Saves the registry to disk"""
        if self._local_save:
            ordered = self._runs.sort_values(self.key_columns).reset_index(drop=True)
            ordered.to_json(self.registry_file, orient="records", indent=2)

    def _mask(self, method: str, variant: str, seed: int, index: int) -> pd.Series:
        runs = self._runs
        return (
            (runs.method == method)
            & (runs.variant == variant)
            & (runs.seed == seed)
            & (runs["index"] == index)
        )

    def record(self, run: RunRecord) -> None:
        """Insert or replace the registry row of ``run``."""
        row = {
            "method": run.method,
            "variant": run.variant,
            "seed": int(run.seed),
            "index": int(run.index),
            "status": run.status.value,
            "accuracy": run.accuracy,
            "path": run.path.replace(os.sep, "/"),
            "completed_at": run.completed_at.isoformat() if run.completed_at else None,
        }
        with self._lock:
            runs = self._runs.loc[~self._mask(*run.key)]
            new_df = pd.DataFrame([row], columns=self.registry_columns)
            self._runs = pd.concat([runs, new_df], ignore_index=True) if len(runs) else new_df
            self.save()
        logger.debug("registry run=%s status=%s", run.path, run.status.value)

    def get(
        self, method: str, seed: int, variant: str = "", index: int = NO_INDEX
    ) -> Optional[RunRecord]:
        """The registry row of one run, if recorded."""
        with self._lock:
            match = self._runs.loc[self._mask(method, variant, seed, index)]
        if match.empty:
            return None
        return self._to_record(match.iloc[0])

    def is_complete(self, method: str, seed: int, variant: str = "", index: int = NO_INDEX) -> bool:
        """Whether a run finished and its metrics file is still on disk."""
        run = self.get(method, seed, variant, index)
        if run is None or run.status is not RunStatus.DONE:
            return False
        return os.path.isfile(os.path.join(self.main_dir, run.path, METRICS_FILE))

    def runs(
        self,
        method: Optional[str] = None,
        variant: Optional[str] = None,
        seed: Optional[int] = None,
        status: Optional[RunStatus] = None,
    ) -> List[RunRecord]:
        """Recorded runs, with optional filtering, sorted by method, variant, seed and index."""
        with self._lock:
            df = self._runs
        if method is not None:
            df = df.loc[df.method == method]
        if variant is not None:
            df = df.loc[df.variant == variant]
        if seed is not None:
            df = df.loc[df.seed == seed]
        if status is not None:
            df = df.loc[df.status == status.value]
        df = df.sort_values(self.key_columns)
        return [self._to_record(row) for _, row in df.iterrows()]

    def delete(self, method: str, seed: int, variant: str = "", index: int = NO_INDEX) -> bool:
        """Remove the row of one run; returns whether it existed."""
        with self._lock:
            mask = self._mask(method, variant, seed, index)
            if not mask.any():
                return False
            self._runs = self._runs.loc[~mask].reset_index(drop=True)
            self.save()
        return True

    @staticmethod
    def _to_record(row: pd.Series) -> RunRecord:
        accuracy = row["accuracy"]
        return RunRecord(
            method=row["method"],
            seed=int(row["seed"]),
            variant=row["variant"] if isinstance(row["variant"], str) else "",
            index=int(row["index"]),
            status=RunStatus(row["status"]),
            accuracy=None if pd.isna(accuracy) else float(accuracy),
            path=row["path"].replace("/", os.sep),
            completed_at=str_to_utc(row["completed_at"]),
        )
