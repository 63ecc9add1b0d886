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

"""Supervised grid search results: one test accuracy per channel combination."""

import json
import logging
import os
from collections import Counter
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import pandas as pd

from ..combinatorics import ChannelCombination, combination_count, combination_from_index
from ..exceptions import FormatError, InvalidArgumentError
from .metrics import cap

logger = logging.getLogger(__name__)

COLUMNS = ["index", "accuracy"]


class SgsTable:
    """Accuracy of every k-of-n combination, keyed by combination index.

    The table is complete when it holds exactly ``C(n, k)`` rows. A table built
    from a run where some members failed is kept with ``partial`` set and the
    failed indices listed.
    """

    def __init__(
        self,
        universe: int,
        k: int,
        seed: int = 0,
        rows: Optional[Iterable[Tuple[int, float]]] = None,
        failed: Optional[Sequence[int]] = None,
    ):
        self.universe = universe
        self.k = k
        self.seed = seed
        self.failed = sorted(failed or [])
        self._data = pd.DataFrame(columns=COLUMNS).astype(
            {"index": "int64", "accuracy": "float64"}
        )
        for index, accuracy in rows or []:
            self.add(index, accuracy)

    @property
    def size(self) -> int:
        """Number of combinations the table should hold."""
        return combination_count(self.universe, self.k)

    @property
    def partial(self) -> bool:
        """True unless every combination has an accuracy."""
        return len(self._data) != self.size

    @property
    def data(self) -> pd.DataFrame:
        """Rows sorted by combination index."""
        return self._data.sort_values("index").reset_index(drop=True)

    def __len__(self) -> int:
        return len(self._data)

    def add(self, index: int, accuracy: float) -> None:
        """Record the accuracy of combination ``index``.

        Raises:
            InvalidArgumentError: If the index is out of range or already present.
        """
        if not 1 <= index <= self.size:
            raise InvalidArgumentError(f"Combination index {index} is outside [1, {self.size}].")
        if (self._data["index"] == index).any():
            raise InvalidArgumentError(f"Combination index {index} is already in the table.")
        row = pd.DataFrame({"index": [int(index)], "accuracy": [float(accuracy)]})
        self._data = pd.concat([self._data, row], ignore_index=True) if len(self._data) else row

    def accuracies(self) -> List[float]:
        """Accuracies in index order."""
        return self.data["accuracy"].tolist()

    def accuracy_of(self, index: int) -> float:
        """Accuracy of one combination.

        Raises:
            InvalidArgumentError: If the index has no row.
        """
        match = self._data.loc[self._data["index"] == index, "accuracy"]
        if match.empty:
            raise InvalidArgumentError(f"Combination index {index} is not in the table.")
        return float(match.iloc[0])

    def cap(self, accuracy: float) -> float:
        """CAP of ``accuracy`` against this table."""
        return cap(accuracy, self.accuracies())

    def combination(self, index: int) -> ChannelCombination:
        """Combination of a row."""
        return combination_from_index(self.universe, self.k, index)

    def top(self, count: int = 10, channel_names: Optional[Sequence[str]] = None) -> pd.DataFrame:
        """The ``count`` best rows with rank, channels and CAP.

        Ties in accuracy are listed by ascending index.
        """
        ranked = self.data.sort_values(["accuracy", "index"], ascending=[False, True]).head(count)
        values = self.accuracies()
        rows = []
        for rank, (index, accuracy) in enumerate(zip(ranked["index"], ranked["accuracy"]), 1):
            comb = self.combination(int(index))
            channels = comb.names(channel_names) if channel_names else comb.channels
            rows.append(
                {
                    "rank": rank,
                    "index": int(index),
                    "channels": " ".join(str(c) for c in channels),
                    "accuracy": float(accuracy),
                    "cap": cap(float(accuracy), values),
                }
            )
        return pd.DataFrame(rows, columns=["rank", "index", "channels", "accuracy", "cap"])

    def channel_frequency(self, count: int = 10) -> pd.Series:
        """How often each channel ordinal occurs among the ``count`` best rows."""
        counter: Counter = Counter()
        for index in self.top(count)["index"]:
            counter.update(self.combination(int(index)).channels)
        return pd.Series(
            [counter.get(c, 0) for c in range(1, self.universe + 1)],
            index=pd.Index(range(1, self.universe + 1), name="channel"),
            name="count",
        )

    def to_csv(self, path: str) -> None:
        """Write ``index,accuracy`` rows and a ``.json`` provenance sidecar."""
        self.data.to_csv(path, index=False, lineterminator="\n")
        with open(_sidecar(path), "w") as json_out:
            json.dump(self.provenance(), json_out, indent=2, sort_keys=True)
            json_out.write("\n")

    def provenance(self) -> Dict:
        """Seed and completeness of the table."""
        return {
            "universe": self.universe,
            "k": self.k,
            "seed": self.seed,
            "partial": self.partial,
            "failed": list(self.failed),
        }

    @classmethod
    def from_csv(cls, path: str) -> "SgsTable":
        """Read a table written by :meth:`to_csv`.

        Raises:
            FormatError: If the columns or the sidecar are missing.
        """
        sidecar = _sidecar(path)
        if not os.path.exists(sidecar):
            raise FormatError(f"Missing SGS provenance file {sidecar}")
        with open(sidecar) as json_in:
            meta = json.load(json_in)
        frame = pd.read_csv(path, float_precision="round_trip")
        if list(frame.columns) != COLUMNS:
            raise FormatError(f"Expected columns {COLUMNS} in {path}, got {list(frame.columns)}")
        rows = zip(frame["index"].astype(int), frame["accuracy"].astype(float))
        return cls(meta["universe"], meta["k"], meta["seed"], rows, meta.get("failed"))

    def __repr__(self) -> str:
        state = "partial" if self.partial else "complete"
        return f"SgsTable(n={self.universe}, k={self.k}, rows={len(self)}, {state})"


def _sidecar(path: str) -> str:
    return os.path.splitext(path)[0] + ".json"

