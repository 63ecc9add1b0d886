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

"""Tracked allocation counter backing the RAM metric."""

import threading
from contextlib import contextmanager
from typing import Dict, Iterator, Optional

from ..exceptions import InvalidStateError


class AllocationMeter:
    """Counts live tensor bytes and remembers the peak reached in each labeled phase.

    Only tensors registered through :meth:`allocate` and :meth:`release` are
    counted, so the figures are exact and independent of the host allocator.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._current = 0
        self._phase: Optional[str] = None
        self._peaks: Dict[str, int] = {}

    @property
    def current(self) -> int:
        """Live bytes."""
        return self._current

    @property
    def peaks(self) -> Dict[str, int]:
        """Peak live bytes per phase label."""
        with self._lock:
            return dict(self._peaks)

    def peak(self, label: Optional[str] = None) -> int:
        """Peak of one phase, or the overall peak when ``label`` is omitted."""
        peaks = self.peaks
        if label is None:
            return max(peaks.values(), default=0)
        return peaks.get(label, 0)

    def allocate(self, nbytes: int) -> None:
        """Register ``nbytes`` of new live tensors."""
        with self._lock:
            self._current += int(nbytes)
            if self._phase is not None:
                self._peaks[self._phase] = max(self._peaks.get(self._phase, 0), self._current)

    def release(self, nbytes: int) -> None:
        """Unregister ``nbytes`` of tensors.

        Raises:
            InvalidStateError: If more bytes are released than are live.
        """
        with self._lock:
            if nbytes > self._current:
                raise InvalidStateError(
                    f"Releasing {nbytes} bytes with only {self._current} live."
                )
            self._current -= int(nbytes)

    def merge_peak(self, label: str, nbytes: int) -> None:
        """Fold a peak observed by another meter into phase ``label``."""
        with self._lock:
            self._peaks[label] = max(self._peaks.get(label, 0), int(nbytes))

    @contextmanager
    def phase(self, label: str) -> Iterator["AllocationMeter"]:
        """Attribute allocations made inside the block to ``label``."""
        with self._lock:
            previous = self._phase
            self._phase = label
            self._peaks.setdefault(label, self._current)
        try:
            yield self
        finally:
            with self._lock:
                self._phase = previous

    def __str__(self) -> str:
        peaks = " ".join(f"{label}={value}" for label, value in sorted(self.peaks.items()))
        return f"AllocationMeter(current={self._current} {peaks})"
