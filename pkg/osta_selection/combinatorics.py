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

"""
=============================================================
Channel combinations (:mod:`osta_selection.combinatorics`)
=============================================================

.. currentmodule:: osta_selection.combinatorics

Channel combinations are sorted k-subsets of 1-based channel ordinals. They are
ranked in lexicographic order starting at 1, so that combination ``{1, 2, 3}``
has index 1 and ``{n-2, n-1, n}`` has index ``C(n, k)``. Ranking and unranking
use the combinatorial number system and never enumerate.

.. autosummary::
    :toctree: ../stubs/

    ChannelCombination
    enumerate_combinations
    combination_index
    combination_from_index
"""

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

from .exceptions import InvalidArgumentError

MAX_CHANNELS = 64

# Channel orders of the benchmark sensors, used to render combinations by name.
BAND_ORDERS = {
    "l7": ("B", "G", "R", "NIR", "SWIR", "TLG", "THG", "MIR"),
    "l8": ("CA", "B", "G", "R", "NIR", "SWIR1", "SWIR2", "C", "T1", "T2"),
    "rit18": ("B", "G", "R", "NIR1", "NIR2", "NIR3"),
    "semantic3d": ("R", "G", "B", "I", "Z", "D", "Ze", "De"),
}


@dataclass(frozen=True, order=True)
class ChannelCombination:
    """A sorted subset of 1-based channel ordinals drawn from ``universe`` channels.

    Instances order by their lexicographic index, which is how every table of
    this package lists them.
    """

    index: int
    channels: Tuple[int, ...]
    universe: int

    def __post_init__(self) -> None:
        _check_channels(self.channels, self.universe)
        expected = _rank(self.channels, self.universe)
        if self.index != expected:
            raise InvalidArgumentError(
                f"Index {self.index} does not match channels {self.channels} "
                f"(expected {expected})."
            )

    @classmethod
    def of(cls, channels: Sequence[int], universe: int) -> "ChannelCombination":
        """Build a combination from its channel ordinals, computing the index."""
        channels = tuple(int(c) for c in channels)
        _check_channels(channels, universe)
        return cls(index=_rank(channels, universe), channels=channels, universe=universe)

    @property
    def k(self) -> int:
        """Number of channels in the combination."""
        return len(self.channels)

    def names(self, channel_names: Sequence[str]) -> Tuple[str, ...]:
        """Return the channel names of this combination under the given channel order."""
        if len(channel_names) != self.universe:
            raise InvalidArgumentError(
                f"Expected {self.universe} channel names, got {len(channel_names)}."
            )
        return tuple(channel_names[c - 1] for c in self.channels)

    def to_row(self) -> List[int]:
        """Return the ``index,ch1,ch2,...`` CSV row of this combination."""
        return [self.index, *self.channels]

    def __str__(self) -> str:
        return f"{self.index}:{{{','.join(str(c) for c in self.channels)}}}"


def _check_size(n: int, k: int) -> None:
    if not 1 <= n <= MAX_CHANNELS:
        raise InvalidArgumentError(
            f"Channel count {n} is outside [1, {MAX_CHANNELS}]."
        )
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"Subset size {k} is outside [1, {n}].")


def _check_channels(channels: Sequence[int], universe: int) -> None:
    _check_size(universe, len(channels))
    previous = 0
    for channel in channels:
        if channel <= previous or channel > universe:
            raise InvalidArgumentError(
                f"Channels {tuple(channels)} are not strictly increasing "
                f"ordinals in [1, {universe}]."
            )
        previous = channel


def _rank(channels: Sequence[int], n: int) -> int:
    k = len(channels)
    rank = 1
    previous = 0
    for position, channel in enumerate(channels, start=1):
        # count subsets whose element at this position is smaller
        for skipped in range(previous + 1, channel):
            rank += math.comb(n - skipped, k - position)
        previous = channel
    return rank


def iter_combinations(n: int, k: int) -> Iterator[ChannelCombination]:
    """Lazily yield the combinations of :func:`enumerate_combinations`."""
    _check_size(n, k)
    for index, channels in enumerate(itertools.combinations(range(1, n + 1), k), 1):
        yield ChannelCombination(index=index, channels=channels, universe=n)


def enumerate_combinations(n: int, k: int) -> List[ChannelCombination]:
    """Return all k-of-n combinations in ascending lexicographic order.

    Args:
        n: Total channel count, at most 64.
        k: Subset size.

    Returns:
        ``C(n, k)`` combinations; the i-th element has index i.

    Raises:
        InvalidArgumentError: If ``k`` is zero or exceeds ``n``.
    """
    return list(iter_combinations(n, k))


def combination_index(comb: ChannelCombination) -> int:
    """Return the 1-based lexicographic rank of ``comb``.

    Raises:
        InvalidArgumentError: If ``comb`` is malformed.
    """
    _check_channels(comb.channels, comb.universe)
    return _rank(comb.channels, comb.universe)


def combination_from_index(n: int, k: int, idx: int) -> ChannelCombination:
    """Return the combination of rank ``idx`` among the k-of-n combinations.

    Raises:
        InvalidArgumentError: If ``idx`` is outside ``[1, C(n, k)]``.
    """
    _check_size(n, k)
    total = math.comb(n, k)
    if not 1 <= idx <= total:
        raise InvalidArgumentError(f"Index {idx} is outside [1, {total}].")
    remaining = idx
    channels = []
    value = 1
    for position in range(1, k + 1):
        while True:
            block = math.comb(n - value, k - position)
            if remaining <= block:
                break
            remaining -= block
            value += 1
        channels.append(value)
        value += 1
    return ChannelCombination(index=idx, channels=tuple(channels), universe=n)


def combination_count(n: int, k: int) -> int:
    """Return ``C(n, k)`` after validating the sizes."""
    _check_size(n, k)
    return math.comb(n, k)


def parse_combination(
    text: str, universe: int, channel_names: Optional[Sequence[str]] = None
) -> ChannelCombination:
    """Parse ``"1,3,5"`` (ordinals) or ``"R,B,De"`` (names) into a combination."""
    tokens = [token.strip() for token in text.split(",") if token.strip()]
    if not tokens:
        raise InvalidArgumentError("Empty combination.")
    if all(token.isdigit() for token in tokens):
        return ChannelCombination.of(sorted(int(t) for t in tokens), universe)
    if channel_names is None:
        raise InvalidArgumentError(f"Cannot resolve channel names in '{text}'.")
    lookup = {name: ordinal for ordinal, name in enumerate(channel_names, 1)}
    try:
        ordinals = sorted(lookup[token] for token in tokens)
    except KeyError as err:
        raise InvalidArgumentError(f"Unknown channel name {err} in '{text}'.") from None
    return ChannelCombination.of(ordinals, universe)
