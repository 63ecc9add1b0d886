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

"""Tests for channel combination ranking."""

import itertools
import math

from test.osta_test_case import OstaTestCase

from osta_selection.combinatorics import (
    BAND_ORDERS,
    ChannelCombination,
    combination_count,
    combination_from_index,
    combination_index,
    enumerate_combinations,
    parse_combination,
)
from osta_selection.exceptions import InvalidArgumentError


class TestCombinatorics(OstaTestCase):
    """Test lexicographic ranking of channel combinations."""

    def test_reference_indices(self):
        """Test indices reported for the benchmark sensors."""
        cases = [
            (8, (4, 6, 7), 50),
            (8, (6, 7, 8), 56),
            (8, (1, 2, 7), 5),
            (10, (1, 2, 3), 1),
            (10, (1, 2, 4), 2),
            (10, (1, 2, 5), 3),
            (8, (1, 3, 8), 11),
            (8, (2, 7, 8), 36),
            (8, (3, 7, 8), 46),
            (8, (5, 7, 8), 55),
        ]
        for universe, channels, index in cases:
            with self.subTest(universe=universe, channels=channels):
                comb = ChannelCombination.of(channels, universe)
                self.assertEqual(comb.index, index)
                self.assertEqual(combination_index(comb), index)
                self.assertEqual(combination_from_index(universe, 3, index).channels, channels)

    def test_named_channels(self):
        """Test rendering and parsing combinations by channel name."""
        comb = combination_from_index(8, 3, 50)
        self.assertEqual(comb.names(BAND_ORDERS["l7"]), ("NIR", "TLG", "THG"))
        parsed = parse_combination("De, R ,B", 8, BAND_ORDERS["semantic3d"])
        self.assertEqual(parsed.channels, (1, 3, 8))
        self.assertEqual(parsed.index, 11)
        self.assertEqual(parse_combination("7,4,6", 8).index, 50)

    def test_parse_errors(self):
        """Test malformed combination text."""
        with self.assertRaises(InvalidArgumentError):
            parse_combination("", 8)
        with self.assertRaises(InvalidArgumentError):
            parse_combination("R,G,B", 8)
        with self.assertRaises(InvalidArgumentError):
            parse_combination("R,G,X", 8, BAND_ORDERS["semantic3d"])
        with self.assertRaises(InvalidArgumentError):
            parse_combination("1,1,2", 8)

    def test_round_trip_small_universes(self):
        """Test ranking and unranking agree with enumeration."""
        for n in range(1, 13):
            for k in range(1, n + 1):
                combos = enumerate_combinations(n, k)
                self.assertEqual(len(combos), math.comb(n, k))
                self.assertEqual(combination_count(n, k), len(combos))
                expected = list(itertools.combinations(range(1, n + 1), k))
                self.assertEqual([c.channels for c in combos], expected)
                for position, comb in enumerate(combos, 1):
                    self.assertEqual(comb.index, position)
                    self.assertEqual(combination_from_index(n, k, position), comb)

    def test_first_and_last(self):
        """Test the extreme ranks of the 64 channel limit."""
        first = combination_from_index(64, 5, 1)
        self.assertEqual(first.channels, (1, 2, 3, 4, 5))
        total = combination_count(64, 5)
        last = combination_from_index(64, 5, total)
        self.assertEqual(last.channels, (60, 61, 62, 63, 64))
        middle = ChannelCombination.of((3, 17, 40, 41, 64), 64)
        self.assertEqual(combination_from_index(64, 5, middle.index), middle)

    def test_order_follows_index(self):
        """Test that combinations sort by index."""
        combos = enumerate_combinations(6, 2)
        self.assertEqual(sorted(reversed(combos)), combos)
        self.assertEqual(str(combos[0]), "1:{1,2}")
        self.assertEqual(combos[-1].to_row(), [15, 5, 6])

    def test_invalid_arguments(self):
        """Test rejection of out of range sizes and indices."""
        with self.assertRaises(InvalidArgumentError):
            enumerate_combinations(8, 0)
        with self.assertRaises(InvalidArgumentError):
            enumerate_combinations(3, 4)
        with self.assertRaises(InvalidArgumentError):
            enumerate_combinations(65, 3)
        with self.assertRaises(InvalidArgumentError):
            combination_from_index(8, 3, 0)
        with self.assertRaises(InvalidArgumentError):
            combination_from_index(8, 3, 57)
        with self.assertRaises(InvalidArgumentError):
            ChannelCombination.of((3, 2), 8)
        with self.assertRaises(InvalidArgumentError):
            ChannelCombination.of((1, 9), 8)
        with self.assertRaises(InvalidArgumentError):
            ChannelCombination(index=2, channels=(1, 2, 3), universe=8)
        with self.assertRaises(InvalidArgumentError):
            combination_from_index(8, 3, 1).names(("a", "b"))
