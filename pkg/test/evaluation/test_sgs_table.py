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

"""Tests for grid-search result tables."""

import os
from test.osta_test_case import OstaTestCase

from osta_selection.combinatorics import BAND_ORDERS
from osta_selection.evaluation import SgsTable
from osta_selection.exceptions import FormatError, InvalidArgumentError


def _ladder() -> SgsTable:
    """A complete 3-of-8 table; index i scores 40 + i / 2."""
    return SgsTable(8, 3, seed=2, rows=[(i, 40.0 + i / 2.0) for i in range(56, 0, -1)])


class TestSgsTable(OstaTestCase):
    """Test the grid-search table."""

    def test_complete_and_partial(self):
        """Test completeness tracking."""
        table = _ladder()
        self.assertFalse(table.partial)
        self.assertEqual(len(table), 56)
        self.assertEqual(table.data["index"].tolist(), list(range(1, 57)))
        partial = SgsTable(8, 3, rows=[(5, 70.0)], failed=[9, 3])
        self.assertTrue(partial.partial)
        self.assertEqual(partial.failed, [3, 9])
        self.assertEqual(partial.provenance()["failed"], [3, 9])

    def test_add_errors(self):
        """Test out-of-range and duplicated indices."""
        table = SgsTable(8, 3)
        table.add(1, 50.0)
        with self.assertRaises(InvalidArgumentError):
            table.add(1, 51.0)
        with self.assertRaises(InvalidArgumentError):
            table.add(57, 51.0)
        with self.assertRaises(InvalidArgumentError):
            table.add(0, 51.0)
        with self.assertRaises(InvalidArgumentError):
            table.accuracy_of(2)

    def test_lookup_and_cap(self):
        """Test accuracy lookup and CAP through the table."""
        table = _ladder()
        self.assertEqual(table.accuracy_of(46), 63.0)
        self.assertEqual(table.cap(68.0), 100.0)
        self.assertAlmostEqual(table.cap(67.0), 100.0 * 54 / 56)

    def test_top(self):
        """Test the best rows with channel names."""
        top = _ladder().top(3, channel_names=BAND_ORDERS["semantic3d"])
        self.assertEqual(top["rank"].tolist(), [1, 2, 3])
        self.assertEqual(top["index"].tolist(), [56, 55, 54])
        self.assertEqual(top["channels"].tolist(), ["D Ze De", "Z Ze De", "Z D De"])
        self.assertAlmostEqual(top["cap"].iloc[1], 100.0 * 55 / 56)

    def test_top_ties(self):
        """Test that tied accuracies rank by ascending index."""
        table = SgsTable(4, 3, rows=[(1, 50.0), (2, 60.0), (3, 60.0), (4, 10.0)])
        self.assertEqual(table.top(2)["index"].tolist(), [2, 3])

    def test_channel_frequency(self):
        """Test channel counts among the best rows."""
        frequency = _ladder().channel_frequency(3)
        self.assertEqual(frequency.index.tolist(), list(range(1, 9)))
        self.assertEqual(frequency.tolist(), [0, 0, 0, 0, 2, 2, 2, 3])

    def test_csv_round_trip(self):
        """Test writing and reading a table with its provenance."""
        directory = self.make_temp_dir()
        path = os.path.join(directory, "sgs.csv")
        table = SgsTable(8, 3, seed=4, rows=[(3, 71.234567891), (1, 1 / 3)], failed=[2])
        table.to_csv(path)
        self.assertTrue(os.path.exists(os.path.join(directory, "sgs.json")))
        loaded = SgsTable.from_csv(path)
        self.assertTrue(loaded.data.equals(table.data))
        self.assertEqual(loaded.provenance(), table.provenance())

    def test_csv_errors(self):
        """Test a missing sidecar and unexpected columns."""
        directory = self.make_temp_dir()
        path = os.path.join(directory, "sgs.csv")
        with open(path, "w") as csv_out:
            csv_out.write("index,accuracy\n1,50.0\n")
        with self.assertRaises(FormatError):
            SgsTable.from_csv(path)
        SgsTable(8, 3).to_csv(path)
        with open(path, "w") as csv_out:
            csv_out.write("idx,acc\n1,50.0\n")
        with self.assertRaises(FormatError):
            SgsTable.from_csv(path)
