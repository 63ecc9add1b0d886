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

"""Tests for the allocation meter."""

from test.osta_test_case import OstaTestCase

from osta_selection.exceptions import InvalidStateError
from osta_selection.substrate import AllocationMeter


class TestAllocationMeter(OstaTestCase):
    """Test live byte accounting."""

    def test_phase_peaks(self):
        """Test that peaks are attributed to the active phase."""
        meter = AllocationMeter()
        with meter.phase("train"):
            meter.allocate(100)
            meter.allocate(50)
            meter.release(120)
        with meter.phase("eval"):
            meter.allocate(10)
        self.assertEqual(meter.current, 40)
        self.assertEqual(meter.peak("train"), 150)
        self.assertEqual(meter.peak("eval"), 40)
        self.assertEqual(meter.peak(), 150)
        self.assertEqual(meter.peak("missing"), 0)

    def test_nested_phase(self):
        """Test that leaving a nested phase restores the outer one."""
        meter = AllocationMeter()
        with meter.phase("outer"):
            with meter.phase("inner"):
                meter.allocate(5)
            meter.allocate(7)
        self.assertEqual(meter.peaks, {"outer": 12, "inner": 5})

    def test_merge_peak(self):
        """Test folding in a peak from another meter."""
        meter = AllocationMeter()
        meter.merge_peak("eval", 30)
        meter.merge_peak("eval", 20)
        self.assertEqual(meter.peak("eval"), 30)

    def test_over_release(self):
        """Test that releasing more than is live is an error."""
        meter = AllocationMeter()
        meter.allocate(3)
        with self.assertRaises(InvalidStateError):
            meter.release(4)
