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

"""Tests for multichannel samples."""

from test.osta_test_case import OstaTestCase
from test.utils.utils import random_sample

import numpy as np

from osta_selection.combinatorics import ChannelCombination
from osta_selection.data import McSample, crop_patches, select_channels
from osta_selection.data.sample import IGNORE_LABEL
from osta_selection.exceptions import InvalidArgumentError


class TestSample(OstaTestCase):
    """Test sample construction, cropping and channel selection."""

    def setUp(self):
        super().setUp()
        self.rng = np.random.default_rng(3)

    def test_read_only(self):
        """Test that sample arrays cannot be modified."""
        sample = random_sample(self.rng, 2, 4, 4)
        with self.assertRaises(ValueError):
            sample.values[0, 0, 0] = 1.0
        with self.assertRaises(ValueError):
            sample.labels[0, 0] = 1

    def test_shape_mismatch(self):
        """Test that labels must match the raster."""
        with self.assertRaises(InvalidArgumentError):
            McSample(values=np.zeros((2, 4, 4)), labels=np.zeros((4, 5)))
        with self.assertRaises(InvalidArgumentError):
            McSample(values=np.zeros((4, 4)), labels=np.zeros((4, 4)))

    def test_histogram_skips_ignore(self):
        """Test class histograms and labeled pixel counts."""
        labels = np.array([[0, 1, 1], [2, IGNORE_LABEL, IGNORE_LABEL]])
        sample = McSample(values=np.zeros((1, 2, 3)), labels=labels)
        np.testing.assert_array_equal(sample.class_histogram(3), [1, 2, 1])
        self.assertEqual(sample.labeled_pixels(), 4)
        sample.validate_labels(3)
        with self.assertRaises(InvalidArgumentError):
            sample.validate_labels(2)

    def test_crop_counts(self):
        """Test the number of patches cut from benchmark tile sizes."""
        square = McSample(
            values=np.zeros((1, 1024, 1024), dtype=np.float32),
            labels=np.zeros((1024, 1024), dtype=np.uint8),
        )
        self.assertEqual(len(crop_patches(square, 512, 512)), 4)
        wide = McSample(
            values=np.zeros((1, 1024, 2048), dtype=np.float32),
            labels=np.zeros((1024, 2048), dtype=np.uint8),
        )
        self.assertEqual(len(crop_patches(wide, 512, 1024)), 4)
        self.assertEqual(len(crop_patches(random_sample(self.rng, 2, 64, 64), 64, 64)), 1)

    def test_crop_tiles_sample(self):
        """Test that patches tile the sample in row-major order."""
        sample = random_sample(self.rng, 3, 6, 9, name="s")
        patches = crop_patches(sample, 3, 3)
        self.assertEqual(len(patches), 6)
        self.assertEqual(patches[1].name, "s[0,1]")
        rows = [
            np.concatenate([p.values for p in patches[r * 3 : r * 3 + 3]], axis=2) for r in (0, 1)
        ]
        np.testing.assert_array_equal(np.concatenate(rows, axis=1), sample.values)

    def test_crop_drops_remainder(self):
        """Test that partial patches are discarded."""
        sample = random_sample(self.rng, 1, 7, 5)
        patches = crop_patches(sample, 3, 2)
        self.assertEqual(len(patches), 4)
        with self.assertRaises(InvalidArgumentError):
            crop_patches(sample, 8, 2)

    def test_select_channels(self):
        """Test channel gathering in combination order."""
        sample = random_sample(self.rng, 8, 4, 4)
        identity = select_channels(sample, ChannelCombination.of(range(1, 9), 8))
        self.assertTrue(identity.equals(sample))
        single = select_channels(sample, ChannelCombination.of([2], 8))
        np.testing.assert_array_equal(single.values[0], sample.values[1])
        comb = ChannelCombination.of([4, 6, 7], 8)
        chosen = select_channels(sample, comb)
        np.testing.assert_array_equal(chosen.values, sample.values[[3, 5, 6]])
        np.testing.assert_array_equal(chosen.labels, sample.labels)
        again = select_channels(chosen, ChannelCombination.of([1, 2, 3], 3))
        self.assertTrue(again.equals(chosen))

    def test_select_out_of_range(self):
        """Test that a combination wider than the sample is rejected."""
        sample = random_sample(self.rng, 3, 4, 4)
        with self.assertRaises(InvalidArgumentError):
            select_channels(sample, ChannelCombination.of([1, 4], 8))
