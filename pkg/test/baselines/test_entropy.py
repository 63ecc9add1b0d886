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

"""Tests for the entropy ranking baseline."""

from test.osta_test_case import OstaTestCase

import numpy as np

from osta_selection.baselines import entropy_select
from osta_selection.data import DatasetManifest, McSample, SegmentationDataset
from osta_selection.exceptions import InvalidArgumentError


class TestEntropySelect(OstaTestCase):
    """Test selection of the highest entropy channels."""

    def setUp(self):
        super().setUp()
        rng = np.random.default_rng(0)
        samples = []
        for _ in range(3):
            values = np.stack(
                [
                    np.full((16, 16), 5.0),
                    rng.integers(0, 2, size=(16, 16)).astype(np.float64),
                    rng.uniform(0.0, 1.0, size=(16, 16)),
                ]
            )
            samples.append(McSample(values=values, labels=np.zeros((16, 16))))
        manifest = DatasetManifest(3, 2, ["const", "binary", "noise"], ["x", "y"])
        self.dataset = SegmentationDataset(
            manifest=manifest, splits={"subtrain": samples[:2], "subval": samples[2:]}
        )

    def test_ranking(self):
        """Test that noise beats a binary channel and a constant is last."""
        self.assertEqual(entropy_select(self.dataset, m=1).channels, (3,))
        self.assertEqual(entropy_select(self.dataset, m=2).channels, (2, 3))
        self.assertEqual(entropy_select(self.dataset, m=3).channels, (1, 2, 3))

    def test_invalid_size(self):
        """Test that the selection size must fit the channels."""
        with self.assertRaises(InvalidArgumentError):
            entropy_select(self.dataset, m=0)
        with self.assertRaises(InvalidArgumentError):
            entropy_select(self.dataset, m=4)
