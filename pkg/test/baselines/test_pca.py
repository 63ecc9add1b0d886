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

"""Tests for the principal component baseline."""

from test.osta_test_case import OstaTestCase
from test.utils.utils import build_dataset

import numpy as np
from scipy import linalg

from osta_selection.baselines import fit_pca, pca_extract
from osta_selection.data import DatasetManifest, McSample, SegmentationDataset
from osta_selection.exceptions import InvalidArgumentError


class TestFitPca(OstaTestCase):
    """Test the component fit against a reference eigensolver."""

    def setUp(self):
        super().setUp()
        rng = np.random.default_rng(0)
        mixing = rng.normal(size=(4, 4))
        self.pixels = rng.normal(size=(2000, 4)) @ mixing + np.array([1.0, -2.0, 0.5, 3.0])

    def test_rank_one_data(self):
        """Test that collinear pixels have one component and flagged padding."""
        rng = np.random.default_rng(1)
        direction = np.array([0.5, -1.0, 2.0, 0.25])
        pixels = rng.normal(size=(1000, 1)) * direction + 7.0
        model = fit_pca(pixels, 4)
        total = float(pixels.var(axis=0).sum())
        self.assertGreaterEqual(model.explained_variance[0] / total, 0.999)
        self.assertEqual(model.flagged, [2, 3, 4])
        unit = direction / np.linalg.norm(direction)
        self.assertAlmostEqual(abs(float(unit @ model.components[:, 0])), 1.0, places=9)

    def test_matches_reference_eigensolver(self):
        """Test variances and directions against scipy."""
        centred = self.pixels - self.pixels.mean(axis=0)
        covariance = centred.T @ centred / len(centred)
        values, vectors = linalg.eigh(covariance)
        model = fit_pca(self.pixels, 2)
        np.testing.assert_allclose(model.explained_variance, values[::-1][:2], rtol=1e-10)
        for position in range(2):
            reference = vectors[:, -1 - position]
            self.assertAlmostEqual(
                abs(float(reference @ model.components[:, position])), 1.0, places=9
            )

    def test_orthonormal_and_signed(self):
        """Test orthonormal components with a positive dominant coefficient."""
        model = fit_pca(self.pixels, 4)
        np.testing.assert_allclose(model.components.T @ model.components, np.eye(4), atol=1e-12)
        for column in model.components.T:
            self.assertGreater(column[np.argmax(np.abs(column))], 0.0)
        self.assertEqual(model.flagged, [])

    def test_full_projection_is_lossless(self):
        """Test reconstruction and variance preservation with every component."""
        model = fit_pca(self.pixels, 4)
        projected = (self.pixels - model.mean) @ model.components
        np.testing.assert_allclose(projected @ model.components.T + model.mean, self.pixels)
        self.assertAlmostEqual(
            float(projected.var(axis=0).sum()) / float(self.pixels.var(axis=0).sum()),
            1.0,
            places=10,
        )


class TestPcaExtract(OstaTestCase):
    """Test channel replacement on a dataset."""

    def test_extract(self):
        """Test that every split is projected to the requested width."""
        dataset = build_dataset(self.make_temp_dir())
        projected, model = pca_extract(dataset, m=3)
        self.assertEqual(projected.n_channels, 3)
        self.assertEqual(projected.channel_names, ["pc1", "pc2", "pc3"])
        self.assertEqual(model.m, 3)
        self.assertEqual(projected.test()[0].channels, 3)
        np.testing.assert_array_equal(projected.test()[0].labels, dataset.test()[0].labels)
        self.assertEqual(len(projected.validation()), len(dataset.validation()))

    def test_invalid(self):
        """Test too many components and too few pixels."""
        manifest = DatasetManifest(4, 2, ["a", "b", "c", "d"], ["x", "y"])
        sample = McSample(values=np.ones((4, 2, 2)), labels=np.zeros((2, 2)))
        tiny = SegmentationDataset(manifest=manifest, splits={"train": [sample]})
        with self.assertRaises(InvalidArgumentError):
            pca_extract(tiny, m=2)
        with self.assertRaises(InvalidArgumentError):
            pca_extract(tiny, m=5)
