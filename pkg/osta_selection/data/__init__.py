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
================================================
Data (:mod:`osta_selection.data`)
================================================

.. currentmodule:: osta_selection.data

Multichannel samples, the ``MCI1`` file format, dataset manifests and the
planted-subset synthetic generator. A dataset on disk is a directory holding
``.mci`` sample files and a ``manifest.json``::

    from osta_selection.data import SyntheticSpec, generate_synthetic, SegmentationDataset
    _, path = generate_synthetic(SyntheticSpec(), "data/planted")
    dataset = SegmentationDataset.from_manifest(path)

Classes
=======

.. autosummary::
    :toctree: ../stubs/

    McSample
    DatasetManifest
    SegmentationDataset
    SyntheticSpec

Functions
=========

.. autosummary::
    :toctree: ../stubs/

    read_sample
    write_sample
    crop_patches
    select_channels
    stratified_split
    standardize
    generate_synthetic
"""

from .sample import IGNORE_LABEL, McSample, crop_patches, select_channels
from .batching import PatchSet, sample_batch
from .mci_format import decode_sample, encode_sample, read_sample, write_sample
from .dataset import (
    DatasetManifest,
    SampleEntry,
    SegmentationDataset,
    apply_normalization,
    split_manifest,
    standardize,
    stratified_split,
)
from .synthetic import SyntheticSpec, generate_synthetic
