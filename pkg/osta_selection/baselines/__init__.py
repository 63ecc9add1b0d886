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
Baselines (:mod:`osta_selection.baselines`)
================================================

.. currentmodule:: osta_selection.baselines

Reference pipelines that OSTA is measured against: the exhaustive supervised
grid search (SGS) that serves as the accuracy oracle, direct feeding of all
channels (DF), principal component extraction and marginal-entropy ranking.

Functions
=========

.. autosummary::
    :toctree: ../stubs/

    run_sgs
    run_df
    pca_extract
    entropy_select
"""

from .direct import BaselineOutcome, run_df, train_combination
from .sgs import run_sgs
from .pca import PcaModel, fit_pca, pca_extract
from .entropy import entropy_select
