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
=================================================
Evaluation (:mod:`osta_selection.evaluation`)
=================================================

.. currentmodule:: osta_selection.evaluation

Confusion matrices, segmentation accuracies (mA, mIoU), the selection-quality
metrics CAP and DCA, the efficiency metrics RAT and RAM, MRC statistics and
the grid-search table they are computed against.

Classes
=======

.. autosummary::
    :toctree: ../stubs/

    ConfusionMatrix
    MetricsReport
    RunInstrumentation
    SgsTable

Functions
=========

.. autosummary::
    :toctree: ../stubs/

    mean_accuracy
    mean_iou
    cap
    dca
    pruning_epoch_total
    estimate_rat
    measure_rat
    measure_ram
    mrc_summary
"""

from .confusion import ConfusionMatrix
from .metrics import (
    METRICS,
    MetricsReport,
    RunInstrumentation,
    cap,
    dca,
    estimate_rat,
    mean_accuracy,
    mean_iou,
    measure_ram,
    measure_rat,
    metric_value,
    mrc_summary,
    per_class_accuracy,
    per_class_iou,
    pixel_accuracy,
    pruning_epoch_total,
)
from .sgs_table import SgsTable
