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
Selection (:mod:`osta_selection.selection`)
================================================

.. currentmodule:: osta_selection.selection

One-shot task-adaptive channel selection. A single weight-sharing network is
trained on randomly sampled input combinations (ICs), the worst IC is pruned
at uniformly spaced pauses using forward-only evaluation, and the selected
channel combination (SCC) is fine-tuned::

    from osta_selection.data import SegmentationDataset
    from osta_selection.selection import RunConfig, run_osta

    dataset = SegmentationDataset.from_manifest("data/planted/manifest.json")
    result = run_osta(RunConfig(k=3), dataset)
    print(result.scc)

Classes
=======

.. autosummary::
    :toctree: ../stubs/

    RunConfig
    InitConfig
    ScheduleConfig
    Stage
    PruningPlan
    SupernetState
    OstaResult

Functions
=========

.. autosummary::
    :toctree: ../stubs/

    stage_of
    lr_at
    pause_schedule
    sample_ic
    evaluate_ic
    prune_step
    run_osta
    run_rank_once
    finetune_from_supernet
"""

from .schedule import PruningPlan, ScheduleConfig, Stage, lr_at, pause_schedule, stage_of
from .config import CRITERIA, STRATEGIES, InitConfig, RunConfig
from .supernet import (
    Elimination,
    SupernetState,
    evaluate_confusion,
    evaluate_ic,
    prune_step,
    sample_ic,
)
from .criteria import CriterionScorer, channel_entropy, entropy_score, pca_score
from .pipeline import (
    OstaResult,
    checkpoint_path,
    evaluate_test,
    finetune_from_supernet,
    run_osta,
    run_rank_once,
)
