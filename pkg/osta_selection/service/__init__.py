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
===============================================
Service (:mod:`osta_selection.service`)
===============================================

.. currentmodule:: osta_selection.service

Batch experiments over a result tree. :func:`run_experiment` runs every
method, variant and seed of an :class:`~osta_selection.config.ExperimentConfig`
into its own directory::

    results/
        experiment.json
        runs.json
        runs/osta/seed-0/metrics.json
        runs/osta/no-warmup/seed-0/metrics.json
        runs/sgs/seed-0/index-0001/metrics.json
        report.csv  report.json  mrc.csv  scatter.svg  scatter.csv

Reports and the scatter are recomputed from the ``metrics.json`` files only,
and :func:`verify` checks that every stored number matches its recomputation.

Classes
=======

.. autosummary::
    :toctree: ../stubs/

    ExperimentService
    RunRecord
    RunStatus
    ExitCode

Functions
=========

.. autosummary::
    :toctree: ../stubs/

    run_experiment
    emit_report
    emit_scatter
    verify
"""

from .utils import log_to_file, run_parallel, setup_logger, WorkerPool
from .constants import ExitCode, RunStatus
from .experiment_dataclasses import RunRecord, cell_path
from .report import ReportTables, build_report, emit_report, load_sgs_table, verify
from .plot import emit_scatter, existing_scatter_files, scatter_points
from .experiment_service import (
    ExperimentService,
    prepare_dataset,
    run_experiment,
    split_dataset,
)
