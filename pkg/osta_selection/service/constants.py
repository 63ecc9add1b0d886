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

"""Result-tree constants."""

import enum

EXPERIMENT_FILE = "experiment.json"
REGISTRY_FILE = "runs.json"
DATA_DIR = "data"
RUNS_DIR = "runs"
METRICS_FILE = "metrics.json"
RUN_LOG_FILE = "run.log"
CHECKPOINT_DIR = "checkpoints"
ELIMINATION_FILE = "elimination.csv"
SGS_FILE = "sgs.csv"
REPORT_CSV_FILE = "report.csv"
REPORT_JSON_FILE = "report.json"
MRC_FILE = "mrc.csv"
SCATTER_SVG_FILE = "scatter.svg"
SCATTER_CSV_FILE = "scatter.csv"
# registry index of runs that are not grid-search members
NO_INDEX = 0


class RunStatus(enum.Enum):
    """Possible states of a recorded run."""

    DONE = "done"  # The run finished and its metrics file is written
    FAILED = "failed"  # The run raised; its directory may hold partial output


class ExitCode(enum.IntEnum):
    """Process exit codes of the command-line interface."""

    OK = 0
    CONFIG_ERROR = 2
    PARTIAL_FAILURE = 3
    VERIFICATION_MISMATCH = 4
