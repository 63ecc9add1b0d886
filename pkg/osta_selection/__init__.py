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
==============================================
OSTA Selection (:mod:`osta_selection`)
==============================================

.. currentmodule:: osta_selection

One-shot selection of the k input channels of a segmentation network: a
shared supernet is trained over every k-subset of channels and pruned,
forward-only, down to a single combination. The grid search over all subsets,
direct feeding, PCA and entropy baselines, and the metrics comparing them
(CAP, DCA, RAT, RAM, MRC) ship with it.

Logging
-------

OSTA Selection uses the ``osta_selection`` logger. Its records are single-line
``key=value`` lines.

Two environment variables can be used to control the logging:

    * ``OSTA_SELECTION_LOG_LEVEL``: Specifies the log level to use.
      If an invalid level is set, the log level defaults to ``WARNING``.
      The valid log levels are ``DEBUG``, ``INFO``, ``WARNING``, ``ERROR``, and ``CRITICAL``
      (case-insensitive). If the environment variable is not set, then the parent logger's level
      is used, which also defaults to ``WARNING``.
    * ``OSTA_SELECTION_LOG_FILE``: Specifies the name of the log file to use. If specified,
      messages will be logged to the file only. Otherwise messages will be logged to the standard
      error (usually the screen).

For more advanced use, you can modify the logger itself. For example, to manually set the level
to ``DEBUG``::

    import logging
    logging.getLogger('osta_selection').setLevel(logging.DEBUG)

Classes
==========================
.. autosummary::
   :toctree: ../stubs/

    ChannelCombination
    ExperimentConfig
    RunConfig

Functions
=========

.. autosummary::
   :toctree: ../stubs/

    run_osta
    run_sgs
    run_experiment

Exceptions
==========

.. autosummary::
    :toctree: ../stubs/

    OstaError
    InvalidArgumentError
    InvalidStateError
    FormatError
    UndefinedMetricError
    NonFiniteError
    ConfigError
    PartialFailureError
    VerificationMismatchError
"""

import logging

from .service.utils import setup_logger
from .service import run_experiment
from .exceptions import *
from .combinatorics import (
    ChannelCombination,
    combination_from_index,
    combination_index,
    enumerate_combinations,
)
from .config import ExperimentConfig
from .selection import RunConfig, ScheduleConfig, run_osta
from .baselines import run_sgs
from .version import __version__


# Setup the logger for the OSTA selection package.
logger = logging.getLogger(__name__)
setup_logger(logger)

# Constants used by the OSTA selection logger.
OSTA_SELECTION_LOGGER_NAME = "osta_selection"
"""The name of the OSTA selection logger."""
OSTA_SELECTION_LOG_LEVEL = "OSTA_SELECTION_LOG_LEVEL"
"""The environment variable name that is used to set the level for the OSTA selection logger."""
OSTA_SELECTION_LOG_FILE = "OSTA_SELECTION_LOG_FILE"
"""The environment variable name that is used to set the file for the OSTA selection logger."""
