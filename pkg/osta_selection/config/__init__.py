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
=====================================================
Configuration (:mod:`osta_selection.config`)
=====================================================

.. currentmodule:: osta_selection.config

Experiment configuration files, in JSON or YAML, carrying a ``schema_version``.
A minimal document::

    {
        "schema_version": 1,
        "dataset": {"synthetic": {"n_channels": 6, "planted": [1, 3, 5]}},
        "run": {"k": 3, "schedule": {"total_iterations": 2000}},
        "methods": ["osta", "sgs"],
        "seeds": [0, 1, 2]
    }

Classes
=======

.. autosummary::
    :toctree: ../stubs/

    ExperimentConfig

Functions
=========

.. autosummary::
    :toctree: ../stubs/

    read_config
    save_config
"""

from .experiment import (
    DEFAULT_VAL_FRACTION,
    METHODS,
    SCHEMA_VERSION,
    VARIANT_METHODS,
    ExperimentConfig,
    merge_overrides,
)
from .storage import read_config, save_config
