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
Substrate (:mod:`osta_selection.substrate`)
===============================================

.. currentmodule:: osta_selection.substrate

The deterministic training substrate: seeded random streams, the micro
segmentation network, SGD with momentum, binary checkpoints and the
allocation meter used for the RAM metric.

Classes
=======

.. autosummary::
    :toctree: ../stubs/

    ModelParams
    OptimizerState
    AllocationMeter
    Checkpoint

Functions
=========

.. autosummary::
    :toctree: ../stubs/

    stream
    init_params
    forward
    backward
    loss_and_grads
    gradient_check
    sgd_step
    save_checkpoint
    load_checkpoint
"""

from .rng import PURPOSES, stream
from .meter import AllocationMeter
from .model import (
    HIDDEN_CHANNELS,
    ForwardResult,
    ModelParams,
    arch_hash,
    backward,
    forward,
    gradient_check,
    init_params,
    loss_and_grads,
    predict,
    zero_params,
)
from .optimizer import OptimizerState, sgd_step
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
