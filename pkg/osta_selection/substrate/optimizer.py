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

"""SGD with momentum."""

import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Mapping, MutableMapping, Union

import numpy as np

from ..exceptions import InvalidArgumentError, NonFiniteError
from .model import ModelParams

logger = logging.getLogger(__name__)

DEFAULT_MOMENTUM = 0.9


@dataclass
class OptimizerState:
    """Per-tensor float32 momentum buffers."""

    momentum: float = DEFAULT_MOMENTUM
    weight_decay: float = 0.0
    buffers: "OrderedDict[str, np.ndarray]" = field(default_factory=OrderedDict)

    @classmethod
    def for_params(
        cls, params: ModelParams, momentum: float = DEFAULT_MOMENTUM, weight_decay: float = 0.0
    ) -> "OptimizerState":
        """Zero buffers mirroring ``params``."""
        buffers = OrderedDict(
            (name, np.zeros(tensor.shape, dtype=np.float32)) for name, tensor in params.items()
        )
        return cls(momentum=momentum, weight_decay=weight_decay, buffers=buffers)

    def copy(self) -> "OptimizerState":
        """Deep copy."""
        return OptimizerState(
            momentum=self.momentum,
            weight_decay=self.weight_decay,
            buffers=OrderedDict((n, b.copy()) for n, b in self.buffers.items()),
        )


def _tensors(params: Union[ModelParams, MutableMapping[str, np.ndarray]]):
    return params.tensors if isinstance(params, ModelParams) else params


def sgd_step(
    params: Union[ModelParams, MutableMapping[str, np.ndarray]],
    grads: Mapping[str, np.ndarray],
    lr: float,
    state: OptimizerState,
    iteration: int = -1,
) -> Union[ModelParams, MutableMapping[str, np.ndarray]]:
    """Apply ``v <- m*v + g`` and ``p <- p - lr*v`` to every tensor in place.

    Args:
        params: Parameters to update.
        grads: Gradients with the same names and shapes.
        lr: Learning rate, non-negative.
        state: Momentum buffers, created on first use.
        iteration: Iteration number reported in diagnostics.

    Returns:
        ``params``, updated.

    Raises:
        InvalidArgumentError: If ``lr`` is negative or a gradient is missing.
        NonFiniteError: If a gradient holds NaN or infinity; nothing is updated.
    """
    if lr < 0:
        raise InvalidArgumentError(f"Learning rate must be non-negative, got {lr}.")
    tensors = _tensors(params)
    for name in tensors:
        if name not in grads:
            raise InvalidArgumentError(f"Missing gradient for tensor {name}.")
        if not np.isfinite(grads[name]).all():
            logger.error("iteration=%d tensor=%s gradient=non_finite", iteration, name)
            raise NonFiniteError(
                f"Non-finite gradient for tensor {name} at iteration {iteration}.",
                tensor=name,
                iteration=iteration,
            )
    for name, tensor in tensors.items():
        grad = np.asarray(grads[name], dtype=np.float64)
        if state.weight_decay:
            grad = grad + state.weight_decay * tensor.astype(np.float64)
        buffer = state.buffers.get(name)
        previous = np.zeros(tensor.shape) if buffer is None else buffer.astype(np.float64)
        velocity = state.momentum * previous + grad
        state.buffers[name] = velocity.astype(np.float32)
        tensors[name] = (tensor.astype(np.float64) - lr * velocity).astype(np.float32)
    return params


def grad_norm(grads: Mapping[str, np.ndarray]) -> float:
    """Global L2 norm of a gradient set."""
    return float(np.sqrt(sum(float((np.asarray(g) ** 2).sum()) for g in grads.values())))
