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

"""Micro segmentation network: two 3x3 convolutions and a 1x1 classifier head.

Parameters are stored as float32; every forward and backward pass is carried
out in float64 and only the updated parameters are rounded back to float32.
"""

import hashlib
import logging
from collections import OrderedDict
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..exceptions import InvalidArgumentError
from .meter import AllocationMeter
from .rng import stream

logger = logging.getLogger(__name__)

HIDDEN_CHANNELS = 16
IGNORE_LABEL = 255
PARAM_NAMES = (
    "conv1.weight",
    "conv1.bias",
    "conv2.weight",
    "conv2.bias",
    "head.weight",
    "head.bias",
)


class ModelParams:
    """Ordered named float32 tensors of the network."""

    def __init__(self, tensors: "OrderedDict[str, np.ndarray]"):
        if tuple(tensors) != PARAM_NAMES:
            raise InvalidArgumentError(f"Expected tensors {PARAM_NAMES}, got {tuple(tensors)}.")
        self.tensors = OrderedDict(
            (name, np.ascontiguousarray(value, dtype=np.float32)) for name, value in tensors.items()
        )
        k_in = self.k_in
        n_classes = self.n_classes
        expected = shapes_for(k_in, n_classes)
        for name, shape in expected.items():
            if self.tensors[name].shape != shape:
                raise InvalidArgumentError(
                    f"Tensor {name} has shape {self.tensors[name].shape}, expected {shape}."
                )

    @property
    def k_in(self) -> int:
        """Number of input channels."""
        return self.tensors["conv1.weight"].shape[1]

    @property
    def n_classes(self) -> int:
        """Number of output classes."""
        return self.tensors["head.weight"].shape[0]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self.tensors)

    def items(self):
        """Name and tensor pairs in declaration order."""
        return self.tensors.items()

    def copy(self) -> "ModelParams":
        """Deep copy."""
        return ModelParams(OrderedDict((n, t.copy()) for n, t in self.tensors.items()))

    def digest(self) -> str:
        """Hex digest of the parameter bytes."""
        hasher = hashlib.blake2b(digest_size=16)
        for name, tensor in self.tensors.items():
            hasher.update(name.encode("utf-8"))
            hasher.update(tensor.tobytes())
        return hasher.hexdigest()

    def arch_hash(self) -> int:
        """64-bit hash of tensor names and shapes."""
        return arch_hash(self.k_in, self.n_classes)

    def all_finite(self) -> bool:
        """True if no tensor holds a NaN or infinity."""
        return all(np.isfinite(t).all() for t in self.tensors.values())

    def equals(self, other: "ModelParams") -> bool:
        """Bit-level equality."""
        return self.digest() == other.digest()

    def __str__(self) -> str:
        return (
            f"ModelParams(k_in={self.k_in}, n_classes={self.n_classes}, "
            f"digest={self.digest()[:12]})"
        )


def shapes_for(k_in: int, n_classes: int) -> Dict[str, Tuple[int, ...]]:
    """Tensor shapes of a network with ``k_in`` inputs and ``n_classes`` outputs."""
    return OrderedDict(
        [
            ("conv1.weight", (HIDDEN_CHANNELS, k_in, 3, 3)),
            ("conv1.bias", (HIDDEN_CHANNELS,)),
            ("conv2.weight", (HIDDEN_CHANNELS, HIDDEN_CHANNELS, 3, 3)),
            ("conv2.bias", (HIDDEN_CHANNELS,)),
            ("head.weight", (n_classes, HIDDEN_CHANNELS)),
            ("head.bias", (n_classes,)),
        ]
    )


def arch_hash(k_in: int, n_classes: int) -> int:
    """64-bit architecture hash over tensor names and shapes."""
    description = ";".join(
        f"{name}:{'x'.join(str(d) for d in shape)}"
        for name, shape in shapes_for(k_in, n_classes).items()
    )
    digest = hashlib.blake2b(description.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def fan_in(name: str, k_in: int) -> int:
    """Fan-in of the layer owning tensor ``name``."""
    if name.startswith("conv1"):
        return k_in * 9
    if name.startswith("conv2"):
        return HIDDEN_CHANNELS * 9
    return HIDDEN_CHANNELS


def init_params(k_in: int, n_classes: int, seed: int) -> ModelParams:
    """Fan-in scaled uniform initialization.

    Every tensor of a layer with fan-in ``f`` is drawn from ``U(-1/sqrt(f), 1/sqrt(f))``
    using the ``init`` stream of ``seed``.

    Raises:
        InvalidArgumentError: If ``k_in`` or ``n_classes`` is not positive.
    """
    if k_in < 1 or n_classes < 1:
        raise InvalidArgumentError(f"Invalid network size k_in={k_in}, n_classes={n_classes}.")
    rng = stream(seed, "init")
    tensors = OrderedDict()
    for name, shape in shapes_for(k_in, n_classes).items():
        bound = 1.0 / np.sqrt(fan_in(name, k_in))
        tensors[name] = rng.uniform(-bound, bound, size=shape).astype(np.float32)
    return ModelParams(tensors)


def zero_params(k_in: int, n_classes: int) -> ModelParams:
    """All-zero parameters."""
    return ModelParams(
        OrderedDict(
            (name, np.zeros(shape, dtype=np.float32))
            for name, shape in shapes_for(k_in, n_classes).items()
        )
    )


@dataclass
class ForwardResult:
    """Logits and, when labels were given, the mean cross-entropy loss."""

    logits: np.ndarray
    loss: Optional[float] = None
    all_ignored: bool = False


class _Tape:
    """Tracks the bytes of live activations in an optional meter."""

    def __init__(self, meter: Optional[AllocationMeter]):
        self.meter = meter
        self.live: Dict[str, int] = {}

    def hold(self, key: str, array: np.ndarray) -> np.ndarray:
        if self.meter is not None:
            self.meter.allocate(array.nbytes)
        self.live[key] = array.nbytes
        return array

    def drop(self, key: str) -> None:
        nbytes = self.live.pop(key)
        if self.meter is not None:
            self.meter.release(nbytes)

    def drop_all(self) -> None:
        for key in list(self.live):
            self.drop(key)


def _im2col(x: np.ndarray) -> np.ndarray:
    batch, channels, height, width = x.shape
    padded = np.pad(x, ((0, 0), (0, 0), (1, 1), (1, 1)))
    windows = sliding_window_view(padded, (3, 3), axis=(2, 3))
    return windows.transpose(0, 2, 3, 1, 4, 5).reshape(batch * height * width, channels * 9)


def _col2im(cols: np.ndarray, shape: Tuple[int, int, int, int]) -> np.ndarray:
    batch, channels, height, width = shape
    blocks = cols.reshape(batch, height, width, channels, 3, 3)
    padded = np.zeros((batch, channels, height + 2, width + 2), dtype=cols.dtype)
    for di in range(3):
        for dj in range(3):
            padded[:, :, di : di + height, dj : dj + width] += blocks[:, :, :, :, di, dj].transpose(
                0, 3, 1, 2
            )
    return padded[:, :, 1:-1, 1:-1]


def _conv_out(cols: np.ndarray, weight: np.ndarray, bias: np.ndarray, shape) -> np.ndarray:
    batch, _, height, width = shape
    flat = cols @ weight.reshape(weight.shape[0], -1).T + bias
    return flat.reshape(batch, height, width, weight.shape[0]).transpose(0, 3, 1, 2)


def _check_input(params: ModelParams, values: np.ndarray) -> np.ndarray:
    values = np.asarray(values)
    if values.ndim != 4:
        raise InvalidArgumentError(f"Expected a (B, C, H, W) batch, got shape {values.shape}.")
    if values.shape[1] != params.k_in:
        raise InvalidArgumentError(
            f"Batch has {values.shape[1]} channels, the network expects {params.k_in}."
        )
    return values.astype(np.float64)


def _cross_entropy(
    logits: np.ndarray, labels: np.ndarray
) -> Tuple[float, np.ndarray, np.ndarray, int]:
    labels = np.asarray(labels)
    if labels.shape != (logits.shape[0],) + logits.shape[2:]:
        raise InvalidArgumentError(
            f"Label shape {labels.shape} does not match logits shape {logits.shape}."
        )
    mask = labels != IGNORE_LABEL
    count = int(mask.sum())
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    if count == 0:
        return 0.0, log_probs, mask, 0
    safe = np.where(mask, labels, 0).astype(np.int64)
    picked = np.take_along_axis(log_probs, safe[:, None, :, :], axis=1)[:, 0]
    loss = float(-(picked * mask).sum() / count)
    return loss, log_probs, mask, count


def forward(
    params: ModelParams,
    values: np.ndarray,
    labels: Optional[np.ndarray] = None,
    meter: Optional[AllocationMeter] = None,
) -> ForwardResult:
    """Forward-only pass; activations are released as soon as they are consumed.

    Args:
        params: Network parameters, read only.
        values: ``(B, k_in, H, W)`` batch.
        labels: Optional ``(B, H, W)`` labels; ignore pixels contribute nothing.
        meter: Optional allocation meter.

    Returns:
        Logits of shape ``(B, n_classes, H, W)`` and the loss when labels are given.
        An all-ignore batch has loss 0 and ``all_ignored`` set.

    Raises:
        InvalidArgumentError: On a channel or shape mismatch.
    """
    tape = _Tape(meter)
    x = tape.hold("x", _check_input(params, values))
    shape = x.shape
    hidden = x
    for layer in ("conv1", "conv2"):
        cols = tape.hold("cols", _im2col(hidden))
        weight, bias = params[f"{layer}.weight"], params[f"{layer}.bias"]
        out = tape.hold("out", _conv_out(cols, weight, bias, shape))
        tape.drop("cols")
        tape.drop("x" if layer == "conv1" else "hidden")
        hidden = tape.hold("hidden", np.maximum(out, 0.0))
        tape.drop("out")
    logits = tape.hold(
        "logits",
        np.einsum("oc,bchw->bohw", params["head.weight"].astype(np.float64), hidden)
        + params["head.bias"][None, :, None, None],
    )
    tape.drop("hidden")
    result = ForwardResult(logits=logits)
    if labels is not None:
        loss, _, _, count = _cross_entropy(logits, labels)
        result.loss = loss
        result.all_ignored = count == 0
        if count == 0:
            logger.debug("batch=all_ignored loss=0")
    tape.drop_all()
    return result


def predict(
    params: ModelParams, values: np.ndarray, meter: Optional[AllocationMeter] = None
) -> np.ndarray:
    """Per-pixel argmax class, ``(B, H, W)``."""
    return np.argmax(forward(params, values, meter=meter).logits, axis=1)


def loss_and_grads(
    params: ModelParams,
    values: np.ndarray,
    labels: np.ndarray,
    meter: Optional[AllocationMeter] = None,
) -> Tuple[float, Dict[str, np.ndarray], bool]:
    """Training pass: mean loss and its float64 gradients for every tensor.

    Activations of the forward pass stay alive until the backward pass is done.

    Returns:
        ``(loss, grads, all_ignored)``; an all-ignore batch gives loss 0 and zero
        gradients.
    """
    tape = _Tape(meter)
    x = tape.hold("x", _check_input(params, values))
    shape = x.shape
    w1 = params["conv1.weight"].astype(np.float64)
    w2 = params["conv2.weight"].astype(np.float64)
    wh = params["head.weight"].astype(np.float64)

    cols1 = tape.hold("cols1", _im2col(x))
    out1 = tape.hold("out1", _conv_out(cols1, w1, params["conv1.bias"], shape))
    h1 = tape.hold("h1", np.maximum(out1, 0.0))
    cols2 = tape.hold("cols2", _im2col(h1))
    out2 = tape.hold("out2", _conv_out(cols2, w2, params["conv2.bias"], shape))
    h2 = tape.hold("h2", np.maximum(out2, 0.0))
    logits = tape.hold(
        "logits",
        np.einsum("oc,bchw->bohw", wh, h2) + params["head.bias"][None, :, None, None],
    )
    loss, log_probs, mask, count = _cross_entropy(logits, labels)

    grads = OrderedDict()
    if count == 0:
        logger.debug("batch=all_ignored loss=0")
        for name, tensor in params.items():
            grads[name] = np.zeros(tensor.shape, dtype=np.float64)
        tape.drop_all()
        return 0.0, grads, True

    batch, _, height, width = shape
    dlogits = np.exp(log_probs)
    safe = np.where(mask, labels, 0).astype(np.int64)
    np.put_along_axis(
        dlogits,
        safe[:, None, :, :],
        np.take_along_axis(dlogits, safe[:, None, :, :], axis=1) - 1.0,
        axis=1,
    )
    dlogits = tape.hold("dlogits", dlogits * mask[:, None, :, :] / count)

    grads["head.weight"] = np.einsum("bohw,bchw->oc", dlogits, h2)
    grads["head.bias"] = dlogits.sum(axis=(0, 2, 3))
    dh2 = tape.hold("dh2", np.einsum("oc,bohw->bchw", wh, dlogits))
    dout2 = dh2 * (out2 > 0)
    dflat2 = dout2.transpose(0, 2, 3, 1).reshape(batch * height * width, HIDDEN_CHANNELS)
    grads_conv2 = (dflat2.T @ cols2).reshape(w2.shape)
    dh1 = tape.hold("dh1", _col2im(dflat2 @ w2.reshape(HIDDEN_CHANNELS, -1), h1.shape))
    dout1 = dh1 * (out1 > 0)
    dflat1 = dout1.transpose(0, 2, 3, 1).reshape(batch * height * width, HIDDEN_CHANNELS)

    grads["conv1.weight"] = (dflat1.T @ cols1).reshape(w1.shape)
    grads["conv1.bias"] = dflat1.sum(axis=0)
    grads["conv2.weight"] = grads_conv2
    grads["conv2.bias"] = dflat2.sum(axis=0)
    for name, grad in grads.items():
        tape.hold(f"grad:{name}", grad)
    ordered = OrderedDict((name, grads[name]) for name in PARAM_NAMES)
    tape.drop_all()
    return loss, ordered, False


def backward(params: ModelParams, values: np.ndarray, labels: np.ndarray) -> Dict[str, np.ndarray]:
    """Gradients of the mean loss with respect to every tensor."""
    return loss_and_grads(params, values, labels)[1]


def _activation_signs(params: ModelParams, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    x = _check_input(params, values)
    out1 = _conv_out(_im2col(x), params["conv1.weight"], params["conv1.bias"], x.shape)
    out2 = _conv_out(
        _im2col(np.maximum(out1, 0.0)), params["conv2.weight"], params["conv2.bias"], x.shape
    )
    return out1 > 0, out2 > 0


def _with_value(params: ModelParams, name: str, position: Tuple[int, ...], value) -> ModelParams:
    changed = params.copy()
    changed.tensors[name][position] = value
    return changed


def gradient_check(
    params: ModelParams,
    values: np.ndarray,
    labels: np.ndarray,
    samples_per_tensor: int = 20,
    step: float = 1e-3,
    seed: int = 0,
) -> Dict[str, float]:
    """Compare analytic gradients with central finite differences.

    Parameters are drawn from the ``gradcheck`` stream. A draw whose perturbation
    flips any ReLU is replaced by another one, since the loss is not
    differentiable across the kink.

    Returns:
        Maximum relative error per tensor.
    """
    analytic = backward(params, values, labels)
    signs = _activation_signs(params, values)
    errors: Dict[str, float] = {}
    for key, name in enumerate(PARAM_NAMES):
        rng = stream(seed, "gradcheck", 0, key)
        tensor = params[name]
        worst = 0.0
        accepted = 0
        for _ in range(samples_per_tensor * 20):
            if accepted == samples_per_tensor:
                break
            position = tuple(int(rng.integers(0, d)) for d in tensor.shape)
            centre = float(tensor[position])
            upper = np.float32(centre + step)
            lower = np.float32(centre - step)
            plus = _with_value(params, name, position, upper)
            minus = _with_value(params, name, position, lower)
            if any(
                not np.array_equal(a, b) or not np.array_equal(a, c)
                for a, b, c in zip(
                    signs, _activation_signs(plus, values), _activation_signs(minus, values)
                )
            ):
                continue
            numeric = (
                forward(plus, values, labels).loss - forward(minus, values, labels).loss
            ) / (float(upper) - float(lower))
            exact = float(analytic[name][position])
            worst = max(worst, abs(exact - numeric) / max(abs(exact), abs(numeric), 1e-6))
            accepted += 1
        errors[name] = worst
        logger.debug("gradcheck tensor=%s samples=%d max_rel_error=%.3e", name, accepted, worst)
    return errors
