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

"""Binary checkpoints of a training run.

Layout, little endian::

    "OSTK" | version u16 | arch-hash u64 | tensor count u32
    per tensor: name length u16 | name | rank u8 | dims u32 * rank | float32 data
    optimizer:  momentum f64 | weight decay f64 | buffer count u32
                per buffer: name length u16 | name | float32 data (shape of the tensor)
    rng:        seed u64 | iteration u64
    selection:  universe u16 | k u16 | remaining count u32 | index u32 * count
                | eliminated count u32 | (pause u32 | index u32 | score f64) * count
"""

import logging
import os
import struct
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from ..exceptions import FormatError
from .model import ModelParams
from .optimizer import OptimizerState

logger = logging.getLogger(__name__)

MAGIC = b"OSTK"
VERSION = 1


@dataclass
class Checkpoint:
    """Everything needed to resume a run at ``iteration``."""

    params: ModelParams
    optimizer: OptimizerState
    seed: int
    iteration: int
    universe: int = 0
    k: int = 0
    remaining: List[int] = field(default_factory=list)
    eliminated: List[Tuple[int, int, float]] = field(default_factory=list)


class _Reader:
    def __init__(self, payload: bytes):
        self.payload = payload
        self.offset = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.offset + size > len(self.payload):
            raise FormatError("Truncated checkpoint", offset=len(self.payload))
        values = struct.unpack_from(fmt, self.payload, self.offset)
        self.offset += size
        return values

    def text(self) -> str:
        (length,) = self.take("<H")
        return self.take(f"<{length}s")[0].decode("utf-8")

    def floats(self, shape: Tuple[int, ...]) -> np.ndarray:
        count = int(np.prod(shape, dtype=np.int64))
        end = self.offset + 4 * count
        if end > len(self.payload):
            raise FormatError("Truncated tensor data", offset=len(self.payload))
        data = np.frombuffer(self.payload, dtype="<f4", count=count, offset=self.offset)
        self.offset = end
        return data.astype(np.float32).reshape(shape)


def _text(value: str) -> bytes:
    raw = value.encode("utf-8")
    return struct.pack("<H", len(raw)) + raw


def encode_checkpoint(checkpoint: Checkpoint) -> bytes:
    """Serialize a checkpoint."""
    params = checkpoint.params
    parts = [struct.pack("<4sHQI", MAGIC, VERSION, params.arch_hash(), len(params.tensors))]
    for name, tensor in params.items():
        parts.append(_text(name))
        parts.append(struct.pack(f"<B{tensor.ndim}I", tensor.ndim, *tensor.shape))
        parts.append(tensor.astype("<f4").tobytes())
    optimizer = checkpoint.optimizer
    parts.append(
        struct.pack(
            "<ddI", optimizer.momentum, optimizer.weight_decay, len(optimizer.buffers)
        )
    )
    for name, buffer in optimizer.buffers.items():
        parts.append(_text(name))
        parts.append(buffer.astype("<f4").tobytes())
    parts.append(struct.pack("<QQ", checkpoint.seed, checkpoint.iteration))
    parts.append(
        struct.pack(
            f"<HHI{len(checkpoint.remaining)}I",
            checkpoint.universe,
            checkpoint.k,
            len(checkpoint.remaining),
            *checkpoint.remaining,
        )
    )
    parts.append(struct.pack("<I", len(checkpoint.eliminated)))
    for pause, index, score in checkpoint.eliminated:
        parts.append(struct.pack("<IId", pause, index, score))
    return b"".join(parts)


def decode_checkpoint(payload: bytes, expected_arch: Optional[int] = None) -> Checkpoint:
    """Parse a checkpoint.

    Args:
        payload: File contents.
        expected_arch: Architecture hash the caller needs, if any.

    Raises:
        FormatError: On bad magic, version, architecture or truncation.
    """
    reader = _Reader(payload)
    magic, version, stored_arch, count = reader.take("<4sHQI")
    if magic != MAGIC:
        raise FormatError(f"Bad checkpoint magic {magic!r}", offset=0)
    if version != VERSION:
        raise FormatError(f"Unsupported checkpoint version {version}", offset=4)
    if expected_arch is not None and stored_arch != expected_arch:
        raise FormatError(
            f"Architecture hash {stored_arch:016x} does not match {expected_arch:016x}", offset=6
        )
    tensors = OrderedDict()
    for _ in range(count):
        name = reader.text()
        (rank,) = reader.take("<B")
        shape = reader.take(f"<{rank}I")
        tensors[name] = reader.floats(tuple(shape))
    try:
        params = ModelParams(tensors)
    except (ValueError, IndexError) as err:
        raise FormatError(f"Inconsistent tensors: {err}", offset=reader.offset) from None
    if params.arch_hash() != stored_arch:
        raise FormatError("Tensor shapes do not match the architecture hash", offset=6)

    momentum, weight_decay, buffer_count = reader.take("<ddI")
    buffers = OrderedDict()
    for _ in range(buffer_count):
        name = reader.text()
        if name not in params.tensors:
            raise FormatError(f"Momentum buffer for unknown tensor {name}", offset=reader.offset)
        buffers[name] = reader.floats(params[name].shape)
    seed, iteration = reader.take("<QQ")
    universe, k, remaining_count = reader.take("<HHI")
    remaining = list(reader.take(f"<{remaining_count}I"))
    (eliminated_count,) = reader.take("<I")
    eliminated = [reader.take("<IId") for _ in range(eliminated_count)]
    if reader.offset != len(payload):
        raise FormatError("Trailing data after checkpoint", offset=reader.offset)
    return Checkpoint(
        params=params,
        optimizer=OptimizerState(momentum=momentum, weight_decay=weight_decay, buffers=buffers),
        seed=seed,
        iteration=iteration,
        universe=universe,
        k=k,
        remaining=remaining,
        eliminated=[(int(p), int(i), float(s)) for p, i, s in eliminated],
    )


def save_checkpoint(path: Union[str, os.PathLike], checkpoint: Checkpoint) -> None:
    """Write a checkpoint file."""
    with open(path, "wb") as file_out:
        file_out.write(encode_checkpoint(checkpoint))
    logger.debug("checkpoint=%s iteration=%d", path, checkpoint.iteration)


def load_checkpoint(
    path: Union[str, os.PathLike], expected_arch: Optional[int] = None
) -> Checkpoint:
    """Read a checkpoint file; see :func:`decode_checkpoint`."""
    with open(path, "rb") as file_in:
        return decode_checkpoint(file_in.read(), expected_arch)
