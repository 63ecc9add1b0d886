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

"""Reader and writer for the MCI1 multichannel image container.

Layout, all integers little-endian::

    offset  size      field
    0       4         magic b"MCI1"
    4       2         version (u16), currently 1
    6       4         height H (u32)
    10      4         width W (u32)
    14      2         channels C (u16)
    16      4*H*W*C   float32 values, channel-planar
    ...     H*W       uint8 labels
"""

import logging
import os
import struct
from typing import Union

import numpy as np

from ..exceptions import FormatError
from .sample import McSample

logger = logging.getLogger(__name__)

MAGIC = b"MCI1"
VERSION = 1
_HEADER = struct.Struct("<4sHIIH")


def encode_sample(sample: McSample) -> bytes:
    """Serialize a sample to MCI1 bytes."""
    header = _HEADER.pack(MAGIC, VERSION, sample.height, sample.width, sample.channels)
    return header + sample.values.astype("<f4").tobytes() + sample.labels.tobytes()


def decode_sample(payload: bytes, name: str = "") -> McSample:
    """Parse MCI1 bytes.

    Raises:
        FormatError: On bad magic, unsupported version, truncated or oversized payload.
    """
    if len(payload) < _HEADER.size:
        raise FormatError(
            f"Truncated header: {len(payload)} of {_HEADER.size} bytes", offset=len(payload)
        )
    magic, version, height, width, channels = _HEADER.unpack_from(payload, 0)
    if magic != MAGIC:
        raise FormatError(f"Bad magic {magic!r}, expected {MAGIC!r}", offset=0)
    if version != VERSION:
        raise FormatError(f"Unsupported version {version}, expected {VERSION}", offset=4)
    n_values = height * width * channels
    values_end = _HEADER.size + 4 * n_values
    labels_end = values_end + height * width
    if len(payload) < labels_end:
        raise FormatError(
            f"Truncated payload: header declares {labels_end} bytes, file has {len(payload)}",
            offset=len(payload),
        )
    if len(payload) > labels_end:
        raise FormatError(
            f"Trailing data: {len(payload) - labels_end} bytes after labels", offset=labels_end
        )
    values = np.frombuffer(payload, dtype="<f4", count=n_values, offset=_HEADER.size)
    labels = np.frombuffer(payload, dtype=np.uint8, count=height * width, offset=values_end)
    return McSample(
        values=values.astype(np.float32).reshape(channels, height, width),
        labels=labels.reshape(height, width),
        name=name,
    )


def write_sample(path: Union[str, os.PathLike], sample: McSample) -> None:
    """Write a sample to ``path`` in MCI1 format."""
    with open(path, "wb") as file:
        file.write(encode_sample(sample))
    logger.debug("path=%s shape=%s action=write", path, sample.values.shape)


def read_sample(path: Union[str, os.PathLike]) -> McSample:
    """Read an MCI1 file.

    Raises:
        FormatError: If the file does not follow the MCI1 layout.
    """
    with open(path, "rb") as file:
        payload = file.read()
    return decode_sample(payload, name=os.path.splitext(os.path.basename(path))[0])
