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

"""Seeded random streams.

Every random draw of the package comes from a stream keyed by
``(seed, key, purpose, iteration)``. A stream is a ``numpy`` Generator over the
Philox-4x64 counter-based bit generator, seeded through ``SeedSequence`` so the
mapping from key to stream is fixed across platforms. Because each iteration
owns its stream, the draws of iteration ``i`` never depend on how many numbers
earlier iterations consumed, which is what makes resumed runs bit-identical.
"""

import zlib

import numpy as np

from ..exceptions import InvalidArgumentError

# purpose tags; values are part of the on-disk reproducibility contract
PURPOSES = (
    "init",
    "ic",
    "batch",
    "probe",
    "split",
    "synthetic",
    "pca",
    "gradcheck",
)


def purpose_code(purpose: str) -> int:
    """Return the stable 32-bit code of a purpose tag."""
    if purpose not in PURPOSES:
        raise InvalidArgumentError(f"Unknown random stream purpose '{purpose}'.")
    return zlib.crc32(purpose.encode("ascii"))


def stream(seed: int, purpose: str, iteration: int = 0, key: int = 0) -> np.random.Generator:
    """Return the random stream for one purpose at one iteration.

    Args:
        seed: Run seed, a non-negative integer.
        purpose: One of :data:`PURPOSES`.
        iteration: Iteration (or item) the stream belongs to.
        key: Extra key separating otherwise identical runs, e.g. a combination index.

    Returns:
        A freshly seeded generator.
    """
    if seed < 0 or iteration < 0 or key < 0:
        raise InvalidArgumentError(
            f"Stream keys must be non-negative (seed={seed}, iteration={iteration}, key={key})."
        )
    entropy = [int(seed), int(key), purpose_code(purpose), int(iteration)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
