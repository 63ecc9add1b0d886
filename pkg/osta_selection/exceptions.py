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

"""Exceptions raised by the OSTA selection modules."""

from typing import Dict, List, Optional


class OstaError(Exception):
    """Base class for errors raised by the channel selection modules."""

    pass


class InvalidArgumentError(OstaError, ValueError):
    """Error raised due to an invalid input value."""

    pass


class InvalidStateError(OstaError):
    """Error raised when an operation is invoked on an object in the wrong state."""

    pass


class FormatError(OstaError):
    """Error raised when a binary file does not follow its declared layout."""

    def __init__(self, message: str, offset: int = -1):
        """FormatError constructor.

        Args:
            message: Exception message.
            offset: Byte offset at which decoding failed. -1 for unknown offset.
        """
        super().__init__(f"{message} (offset={offset})")
        self.offset = offset


class UndefinedMetricError(OstaError):
    """Error raised when a metric has no defined value for the given counts."""

    pass


class NonFiniteError(OstaError):
    """Error raised when a loss or gradient stops being finite."""

    def __init__(self, message: str, tensor: Optional[str] = None, iteration: int = -1):
        super().__init__(message)
        self.tensor = tensor
        self.iteration = iteration


class ConfigError(OstaError):
    """Error raised for a malformed or inconsistent experiment configuration."""

    pass


class PartialFailureError(OstaError):
    """Error raised when some cells of an experiment failed."""

    def __init__(self, message: str, failed: Optional[List[Dict]] = None):
        super().__init__(message)
        self.failed = failed or []


class VerificationMismatchError(OstaError):
    """Error raised when recomputed report values differ from the stored ones."""

    def __init__(self, message: str, mismatches: Optional[List[str]] = None):
        super().__init__(message)
        self.mismatches = mismatches or []
