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

"""Synthetic datasets with a planted informative channel subset."""

import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..combinatorics import ChannelCombination
from ..exceptions import InvalidArgumentError
from ..substrate.rng import stream
from .dataset import DatasetManifest, SampleEntry
from .mci_format import write_sample
from .sample import McSample

logger = logging.getLogger(__name__)

ACCURACY_FLOOR = 0.90
SIDECAR_NAME = "synthetic.json"
MANIFEST_NAME = "manifest.json"

# stream keys inside the "synthetic" purpose
_KEY_LABELS = 0
_KEY_PLANTED = 1
_KEY_REDUNDANT = 2
_KEY_DISTRACTOR = 3
_KEY_MIXING = 4

_COSINES = 4
_MAX_FREQUENCY = 2.0
_REDUNDANT_NOISE = 0.1


@dataclass
class SyntheticSpec:
    """Recipe of a synthetic dataset.

    Non-planted channels are assigned in ascending ordinal order: the first
    ``n_redundant`` are redundant mixes of the planted channels, the rest are
    distractors.
    """

    n_channels: int = 6
    planted: Tuple[int, ...] = (1, 3, 5)
    n_redundant: int = 1
    n_distractor: int = 2
    n_classes: int = 3
    height: int = 64
    width: int = 64
    samples: Dict[str, int] = field(default_factory=lambda: {"train": 16, "test": 4})
    snr: float = 3.0
    seed: int = 0

    def __post_init__(self) -> None:
        self.planted = tuple(int(c) for c in self.planted)
        self.samples = dict(self.samples)

    @property
    def sigma(self) -> float:
        """Standard deviation of the noise on planted channels."""
        return 1.0 / self.snr

    @property
    def combination(self) -> ChannelCombination:
        """The planted subset as a channel combination."""
        return ChannelCombination.of(self.planted, self.n_channels)

    def roles(self) -> Dict[int, str]:
        """Map every channel ordinal to ``planted``, ``redundant`` or ``distractor``."""
        roles = {c: "planted" for c in self.planted}
        others = [c for c in range(1, self.n_channels + 1) if c not in roles]
        for position, channel in enumerate(others):
            roles[channel] = "redundant" if position < self.n_redundant else "distractor"
        return roles

    def class_means(self) -> np.ndarray:
        """Return the ``(n_classes, |planted|)`` matrix of class-conditional means.

        With at most as many classes as planted channels, class ``c`` is the
        scaled unit vector ``2·e_c``; otherwise it is the ``±1`` binary code of ``c``.
        """
        k = len(self.planted)
        means = np.zeros((self.n_classes, k), dtype=np.float64)
        for label in range(self.n_classes):
            if self.n_classes <= k:
                means[label, label] = 2.0
            else:
                bits = [(label >> bit) & 1 for bit in range(k)]
                means[label] = [2.0 * b - 1.0 for b in bits]
        return means

    def bayes_accuracy_bound(self) -> float:
        """Union lower bound on per-pixel accuracy of the Bayes rule on planted channels."""
        means = self.class_means()
        worst = 0.0
        for label in range(self.n_classes):
            error = 0.0
            for other in range(self.n_classes):
                if other != label:
                    distance = float(np.linalg.norm(means[label] - means[other]))
                    error += 0.5 * math.erfc(distance / (2.0 * self.sigma) / math.sqrt(2.0))
            worst = max(worst, error)
        return 1.0 - worst

    def validate(self) -> "SyntheticSpec":
        """Check the channel arithmetic and the accuracy floor.

        Raises:
            InvalidArgumentError: If the recipe is inconsistent.
        """
        if len(self.planted) + self.n_redundant + self.n_distractor != self.n_channels:
            raise InvalidArgumentError(
                f"{len(self.planted)} planted + {self.n_redundant} redundant + "
                f"{self.n_distractor} distractor channels != {self.n_channels}."
            )
        if self.n_redundant < 0 or self.n_distractor < 0:
            raise InvalidArgumentError("Channel counts must be non-negative.")
        ChannelCombination.of(self.planted, self.n_channels)
        if self.n_classes < 2:
            raise InvalidArgumentError(f"Need at least 2 classes, got {self.n_classes}.")
        if self.n_classes > 2 ** len(self.planted):
            raise InvalidArgumentError(
                f"{self.n_classes} classes cannot be coded on {len(self.planted)} planted channels."
            )
        if self.snr <= 0:
            raise InvalidArgumentError(f"Signal-to-noise ratio must be positive, got {self.snr}.")
        if self.height < 1 or self.width < 1:
            raise InvalidArgumentError(f"Invalid image size {self.height}x{self.width}.")
        if set(self.samples) - {"train", "test"} or self.samples.get("train", 0) < 2:
            raise InvalidArgumentError(
                f"Sample counts {self.samples} need 'train' >= 2 and optionally 'test'."
            )
        bound = self.bayes_accuracy_bound()
        if bound < ACCURACY_FLOOR:
            raise InvalidArgumentError(
                f"Bayes accuracy bound {bound:.4f} is below {ACCURACY_FLOOR}; raise the snr."
            )
        return self

    def to_dict(self) -> dict:
        """Return the JSON form of the recipe."""
        data = asdict(self)
        data["planted"] = list(self.planted)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "SyntheticSpec":
        """Build a recipe from its JSON form."""
        return cls(**data)


def smooth_field(rng: np.random.Generator, height: int, width: int) -> np.ndarray:
    """Sum of a few random low-frequency cosines, scaled to unit variance on average."""
    rows = np.arange(height, dtype=np.float64)[:, None] / height
    cols = np.arange(width, dtype=np.float64)[None, :] / width
    result = np.zeros((height, width), dtype=np.float64)
    for _ in range(_COSINES):
        u, v = rng.uniform(-_MAX_FREQUENCY, _MAX_FREQUENCY, size=2)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        result += np.cos(2.0 * math.pi * (u * rows + v * cols) + phase)
    return result * math.sqrt(2.0 / _COSINES)


def _mixing_weights(spec: SyntheticSpec, seed: int) -> np.ndarray:
    rng = stream(seed, "synthetic", 0, _KEY_MIXING)
    weights = rng.normal(size=(max(spec.n_redundant, 1), len(spec.planted)))
    return weights / np.linalg.norm(weights, axis=1, keepdims=True)


def synthesize_sample(spec: SyntheticSpec, seed: int, ordinal: int, name: str) -> McSample:
    """Generate one sample of the recipe; ``ordinal`` keys its random streams."""
    h, w = spec.height, spec.width
    label_rng = stream(seed, "synthetic", ordinal, _KEY_LABELS)
    fields = np.stack([smooth_field(label_rng, h, w) for _ in range(spec.n_classes)])
    labels = np.argmax(fields, axis=0).astype(np.uint8)

    means = spec.class_means()
    planted_rng = stream(seed, "synthetic", ordinal, _KEY_PLANTED)
    planted = means[labels].transpose(2, 0, 1) + planted_rng.normal(
        0.0, spec.sigma, size=(len(spec.planted), h, w)
    )

    values = np.zeros((spec.n_channels, h, w), dtype=np.float64)
    for position, channel in enumerate(spec.planted):
        values[channel - 1] = planted[position]

    weights = _mixing_weights(spec, seed)
    redundant_rng = stream(seed, "synthetic", ordinal, _KEY_REDUNDANT)
    distractor_rng = stream(seed, "synthetic", ordinal, _KEY_DISTRACTOR)
    redundant_position = 0
    for channel, role in sorted(spec.roles().items()):
        if role == "redundant":
            mix = np.tensordot(weights[redundant_position], planted, axes=1)
            values[channel - 1] = mix + redundant_rng.normal(0.0, _REDUNDANT_NOISE, size=(h, w))
            redundant_position += 1
        elif role == "distractor":
            values[channel - 1] = smooth_field(distractor_rng, h, w) + distractor_rng.normal(
                0.0, 1.0, size=(h, w)
            )
    return McSample(values=values.astype(np.float32), labels=labels, name=name)


def generate_synthetic(
    spec: SyntheticSpec, out_dir: str, seed: Optional[int] = None
) -> Tuple[DatasetManifest, str]:
    """Generate a planted-subset dataset on disk.

    Args:
        spec: The recipe.
        out_dir: Directory receiving the samples, ``manifest.json`` and the
            ``synthetic.json`` provenance record.
        seed: Generation seed; defaults to ``spec.seed``.

    Returns:
        The manifest and the path it was written to.

    Raises:
        InvalidArgumentError: If the recipe is inconsistent.
    """
    spec.validate()
    seed = spec.seed if seed is None else seed
    os.makedirs(out_dir, exist_ok=True)
    entries: List[SampleEntry] = []
    ordinal = 0
    for split in ("train", "test"):
        for number in range(spec.samples.get(split, 0)):
            path = f"{split}_{number:03d}.mci"
            sample = synthesize_sample(spec, seed, ordinal, path)
            write_sample(os.path.join(out_dir, path), sample)
            entries.append(SampleEntry(path=path, split=split))
            ordinal += 1
    manifest = DatasetManifest(
        n_channels=spec.n_channels,
        n_classes=spec.n_classes,
        channel_names=[f"ch{c}" for c in range(1, spec.n_channels + 1)],
        class_names=[f"class{c}" for c in range(spec.n_classes)],
        samples=entries,
        seed=seed,
    ).validate()
    manifest_path = os.path.join(out_dir, MANIFEST_NAME)
    manifest.save(manifest_path)
    with open(os.path.join(out_dir, SIDECAR_NAME), "w") as json_out:
        record = {"spec": spec.to_dict(), "seed": seed, "roles": _roles_json(spec)}
        json.dump(record, json_out, indent=2)
        json_out.write("\n")
    logger.info(
        "generated=%s samples=%d planted=%s seed=%d",
        out_dir,
        len(entries),
        spec.combination,
        seed,
    )
    return manifest, manifest_path


def _roles_json(spec: SyntheticSpec) -> Dict[str, str]:
    return {str(channel): role for channel, role in sorted(spec.roles().items())}


def gaussian_classify(values: np.ndarray, means: np.ndarray) -> np.ndarray:
    """Nearest-mean (equal-covariance Gaussian) prediction per pixel.

    Args:
        values: ``(k, H, W)`` planes.
        means: ``(n_classes, k)`` class means.
    """
    pixels = values.reshape(values.shape[0], -1).T.astype(np.float64)
    distances = ((pixels[:, None, :] - means[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(distances, axis=1).reshape(values.shape[1:])


def load_spec(out_dir: str) -> SyntheticSpec:
    """Read the recipe recorded next to a generated dataset."""
    with open(os.path.join(out_dir, SIDECAR_NAME)) as json_in:
        return SyntheticSpec.from_dict(json.load(json_in)["spec"])

