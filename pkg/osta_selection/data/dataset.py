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

"""Dataset manifests, splitting, standardization and the in-memory dataset."""

import json
import logging
import math
import os
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import FormatError, InvalidArgumentError
from ..substrate.rng import stream
from .mci_format import read_sample
from .sample import IGNORE_LABEL, McSample

logger = logging.getLogger(__name__)

SPLIT_TAGS = ("train", "subtrain", "subval", "test")
TRAIN_TAGS = ("train", "subtrain", "subval")
MANIFEST_FIELDS = (
    "n_channels",
    "n_classes",
    "channel_names",
    "class_names",
    "samples",
    "normalization",
    "seed",
)


@dataclass
class SampleEntry:
    """One sample file and the split it belongs to."""

    path: str
    split: str

    def __post_init__(self) -> None:
        if self.split not in SPLIT_TAGS:
            raise InvalidArgumentError(
                f"Unknown split tag '{self.split}', expected one of {SPLIT_TAGS}."
            )


@dataclass
class DatasetManifest:
    """Channel, class and split metadata of a dataset on disk.

    Sample paths are relative to the directory holding the manifest file.
    """

    n_channels: int
    n_classes: int
    channel_names: List[str]
    class_names: List[str]
    samples: List[SampleEntry] = field(default_factory=list)
    normalization: List[Dict[str, float]] = field(default_factory=list)
    seed: int = 0

    def validate(self) -> "DatasetManifest":
        """Check the manifest invariants.

        Raises:
            InvalidArgumentError: If the manifest is inconsistent.
        """
        if len(self.channel_names) != self.n_channels:
            raise InvalidArgumentError(
                f"{len(self.channel_names)} channel names for {self.n_channels} channels."
            )
        if len(self.class_names) != self.n_classes:
            raise InvalidArgumentError(
                f"{len(self.class_names)} class names for {self.n_classes} classes."
            )
        paths = [entry.path for entry in self.samples]
        if len(set(paths)) != len(paths):
            raise InvalidArgumentError("A sample path appears under more than one split tag.")
        if self.normalization and len(self.normalization) != self.n_channels:
            raise InvalidArgumentError(
                f"{len(self.normalization)} normalization entries for {self.n_channels} channels."
            )
        return self

    def paths(self, *splits: str) -> List[str]:
        """Return sample paths tagged with any of ``splits``, in manifest order."""
        return [entry.path for entry in self.samples if entry.split in splits]

    def to_saved_format(self) -> dict:
        """Return the JSON document written to disk."""
        return {
            "n_channels": self.n_channels,
            "n_classes": self.n_classes,
            "channel_names": list(self.channel_names),
            "class_names": list(self.class_names),
            "samples": [{"path": e.path, "split": e.split} for e in self.samples],
            "normalization": [
                {"mean": float(n["mean"]), "std": float(n["std"])} for n in self.normalization
            ],
            "seed": self.seed,
        }

    @classmethod
    def from_saved_format(cls, data: dict) -> "DatasetManifest":
        """Create a manifest from its JSON document."""
        missing = [name for name in MANIFEST_FIELDS if name not in data]
        if missing:
            raise FormatError(f"Manifest is missing fields {missing}")
        return cls(
            n_channels=int(data["n_channels"]),
            n_classes=int(data["n_classes"]),
            channel_names=list(data["channel_names"]),
            class_names=list(data["class_names"]),
            samples=[SampleEntry(path=s["path"], split=s["split"]) for s in data["samples"]],
            normalization=[dict(n) for n in data["normalization"]],
            seed=int(data["seed"]),
        ).validate()

    def save(self, path: str) -> None:
        """Write the manifest as JSON."""
        with open(path, "w") as json_out:
            json.dump(self.to_saved_format(), json_out, indent=2)
            json_out.write("\n")

    @classmethod
    def load(cls, path: str) -> "DatasetManifest":
        """Read a manifest JSON file."""
        with open(path) as json_in:
            return cls.from_saved_format(json.load(json_in))


def _proportions(histogram: np.ndarray) -> np.ndarray:
    total = histogram.sum()
    if total == 0:
        return np.zeros(histogram.shape, dtype=np.float64)
    return histogram / total


def split_size(n_samples: int, val_fraction: float) -> int:
    """Number of sub-validation samples for ``n_samples`` at ``val_fraction``."""
    size = int(math.floor(val_fraction * n_samples + 0.5))
    return min(max(size, 1), n_samples - 1)


def class_distance(samples: Sequence[McSample], reference: np.ndarray, n_classes: int) -> float:
    """L1 distance between the class proportions of ``samples`` and ``reference``."""
    histogram = sum(
        (s.class_histogram(n_classes) for s in samples), np.zeros(n_classes, dtype=np.int64)
    )
    return float(np.abs(_proportions(histogram) - reference).sum())


def stratified_split(
    samples: Sequence[McSample],
    val_fraction: float,
    seed: int,
    n_classes: Optional[int] = None,
) -> Tuple[List[McSample], List[McSample]]:
    """Split samples into sub-training and sub-validation sets with similar class mix.

    Samples are visited by descending labeled-pixel count (ties by name). The
    sub-validation set is grown one sample at a time, always adding the sample
    that brings its class proportions closest (L1) to the global proportions.
    Exact distance ties are broken by a permutation drawn from ``seed``.

    Args:
        samples: Candidate samples, at least two.
        val_fraction: Target share of sub-validation samples, in ``(0, 1)``.
        seed: Seed for tie-breaking.
        n_classes: Number of classes; inferred from the labels when omitted.

    Returns:
        ``(subtrain, subval)``, each in the visiting order.

    Raises:
        InvalidArgumentError: If the fraction is outside ``(0, 1)`` or fewer than
            two samples are given.
    """
    if not 0.0 < val_fraction < 1.0:
        raise InvalidArgumentError(f"Validation fraction {val_fraction} is outside (0, 1).")
    if len(samples) < 2:
        raise InvalidArgumentError(f"Need at least 2 samples to split, got {len(samples)}.")
    if n_classes is None:
        n_classes = 1 + max(
            int(s.labels[s.labels != IGNORE_LABEL].max(initial=0)) for s in samples
        )
    ordered = sorted(samples, key=lambda s: (-s.labeled_pixels(), s.name))
    histograms = [s.class_histogram(n_classes).astype(np.int64) for s in ordered]
    reference = _proportions(np.sum(histograms, axis=0))
    priority = stream(seed, "split").permutation(len(ordered))

    target = split_size(len(ordered), val_fraction)
    chosen: List[int] = []
    current = np.zeros(n_classes, dtype=np.int64)
    for _ in range(target):
        best = None
        for position in range(len(ordered)):
            if position in chosen:
                continue
            distance = float(
                np.abs(_proportions(current + histograms[position]) - reference).sum()
            )
            key = (round(distance, 12), priority[position])
            if best is None or key < best[0]:
                best = (key, position)
        chosen.append(best[1])
        current = current + histograms[best[1]]
    chosen_set = set(chosen)
    subval = [ordered[p] for p in sorted(chosen_set)]
    subtrain = [s for p, s in enumerate(ordered) if p not in chosen_set]
    logger.info(
        "split=stratified n=%d subval=%d l1=%.6f",
        len(ordered),
        len(subval),
        class_distance(subval, reference, n_classes),
    )
    return subtrain, subval


def split_manifest(manifest: DatasetManifest, root: str, val_fraction: float) -> DatasetManifest:
    """Re-tag the train samples of a manifest as ``subtrain``/``subval``."""
    train_paths = manifest.paths(*TRAIN_TAGS)
    samples = []
    for path in train_paths:
        sample = read_sample(os.path.join(root, path))
        samples.append(replace_name(sample, path))
    _, subval = stratified_split(samples, val_fraction, manifest.seed, manifest.n_classes)
    subval_paths = {s.name for s in subval}
    entries = []
    for entry in manifest.samples:
        if entry.split in TRAIN_TAGS:
            tag = "subval" if entry.path in subval_paths else "subtrain"
            entries.append(SampleEntry(path=entry.path, split=tag))
        else:
            entries.append(entry)
    return replace(manifest, samples=entries)


def replace_name(sample: McSample, name: str) -> McSample:
    """Return ``sample`` carrying a different name."""
    return McSample(values=sample.values, labels=sample.labels, name=name)


def channel_moments(samples: Sequence[McSample], n_channels: int) -> Tuple[np.ndarray, np.ndarray]:
    """Per-channel population mean and standard deviation over all pixels."""
    count = 0
    total = np.zeros(n_channels, dtype=np.float64)
    for sample in samples:
        total += sample.values.astype(np.float64).sum(axis=(1, 2))
        count += sample.height * sample.width
    mean = total / count
    squares = np.zeros(n_channels, dtype=np.float64)
    for sample in samples:
        centred = sample.values.astype(np.float64) - mean[:, None, None]
        squares += (centred * centred).sum(axis=(1, 2))
    return mean, np.sqrt(squares / count)


def standardize(manifest: DatasetManifest, root: str) -> Tuple[DatasetManifest, List[int]]:
    """Compute per-channel statistics on the training split and store them.

    Args:
        manifest: Manifest whose train samples (any of ``train``, ``subtrain``,
            ``subval``) define the statistics.
        root: Directory the manifest's sample paths are relative to.

    Returns:
        The manifest with ``normalization`` filled in, and the 1-based ordinals of
        zero-variance channels, whose std was forced to 1.

    Raises:
        InvalidArgumentError: If the training split is empty.
    """
    paths = manifest.paths(*TRAIN_TAGS)
    if not paths:
        raise InvalidArgumentError("Cannot standardize without training samples.")
    samples = [read_sample(os.path.join(root, path)) for path in paths]
    mean, std = channel_moments(samples, manifest.n_channels)
    flagged = [int(c) + 1 for c in np.nonzero(std == 0.0)[0]]
    for channel in flagged:
        logger.warning(
            "channel=%d name=%s variance=0 action=std_forced_to_1",
            channel,
            manifest.channel_names[channel - 1],
        )
    std = np.where(std == 0.0, 1.0, std)
    normalization = [{"mean": float(m), "std": float(s)} for m, s in zip(mean, std)]
    return replace(manifest, normalization=normalization), flagged


def apply_normalization(sample: McSample, normalization: Sequence[Dict[str, float]]) -> McSample:
    """Return the sample with every channel shifted and scaled to its train statistics."""
    mean = np.array([n["mean"] for n in normalization], dtype=np.float64)
    std = np.array([n["std"] for n in normalization], dtype=np.float64)
    values = (sample.values.astype(np.float64) - mean[:, None, None]) / std[:, None, None]
    return McSample(values=values.astype(np.float32), labels=sample.labels, name=sample.name)


@dataclass
class SegmentationDataset:
    """A dataset loaded in memory, grouped by split tag."""

    manifest: DatasetManifest
    splits: Dict[str, List[McSample]]

    @classmethod
    def from_manifest(cls, path: str, normalize: bool = True) -> "SegmentationDataset":
        """Load every sample of a manifest, applying its normalization if present."""
        manifest = DatasetManifest.load(path)
        root = os.path.dirname(os.path.abspath(path))
        splits: Dict[str, List[McSample]] = {tag: [] for tag in SPLIT_TAGS}
        for entry in manifest.samples:
            sample = replace_name(read_sample(os.path.join(root, entry.path)), entry.path)
            sample.validate_labels(manifest.n_classes)
            if sample.channels != manifest.n_channels:
                raise FormatError(
                    f"Sample {entry.path} has {sample.channels} channels, "
                    f"manifest declares {manifest.n_channels}"
                )
            if normalize and manifest.normalization:
                sample = apply_normalization(sample, manifest.normalization)
            splits[entry.split].append(sample)
        logger.info(
            "dataset=%s %s",
            path,
            " ".join(f"{tag}={len(items)}" for tag, items in splits.items()),
        )
        return cls(manifest=manifest, splits=splits)

    @property
    def n_channels(self) -> int:
        """Number of channels."""
        return self.manifest.n_channels

    @property
    def n_classes(self) -> int:
        """Number of classes."""
        return self.manifest.n_classes

    @property
    def channel_names(self) -> List[str]:
        """Ordered channel names."""
        return self.manifest.channel_names

    def split(self, tag: str) -> List[McSample]:
        """Samples carrying the given split tag."""
        return self.splits.get(tag, [])

    def training(self) -> List[McSample]:
        """The sub-training samples, or all train samples of an unsplit dataset."""
        return self.split("subtrain") or self.split("train")

    def validation(self) -> List[McSample]:
        """The sub-validation samples."""
        return self.split("subval")

    def training_pool(self, merged: bool) -> List[McSample]:
        """Training samples, with the sub-validation set appended when ``merged``."""
        pool = list(self.training())
        if merged:
            pool.extend(self.validation())
        return pool

    def test(self) -> List[McSample]:
        """The test samples."""
        return self.split("test")

    def train_pixels(self) -> List[McSample]:
        """Every sample whose pixels count as training data."""
        return [s for tag in TRAIN_TAGS for s in self.split(tag)]

    def transformed(
        self, transform: Callable[[McSample], McSample], channel_names: Sequence[str]
    ) -> "SegmentationDataset":
        """Return a dataset with ``transform`` applied to every sample."""
        manifest = replace(
            self.manifest,
            n_channels=len(channel_names),
            channel_names=list(channel_names),
            normalization=[],
        )
        splits = {tag: [transform(s) for s in items] for tag, items in self.splits.items()}
        return SegmentationDataset(manifest=manifest, splits=splits)


MAX_STATISTIC_PIXELS = 1_000_000


def pixel_matrix(samples: Sequence[McSample], limit: int = MAX_STATISTIC_PIXELS) -> np.ndarray:
    """All pixels of ``samples`` as ``(N, C)`` float64 rows, stride-sampled to at most ``limit``.

    Raises:
        InvalidArgumentError: If there are no samples.
    """
    if not samples:
        raise InvalidArgumentError("No training pixels to estimate statistics on.")
    pixels = np.concatenate(
        [s.values.reshape(s.channels, -1).T for s in samples], axis=0
    ).astype(np.float64)
    step = max(1, math.ceil(pixels.shape[0] / limit))
    return pixels[::step]
