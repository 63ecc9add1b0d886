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

"""Utility functions for the OSTA selection tests."""

import logging
import os
from typing import Iterable, List, Optional

import numpy as np

from osta_selection.data import McSample, SegmentationDataset, SyntheticSpec, generate_synthetic
from osta_selection.evaluation import ConfusionMatrix, MetricsReport, RunInstrumentation
from osta_selection.selection import RunConfig, ScheduleConfig
from osta_selection.service import cell_path, load_sgs_table, split_dataset
from osta_selection.service.constants import METRICS_FILE, NO_INDEX, SGS_FILE
from osta_selection.service.experiment_service import write_json


def setup_test_logging(logger: logging.Logger, filename: str):
    """Set logging to file and stdout for a logger.

    Args:
        logger: Logger object to be updated.
        filename: Name of the output file, if log to file is enabled.
    """
    # Set up formatter.
    log_fmt = f"{logger.name}.%(funcName)s:%(levelname)s:%(asctime)s: %(message)s"
    formatter = logging.Formatter(log_fmt)

    if os.getenv("STREAM_LOG", "true").lower() == "true":
        # Set up the stream handler.
        stream_handler = logging.StreamHandler()
        stream_handler.setFormatter(formatter)
        logger.addHandler(stream_handler)

    if os.getenv("FILE_LOG", "false").lower() == "true":
        file_handler = logging.FileHandler(filename)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    logger.setLevel(os.getenv("LOG_LEVEL", "WARNING"))


def tiny_spec(**overrides) -> SyntheticSpec:
    """Four-channel planted dataset small enough to train on in a test."""
    recipe = {
        "n_channels": 4,
        "planted": (1, 3),
        "n_redundant": 1,
        "n_distractor": 1,
        "n_classes": 2,
        "height": 16,
        "width": 16,
        "samples": {"train": 6, "test": 2},
        "snr": 3.0,
        "seed": 0,
    }
    recipe.update(overrides)
    return SyntheticSpec(**recipe)


def tiny_run_config(**overrides) -> RunConfig:
    """Three-of-four selection over 20 iterations on 16 pixel patches."""
    settings = {
        "k": 3,
        "schedule": ScheduleConfig(total_iterations=20),
        "batch_size": 2,
        "patch_size": 16,
        "seed": 0,
    }
    settings.update(overrides)
    return RunConfig(**settings)


def tiny_run_dict(**overrides) -> dict:
    """The JSON form of :func:`tiny_run_config`."""
    return tiny_run_config(**overrides).to_dict()


def build_dataset(
    directory: str, spec: Optional[SyntheticSpec] = None, val_fraction: float = 0.25
) -> SegmentationDataset:
    """Generate, split and load a synthetic dataset under ``directory``."""
    _, manifest_path = generate_synthetic(spec or tiny_spec(), directory)
    split_dataset(manifest_path, val_fraction)
    return SegmentationDataset.from_manifest(manifest_path)


def random_sample(
    rng: np.random.Generator,
    channels: int,
    height: int,
    width: int,
    n_classes: int = 3,
    name: str = "",
) -> McSample:
    """A sample with normal values and uniform labels."""
    return McSample(
        values=rng.normal(size=(channels, height, width)).astype(np.float32),
        labels=rng.integers(0, n_classes, size=(height, width)).astype(np.uint8),
        name=name,
    )


def recall_counts(hits: int, total: int) -> List[List[int]]:
    """Two-class confusion counts whose classes are both recalled ``hits`` of ``total`` times."""
    return [[hits, total - hits], [total - hits, hits]]


def write_run(
    root: str,
    method: str,
    seed: int,
    counts: List[List[int]],
    index: Optional[int] = None,
    variant: str = "",
    instrumentation: Optional[RunInstrumentation] = None,
    **fields,
) -> str:
    """Write the metrics file of a finished run without training; returns its directory.

    Accuracies are mean per-class accuracies of ``counts`` on an 8-channel, k=3 universe.
    """
    report = MetricsReport.from_confusion(ConfusionMatrix.from_list(counts), "ma")
    report.instrumentation = instrumentation or RunInstrumentation()
    document = {
        "method": method,
        "variant": variant,
        "seed": seed,
        "index": index,
        "universe": 8,
        "k": 3,
        "metric": "ma",
        "accuracy": report.accuracy,
        "report": report.to_dict(),
        "strategy": "progressive" if method == "osta" else "none",
        "patches_per_epoch": 0,
        "run": {"batch_size": 16, "schedule": {"total_iterations": 10000}},
    }
    document.update(fields)
    member = index if method == "sgs" else NO_INDEX
    directory = os.path.join(root, cell_path(method, seed, variant, member))
    os.makedirs(directory, exist_ok=True)
    write_json(os.path.join(directory, METRICS_FILE), document)
    return directory


def write_sgs_tree(root: str, seeds: Iterable[int]) -> None:
    """Grid-search members of 3-of-8 combinations where index ``i`` scores ``40 + i/2``."""
    for seed in seeds:
        for index in range(1, 57):
            write_run(root, "sgs", seed, recall_counts(80 + index, 200), index=index)
        table = load_sgs_table(root, seed, 8, 3)
        table.to_csv(os.path.join(root, cell_path("sgs", seed), SGS_FILE))
