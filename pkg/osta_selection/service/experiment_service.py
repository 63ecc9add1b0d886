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

"""Running an experiment: one recorded cell per method, variant, seed and grid-search member."""

import functools
import json
import logging
import os
from contextlib import contextmanager
from dataclasses import replace
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

import pandas as pd

from ..baselines import entropy_select, pca_extract, run_df, run_sgs, train_combination
from ..baselines.direct import BaselineOutcome
from ..client import LocalRunStore
from ..combinatorics import ChannelCombination, combination_count
from ..config import ExperimentConfig
from ..data.dataset import (
    DatasetManifest,
    SegmentationDataset,
    split_manifest,
    standardize,
)
from ..data.synthetic import MANIFEST_NAME, SIDECAR_NAME, generate_synthetic, load_spec
from ..evaluation.metrics import MetricsReport
from ..exceptions import ConfigError, InvalidStateError, PartialFailureError
from ..selection.config import RunConfig
from ..selection.pipeline import (
    OstaResult,
    checkpoint_path,
    evaluate_test,
    finetune_from_supernet,
    run_osta,
    run_rank_once,
)
from ..substrate.meter import AllocationMeter
from .constants import (
    CHECKPOINT_DIR,
    DATA_DIR,
    ELIMINATION_FILE,
    EXPERIMENT_FILE,
    METRICS_FILE,
    RUN_LOG_FILE,
    SGS_FILE,
    RunStatus,
)
from .experiment_dataclasses import RunRecord, cell_path
from .report import load_sgs_table
from .utils import WorkerPool, log_level, log_to_file, str_to_utc, utc_now

logger = logging.getLogger(__name__)

ELIMINATION_COLUMNS = ["pause", "index", "score"]


def write_json(path: str, document: Dict[str, Any]) -> None:
    """Write a JSON document with sorted keys and a trailing newline."""
    with open(path, "w") as json_out:
        json.dump(document, json_out, indent=2, sort_keys=True)
        json_out.write("\n")


def split_dataset(
    manifest_path: str, val_fraction: float, force: bool = False
) -> DatasetManifest:
    """Split the train samples of a manifest and store train statistics, in place.

    A manifest that already has a sub-validation split is left alone unless
    ``force`` is set.
    """
    manifest = DatasetManifest.load(manifest_path)
    root = os.path.dirname(os.path.abspath(manifest_path))
    if manifest.paths("subval") and not force:
        logger.info("manifest=%s split=exists", manifest_path)
        return manifest
    manifest = split_manifest(manifest, root, val_fraction)
    manifest, flagged = standardize(manifest, root)
    manifest.save(manifest_path)
    logger.info(
        "manifest=%s subtrain=%d subval=%d flagged=%s",
        manifest_path,
        len(manifest.paths("subtrain")),
        len(manifest.paths("subval")),
        flagged,
    )
    return manifest


def prepare_dataset(config: ExperimentConfig) -> SegmentationDataset:
    """Load the configured dataset; a synthetic one is generated and split under the result tree.

    Raises:
        ConfigError: If an on-disk manifest has no sub-validation split.
    """
    manifest_path = config.manifest_path
    if manifest_path is None:
        spec = config.synthetic_spec
        data_dir = os.path.join(config.output_path, DATA_DIR)
        manifest_path = os.path.join(data_dir, MANIFEST_NAME)
        generated = os.path.isfile(manifest_path) and os.path.isfile(
            os.path.join(data_dir, SIDECAR_NAME)
        )
        if not generated or load_spec(data_dir).to_dict() != spec.to_dict():
            generate_synthetic(spec, data_dir)
        split_dataset(manifest_path, config.val_fraction)
    elif not DatasetManifest.load(manifest_path).paths("subval"):
        raise ConfigError(
            f"Manifest {manifest_path} has no sub-validation split; split it first."
        )
    return SegmentationDataset.from_manifest(manifest_path)


def _document(
    method: str,
    config: RunConfig,
    dataset: SegmentationDataset,
    comb: Optional[ChannelCombination],
    result: OstaResult,
    report: MetricsReport,
    indexed: bool = True,
) -> Dict[str, Any]:
    """The per-run metrics document; every report number derives from these."""
    return {
        "method": method,
        "index": comb.index if comb is not None and indexed else None,
        "combination": list(comb.channels) if comb is not None else None,
        "universe": dataset.n_channels,
        "channel_names": list(dataset.channel_names),
        "k": config.k,
        "metric": config.metric,
        "accuracy": report.accuracy,
        "report": report.to_dict(),
        "strategy": result.strategy,
        "final_loss": result.final_loss,
        "patches_per_epoch": result.patches_per_epoch,
        "eliminated": result.elimination_rows(),
        "scores": {str(index): score for index, score in sorted(result.scores.items())},
        "run": config.to_dict(),
    }


def _outcome_document(
    outcome: BaselineOutcome, config: RunConfig, dataset: SegmentationDataset, indexed: bool
) -> Dict[str, Any]:
    return _document(
        outcome.method,
        config,
        dataset,
        outcome.combination,
        outcome.result,
        outcome.report,
        indexed,
    )


class ExperimentService:
    """Runs the cells of an experiment and records them in its result tree.

    A cell already recorded as done, with its metrics file on disk, is skipped
    unless ``force`` is set. Independent cells run on a pool of
    ``config.workers`` threads; fine-tuning cells run after the supernet runs
    they start from.
    """

    def __init__(self, config: ExperimentConfig, force: bool = False):
        self.config = config.validate()
        self.root = config.output_path
        self.force = force
        self.store = LocalRunStore(self.root)
        self._dataset: Optional[SegmentationDataset] = None

    @property
    def dataset(self) -> SegmentationDataset:
        """The experiment's dataset, prepared on first use."""
        if self._dataset is None:
            self._dataset = prepare_dataset(self.config)
        return self._dataset

    def run(self) -> List[RunRecord]:
        """Run every pending cell.

        Returns:
            All runs recorded in the result tree.

        Raises:
            PartialFailureError: If some cells failed; the others are kept.
        """
        with log_level(logging.INFO):
            os.makedirs(self.root, exist_ok=True)
            self._save_config()
            _ = self.dataset
            methods = self.config.methods
            failed: List[Dict] = []
            independent = [
                (method, seed, variant)
                for seed in self.config.seeds
                for method in methods
                if method not in ("sgs", "finetune_from_supernet")
                for variant in self.config.variant_names(method)
            ]
            failed.extend(self._run_cells(independent))
            if "sgs" in methods:
                for seed in self.config.seeds:
                    failed.extend(self._run_sgs(seed))
            if "finetune_from_supernet" in methods:
                finetune = [
                    ("finetune_from_supernet", seed, variant)
                    for seed in self.config.seeds
                    for variant in self.config.variant_names("finetune_from_supernet")
                ]
                failed.extend(self._run_cells(finetune))
            runs = self.store.runs()
            logger.info(
                "experiment=%s runs=%d failed=%d", self.root, len(runs), len(failed)
            )
        if failed:
            raise PartialFailureError(
                f"{len(failed)} runs failed; completed runs are kept in {self.root}.",
                failed=failed,
            )
        return runs

    def _save_config(self) -> None:
        resolved = replace(self.config, output_dir=".", base_dir=self.root)
        if self.config.manifest_path is not None:
            dataset = {**self.config.dataset, "manifest": self.config.manifest_path}
            resolved = replace(resolved, dataset=dataset)
        resolved.save(os.path.join(self.root, EXPERIMENT_FILE), overwrite=True)

    def _run_cells(self, cells: List[Tuple[str, int, str]]) -> List[Dict]:
        if not cells:
            return []
        _, failures = WorkerPool(cells, self._run_cell, max_workers=self.config.workers).results()
        failed = []
        for failure in failures:
            method, seed, variant = failure["data"]
            failed.append(
                {
                    "path": cell_path(method, seed, variant),
                    "error": str(failure["exception"]),
                }
            )
        return failed

    def _run_cell(self, method: str, seed: int, variant: str) -> RunRecord:
        config = self.config.run_config(variant, seed)
        runners: Dict[str, Callable[[RunConfig, str], Dict[str, Any]]] = {
            "osta": self._osta,
            "rank_once": self._rank_once,
            "finetune_from_supernet": functools.partial(self._finetune, variant=variant),
            "df": self._df,
            "pca": self._pca,
            "entropy_select": self._entropy_select,
        }
        runner = runners[method]
        return self._execute(
            RunRecord(method=method, seed=seed, variant=variant),
            lambda cell_dir: runner(config, cell_dir),
        )

    def _execute(
        self, record: RunRecord, work: Callable[[str], Dict[str, Any]]
    ) -> RunRecord:
        if not self.force and self.store.is_complete(
            record.method, record.seed, record.variant, record.index
        ):
            logger.info("run=%s status=skipped", record.path)
            return self.store.get(record.method, record.seed, record.variant, record.index)
        with self._cell(record) as cell_dir:
            document = work(cell_dir)
            self._complete(record, cell_dir, document)
        return record

    @contextmanager
    def _cell(self, record: RunRecord) -> Iterator[str]:
        cell_dir = os.path.join(self.root, record.path)
        os.makedirs(cell_dir, exist_ok=True)
        with log_to_file(os.path.join(cell_dir, RUN_LOG_FILE)):
            logger.info("run=%s status=started", record.path)
            try:
                yield cell_dir
            except Exception:
                logger.exception("run=%s status=failed", record.path)
                self.store.record(replace(record, status=RunStatus.FAILED))
                raise

    def _complete(self, record: RunRecord, cell_dir: str, document: Dict[str, Any]) -> None:
        completed_at = utc_now()
        document.update(
            {
                "method": record.method,
                "variant": record.variant,
                "seed": record.seed,
                "completed_at": completed_at,
            }
        )
        write_json(os.path.join(cell_dir, METRICS_FILE), document)
        record.status = RunStatus.DONE
        record.accuracy = document["accuracy"]
        record.completed_at = str_to_utc(completed_at)
        self.store.record(record)
        logger.info("run=%s status=done accuracy=%.4f", record.path, record.accuracy)

    # runners

    def _selection_document(
        self, config: RunConfig, cell_dir: str, result: OstaResult, method: str
    ) -> Dict[str, Any]:
        report = evaluate_test(result.params, result.scc, self.dataset, config)
        report.instrumentation = result.instrumentation
        frame = pd.DataFrame(result.elimination_rows(), columns=ELIMINATION_COLUMNS)
        frame.to_csv(os.path.join(cell_dir, ELIMINATION_FILE), index=False, lineterminator="\n")
        return _document(method, config, self.dataset, result.scc, result, report)

    def _osta(self, config: RunConfig, cell_dir: str) -> Dict[str, Any]:
        if "finetune_from_supernet" in self.config.methods:
            save_points = set(config.checkpoint_iterations) | {config.schedule.pruning_start}
            config = replace(config, checkpoint_iterations=sorted(save_points))
        result = run_osta(
            config,
            self.dataset,
            meter=AllocationMeter(),
            checkpoint_dir=os.path.join(cell_dir, CHECKPOINT_DIR),
        )
        return self._selection_document(config, cell_dir, result, "osta")

    def _rank_once(self, config: RunConfig, cell_dir: str) -> Dict[str, Any]:
        result = run_rank_once(
            config,
            self.dataset,
            meter=AllocationMeter(),
            checkpoint_dir=os.path.join(cell_dir, CHECKPOINT_DIR),
        )
        return self._selection_document(config, cell_dir, result, "rank_once")

    def _finetune(self, config: RunConfig, _cell_dir: str, variant: str) -> Dict[str, Any]:
        source = os.path.join(self.root, cell_path("osta", config.seed, variant))
        metrics_file = os.path.join(source, METRICS_FILE)
        if not os.path.isfile(metrics_file):
            raise InvalidStateError(f"No finished supernet run in {source}.")
        with open(metrics_file) as json_in:
            selected = json.load(json_in)
        comb = ChannelCombination.of(selected["combination"], self.dataset.n_channels)
        checkpoint = checkpoint_path(
            os.path.join(source, CHECKPOINT_DIR), config.schedule.pruning_start
        )
        if not os.path.isfile(checkpoint):
            raise InvalidStateError(
                f"Supernet checkpoint {checkpoint} is missing; re-run 'osta' with force."
            )
        result = finetune_from_supernet(
            checkpoint, comb, config, self.dataset, meter=AllocationMeter()
        )
        report = evaluate_test(result.params, comb, self.dataset, config)
        report.instrumentation = result.instrumentation
        return _document("finetune_from_supernet", config, self.dataset, comb, result, report)

    def _df(self, config: RunConfig, cell_dir: str) -> Dict[str, Any]:
        outcome = run_df(
            self.dataset,
            config,
            meter=AllocationMeter(),
            checkpoint_dir=os.path.join(cell_dir, CHECKPOINT_DIR),
        )
        return _outcome_document(outcome, config.fixed_to(outcome.combination), self.dataset, False)

    def _pca(self, config: RunConfig, cell_dir: str) -> Dict[str, Any]:
        transformed, model = pca_extract(self.dataset, m=config.k)
        components = ChannelCombination.of(range(1, model.m + 1), model.m)
        outcome = train_combination(
            "pca",
            components,
            transformed,
            config,
            meter=AllocationMeter(),
            checkpoint_dir=os.path.join(cell_dir, CHECKPOINT_DIR),
        )
        document = _outcome_document(outcome, config.fixed_to(components), transformed, False)
        document["pca"] = {
            "explained_variance": [float(v) for v in model.explained_variance],
            "flagged": [int(c) for c in model.flagged],
        }
        return document

    def _entropy_select(self, config: RunConfig, cell_dir: str) -> Dict[str, Any]:
        comb = entropy_select(self.dataset, m=config.k)
        outcome = train_combination(
            "entropy_select",
            comb,
            self.dataset,
            config,
            meter=AllocationMeter(),
            checkpoint_dir=os.path.join(cell_dir, CHECKPOINT_DIR),
        )
        return _outcome_document(outcome, config.fixed_to(comb), self.dataset, True)

    # grid search

    def _run_sgs(self, seed: int) -> List[Dict]:
        config = self.config.run_config("", seed)
        universe = self.dataset.n_channels
        total = combination_count(universe, config.k)
        pending = [
            index
            for index in range(1, total + 1)
            if self.force or not self.store.is_complete("sgs", seed, "", index)
        ]
        failed: List[Dict] = []
        if pending:
            logger.info("sgs seed=%d members=%d pending=%d", seed, total, len(pending))

            def member_context(comb: ChannelCombination):
                return self._cell(RunRecord(method="sgs", seed=seed, index=comb.index))

            def persist(outcome: BaselineOutcome) -> None:
                record = RunRecord(method="sgs", seed=seed, index=outcome.combination.index)
                document = _outcome_document(
                    outcome, config.fixed_to(outcome.combination), self.dataset, True
                )
                self._complete(record, os.path.join(self.root, record.path), document)

            table = run_sgs(
                self.dataset,
                config.k,
                config,
                seed,
                workers=self.config.workers,
                indices=pending,
                on_member=persist,
                member_context=member_context,
            )
            failed = [
                {"path": cell_path("sgs", seed, index=index), "error": "training failed"}
                for index in table.failed
            ]
        table = load_sgs_table(self.root, seed, universe, config.k)
        if len(table):
            table.to_csv(os.path.join(self.root, cell_path("sgs", seed), SGS_FILE))
        return failed


def run_experiment(config: ExperimentConfig, force: bool = False) -> List[RunRecord]:
    """Run every cell of an experiment under ``config.output_dir``.

    Each cell directory holds ``metrics.json``, ``run.log`` and its checkpoints;
    ``runs.json`` at the root lists every recorded run.

    Raises:
        ConfigError: If the configuration is invalid.
        PartialFailureError: If some cells failed.
    """
    return ExperimentService(config, force=force).run()
