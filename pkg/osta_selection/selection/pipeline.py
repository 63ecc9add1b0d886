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

"""The one-shot selection pipeline and its run modes.

A run trains one set of shared parameters. During supernet training every
iteration draws one IC uniformly from the remaining set; the pruning stage
pauses ``C(n, k) - 1`` times, scores every remaining IC forward-only and drops
the worst; fine-tuning trains the surviving IC with the sub-validation samples
merged into the training pool. At a pause the order is evaluate, prune, then
train that iteration. Momentum buffers carry over between stages.
"""

import logging
import math
import os
import time
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

from ..combinatorics import ChannelCombination, enumerate_combinations
from ..data.batching import PatchSet, sample_batch
from ..data.dataset import SegmentationDataset
from ..evaluation.metrics import MetricsReport, RunInstrumentation
from ..exceptions import InvalidArgumentError, NonFiniteError
from ..substrate.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from ..substrate.meter import AllocationMeter
from ..substrate.model import ModelParams, arch_hash, init_params, loss_and_grads
from ..substrate.optimizer import OptimizerState, sgd_step
from ..substrate.rng import stream
from ..service.utils import run_parallel
from .config import RunConfig
from .criteria import CriterionScorer
from .schedule import Stage, lr_at, pause_schedule, stage_of
from .supernet import Elimination, SupernetState, evaluate_confusion, prune_step, sample_ic

logger = logging.getLogger(__name__)

CHECKPOINT_PATTERN = "iter-{:06d}.ostk"


@dataclass
class OstaResult:
    """Outcome of a selection or training run."""

    scc: ChannelCombination
    params: ModelParams
    strategy: str
    eliminated: List[Elimination] = field(default_factory=list)
    scores: Dict[int, float] = field(default_factory=dict)
    final_loss: float = math.nan
    instrumentation: RunInstrumentation = field(default_factory=RunInstrumentation)
    patches_per_epoch: int = 0

    def elimination_rows(self) -> List[List]:
        """``pause,index,score`` rows of the elimination log."""
        return [e.to_row() for e in self.eliminated]


def checkpoint_path(directory: str, iteration: int) -> str:
    """File name of the checkpoint taken before ``iteration``."""
    return os.path.join(directory, CHECKPOINT_PATTERN.format(iteration))


def initial_params(config: RunConfig, k_in: int, n_classes: int) -> ModelParams:
    """Random parameters from the init seed, or the parameters of a checkpoint.

    Raises:
        FormatError: If the checkpoint belongs to another architecture.
    """
    if config.init.mode == "checkpoint":
        loaded = load_checkpoint(config.init.path, expected_arch=arch_hash(k_in, n_classes))
        logger.info("init=checkpoint path=%s", config.init.path)
        return loaded.params
    return init_params(k_in, n_classes, config.init_seed)


class _Run:
    """Single-writer training loop shared by every run mode."""

    def __init__(
        self,
        config: RunConfig,
        dataset: SegmentationDataset,
        state: SupernetState,
        meter: Optional[AllocationMeter],
        checkpoint_dir: Optional[str],
    ):
        self.config = config
        self.dataset = dataset
        self.state = state
        self.meter = meter or AllocationMeter()
        self.checkpoint_dir = checkpoint_dir
        self.save_points = set(config.checkpoint_iterations)
        self.instrumentation = RunInstrumentation()
        self.stage_seconds: Dict[str, float] = defaultdict(float)
        self.last_loss = math.nan
        self.subtrain = dataset.training_pool(merged=False)
        self.merged = dataset.training_pool(merged=True)
        if checkpoint_dir:
            os.makedirs(checkpoint_dir, exist_ok=True)

    def maybe_checkpoint(self, iteration: int) -> None:
        if self.checkpoint_dir and iteration in self.save_points:
            save_checkpoint(
                checkpoint_path(self.checkpoint_dir, iteration), self.state.to_checkpoint()
            )

    def train(self, iteration: int, merged: bool, stage: str) -> None:
        state = self.state
        started = time.perf_counter()
        if len(state.remaining) == 1:
            ic = state.remaining[0]
        else:
            ic = sample_ic(state.remaining, stream(state.seed, "ic", iteration, state.key))
        pool = self.merged if merged else self.subtrain
        values, labels = sample_batch(
            pool,
            ic,
            self.config.batch_size,
            self.config.patch_size,
            stream(state.seed, "batch", iteration, state.key),
        )
        with self.meter.phase("train"):
            loss, grads, _ = loss_and_grads(state.params, values, labels, self.meter)
        if not math.isfinite(loss):
            logger.error("iteration=%d ic=%d loss=%s", iteration, ic.index, loss)
            raise NonFiniteError(f"Non-finite loss at iteration {iteration}.", iteration=iteration)
        lr = lr_at(iteration, self.config.schedule)
        sgd_step(state.params, grads, lr, state.optimizer, iteration)
        state.iteration = iteration + 1
        self.last_loss = loss
        elapsed = time.perf_counter() - started
        self.stage_seconds[stage] += elapsed
        self.instrumentation.train_seconds += elapsed
        self.instrumentation.train_iterations += 1
        logger.debug(
            "iteration=%d stage=%s ic=%d lr=%.6g loss=%.6f", iteration, stage, ic.index, lr, loss
        )

    def score_all(self, scorer: CriterionScorer) -> Dict[int, float]:
        """Scores of every remaining IC; parameters are only read."""
        params = self.state.params

        def score_one(comb: ChannelCombination):
            local = AllocationMeter()
            with local.phase("prune"):
                value = scorer.score(params, comb, local)
            return comb.index, value, local.peak("prune")

        results = run_parallel(self.state.remaining, score_one, self.config.eval_workers)
        for _, _, peak in results:
            self.meter.merge_peak("prune", peak)
        return {index: value for index, value, _ in results}

    def finish(self, strategy: str, started: float, scores=None) -> OstaResult:
        instrumentation = self.instrumentation
        instrumentation.wall_seconds = time.perf_counter() - started
        instrumentation.stage_seconds = dict(self.stage_seconds)
        instrumentation.peaks = self.meter.peaks
        instrumentation.peak_bytes = self.meter.peak()
        state = self.state
        return OstaResult(
            scc=state.remaining[0],
            params=state.params,
            strategy=strategy,
            eliminated=list(state.eliminated),
            scores=dict(scores or {}),
            final_loss=self.last_loss,
            instrumentation=instrumentation,
        )


def _initial_state(config: RunConfig, dataset: SegmentationDataset) -> SupernetState:
    universe = dataset.n_channels
    if config.strategy == "none":
        fixed = config.fixed_combination(universe)
        candidates, key = [fixed], fixed.index
    else:
        candidates, key = enumerate_combinations(universe, config.k), 0
    params = initial_params(config, config.k, dataset.n_classes)
    return SupernetState(
        params=params,
        optimizer=OptimizerState.for_params(params),
        remaining=candidates,
        universe=universe,
        k=config.k,
        seed=config.seed,
        key=key,
    )


def run_osta(
    config: RunConfig,
    dataset: SegmentationDataset,
    meter: Optional[AllocationMeter] = None,
    checkpoint_dir: Optional[str] = None,
    resume: Optional[Checkpoint] = None,
) -> OstaResult:
    """Run the selection pipeline under ``config.strategy``.

    ``progressive`` prunes one IC per scheduled pause; ``rank_once`` scores all
    ICs once at the end of supernet training and keeps the best; ``none`` trains
    the fixed combination alone on the merged training pool.

    Args:
        config: Run configuration.
        dataset: Dataset with sub-train, sub-validation and test splits.
        meter: Allocation meter receiving ``train`` and ``prune`` peaks.
        checkpoint_dir: Directory for the checkpoints listed in
            ``config.checkpoint_iterations``.
        resume: Checkpoint of an interrupted run with the same configuration.

    Returns:
        The selected combination with its trained parameters.

    Raises:
        InvalidArgumentError: If the configuration is illegal for the dataset.
        NonFiniteError: If the loss or a gradient stops being finite.
        FormatError: If a checkpoint does not fit the architecture.
    """
    config.validate()
    started = time.perf_counter()
    if resume is not None:
        key = 0
        if config.strategy == "none":
            key = config.fixed_combination(dataset.n_channels).index
        state = SupernetState.from_checkpoint(resume, key)
        if state.params.arch_hash() != arch_hash(config.k, dataset.n_classes):
            raise InvalidArgumentError("Resume checkpoint does not match the configuration.")
    else:
        state = _initial_state(config, dataset)
    schedule = config.schedule
    run = _Run(config, dataset, state, meter, checkpoint_dir)

    pauses: Dict[int, int] = {}
    scorer = None
    if config.strategy != "none":
        scorer = CriterionScorer(config, dataset, state.key)
    initial = len(state.remaining) + len(state.eliminated)
    if config.strategy == "progressive" and initial > 1:
        plan = pause_schedule(schedule, initial)
        pauses = {iteration: j for j, iteration in enumerate(plan.pauses, 1)}
        logger.info("strategy=progressive ics=%d pauses=%d", initial, plan.n_pauses)
    rank_at = schedule.pruning_start
    rank_scores: Dict[int, float] = {}

    def pause_if_due(iteration: int) -> None:
        pause = pauses.get(iteration)
        if pause is None or pause != len(state.eliminated) + 1:
            return
        paused = time.perf_counter()
        prune_step(state, run.score_all(scorer), pause)
        run.stage_seconds[Stage.PRUNING.value] += time.perf_counter() - paused

    for iteration in range(state.iteration, schedule.total_iterations):
        run.maybe_checkpoint(iteration)
        pause_if_due(iteration)
        if config.strategy == "rank_once" and iteration == rank_at and len(state.remaining) > 1:
            rank_scores = run.score_all(scorer)
            best = max(state.remaining, key=lambda c: (rank_scores[c.index], -c.index))
            state.remaining = [best]
            logger.info(
                "rank_once iteration=%d selected=%d score=%.6f",
                iteration,
                best.index,
                rank_scores[best.index],
            )
        stage = stage_of(iteration, schedule)
        merged = (
            config.strategy == "none"
            or stage is Stage.FINE_TUNING
            or (config.strategy == "rank_once" and iteration >= rank_at)
        )
        run.train(iteration, merged, stage.value)
    run.maybe_checkpoint(schedule.total_iterations)
    pause_if_due(schedule.total_iterations)

    if scorer is not None:
        run.instrumentation.eval_seconds = scorer.seconds
        run.instrumentation.eval_batches = scorer.batches
    result = run.finish(config.strategy, started, rank_scores)
    result.patches_per_epoch = scorer.patches_per_epoch if scorer is not None else 0
    logger.info(
        "strategy=%s scc=%s final_loss=%.6f seconds=%.2f",
        config.strategy,
        result.scc,
        result.final_loss,
        result.instrumentation.wall_seconds,
    )
    return result


def run_rank_once(
    config: RunConfig,
    dataset: SegmentationDataset,
    meter: Optional[AllocationMeter] = None,
    checkpoint_dir: Optional[str] = None,
) -> OstaResult:
    """Score every IC once at the end of supernet training and fine-tune the best.

    The iterations otherwise spent pruning are merged into fine-tuning.
    """
    return run_osta(replace(config, strategy="rank_once"), dataset, meter, checkpoint_dir)


def finetune_from_supernet(
    checkpoint: str,
    comb: ChannelCombination,
    config: RunConfig,
    dataset: SegmentationDataset,
    iterations: Optional[int] = None,
    meter: Optional[AllocationMeter] = None,
) -> OstaResult:
    """Fine-tune a stage-1 supernet checkpoint directly on ``comb``.

    Training continues from the checkpoint's iteration with its momentum
    buffers, on the merged pool, under the poly part of the learning-rate law.

    Args:
        checkpoint: Path of the end-of-supernet-training checkpoint.
        comb: Combination to fine-tune.
        config: Run configuration providing the schedule, batch and seed.
        dataset: Dataset to train on.
        iterations: Fine-tuning iterations; defaults to the rest of the budget.
        meter: Allocation meter.

    Raises:
        FormatError: If the checkpoint belongs to another architecture.
    """
    config.validate()
    started = time.perf_counter()
    loaded = load_checkpoint(checkpoint, expected_arch=arch_hash(comb.k, dataset.n_classes))
    state = SupernetState(
        params=loaded.params,
        optimizer=loaded.optimizer,
        remaining=[comb],
        universe=dataset.n_channels,
        k=comb.k,
        seed=config.seed,
        key=comb.index,
        iteration=loaded.iteration,
    )
    total = config.schedule.total_iterations
    end = total if iterations is None else min(total, loaded.iteration + iterations)
    run = _Run(config, dataset, state, meter, None)
    for iteration in range(loaded.iteration, end):
        run.train(iteration, merged=True, stage=Stage.FINE_TUNING.value)
    result = run.finish("finetune", started)
    logger.info("finetune=%s from=%s iterations=%d", comb, checkpoint, end - loaded.iteration)
    return result


def evaluate_test(
    params: ModelParams,
    comb: Optional[ChannelCombination],
    dataset: SegmentationDataset,
    config: RunConfig,
    meter: Optional[AllocationMeter] = None,
) -> MetricsReport:
    """Accuracy figures of ``params`` fed with ``comb`` on the test split."""
    eval_set = PatchSet.from_samples(dataset.test(), config.patch_size)
    conf = evaluate_confusion(params, comb, eval_set, config.batch_size, meter)
    return MetricsReport.from_confusion(conf, config.metric)
