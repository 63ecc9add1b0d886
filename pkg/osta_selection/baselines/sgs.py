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

"""Supervised grid search over every channel combination."""

import logging
from contextlib import nullcontext
from typing import Callable, ContextManager, Dict, Optional, Sequence

from ..combinatorics import ChannelCombination, combination_from_index, enumerate_combinations
from ..data.dataset import SegmentationDataset
from ..evaluation.sgs_table import SgsTable
from ..exceptions import InvalidArgumentError
from ..selection.config import RunConfig
from ..service.utils import WorkerPool
from .direct import BaselineOutcome, train_combination

logger = logging.getLogger(__name__)


def run_sgs(
    dataset: SegmentationDataset,
    k: int,
    train_config: RunConfig,
    base_seed: int,
    workers: int = 1,
    indices: Optional[Sequence[int]] = None,
    on_member: Optional[Callable[[BaselineOutcome], None]] = None,
    member_context: Optional[Callable[[ChannelCombination], ContextManager]] = None,
) -> SgsTable:
    """Train every k-of-n combination independently and record its test accuracy.

    Each member is plain single-combination training seeded by ``base_seed``;
    its random streams are keyed by the combination index, and all members
    share the initialization drawn from ``base_seed``. Members run on a bounded
    worker pool and the table is merged by index.

    Args:
        dataset: Dataset to train and test on.
        k: Subset size.
        train_config: Training settings shared by every member.
        base_seed: Seed of the whole search.
        workers: Concurrent member trainings.
        indices: Members to run, in any order; all combinations by default.
        on_member: Called with each finished member, e.g. to persist it.
        member_context: Factory of a context each member trains inside, e.g. a
            per-member log file.

    Returns:
        The table; ``partial`` is set and ``failed`` lists the members whose
        training aborted.
    """
    universe = dataset.n_channels
    if indices is None:
        combinations = enumerate_combinations(universe, k)
    else:
        combinations = [combination_from_index(universe, k, i) for i in indices]
    if not combinations:
        raise InvalidArgumentError("No grid-search members to run.")
    config = train_config.fixed_to(combinations[0], base_seed)

    def member(comb):
        with member_context(comb) if member_context is not None else nullcontext():
            outcome = train_combination("sgs", comb, dataset, config, base_seed)
            if on_member is not None:
                on_member(outcome)
        return outcome

    done, failed = WorkerPool(combinations, member, max_workers=workers).results()
    accuracies: Dict[int, float] = {comb.index: o.accuracy for comb, o in done}
    table = SgsTable(
        universe,
        k,
        seed=base_seed,
        rows=sorted(accuracies.items()),
        failed=[f["data"].index for f in failed],
    )
    for failure in failed:
        logger.error(
            "sgs member=%d error=%s", failure["data"].index, failure["exception"]
        )
    logger.info(
        "sgs n=%d k=%d rows=%d failed=%d seed=%d",
        universe,
        k,
        len(table),
        len(failed),
        base_seed,
    )
    return table
