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

"""Tests for IC sampling, evaluation and pruning."""

from collections import Counter
from test.osta_test_case import OstaTestCase
from test.utils.utils import random_sample

import numpy as np
from scipy import stats

from osta_selection.combinatorics import ChannelCombination, enumerate_combinations
from osta_selection.data import McSample, PatchSet
from osta_selection.evaluation import ConfusionMatrix, metric_value
from osta_selection.exceptions import InvalidArgumentError, InvalidStateError
from osta_selection.selection import SupernetState, evaluate_ic, prune_step, sample_ic
from osta_selection.substrate import OptimizerState, init_params, predict, stream
from osta_selection.substrate.model import zero_params


def _state(universe: int = 8, k: int = 3) -> SupernetState:
    params = init_params(k, 2, seed=0)
    return SupernetState(
        params=params,
        optimizer=OptimizerState.for_params(params),
        remaining=enumerate_combinations(universe, k),
        universe=universe,
        k=k,
    )


def _sign_oracle():
    params = zero_params(1, 2)
    params.tensors["conv1.weight"][0, 0, 1, 1] = 1.0
    params.tensors["conv1.weight"][1, 0, 1, 1] = -1.0
    params.tensors["conv2.weight"][0, 0, 1, 1] = 1.0
    params.tensors["conv2.weight"][1, 1, 1, 1] = 1.0
    params.tensors["head.weight"][1, 0] = 10.0
    params.tensors["head.weight"][0, 1] = 10.0
    return params


class TestSampleIc(OstaTestCase):
    """Test uniform IC draws."""

    def test_singleton(self):
        """Test that a single remaining IC is always drawn."""
        only = ChannelCombination.of([2, 5, 7], 8)
        for iteration in range(10):
            self.assertEqual(sample_ic([only], stream(0, "ic", iteration)), only)

    def test_empty(self):
        """Test that an empty set cannot be sampled."""
        with self.assertRaises(InvalidStateError):
            sample_ic([], stream(0, "ic"))

    def test_deterministic(self):
        """Test that the iteration stream fixes the draw."""
        remaining = enumerate_combinations(8, 3)
        first = [sample_ic(remaining, stream(4, "ic", i)) for i in range(50)]
        second = [sample_ic(remaining, stream(4, "ic", i)) for i in range(50)]
        self.assertEqual(first, second)

    def test_uniform(self):
        """Test that draws over 56 ICs pass a chi-square test."""
        remaining = enumerate_combinations(8, 3)
        counts = Counter(sample_ic(remaining, stream(1, "ic", i)).index for i in range(56000))
        observed = [counts[c.index] for c in remaining]
        self.assertTrue(all(800 <= value <= 1200 for value in observed))
        self.assertGreater(stats.chisquare(observed).pvalue, 0.001)


class TestPruneStep(OstaTestCase):
    """Test removal of the worst IC."""

    def test_removes_lowest(self):
        """Test that the lowest score is removed and logged."""
        state = _state(universe=4)
        prune_step(state, {1: 0.4, 2: 0.1, 3: 0.9, 4: 0.5}, pause=1)
        self.assertEqual(state.remaining_indices, [1, 3, 4])
        self.assertEqual(state.eliminated[0].to_row(), [1, 2, 0.1])

    def test_ties_remove_largest_index(self):
        """Test that tied lowest scores remove the largest index."""
        state = _state(universe=4)
        prune_step(state, {1: 0.5, 2: 0.5, 3: 0.9, 4: 0.7}, pause=1)
        self.assertEqual(state.remaining_indices, [1, 3, 4])

    def test_nan_is_lowest(self):
        """Test that a NaN score is removed first."""
        state = _state(universe=4)
        prune_step(state, {1: float("nan"), 2: 0.1, 3: 0.2, 4: 0.3}, pause=1)
        self.assertEqual(state.remaining_indices, [2, 3, 4])

    def test_invalid(self):
        """Test mismatched scores and a single remaining IC."""
        state = _state(universe=4)
        with self.assertRaises(InvalidArgumentError):
            prune_step(state, {1: 0.1, 2: 0.2, 3: 0.3}, pause=1)
        single = _state(universe=3)
        with self.assertRaises(InvalidStateError):
            prune_step(single, {1: 0.5}, pause=1)

    def test_prunes_down_to_one(self):
        """Test that repeated pruning ends with exactly one IC."""
        state = _state()
        rng = np.random.default_rng(8)
        for pause in range(1, 56):
            self.assertEqual(len(state.remaining), 57 - pause)
            prune_step(state, {i: float(rng.random()) for i in state.remaining_indices}, pause)
        self.assertEqual(len(state.remaining), 1)
        removed = [e.index for e in state.eliminated]
        self.assertEqual(len(set(removed)), 55)
        self.assertNotIn(state.remaining[0].index, removed)
        self.assertEqual([e.pause for e in state.eliminated], list(range(1, 56)))


class TestEvaluateIc(OstaTestCase):
    """Test forward-only IC evaluation."""

    def test_matches_independent_accumulation(self):
        """Test that evaluation reads the parameters and accumulates every patch."""
        rng = np.random.default_rng(2)
        samples = [random_sample(rng, 4, 8, 8, n_classes=2) for _ in range(3)]
        eval_set = PatchSet.from_samples(samples, 4)
        comb = ChannelCombination.of([1, 3, 4], 4)
        params = init_params(3, 2, seed=6)
        digest = params.digest()
        value = evaluate_ic(params, comb, eval_set, metric="ma", batch_size=5)
        self.assertEqual(params.digest(), digest)
        conf = ConfusionMatrix(2)
        for position in range(len(eval_set)):
            values = eval_set.values[position : position + 1][:, [0, 2, 3]]
            conf.accumulate(predict(params, values), eval_set.labels[position : position + 1])
        self.assertEqual(conf.total, 3 * 64)
        self.assertAlmostEqual(value, metric_value(conf, "ma"), places=10)

    def test_perfect_predictor(self):
        """Test that a network reproducing the labels scores 100."""
        rng = np.random.default_rng(3)
        labels = rng.integers(0, 2, size=(8, 8))
        sample = McSample(values=(4.0 * labels - 2.0)[None], labels=labels)
        eval_set = PatchSet.from_samples([sample], 4)
        comb = ChannelCombination.of([1], 1)
        self.assertEqual(evaluate_ic(_sign_oracle(), comb, eval_set, "miou"), 100.0)
        self.assertEqual(evaluate_ic(_sign_oracle(), comb, eval_set, "ma"), 100.0)

    def test_empty_set(self):
        """Test that an empty evaluation set is rejected."""
        with self.assertRaises(InvalidArgumentError):
            evaluate_ic(init_params(1, 2, seed=0), None, None)
