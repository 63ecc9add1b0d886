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

"""Tests for grid search and direct feeding."""

from contextlib import contextmanager
from test.osta_test_case import OstaTestCase
from test.utils.utils import build_dataset, tiny_run_config

from osta_selection.baselines import run_df, run_sgs, train_combination
from osta_selection.combinatorics import ChannelCombination
from osta_selection.exceptions import InvalidArgumentError


class TestGridSearch(OstaTestCase):
    """Test the supervised grid search."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.dataset = build_dataset(cls.make_class_dir())
        cls.config = tiny_run_config()
        cls.table = run_sgs(cls.dataset, 3, cls.config, base_seed=0)

    def test_complete_table(self):
        """Test that every combination gets a row."""
        self.assertFalse(self.table.partial)
        self.assertEqual(self.table.data["index"].tolist(), [1, 2, 3, 4])
        self.assertTrue(all(0.0 <= a <= 100.0 for a in self.table.accuracies()))
        self.assertEqual(self.table.seed, 0)

    def test_order_independent(self):
        """Test that member order and worker count do not change the table."""
        shuffled = run_sgs(
            self.dataset, 3, self.config, base_seed=0, workers=2, indices=[4, 2, 3, 1]
        )
        self.assertTrue(shuffled.data.equals(self.table.data))

    def test_failed_member(self):
        """Test that a failing member leaves a partial table."""

        @contextmanager
        def member_context(comb):
            if comb.index == 2:
                raise RuntimeError("member setup failed")
            yield

        table = run_sgs(
            self.dataset, 3, self.config, base_seed=0, indices=[1, 2], member_context=member_context
        )
        self.assertTrue(table.partial)
        self.assertEqual(table.failed, [2])
        self.assertEqual(table.data["index"].tolist(), [1])

    def test_no_members(self):
        """Test that an empty member list is rejected."""
        with self.assertRaises(InvalidArgumentError):
            run_sgs(self.dataset, 3, self.config, base_seed=0, indices=[])


class TestDirectFeeding(OstaTestCase):
    """Test training on every channel."""

    def test_df_is_full_combination(self):
        """Test that direct feeding trains the combination of all channels."""
        dataset = build_dataset(self.make_temp_dir())
        config = tiny_run_config()
        outcome = run_df(dataset, config)
        self.assertEqual(outcome.method, "df")
        self.assertEqual(outcome.combination.channels, (1, 2, 3, 4))
        self.assertEqual(outcome.result.params.k_in, 4)
        everything = ChannelCombination.of([1, 2, 3, 4], 4)
        again = train_combination("sgs", everything, dataset, config)
        self.assertEqual(again.accuracy, outcome.accuracy)
        self.assertTrue(again.result.params.equals(outcome.result.params))
        self.assertIsNotNone(outcome.report.instrumentation.wall_seconds)
