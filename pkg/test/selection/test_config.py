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

"""Tests for run configurations."""

from test.osta_test_case import OstaTestCase

from osta_selection.combinatorics import ChannelCombination
from osta_selection.exceptions import InvalidArgumentError
from osta_selection.selection import InitConfig, RunConfig, ScheduleConfig


class TestRunConfig(OstaTestCase):
    """Test run configuration validation and conversion."""

    def test_defaults_are_valid(self):
        """Test the default configuration."""
        config = RunConfig().validate()
        self.assertEqual(config.init_seed, 0)
        self.assertEqual(config.init.label(), "random")

    def test_invalid_configs(self):
        """Test rejection of illegal field values and combinations."""
        invalid = [
            {"strategy": "greedy"},
            {"criterion": "variance"},
            {"metric": "f1"},
            {"k": 0},
            {"strategy": "none"},
            {"fixed": [1, 2]},
            {"batch_size": 0},
            {"patch_size": 0},
            {"seed": -1},
            {"eval_workers": 0},
            {"init": InitConfig(mode="pretrained")},
            {"init": InitConfig(mode="checkpoint")},
            {"schedule": ScheduleConfig(total_iterations=10)},
        ]
        for overrides in invalid:
            with self.subTest(overrides=overrides):
                with self.assertRaises(InvalidArgumentError):
                    RunConfig(**overrides).validate()

    def test_dict_round_trip(self):
        """Test the JSON form of a configuration."""
        config = RunConfig(
            k=2,
            schedule=ScheduleConfig(total_iterations=100, warmup_enabled=False),
            criterion="entropy",
            init=InitConfig(seed=7),
            checkpoint_iterations=[15],
        )
        self.assertEqual(RunConfig.from_dict(config.to_dict()), config)
        self.assertEqual(config.init_seed, 7)
        self.assertEqual(config.init.label(), "random(7)")

    def test_unknown_fields(self):
        """Test that unknown fields are rejected."""
        with self.assertRaises(InvalidArgumentError):
            RunConfig.from_dict({"k": 3, "learning_rate": 0.1})

    def test_fixed_to(self):
        """Test conversion to single-combination training."""
        comb = ChannelCombination.of([2, 5], 6)
        config = RunConfig(seed=3).fixed_to(comb)
        self.assertEqual(
            (config.k, config.strategy, config.fixed, config.seed), (2, "none", [2, 5], 3)
        )
        self.assertEqual(config.fixed_combination(6), comb)
        self.assertEqual(config.fixed_to(comb, seed=9).seed, 9)
        self.assertIsNone(RunConfig().fixed_combination(6))
