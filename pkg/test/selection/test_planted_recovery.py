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

"""Tests for recovering the planted channels of a synthetic dataset."""

from test.osta_test_case import OstaTestCase
from test.utils.utils import build_dataset, tiny_spec

from osta_selection.baselines import run_sgs
from osta_selection.selection import RunConfig, ScheduleConfig, evaluate_test, run_osta

SEEDS = (0, 1, 2)
MIN_RECOVERED = 2
TOP_CAP = 90.0


def planted_spec(seed: int):
    """Six channels where every class is the sign code of the planted channels 1, 3 and 5.

    A combination missing a planted channel cannot tell apart the classes that
    differ only in that channel.
    """
    return tiny_spec(
        n_channels=6,
        planted=(1, 3, 5),
        n_redundant=0,
        n_distractor=3,
        n_classes=8,
        height=32,
        width=32,
        samples={"train": 8, "test": 2},
        seed=seed,
    )


def recovery_config(seed: int) -> RunConfig:
    """Short three-of-six selection."""
    return RunConfig(
        k=3,
        schedule=ScheduleConfig(total_iterations=400),
        metric="ma",
        batch_size=4,
        patch_size=16,
        seed=seed,
        eval_workers=2,
    )


class TestPlantedRecovery(OstaTestCase):
    """Test selection and grid search against the planted subset over several seeds."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.outcomes = {}
        for seed in SEEDS:
            spec = planted_spec(seed)
            dataset = build_dataset(cls.make_class_dir(), spec)
            config = recovery_config(seed)
            result = run_osta(config, dataset)
            accuracy = evaluate_test(result.params, result.scc, dataset, config).accuracy
            table = run_sgs(dataset, 3, config, base_seed=seed, workers=4)
            cls.outcomes[seed] = {
                "scc": result.scc,
                "planted": spec.combination,
                "cap": table.cap(accuracy),
                "planted_cap": table.cap(table.accuracy_of(spec.combination.index)),
                "rows": len(table),
            }

    def test_complete_tables(self):
        """Test that every seed has a full grid-search table over 20 combinations."""
        self.assertEqual([o["rows"] for o in self.outcomes.values()], [20] * len(SEEDS))
        self.assertEqual(planted_spec(0).combination.index, 6)

    def test_planted_subset_leads_grid_search(self):
        """Test that the planted subset is in the top tenth of most grid-search tables."""
        leading = [seed for seed, o in self.outcomes.items() if o["planted_cap"] >= TOP_CAP]
        self.assertGreaterEqual(len(leading), MIN_RECOVERED, self.outcomes)

    def test_selected_combination_reaches_top_cap(self):
        """Test that the selected combination reaches a top-tenth CAP in most seeds."""
        recovered = [seed for seed, o in self.outcomes.items() if o["cap"] >= TOP_CAP]
        self.assertGreaterEqual(len(recovered), MIN_RECOVERED, self.outcomes)
