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

"""Tests for experiment configurations."""

import json
import os
from test.osta_test_case import OstaTestCase
from test.utils.utils import tiny_run_dict, tiny_spec

from osta_selection.config import (
    SCHEMA_VERSION,
    ExperimentConfig,
    merge_overrides,
    read_config,
    save_config,
)
from osta_selection.exceptions import ConfigError


class TestExperimentConfig(OstaTestCase):
    """Test loading, saving and validating experiment configurations."""

    def setUp(self):
        super().setUp()
        self.document = {
            "schema_version": SCHEMA_VERSION,
            "dataset": {"synthetic": tiny_spec().to_dict(), "val_fraction": 0.25},
            "run": tiny_run_dict(),
            "methods": ["osta", "sgs", "df"],
            "variants": {"entropy": {"criterion": "entropy"}},
            "seeds": [0, 1],
            "output_dir": "results",
            "workers": 2,
        }

    def config(self, **changes) -> ExperimentConfig:
        """A configuration built from the test document with ``changes`` applied."""
        document = {**self.document, **changes}
        return ExperimentConfig.from_saved_format(document, base_dir=self.make_temp_dir())

    def test_round_trip(self):
        """Test that JSON and YAML files load back to the same configuration."""
        config = self.config()
        directory = self.make_temp_dir()
        for name in ("experiment.json", "experiment.yaml", "experiment.yml"):
            with self.subTest(name=name):
                path = os.path.join(directory, name)
                config.save(path)
                loaded = ExperimentConfig.load(path)
                self.assertEqual(loaded.to_saved_format(), config.to_saved_format())
                self.assertEqual(loaded.base_dir, directory)

    def test_defaults(self):
        """Test that omitted fields take their defaults."""
        config = ExperimentConfig.from_saved_format(
            {"schema_version": SCHEMA_VERSION, "dataset": {"synthetic": {}}}
        )
        self.assertEqual(config.methods, ["osta", "sgs"])
        self.assertEqual(config.seeds, [0])
        self.assertEqual(config.workers, 1)
        self.assertAlmostEqual(config.val_fraction, 0.2)
        config.validate()

    def test_valid(self):
        """Test that the test document is accepted."""
        config = self.config().validate()
        self.assertEqual(config.synthetic_spec.to_dict(), tiny_spec().to_dict())
        self.assertIsNone(config.manifest_path)
        self.assertEqual(config.output_path, os.path.join(config.base_dir, "results"))

    def test_invalid(self):
        """Test that every violated rule raises a configuration error."""
        spec = tiny_spec().to_dict()
        invalid = {
            "schema version": {"schema_version": SCHEMA_VERSION + 1},
            "two datasets": {"dataset": {"synthetic": spec, "manifest": "manifest.json"}},
            "no dataset": {"dataset": {}},
            "unknown dataset field": {"dataset": {"synthetic": spec, "bands": 3}},
            "val fraction": {"dataset": {"synthetic": spec, "val_fraction": 1.0}},
            "missing manifest": {"dataset": {"manifest": "missing.json"}},
            "bad recipe": {"dataset": {"synthetic": {**spec, "planted": [1, 9]}}},
            "no methods": {"methods": []},
            "unknown method": {"methods": ["osta", "random"]},
            "no seeds": {"seeds": []},
            "repeated seed": {"seeds": [1, 1]},
            "negative seed": {"seeds": [-1]},
            "no workers": {"workers": 0},
            "variant name": {"variants": {"no warmup": {}}},
            "illegal variant": {"variants": {"fixed": {"strategy": "none"}}},
            "unknown variant field": {"variants": {"v": {"bands": 3}}},
            "finetune alone": {"methods": ["finetune_from_supernet"]},
            "missing init": {"run": {**tiny_run_dict(), "init": {"mode": "checkpoint",
                                                                 "path": "none.ostk"}}},
            "builtin external": {"external_results": [{"method": "osta", "accuracy": 50.0}]},
            "external range": {"external_results": [{"method": "svm", "accuracy": 101.0}]},
            "external field": {
                "external_results": [{"method": "svm", "accuracy": 50.0, "note": "x"}]
            },
        }
        for name, changes in invalid.items():
            with self.subTest(rule=name):
                with self.assertRaises(ConfigError):
                    self.config(**changes).validate()

    def test_malformed_document(self):
        """Test that documents missing required structure are rejected on load."""
        for document in (
            {"dataset": {"synthetic": {}}},
            {"schema_version": SCHEMA_VERSION},
            {"schema_version": SCHEMA_VERSION, "dataset": {"synthetic": {}}, "extra": 1},
            {"schema_version": SCHEMA_VERSION, "dataset": {}, "run": {"bands": 3}},
            {"schema_version": SCHEMA_VERSION, "dataset": {}, "run": {"schedule": {"x": 1}}},
        ):
            with self.subTest(document=document):
                with self.assertRaises(ConfigError):
                    ExperimentConfig.from_saved_format(document)

    def test_variant_runs(self):
        """Test that variant overrides merge into the base run configuration."""
        config = self.config()
        base = config.run_config()
        variant = config.run_config("entropy", seed=7)
        self.assertEqual(base.criterion, "val_acc")
        self.assertEqual(variant.criterion, "entropy")
        self.assertEqual(variant.seed, 7)
        self.assertEqual(variant.schedule, base.schedule)
        self.assertEqual(config.variant_names("osta"), ["", "entropy"])
        self.assertEqual(config.variant_names("sgs"), [""])
        with self.assertRaises(ConfigError):
            config.run_config("missing")

    def test_checkpoint_path_resolved(self):
        """Test that a checkpoint init path resolves against the configuration directory."""
        run = {**tiny_run_dict(), "init": {"mode": "checkpoint", "path": "init.ostk"}}
        config = self.config(run=run)
        self.assertEqual(
            config.run_config().init.path, os.path.join(config.base_dir, "init.ostk")
        )

    def test_overrides(self):
        """Test the command-line overrides."""
        config = self.config().with_overrides(seed=5, output_dir="elsewhere", workers=3)
        self.assertEqual(config.seeds, [5])
        self.assertEqual(config.output_path, os.path.abspath("elsewhere"))
        self.assertEqual(config.workers, 3)
        unchanged = self.config().with_overrides()
        self.assertEqual(unchanged.to_saved_format(), self.config().to_saved_format())

    def test_merge_overrides(self):
        """Test that nested mappings merge key by key without touching the base."""
        base = {"schedule": {"warmup_enabled": True, "total_iterations": 20}, "k": 3}
        merged = merge_overrides(base, {"schedule": {"warmup_enabled": False}, "k": 2})
        self.assertEqual(
            merged, {"schedule": {"warmup_enabled": False, "total_iterations": 20}, "k": 2}
        )
        self.assertTrue(base["schedule"]["warmup_enabled"])


class TestConfigStorage(OstaTestCase):
    """Test reading and writing configuration documents."""

    def test_read_errors(self):
        """Test that unreadable documents raise configuration errors."""
        directory = self.make_temp_dir()
        contents = {
            "broken.json": "{",
            "broken.yaml": "a: [",
            "list.json": "[1, 2]",
        }
        for name, text in contents.items():
            path = os.path.join(directory, name)
            with open(path, "w") as out:
                out.write(text)
            with self.subTest(name=name):
                with self.assertRaises(ConfigError):
                    read_config(path)
        with self.assertRaises(ConfigError):
            read_config(os.path.join(directory, "missing.json"))

    def test_overwrite(self):
        """Test that an existing file is only replaced on request."""
        path = os.path.join(self.make_temp_dir(), "nested", "config.json")
        save_config(path, {"a": 1})
        with self.assertRaises(ConfigError):
            save_config(path, {"a": 2})
        save_config(path, {"a": 2}, overwrite=True)
        with open(path) as json_in:
            self.assertEqual(json.load(json_in), {"a": 2})
        self.assertEqual(read_config(path), {"a": 2})
