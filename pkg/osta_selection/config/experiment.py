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

"""Experiment configuration: which methods run on which dataset under which seeds."""

import copy
import logging
import os
import re
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional

from ..data.synthetic import SyntheticSpec
from ..exceptions import ConfigError, InvalidArgumentError
from ..selection.config import RunConfig
from .storage import read_config, save_config

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
METHODS = (
    "osta",
    "rank_once",
    "sgs",
    "df",
    "pca",
    "entropy_select",
    "finetune_from_supernet",
)
# methods whose runs are repeated for every named variant
VARIANT_METHODS = ("osta", "rank_once", "finetune_from_supernet")
DEFAULT_VAL_FRACTION = 0.2
SAVED_FIELDS = (
    "schema_version",
    "dataset",
    "run",
    "methods",
    "variants",
    "seeds",
    "output_dir",
    "workers",
    "external_results",
)
_VARIANT_NAME = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")


def merge_overrides(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Return ``base`` with ``overrides`` applied; nested mappings merge key by key."""
    merged = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_overrides(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


@dataclass
class ExperimentConfig:
    """A batch of runs sharing one dataset.

    ``dataset`` is either ``{"manifest": path}`` or ``{"synthetic": recipe}``,
    optionally with ``val_fraction`` for splitting a generated dataset.
    ``variants`` maps a name to run-configuration overrides, e.g.
    ``{"no-warmup": {"schedule": {"warmup_enabled": false}}}``; every method of
    :data:`VARIANT_METHODS` runs once per variant besides the base configuration.
    ``external_results`` holds accuracies obtained elsewhere, reported in
    their own rows. Relative paths resolve against ``base_dir``, the directory
    of the file the configuration was read from.
    """

    dataset: Dict[str, Any]
    run: RunConfig = field(default_factory=RunConfig)
    methods: List[str] = field(default_factory=lambda: ["osta", "sgs"])
    variants: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    seeds: List[int] = field(default_factory=lambda: [0])
    output_dir: str = "results"
    workers: int = 1
    external_results: List[Dict[str, Any]] = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION
    base_dir: str = "."

    def resolve(self, path: str) -> str:
        """Absolute form of a path given in the configuration."""
        return os.path.abspath(os.path.join(self.base_dir, os.path.expanduser(path)))

    @property
    def output_path(self) -> str:
        """Root of the result tree."""
        return self.resolve(self.output_dir)

    @property
    def manifest_path(self) -> Optional[str]:
        """Manifest of an on-disk dataset, if configured."""
        path = self.dataset.get("manifest")
        return self.resolve(path) if path else None

    @property
    def synthetic_spec(self) -> Optional[SyntheticSpec]:
        """Recipe of a generated dataset, if configured."""
        recipe = self.dataset.get("synthetic")
        return SyntheticSpec.from_dict(recipe) if recipe is not None else None

    @property
    def val_fraction(self) -> float:
        """Share of the train samples held out as sub-validation."""
        return float(self.dataset.get("val_fraction", DEFAULT_VAL_FRACTION))

    def variant_names(self, method: str) -> List[str]:
        """Variants a method runs under; ``""`` is the base configuration."""
        if method in VARIANT_METHODS:
            return [""] + sorted(self.variants)
        return [""]

    def run_config(self, variant: str = "", seed: Optional[int] = None) -> RunConfig:
        """The run configuration of a variant under a seed, with paths resolved.

        Raises:
            ConfigError: If the variant is unknown or its overrides are illegal.
        """
        data = self.run.to_dict()
        if variant:
            if variant not in self.variants:
                raise ConfigError(f"Unknown variant '{variant}'.")
            data = merge_overrides(data, self.variants[variant])
        try:
            config = RunConfig.from_dict(data)
        except (InvalidArgumentError, TypeError) as err:
            raise ConfigError(f"Invalid run configuration for variant '{variant}': {err}") from None
        if seed is not None:
            config = replace(config, seed=seed)
        if config.init.mode == "checkpoint" and config.init.path:
            config = replace(config, init=replace(config.init, path=self.resolve(config.init.path)))
        return config

    def with_overrides(
        self,
        seed: Optional[int] = None,
        output_dir: Optional[str] = None,
        workers: Optional[int] = None,
    ) -> "ExperimentConfig":
        """Apply command-line overrides; ``output_dir`` is taken relative to the working dir."""
        updated = self
        if seed is not None:
            updated = replace(updated, seeds=[seed])
        if output_dir is not None:
            updated = replace(updated, output_dir=os.path.abspath(output_dir))
        if workers is not None:
            updated = replace(updated, workers=workers)
        return updated

    def validate(self) -> "ExperimentConfig":
        """Check the whole configuration.

        Raises:
            ConfigError: On the first violated rule.
        """
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(
                f"Unsupported schema_version {self.schema_version}, expected {SCHEMA_VERSION}."
            )
        self._validate_dataset()
        unknown = [m for m in self.methods if m not in METHODS]
        if not self.methods or unknown:
            raise ConfigError(
                f"Methods must be a non-empty subset of {METHODS}, got {self.methods}."
            )
        if not self.seeds or len(set(self.seeds)) != len(self.seeds):
            raise ConfigError(f"Seeds must be a non-empty list without repeats, got {self.seeds}.")
        if any(not isinstance(s, int) or s < 0 for s in self.seeds):
            raise ConfigError(f"Seeds must be non-negative integers, got {self.seeds}.")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError(f"Workers must be a positive integer, got {self.workers}.")
        for name in self.variants:
            if not _VARIANT_NAME.match(name):
                raise ConfigError(f"Invalid variant name '{name}'.")
        for variant in [""] + sorted(self.variants):
            config = self.run_config(variant)
            try:
                config.validate()
            except InvalidArgumentError as err:
                name = variant or "base"
                raise ConfigError(f"Invalid run configuration '{name}': {err}") from None
            if config.init.mode == "checkpoint" and not os.path.isfile(config.init.path):
                raise ConfigError(f"Initialization checkpoint {config.init.path} does not exist.")
        if "finetune_from_supernet" in self.methods and "osta" not in self.methods:
            raise ConfigError("finetune_from_supernet fine-tunes the supernet of an 'osta' run.")
        for entry in self.external_results:
            self._validate_external(entry)
        return self

    def _validate_dataset(self) -> None:
        sources = [key for key in ("manifest", "synthetic") if key in self.dataset]
        if len(sources) != 1:
            raise ConfigError("The dataset needs exactly one of 'manifest' or 'synthetic'.")
        unknown = set(self.dataset) - {"manifest", "synthetic", "val_fraction"}
        if unknown:
            raise ConfigError(f"Unknown dataset fields {sorted(unknown)}.")
        if not 0.0 < self.val_fraction < 1.0:
            raise ConfigError(f"val_fraction must lie in (0, 1), got {self.val_fraction}.")
        if self.manifest_path is not None:
            if not os.path.isfile(self.manifest_path):
                raise ConfigError(f"Dataset manifest {self.manifest_path} does not exist.")
            return
        try:
            self.synthetic_spec.validate()
        except (InvalidArgumentError, TypeError) as err:
            raise ConfigError(f"Invalid synthetic dataset recipe: {err}") from None

    @staticmethod
    def _validate_external(entry: Dict[str, Any]) -> None:
        if not isinstance(entry, dict) or "method" not in entry or "accuracy" not in entry:
            raise ConfigError(f"External result {entry} needs 'method' and 'accuracy'.")
        if entry["method"] in METHODS:
            raise ConfigError(f"External result method '{entry['method']}' is a built-in method.")
        unknown = set(entry) - {"method", "variant", "seed", "index", "accuracy"}
        if unknown:
            raise ConfigError(f"Unknown external result fields {sorted(unknown)}.")
        accuracy = entry["accuracy"]
        if not isinstance(accuracy, (int, float)) or not 0.0 <= accuracy <= 100.0:
            raise ConfigError(f"External accuracy {accuracy} is outside [0, 100].")

    def to_saved_format(self) -> dict:
        """Returns a dictionary that represents how the configuration is saved on disk."""
        dataset = copy.deepcopy(self.dataset)
        if "synthetic" in dataset:
            dataset["synthetic"] = SyntheticSpec.from_dict(dataset["synthetic"]).to_dict()
        return {
            "schema_version": self.schema_version,
            "dataset": dataset,
            "run": self.run.to_dict(),
            "methods": list(self.methods),
            "variants": copy.deepcopy(self.variants),
            "seeds": list(self.seeds),
            "output_dir": self.output_dir,
            "workers": self.workers,
            "external_results": copy.deepcopy(self.external_results),
        }

    @classmethod
    def from_saved_format(cls, data: dict, base_dir: str = ".") -> "ExperimentConfig":
        """Creates a configuration from its saved document.

        Raises:
            ConfigError: If the document is malformed.
        """
        if "schema_version" not in data:
            raise ConfigError("The configuration has no schema_version.")
        unknown = set(data) - set(SAVED_FIELDS)
        if unknown:
            raise ConfigError(f"Unknown configuration fields {sorted(unknown)}.")
        if "dataset" not in data or not isinstance(data["dataset"], dict):
            raise ConfigError("The configuration needs a 'dataset' mapping.")
        try:
            run = RunConfig.from_dict(data.get("run", {}))
        except (InvalidArgumentError, TypeError) as err:
            raise ConfigError(f"Invalid run configuration: {err}") from None
        defaults = cls(dataset={})
        return cls(
            dataset=dict(data["dataset"]),
            run=run,
            methods=list(data.get("methods", defaults.methods)),
            variants=dict(data.get("variants", {})),
            seeds=list(data.get("seeds", defaults.seeds)),
            output_dir=data.get("output_dir", defaults.output_dir),
            workers=data.get("workers", defaults.workers),
            external_results=list(data.get("external_results", [])),
            schema_version=data["schema_version"],
            base_dir=base_dir,
        )

    @classmethod
    def load(cls, filename: str) -> "ExperimentConfig":
        """Read a JSON or YAML configuration file."""
        data = read_config(filename)
        config = cls.from_saved_format(data, base_dir=os.path.dirname(os.path.abspath(filename)))
        logger.info("config=%s methods=%s seeds=%s", filename, config.methods, config.seeds)
        return config

    def save(self, filename: str, overwrite: bool = False) -> None:
        """Write the configuration; relative paths stay relative to ``base_dir``."""
        save_config(filename, self.to_saved_format(), overwrite=overwrite)
