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

"""Reading and writing configuration documents on disk."""

import json
import logging
import os
from typing import Dict

import yaml

from ..exceptions import ConfigError

logger = logging.getLogger(__name__)

YAML_SUFFIXES = (".yaml", ".yml")


def _is_yaml(filename: str) -> bool:
    return os.path.splitext(filename)[1].lower() in YAML_SUFFIXES


def read_config(filename: str) -> Dict:
    """Read a JSON or YAML configuration document.

    Raises:
        ConfigError: If the file is missing, unparsable or not a mapping.
    """
    logger.debug("Read configuration data from '%s'", filename)
    if not os.path.isfile(filename):
        raise ConfigError(f"Configuration file {filename} does not exist.")
    with open(filename) as config_in:
        try:
            if _is_yaml(filename):
                data = yaml.safe_load(config_in)
            else:
                data = json.load(config_in)
        except (yaml.YAMLError, json.JSONDecodeError) as err:
            raise ConfigError(f"Cannot parse {filename}: {err}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"Configuration file {filename} does not hold a mapping.")
    return data


def save_config(filename: str, config: Dict, overwrite: bool = False) -> None:
    """Save a configuration document as JSON, or YAML for ``.yaml``/``.yml`` names.

    Raises:
        ConfigError: If the file exists and ``overwrite`` is not set.
    """
    logger.debug("Save configuration data in '%s'", filename)
    if os.path.exists(filename) and not overwrite:
        raise ConfigError(f"{filename} already exists. Set overwrite=True to overwrite.")
    _ensure_parent_exists(filename)
    with open(filename, mode="w") as config_out:
        if _is_yaml(filename):
            yaml.safe_dump(config, config_out, sort_keys=True)
        else:
            json.dump(config, config_out, sort_keys=True, indent=4)
            config_out.write("\n")


def _ensure_parent_exists(filename: str) -> None:
    parent = os.path.dirname(filename)
    if parent and not os.path.isdir(parent):
        logger.debug("Create configuration directory at %s", parent)
        os.makedirs(parent, exist_ok=True)
