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

"""Contains the package version.

Example::
    from osta_selection.version import __version__
    print(__version__)
"""

import os
import subprocess

ROOT_DIR = os.path.dirname(os.path.abspath(__file__))

with open(os.path.join(ROOT_DIR, "VERSION.txt"), "r") as version_file:
    VERSION = version_file.read().strip()


def git_revision() -> str:
    """Return the short git revision of the source tree, or an empty string."""
    try:
        out = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            cwd=os.path.dirname(ROOT_DIR),
            capture_output=True,
            check=True,
            env={"PATH": os.environ.get("PATH", ""), "LC_ALL": "C"},
        ).stdout
    except (OSError, subprocess.CalledProcessError):
        return ""
    return out.decode("ascii").strip()


def get_version_info() -> str:
    """Get the full version string, tagged with the revision for source checkouts."""
    if not os.path.exists(os.path.join(os.path.dirname(ROOT_DIR), ".git")):
        return VERSION
    revision = git_revision()
    if not revision:
        return VERSION
    return f"{VERSION}.dev0+{revision}"


__version__ = get_version_info()
