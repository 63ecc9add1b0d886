#!/usr/bin/env python3
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

"""Check that every Python file starts with the project license header."""

import argparse
import multiprocessing
import os
import re
import sys

# regex for character encoding from PEP 263
pep263 = re.compile(r"^[ \t\f]*#.*?coding[:=][ \t]*([-_.a-zA-Z0-9]+)")

FIRST_LINE = "# This code is part of OSTA Selection.\n"
HEADER = FIRST_LINE + "#\n"
COPYRIGHT_PREFIX = "# (C) Copyright OSTA Selection Developers 20"
APACHE_TEXT = """#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
#
# Any modifications or derivative works of this code must retain this
# copyright notice, and modified files need to carry a notice indicating
# that they have been altered from the originals.
"""


def discover_files(code_paths):
    """Python files under the given files and directories."""
    out_paths = []
    for path in code_paths:
        if os.path.isfile(path):
            out_paths.append(path)
            continue
        for dir_path, _, files in os.walk(path):
            out_paths.extend(os.path.join(dir_path, name) for name in files if name.endswith(".py"))
    return sorted(out_paths)


def validate_header(file_path):
    """Return ``(path, ok, reason)`` for one file."""
    with open(file_path, encoding="utf8") as source:
        lines = source.readlines()
    if not lines:
        return file_path, True, None
    start = None
    for index, line in enumerate(lines[:5]):
        if index < 2 and pep263.match(line):
            return file_path, False, "Unnecessary encoding specification (PEP 263, 3120)"
        if line == FIRST_LINE:
            start = index
            break
    if start is None:
        return file_path, False, "Header not found in first 5 lines"
    if "".join(lines[start : start + 2]) != HEADER:
        return file_path, False, f"Header up to copyright line does not match: {HEADER}"
    if len(lines) < start + 11 or not lines[start + 2].startswith(COPYRIGHT_PREFIX):
        return file_path, False, "Header copyright line not found"
    if "".join(lines[start + 3 : start + 11]) != APACHE_TEXT:
        return file_path, False, f"Header apache text string doesn't match:\n {APACHE_TEXT}"
    return file_path, True, None


def main():
    """Check the given paths, by default the package next to this script."""
    default_path = os.path.join(
        os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "osta_selection"
    )
    parser = argparse.ArgumentParser(description="Check file headers.")
    parser.add_argument(
        "paths",
        type=str,
        nargs="*",
        default=[default_path],
        help="Paths to scan, by default ../osta_selection from the script",
    )
    args = parser.parse_args()
    files = discover_files(args.paths)
    with multiprocessing.Pool() as pool:
        results = pool.map(validate_header, files)
    failed_files = [result for result in results if result[1] is False]
    for path, _, reason in failed_files:
        sys.stderr.write(f"{path} failed header check because:\n{reason}\n\n")
    sys.exit(1 if failed_files else 0)


if __name__ == "__main__":
    main()
