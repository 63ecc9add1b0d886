# -*- coding: utf-8 -*-

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

"""Setup osta_selection"""

import os

import setuptools

REQUIREMENTS = [
    "numpy>=1.21",
    "python-dateutil>=2.8.0",
    "pandas>=1.5.0",
    "pyyaml>=6.0.0",
    "matplotlib>=3.5",
]

# Handle version.
VERSION_PATH = os.path.join(os.path.dirname(__file__), "osta_selection", "VERSION.txt")
with open(VERSION_PATH, "r") as version_file:
    VERSION = version_file.read().strip()

# Read long description from README.
README_PATH = os.path.join(os.path.abspath(os.path.dirname(__file__)), "README.md")
with open(README_PATH) as readme_file:
    README = readme_file.read()


setuptools.setup(
    name="osta-selection",
    version=VERSION,
    description="One-shot channel selection for multi-channel semantic segmentation",
    long_description=README,
    long_description_content_type="text/markdown",
    author="OSTA Selection Developers",
    license="Apache 2.0",
    classifiers=[
        "Environment :: Console",
        "License :: OSI Approved :: Apache Software License",
        "Intended Audience :: Developers",
        "Intended Audience :: Science/Research",
        "Operating System :: Microsoft :: Windows",
        "Operating System :: MacOS",
        "Operating System :: POSIX :: Linux",
        "Programming Language :: Python :: 3 :: Only",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Image Recognition",
    ],
    keywords="channel selection segmentation remote sensing supernet",
    packages=setuptools.find_packages(exclude=["test*"]),
    install_requires=REQUIREMENTS,
    include_package_data=True,
    package_data={"osta_selection": ["VERSION.txt"]},
    python_requires=">=3.8",
    zip_safe=False,
    entry_points={"console_scripts": ["osta-selection = osta_selection.cli:main"]},
)
