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

"""Static (CAP, accuracy) scatter of a grid search and the methods compared against it."""

import glob
import io
import logging
import os
import re
from typing import Dict, Optional, Tuple

import matplotlib
import pandas as pd
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from ..exceptions import InvalidStateError
from .constants import SCATTER_CSV_FILE, SCATTER_SVG_FILE
from .report import MISSING, build_report, load_runs, sgs_tables

logger = logging.getLogger(__name__)

SCATTER_COLUMNS = ["kind", "method", "variant", "seed", "index", "cap", "accuracy"]
SGS_GID = "sgs-points"
SVG_HASH_SALT = "osta-selection"
METHOD_MARKERS = ("*", "D", "s", "^", "v", "P", "X", "h", "p", "<", ">")
METRIC_LABELS = {"miou": "mIoU (%)", "ma": "mA (%)"}


def scatter_points(root: str, seed: Optional[int] = None) -> pd.DataFrame:
    """Points of the scatter: every grid-search member of ``seed`` and every method row.

    Method rows of other seeds are left out; rows without a seed are kept.

    Raises:
        InvalidStateError: If the tree has no grid-search table, or none for ``seed``.
    """
    tables = sgs_tables(root, load_runs(root))
    if not tables:
        raise InvalidStateError(f"No grid-search table under {root}.")
    seed = min(tables) if seed is None else seed
    if seed not in tables:
        raise InvalidStateError(f"No grid-search table for seed {seed} under {root}.")
    table = tables[seed]
    points = [
        ["sgs", "sgs", MISSING, seed, int(index), table.cap(float(accuracy)), float(accuracy)]
        for index, accuracy in zip(table.data["index"], table.data["accuracy"])
    ]
    for row in build_report(root).rows:
        if row["method"] == "sgs" or row.get("cap") is None:
            continue
        if row["seed"] not in (seed, MISSING):
            continue
        points.append(
            [
                "method",
                row["method"],
                row["variant"],
                row["seed"],
                row["index"],
                row["cap"],
                row["accuracy"],
            ]
        )
    return pd.DataFrame(points, columns=SCATTER_COLUMNS)


def scatter_csv(points: pd.DataFrame) -> str:
    """CSV text of the points with exact coordinates."""
    return points.to_csv(index=False, lineterminator="\n")


def render_scatter(points: pd.DataFrame, metric: str = "miou") -> Figure:
    """Figure with CAP on a fixed 0..100 x axis and test accuracy on the y axis.

    Grid-search members share one marker style and are grouped under the SVG id
    ``sgs-points``; each method and variant gets its own marker.
    """
    figure = Figure(figsize=(6.4, 4.8))
    FigureCanvasSVG(figure)
    axes = figure.add_subplot(1, 1, 1)
    members = points[points["kind"] == "sgs"]
    (line,) = axes.plot(
        members["cap"],
        members["accuracy"],
        linestyle="none",
        marker="o",
        markersize=4,
        color="0.6",
        label="SGS",
    )
    line.set_gid(SGS_GID)
    methods = points[points["kind"] == "method"]
    for number, ((method, variant), group) in enumerate(
        methods.groupby(["method", "variant"], sort=True)
    ):
        name = method if variant == MISSING else f"{method} [{variant}]"
        (handle,) = axes.plot(
            group["cap"],
            group["accuracy"],
            linestyle="none",
            marker=METHOD_MARKERS[number % len(METHOD_MARKERS)],
            markersize=9,
            label=name,
        )
        handle.set_gid(f"method-{re.sub(r'[^A-Za-z0-9_.-]', '_', name)}")
    axes.set_xlim(0.0, 100.0)
    axes.set_xlabel("CAP (%)")
    axes.set_ylabel(METRIC_LABELS.get(metric, metric))
    axes.grid(linestyle="--", alpha=0.5)
    axes.legend(loc="lower right", fontsize="small")
    figure.tight_layout()
    return figure


def scatter_svg(points: pd.DataFrame, metric: str = "miou") -> str:
    """Self-contained SVG text; identical points give identical bytes."""
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "none"}):
        figure = render_scatter(points, metric)
        buffer = io.StringIO()
        figure.savefig(buffer, format="svg", metadata={"Date": None})
    return buffer.getvalue()


def scatter_names(seed: Optional[int] = None) -> Tuple[str, str]:
    """SVG and CSV file names: the default for the lowest seed, or seed-suffixed ones."""
    if seed is None:
        return SCATTER_SVG_FILE, SCATTER_CSV_FILE
    svg_stem, svg_ext = os.path.splitext(SCATTER_SVG_FILE)
    csv_stem, csv_ext = os.path.splitext(SCATTER_CSV_FILE)
    return f"{svg_stem}-seed-{seed}{svg_ext}", f"{csv_stem}-seed-{seed}{csv_ext}"


def _metric(root: str) -> str:
    runs = load_runs(root)
    return runs[0]["metric"] if runs else "miou"


def scatter_files(root: str, seed: Optional[int] = None) -> Dict[str, str]:
    """File name to text of the scatter of ``seed``."""
    points = scatter_points(root, seed)
    svg_name, csv_name = scatter_names(seed)
    return {svg_name: scatter_svg(points, _metric(root)), csv_name: scatter_csv(points)}


def emit_scatter(root: str, seed: Optional[int] = None) -> Tuple[str, str]:
    """Write the scatter SVG and its companion CSV into ``root``.

    Returns:
        The SVG and CSV paths.
    """
    paths = []
    for name, text in scatter_files(root, seed).items():
        path = os.path.join(root, name)
        with open(path, "w", newline="") as out:
            out.write(text)
        paths.append(path)
    logger.info("scatter=%s seed=%s", paths[0], "lowest" if seed is None else seed)
    return paths[0], paths[1]


def existing_scatter_files(root: str) -> Dict[str, str]:
    """Expected text of every scatter already emitted into ``root``, for verification."""
    expected: Dict[str, str] = {}
    svg_stem = os.path.splitext(SCATTER_SVG_FILE)[0]
    if os.path.isfile(os.path.join(root, SCATTER_SVG_FILE)):
        expected.update(scatter_files(root))
    for path in sorted(glob.glob(os.path.join(root, f"{svg_stem}-seed-*.svg"))):
        match = re.search(r"-seed-(\d+)\.svg$", path)
        if match:
            expected.update(scatter_files(root, int(match.group(1))))
    return expected
