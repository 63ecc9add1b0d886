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

"""Report tables recomputed from the per-run metrics files of a result tree."""

import glob
import json
import logging
import os
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from ..combinatorics import combination_count
from ..config.storage import read_config
from ..evaluation.confusion import ConfusionMatrix
from ..evaluation.metrics import (
    RunInstrumentation,
    dca,
    estimate_rat,
    mean_accuracy,
    mean_iou,
    measure_ram,
    measure_rat,
    metric_value,
    mrc_summary,
    pruning_epoch_total,
)
from ..evaluation.sgs_table import SgsTable
from ..exceptions import InvalidStateError, VerificationMismatchError
from .constants import (
    EXPERIMENT_FILE,
    METRICS_FILE,
    MRC_FILE,
    REPORT_CSV_FILE,
    REPORT_JSON_FILE,
    RUNS_DIR,
    SGS_FILE,
)
from .experiment_dataclasses import cell_path

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["method", "variant", "seed", "index", "accuracy", "cap", "dca"]
MRC_COLUMNS = ["method", "variant", "index", "runs", "cap_mean", "cap_std"]
METHOD_ORDER = (
    "sgs",
    "osta",
    "rank_once",
    "finetune_from_supernet",
    "df",
    "pca",
    "entropy_select",
)
# rows whose combination was chosen by the supernet and so carry a DCA
SELECTION_METHODS = ("osta", "rank_once", "finetune_from_supernet")
MISSING = "-"


def load_runs(root: str) -> List[Dict[str, Any]]:
    """Every ``metrics.json`` under the result tree, with its relative ``path`` added."""
    pattern = os.path.join(root, RUNS_DIR, "**", METRICS_FILE)
    runs = []
    for filename in sorted(glob.glob(pattern, recursive=True)):
        with open(filename) as json_in:
            document = json.load(json_in)
        document["path"] = os.path.relpath(os.path.dirname(filename), root).replace(os.sep, "/")
        runs.append(document)
    return runs


def load_sgs_table(root: str, seed: int, universe: int, k: int) -> SgsTable:
    """Grid-search table of one seed, assembled from its member metrics files.

    Members whose directory exists without a metrics file are listed as failed.
    """
    base = os.path.join(root, cell_path("sgs", seed))
    rows, failed = [], []
    for member in sorted(glob.glob(os.path.join(base, "index-*"))):
        index = int(os.path.basename(member).split("-")[1])
        metrics_file = os.path.join(member, METRICS_FILE)
        if not os.path.isfile(metrics_file):
            failed.append(index)
            continue
        with open(metrics_file) as json_in:
            rows.append((index, float(json.load(json_in)["accuracy"])))
    return SgsTable(universe, k, seed=seed, rows=rows, failed=failed)


def sgs_tables(root: str, runs: List[Dict[str, Any]]) -> Dict[int, SgsTable]:
    """Grid-search tables keyed by seed."""
    shapes: Dict[int, Tuple[int, int]] = {}
    for run in runs:
        if run["method"] == "sgs":
            shapes[run["seed"]] = (run["universe"], run["k"])
    return {
        seed: load_sgs_table(root, seed, universe, k)
        for seed, (universe, k) in sorted(shapes.items())
    }


def _fmt(value: Optional[float], signed: bool = False) -> str:
    if value is None:
        return ""
    return f"{value:+.2f}" if signed else f"{value:.2f}"


def _method_key(method: str, variant: str) -> Tuple[int, str, str]:
    rank = METHOD_ORDER.index(method) if method in METHOD_ORDER else len(METHOD_ORDER)
    return rank, method, "" if variant == MISSING else variant


def _sort_key(row: Dict[str, Any]) -> Tuple:
    seed = -1 if row["seed"] == MISSING else row["seed"]
    index = -1 if row["index"] == MISSING else row["index"]
    return (*_method_key(row["method"], row["variant"]), seed, index)


@dataclass
class ReportTables:
    """Everything ``emit_report`` writes, before formatting."""

    rows: List[Dict[str, Any]]
    columns: List[str]
    mrc: List[Dict[str, Any]] = field(default_factory=list)
    efficiency: List[Dict[str, Any]] = field(default_factory=list)
    dca_summary: Optional[Dict[str, Any]] = None
    sgs: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    def report_csv(self) -> str:
        """``report.csv`` text: two decimals, signed DCA, empty cells for missing values."""
        formatted = []
        for row in self.rows:
            cells = {
                "method": row["method"],
                "variant": row["variant"],
                "seed": str(row["seed"]),
                "index": str(row["index"]),
                "accuracy": _fmt(row["accuracy"]),
                "cap": _fmt(row.get("cap")),
                "dca": _fmt(row.get("dca"), signed=True),
            }
            formatted.append([cells[column] for column in self.columns])
        frame = pd.DataFrame(formatted, columns=self.columns)
        return frame.to_csv(index=False, lineterminator="\n")

    def mrc_csv(self) -> Optional[str]:
        """``mrc.csv`` text, or ``None`` when no combination has two runs."""
        if not self.mrc:
            return None
        formatted = [
            [
                row["method"],
                row["variant"],
                str(row["index"]),
                str(row["runs"]),
                _fmt(row["cap_mean"]),
                _fmt(row["cap_std"]),
            ]
            for row in self.mrc
        ]
        frame = pd.DataFrame(formatted, columns=MRC_COLUMNS)
        return frame.to_csv(index=False, lineterminator="\n")

    def report_json(self) -> str:
        """``report.json`` text, holding unrounded values."""
        document = {
            "columns": self.columns,
            "rows": [{column: row.get(column) for column in self.columns} for row in self.rows],
            "mrc": self.mrc,
            "efficiency": self.efficiency,
            "dca_summary": self.dca_summary,
            "sgs": self.sgs,
            "warnings": self.warnings,
        }
        return json.dumps(document, indent=2, sort_keys=True) + "\n"

    def files(self) -> Dict[str, Optional[str]]:
        """File name to text; ``None`` marks a file that must not exist."""
        return {
            REPORT_CSV_FILE: self.report_csv(),
            REPORT_JSON_FILE: self.report_json(),
            MRC_FILE: self.mrc_csv(),
        }


def _reference(
    tables: Dict[int, SgsTable], seed: Any, warnings: List[str]
) -> Optional[SgsTable]:
    if not tables:
        return None
    if seed in tables:
        return tables[seed]
    fallback = min(tables)
    message = f"seed={seed} sgs_table=missing reference_seed={fallback}"
    if seed != MISSING and message not in warnings:
        warnings.append(message)
    return tables[fallback]


# methods whose runs train one k-channel network on a fixed combination
FIXED_K_METHODS = ("sgs", "entropy_select")


def _direct_reference(
    run: Dict[str, Any], runs: List[Dict[str, Any]]
) -> Optional[Dict[str, Any]]:
    """Same-seed plain training of a k-channel network, preferring the selected combination."""
    candidates = [
        other
        for other in runs
        if other["method"] in FIXED_K_METHODS
        and other["seed"] == run["seed"]
        and other["k"] == run["k"]
        and other.get("index") is not None
    ]
    if not candidates:
        return None
    return min(
        candidates,
        key=lambda other: (
            other["index"] != run["index"],
            FIXED_K_METHODS.index(other["method"]),
            other["index"],
        ),
    )


def _efficiency(runs: List[Dict[str, Any]], warnings: List[str]) -> List[Dict[str, Any]]:
    entries = []
    for run in runs:
        if run["method"] != "osta" or run["strategy"] != "progressive":
            continue
        instrumentation = RunInstrumentation.from_dict(run["report"]["instrumentation"])
        settings = run["run"]
        ratio = instrumentation.time_ratio_pct
        estimated = None
        if ratio is not None and run["patches_per_epoch"] > 0:
            estimated = estimate_rat(
                run["patches_per_epoch"],
                pruning_epoch_total(combination_count(run["universe"], run["k"])),
                settings["batch_size"],
                settings["schedule"]["total_iterations"],
                ratio,
            )
        entry = {
            "method": run["method"],
            "variant": run["variant"] or MISSING,
            "seed": run["seed"],
            "time_ratio_pct": ratio,
            "rat_estimated": estimated,
            "rat_measured": None,
            "ram_measured": None,
            "reference": None,
        }
        if instrumentation.wall_seconds is not None:
            reference = _direct_reference(run, runs)
            if reference is None:
                warnings.append(f"run={run['path']} rat=unmeasured reason=no_k_channel_run")
            else:
                baseline = RunInstrumentation.from_dict(reference["report"]["instrumentation"])
                entry["rat_measured"] = measure_rat(instrumentation, baseline)
                entry["ram_measured"] = measure_ram(instrumentation, baseline)
                entry["reference"] = reference["path"]
        entries.append(entry)
    return entries


def _mrc(
    rows: List[Dict[str, Any]], tables: Dict[int, SgsTable]
) -> List[Dict[str, Any]]:
    groups: Dict[Tuple[str, str, int], List[float]] = defaultdict(list)
    for row in rows:
        if row["method"] != "sgs" and row["index"] != MISSING and row.get("cap") is not None:
            groups[(row["method"], row["variant"], row["index"])].append(row["cap"])
    if len(tables) >= 2:
        for table in tables.values():
            for index, accuracy in zip(table.data["index"], table.data["accuracy"]):
                groups[("sgs", MISSING, int(index))].append(table.cap(float(accuracy)))
    entries = []
    for (method, variant, index), caps in groups.items():
        if len(caps) < 2:
            continue
        mean, std = mrc_summary(caps)
        entries.append(
            {
                "method": method,
                "variant": variant,
                "index": index,
                "runs": len(caps),
                "cap_mean": mean,
                "cap_std": std,
            }
        )
    entries.sort(
        key=lambda e: (*_method_key(e["method"], e["variant"]), -e["cap_mean"], e["index"])
    )
    return entries


def build_report(root: str) -> ReportTables:
    """Recompute every report table from the raw run files of ``root``.

    Raises:
        InvalidStateError: If the tree holds no completed run.
    """
    runs = load_runs(root)
    if not runs:
        raise InvalidStateError(f"No completed runs under {root}.")
    tables = sgs_tables(root, runs)
    warnings: List[str] = []
    rows: List[Dict[str, Any]] = []
    for run in runs:
        if run["method"] == "sgs":
            continue
        index = run["index"]
        row = {
            "method": run["method"],
            "variant": run["variant"] or MISSING,
            "seed": run["seed"],
            "index": MISSING if index is None else index,
            "accuracy": run["accuracy"],
        }
        reference = _reference(tables, run["seed"], warnings)
        if reference is not None:
            row["cap"] = reference.cap(run["accuracy"])
            if run["method"] in SELECTION_METHODS and index is not None:
                try:
                    row["dca"] = dca(run["accuracy"], reference.accuracy_of(index))
                except ValueError:
                    warnings.append(f"run={run['path']} dca=undefined reason=member_missing")
        rows.append(row)
    for seed, table in tables.items():
        if not len(table):
            continue
        best = table.top(1).iloc[0]
        rows.append(
            {
                "method": "sgs",
                "variant": MISSING,
                "seed": seed,
                "index": int(best["index"]),
                "accuracy": float(best["accuracy"]),
                "cap": float(best["cap"]),
            }
        )
    rows.extend(_external_rows(root, tables, warnings))
    rows.sort(key=_sort_key)

    columns = REPORT_COLUMNS[:5]
    if tables:
        columns.append("cap")
        if any(row["method"] in SELECTION_METHODS for row in rows):
            columns.append("dca")
    else:
        warnings.append("cap=omitted reason=no_sgs_table")
        logger.warning("report=%s cap=omitted reason=no_sgs_table", root)
    report = ReportTables(rows=rows, columns=columns, warnings=warnings)
    report.mrc = _mrc(rows, tables)
    report.efficiency = _efficiency(runs, warnings)
    report.dca_summary = _dca_summary(rows)
    report.sgs = {
        str(seed): {**table.provenance(), "rows": len(table)} for seed, table in tables.items()
    }
    for seed, table in tables.items():
        if table.partial:
            warnings.append(f"seed={seed} sgs_table=partial rows={len(table)} size={table.size}")
    for message in warnings:
        logger.warning("report=%s %s", root, message)
    return report


def _external_rows(
    root: str, tables: Dict[int, SgsTable], warnings: List[str]
) -> List[Dict[str, Any]]:
    experiment_file = os.path.join(root, EXPERIMENT_FILE)
    if not os.path.isfile(experiment_file):
        return []
    rows = []
    for entry in read_config(experiment_file).get("external_results", []):
        seed = entry.get("seed", MISSING)
        row = {
            "method": entry["method"],
            "variant": entry.get("variant", MISSING),
            "seed": seed,
            "index": entry.get("index", MISSING),
            "accuracy": float(entry["accuracy"]),
        }
        reference = _reference(tables, seed, warnings)
        if reference is not None:
            row["cap"] = reference.cap(row["accuracy"])
        rows.append(row)
    return rows


def _dca_summary(rows: List[Dict[str, Any]]) -> Optional[Dict[str, Any]]:
    base = [row for row in rows if row["method"] == "osta" and row["variant"] == MISSING]
    values = pd.Series(
        [row["dca"] for row in base if row.get("dca") is not None], dtype="float64"
    )
    if values.empty:
        return None
    median = float(values.median())
    summary = {"runs": int(values.size), "median": median, "dca_negative_median": median < 0}
    if median < 0:
        logger.warning("dca_median=%.4f runs=%d flag=dca_negative_median", median, values.size)
    return summary


def emit_report(root: str) -> ReportTables:
    """Write ``report.csv``, ``report.json`` and, when some combination ran twice, ``mrc.csv``.

    Output bytes only depend on the run files, so repeated calls rewrite
    identical files.
    """
    report = build_report(root)
    for name, text in report.files().items():
        path = os.path.join(root, name)
        if text is None:
            if os.path.exists(path):
                os.remove(path)
            continue
        with open(path, "w", newline="") as out:
            out.write(text)
    logger.info("report=%s rows=%d mrc=%d", root, len(report.rows), len(report.mrc))
    return report


def _check_run(run: Dict[str, Any], mismatches: List[str]) -> int:
    stored = run["report"]
    conf = ConfusionMatrix.from_list(stored["confusion"])
    expected = {
        "accuracy": metric_value(conf, run["metric"]),
        "ma": mean_accuracy(conf),
        "miou": mean_iou(conf),
    }
    checked = 0
    for name, value in expected.items():
        actual = run["accuracy"] if name == "accuracy" else stored[name]
        checked += 1
        if actual != value:
            mismatches.append(f"{run['path']}: {name} stored={actual!r} recomputed={value!r}")
    return checked


def _check_file(path: str, expected: Optional[str], mismatches: List[str]) -> int:
    name = os.path.basename(path)
    if expected is None:
        if os.path.exists(path):
            mismatches.append(f"{name}: stale file")
        return 1
    if not os.path.isfile(path):
        mismatches.append(f"{name}: missing")
        return 1
    with open(path, newline="") as text_in:
        actual = text_in.read()
    if actual == expected:
        return 1
    actual_lines, expected_lines = actual.splitlines(), expected.splitlines()
    for number, (left, right) in enumerate(zip(actual_lines, expected_lines), 1):
        if left != right:
            mismatches.append(f"{name}:{number}: stored={left!r} recomputed={right!r}")
    if len(actual_lines) != len(expected_lines):
        mismatches.append(
            f"{name}: stored {len(actual_lines)} lines, recomputed {len(expected_lines)}"
        )
    return 1


def verify(root: str, extra_files: Optional[Dict[str, Optional[str]]] = None) -> int:
    """Recompute every stored number of a result tree and compare for exact equality.

    Args:
        root: Result tree.
        extra_files: Further file name to expected text pairs, e.g. the scatter CSV.

    Returns:
        The number of checked values and files.

    Raises:
        VerificationMismatchError: Listing every difference.
    """
    mismatches: List[str] = []
    runs = load_runs(root)
    checked = sum(_check_run(run, mismatches) for run in runs)
    report = build_report(root)
    expected_files = dict(report.files())
    expected_files.update(extra_files or {})
    for name, text in expected_files.items():
        checked += _check_file(os.path.join(root, name), text, mismatches)
    for seed, table in sgs_tables(root, runs).items():
        path = os.path.join(root, cell_path("sgs", seed), SGS_FILE)
        if not os.path.isfile(path):
            mismatches.append(f"{cell_path('sgs', seed)}/{SGS_FILE}: missing")
            continue
        stored = SgsTable.from_csv(path)
        checked += 1
        if not stored.data.equals(table.data):
            mismatches.append(f"{cell_path('sgs', seed)}/{SGS_FILE}: rows differ from members")
    if mismatches:
        for mismatch in mismatches:
            logger.error("verify=%s mismatch=%s", root, mismatch)
        raise VerificationMismatchError(
            f"{len(mismatches)} stored values differ from their recomputation.", mismatches
        )
    logger.info("verify=%s checked=%d mismatches=0", root, checked)
    return checked
