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

"""Command-line interface: ``osta-selection {gen,split,run,report,plot,verify}``."""

import argparse
import logging
import os
import sys
from contextlib import contextmanager
from typing import Generator, List, Optional

from .config import DEFAULT_VAL_FRACTION, ExperimentConfig, read_config
from .data.synthetic import SyntheticSpec, generate_synthetic
from .exceptions import (
    ConfigError,
    FormatError,
    InvalidArgumentError,
    OstaError,
    PartialFailureError,
    VerificationMismatchError,
)
from .service import (
    ExitCode,
    emit_report,
    emit_scatter,
    existing_scatter_files,
    run_experiment,
    split_dataset,
    verify,
)

logger = logging.getLogger(__name__)

GENERIC_ERROR = 1


@contextmanager
def map_exit_code() -> Generator[None, None, None]:
    """Convert a package error to a ``SystemExit`` carrying the matching exit code."""
    try:
        yield
    except (ConfigError, InvalidArgumentError, FormatError) as err:
        logger.error("error=config message=%s", err)
        raise SystemExit(ExitCode.CONFIG_ERROR) from None
    except PartialFailureError as err:
        for failure in err.failed:
            logger.error("error=run_failed run=%s message=%s", failure["path"], failure["error"])
        raise SystemExit(ExitCode.PARTIAL_FAILURE) from None
    except VerificationMismatchError as err:
        for mismatch in err.mismatches:
            print(f"mismatch: {mismatch}", file=sys.stderr)
        raise SystemExit(ExitCode.VERIFICATION_MISMATCH) from None
    except OstaError as err:
        logger.error("error=%s message=%s", type(err).__name__, err)
        raise SystemExit(GENERIC_ERROR) from None


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    if not args.config:
        raise ConfigError("This command needs --config.")
    config = ExperimentConfig.load(args.config)
    return config.with_overrides(seed=args.seed, output_dir=args.out, workers=args.workers)


def _result_root(args: argparse.Namespace) -> str:
    if args.out:
        return os.path.abspath(args.out)
    if args.config:
        return ExperimentConfig.load(args.config).output_path
    raise ConfigError("Give the result tree with --out or --config.")


def _synthetic_spec(args: argparse.Namespace) -> SyntheticSpec:
    data = {}
    if args.config:
        document = read_config(args.config)
        if "schema_version" in document:
            config = ExperimentConfig.from_saved_format(document)
            if config.synthetic_spec is None:
                raise ConfigError(f"{args.config} does not configure a synthetic dataset.")
            data = config.synthetic_spec.to_dict()
        else:
            data = document
    if args.planted:
        data["planted"] = [int(c) for c in args.planted.split(",")]
    if args.snr is not None:
        data["snr"] = args.snr
    try:
        return SyntheticSpec.from_dict(data).validate()
    except TypeError as err:
        raise ConfigError(f"Invalid synthetic dataset recipe: {err}") from None


def cmd_gen(args: argparse.Namespace) -> None:
    """Generate a planted-subset dataset."""
    spec = _synthetic_spec(args)
    out_dir = args.out or os.path.join("data", "synthetic")
    _, manifest_path = generate_synthetic(spec, out_dir, seed=args.seed)
    print(manifest_path)


def cmd_split(args: argparse.Namespace) -> None:
    """Split a manifest into sub-train and sub-validation and store train statistics."""
    manifest = split_dataset(args.manifest, args.val_fraction, force=args.force)
    print(
        f"{args.manifest}: subtrain={len(manifest.paths('subtrain'))} "
        f"subval={len(manifest.paths('subval'))} test={len(manifest.paths('test'))}"
    )


def cmd_run(args: argparse.Namespace) -> None:
    """Run every cell of an experiment."""
    config = _load_config(args)
    runs = run_experiment(config, force=args.force)
    print(f"{config.output_path}: {len(runs)} runs recorded")


def cmd_report(args: argparse.Namespace) -> None:
    """Write the report tables of a result tree."""
    print(emit_report(_result_root(args)).report_csv(), end="")


def cmd_plot(args: argparse.Namespace) -> None:
    """Write the CAP scatter of a result tree."""
    svg_path, csv_path = emit_scatter(_result_root(args), seed=args.seed)
    print(svg_path)
    print(csv_path)


def cmd_verify(args: argparse.Namespace) -> None:
    """Recompute every stored number of a result tree."""
    root = _result_root(args)
    checked = verify(root, extra_files=existing_scatter_files(root))
    print(f"{root}: {checked} values and files verified")


def build_parser() -> argparse.ArgumentParser:
    """The argument parser; every subcommand takes the global flags."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment configuration (.json, .yaml, .yml)")
    common.add_argument("--seed", type=int, help="override the seed list with one seed")
    common.add_argument("--out", help="output directory or result tree")
    common.add_argument("--force", action="store_true", help="redo completed work")
    common.add_argument("--workers", type=int, help="concurrent runs")

    parser = argparse.ArgumentParser(
        prog="osta-selection", description="One-shot channel selection experiments."
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    gen = subparsers.add_parser("gen", parents=[common], help=cmd_gen.__doc__)
    gen.add_argument("--planted", help="planted channel ordinals, e.g. 1,3,5")
    gen.add_argument("--snr", type=float, help="class separation over noise")
    gen.set_defaults(handler=cmd_gen)

    split = subparsers.add_parser("split", parents=[common], help=cmd_split.__doc__)
    split.add_argument("manifest", help="manifest.json of the dataset")
    split.add_argument("--val-fraction", type=float, default=DEFAULT_VAL_FRACTION)
    split.set_defaults(handler=cmd_split)

    for name, handler in (
        ("run", cmd_run),
        ("report", cmd_report),
        ("plot", cmd_plot),
        ("verify", cmd_verify),
    ):
        sub = subparsers.add_parser(name, parents=[common], help=handler.__doc__)
        sub.set_defaults(handler=handler)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        with map_exit_code():
            args.handler(args)
    except SystemExit as exit_request:
        return int(exit_request.code or 0)
    return int(ExitCode.OK)


if __name__ == "__main__":
    sys.exit(main())
