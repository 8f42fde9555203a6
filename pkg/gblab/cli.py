"""The ``gblab`` command.

Exit status is 0 when every check passes, 1 when some check fails and 2 for unusable
input: malformed JSON, a bad configuration or an unknown flag.
"""

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np

from gblab.__about__ import __version__
from gblab.angles import hazzidakis_boundary_rhs
from gblab.angles import hazzidakis_rhs
from gblab.angles import solid_angles
from gblab.chains import boundary
from gblab.chains import is_cycle
from gblab.config import FORMATS
from gblab.config import SUITES
from gblab.config import RunConfig
from gblab.config import load_config
from gblab.config import parse_seed
from gblab.errors import ConfigError
from gblab.errors import GBLabError
from gblab.errors import InputError
from gblab.flatform import FlatBilinearTensor
from gblab.flatform import diagonalize
from gblab.flatform import flatness_residual
from gblab.interchange import chain_record
from gblab.interchange import dump_json
from gblab.interchange import load_json
from gblab.interchange import read_chain
from gblab.interchange import read_matrix
from gblab.interchange import read_tensor
from gblab.pfaffian import SkewMatrix
from gblab.pfaffian import pfaffian
from gblab.report import Report
from gblab.report import render
from gblab.verifications import run_suite
from gblab.verifications import verify_all

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
DEFAULT_SAMPLES = 1_000_000


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="more logging, repeat for debug")
    common.add_argument("-q", "--quiet", action="store_true", help="only log errors")
    common.add_argument("--config", type=Path, help="TOML configuration file")
    common.add_argument("--seed", type=parse_seed, help="random seed, overrides GBLAB_SEED")
    common.add_argument("--format", choices=FORMATS, help="output format")
    common.add_argument("--out", type=Path, help="write the output here instead of stdout")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="gblab",
        description="Numerical checks of Gauss-Bonnet, Thom form and flat bilinear form identities.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", parents=[common], help="run a verification suite")
    verify.add_argument("suite", choices=(*SUITES, "all"))
    verify.add_argument("--jobs", type=int, help="suites run concurrently by 'verify all'")
    verify.add_argument("--resolution", type=int, help="main grid resolution of the suite")
    verify.add_argument("--no-timestamp", action="store_true", help="omit wall time and timestamp")

    compute = commands.add_parser("compute", help="compute a single object from a JSON file")
    objects = compute.add_subparsers(dest="object", required=True)
    for name, flag, text in (
        ("pfaffian", "--input", "Pfaffian of a skew matrix"),
        ("diagonalize", "--input", "rank-one splitting of a flat bilinear form"),
        ("solid-angle", "--coframe", "cone fractions of a coframe"),
        ("boundary", "--input", "boundary of a chain"),
    ):
        command = objects.add_parser(name, parents=[common], help=text)
        command.add_argument(flag, dest="input", type=Path, required=True)
        if name == "solid-angle":
            command.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)

    report = commands.add_parser("report", parents=[common], help="render a saved JSON report")
    report.add_argument("--input", type=Path, required=True)
    return parser


def _configure_logging(verbose: int, *, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    else:
        level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    logger.info("wrote %s", out)


def _verify(args: argparse.Namespace, config: RunConfig) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    if args.resolution is not None:
        for name in names:
            if args.suite != "all" or hasattr(config.suite(name), "resolution"):
                config = config.with_resolution(name, args.resolution)
    report = verify_all(config, names) if args.suite == "all" else run_suite(args.suite, config)
    _emit(render(report, config.format), args.out)
    return EXIT_PASS if report.passed else EXIT_FAIL


def _text(result: dict[str, Any]) -> str:
    return "".join(f"{key}: {value}\n" for key, value in result.items())


def _compute(args: argparse.Namespace, config: RunConfig) -> int:
    result: dict[str, Any]
    if args.object == "pfaffian":
        skew = SkewMatrix(read_matrix(args.input))
        value = pfaffian(skew)
        if config.format == "text":
            _emit(f"{value:.17g}\n", args.out)
            return EXIT_PASS
        result = {"dim": skew.dim, "pfaffian": value}
    elif args.object == "diagonalize":
        tensor = FlatBilinearTensor(read_tensor(args.input))
        result = diagonalize(tensor, seed=config.seed).as_dict()
        result["flatness"] = flatness_residual(tensor, seed=config.seed)
    elif args.object == "solid-angle":
        coframe = read_matrix(args.input)
        fractions = solid_angles(coframe, args.samples, config.seed)
        n = coframe.shape[0]
        rhs = hazzidakis_rhs(fractions) if n % 2 == 0 else hazzidakis_boundary_rhs(fractions)
        result = {"fractions": fractions, "sum": float(np.sum(fractions)), "rhs": rhs, "samples": args.samples}
    else:
        chain = read_chain(args.input)
        result = {"boundary": chain_record(boundary(chain)), "is_cycle": is_cycle(chain)}
    if config.format == "csv":
        logger.warning("compute has no csv output, writing json")
    _emit(_text(result) if config.format == "text" else dump_json(result), args.out)
    return EXIT_PASS


def _report(args: argparse.Namespace, config: RunConfig) -> int:
    payload = load_json(args.input)
    try:
        report = Report.from_dict(payload)
    except (AttributeError, KeyError, TypeError, ValueError) as err:
        raise InputError(f"{args.input}: not a gblab report: {err}") from err
    _emit(render(report, config.format), args.out)
    return EXIT_PASS if report.passed else EXIT_FAIL


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``gblab`` console script."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_PASS if err.code == 0 else EXIT_USAGE
    _configure_logging(args.verbose, quiet=args.quiet)
    overrides = {"seed": args.seed, "format": args.format}
    if args.command == "verify":
        overrides["jobs"] = args.jobs
        overrides["timestamp"] = False if args.no_timestamp else None
    try:
        config = load_config(args.config, **overrides)
        if args.command == "verify":
            return _verify(args, config)
        if args.command == "compute":
            return _compute(args, config)
        return _report(args, config)
    except (InputError, ConfigError) as err:
        logger.error("%s", err)
        return EXIT_USAGE
    except GBLabError as err:
        logger.error("cannot compute %s: %s", getattr(args, "object", args.command), err)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
