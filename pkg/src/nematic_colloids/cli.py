"""
Command-line entry point for nematic-colloids.

Subcommands print their report on stdout. Failures print one line on
stderr of the form

    error: <category>: <message>

with category invalid-input or unknown-resource (exit code 2) or runtime
(exit code 1).
"""
import argparse
import sys
from typing import List, Optional, Sequence, Tuple

from .core.shapes import DEFAULT_ORDER
from .tools.base import INVALID_INPUT, UNKNOWN_RESOURCE
from .tools.definitions import (
    DESIGN_DESC,
    FHOM_DESC,
    MINIMIZE_DESC,
    MOMENTS_DESC,
    SELFTEST_DESC,
    SWEEP_DESC,
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_INPUT = 2


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nematic-colloids",
        description="Homogenised Landau-de Gennes potentials for nematic colloids.",
    )
    parser.add_argument("--config", help="JSON or YAML run configuration (or NEMATIC_COLLOIDS_CONFIG)")
    parser.add_argument("--threads", type=int, help="Worker cap for the sweep")
    parser.add_argument("--output-dir", help="Directory for reports, CSV files and dumps")
    parser.add_argument("--seed", type=int, help="Seed for every randomised step")
    parser.add_argument("--log-level", help="Logging level (DEBUG, INFO, WARNING, ...)")
    sub = parser.add_subparsers(dest="command", required=True)

    fmt = argparse.RawDescriptionHelpFormatter
    moments = sub.add_parser("moments", description=MOMENTS_DESC, formatter_class=fmt)
    moments.add_argument("shapes", nargs="*", help="Catalogue names; default: all")
    moments.add_argument("--order", type=int, default=DEFAULT_ORDER)

    design = sub.add_parser("design", description=DESIGN_DESC, formatter_class=fmt)
    design.add_argument("--target", type=_float_list, required=True)
    design.add_argument("--strength", type=float, required=True)
    design.add_argument("--a", type=float, default=None)
    design.add_argument("--a-prime", type=float, required=True)
    design.add_argument("--order", type=int, default=DEFAULT_ORDER)

    fhom = sub.add_parser("fhom", description=FHOM_DESC, formatter_class=fmt)
    fhom.add_argument("input")
    fhom.add_argument("--output", default=None)
    fhom.add_argument("--order", type=int, default=DEFAULT_ORDER)

    sub.add_parser("minimize", description=MINIMIZE_DESC, formatter_class=fmt)
    sub.add_parser("sweep", description=SWEEP_DESC, formatter_class=fmt)

    selftest = sub.add_parser("selftest", description=SELFTEST_DESC, formatter_class=fmt)
    selftest.add_argument("--with-sweep", action="store_true")
    return parser


def categorise(error: Exception) -> Tuple[str, str, int]:
    """Category, message and exit code for a failed command."""
    message = str(error)
    if isinstance(error, ValueError):
        if message.startswith(UNKNOWN_RESOURCE):
            return "unknown-resource", message[len(UNKNOWN_RESOURCE):], EXIT_INPUT
        if message.startswith(INVALID_INPUT):
            message = message[len(INVALID_INPUT):]
        return "invalid-input", message, EXIT_INPUT
    return "runtime", message, EXIT_RUNTIME


def dispatch(args: argparse.Namespace) -> str:
    from .toolkit import ColloidToolkit

    toolkit = ColloidToolkit(
        config_path=args.config,
        threads=args.threads,
        output_dir=args.output_dir,
        seed=args.seed,
        log_level=args.log_level,
    )
    if args.command == "moments":
        return toolkit.moment_tools.moments(args.shapes, args.order)
    if args.command == "design":
        return toolkit.design_tools.design(args.target, args.strength, args.a_prime, args.a, args.order)
    if args.command == "fhom":
        return toolkit.potential_tools.fhom(args.input, args.output, args.order)
    if args.command == "minimize":
        return toolkit.minimize_tools.minimize()
    if args.command == "sweep":
        return toolkit.sweep_tools.sweep()
    return toolkit.selftest_tools.selftest(args.with_sweep)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    try:
        report = dispatch(args)
    except KeyboardInterrupt:
        print("\nInterrupted", file=sys.stderr, flush=True)
        return EXIT_RUNTIME
    except Exception as e:
        category, message, code = categorise(e)
        first_line = message.strip().splitlines()[0] if message.strip() else type(e).__name__
        print(f"error: {category}: {first_line}", file=sys.stderr, flush=True)
        return code
    print(report, flush=True)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
