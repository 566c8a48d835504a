import argparse
import math
import sys
from typing import Dict, Optional, Sequence

from hetalu import __version__
from hetalu.models.adder import ClockConfig
from hetalu.models.report import RunManifest
from hetalu.models.system import ARCH_WIDTHS, POWER_LEVELS
from hetalu.models.workload import WorkloadProfile
from hetalu.services.adder_service import AdderModelError
from hetalu.services.calibration_service import CalibrationError, get_calibration_path, resolve_calibration
from hetalu.services.evaluator_service import EvaluationError
from hetalu.services.policy_service import PolicyError, parse_policy
from hetalu.services.workload_service import WorkloadError, dhrystone_profile, load_profile

# Service errors a tool reports as bad input (exit status 2).
INPUT_ERRORS = (WorkloadError, CalibrationError, PolicyError, EvaluationError, AdderModelError, OSError,
                UnicodeDecodeError)


def policy_type(text: str):
    try:
        return parse_policy(text)
    except PolicyError as e:
        raise argparse.ArgumentTypeError(str(e))


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")
    if not 0 < value < math.inf:
        raise argparse.ArgumentTypeError(f"{text!r} must be a positive finite number")
    return value


def add_workload_args(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--profile", metavar="PATH", help="profile CSV written by `analyze`")
    source.add_argument("--dhrystone", action="store_true", help="use the bundled Dhrystone ADD profile")


def add_system_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--arch", type=int, choices=ARCH_WIDTHS, default=64,
                        help="architecture width in bits (default: 64)")
    parser.add_argument("--calibration", metavar="PATH",
                        help="calibration INI (default: $HETALU_CALIBRATION or the built-in fit)")
    parser.add_argument("--freq-ghz", type=positive_float, default=None,
                        help="clock frequency (default: the calibration's, 1.0 GHz built-in)")
    parser.add_argument("--power-gate-idle", action="store_true",
                        help="charge static power of the executing adder only")
    parser.add_argument("--detail", action="store_true", help="append the per-bucket table")
    parser.add_argument("--out", default="-", metavar="PATH", help="output CSV (default: stdout)")


def add_power_level_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--power-level", type=int, choices=POWER_LEVELS, default=100,
                        help="governor energy tier in percent (default: 100)")


def load_workload(args) -> WorkloadProfile:
    if args.dhrystone:
        return dhrystone_profile()
    return load_profile(args.profile)


def load_system(args):
    calibration = resolve_calibration(args.calibration)
    clock = ClockConfig(args.freq_ghz) if args.freq_ghz else ClockConfig(calibration.frequency_ghz)
    return calibration, clock


def manifest_for(args, inputs: Sequence[str] = (), seed: Optional[int] = None,
                 flags: Optional[Dict[str, str]] = None) -> RunManifest:
    return RunManifest(
        subcommand=args.command,
        argv=args.argv,
        version=__version__,
        inputs=tuple(inputs),
        seed=seed,
        output=getattr(args, "out", "-"),
        flags=dict(flags or {}),
    )


def workload_inputs(args) -> Sequence[str]:
    inputs = ["dhrystone (built-in)" if args.dhrystone else args.profile]
    inputs.append(args.calibration or get_calibration_path() or "built-in calibration")
    return inputs


def fail(command: str, message) -> int:
    print(f"hetalu {command}: error: {message}", file=sys.stderr)
    return 2
