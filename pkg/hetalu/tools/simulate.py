from hetalu.services import evaluator_service
from hetalu.services.policy_service import build_config
from hetalu.tools.common import (
    INPUT_ERRORS, add_power_level_arg, add_system_args, add_workload_args, fail, load_system,
    load_workload, manifest_for, policy_type, workload_inputs,
)
from hetalu.utils.reporting import write_report


def register(subparsers) -> None:
    parser = subparsers.add_parser("simulate", help="evaluate one policy on one core configuration")
    add_workload_args(parser)
    parser.add_argument("--policy", type=policy_type, default="hetero-perf",
                        help="hetero-perf | hetero-energy | homog:<width> | governor (default: hetero-perf)")
    add_power_level_arg(parser)
    add_system_args(parser)
    parser.set_defaults(handler=run)


def run(args) -> int:
    """
    Evaluate one routing policy on one core configuration.

    Args:
        args: Parsed options; the workload, --policy, --power-level, --arch and calibration choices

    Returns:
        0 after writing the one-row report (plus detail table), 2 on bad input
    """
    try:
        profile = load_workload(args)
        calibration, clock = load_system(args)
        config = build_config(args.policy, args.arch, calibration, clock=clock,
                              power_level=args.power_level, power_gate_idle=args.power_gate_idle)
        report = evaluator_service.evaluate(profile, args.policy, config)
        report = evaluator_service.normalize(report, report)
        frames = [evaluator_service.report_frame([report])]
        if args.detail:
            frames.append(evaluator_service.detail_frame([report]))
        manifest = manifest_for(args, inputs=workload_inputs(args), flags={
            "arch": str(args.arch),
            "policy": args.policy.label,
            "power_level": str(args.power_level),
            "frequency_ghz": repr(clock.frequency_ghz),
            "baseline": report.label,
        })
        write_report(args.out, manifest, frames)
    except INPUT_ERRORS as e:
        return fail(args.command, e)
    return 0
