from hetalu.services import evaluator_service
from hetalu.services.policy_service import PolicyError, build_config, parse_policy
from hetalu.tools.common import (
    INPUT_ERRORS, add_system_args, add_workload_args, fail, load_system, load_workload,
    manifest_for, workload_inputs,
)
from hetalu.utils.parsing import parse_config_token
from hetalu.utils.reporting import write_report


def register(subparsers) -> None:
    parser = subparsers.add_parser("compare", help="compare several configurations against a baseline")
    add_workload_args(parser)
    parser.add_argument("--configs", required=True,
                        help="comma list of <policy>[@<power_level>], e.g. homog:64,hetero-perf,governor@25")
    parser.add_argument("--baseline", required=True, help="config label every row is normalized to")
    add_system_args(parser)
    parser.set_defaults(handler=run)


def run_specs(tokens, arch, calibration, clock, power_gate_idle):
    runs = []
    for token in tokens:
        try:
            name, level = parse_config_token(token)
        except ValueError as e:
            raise PolicyError(str(e))
        policy = parse_policy(name)
        config = build_config(policy, arch, calibration, clock=clock, power_level=level or 100,
                              power_gate_idle=power_gate_idle)
        runs.append(evaluator_service.RunSpec(token, policy, config))
    return runs


def run(args) -> int:
    """
    Evaluate every --configs entry on one workload and normalize to --baseline.

    Args:
        args: Parsed options; --configs is a comma list of <policy>[@<power_level>]

    Returns:
        0 after writing the comparison table in input order, 2 on bad input
    """
    tokens = [t.strip() for t in args.configs.split(",") if t.strip()]
    if len(tokens) < 2:
        return fail(args.command, "--configs needs at least two configurations")
    try:
        profile = load_workload(args)
        calibration, clock = load_system(args)
        runs = run_specs(tokens, args.arch, calibration, clock, args.power_gate_idle)
        reports = evaluator_service.compare_reports(profile, runs, args.baseline)
        frames = [evaluator_service.report_frame(reports)]
        if args.detail:
            frames.append(evaluator_service.detail_frame(reports))
        manifest = manifest_for(args, inputs=workload_inputs(args), flags={
            "arch": str(args.arch),
            "configs": ",".join(tokens),
            "baseline": args.baseline,
            "frequency_ghz": repr(clock.frequency_ghz),
        })
        write_report(args.out, manifest, frames)
    except INPUT_ERRORS as e:
        return fail(args.command, e)
    return 0
