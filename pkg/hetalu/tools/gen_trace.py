from hetalu.models.workload import OpClass, WorkloadProfile
from hetalu.services import workload_service
from hetalu.tools.common import INPUT_ERRORS, fail, manifest_for
from hetalu.utils.parsing import parse_distribution
from hetalu.utils.reporting import manifest_lines, open_output


def register(subparsers) -> None:
    parser = subparsers.add_parser("gen-trace", help="write a seeded synthetic ADD trace")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--dist", help="bucket:weight,... over buckets 4,8,12,16,32,64")
    source.add_argument("--dhrystone", action="store_true",
                        help="exact Dhrystone counts (implies --exact)")
    parser.add_argument("--n", type=int, default=1000, help="number of records (default: 1000)")
    parser.add_argument("--exact", action="store_true",
                        help="treat --dist weights as exact per-bucket counts; --n is ignored")
    parser.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")
    parser.add_argument("--out", default="-", metavar="PATH", help="trace file (default: stdout)")
    parser.set_defaults(handler=run)


def _exact_profile(distribution) -> WorkloadProfile:
    for bucket, weight in distribution.items():
        if weight != int(weight):
            raise workload_service.WorkloadError(f"--exact needs integer counts, got {weight} for bucket {bucket}")
    try:
        return WorkloadProfile({OpClass(b): int(w) for b, w in distribution.items()})
    except ValueError as e:
        raise workload_service.WorkloadError(str(e))


def run(args) -> int:
    """
    Write a seeded synthetic ADD trace in the canonical format.

    Args:
        args: Parsed options; --dist or --dhrystone, --n, --exact and --seed

    Returns:
        0 after writing the trace, 2 on a malformed distribution
    """
    try:
        if args.dhrystone:
            records = workload_service.generate_exact_trace(workload_service.dhrystone_profile(), args.seed)
            inputs = ["dhrystone (built-in)"]
        else:
            distribution = parse_distribution(args.dist)
            if args.exact:
                records = workload_service.generate_exact_trace(_exact_profile(distribution), args.seed)
            else:
                records = workload_service.generate_trace(distribution, args.n, args.seed)
            inputs = [f"dist {args.dist}"]
        manifest = manifest_for(args, inputs=inputs, seed=args.seed)
        with open_output(args.out) as fh:
            fh.writelines(manifest_lines(manifest))
            for record in records:
                fh.write(workload_service.format_record(record) + "\n")
    except ValueError as e:
        return fail(args.command, f"malformed distribution: {e}")
    except INPUT_ERRORS as e:
        return fail(args.command, e)
    return 0
