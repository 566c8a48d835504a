import logging
import sys

from hetalu.models.workload import BUCKETS
from hetalu.services import workload_service
from hetalu.tools.common import INPUT_ERRORS, fail, manifest_for
from hetalu.utils.reporting import write_text

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("analyze", help="build an operand-width profile from an ADD trace")
    parser.add_argument("trace", help="trace file (UTF-8, one instruction per line)")
    parser.add_argument("--format", choices=workload_service.TRACE_FORMATS, default="canonical",
                        help="canonical '<OP> <a> <b>' or pin-like '<OP> <reg>=<hex> <reg>=<hex>'")
    parser.add_argument("--out", default="-", metavar="PATH", help="profile CSV (default: stdout)")
    parser.set_defaults(handler=run)


def run(args) -> int:
    """
    Build the operand-width profile of a trace and print its bucket shares.

    Args:
        args: Parsed options; the trace path, --format and --out

    Returns:
        0 after writing the profile CSV, 2 on an unreadable or malformed trace
    """
    try:
        with open(args.trace, "rb") as fh:
            profile = workload_service.build_profile(workload_service.parse_trace(fh, args.format))
        manifest = manifest_for(args, inputs=[args.trace], flags={"format": args.format})
        write_text(args.out, manifest, workload_service.serialize_profile(profile))
    except workload_service.TraceParseError as e:
        return fail(args.command, f"{args.trace}: {e}")
    except INPUT_ERRORS as e:
        return fail(args.command, e)

    summary = sys.stderr if args.out == "-" else sys.stdout
    print(f"ADD operations: {profile.total}  (non-ADD ignored: {profile.ignored})", file=summary)
    for bucket in BUCKETS:
        count = profile.count(bucket)
        print(f"  {bucket:>2}-bit: {count:>10}  {count / profile.total:7.2%}", file=summary)
    print(f"  <=16-bit share: {profile.share(16):.2%}", file=summary)
    logger.info(f"Analyzed {args.trace} into {args.out}")
    return 0
