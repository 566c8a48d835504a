import sys

from hetalu.services import calibration_service
from hetalu.services.workload_service import DHRYSTONE_COUNTS
from hetalu.tools.common import INPUT_ERRORS, fail, manifest_for
from hetalu.utils.reporting import write_text


def register(subparsers) -> None:
    parser = subparsers.add_parser("calibrate", help="fit a calibration file from energy anchors")
    parser.add_argument("--anchors", metavar="PATH",
                        help="anchors INI (default: the built-in published anchors)")
    parser.add_argument("--out", default="-", metavar="PATH", help="calibration INI (default: stdout)")
    parser.set_defaults(handler=run)


def run(args) -> int:
    """
    Fit adder powers from energy anchors and write a calibration INI.

    Args:
        args: Parsed options; --anchors defaults to the built-in published anchors

    Returns:
        0 after writing the table (anchor errors go to stderr), 2 on bad anchors
    """
    try:
        if args.anchors:
            anchors, model, aggregate = calibration_service.load_anchors(args.anchors)
        else:
            anchors = calibration_service.PUBLISHED_ANCHORS
            model = calibration_service.FitModel()
            aggregate = calibration_service.PUBLISHED_AGGREGATE
        table = calibration_service.fit_calibration(anchors, model, aggregate, DHRYSTONE_COUNTS)
        manifest = manifest_for(args, inputs=[args.anchors or "built-in anchors"])
        write_text(args.out, manifest, calibration_service.render_calibration(table))
    except INPUT_ERRORS as e:
        return fail(args.command, e)

    for anchor in anchors:
        error = calibration_service.anchor_error(table, anchor)
        print(f"anchor {anchor.name}: {anchor.energy_pj} pJ target, {error:+.2%}", file=sys.stderr)
    return 0
