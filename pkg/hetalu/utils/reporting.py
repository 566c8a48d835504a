import shlex
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, TextIO

import pandas as pd

from hetalu.models.report import RunManifest

CSV_FLOAT_FORMAT = "%.6g"


def manifest_lines(manifest: RunManifest) -> List[str]:
    """Comment header that makes an output file reproducible on its own."""
    lines = [
        f"# hetalu {manifest.version}",
        f"# subcommand: {manifest.subcommand}",
        f"# command: hetalu {' '.join(shlex.quote(a) for a in manifest.argv)}",
    ]
    if manifest.inputs:
        lines.append(f"# inputs: {', '.join(manifest.inputs)}")
    for key, value in sorted(manifest.flags.items()):
        lines.append(f"# {key}: {value}")
    if manifest.seed is not None:
        lines.append(f"# seed: {manifest.seed}")
    lines.append(f"# output: {manifest.output}")
    return [line + "\n" for line in lines]


@contextmanager
def open_output(path: str) -> Iterator[TextIO]:
    """Text stream for path; '-' is stdout."""
    if path == "-":
        yield sys.stdout
        sys.stdout.flush()
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        yield fh


def write_report(path: str, manifest: RunManifest, frames: Sequence[pd.DataFrame]) -> None:
    """Manifest header, then each table; tables after the first are separated by a blank line."""
    with open_output(path) as fh:
        fh.writelines(manifest_lines(manifest))
        for index, frame in enumerate(frames):
            if index:
                fh.write("\n")
            fh.write(frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n"))


def write_text(path: str, manifest: Optional[RunManifest], body: str) -> None:
    with open_output(path) as fh:
        if manifest is not None:
            fh.writelines(manifest_lines(manifest))
        fh.write(body)
