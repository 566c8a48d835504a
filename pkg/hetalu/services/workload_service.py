import io
import logging
import re
from collections import Counter
from typing import Iterable, Iterator, Mapping, Optional, TextIO, Union

import numpy as np
import pandas as pd

from hetalu.models.workload import BUCKETS, MAX_OPERAND, OpClass, TraceRecord, WorkloadProfile
from hetalu.utils.parsing import parse_operand, parse_pin_operand

logger = logging.getLogger(__name__)

ADD_OPCODE = "ADD"
TRACE_FORMATS = ("canonical", "pin")
PROFILE_COLUMNS = ["bucket_bits", "count"]
OPCODE_PATTERN = re.compile(r'^[A-Za-z][A-Za-z0-9.]{0,15}$')

# Dhrystone ADD operations by larger-operand width.
DHRYSTONE_COUNTS = {4: 200776, 8: 52734, 12: 14070, 16: 83628, 32: 196, 64: 712433}


class WorkloadError(Exception):
    """Workload and trace errors."""
    pass


class TraceParseError(WorkloadError):
    """Malformed trace line."""

    def __init__(self, line_no: int, text: str, reason: str):
        self.line_no = line_no
        self.text = text
        super().__init__(f"line {line_no}: {reason}: {text!r}")


def parse_trace(lines: Iterable[Union[str, bytes]], fmt: str = "canonical") -> Iterator[TraceRecord]:
    """Yield one record per instruction line, in order; byte lines are decoded as UTF-8."""
    if fmt not in TRACE_FORMATS:
        raise WorkloadError(f"Unknown trace format {fmt!r}; expected one of {TRACE_FORMATS}")
    operand = parse_operand if fmt == "canonical" else parse_pin_operand
    for line_no, raw in enumerate(lines, start=1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError as e:
                shown = raw.decode("utf-8", "replace").rstrip("\r\n")
                raise TraceParseError(line_no, shown, f"not valid UTF-8 ({e.reason} at byte {e.start})")
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        tokens = text.split()
        if len(tokens) != 3:
            raise TraceParseError(line_no, raw.rstrip("\r\n"), "expected <OPCODE> <operand> <operand>")
        if not OPCODE_PATTERN.match(tokens[0]):
            raise TraceParseError(line_no, raw.rstrip("\r\n"), "invalid opcode")
        try:
            a, b = operand(tokens[1]), operand(tokens[2])
        except ValueError as e:
            raise TraceParseError(line_no, raw.rstrip("\r\n"), f"bad operand ({e})")
        if a > MAX_OPERAND or b > MAX_OPERAND:
            raise TraceParseError(line_no, raw.rstrip("\r\n"), "operand wider than 64 bits")
        yield TraceRecord(tokens[0].upper(), a, b, line_no)


def operand_width(value: int) -> int:
    """Significant bits of an unsigned value; zero counts as one bit."""
    return max(1, int(value).bit_length())


def bucketize(width: int) -> OpClass:
    if width < 1 or width > 64:
        raise WorkloadError(f"Operand width {width} is outside 1-64 bits")
    return OpClass(next(b for b in BUCKETS if b >= width))


def classify(record: TraceRecord) -> Optional[OpClass]:
    """Bucket of an ADD by its larger operand; None for any other opcode."""
    if record.opcode != ADD_OPCODE:
        return None
    return bucketize(max(operand_width(record.operand_a), operand_width(record.operand_b)))


def build_profile(records: Iterable[TraceRecord]) -> WorkloadProfile:
    counts = Counter()
    ignored = 0
    for record in records:
        op_class = classify(record)
        if op_class is None:
            ignored += 1
        else:
            counts[op_class] += 1
    if not counts:
        raise WorkloadError(f"Trace holds no ADD operations ({ignored} other instructions ignored)")
    profile = WorkloadProfile(dict(counts), ignored=ignored)
    logger.info(f"Built profile of {profile.total} ADD ops ({ignored} non-ADD ignored)")
    return profile


def merge_profiles(*profiles: WorkloadProfile) -> WorkloadProfile:
    """Pointwise count sum, for traces analysed in shards."""
    if not profiles:
        raise WorkloadError("Nothing to merge")
    merged = profiles[0]
    for profile in profiles[1:]:
        merged = merged + profile
    return merged


def dhrystone_profile() -> WorkloadProfile:
    return WorkloadProfile({OpClass(b): c for b, c in DHRYSTONE_COUNTS.items()})


def bucket_range(bucket_bits: int):
    """Inclusive operand value range whose width falls in the bucket."""
    index = BUCKETS.index(bucket_bits)
    low = 0 if index == 0 else 1 << BUCKETS[index - 1]
    return low, (1 << bucket_bits) - 1


def _validated_weights(distribution: Mapping[int, float]) -> np.ndarray:
    for bucket, weight in distribution.items():
        if bucket not in BUCKETS:
            raise WorkloadError(f"Unknown bucket {bucket}; expected one of {BUCKETS}")
        if weight < 0:
            raise WorkloadError(f"Negative weight {weight} for bucket {bucket}")
    weights = np.array([float(distribution.get(b, 0.0)) for b in BUCKETS])
    if weights.sum() <= 0:
        raise WorkloadError("Distribution weights are all zero")
    return weights / weights.sum()


def _draw_buckets(distribution: Mapping[int, float], n: int, rng: np.random.Generator) -> np.ndarray:
    if n <= 0:
        raise WorkloadError("Trace length must be positive")
    return rng.choice(np.array(BUCKETS), size=n, p=_validated_weights(distribution))


def generate_buckets(distribution: Mapping[int, float], n: int, seed: int) -> np.ndarray:
    """Bucket of each record generate_trace yields for the same arguments."""
    return _draw_buckets(distribution, n, np.random.default_rng(seed))


def _records_for(buckets: np.ndarray, rng: np.random.Generator) -> Iterator[TraceRecord]:
    larger = np.zeros(buckets.size, dtype=np.uint64)
    other = np.zeros(buckets.size, dtype=np.uint64)
    for bucket in BUCKETS:
        index = np.flatnonzero(buckets == bucket)
        if not index.size:
            continue
        low, high = bucket_range(bucket)
        larger[index] = rng.integers(low, high, size=index.size, endpoint=True, dtype=np.uint64)
        other[index] = rng.integers(0, high, size=index.size, endpoint=True, dtype=np.uint64)
    swap = rng.random(buckets.size) < 0.5
    for i in range(buckets.size):
        a, b = int(larger[i]), int(other[i])
        if swap[i]:
            a, b = b, a
        yield TraceRecord(ADD_OPCODE, a, b, i + 1)


def generate_trace(distribution: Mapping[int, float], n: int, seed: int) -> Iterator[TraceRecord]:
    """Seeded synthetic ADD trace; the larger operand is uniform within its bucket's range."""
    rng = np.random.default_rng(seed)
    buckets = _draw_buckets(distribution, n, rng)
    logger.info(f"Generating {n} ADD records with seed {seed}")
    return _records_for(buckets, rng)


def generate_exact_trace(profile: WorkloadProfile, seed: int) -> Iterator[TraceRecord]:
    """Shuffled trace whose profile equals the given counts exactly."""
    if not profile.total:
        raise WorkloadError("Cannot generate a trace from an empty profile")
    rng = np.random.default_rng(seed)
    buckets = np.repeat(
        np.array([oc.bucket_bits for oc in profile.counts]),
        np.array(list(profile.counts.values())),
    )
    rng.shuffle(buckets)
    logger.info(f"Generating exact trace of {profile.total} ADD records with seed {seed}")
    return _records_for(buckets, rng)


def format_record(record: TraceRecord) -> str:
    return f"{record.opcode} 0x{record.operand_a:x} 0x{record.operand_b:x}"


def serialize_profile(profile: WorkloadProfile) -> str:
    frame = pd.DataFrame({"bucket_bits": list(BUCKETS), "count": [profile.count(b) for b in BUCKETS]})
    return frame.to_csv(index=False, lineterminator="\n")


def parse_profile(source: TextIO) -> WorkloadProfile:
    """Read a bucket_bits,count CSV; '#' lines are manifest comments."""
    # header=None keeps the header as a data row so a row with an extra field
    # is a tokenizing error rather than an implicit index column.
    try:
        frame = pd.read_csv(source, comment="#", dtype=str, skip_blank_lines=True, header=None)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise WorkloadError(f"Malformed profile CSV: {e}")
    header = [str(v).strip() for v in frame.iloc[0]]
    if header != PROFILE_COLUMNS:
        raise WorkloadError(f"Profile header must be {','.join(PROFILE_COLUMNS)}, got {','.join(header)}")
    counts = {}
    for raw_bucket, raw_count in frame.iloc[1:].itertuples(index=False, name=None):
        try:
            bucket, count = int(raw_bucket), int(raw_count)
        except (TypeError, ValueError):
            raise WorkloadError(f"Profile row {raw_bucket},{raw_count} is not two integers")
        if bucket not in BUCKETS:
            raise WorkloadError(f"Profile bucket {bucket} is not one of {BUCKETS}")
        if OpClass(bucket) in counts:
            raise WorkloadError(f"Profile lists bucket {bucket} twice")
        if count < 0:
            raise WorkloadError(f"Profile count for bucket {bucket} is negative")
        counts[OpClass(bucket)] = count
    profile = WorkloadProfile(counts)
    if not profile.total:
        raise WorkloadError("Profile has no operations")
    return profile


def load_profile(path) -> WorkloadProfile:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_profile(io.StringIO(fh.read()))
    except OSError as e:
        raise WorkloadError(f"Cannot read profile {path}: {e.strerror or e}")
