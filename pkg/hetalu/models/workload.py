from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Mapping

BUCKETS = (4, 8, 12, 16, 32, 64)
MAX_OPERAND = (1 << 64) - 1


@dataclass(frozen=True, slots=True)
class TraceRecord:
    """One dynamic instruction read from a trace."""
    opcode: str
    operand_a: int
    operand_b: int
    line_no: int = 0

    def __post_init__(self):
        for value in (self.operand_a, self.operand_b):
            if value < 0 or value > MAX_OPERAND:
                raise ValueError(f"Operand {value} does not fit in 64 bits")


@dataclass(frozen=True, order=True)
class OpClass:
    """Operand-width bucket of an ADD, sized by its larger operand."""
    bucket_bits: int

    def __post_init__(self):
        if self.bucket_bits not in BUCKETS:
            raise ValueError(f"Bucket must be one of {BUCKETS}, got {self.bucket_bits}")

    def __str__(self):
        return f"{self.bucket_bits}-bit"


@dataclass(frozen=True)
class WorkloadProfile:
    """Histogram of ADD counts per operand-width bucket."""
    counts: Mapping[OpClass, int]
    ignored: int = field(default=0, compare=False)

    def __post_init__(self):
        cleaned = {}
        for op_class, count in self.counts.items():
            if count < 0:
                raise ValueError(f"Negative count for {op_class}")
            if count:
                cleaned[op_class] = int(count)
        object.__setattr__(self, "counts", dict(sorted(cleaned.items())))

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def count(self, bucket_bits: int) -> int:
        return self.counts.get(OpClass(bucket_bits), 0)

    def share(self, max_bits: int) -> float:
        """Fraction of ops whose bucket is at most max_bits (inclusive)."""
        if not self.total:
            return 0.0
        selected = sum(c for oc, c in self.counts.items() if oc.bucket_bits <= max_bits)
        return selected / self.total

    def as_dict(self) -> Dict[int, int]:
        return {oc.bucket_bits: c for oc, c in self.counts.items()}

    def __add__(self, other: "WorkloadProfile") -> "WorkloadProfile":
        merged = Counter(self.counts)
        merged.update(other.counts)
        return WorkloadProfile(dict(merged), ignored=self.ignored + other.ignored)

    def scaled(self, factor: int) -> "WorkloadProfile":
        if factor < 1:
            raise ValueError("Count scale factor must be a positive integer")
        return WorkloadProfile({oc: c * factor for oc, c in self.counts.items()})
