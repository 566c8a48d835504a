from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

from hetalu.models.workload import OpClass


@dataclass(frozen=True)
class BucketResult:
    op_class: OpClass
    count: int
    adder_width: int
    cycles: int
    energy_pj: float


@dataclass(frozen=True)
class EvaluationReport:
    """Workload totals for one (config, policy) pair."""
    label: str
    policy: str
    power_level: int
    arch_bits: int
    per_bucket: Dict[OpClass, BucketResult]
    total_ops: int
    total_cycles: int
    total_energy_pj: float
    area_units: float
    profile_key: Tuple[Tuple[int, int], ...]
    baseline: Optional[str] = None
    normalized_cpi: Optional[float] = None
    normalized_energy: Optional[float] = None

    @property
    def avg_cpi(self) -> float:
        return self.total_cycles / self.total_ops

    def with_normalization(self, baseline: str, cpi: float, energy: float) -> "EvaluationReport":
        return replace(self, baseline=baseline, normalized_cpi=cpi, normalized_energy=energy)


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce an output file."""
    subcommand: str
    argv: Tuple[str, ...]
    version: str
    inputs: Tuple[str, ...] = ()
    seed: Optional[int] = None
    output: str = "-"
    flags: Dict[str, str] = field(default_factory=dict)
