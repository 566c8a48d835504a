from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Mapping, Optional

from hetalu.models.adder import CalibrationTable, ClockConfig, EnergyBreakdown
from hetalu.models.workload import OpClass

POWER_LEVELS = (100, 50, 25)
ARCH_WIDTHS = (32, 64)

# Widest adder left enabled at each governor tier; None keeps every adder.
DEFAULT_TIER_CAPS: Mapping[int, Optional[int]] = {100: None, 50: 16, 25: 8}


class PolicyKind(str, Enum):
    HETERO_PERF = "hetero-perf"
    HETERO_ENERGY = "hetero-energy"
    HOMOGENEOUS = "homog"
    GOVERNOR = "governor"


@dataclass(frozen=True)
class RoutingPolicy:
    kind: PolicyKind
    width: Optional[int] = None

    def __post_init__(self):
        if (self.kind is PolicyKind.HOMOGENEOUS) != (self.width is not None):
            raise ValueError("Only homogeneous policies carry an adder width")

    @property
    def label(self) -> str:
        if self.kind is PolicyKind.HOMOGENEOUS:
            return f"homog:{self.width}"
        return self.kind.value


@dataclass(frozen=True)
class SystemConfig:
    """A core: architecture width, installed adders and operating point."""
    arch_max_bits: int
    installed: FrozenSet[int]
    calibration: CalibrationTable
    clock: ClockConfig = field(default_factory=ClockConfig)
    power_level: int = 100
    tier_caps: Mapping[int, Optional[int]] = field(default_factory=lambda: dict(DEFAULT_TIER_CAPS))
    power_gate_idle: bool = False

    def __post_init__(self):
        object.__setattr__(self, "installed", frozenset(self.installed))
        if self.arch_max_bits not in ARCH_WIDTHS:
            raise ValueError(f"Architecture width must be one of {ARCH_WIDTHS}")
        if self.power_level not in POWER_LEVELS:
            raise ValueError(f"Power level must be one of {POWER_LEVELS}")
        if self.power_level not in self.tier_caps:
            raise ValueError(f"No tier cap configured for power level {self.power_level}%")
        unknown = self.installed - set(self.calibration.widths)
        if unknown:
            raise ValueError(f"Installed widths {sorted(unknown)} are not calibrated")


@dataclass(frozen=True)
class RouteDecision:
    """Adder chosen for one bucket and the per-op cost of running it there."""
    op_class: OpClass
    adder_width: int
    chunks: int
    cycles: int
    energy: EnergyBreakdown


@dataclass(frozen=True)
class Assignment:
    policy_label: str
    power_level: int
    enabled: FrozenSet[int]
    powered: FrozenSet[int]
    decisions: Dict[OpClass, RouteDecision]

    def adder_for(self, op_class: OpClass) -> int:
        return self.decisions[op_class].adder_width
