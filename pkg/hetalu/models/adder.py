from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Tuple

ADDER_WIDTHS = (4, 8, 16, 32, 64)


@dataclass(frozen=True)
class ClockConfig:
    """Core clock operating point."""
    frequency_ghz: float = 1.0

    def __post_init__(self):
        if not self.frequency_ghz > 0:
            raise ValueError("frequency_ghz must be positive")

    @property
    def period_ns(self) -> float:
        return 1.0 / self.frequency_ghz


@dataclass(frozen=True)
class AdderSpec:
    """Physical model of one N-bit ripple-carry adder."""
    width_bits: int
    latency_ns: float
    dynamic_power_mw: float
    static_power_mw: float
    area_units: float

    def __post_init__(self):
        if self.width_bits not in ADDER_WIDTHS:
            raise ValueError(f"Adder width must be one of {ADDER_WIDTHS}, got {self.width_bits}")
        if not self.latency_ns > 0:
            raise ValueError(f"{self.width_bits}-bit adder latency must be positive")
        if self.dynamic_power_mw < 0 or self.static_power_mw < 0:
            raise ValueError(f"{self.width_bits}-bit adder power must be non-negative")
        if self.area_units <= 0:
            raise ValueError(f"{self.width_bits}-bit adder area must be positive")


@dataclass(frozen=True)
class CalibrationTable:
    """Ordered set of calibrated adders sharing one area unit."""
    adders: Tuple[AdderSpec, ...]
    unit_area: float = 1.0
    frequency_ghz: float = 1.0

    def __post_init__(self):
        widths = [a.width_bits for a in self.adders]
        if not widths:
            raise ValueError("Calibration table has no adders")
        if not self.frequency_ghz > 0:
            raise ValueError("frequency_ghz must be positive")
        if not self.unit_area > 0:
            raise ValueError("unit_area must be positive")
        if widths != sorted(set(widths)):
            raise ValueError("Adder widths must be unique and sorted ascending")
        latencies = [a.latency_ns for a in self.adders]
        if any(b < a for a, b in zip(latencies, latencies[1:])):
            raise ValueError("Adder latency must be non-decreasing in width")
        for adder in self.adders:
            if abs(adder.area_units - adder.width_bits * self.unit_area) > 1e-9 * adder.area_units:
                raise ValueError(f"{adder.width_bits}-bit adder area is not width x unit_area")

    @property
    def widths(self) -> Tuple[int, ...]:
        return tuple(a.width_bits for a in self.adders)

    @property
    def by_width(self) -> Dict[int, AdderSpec]:
        return {a.width_bits: a for a in self.adders}

    def adder(self, width: int) -> AdderSpec:
        try:
            return self.by_width[width]
        except KeyError:
            raise KeyError(f"No {width}-bit adder in calibration") from None

    def select(self, widths: Iterable[int]) -> Tuple[AdderSpec, ...]:
        return tuple(self.adder(w) for w in sorted(set(widths)))

    def scaled(self, factor: float) -> "CalibrationTable":
        """Copy with every dynamic and static power multiplied by factor."""
        if factor <= 0:
            raise ValueError("Scale factor must be positive")
        return replace(self, adders=tuple(
            replace(a, dynamic_power_mw=a.dynamic_power_mw * factor,
                    static_power_mw=a.static_power_mw * factor)
            for a in self.adders
        ))

    def without_static(self) -> "CalibrationTable":
        return replace(self, adders=tuple(replace(a, static_power_mw=0.0) for a in self.adders))


@dataclass(frozen=True)
class EnergyBreakdown:
    """Energy and time of one ADD executed on one adder (mW x ns = pJ)."""
    dynamic_pj: float
    static_pj: float
    cycles: int
    dynamic_time_ns: float
    total_time_ns: float
    total_pj: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total_pj", self.dynamic_pj + self.static_pj)
