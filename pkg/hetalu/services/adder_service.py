import logging
import math
from typing import Iterable

from hetalu.models.adder import ADDER_WIDTHS, AdderSpec, ClockConfig, EnergyBreakdown

logger = logging.getLogger(__name__)

OP_WIDTHS = (4, 8, 12, 16, 32, 64)

# Relative slack for float noise on a latency that lands exactly on a clock edge.
EDGE_TOLERANCE = 1e-12


class AdderModelError(Exception):
    """Adder model errors."""
    pass


def chunks(adder_width: int, op_width: int) -> int:
    """Number of sequential passes an adder makes over an operand."""
    if adder_width not in ADDER_WIDTHS:
        raise AdderModelError(f"Unsupported adder width {adder_width}")
    if op_width < 1 or op_width > 64:
        raise AdderModelError(f"Operand width must be 1-64 bits, got {op_width}")
    return -(-op_width // adder_width)


def cycles_per_chunk(adder: AdderSpec, clock: ClockConfig) -> int:
    """Whole clock cycles one pass takes; each pass waits for the next rising edge."""
    ratio = adder.latency_ns / clock.period_ns
    return max(1, math.ceil(ratio * (1.0 - EDGE_TOLERANCE)))


def op_cycles(adder: AdderSpec, op_width: int, clock: ClockConfig) -> int:
    return chunks(adder.width_bits, op_width) * cycles_per_chunk(adder, clock)


def op_energy(adder: AdderSpec, op_width: int, clock: ClockConfig,
              powered: Iterable[AdderSpec]) -> EnergyBreakdown:
    """Energy of one ADD on adder while every adder in powered leaks."""
    powered = tuple(powered)
    if adder not in powered:
        raise AdderModelError(
            f"{adder.width_bits}-bit adder executes an op but is not in the powered set "
            f"{sorted(a.width_bits for a in powered)}"
        )
    n_chunks = chunks(adder.width_bits, op_width)
    cycles = n_chunks * cycles_per_chunk(adder, clock)
    dynamic_time_ns = adder.latency_ns * n_chunks
    total_time_ns = cycles * clock.period_ns
    static_mw = sum(a.static_power_mw for a in powered)
    return EnergyBreakdown(
        dynamic_pj=adder.dynamic_power_mw * dynamic_time_ns,
        static_pj=static_mw * total_time_ns,
        cycles=cycles,
        dynamic_time_ns=dynamic_time_ns,
        total_time_ns=total_time_ns,
    )


def config_area(powered: Iterable[AdderSpec]) -> float:
    adders = tuple(powered)
    if not adders:
        raise AdderModelError("Cannot compute the area of an empty adder set")
    return sum(a.area_units for a in adders)
