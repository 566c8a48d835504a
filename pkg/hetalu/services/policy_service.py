import logging
from typing import Dict, FrozenSet, Mapping, Optional, Tuple

from hetalu.models.adder import ADDER_WIDTHS, AdderSpec, CalibrationTable, ClockConfig, EnergyBreakdown
from hetalu.models.system import (
    DEFAULT_TIER_CAPS, Assignment, PolicyKind, RouteDecision, RoutingPolicy, SystemConfig,
)
from hetalu.models.workload import OpClass, WorkloadProfile
from hetalu.services.adder_service import chunks, op_energy

logger = logging.getLogger(__name__)


class PolicyError(Exception):
    """Routing policy and configuration errors."""
    pass


def parse_policy(text: str) -> RoutingPolicy:
    """Parse a CLI policy name: hetero-perf, hetero-energy, homog:<width>, governor."""
    name = text.strip().lower()
    if name.startswith("homog:"):
        raw = name.split(":", 1)[1]
        if not raw.isdigit() or int(raw) not in ADDER_WIDTHS:
            raise PolicyError(f"Homogeneous width in {text!r} must be one of {ADDER_WIDTHS}")
        return RoutingPolicy(PolicyKind.HOMOGENEOUS, int(raw))
    for kind in (PolicyKind.HETERO_PERF, PolicyKind.HETERO_ENERGY, PolicyKind.GOVERNOR):
        if name == kind.value:
            return RoutingPolicy(kind)
    raise PolicyError(f"Unknown policy {text!r}; expected hetero-perf, hetero-energy, homog:<width> or governor")


def build_config(policy: RoutingPolicy, arch_bits: int, calibration: CalibrationTable,
                 clock: Optional[ClockConfig] = None, power_level: int = 100,
                 power_gate_idle: bool = False,
                 tier_caps: Optional[Mapping[int, Optional[int]]] = None) -> SystemConfig:
    """Core for a policy: homog:<w> installs only w, the others every width up to arch."""
    if policy.kind is PolicyKind.HOMOGENEOUS:
        if policy.width > arch_bits:
            raise PolicyError(f"{policy.label} does not fit a {arch_bits}-bit architecture")
        installed = {policy.width}
    else:
        installed = {w for w in calibration.widths if w <= arch_bits}
    missing = installed - set(calibration.widths)
    if missing or not installed:
        raise PolicyError(f"Calibration has no adder of width {sorted(missing) or 'up to ' + str(arch_bits)}")
    try:
        return SystemConfig(
            arch_max_bits=arch_bits,
            installed=frozenset(installed),
            calibration=calibration,
            clock=clock or ClockConfig(calibration.frequency_ghz),
            power_level=power_level,
            tier_caps=dict(tier_caps or DEFAULT_TIER_CAPS),
            power_gate_idle=power_gate_idle,
        )
    except ValueError as e:
        raise PolicyError(str(e))


def enabled_adders(config: SystemConfig) -> FrozenSet[int]:
    """Installed adders the power tier leaves switched on."""
    if not config.installed:
        raise PolicyError("No adders installed")
    cap = config.tier_caps[config.power_level]
    enabled = frozenset(w for w in config.installed if cap is None or w <= cap)
    if not enabled:
        raise PolicyError(
            f"Configuration error: power level {config.power_level}% allows adders up to "
            f"{cap} bits but only {sorted(config.installed)} are installed"
        )
    return enabled


def _powered(config: SystemConfig, enabled: FrozenSet[int], width: int) -> Tuple[AdderSpec, ...]:
    if config.power_gate_idle:
        return (config.calibration.adder(width),)
    return config.calibration.select(enabled)


def candidate_cost(width: int, op_width: int, config: SystemConfig,
                   enabled: FrozenSet[int]) -> Tuple[int, int, EnergyBreakdown]:
    """Cycles, chunks and energy of one op_width ADD on the width-bit adder."""
    adder = config.calibration.adder(width)
    energy = op_energy(adder, op_width, config.clock, _powered(config, enabled, width))
    return energy.cycles, chunks(width, op_width), energy


def _perf_key(width, op_width, config, enabled):
    cycles, n_chunks, energy = candidate_cost(width, op_width, config, enabled)
    return cycles, n_chunks, energy.total_pj, width


def _energy_key(width, op_width, config, enabled):
    cycles, _, energy = candidate_cost(width, op_width, config, enabled)
    return energy.total_pj, cycles, width


def _governor_key(width, config, enabled):
    cycles, _, energy = candidate_cost(width, config.arch_max_bits, config, enabled)
    return cycles, energy.total_pj, width


def governor_adder(config: SystemConfig, enabled: FrozenSet[int]) -> int:
    """Adder a reduced tier consolidates onto: fastest on an architecture-width op."""
    return min(enabled, key=lambda w: _governor_key(w, config, enabled))


def route(op_class: OpClass, policy: RoutingPolicy, config: SystemConfig) -> int:
    """Width of the adder that executes ops of this class."""
    enabled = enabled_adders(config)
    op_width = op_class.bucket_bits
    if policy.kind is PolicyKind.HOMOGENEOUS:
        if policy.width not in enabled:
            raise PolicyError(f"{policy.label} needs the {policy.width}-bit adder, enabled: {sorted(enabled)}")
        return policy.width
    if policy.kind is PolicyKind.HETERO_PERF:
        return min(enabled, key=lambda w: _perf_key(w, op_width, config, enabled))
    if policy.kind is PolicyKind.GOVERNOR and config.tier_caps[config.power_level] is not None:
        return governor_adder(config, enabled)
    return min(enabled, key=lambda w: _energy_key(w, op_width, config, enabled))


def build_assignment(profile: WorkloadProfile, policy: RoutingPolicy, config: SystemConfig) -> Assignment:
    if not profile.total:
        raise PolicyError("Cannot assign adders for an empty profile")
    enabled = enabled_adders(config)
    decisions: Dict[OpClass, RouteDecision] = {}
    for op_class in profile.counts:
        width = route(op_class, policy, config)
        cycles, n_chunks, energy = candidate_cost(width, op_class.bucket_bits, config, enabled)
        decisions[op_class] = RouteDecision(op_class, width, n_chunks, cycles, energy)
        logger.debug(f"{policy.label}@{config.power_level}%: {op_class} ops -> {width}-bit adder ({cycles} cycles)")
    powered = frozenset(d.adder_width for d in decisions.values()) if config.power_gate_idle else enabled
    return Assignment(policy.label, config.power_level, enabled, powered, decisions)
