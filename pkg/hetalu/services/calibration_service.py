import configparser
import logging
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from hetalu.models.adder import ADDER_WIDTHS, AdderSpec, CalibrationTable, ClockConfig
from hetalu.services.adder_service import AdderModelError, chunks, cycles_per_chunk, op_energy
from hetalu.services.workload_service import DHRYSTONE_COUNTS

logger = logging.getLogger(__name__)

ADDER_KEYS = {"width", "latency_ns", "dynamic_power_mw", "static_power_mw"}
SECTION_KEYS = {"clock": {"frequency_ghz"}, "area": {"unit_area"}}
MODEL_KEYS = {"latency_ns_per_bit", "static_fraction", "unit_area", "frequency_ghz",
              "widths", "anchor_tolerance"}
ANCHOR_KEYS = {"adder_width", "op_width", "energy_pj"}
AGGREGATE_KEYS = {"reference_width", "target_width", "energy_ratio"}


class CalibrationError(Exception):
    """Calibration fitting and file errors."""
    pass


@dataclass(frozen=True)
class EnergyAnchor:
    """Reported energy of one op width executed on one adder width."""
    name: str
    adder_width: int
    op_width: int
    energy_pj: float


@dataclass(frozen=True)
class AggregateAnchor:
    """Workload energy of homogeneous reference_width over homogeneous target_width."""
    reference_width: int
    target_width: int
    energy_ratio: float


@dataclass(frozen=True)
class FitModel:
    latency_ns_per_bit: float = 0.09
    static_fraction: float = 0.01
    unit_area: float = 1.0
    frequency_ghz: float = 1.0
    widths: Tuple[int, ...] = ADDER_WIDTHS
    anchor_tolerance: float = 0.15


PUBLISHED_ANCHORS = (
    EnergyAnchor("add32_on32", 32, 32, 0.218),
    EnergyAnchor("add32_on8", 8, 32, 0.0618),
    EnergyAnchor("add4_on8", 8, 4, 0.0171),
    EnergyAnchor("add4_on4", 4, 4, 0.00773),
)
PUBLISHED_AGGREGATE = AggregateAnchor(reference_width=32, target_width=64, energy_ratio=0.25)


def get_calibration_path() -> Optional[str]:
    """Get calibration override path from environment."""
    return os.getenv("HETALU_CALIBRATION") or None


def _fit_anchored_powers(anchors: Sequence[EnergyAnchor], latency: Mapping[int, float]) -> Dict[int, float]:
    # Relative-error least squares: each anchor row reads P_w * t / E = 1.
    widths = sorted({a.adder_width for a in anchors})
    design = np.zeros((len(anchors), len(widths)))
    for row, anchor in enumerate(anchors):
        dynamic_time = latency[anchor.adder_width] * chunks(anchor.adder_width, anchor.op_width)
        design[row, widths.index(anchor.adder_width)] = dynamic_time / anchor.energy_pj
    solution, *_ = np.linalg.lstsq(design, np.ones(len(anchors)), rcond=None)
    return {w: float(p) for w, p in zip(widths, solution)}


def _loglog(w: int, w1: int, p1: float, w2: int, p2: float) -> float:
    t = (math.log(w) - math.log(w1)) / (math.log(w2) - math.log(w1))
    return math.exp(math.log(p1) + t * (math.log(p2) - math.log(p1)))


def _workload_weight(width: int, latency_ns: float, clock: ClockConfig, static_fraction: float,
                     weights: Mapping[int, int]) -> float:
    """Homogeneous workload energy of the width-bit adder per milliwatt of dynamic power."""
    unit = AdderSpec(width, latency_ns, 1.0, static_fraction, float(width))
    per_chunk = cycles_per_chunk(unit, clock)
    total = 0.0
    for op_width, count in weights.items():
        n = chunks(width, op_width)
        total += count * (latency_ns * n + static_fraction * n * per_chunk * clock.period_ns)
    return total


def _check_model(model: FitModel) -> None:
    unsupported = sorted(set(model.widths) - set(ADDER_WIDTHS))
    if not model.widths or unsupported:
        raise CalibrationError(f"[model] widths must be drawn from {list(ADDER_WIDTHS)}, got {list(model.widths)}")
    for key in ("latency_ns_per_bit", "unit_area", "frequency_ghz", "anchor_tolerance"):
        value = getattr(model, key)
        if not value > 0 or math.isinf(value):
            raise CalibrationError(f"[model] {key} must be a positive finite number, got {value!r}")
    if not 0 <= model.static_fraction < math.inf:
        raise CalibrationError(f"[model] static_fraction must be non-negative, got {model.static_fraction!r}")


def fit_calibration(anchors: Sequence[EnergyAnchor], model: FitModel = FitModel(),
                    aggregate: Optional[AggregateAnchor] = None,
                    weights: Optional[Mapping[int, int]] = None) -> CalibrationTable:
    """Fit a calibration: linear ripple-carry latency, dynamic powers from anchors."""
    if not anchors:
        raise CalibrationError("At least one energy anchor is required")
    _check_model(model)
    try:
        return _fit(anchors, model, aggregate, weights)
    except (ValueError, AdderModelError) as e:
        raise CalibrationError(f"Cannot fit calibration: {e}")


def _fit(anchors: Sequence[EnergyAnchor], model: FitModel, aggregate: Optional[AggregateAnchor],
         weights: Optional[Mapping[int, int]]) -> CalibrationTable:
    widths = tuple(sorted(model.widths))
    for anchor in anchors:
        if anchor.adder_width not in widths:
            raise CalibrationError(f"Anchor {anchor.name} uses uncalibrated width {anchor.adder_width}")
        if not anchor.energy_pj > 0:
            raise CalibrationError(f"Anchor {anchor.name} energy must be positive")
    clock = ClockConfig(model.frequency_ghz)
    latency = {w: model.latency_ns_per_bit * w for w in widths}
    power = _fit_anchored_powers(anchors, latency)
    anchored = sorted(power)

    for w in widths:
        below = [a for a in anchored if a < w]
        above = [a for a in anchored if a > w]
        if w not in power and below and above:
            power[w] = _loglog(w, below[-1], power[below[-1]], above[0], power[above[0]])

    if aggregate is not None:
        if aggregate.reference_width not in power:
            raise CalibrationError(f"Aggregate reference width {aggregate.reference_width} has no fitted power")
        if aggregate.target_width not in widths or not aggregate.energy_ratio > 0:
            raise CalibrationError("Aggregate anchor needs a calibrated target width and a positive ratio")
        weights = weights or DHRYSTONE_COUNTS
        ref, tgt = aggregate.reference_width, aggregate.target_width
        g_ref = _workload_weight(ref, latency[ref], clock, model.static_fraction, weights)
        g_tgt = _workload_weight(tgt, latency[tgt], clock, model.static_fraction, weights)
        power[tgt] = power[ref] * g_ref / (aggregate.energy_ratio * g_tgt)

    for w in widths:
        if w in power:
            continue
        known = sorted(power)
        if len(known) < 2:
            power[w] = power[known[0]]
        elif w > known[-1]:
            power[w] = _loglog(w, known[-2], power[known[-2]], known[-1], power[known[-1]])
        else:
            power[w] = _loglog(w, known[0], power[known[0]], known[1], power[known[1]])

    table = CalibrationTable(
        adders=tuple(
            AdderSpec(
                width_bits=w,
                latency_ns=latency[w],
                dynamic_power_mw=power[w],
                static_power_mw=power[w] * model.static_fraction,
                area_units=w * model.unit_area,
            )
            for w in widths
        ),
        unit_area=model.unit_area,
        frequency_ghz=model.frequency_ghz,
    )

    for anchor in anchors:
        error = anchor_error(table, anchor)
        logger.debug(f"Anchor {anchor.name}: relative error {error:+.3%}")
        if abs(error) > model.anchor_tolerance:
            raise CalibrationError(
                f"Anchor {anchor.name} misses {anchor.energy_pj} pJ by {error:+.1%} "
                f"(tolerance {model.anchor_tolerance:.0%})"
            )
    logger.info(f"Fitted calibration for widths {list(widths)} from {len(anchors)} anchors")
    return table


def anchor_error(table: CalibrationTable, anchor: EnergyAnchor) -> float:
    """Relative error of the fitted per-op total energy, executing adder powered alone."""
    adder = table.adder(anchor.adder_width)
    clock = ClockConfig(table.frequency_ghz)
    energy = op_energy(adder, anchor.op_width, clock, powered=(adder,))
    return energy.total_pj / anchor.energy_pj - 1.0


@lru_cache(maxsize=1)
def fit_default_calibration() -> CalibrationTable:
    return fit_calibration(PUBLISHED_ANCHORS, FitModel(), PUBLISHED_AGGREGATE, DHRYSTONE_COUNTS)


def _read_ini(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as e:
        raise CalibrationError(f"Cannot read {path}: {e.strerror or e}")
    except configparser.Error as e:
        raise CalibrationError(f"Malformed INI file {path}: {e}")
    return parser


def _check_keys(section: str, present, allowed, required=None):
    unknown = set(present) - set(allowed)
    if unknown:
        raise CalibrationError(f"Unknown key(s) {sorted(unknown)} in section [{section}]")
    missing = set(allowed if required is None else required) - set(present)
    if missing:
        raise CalibrationError(f"Missing key(s) {sorted(missing)} in section [{section}]")


def _number(parser, section: str, key: str, kind=float):
    raw = parser.get(section, key)
    try:
        return kind(raw)
    except ValueError:
        raise CalibrationError(f"[{section}] {key} = {raw!r} is not a valid {kind.__name__}")


def load_calibration(path) -> CalibrationTable:
    """Load a calibration INI file, rejecting unknown sections and keys."""
    parser = _read_ini(path)
    adders = []
    frequency_ghz, unit_area = 1.0, 1.0
    for section in parser.sections():
        keys = list(parser[section].keys())
        if section in SECTION_KEYS:
            _check_keys(section, keys, SECTION_KEYS[section])
            if section == "clock":
                frequency_ghz = _number(parser, section, "frequency_ghz")
            else:
                unit_area = _number(parser, section, "unit_area")
        elif section.startswith("adder."):
            _check_keys(section, keys, ADDER_KEYS)
            width = _number(parser, section, "width", int)
            if section != f"adder.{width}":
                raise CalibrationError(f"Section [{section}] declares width {width}")
            adders.append((width, section))
        else:
            raise CalibrationError(f"Unknown section [{section}] in {path}")
    if not adders:
        raise CalibrationError(f"No [adder.<width>] sections in {path}")
    try:
        table = CalibrationTable(
            adders=tuple(
                AdderSpec(
                    width_bits=width,
                    latency_ns=_number(parser, section, "latency_ns"),
                    dynamic_power_mw=_number(parser, section, "dynamic_power_mw"),
                    static_power_mw=_number(parser, section, "static_power_mw"),
                    area_units=width * unit_area,
                )
                for width, section in sorted(adders)
            ),
            unit_area=unit_area,
            frequency_ghz=frequency_ghz,
        )
    except ValueError as e:
        raise CalibrationError(f"Invalid calibration {path}: {e}")
    logger.info(f"Loaded calibration {path} with widths {list(table.widths)}")
    return table


def render_calibration(table: CalibrationTable) -> str:
    lines = [
        "[clock]",
        f"frequency_ghz = {table.frequency_ghz!r}",
        "",
        "[area]",
        f"unit_area = {table.unit_area!r}",
    ]
    for adder in table.adders:
        lines += [
            "",
            f"[adder.{adder.width_bits}]",
            f"width = {adder.width_bits}",
            f"latency_ns = {adder.latency_ns!r}",
            f"dynamic_power_mw = {adder.dynamic_power_mw!r}",
            f"static_power_mw = {adder.static_power_mw!r}",
        ]
    return "\n".join(lines) + "\n"


def load_anchors(path) -> Tuple[Tuple[EnergyAnchor, ...], FitModel, Optional[AggregateAnchor]]:
    parser = _read_ini(path)
    anchors = []
    model = FitModel()
    aggregate = None
    for section in parser.sections():
        keys = list(parser[section].keys())
        if section == "model":
            _check_keys(section, keys, MODEL_KEYS, required=())
            values = {}
            for key in keys:
                if key == "widths":
                    raw = parser.get(section, key)
                    try:
                        values[key] = tuple(sorted(int(tok) for tok in raw.split(",")))
                    except ValueError:
                        raise CalibrationError(f"[model] widths = {raw!r} is not a list of integers")
                else:
                    values[key] = _number(parser, section, key)
            model = FitModel(**values)
        elif section.startswith("anchor."):
            _check_keys(section, keys, ANCHOR_KEYS)
            anchors.append(EnergyAnchor(
                name=section.split(".", 1)[1],
                adder_width=_number(parser, section, "adder_width", int),
                op_width=_number(parser, section, "op_width", int),
                energy_pj=_number(parser, section, "energy_pj"),
            ))
        elif section == "aggregate":
            _check_keys(section, keys, AGGREGATE_KEYS)
            aggregate = AggregateAnchor(
                reference_width=_number(parser, section, "reference_width", int),
                target_width=_number(parser, section, "target_width", int),
                energy_ratio=_number(parser, section, "energy_ratio"),
            )
        else:
            raise CalibrationError(f"Unknown section [{section}] in {path}")
    if not anchors:
        raise CalibrationError(f"No [anchor.<name>] sections in {path}")
    return tuple(anchors), model, aggregate


def resolve_calibration(path: Optional[str] = None) -> CalibrationTable:
    """Explicit path, then $HETALU_CALIBRATION, then the built-in fitted table."""
    path = path or get_calibration_path()
    if path:
        return load_calibration(Path(path))
    return fit_default_calibration()
