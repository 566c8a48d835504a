import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence

import pandas as pd

from hetalu.models.report import BucketResult, EvaluationReport
from hetalu.models.system import RouteDecision, RoutingPolicy, SystemConfig
from hetalu.models.workload import OpClass, TraceRecord, WorkloadProfile
from hetalu.services.adder_service import config_area
from hetalu.services.policy_service import build_assignment, candidate_cost, enabled_adders, route
from hetalu.services.workload_service import classify

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["label", "policy", "power_level", "avg_cpi", "normalized_cpi",
                  "total_energy_pj", "normalized_energy", "area_units"]
DETAIL_COLUMNS = ["label", "bucket_bits", "count", "adder_width", "cycles", "energy_pj"]


class EvaluationError(Exception):
    """Evaluation and comparison errors."""
    pass


@dataclass(frozen=True)
class RunSpec:
    """One row of a comparison: a labelled (policy, config) pair."""
    label: str
    policy: RoutingPolicy
    config: SystemConfig


def default_label(policy: RoutingPolicy, config: SystemConfig) -> str:
    if config.power_level == 100:
        return policy.label
    return f"{policy.label}@{config.power_level}"


def _report(label: str, policy: RoutingPolicy, config: SystemConfig, per_bucket: Dict[OpClass, BucketResult],
            total_energy_pj: float) -> EvaluationReport:
    total_ops = sum(b.count for b in per_bucket.values())
    report = EvaluationReport(
        label=label,
        policy=policy.label,
        power_level=config.power_level,
        arch_bits=config.arch_max_bits,
        per_bucket=dict(sorted(per_bucket.items())),
        total_ops=total_ops,
        total_cycles=sum(b.count * b.cycles for b in per_bucket.values()),
        total_energy_pj=total_energy_pj,
        area_units=config_area(config.calibration.select(config.installed)),
        profile_key=tuple(sorted((oc.bucket_bits, b.count) for oc, b in per_bucket.items())),
    )
    logger.info(f"Evaluated {label}: {total_ops} ops, avg CPI {report.avg_cpi:.4f}, "
                f"{report.total_energy_pj:.6g} pJ")
    return report


def evaluate(profile: WorkloadProfile, policy: RoutingPolicy, config: SystemConfig,
             label: Optional[str] = None) -> EvaluationReport:
    """Workload totals: count-weighted per-op cycles and energies."""
    if not profile.total:
        raise EvaluationError("Cannot evaluate an empty profile")
    assignment = build_assignment(profile, policy, config)
    per_bucket = {}
    energy = Fraction(0)
    for op_class, count in profile.counts.items():
        decision = assignment.decisions[op_class]
        per_bucket[op_class] = BucketResult(op_class, count, decision.adder_width, decision.cycles,
                                            decision.energy.total_pj)
        energy += Fraction(decision.energy.total_pj) * count
    return _report(label or default_label(policy, config), policy, config, per_bucket, float(energy))


def evaluate_trace(records: Iterable[TraceRecord], policy: RoutingPolicy, config: SystemConfig,
                   label: Optional[str] = None) -> EvaluationReport:
    """Per-record summation, independent of the profile path."""
    enabled = enabled_adders(config)
    decisions: Dict[OpClass, RouteDecision] = {}
    counts = Counter()
    energies: List[float] = []
    for record in records:
        op_class = classify(record)
        if op_class is None:
            continue
        decision = decisions.get(op_class)
        if decision is None:
            width = route(op_class, policy, config)
            cycles, n_chunks, energy = candidate_cost(width, op_class.bucket_bits, config, enabled)
            decision = decisions[op_class] = RouteDecision(op_class, width, n_chunks, cycles, energy)
        counts[op_class] += 1
        energies.append(decision.energy.total_pj)
    if not counts:
        raise EvaluationError("Trace holds no ADD operations to evaluate")
    per_bucket = {
        oc: BucketResult(oc, counts[oc], d.adder_width, d.cycles, d.energy.total_pj)
        for oc, d in decisions.items()
    }
    # fsum rounds the exact sum once, matching the rational sum of the profile path.
    return _report(label or default_label(policy, config), policy, config, per_bucket, math.fsum(energies))


def normalize(report: EvaluationReport, baseline: EvaluationReport) -> EvaluationReport:
    if report.profile_key != baseline.profile_key:
        raise EvaluationError(f"{report.label} and baseline {baseline.label} were evaluated on different profiles")
    if baseline.total_energy_pj <= 0:
        raise EvaluationError(f"Baseline {baseline.label} has zero energy")
    return report.with_normalization(
        baseline.label,
        report.avg_cpi / baseline.avg_cpi,
        report.total_energy_pj / baseline.total_energy_pj,
    )


def compare_reports(profile: WorkloadProfile, runs: Sequence[RunSpec], baseline: str) -> List[EvaluationReport]:
    labels = [run.label for run in runs]
    duplicates = [label for label, n in Counter(labels).items() if n > 1]
    if duplicates:
        raise EvaluationError(f"Duplicate config labels: {duplicates}")
    if baseline not in labels:
        raise EvaluationError(f"Unknown baseline {baseline!r}; configs are {labels}")
    reports = [evaluate(profile, run.policy, run.config, label=run.label) for run in runs]
    reference = reports[labels.index(baseline)]
    return [normalize(report, reference) for report in reports]


def report_frame(reports: Sequence[EvaluationReport]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "label": r.label,
                "policy": r.policy,
                "power_level": r.power_level,
                "avg_cpi": r.avg_cpi,
                "normalized_cpi": r.normalized_cpi,
                "total_energy_pj": r.total_energy_pj,
                "normalized_energy": r.normalized_energy,
                "area_units": r.area_units,
            }
            for r in reports
        ],
        columns=REPORT_COLUMNS,
    )


def detail_frame(reports: Sequence[EvaluationReport]) -> pd.DataFrame:
    rows = defaultdict(list)
    for r in reports:
        for op_class, bucket in r.per_bucket.items():
            rows["label"].append(r.label)
            rows["bucket_bits"].append(op_class.bucket_bits)
            rows["count"].append(bucket.count)
            rows["adder_width"].append(bucket.adder_width)
            rows["cycles"].append(bucket.cycles)
            rows["energy_pj"].append(bucket.energy_pj)
    return pd.DataFrame(rows, columns=DETAIL_COLUMNS)


def compare_matrix(profile: WorkloadProfile, runs: Sequence[RunSpec], baseline: str) -> pd.DataFrame:
    """One row per run, in input order, normalized against the named baseline."""
    return report_frame(compare_reports(profile, runs, baseline))
