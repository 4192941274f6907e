"""Runtime state versioning and drift determination.

The agent's operational state (tool catalog, memory export, policy binding)
is snapshotted as content digests plus behavioral metrics computed from the
oversight ledger, never from agent self-reports. Comparison against the
conformity baseline is pure arithmetic over tolerance bands, so identical
event logs always produce byte-identical reports; reproducibility of the
comparison itself is what keeps drift distinguishable from run-to-run
variance. A detected change becomes a substantial-modification candidate
exactly when it is (i) outside the declared foreseen-changes registry and
(ii) relevant to compliance-mapped metrics or structural bindings.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from .canonical import canonical_bytes, digest, sha256_hex
from .ledger import LedgerEntry, PayloadKind


class StructuralChange(enum.Enum):
    TOOL_CATALOG_CHANGED = "tool_catalog_changed"
    MEMORY_ENVELOPE_EXCEEDED = "memory_envelope_exceeded"
    POLICY_CHANGED = "policy_changed"


class ForeseenKind(enum.Enum):
    METRIC = "metric"
    STRUCTURAL = "structural"


class Verdict(enum.Enum):
    WITHIN_ENVELOPE = "within_envelope"
    SUBSTANTIAL_MODIFICATION_CANDIDATE = "substantial_modification_candidate"


class DriftError(Exception):
    pass


class MissingMetric(DriftError):
    pass


class BaselineMismatch(DriftError):
    pass


class SerializationFailure(DriftError):
    pass


@dataclass(frozen=True)
class MetricBand:
    reference: float
    band: float

    def __post_init__(self) -> None:
        if self.band <= 0:
            raise ValueError("tolerance band must be positive")


@dataclass(frozen=True)
class ForeseenChange:
    """A change declared and risk-assessed before deployment."""

    kind: ForeseenKind
    target: str  # metric name, or StructuralChange value
    description: str = ""

    def covers_metric(self, metric: str) -> bool:
        return self.kind is ForeseenKind.METRIC and self.target == metric

    def covers_structural(self, change: StructuralChange) -> bool:
        return self.kind is ForeseenKind.STRUCTURAL and self.target == change.value


@dataclass(frozen=True)
class BehavioralBaseline:
    metrics: Mapping[str, MetricBand]
    foreseen_changes: tuple[ForeseenChange, ...] = ()
    compliance_metrics: frozenset[str] = frozenset()
    tool_catalog_digest: str = ""
    policy_binding_version: str = ""
    memory_envelope_bytes: int | None = None

    def baseline_id(self) -> str:
        return digest(
            {
                "metrics": {
                    k: [v.reference, v.band] for k, v in sorted(self.metrics.items())
                },
                "foreseen": [
                    [c.kind.value, c.target] for c in self.foreseen_changes
                ],
                "compliance_metrics": sorted(self.compliance_metrics),
                "tool_catalog_digest": self.tool_catalog_digest,
                "policy_binding_version": self.policy_binding_version,
                "memory_envelope_bytes": self.memory_envelope_bytes,
            }
        )


@dataclass(frozen=True)
class RuntimeStateSnapshot:
    snapshot_id: int
    taken_at: float
    tool_catalog_digest: str
    memory_digest: str
    memory_size_bytes: int
    policy_binding_version: str
    behavioral_metrics: Mapping[str, float]


@dataclass(frozen=True)
class DriftReport:
    snapshot_id: int
    baseline_id: str
    deltas: Mapping[str, float]  # signed deviation in tolerance-band units
    breaches: frozenset[str]
    structural_changes: frozenset[StructuralChange]
    drift_score: float


@dataclass(frozen=True)
class ModificationDetermination:
    verdict: Verdict
    unforeseen_change: bool  # (i) change outside the foreseen registry
    compliance_relevant: bool  # (ii) touches compliance metrics or bindings
    made_available_again: bool  # framing flag only; recorded, not required
    unforeseen_items: tuple[str, ...] = ()


class DriftMonitor:
    """Produces monotone-id snapshots and pure comparisons against a baseline."""

    def __init__(self) -> None:
        self._next_id = 0

    def take_snapshot(
        self,
        *,
        tool_catalog: Any,
        memory_export: Any,
        policy_binding_version: str,
        behavioral_metrics: Mapping[str, float],
        taken_at: float,
    ) -> RuntimeStateSnapshot:
        try:
            catalog_digest = digest(tool_catalog)
            memory_bytes = canonical_bytes(memory_export)
        except (TypeError, ValueError) as exc:
            raise SerializationFailure(str(exc)) from exc
        snapshot = RuntimeStateSnapshot(
            snapshot_id=self._next_id,
            taken_at=taken_at,
            tool_catalog_digest=catalog_digest,
            memory_digest=sha256_hex(memory_bytes),
            memory_size_bytes=len(memory_bytes),
            policy_binding_version=policy_binding_version,
            behavioral_metrics=dict(sorted(behavioral_metrics.items())),
        )
        self._next_id += 1
        return snapshot


# Digest of the canonical empty memory export ({}): the documented fixed
# point for agents that have accumulated no state.
EMPTY_MEMORY_DIGEST = sha256_hex(canonical_bytes({}))


def compare(snapshot: RuntimeStateSnapshot, baseline: BehavioralBaseline) -> DriftReport:
    deltas: dict[str, float] = {}
    breaches: set[str] = set()
    for name, band in sorted(baseline.metrics.items()):
        if name not in snapshot.behavioral_metrics:
            raise MissingMetric(name)
        delta = (snapshot.behavioral_metrics[name] - band.reference) / band.band
        deltas[name] = delta
        if abs(delta) > 1.0:
            breaches.add(name)

    structural: set[StructuralChange] = set()
    if (
        baseline.tool_catalog_digest
        and snapshot.tool_catalog_digest != baseline.tool_catalog_digest
    ):
        structural.add(StructuralChange.TOOL_CATALOG_CHANGED)
    if (
        baseline.policy_binding_version
        and snapshot.policy_binding_version != baseline.policy_binding_version
    ):
        structural.add(StructuralChange.POLICY_CHANGED)
    if (
        baseline.memory_envelope_bytes is not None
        and snapshot.memory_size_bytes > baseline.memory_envelope_bytes
    ):
        structural.add(StructuralChange.MEMORY_ENVELOPE_EXCEEDED)

    drift_score = max((abs(d) for d in deltas.values()), default=0.0)
    return DriftReport(
        snapshot_id=snapshot.snapshot_id,
        baseline_id=baseline.baseline_id(),
        deltas=deltas,
        breaches=frozenset(breaches),
        structural_changes=frozenset(structural),
        drift_score=drift_score,
    )


def determine(
    report: DriftReport,
    baseline: BehavioralBaseline,
    deployment_event: bool = False,
) -> ModificationDetermination:
    if report.baseline_id != baseline.baseline_id():
        raise BaselineMismatch(
            f"report built against {report.baseline_id[:12]}, "
            f"baseline is {baseline.baseline_id()[:12]}"
        )

    unforeseen: list[str] = []
    for metric in sorted(report.breaches):
        if not any(c.covers_metric(metric) for c in baseline.foreseen_changes):
            unforeseen.append(f"metric:{metric}")
    for change in sorted(report.structural_changes, key=lambda c: c.value):
        if not any(c.covers_structural(change) for c in baseline.foreseen_changes):
            unforeseen.append(f"structural:{change.value}")

    compliance_relevant = bool(
        (report.breaches & baseline.compliance_metrics)
        or (
            report.structural_changes
            & {StructuralChange.POLICY_CHANGED, StructuralChange.TOOL_CATALOG_CHANGED}
        )
    )

    condition_i = bool(unforeseen)
    verdict = (
        Verdict.SUBSTANTIAL_MODIFICATION_CANDIDATE
        if condition_i and compliance_relevant
        else Verdict.WITHIN_ENVELOPE
    )
    return ModificationDetermination(
        verdict=verdict,
        unforeseen_change=condition_i,
        compliance_relevant=compliance_relevant,
        made_available_again=deployment_event,
        unforeseen_items=tuple(unforeseen),
    )


# --- Behavioral metrics from the ledger -------------------------------------

def behavioral_metrics_from_ledger(entries: Iterable[LedgerEntry]) -> dict[str, float]:
    """Deterministic metrics over the governance event stream.

    The ledger is the single source of truth here: nothing is taken from the
    agent's own account of what it did.
    """
    proposals = 0
    action_mix: dict[str, int] = {}
    decisions = 0
    approvals = 0
    confidences: list[float] = []
    anomalies = 0

    for entry in entries:
        if entry.payload_kind is PayloadKind.PROPOSAL:
            proposals += 1
            decision_type = str(entry.payload.get("decision_type_id", "unknown"))
            action_mix[decision_type] = action_mix.get(decision_type, 0) + 1
        elif entry.payload_kind is PayloadKind.ASSESSMENT:
            telemetry = entry.payload.get("telemetry", {})
            confidences.append(float(telemetry.get("model_confidence", 1.0)))
            if entry.payload.get("rule_of_two_violation") or entry.payload.get(
                "level"
            ) == "blocked":
                anomalies += 1
        elif entry.payload_kind is PayloadKind.HUMAN_DECISION:
            decisions += 1
            if entry.payload.get("decision") == "approve":
                approvals += 1

    metrics: dict[str, float] = {
        "approval_rate": (approvals / decisions) if decisions else 1.0,
        "mean_confidence": (sum(confidences) / len(confidences)) if confidences else 1.0,
        "anomaly_rate_per_1000": (1000.0 * anomalies / proposals) if proposals else 0.0,
    }
    for decision_type, count in sorted(action_mix.items()):
        metrics[f"action_mix:{decision_type}"] = count / proposals
    return metrics


# --- Serialization -----------------------------------------------------------

def snapshot_payload(s: RuntimeStateSnapshot) -> dict:
    return {
        "snapshot_id": s.snapshot_id,
        "taken_at": s.taken_at,
        "tool_catalog_digest": s.tool_catalog_digest,
        "memory_digest": s.memory_digest,
        "memory_size_bytes": s.memory_size_bytes,
        "policy_binding_version": s.policy_binding_version,
        "behavioral_metrics": dict(s.behavioral_metrics),
    }


def report_payload(r: DriftReport) -> dict:
    return {
        "snapshot_id": r.snapshot_id,
        "baseline_id": r.baseline_id,
        "deltas": dict(r.deltas),
        "breaches": sorted(r.breaches),
        "structural_changes": sorted(c.value for c in r.structural_changes),
        "drift_score": r.drift_score,
    }


def determination_payload(d: ModificationDetermination) -> dict:
    return {
        "verdict": d.verdict.value,
        "unforeseen_change": d.unforeseen_change,
        "compliance_relevant": d.compliance_relevant,
        "made_available_again": d.made_available_again,
        "unforeseen_items": list(d.unforeseen_items),
    }
