"""Per-instance oversight computation.

The oversight level for a proposed action combines the ontology-resolved
profile of its decision type with live telemetry. The base level follows the
inherent risk tier; an ordered table of escalation rules then only ever
raises it, which makes the computation monotone by construction: degrading
any telemetry signal can never reduce the required oversight. The
untrusted-input + sensitive-data + state-changing trifecta always lands at
pre-execution approval or above, regardless of tier.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .ledger import AffectedParty, party_payload
from .ontology import ResolvedProfile, Reversibility, RiskTier
from .privilege import CapabilityScope, TrustLevel, scope_payload


class Initiator(enum.Enum):
    USER_INITIATED = "user_initiated"
    AGENT_INITIATED = "agent_initiated"


class Vulnerability(enum.Enum):
    STANDARD = "standard"
    VULNERABLE = "vulnerable"


class OversightLevel(enum.IntEnum):
    AUTONOMOUS = 0
    POST_HOC_AUDIT = 1
    SUPERVISORY = 2
    PRE_EXECUTION_APPROVAL = 3
    BLOCKED = 4

    @property
    def wire(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class ActionProposal:
    id: str
    chain_id: str
    decision_type_id: str
    initiator: Initiator
    input_trust: TrustLevel
    targets: frozenset[str]
    requested_scopes: frozenset[CapabilityScope]
    parameters_digest: str = ""
    affected_parties: tuple[AffectedParty, ...] = ()

    def __post_init__(self) -> None:
        if not self.targets:
            raise ValueError(f"action {self.id!r} targets no tools")


@dataclass(frozen=True)
class Telemetry:
    model_confidence: float = 1.0
    drift_score: float = 0.0
    distance_to_decision_threshold: float | None = None
    affected_entity_vulnerability: Vulnerability = Vulnerability.STANDARD
    cumulative_anomaly_count: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.model_confidence <= 1.0:
            raise ValueError("model_confidence must lie in [0, 1]")
        if self.drift_score < 0:
            raise ValueError("drift_score must be >= 0")
        if (
            self.distance_to_decision_threshold is not None
            and self.distance_to_decision_threshold < 0
        ):
            raise ValueError("distance_to_decision_threshold must be >= 0")
        if self.cumulative_anomaly_count < 0:
            raise ValueError("cumulative_anomaly_count must be >= 0")


@dataclass(frozen=True)
class EscalationPolicy:
    """Escalation thresholds. The defaults are configuration starting points
    calibrated per deployment, not normative values."""

    confidence_floor: float = 0.7
    threshold_band: float = 0.1
    drift_ceiling: float = 3.0

    def validate(self) -> None:
        if not 0.0 <= self.confidence_floor <= 1.0:
            raise MalformedPolicy("confidence_floor must lie in [0, 1]")
        if self.threshold_band < 0:
            raise MalformedPolicy("threshold_band must be >= 0")
        if self.drift_ceiling < 0:
            raise MalformedPolicy("drift_ceiling must be >= 0")


class MalformedPolicy(Exception):
    pass


@dataclass(frozen=True)
class RiskAssessment:
    action_id: str
    level: OversightLevel
    stakeholder: str | None
    reasons: tuple[str, ...]
    rule_of_two_violation: bool
    consequences_of_inaction: str
    telemetry: Telemetry


BASE_LEVEL: dict[RiskTier, OversightLevel] = {
    RiskTier.MINIMAL: OversightLevel.AUTONOMOUS,
    RiskTier.ELEVATED: OversightLevel.POST_HOC_AUDIT,
    RiskTier.HIGH: OversightLevel.SUPERVISORY,
    RiskTier.UNACCEPTABLE: OversightLevel.BLOCKED,
}

# Single-step escalations cap here: Blocked is reserved for the unacceptable
# tier and explicit policy bans, never reached by accumulation.
_STEP_CAP = OversightLevel.PRE_EXECUTION_APPROVAL


def rule_of_two(action: ActionProposal, profile: ResolvedProfile) -> bool:
    """Untrusted input + sensitive data + autonomous state change must not
    combine without a human in the loop."""
    return (
        action.input_trust is TrustLevel.UNTRUSTED
        and profile.sensitive_data
        and profile.state_changing
    )


def assess(
    action: ActionProposal,
    profile: ResolvedProfile,
    telemetry: Telemetry,
    policy: EscalationPolicy,
) -> RiskAssessment:
    policy.validate()

    level = BASE_LEVEL[profile.risk_tier]
    reasons: list[str] = [f"base.risk_tier.{profile.risk_tier.name.lower()}"]

    def raise_to(target: OversightLevel, rule: str) -> None:
        nonlocal level
        if level is OversightLevel.BLOCKED:
            return
        reasons.append(rule)
        if target > level:
            level = target

    def step_up(rule: str) -> None:
        nonlocal level
        if level is OversightLevel.BLOCKED:
            return
        reasons.append(rule)
        if level < _STEP_CAP:
            level = OversightLevel(level + 1)

    two = rule_of_two(action, profile)
    if two:
        raise_to(OversightLevel.PRE_EXECUTION_APPROVAL, "escalate.rule_of_two")
    if (
        profile.reversibility is Reversibility.IRREVERSIBLE
        and not profile.residual_risk_acceptable_without_approval
    ):
        raise_to(OversightLevel.PRE_EXECUTION_APPROVAL, "escalate.irreversible")
    if telemetry.model_confidence < policy.confidence_floor:
        step_up("escalate.low_confidence")
    if (
        telemetry.distance_to_decision_threshold is not None
        and telemetry.distance_to_decision_threshold < policy.threshold_band
    ):
        step_up("escalate.decision_threshold_proximity")
    if telemetry.drift_score > policy.drift_ceiling:
        raise_to(OversightLevel.SUPERVISORY, "escalate.drift")
    if telemetry.affected_entity_vulnerability is Vulnerability.VULNERABLE:
        step_up("escalate.vulnerable_party")

    return RiskAssessment(
        action_id=action.id,
        level=level,
        stakeholder=None if level is OversightLevel.AUTONOMOUS else profile.stakeholder,
        reasons=tuple(reasons),
        rule_of_two_violation=two,
        consequences_of_inaction=profile.consequences_of_inaction,
        telemetry=telemetry,
    )


# --- Serialization ----------------------------------------------------------

def telemetry_payload(t: Telemetry) -> dict:
    return {
        "model_confidence": t.model_confidence,
        "drift_score": t.drift_score,
        "distance_to_decision_threshold": t.distance_to_decision_threshold,
        "affected_entity_vulnerability": t.affected_entity_vulnerability.value,
        "cumulative_anomaly_count": t.cumulative_anomaly_count,
    }


def telemetry_from_payload(data: dict | None) -> Telemetry:
    data = data or {}
    return Telemetry(
        model_confidence=float(data.get("model_confidence", 1.0)),
        drift_score=float(data.get("drift_score", 0.0)),
        distance_to_decision_threshold=(
            None
            if data.get("distance_to_decision_threshold") is None
            else float(data["distance_to_decision_threshold"])
        ),
        affected_entity_vulnerability=Vulnerability(
            data.get("affected_entity_vulnerability", "standard")
        ),
        cumulative_anomaly_count=int(data.get("cumulative_anomaly_count", 0)),
    )


def proposal_payload(action: ActionProposal, producers: list[str] | None = None) -> dict:
    return {
        "action_id": action.id,
        "chain_id": action.chain_id,
        "decision_type_id": action.decision_type_id,
        "initiator": action.initiator.value,
        "input_trust": action.input_trust.value,
        "targets": sorted(action.targets),
        "requested_scopes": scope_payload(action.requested_scopes),
        "parameters_digest": action.parameters_digest,
        "affected_parties": [party_payload(p) for p in action.affected_parties],
        "producers": sorted(producers or []),
    }


def assessment_payload(a: RiskAssessment) -> dict:
    return {
        "action_id": a.action_id,
        "level": a.level.wire,
        "stakeholder": a.stakeholder,
        "reasons": list(a.reasons),
        "rule_of_two_violation": a.rule_of_two_violation,
        "consequences_of_inaction": a.consequences_of_inaction,
        "telemetry": telemetry_payload(a.telemetry),
    }
