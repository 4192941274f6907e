"""Pydantic request/response models for the gateway API."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, field_validator

from ..ledger import AffectedParty, DisclosureKind, PartyRelation
from ..privilege import TrustLevel, scopes_from_payload
from ..risk import ActionProposal, Initiator, Telemetry, telemetry_from_payload


class PartyIn(BaseModel):
    party_ref: str
    relation: Literal[
        "direct_user", "recipient", "audience", "account_holder", "data_subject"
    ]
    disclosure_required: Literal[
        "ai_interaction_notice", "synthetic_content_mark", "none"
    ] = "none"

    def to_domain(self) -> AffectedParty:
        return AffectedParty(
            party_ref=self.party_ref,
            relation=PartyRelation(self.relation),
            disclosure_required=DisclosureKind(self.disclosure_required),
        )


class TelemetryIn(BaseModel):
    model_confidence: float = 1.0
    drift_score: float = 0.0
    distance_to_decision_threshold: float | None = None
    affected_entity_vulnerability: Literal["standard", "vulnerable"] = "standard"
    cumulative_anomaly_count: int = 0

    def to_domain(self) -> Telemetry:
        return telemetry_from_payload(self.model_dump())


class ActionIn(BaseModel):
    id: str
    decision_type_id: str
    user_id: str
    initiator: Literal["user_initiated", "agent_initiated"] = "agent_initiated"
    input_trust: Literal["trusted", "untrusted"] = "trusted"
    targets: list[str] = Field(min_length=1)
    requested_scopes: dict[str, list[str]]
    parameters_digest: str = ""
    affected_parties: list[PartyIn] = Field(default_factory=list)
    producers: list[str] = Field(default_factory=list)
    telemetry: TelemetryIn | None = None

    @field_validator("requested_scopes")
    @classmethod
    def scopes_non_empty(cls, value: dict[str, list[str]]) -> dict[str, list[str]]:
        if not value:
            raise ValueError("requested_scopes must name at least one resource")
        return value

    def to_domain(self, chain_id: str) -> ActionProposal:
        return ActionProposal(
            id=self.id,
            chain_id=chain_id,
            decision_type_id=self.decision_type_id,
            initiator=Initiator(self.initiator),
            input_trust=TrustLevel(self.input_trust),
            targets=frozenset(self.targets),
            requested_scopes=scopes_from_payload(self.requested_scopes),
            parameters_digest=self.parameters_digest,
            affected_parties=tuple(p.to_domain() for p in self.affected_parties),
        )


class ChainIn(BaseModel):
    chain_id: str
    actions: list[ActionIn]
    edges: list[tuple[str, str]] = Field(default_factory=list)


class DecisionIn(BaseModel):
    decision: Literal["approve", "reject"]
    rationale: str
    approver: str = "approver"


class OutcomeIn(BaseModel):
    outcome: Literal["success", "failure"] = "success"
    result_digest: str = ""
    credential_id: str | None = None


class StartIn(BaseModel):
    credential_id: str | None = None


class DisclosureIn(BaseModel):
    party_ref: str


class SnapshotIn(BaseModel):
    memory_export: dict | list | str | int | None = None
    deployment_event: bool = False


class ToolIn(BaseModel):
    id: str
    capabilities: dict[str, list[str]]
    data_categories: list[str] = Field(default_factory=list)
    connects_to: list[str] = Field(default_factory=list)
    publishes_content: bool = False
    sector: str = "none"


class ProfileIn(BaseModel):
    """Free-form agent profile document; validated by the domain parser so the
    CLI and the API share one schema error surface."""

    model_config = {"extra": "allow"}


class CredentialOut(BaseModel):
    credential_id: str
    action_id: str
    scopes: dict[str, list[str]]
    issued_at: float
    ttl_seconds: float
    trust_downgraded: bool


class AssessmentOut(BaseModel):
    action_id: str
    level: str
    stakeholder: str | None
    reasons: list[str]
    rule_of_two_violation: bool
    consequences_of_inaction: str


class ActionResultOut(BaseModel):
    action_id: str
    chain_id: str
    status: str
    assessment: AssessmentOut
    credential: CredentialOut | None = None
    denial: dict | None = None
    suspended: list[str] = Field(default_factory=list)


class ChainOut(BaseModel):
    chain_id: str
    results: list[ActionResultOut]
    statuses: dict[str, str]


class DecisionOut(BaseModel):
    action_id: str
    decision: str
    released: list[str]
    cancelled: list[str]
    re_evaluated: list[str]
    statuses: dict[str, str]
    replayed: bool


class VerifyOut(BaseModel):
    ok: bool
    first_bad_seq: int | None
    detail: str = ""
    entries: int


class EvidenceOut(BaseModel):
    action_id: str
    complete: bool
    missing: list[str]
    entries: list[dict]
