"""Runtime governance gateway for tool-using AI agents."""

from .chains import ChainExecutor, Decision, Status, envelope_estimate
from .drift import (
    BehavioralBaseline,
    DriftMonitor,
    DriftReport,
    ModificationDetermination,
    Verdict,
    compare,
    determine,
)
from .ledger import AffectedParty, LedgerEntry, OversightLedger, PayloadKind
from .ontology import AttributeSet, Ontology, OntologyNode, ResolvedProfile
from .policy import GatewayConfig, PolicyBundle, load_config, load_policy
from .privilege import CapabilityScope, JitCredential, PrivilegeGuard, UserGrant, Verb
from .risk import (
    ActionProposal,
    EscalationPolicy,
    OversightLevel,
    RiskAssessment,
    Telemetry,
    assess,
    rule_of_two,
)
from .triggers import (
    AgentProfile,
    RegulatoryMap,
    ToolDescriptor,
    build_regulatory_map,
    classify_risk_tier,
    classify_tool,
    generate_checklist,
)

__version__ = "0.1.0"

__all__ = [
    "ActionProposal",
    "AffectedParty",
    "AgentProfile",
    "AttributeSet",
    "BehavioralBaseline",
    "CapabilityScope",
    "ChainExecutor",
    "Decision",
    "DriftMonitor",
    "DriftReport",
    "EscalationPolicy",
    "GatewayConfig",
    "JitCredential",
    "LedgerEntry",
    "ModificationDetermination",
    "Ontology",
    "OntologyNode",
    "OversightLedger",
    "OversightLevel",
    "PayloadKind",
    "PolicyBundle",
    "PrivilegeGuard",
    "RegulatoryMap",
    "ResolvedProfile",
    "RiskAssessment",
    "Status",
    "Telemetry",
    "ToolDescriptor",
    "UserGrant",
    "Verb",
    "Verdict",
    "assess",
    "build_regulatory_map",
    "classify_risk_tier",
    "classify_tool",
    "compare",
    "determine",
    "envelope_estimate",
    "generate_checklist",
    "load_config",
    "load_policy",
    "rule_of_two",
]
