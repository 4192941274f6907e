"""Static compliance analysis for agent deployment profiles.

Maps what an agent can do (tools, data categories, connected systems,
sectors, distribution) to the EU instruments those actions activate, a
risk-tier classification, and a twelve-step compliance checklist. Rules are
deterministic and total: triggers accumulate by union, so adding a tool can
only add obligations. The inventory of external actions *is* the regulatory
map; nothing here inspects agent internals.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping

from .privilege import CapabilityScope, scope_payload, scopes_from_payload


class DataCategory(enum.Enum):
    PERSONAL_DATA = "personal_data"
    SPECIAL_CATEGORY_DATA = "special_category_data"
    COMMUNICATIONS_CONTENT = "communications_content"
    FINANCIAL_DATA = "financial_data"
    HEALTH_DATA = "health_data"
    NON_PERSONAL = "non_personal"


# Any of these makes a tool a personal-data processor.
PERSONAL_DATA_CATEGORIES: frozenset[DataCategory] = frozenset(
    {
        DataCategory.PERSONAL_DATA,
        DataCategory.SPECIAL_CATEGORY_DATA,
        DataCategory.COMMUNICATIONS_CONTENT,
        DataCategory.FINANCIAL_DATA,
        DataCategory.HEALTH_DATA,
    }
)


class ConnectionTarget(enum.Enum):
    CONNECTED_PRODUCT = "connected_product"
    PLATFORM = "platform"
    PAYMENT_SYSTEM = "payment_system"
    CLOUD_INFRA = "cloud_infra"
    EHR = "ehr"
    OT_SYSTEM = "ot_system"
    WEB = "web"
    INTERNAL = "internal"


class Sector(enum.Enum):
    EMPLOYMENT = "employment"
    CREDIT = "credit"
    HEALTHCARE = "healthcare"
    ENERGY = "energy"
    FINANCE = "finance"
    LAW_ENFORCEMENT = "law_enforcement"
    EDUCATION = "education"
    JUSTICE = "justice"
    MIGRATION = "migration"
    CRITICAL_INFRA = "critical_infra"
    NONE = "none"


class Instrument(enum.Enum):
    GDPR = "GDPR"
    EPRIVACY = "ePrivacy"
    DATA_ACT = "DataAct"
    DSA = "DSA"
    CRA = "CRA"
    NIS2 = "NIS2"
    DORA = "DORA"
    DGA = "DGA"
    MDR = "MDR"
    PLD = "PLD"
    AI_ACT_ART50 = "AIAct_Art50"
    AI_ACT_HIGH_RISK_ANNEX3 = "AIAct_HighRisk_AnnexIII"
    AI_ACT_HIGH_RISK_ANNEX1 = "AIAct_HighRisk_AnnexI"


class AgentCategory(enum.Enum):
    CUSTOMER_SERVICE = "customer_service"
    HR_RECRUITMENT = "hr_recruitment"
    CODING_DEVOPS = "coding_devops"
    FINANCE_ACCOUNTING = "finance_accounting"
    SALES_MARKETING = "sales_marketing"
    RESEARCH_KNOWLEDGE = "research_knowledge"
    IT_OPERATIONS = "it_operations"
    HEALTHCARE_CLINICAL = "healthcare_clinical"
    PERSONAL_ASSISTANT = "personal_assistant"
    CUSTOM = "custom"


# Resource classes whose presence marks a diagnosis-suggestion capability.
DIAGNOSIS_RESOURCE_CLASSES: frozenset[str] = frozenset(
    {"diagnosis", "differential_diagnosis"}
)


@dataclass(frozen=True)
class ToolDescriptor:
    id: str
    capabilities: frozenset[CapabilityScope]
    data_categories: frozenset[DataCategory] = frozenset()
    connects_to: frozenset[ConnectionTarget] = frozenset()
    publishes_content: bool = False
    sector: Sector = Sector.NONE

    def __post_init__(self) -> None:
        if not self.capabilities:
            raise ValueError(f"tool {self.id!r} declares no capabilities")


@dataclass(frozen=True)
class AgentProfile:
    category: AgentCategory
    tools: tuple[ToolDescriptor, ...]
    is_ai_system: bool = True
    standalone_software_on_market: bool = False
    distribution_channel: str | None = None
    network_connectivity: bool = False
    deployer_is_essential_entity: bool = False
    deployer_is_financial_entity: bool = False
    operates_data_marketplace: bool = False
    embeds_third_party_gpai: bool = False
    excluded_purposes: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.standalone_software_on_market and not self.distribution_channel:
            raise ValueError(
                "standalone software on the market must name a distribution channel"
            )
        seen: set[str] = set()
        for tool in self.tools:
            if tool.id in seen:
                raise ValueError(f"duplicate tool id {tool.id!r} in profile")
            seen.add(tool.id)


@dataclass(frozen=True)
class RegulatoryTrigger:
    instrument: Instrument
    rule_id: str
    evidence: tuple[str, ...]
    obligation_note: str = ""

    def __post_init__(self) -> None:
        if not self.evidence:
            raise ValueError("a trigger must carry at least one evidence field")


@dataclass(frozen=True)
class RegulatoryMap:
    triggers: frozenset[RegulatoryTrigger]
    risk_tier: "RiskTierResult"
    prohibited_practice_screening: bool

    def instruments(self) -> frozenset[Instrument]:
        return frozenset(t.instrument for t in self.triggers)

    def __contains__(self, instrument: Instrument) -> bool:
        return instrument in self.instruments()


class RiskTierKind(enum.Enum):
    NOT_AI_SYSTEM = "not_ai_system"
    TRANSPARENCY_ONLY = "transparency_only"
    HIGH_RISK_ANNEX3 = "high_risk_annex3"
    HIGH_RISK_ANNEX1 = "high_risk_annex1"


@dataclass(frozen=True)
class RiskTierResult:
    kind: RiskTierKind
    detail: str | None = None  # Annex III point ("4a") or Annex I regime ("MDR")
    rule_id: str = ""

    @property
    def high_risk(self) -> bool:
        return self.kind in (
            RiskTierKind.HIGH_RISK_ANNEX3,
            RiskTierKind.HIGH_RISK_ANNEX1,
        )


class UnknownCategory(Exception):
    pass


def classify_tool(tool: ToolDescriptor) -> frozenset[RegulatoryTrigger]:
    """Per-tool trigger rules; a total function over valid descriptors."""
    triggers: set[RegulatoryTrigger] = set()

    personal = tool.data_categories & PERSONAL_DATA_CATEGORIES
    if personal:
        triggers.add(
            RegulatoryTrigger(
                Instrument.GDPR,
                "gdpr.personal-data-processing",
                tuple(f"tool:{tool.id}.data_categories:{c.value}" for c in sorted(personal, key=lambda c: c.value)),
                "Lawful basis, purpose limitation, data minimisation in logs.",
            )
        )
    if DataCategory.COMMUNICATIONS_CONTENT in tool.data_categories:
        triggers.add(
            RegulatoryTrigger(
                Instrument.EPRIVACY,
                "eprivacy.communications-content",
                (f"tool:{tool.id}.data_categories:communications_content",),
                "Confidentiality of communications; consent for access to content.",
            )
        )
    if ConnectionTarget.CONNECTED_PRODUCT in tool.connects_to:
        triggers.add(
            RegulatoryTrigger(
                Instrument.DATA_ACT,
                "data-act.connected-product",
                (f"tool:{tool.id}.connects_to:connected_product",),
                "User data access rights; portability to third parties on request.",
            )
        )
    if tool.publishes_content and ConnectionTarget.PLATFORM in tool.connects_to:
        triggers.add(
            RegulatoryTrigger(
                Instrument.DSA,
                "dsa.platform-publishing",
                (
                    f"tool:{tool.id}.publishes_content",
                    f"tool:{tool.id}.connects_to:platform",
                ),
                "Statement of reasons; recommender transparency.",
            )
        )
    if tool.sector == Sector.HEALTHCARE and _has_diagnosis_capability(tool):
        triggers.add(
            RegulatoryTrigger(
                Instrument.MDR,
                "mdr.diagnosis-capability",
                (
                    f"tool:{tool.id}.sector:healthcare",
                    f"tool:{tool.id}.capabilities:diagnosis",
                ),
                "Medical device conformity assessment; health-data safeguards.",
            )
        )
    if tool.sector in (Sector.ENERGY, Sector.CRITICAL_INFRA):
        triggers.add(
            RegulatoryTrigger(
                Instrument.NIS2,
                "nis2.sector-candidate",
                (f"tool:{tool.id}.sector:{tool.sector.value}",),
                "Candidate trigger; confirmed when the deployer is an essential entity.",
            )
        )
    return frozenset(triggers)


def _has_diagnosis_capability(tool: ToolDescriptor) -> bool:
    return any(
        scope.resource_class in DIAGNOSIS_RESOURCE_CLASSES for scope in tool.capabilities
    )


# Precedence for the single returned tier when several rules match: product
# law first, then Annex III points in ascending point order.
_ANNEX3_SECTOR_POINTS: tuple[tuple[Sector, str, str], ...] = (
    (Sector.CRITICAL_INFRA, "2", "critical infrastructure operation"),
    (Sector.EDUCATION, "3", "education and vocational training"),
    (Sector.EMPLOYMENT, "4a", "recruitment and selection"),
    (Sector.CREDIT, "5b", "creditworthiness assessment"),
    (Sector.LAW_ENFORCEMENT, "6", "law enforcement"),
    (Sector.MIGRATION, "7", "migration, asylum and border control"),
    (Sector.JUSTICE, "8", "administration of justice"),
)


def classify_risk_tier(profile: AgentProfile) -> RiskTierResult:
    """Risk classification follows deployment domain, not architecture."""
    if not profile.is_ai_system:
        return RiskTierResult(RiskTierKind.NOT_AI_SYSTEM, rule_id="tier.not-ai-system")

    sectors = {tool.sector for tool in profile.tools}

    clinical = profile.category == AgentCategory.HEALTHCARE_CLINICAL or (
        Sector.HEALTHCARE in sectors
    )
    if clinical and any(_has_diagnosis_capability(t) for t in profile.tools):
        return RiskTierResult(
            RiskTierKind.HIGH_RISK_ANNEX1, "MDR", rule_id="tier.annex1.mdr"
        )

    if profile.category == AgentCategory.HR_RECRUITMENT:
        return RiskTierResult(
            RiskTierKind.HIGH_RISK_ANNEX3, "4a", rule_id="tier.annex3.4a"
        )

    for sector, point, _label in _ANNEX3_SECTOR_POINTS:
        if sector in sectors:
            return RiskTierResult(
                RiskTierKind.HIGH_RISK_ANNEX3,
                point,
                rule_id=f"tier.annex3.{point}",
            )

    return RiskTierResult(RiskTierKind.TRANSPARENCY_ONLY, rule_id="tier.transparency-only")


def build_regulatory_map(profile: AgentProfile) -> RegulatoryMap:
    triggers: set[RegulatoryTrigger] = set()
    for tool in profile.tools:
        triggers |= classify_tool(tool)

    if profile.standalone_software_on_market and profile.network_connectivity:
        triggers.add(
            RegulatoryTrigger(
                Instrument.CRA,
                "cra.standalone-networked-software",
                (
                    "profile.standalone_software_on_market",
                    "profile.network_connectivity",
                ),
                "Secure-by-design; vulnerability reporting; SBOM.",
            )
        )
    if profile.deployer_is_essential_entity:
        triggers.add(
            RegulatoryTrigger(
                Instrument.NIS2,
                "nis2.essential-entity",
                ("profile.deployer_is_essential_entity",),
                "24h incident reporting; supply-chain security; "
                "cybersecurity risk management.",
            )
        )
    if profile.deployer_is_financial_entity:
        triggers.add(
            RegulatoryTrigger(
                Instrument.DORA,
                "dora.financial-entity",
                ("profile.deployer_is_financial_entity",),
                "ICT risk management as lex specialis for the financial sector.",
            )
        )
    if profile.operates_data_marketplace:
        triggers.add(
            RegulatoryTrigger(
                Instrument.DGA,
                "dga.data-intermediation",
                ("profile.operates_data_marketplace",),
                "Notification; structural separation; neutrality.",
            )
        )

    tier = classify_risk_tier(profile)
    if profile.is_ai_system:
        triggers.add(
            RegulatoryTrigger(
                Instrument.AI_ACT_ART50,
                "ai-act.art50.transparency",
                ("profile.is_ai_system",),
                "Disclose AI interaction; machine-readable marking of synthetic content.",
            )
        )
        triggers.add(
            RegulatoryTrigger(
                Instrument.PLD,
                "pld.defective-output-liability",
                ("profile.is_ai_system",),
                "Ex-post strict liability; essential-requirement gaps are "
                "evidence of defect.",
            )
        )
    if tier.kind == RiskTierKind.HIGH_RISK_ANNEX3:
        triggers.add(
            RegulatoryTrigger(
                Instrument.AI_ACT_HIGH_RISK_ANNEX3,
                tier.rule_id,
                (f"profile.risk_tier:annex3.{tier.detail}",),
                "Full Chapter III essential requirements.",
            )
        )
    elif tier.kind == RiskTierKind.HIGH_RISK_ANNEX1:
        triggers.add(
            RegulatoryTrigger(
                Instrument.AI_ACT_HIGH_RISK_ANNEX1,
                tier.rule_id,
                (f"profile.risk_tier:annex1.{tier.detail}",),
                "Product-law conformity assessment runs in parallel.",
            )
        )

    return RegulatoryMap(
        triggers=frozenset(triggers),
        risk_tier=tier,
        # Harmful-manipulation prohibitions warrant screening for any agentic
        # AI system; this is a review flag, not a classifier.
        prohibited_practice_screening=profile.is_ai_system,
    )


# --- Twelve-step compliance checklist -------------------------------------

CHECKLIST_STEP_NAMES: tuple[str, ...] = (
    "Scope the system: is this an AI system at all?",
    "Map the general-purpose model layer and its documentation chain",
    "Classify the system (high-risk use case or product component?)",
    "Establish the quality management system",
    "Establish the risk management system",
    "Implement data governance and bias management",
    "Design logging, transparency, and the human-oversight automation boundary",
    "Implement AI-specific cybersecurity and privilege minimisation",
    "Assess product-cybersecurity applicability (digital-elements product?)",
    "Map adjacent legislation from the external-action inventory",
    "Run the conformity assessment and register the system",
    "Operate post-market monitoring and drift detection",
)

GATE_STEPS: frozenset[int] = frozenset({0, 2, 8})


class StepStatus(enum.Enum):
    REQUIRED = "required"
    NOT_APPLICABLE = "not_applicable"
    GATE = "gate"


class GateOutcome(enum.Enum):
    YES = "yes"
    NO = "no"
    HIGH_RISK = "high_risk"
    TRANSPARENCY_ONLY = "transparency_only"
    NOT_REACHED = "not_reached"


@dataclass(frozen=True)
class ChecklistStep:
    index: int
    name: str
    status: StepStatus
    gate_question: str | None = None
    gate_outcome: GateOutcome | None = None
    note: str = ""


@dataclass(frozen=True)
class ComplianceChecklist:
    steps: tuple[ChecklistStep, ...]
    exit_path: str | None
    residual_instruments: frozenset[Instrument]

    def step(self, index: int) -> ChecklistStep:
        return self.steps[index]


def generate_checklist(
    profile: AgentProfile, regulatory_map: RegulatoryMap | None = None
) -> ComplianceChecklist:
    """Walk the fixed twelve-step sequence with its three decision gates."""
    rmap = regulatory_map or build_regulatory_map(profile)
    tier = rmap.risk_tier
    cra_applies = Instrument.CRA in rmap

    steps: list[ChecklistStep] = []

    if not profile.is_ai_system:
        steps.append(
            _gate(0, "Is the product an AI system?", GateOutcome.NO,
                  note="Exit: product cybersecurity, data protection, and "
                       "platform duties still apply on their own terms.")
        )
        for i in range(1, 12):
            if i == 2:
                steps.append(_gate(2, "Is the system high-risk?", GateOutcome.NOT_REACHED))
            elif i == 8:
                steps.append(_gate(8, "Product with digital elements?", GateOutcome.NOT_REACHED))
            else:
                steps.append(_plain(i, StepStatus.NOT_APPLICABLE))
        residual = rmap.instruments() & {Instrument.CRA, Instrument.GDPR, Instrument.DSA}
        return ComplianceChecklist(tuple(steps), "CRA/GDPR/DSA only", frozenset(residual))

    high_risk = tier.high_risk
    steps.append(_gate(0, "Is the product an AI system?", GateOutcome.YES))
    steps.append(_plain(1, StepStatus.REQUIRED))
    steps.append(
        _gate(
            2,
            "Is the system high-risk?",
            GateOutcome.HIGH_RISK if high_risk else GateOutcome.TRANSPARENCY_ONLY,
            note="" if high_risk else "Exit: interaction-disclosure and "
                                      "synthetic-content marking duties only.",
        )
    )
    for i in range(3, 8):
        steps.append(_plain(i, StepStatus.REQUIRED if high_risk else StepStatus.NOT_APPLICABLE))
    steps.append(
        _gate(
            8,
            "Product with digital elements?",
            GateOutcome.YES if cra_applies else GateOutcome.NO,
            note="Product-cybersecurity track runs in parallel." if cra_applies else "",
        )
    )
    steps.append(_plain(9, StepStatus.REQUIRED))
    steps.append(_plain(10, StepStatus.REQUIRED if high_risk else StepStatus.NOT_APPLICABLE))
    steps.append(_plain(11, StepStatus.REQUIRED))

    return ComplianceChecklist(tuple(steps), None, frozenset())


def _plain(index: int, status: StepStatus) -> ChecklistStep:
    return ChecklistStep(index, CHECKLIST_STEP_NAMES[index], status)


def _gate(index: int, question: str, outcome: GateOutcome, note: str = "") -> ChecklistStep:
    return ChecklistStep(
        index,
        CHECKLIST_STEP_NAMES[index],
        StepStatus.GATE,
        gate_question=question,
        gate_outcome=outcome,
        note=note,
    )


# --- Serialization ---------------------------------------------------------

class ProfileError(Exception):
    """Raised when a profile or tool payload violates the documented schema."""


def tool_payload(tool: ToolDescriptor) -> dict:
    return {
        "id": tool.id,
        "capabilities": scope_payload(tool.capabilities),
        "data_categories": sorted(c.value for c in tool.data_categories),
        "connects_to": sorted(c.value for c in tool.connects_to),
        "publishes_content": tool.publishes_content,
        "sector": tool.sector.value,
    }


def tool_from_payload(data: Mapping) -> ToolDescriptor:
    try:
        return ToolDescriptor(
            id=str(data["id"]),
            capabilities=scopes_from_payload(data["capabilities"]),
            data_categories=frozenset(
                DataCategory(c) for c in data.get("data_categories", ())
            ),
            connects_to=frozenset(
                ConnectionTarget(c) for c in data.get("connects_to", ())
            ),
            publishes_content=bool(data.get("publishes_content", False)),
            sector=Sector(data.get("sector", "none")),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ProfileError(f"invalid tool descriptor: {exc}") from exc


def profile_payload(profile: AgentProfile) -> dict:
    return {
        "category": profile.category.value,
        "tools": [tool_payload(t) for t in profile.tools],
        "is_ai_system": profile.is_ai_system,
        "standalone_software_on_market": profile.standalone_software_on_market,
        "distribution_channel": profile.distribution_channel,
        "network_connectivity": profile.network_connectivity,
        "deployer_is_essential_entity": profile.deployer_is_essential_entity,
        "deployer_is_financial_entity": profile.deployer_is_financial_entity,
        "operates_data_marketplace": profile.operates_data_marketplace,
        "embeds_third_party_gpai": profile.embeds_third_party_gpai,
        "excluded_purposes": sorted(profile.excluded_purposes),
    }


def profile_from_payload(data: Mapping) -> AgentProfile:
    if not isinstance(data, Mapping):
        raise ProfileError("profile must be an object")
    try:
        return AgentProfile(
            category=AgentCategory(data["category"]),
            tools=tuple(tool_from_payload(t) for t in data.get("tools", ())),
            is_ai_system=bool(data.get("is_ai_system", True)),
            standalone_software_on_market=bool(
                data.get("standalone_software_on_market", False)
            ),
            distribution_channel=data.get("distribution_channel"),
            network_connectivity=bool(data.get("network_connectivity", False)),
            deployer_is_essential_entity=bool(
                data.get("deployer_is_essential_entity", False)
            ),
            deployer_is_financial_entity=bool(
                data.get("deployer_is_financial_entity", False)
            ),
            operates_data_marketplace=bool(
                data.get("operates_data_marketplace", False)
            ),
            embeds_third_party_gpai=bool(data.get("embeds_third_party_gpai", False)),
            excluded_purposes=frozenset(data.get("excluded_purposes", ())),
        )
    except ProfileError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise ProfileError(f"invalid agent profile: {exc}") from exc


def map_payload(rmap: RegulatoryMap) -> dict:
    return {
        "risk_tier": {
            "kind": rmap.risk_tier.kind.value,
            "detail": rmap.risk_tier.detail,
            "rule_id": rmap.risk_tier.rule_id,
        },
        "prohibited_practice_screening": rmap.prohibited_practice_screening,
        "triggers": [
            {
                "instrument": t.instrument.value,
                "rule_id": t.rule_id,
                "evidence": list(t.evidence),
                "obligation_note": t.obligation_note,
            }
            for t in sorted(rmap.triggers, key=lambda t: (t.instrument.value, t.rule_id))
        ],
    }


def checklist_payload(checklist: ComplianceChecklist) -> dict:
    return {
        "exit_path": checklist.exit_path,
        "residual_instruments": sorted(i.value for i in checklist.residual_instruments),
        "steps": [
            {
                "index": s.index,
                "name": s.name,
                "status": s.status.value,
                "gate_question": s.gate_question,
                "gate_outcome": s.gate_outcome.value if s.gate_outcome else None,
                "note": s.note,
            }
            for s in checklist.steps
        ],
    }
