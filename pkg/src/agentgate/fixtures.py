"""Canonical agent profiles for the nine deployment categories and the
eight concrete trigger scenarios.

The canonical profiles model the baseline deployment of each category:
conditional escalations (a finance agent doing creditworthiness scoring, an
IT-ops agent running critical infrastructure) are separate scenario
fixtures, not folded into the canonical profile.
"""

from __future__ import annotations

from .privilege import CapabilityScope, Verb
from .triggers import (
    AgentCategory,
    AgentProfile,
    ConnectionTarget,
    DataCategory,
    Instrument,
    RiskTierKind,
    Sector,
    ToolDescriptor,
)


def _scope(resource: str, *verbs: Verb) -> CapabilityScope:
    return CapabilityScope(resource, frozenset(verbs))


def _tool(
    tool_id: str,
    *scopes: CapabilityScope,
    data: frozenset[DataCategory] = frozenset({DataCategory.NON_PERSONAL}),
    connects: frozenset[ConnectionTarget] = frozenset(),
    publishes: bool = False,
    sector: Sector = Sector.NONE,
) -> ToolDescriptor:
    return ToolDescriptor(
        id=tool_id,
        capabilities=frozenset(scopes),
        data_categories=data,
        connects_to=connects,
        publishes_content=publishes,
        sector=sector,
    )


def customer_service_profile() -> AgentProfile:
    return AgentProfile(
        category=AgentCategory.CUSTOMER_SERVICE,
        tools=(
            _tool(
                "crm",
                _scope("customer_records", Verb.READ, Verb.WRITE),
                data=frozenset({DataCategory.PERSONAL_DATA, DataCategory.FINANCIAL_DATA}),
                connects=frozenset({ConnectionTarget.INTERNAL}),
            ),
            _tool(
                "payment_gateway",
                _scope("refunds", Verb.EXECUTE),
                data=frozenset({DataCategory.FINANCIAL_DATA}),
                connects=frozenset({ConnectionTarget.PAYMENT_SYSTEM}),
            ),
            _tool(
                "support_mailbox",
                _scope("tickets", Verb.READ, Verb.SEND),
                data=frozenset(
                    {DataCategory.PERSONAL_DATA, DataCategory.COMMUNICATIONS_CONTENT}
                ),
                connects=frozenset({ConnectionTarget.INTERNAL}),
            ),
        ),
    )


def hr_recruitment_profile() -> AgentProfile:
    return AgentProfile(
        category=AgentCategory.HR_RECRUITMENT,
        tools=(
            _tool(
                "ats",
                _scope("candidate_records", Verb.READ, Verb.WRITE),
                data=frozenset({DataCategory.PERSONAL_DATA}),
                connects=frozenset({ConnectionTarget.INTERNAL}),
                sector=Sector.EMPLOYMENT,
            ),
            _tool(
                "calendar",
                _scope("interview_slots", Verb.READ, Verb.WRITE),
                data=frozenset({DataCategory.PERSONAL_DATA}),
            ),
            _tool(
                "candidate_mailer",
                _scope("candidate_email", Verb.SEND),
                data=frozenset({DataCategory.PERSONAL_DATA}),
            ),
        ),
    )


def coding_devops_profile() -> AgentProfile:
    return AgentProfile(
        category=AgentCategory.CODING_DEVOPS,
        tools=(
            _tool("git", _scope("repository", Verb.READ, Verb.WRITE)),
            _tool("ci", _scope("pipeline", Verb.EXECUTE)),
            _tool(
                "cloud",
                _scope("deployments", Verb.WRITE, Verb.EXECUTE),
                connects=frozenset({ConnectionTarget.CLOUD_INFRA}),
            ),
        ),
        standalone_software_on_market=True,
        distribution_channel="editor extension marketplace",
        network_connectivity=True,
    )


def finance_accounting_profile() -> AgentProfile:
    return AgentProfile(
        category=AgentCategory.FINANCE_ACCOUNTING,
        tools=(
            _tool(
                "erp",
                _scope("invoices", Verb.READ, Verb.WRITE),
                data=frozenset({DataCategory.PERSONAL_DATA, DataCategory.FINANCIAL_DATA}),
                connects=frozenset({ConnectionTarget.INTERNAL}),
                sector=Sector.FINANCE,
            ),
            _tool(
                "banking_api",
                _scope("payments", Verb.EXECUTE),
                data=frozenset({DataCategory.FINANCIAL_DATA}),
                connects=frozenset({ConnectionTarget.PAYMENT_SYSTEM}),
                sector=Sector.FINANCE,
            ),
        ),
        deployer_is_financial_entity=True,
    )


def sales_marketing_profile() -> AgentProfile:
    return AgentProfile(
        category=AgentCategory.SALES_MARKETING,
        tools=(
            _tool(
                "crm",
                _scope("leads", Verb.READ, Verb.WRITE),
                data=frozenset({DataCategory.PERSONAL_DATA}),
            ),
            _tool(
                "social_publisher",
                _scope("posts", Verb.WRITE, Verb.SEND),
                connects=frozenset({ConnectionTarget.PLATFORM}),
                publishes=True,
            ),
            _tool(
                "outreach_mailer",
                _scope("prospect_email", Verb.SEND),
                data=frozenset(
                    {DataCategory.PERSONAL_DATA, DataCategory.COMMUNICATIONS_CONTENT}
                ),
            ),
        ),
    )


def research_knowledge_profile() -> AgentProfile:
    return AgentProfile(
        category=AgentCategory.RESEARCH_KNOWLEDGE,
        tools=(
            _tool(
                "web_search",
                _scope("search_index", Verb.READ),
                connects=frozenset({ConnectionTarget.WEB}),
            ),
            _tool(
                "document_store",
                _scope("documents", Verb.READ),
                connects=frozenset({ConnectionTarget.INTERNAL}),
            ),
        ),
    )


def it_operations_profile() -> AgentProfile:
    return AgentProfile(
        category=AgentCategory.IT_OPERATIONS,
        tools=(
            _tool(
                "monitoring",
                _scope("metrics", Verb.READ),
                connects=frozenset({ConnectionTarget.CLOUD_INFRA}),
            ),
            _tool(
                "remediation",
                _scope("services", Verb.EXECUTE),
                connects=frozenset({ConnectionTarget.CLOUD_INFRA}),
            ),
            _tool(
                "ticketing",
                _scope("tickets", Verb.READ, Verb.WRITE),
                data=frozenset({DataCategory.PERSONAL_DATA}),
            ),
        ),
    )


def healthcare_clinical_profile() -> AgentProfile:
    return AgentProfile(
        category=AgentCategory.HEALTHCARE_CLINICAL,
        tools=(
            _tool(
                "ehr",
                _scope("patient_records", Verb.READ),
                data=frozenset(
                    {
                        DataCategory.PERSONAL_DATA,
                        DataCategory.SPECIAL_CATEGORY_DATA,
                        DataCategory.HEALTH_DATA,
                    }
                ),
                connects=frozenset({ConnectionTarget.EHR}),
                sector=Sector.HEALTHCARE,
            ),
            _tool(
                "diagnosis_assistant",
                _scope("diagnosis", Verb.READ, Verb.EXECUTE),
                data=frozenset({DataCategory.HEALTH_DATA}),
                connects=frozenset({ConnectionTarget.EHR}),
                sector=Sector.HEALTHCARE,
            ),
        ),
    )


def personal_assistant_profile() -> AgentProfile:
    return AgentProfile(
        category=AgentCategory.PERSONAL_ASSISTANT,
        tools=(
            _tool(
                "mailbox",
                _scope("inbox", Verb.READ, Verb.SEND),
                data=frozenset(
                    {DataCategory.PERSONAL_DATA, DataCategory.COMMUNICATIONS_CONTENT}
                ),
            ),
            _tool(
                "calendar",
                _scope("events", Verb.READ, Verb.WRITE),
                data=frozenset({DataCategory.PERSONAL_DATA}),
            ),
            _tool(
                "travel_booking",
                _scope("bookings", Verb.EXECUTE),
                data=frozenset({DataCategory.PERSONAL_DATA, DataCategory.FINANCIAL_DATA}),
                connects=frozenset({ConnectionTarget.WEB}),
            ),
        ),
    )


CANONICAL_PROFILES: dict[AgentCategory, AgentProfile] = {
    AgentCategory.CUSTOMER_SERVICE: customer_service_profile(),
    AgentCategory.HR_RECRUITMENT: hr_recruitment_profile(),
    AgentCategory.CODING_DEVOPS: coding_devops_profile(),
    AgentCategory.FINANCE_ACCOUNTING: finance_accounting_profile(),
    AgentCategory.SALES_MARKETING: sales_marketing_profile(),
    AgentCategory.RESEARCH_KNOWLEDGE: research_knowledge_profile(),
    AgentCategory.IT_OPERATIONS: it_operations_profile(),
    AgentCategory.HEALTHCARE_CLINICAL: healthcare_clinical_profile(),
    AgentCategory.PERSONAL_ASSISTANT: personal_assistant_profile(),
}

# Expected risk tier per canonical category, as the taxonomy table states it.
EXPECTED_CATEGORY_TIER: dict[AgentCategory, tuple[RiskTierKind, str | None]] = {
    AgentCategory.CUSTOMER_SERVICE: (RiskTierKind.TRANSPARENCY_ONLY, None),
    AgentCategory.HR_RECRUITMENT: (RiskTierKind.HIGH_RISK_ANNEX3, "4a"),
    AgentCategory.CODING_DEVOPS: (RiskTierKind.TRANSPARENCY_ONLY, None),
    AgentCategory.FINANCE_ACCOUNTING: (RiskTierKind.TRANSPARENCY_ONLY, None),
    AgentCategory.SALES_MARKETING: (RiskTierKind.TRANSPARENCY_ONLY, None),
    AgentCategory.RESEARCH_KNOWLEDGE: (RiskTierKind.TRANSPARENCY_ONLY, None),
    AgentCategory.IT_OPERATIONS: (RiskTierKind.TRANSPARENCY_ONLY, None),
    AgentCategory.HEALTHCARE_CLINICAL: (RiskTierKind.HIGH_RISK_ANNEX1, "MDR"),
    AgentCategory.PERSONAL_ASSISTANT: (RiskTierKind.TRANSPARENCY_ONLY, None),
}


# --- Concrete trigger scenarios --------------------------------------------

def _smart_home_profile() -> AgentProfile:
    return AgentProfile(
        category=AgentCategory.PERSONAL_ASSISTANT,
        tools=(
            _tool(
                "iot_hub",
                _scope("sensor_readings", Verb.READ),
                connects=frozenset({ConnectionTarget.CONNECTED_PRODUCT}),
            ),
            _tool("report_builder", _scope("energy_reports", Verb.WRITE)),
        ),
    )


def _content_moderation_profile() -> AgentProfile:
    return AgentProfile(
        category=AgentCategory.SALES_MARKETING,
        tools=(
            _tool(
                "feed_moderator",
                _scope("posts", Verb.READ, Verb.WRITE, Verb.DELETE),
                connects=frozenset({ConnectionTarget.PLATFORM}),
                publishes=True,
            ),
            _tool(
                "notifier",
                _scope("user_notices", Verb.SEND),
                data=frozenset({DataCategory.PERSONAL_DATA}),
            ),
        ),
    )


def _financial_advisory_profile() -> AgentProfile:
    return AgentProfile(
        category=AgentCategory.FINANCE_ACCOUNTING,
        tools=(
            _tool(
                "market_data",
                _scope("quotes", Verb.READ),
                connects=frozenset({ConnectionTarget.WEB}),
            ),
            _tool(
                "advisory_mailer",
                _scope("client_email", Verb.SEND),
                data=frozenset({DataCategory.PERSONAL_DATA, DataCategory.FINANCIAL_DATA}),
            ),
        ),
        deployer_is_financial_entity=True,
    )


def _energy_utility_profile() -> AgentProfile:
    return AgentProfile(
        category=AgentCategory.IT_OPERATIONS,
        tools=(
            _tool(
                "scada_monitor",
                _scope("grid_telemetry", Verb.READ),
                connects=frozenset({ConnectionTarget.OT_SYSTEM}),
                sector=Sector.ENERGY,
            ),
            _tool(
                "ot_remediation",
                _scope("grid_controls", Verb.EXECUTE),
                connects=frozenset({ConnectionTarget.OT_SYSTEM}),
                sector=Sector.ENERGY,
            ),
        ),
        deployer_is_essential_entity=True,
    )


def _data_marketplace_profile() -> AgentProfile:
    return AgentProfile(
        category=AgentCategory.RESEARCH_KNOWLEDGE,
        tools=(
            _tool(
                "exchange",
                _scope("interaction_datasets", Verb.READ, Verb.WRITE),
                data=frozenset({DataCategory.PERSONAL_DATA}),
                connects=frozenset({ConnectionTarget.PLATFORM}),
            ),
        ),
        operates_data_marketplace=True,
    )


TRIGGER_SCENARIOS: dict[str, tuple[AgentProfile, frozenset[Instrument]]] = {
    # scenario name -> (profile, instruments its row names)
    "customer_service_personal_data": (
        customer_service_profile(),
        frozenset({Instrument.GDPR}),
    ),
    "smart_home_connected_products": (
        _smart_home_profile(),
        frozenset({Instrument.DATA_ACT}),
    ),
    "platform_content_moderation": (
        _content_moderation_profile(),
        frozenset({Instrument.DSA}),
    ),
    "coding_agent_marketed_extension": (
        coding_devops_profile(),
        frozenset({Instrument.CRA}),
    ),
    "financial_advisory_stale_data": (
        _financial_advisory_profile(),
        frozenset({Instrument.PLD}),
    ),
    "clinical_diagnosis_suggestion": (
        healthcare_clinical_profile(),
        frozenset({Instrument.MDR, Instrument.GDPR, Instrument.AI_ACT_HIGH_RISK_ANNEX1}),
    ),
    "energy_utility_ot_remediation": (
        _energy_utility_profile(),
        frozenset({Instrument.NIS2}),
    ),
    "training_data_marketplace": (
        _data_marketplace_profile(),
        frozenset({Instrument.DGA, Instrument.GDPR}),
    ),
}


def checklist_gate_profiles() -> dict[str, AgentProfile]:
    """The four canonical gate-walk profiles for the checklist."""
    import dataclasses

    non_ai = dataclasses.replace(research_knowledge_profile(), is_ai_system=False)
    return {
        "non_ai": non_ai,
        "transparency_only": research_knowledge_profile(),
        "high_risk_with_cra": dataclasses.replace(
            hr_recruitment_profile(),
            standalone_software_on_market=True,
            distribution_channel="enterprise marketplace",
            network_connectivity=True,
        ),
        "high_risk_no_cra": hr_recruitment_profile(),
    }
