"""Compliance impact matrix: obligation layers x nine deployment categories.

This table is curated fixture data, not rule output: the cell values encode
probability-weighted judgment about how heavily each obligation layer lands
on each deployment category. The rule-computed regulatory map is
cross-checked against it in tests (a NotTriggered cell must never appear in
the computed map for that category's canonical profile).
"""

from __future__ import annotations

import enum

from .triggers import AgentCategory, Instrument, UnknownCategory


class ObligationLayer(enum.Enum):
    HIGH_RISK_CLASSIFICATION = "high_risk_classification"
    ART50_TRANSPARENCY = "interaction_transparency"
    GPAI_OBLIGATIONS = "gpai_model_obligations"
    QMS = "quality_management_system"
    RISK_MANAGEMENT = "risk_management"
    LOGGING_TRANSPARENCY_OVERSIGHT = "logging_transparency_oversight"
    AI_CYBERSECURITY = "ai_specific_cybersecurity"
    BIAS_MANAGEMENT = "bias_management"
    DATASET_GOVERNANCE = "dataset_governance"
    GDPR = "gdpr"
    EPRIVACY = "eprivacy"
    DATA_ACT = "data_act"
    DSA = "dsa"
    CRA = "cra"
    NIS2 = "nis2"
    DORA = "dora"
    MDR_IVDR = "mdr_ivdr"
    PLD = "pld"
    DGA = "dga"
    PRIVILEGE_MINIMISATION = "privilege_minimisation"
    OVERSIGHT_AUTOMATION_BOUNDARY = "oversight_automation_boundary"
    RUNTIME_DRIFT = "runtime_drift_substantial_modification"
    AFFECTED_PARTY_TRANSPARENCY = "affected_party_transparency"
    NHI_GOVERNANCE = "nhi_governance"


class Impact(enum.Enum):
    CRITICAL = "critical"
    SIGNIFICANT = "significant"
    MODERATE = "moderate"
    LOW = "low"
    NOT_TRIGGERED = "not_triggered"


# Column order for the rows below.
CATEGORY_ORDER: tuple[AgentCategory, ...] = (
    AgentCategory.CUSTOMER_SERVICE,
    AgentCategory.HR_RECRUITMENT,
    AgentCategory.CODING_DEVOPS,
    AgentCategory.FINANCE_ACCOUNTING,
    AgentCategory.SALES_MARKETING,
    AgentCategory.RESEARCH_KNOWLEDGE,
    AgentCategory.IT_OPERATIONS,
    AgentCategory.HEALTHCARE_CLINICAL,
    AgentCategory.PERSONAL_ASSISTANT,
)

_C = Impact.CRITICAL
_S = Impact.SIGNIFICANT
_M = Impact.MODERATE
_L = Impact.LOW
_N = Impact.NOT_TRIGGERED

_MATRIX: dict[ObligationLayer, tuple[Impact, ...]] = {
    ObligationLayer.HIGH_RISK_CLASSIFICATION:        (_S, _C, _L, _S, _L, _L, _S, _C, _L),
    ObligationLayer.ART50_TRANSPARENCY:              (_C, _C, _C, _C, _C, _C, _C, _C, _C),
    ObligationLayer.GPAI_OBLIGATIONS:                (_S, _S, _S, _S, _S, _M, _S, _S, _S),
    ObligationLayer.QMS:                             (_S, _C, _S, _S, _S, _M, _S, _C, _M),
    ObligationLayer.RISK_MANAGEMENT:                 (_S, _C, _S, _S, _M, _L, _S, _C, _L),
    ObligationLayer.LOGGING_TRANSPARENCY_OVERSIGHT:  (_S, _C, _M, _S, _M, _L, _S, _C, _M),
    ObligationLayer.AI_CYBERSECURITY:                (_S, _S, _C, _C, _M, _L, _C, _C, _S),
    ObligationLayer.BIAS_MANAGEMENT:                 (_M, _C, _M, _S, _M, _L, _L, _S, _L),
    ObligationLayer.DATASET_GOVERNANCE:              (_M, _C, _M, _S, _M, _L, _M, _C, _L),
    ObligationLayer.GDPR:                            (_C, _C, _S, _C, _C, _M, _S, _C, _C),
    ObligationLayer.EPRIVACY:                        (_S, _L, _L, _L, _S, _L, _L, _L, _C),
    ObligationLayer.DATA_ACT:                        (_L, _L, _M, _L, _L, _L, _M, _M, _L),
    ObligationLayer.DSA:                             (_M, _L, _L, _L, _C, _L, _L, _L, _L),
    ObligationLayer.CRA:                             (_L, _L, _C, _L, _L, _L, _S, _M, _L),
    ObligationLayer.NIS2:                            (_L, _L, _L, _S, _L, _L, _C, _L, _L),
    ObligationLayer.DORA:                            (_L, _L, _L, _C, _L, _L, _L, _L, _L),
    ObligationLayer.MDR_IVDR:                        (_N, _N, _N, _N, _N, _N, _N, _C, _N),
    ObligationLayer.PLD:                             (_M, _C, _S, _C, _M, _L, _S, _C, _L),
    ObligationLayer.DGA:                             (_L, _L, _L, _L, _L, _M, _L, _L, _L),
    ObligationLayer.PRIVILEGE_MINIMISATION:          (_S, _S, _C, _C, _M, _L, _C, _C, _C),
    ObligationLayer.OVERSIGHT_AUTOMATION_BOUNDARY:   (_S, _C, _M, _S, _L, _L, _S, _C, _M),
    ObligationLayer.RUNTIME_DRIFT:                   (_M, _C, _S, _S, _M, _L, _S, _C, _M),
    ObligationLayer.AFFECTED_PARTY_TRANSPARENCY:     (_C, _C, _M, _S, _C, _M, _M, _C, _M),
    ObligationLayer.NHI_GOVERNANCE:                  (_S, _S, _C, _C, _M, _L, _C, _S, _S),
}

# Instruments the rule engine can emit, keyed to their matrix layer. Layers
# without a computable instrument (standards, agent-specific challenges) are
# judgment-only and have no rule counterpart.
INSTRUMENT_LAYER: dict[Instrument, ObligationLayer] = {
    Instrument.GDPR: ObligationLayer.GDPR,
    Instrument.EPRIVACY: ObligationLayer.EPRIVACY,
    Instrument.DATA_ACT: ObligationLayer.DATA_ACT,
    Instrument.DSA: ObligationLayer.DSA,
    Instrument.CRA: ObligationLayer.CRA,
    Instrument.NIS2: ObligationLayer.NIS2,
    Instrument.DORA: ObligationLayer.DORA,
    Instrument.DGA: ObligationLayer.DGA,
    Instrument.MDR: ObligationLayer.MDR_IVDR,
    Instrument.PLD: ObligationLayer.PLD,
    Instrument.AI_ACT_ART50: ObligationLayer.ART50_TRANSPARENCY,
    Instrument.AI_ACT_HIGH_RISK_ANNEX3: ObligationLayer.HIGH_RISK_CLASSIFICATION,
    Instrument.AI_ACT_HIGH_RISK_ANNEX1: ObligationLayer.HIGH_RISK_CLASSIFICATION,
}


def impact_matrix_row(category: AgentCategory) -> dict[ObligationLayer, Impact]:
    """The matrix column for one deployment category, ordered by layer."""
    if category not in CATEGORY_ORDER:
        raise UnknownCategory(category)
    idx = CATEGORY_ORDER.index(category)
    return {layer: impacts[idx] for layer, impacts in _MATRIX.items()}


def impact_cell(category: AgentCategory, layer: ObligationLayer) -> Impact:
    return impact_matrix_row(category)[layer]


def matrix_payload() -> dict:
    return {
        "categories": [c.value for c in CATEGORY_ORDER],
        "rows": {
            layer.value: [impact.value for impact in impacts]
            for layer, impacts in _MATRIX.items()
        },
    }
