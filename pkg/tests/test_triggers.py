"""Trigger rules, risk-tier classification, and the compliance checklist."""

import dataclasses

import pytest

from agentgate.fixtures import (
    CANONICAL_PROFILES,
    EXPECTED_CATEGORY_TIER,
    checklist_gate_profiles,
    coding_devops_profile,
    customer_service_profile,
    healthcare_clinical_profile,
    it_operations_profile,
)
from agentgate.impact_matrix import (
    Impact,
    ObligationLayer,
    impact_cell,
    impact_matrix_row,
)
from agentgate.privilege import CapabilityScope, Verb
from agentgate.triggers import (
    AgentCategory,
    AgentProfile,
    ConnectionTarget,
    DataCategory,
    GateOutcome,
    Instrument,
    RiskTierKind,
    Sector,
    StepStatus,
    ToolDescriptor,
    UnknownCategory,
    build_regulatory_map,
    classify_risk_tier,
    classify_tool,
    generate_checklist,
    profile_from_payload,
    profile_payload,
)


def scope(resource, *verbs):
    return CapabilityScope(resource, frozenset(verbs))


def make_tool(**kwargs):
    defaults = dict(
        id="t1",
        capabilities=frozenset({scope("data", Verb.READ)}),
        data_categories=frozenset(),
        connects_to=frozenset(),
        publishes_content=False,
        sector=Sector.NONE,
    )
    defaults.update(kwargs)
    return ToolDescriptor(**defaults)


def instruments(triggers):
    return {t.instrument for t in triggers}


class TestClassifyTool:
    def test_personal_data_fires_gdpr(self):
        tool = make_tool(data_categories=frozenset({DataCategory.PERSONAL_DATA}))
        assert instruments(classify_tool(tool)) == {Instrument.GDPR}

    def test_gdpr_fires_iff_personal_category_present(self):
        for category in DataCategory:
            tool = make_tool(data_categories=frozenset({category}))
            fired = Instrument.GDPR in instruments(classify_tool(tool))
            assert fired == (category is not DataCategory.NON_PERSONAL)

    def test_communications_content_adds_eprivacy(self):
        tool = make_tool(
            data_categories=frozenset({DataCategory.COMMUNICATIONS_CONTENT})
        )
        assert instruments(classify_tool(tool)) == {
            Instrument.GDPR,
            Instrument.EPRIVACY,
        }

    def test_connected_product_fires_data_act(self):
        tool = make_tool(connects_to=frozenset({ConnectionTarget.CONNECTED_PRODUCT}))
        assert instruments(classify_tool(tool)) == {Instrument.DATA_ACT}

    def test_publishing_on_platform_fires_dsa(self):
        tool = make_tool(
            connects_to=frozenset({ConnectionTarget.PLATFORM}), publishes_content=True
        )
        assert Instrument.DSA in instruments(classify_tool(tool))
        silent = make_tool(connects_to=frozenset({ConnectionTarget.PLATFORM}))
        assert Instrument.DSA not in instruments(classify_tool(silent))

    def test_healthcare_diagnosis_fires_mdr(self):
        tool = make_tool(
            capabilities=frozenset({scope("diagnosis", Verb.EXECUTE)}),
            sector=Sector.HEALTHCARE,
        )
        assert Instrument.MDR in instruments(classify_tool(tool))
        no_diagnosis = make_tool(sector=Sector.HEALTHCARE)
        assert Instrument.MDR not in instruments(classify_tool(no_diagnosis))

    def test_inert_tool_triggers_nothing(self):
        tool = make_tool(data_categories=frozenset({DataCategory.NON_PERSONAL}))
        assert classify_tool(tool) == frozenset()

    def test_every_trigger_carries_evidence(self):
        tool = make_tool(
            data_categories=frozenset(
                {DataCategory.PERSONAL_DATA, DataCategory.COMMUNICATIONS_CONTENT}
            ),
            connects_to=frozenset({ConnectionTarget.CONNECTED_PRODUCT}),
        )
        for trigger in classify_tool(tool):
            assert trigger.evidence


class TestRegulatoryMap:
    def test_coding_agent_networked_extension_includes_cra(self):
        rmap = build_regulatory_map(coding_devops_profile())
        assert Instrument.CRA in rmap

    def test_energy_utility_includes_nis2_with_reporting_note(self):
        profile = it_operations_profile()
        profile = dataclasses.replace(profile, deployer_is_essential_entity=True)
        rmap = build_regulatory_map(profile)
        notes = [
            t.obligation_note
            for t in rmap.triggers
            if t.instrument is Instrument.NIS2
        ]
        assert notes and any("24h" in note for note in notes)

    def test_data_marketplace_includes_dga(self):
        profile = dataclasses.replace(
            customer_service_profile(), operates_data_marketplace=True
        )
        assert Instrument.DGA in build_regulatory_map(profile)

    def test_ai_system_always_carries_art50_and_pld(self):
        for profile in CANONICAL_PROFILES.values():
            rmap = build_regulatory_map(profile)
            assert Instrument.AI_ACT_ART50 in rmap
            assert Instrument.PLD in rmap

    def test_monotonicity_adding_a_tool_never_removes_triggers(self):
        profile = customer_service_profile()
        before = build_regulatory_map(profile).instruments()
        extended = dataclasses.replace(
            profile,
            tools=profile.tools
            + (
                make_tool(
                    id="iot",
                    connects_to=frozenset({ConnectionTarget.CONNECTED_PRODUCT}),
                ),
            ),
        )
        after = build_regulatory_map(extended).instruments()
        assert before <= after


class TestRiskTier:
    def test_category_tiers_match_taxonomy_table(self):
        for category, profile in CANONICAL_PROFILES.items():
            expected_kind, expected_detail = EXPECTED_CATEGORY_TIER[category]
            tier = classify_risk_tier(profile)
            assert tier.kind is expected_kind, category
            if expected_detail is not None:
                assert tier.detail == expected_detail, category

    def test_not_an_ai_system(self):
        profile = dataclasses.replace(customer_service_profile(), is_ai_system=False)
        assert classify_risk_tier(profile).kind is RiskTierKind.NOT_AI_SYSTEM

    def test_creditworthiness_escalates_finance(self):
        base = CANONICAL_PROFILES[AgentCategory.FINANCE_ACCOUNTING]
        credit = dataclasses.replace(
            base,
            tools=base.tools
            + (
                make_tool(
                    id="credit_scoring",
                    capabilities=frozenset({scope("credit_score", Verb.EXECUTE)}),
                    data_categories=frozenset({DataCategory.FINANCIAL_DATA}),
                    sector=Sector.CREDIT,
                ),
            ),
        )
        tier = classify_risk_tier(credit)
        assert tier.kind is RiskTierKind.HIGH_RISK_ANNEX3
        assert tier.detail == "5b"

    def test_critical_infrastructure_escalates_it_ops(self):
        base = it_operations_profile()
        critical = dataclasses.replace(
            base,
            tools=base.tools
            + (
                make_tool(
                    id="grid_ops",
                    capabilities=frozenset({scope("grid", Verb.EXECUTE)}),
                    sector=Sector.CRITICAL_INFRA,
                ),
            ),
        )
        tier = classify_risk_tier(critical)
        assert tier.kind is RiskTierKind.HIGH_RISK_ANNEX3
        assert tier.detail == "2"

    def test_clinical_diagnosis_is_product_law_pathway(self):
        tier = classify_risk_tier(healthcare_clinical_profile())
        assert tier.kind is RiskTierKind.HIGH_RISK_ANNEX1
        assert tier.detail == "MDR"

    def test_checklist_gates_never_contradict_tier(self):
        for profile in CANONICAL_PROFILES.values():
            rmap = build_regulatory_map(profile)
            checklist = generate_checklist(profile, rmap)
            gate2 = checklist.step(2)
            if rmap.risk_tier.high_risk:
                assert gate2.gate_outcome is GateOutcome.HIGH_RISK
            else:
                assert gate2.gate_outcome is GateOutcome.TRANSPARENCY_ONLY


class TestChecklist:
    def test_non_ai_system_exits_at_step_zero(self):
        profile = checklist_gate_profiles()["non_ai"]
        checklist = generate_checklist(profile)
        assert checklist.step(0).gate_outcome is GateOutcome.NO
        assert checklist.exit_path == "CRA/GDPR/DSA only"
        assert checklist.step(2).gate_outcome is GateOutcome.NOT_REACHED
        for i in (1, 3, 4, 5, 6, 7, 9, 10, 11):
            assert checklist.step(i).status is StepStatus.NOT_APPLICABLE

    def test_high_risk_with_cra_requires_all_steps(self):
        # Oracle: hand-walk of the three gates for this profile shape.
        profile = checklist_gate_profiles()["high_risk_with_cra"]
        checklist = generate_checklist(profile)
        assert checklist.step(0).gate_outcome is GateOutcome.YES
        assert checklist.step(2).gate_outcome is GateOutcome.HIGH_RISK
        assert checklist.step(8).gate_outcome is GateOutcome.YES
        for i in (1, 3, 4, 5, 6, 7, 9, 10, 11):
            assert checklist.step(i).status is StepStatus.REQUIRED

    def test_high_risk_without_cra(self):
        checklist = generate_checklist(checklist_gate_profiles()["high_risk_no_cra"])
        assert checklist.step(8).gate_outcome is GateOutcome.NO
        assert checklist.step(10).status is StepStatus.REQUIRED

    def test_transparency_only_short_circuits(self):
        checklist = generate_checklist(checklist_gate_profiles()["transparency_only"])
        assert checklist.step(2).gate_outcome is GateOutcome.TRANSPARENCY_ONLY
        assert "disclosure" in checklist.step(2).note
        for i in (3, 4, 5, 6, 7, 10):
            assert checklist.step(i).status is StepStatus.NOT_APPLICABLE
        for i in (1, 9, 11):
            assert checklist.step(i).status is StepStatus.REQUIRED


class TestImpactMatrix:
    def test_hr_high_risk_cell_is_critical(self):
        row = impact_matrix_row(AgentCategory.HR_RECRUITMENT)
        assert row[ObligationLayer.HIGH_RISK_CLASSIFICATION] is Impact.CRITICAL

    def test_mdr_row_only_healthcare(self):
        assert (
            impact_cell(AgentCategory.HEALTHCARE_CLINICAL, ObligationLayer.MDR_IVDR)
            is Impact.CRITICAL
        )
        assert (
            impact_cell(AgentCategory.CUSTOMER_SERVICE, ObligationLayer.MDR_IVDR)
            is Impact.NOT_TRIGGERED
        )

    def test_dora_critical_only_for_finance(self):
        for category in CANONICAL_PROFILES:
            expected = (
                Impact.CRITICAL
                if category is AgentCategory.FINANCE_ACCOUNTING
                else Impact.LOW
            )
            assert impact_cell(category, ObligationLayer.DORA) is expected

    def test_unknown_category(self):
        with pytest.raises(UnknownCategory):
            impact_matrix_row(AgentCategory.CUSTOM)


def test_profile_payload_round_trip():
    profile = coding_devops_profile()
    assert profile_from_payload(profile_payload(profile)) == profile


def test_standalone_software_requires_channel():
    with pytest.raises(ValueError):
        AgentProfile(
            category=AgentCategory.CODING_DEVOPS,
            tools=(make_tool(),),
            standalone_software_on_market=True,
        )
