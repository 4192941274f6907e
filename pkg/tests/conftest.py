import pytest

from agentgate.ontology import (
    AttributeSet,
    Level,
    Ontology,
    OntologyNode,
    Reversibility,
    RiskTier,
)


def full_attributes(**overrides) -> AttributeSet:
    base = dict(
        regulatory_tags=frozenset({"interaction_transparency"}),
        risk_tier=RiskTier.MINIMAL,
        stakeholder="ops_lead",
        reversibility=Reversibility.REVERSIBLE,
        sensitive_data=False,
        state_changing=False,
        residual_risk_acceptable_without_approval=True,
    )
    base.update(overrides)
    return AttributeSet(**base)


@pytest.fixture
def small_ontology() -> Ontology:
    """finance domain -> invoicing process -> two decision types -> template."""
    onto = Ontology()
    onto.add_node(
        OntologyNode("finance", Level.DOMAIN, attributes=full_attributes())
    )
    onto.add_node(OntologyNode("invoicing", Level.PROCESS, "finance"))
    onto.add_node(
        OntologyNode(
            "approve_payment",
            Level.DECISION_TYPE,
            "invoicing",
            attributes=AttributeSet(
                risk_tier=RiskTier.HIGH,
                sensitive_data=True,
                state_changing=True,
                reversibility=Reversibility.COMPENSABLE,
            ),
        )
    )
    onto.add_node(
        OntologyNode(
            "read_invoice",
            Level.DECISION_TYPE,
            "invoicing",
            attributes=AttributeSet(sensitive_data=True),
        )
    )
    onto.add_node(
        OntologyNode(
            "pay_invoice_template",
            Level.ACTION_INSTANCE_TEMPLATE,
            "approve_payment",
        )
    )
    return onto
