"""Property tests over generated inputs for the algebraic invariants."""

import string

from hypothesis import given, settings, strategies as st

from agentgate.ledger import OversightLedger, PayloadKind
from agentgate.ontology import (
    ATTRIBUTE_FIELDS,
    AttributeSet,
    Level,
    Ontology,
    OntologyNode,
    Reversibility,
    RiskTier,
)
from agentgate.privilege import (
    CapabilityScope,
    Verb,
    covers,
    intersect_scopes,
    scopes_to_map,
    strip_state_changing,
    STATE_CHANGING_VERBS,
)

from test_ontology import brute_force_resolve

resource_names = st.sampled_from(["inbox", "db", "files", "pipeline", "records"])
verb_sets = st.frozensets(st.sampled_from(list(Verb)), min_size=1, max_size=5)
scope_sets = st.frozensets(
    st.builds(CapabilityScope, resource_names, verb_sets), min_size=0, max_size=6
)


@given(scope_sets, scope_sets)
def test_intersection_contained_in_both_operands(a, b):
    result = intersect_scopes(a, b)
    assert covers(a, result)
    assert covers(b, result)


@given(scope_sets, scope_sets)
def test_intersection_commutes(a, b):
    assert scopes_to_map(intersect_scopes(a, b)) == scopes_to_map(intersect_scopes(b, a))


@given(scope_sets)
def test_strip_removes_exactly_state_changing_verbs(scopes):
    stripped = scopes_to_map(strip_state_changing(scopes))
    original = scopes_to_map(scopes)
    for resource, verbs in stripped.items():
        assert not verbs & STATE_CHANGING_VERBS
        assert verbs == original[resource] - STATE_CHANGING_VERBS


sparse_attributes = st.builds(
    AttributeSet,
    regulatory_tags=st.none()
    | st.frozensets(st.sampled_from(["gdpr", "art50", "nis2", "mdr"]), max_size=3),
    risk_tier=st.none() | st.sampled_from(list(RiskTier)),
    stakeholder=st.none() | st.text(string.ascii_lowercase, min_size=1, max_size=8),
    reversibility=st.none() | st.sampled_from(list(Reversibility)),
    sensitive_data=st.none() | st.booleans(),
    state_changing=st.none() | st.booleans(),
    residual_risk_acceptable_without_approval=st.none() | st.booleans(),
)

full_attributes = st.builds(
    AttributeSet,
    regulatory_tags=st.frozensets(
        st.sampled_from(["gdpr", "art50", "nis2", "mdr"]), max_size=3
    ),
    risk_tier=st.sampled_from(list(RiskTier)),
    stakeholder=st.text(string.ascii_lowercase, min_size=1, max_size=8),
    reversibility=st.sampled_from(list(Reversibility)),
    sensitive_data=st.booleans(),
    state_changing=st.booleans(),
    residual_risk_acceptable_without_approval=st.booleans(),
)


@settings(max_examples=60)
@given(full_attributes, st.lists(sparse_attributes, min_size=1, max_size=3))
def test_resolution_matches_brute_force_on_generated_chains(root_attrs, child_attrs):
    onto = Ontology()
    onto.add_node(OntologyNode("d", Level.DOMAIN, attributes=root_attrs))
    parent = "d"
    for depth, attrs in enumerate(child_attrs, start=1):
        node_id = f"n{depth}"
        onto.add_node(OntologyNode(node_id, Level(depth), parent, attrs))
        parent = node_id
    for node in onto.nodes():
        profile = onto.resolve_profile(node.id)
        oracle = brute_force_resolve(onto, node.id)
        for name in ATTRIBUTE_FIELDS:
            assert getattr(profile, name) == oracle[name]


@settings(max_examples=25, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.sampled_from(list(PayloadKind)),
            st.dictionaries(
                st.sampled_from(["action_id", "note", "outcome"]),
                st.text(string.printable, max_size=20),
                max_size=3,
            ),
        ),
        min_size=1,
        max_size=20,
    )
)
def test_appends_never_rewrite_earlier_bytes(tmp_path_factory, entries):
    directory = tmp_path_factory.mktemp("ledger")
    ledger = OversightLedger(directory, clock=lambda: 1.0)
    prefixes = []
    path = None
    for kind, payload in entries:
        ledger.append(kind, payload)
        path = ledger.segment_paths()[0]
        data = path.read_bytes()
        for prefix in prefixes:
            assert data[: len(prefix)] == prefix
        prefixes.append(data)
    assert ledger.verify_chain().ok
