"""Acceptance suite: one test per release criterion, at the stated tolerance.

Each test prints one PASS line on success (run with -s or read the -v test
report). Oracles are independent re-computations: transitive closure by
repeated expansion, hand-applied escalation rules, set algebra over scope
maps, hashlib over documented canonical forms, and integer exponentiation.
"""

import itertools
import random
import time

from agentgate.chains import ChainExecutor, Status, envelope_estimate
from agentgate.fixtures import (
    CANONICAL_PROFILES,
    EXPECTED_CATEGORY_TIER,
    TRIGGER_SCENARIOS,
    checklist_gate_profiles,
)
from agentgate.impact_matrix import (
    INSTRUMENT_LAYER,
    Impact,
    ObligationLayer,
    impact_matrix_row,
)
from agentgate.ledger import OversightLedger, PayloadKind
from agentgate.ontology import ResolvedProfile, Reversibility, RiskTier
from agentgate.privilege import (
    CapabilityScope,
    Denial,
    PrivilegeGuard,
    STATE_CHANGING_VERBS,
    TrustLevel,
    UserGrant,
    Verb,
    scopes_to_map,
)
from agentgate.risk import (
    ActionProposal,
    EscalationPolicy,
    Initiator,
    OversightLevel,
    Telemetry,
    Vulnerability,
    assess,
)
from agentgate.simulator import run_scenario
from agentgate.triggers import (
    GateOutcome,
    ToolDescriptor,
    build_regulatory_map,
    classify_risk_tier,
    generate_checklist,
)


def report(line: str) -> None:
    print(f"ACCEPTANCE PASS: {line}")


# -- 1. Trigger-table fidelity -------------------------------------------------

def test_trigger_table_fidelity():
    started = time.perf_counter()

    scenario_hits = 0
    for name, (profile, required) in TRIGGER_SCENARIOS.items():
        rmap = build_regulatory_map(profile)
        missing = required - rmap.instruments()
        assert not missing, f"{name}: map lacks {missing}"
        scenario_hits += 1
    assert scenario_hits == 8

    tier_hits = 0
    for category, profile in CANONICAL_PROFILES.items():
        expected_kind, expected_detail = EXPECTED_CATEGORY_TIER[category]
        tier = classify_risk_tier(profile)
        assert tier.kind is expected_kind, category
        if expected_detail is not None:
            assert tier.detail == expected_detail, category
        tier_hits += 1
    assert tier_hits == 9

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0, f"took {elapsed:.3f}s"
    report(
        f"trigger-table fidelity: 8/8 scenario maps, 9/9 category tiers "
        f"in {elapsed * 1000:.0f}ms"
    )


# -- 2. Impact-matrix consistency ----------------------------------------------

def test_impact_matrix_consistency():
    violations = []
    for category, profile in CANONICAL_PROFILES.items():
        row = impact_matrix_row(category)
        instruments = build_regulatory_map(profile).instruments()
        for instrument, layer in INSTRUMENT_LAYER.items():
            if row[layer] is Impact.NOT_TRIGGERED and instrument in instruments:
                violations.append((category.value, instrument.value))

        tier = classify_risk_tier(profile)
        cell = row[ObligationLayer.HIGH_RISK_CLASSIFICATION]
        if cell is Impact.CRITICAL and not tier.high_risk:
            violations.append((category.value, "critical-cell-not-high-risk"))
        if tier.high_risk and cell is not Impact.CRITICAL:
            violations.append((category.value, "high-risk-not-critical-cell"))
    assert not violations, violations
    report("impact-matrix consistency: zero violations across 9 categories")


# -- 3. Checklist gates ----------------------------------------------------------

def test_checklist_gates_reproduce_sequence_paths():
    expected = {
        "non_ai": (GateOutcome.NO, GateOutcome.NOT_REACHED, GateOutcome.NOT_REACHED),
        "transparency_only": (
            GateOutcome.YES,
            GateOutcome.TRANSPARENCY_ONLY,
            GateOutcome.NO,
        ),
        "high_risk_with_cra": (GateOutcome.YES, GateOutcome.HIGH_RISK, GateOutcome.YES),
        "high_risk_no_cra": (GateOutcome.YES, GateOutcome.HIGH_RISK, GateOutcome.NO),
    }
    passed = 0
    for name, profile in checklist_gate_profiles().items():
        checklist = generate_checklist(profile)
        gates = (
            checklist.step(0).gate_outcome,
            checklist.step(2).gate_outcome,
            checklist.step(8).gate_outcome,
        )
        assert gates == expected[name], name
        if name == "non_ai":
            assert checklist.exit_path == "CRA/GDPR/DSA only"
        passed += 1
    assert passed == 4
    report("checklist gates: 4/4 canonical profiles reproduce the gate paths")


# -- 4. Selective-continuation oracle equivalence ---------------------------------

def closure_oracle(edges, root):
    reachable = set()
    changed = True
    while changed:
        changed = False
        for producer, consumer in edges:
            if (producer == root or producer in reachable) and consumer not in reachable:
                reachable.add(consumer)
                changed = True
    return reachable


def test_selective_continuation_matches_reachability_oracle():
    rng = random.Random(97)
    started = time.perf_counter()
    trials = 1000
    for trial in range(trials):
        n = rng.randint(1, 50)
        names = [f"n{i}" for i in range(n)]
        edges = [
            (names[i], names[j])
            for j in range(1, n)
            for i in range(j)
            if rng.random() < 0.12
        ]
        executor = ChainExecutor()
        proposals = [
            ActionProposal(
                id=name,
                chain_id="c",
                decision_type_id="dt",
                initiator=Initiator.AGENT_INITIATED,
                input_trust=TrustLevel.TRUSTED,
                targets=frozenset({"t"}),
                requested_scopes=frozenset(
                    {CapabilityScope("r", frozenset({Verb.READ}))}
                ),
            )
            for name in names
        ]
        executor.submit_chain("c", proposals, edges)
        root = rng.choice(names)
        suspended = executor.hold("c", root)
        expected = closure_oracle(edges, root)
        assert suspended == frozenset(expected), f"trial {trial}"
        statuses = executor.statuses("c")
        for name in set(names) - {root} - expected:
            assert statuses[name] in (Status.READY, Status.PENDING), f"trial {trial}"
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0, f"took {elapsed:.1f}s"
    report(
        f"selective continuation: {trials}/{trials} random DAGs match the "
        f"closure oracle in {elapsed:.1f}s"
    )


# -- 5. Rule-of-2 invariant ---------------------------------------------------------

def _profile(tier, sensitive, state_changing):
    return ResolvedProfile(
        node_id="dt",
        regulatory_tags=frozenset(),
        risk_tier=tier,
        stakeholder="lead",
        reversibility=Reversibility.REVERSIBLE,
        sensitive_data=sensitive,
        state_changing=state_changing,
        residual_risk_acceptable_without_approval=True,
        consequences_of_inaction="",
        provenance={},
    )


def _action(trust):
    return ActionProposal(
        id="a",
        chain_id="c",
        decision_type_id="dt",
        initiator=Initiator.AGENT_INITIATED,
        input_trust=trust,
        targets=frozenset({"t"}),
        requested_scopes=frozenset({CapabilityScope("r", frozenset({Verb.READ}))}),
    )


def _boundary_grid(policy):
    eps = 1e-9
    confidences = [policy.confidence_floor - 0.01, policy.confidence_floor, 1.0, 0.0]
    distances = [None, policy.threshold_band - 0.01, policy.threshold_band, 0.0]
    drifts = [0.0, policy.drift_ceiling, policy.drift_ceiling + eps, 10.0]
    vulnerability = [Vulnerability.STANDARD, Vulnerability.VULNERABLE]
    for confidence, distance, drift, vuln in itertools.product(
        confidences, distances, drifts, vulnerability
    ):
        yield Telemetry(confidence, drift, distance, vuln)


def _degradations(t: Telemetry):
    yield Telemetry(
        0.0, t.drift_score, t.distance_to_decision_threshold,
        t.affected_entity_vulnerability,
    )
    yield Telemetry(
        t.model_confidence, t.drift_score + 10.0,
        t.distance_to_decision_threshold, t.affected_entity_vulnerability,
    )
    if t.distance_to_decision_threshold is not None:
        yield Telemetry(
            t.model_confidence, t.drift_score, 0.0, t.affected_entity_vulnerability
        )
    yield Telemetry(
        t.model_confidence, t.drift_score, t.distance_to_decision_threshold,
        Vulnerability.VULNERABLE,
    )


def test_rule_of_two_invariant_and_monotonicity():
    policy = EscalationPolicy()
    checked = 0
    counterexamples = []
    for tier, trust, sensitive, state_changing in itertools.product(
        list(RiskTier),
        [TrustLevel.TRUSTED, TrustLevel.UNTRUSTED],
        [False, True],
        [False, True],
    ):
        profile = _profile(tier, sensitive, state_changing)
        action = _action(trust)
        for telemetry in _boundary_grid(policy):
            result = assess(action, profile, telemetry, policy)
            checked += 1
            if result.rule_of_two_violation and result.level < OversightLevel.PRE_EXECUTION_APPROVAL:
                counterexamples.append((tier, telemetry))
            for degraded in _degradations(telemetry):
                if assess(action, profile, degraded, policy).level < result.level:
                    counterexamples.append(("monotonicity", tier, telemetry))
    assert not counterexamples, counterexamples[:3]
    report(
        f"rule-of-2 and telemetry monotonicity: zero counterexamples over "
        f"{checked} boundary assessments"
    )


# -- 6. Privilege containment -----------------------------------------------------

def test_privilege_containment_over_random_tuples():
    rng = random.Random(4242)
    guard = PrivilegeGuard(rng=random.Random(1), clock=lambda: 0.0)
    resources = [f"res{i}" for i in range(6)]
    verbs = list(Verb)

    def random_scopes(max_resources=4):
        picked = rng.sample(resources, rng.randint(1, max_resources))
        return frozenset(
            CapabilityScope(
                r, frozenset(rng.sample(verbs, rng.randint(1, len(verbs))))
            )
            for r in picked
        )

    trials = 10_000
    issued = 0
    for trial in range(trials):
        user = UserGrant("u", random_scopes())
        tools = {
            f"tool{i}": ToolDescriptor(id=f"tool{i}", capabilities=random_scopes())
            for i in range(rng.randint(1, 3))
        }
        action = ActionProposal(
            id=f"a{trial}",
            chain_id="c",
            decision_type_id="dt",
            initiator=Initiator.AGENT_INITIATED,
            input_trust=TrustLevel.TRUSTED,
            targets=frozenset(tools),
            requested_scopes=random_scopes(),
        )
        trust = rng.choice([TrustLevel.TRUSTED, TrustLevel.UNTRUSTED])
        outcome = guard.authorize(action, user, tools, trust)
        if isinstance(outcome, Denial):
            continue
        issued += 1
        effective = scopes_to_map(outcome.effective_scopes)
        user_map = scopes_to_map(user.scopes)
        tool_map = scopes_to_map(
            scope for tool in tools.values() for scope in tool.capabilities
        )
        requested_map = scopes_to_map(action.requested_scopes)
        for resource, granted in effective.items():
            assert granted <= user_map.get(resource, frozenset()), trial
            assert granted <= tool_map.get(resource, frozenset()), trial
            assert granted <= requested_map.get(resource, frozenset()), trial
            if trust is TrustLevel.UNTRUSTED:
                assert not granted & STATE_CHANGING_VERBS, trial
    assert issued > 1000  # the generator must exercise real issuance
    report(
        f"privilege containment: zero violations over {trials} random tuples "
        f"({issued} credentials issued)"
    )


# -- 7. Ledger tamper evidence -------------------------------------------------------

def test_ledger_tamper_evidence(tmp_path):
    ledger = OversightLedger(tmp_path / "ledger", clock=lambda: 1.0)
    kinds = [
        PayloadKind.PROPOSAL,
        PayloadKind.ASSESSMENT,
        PayloadKind.EXECUTION_OUTCOME,
    ]
    for i in range(1000):
        ledger.append(
            kinds[i % 3],
            {"action_id": f"a{i // 3}", "note": f"row {i} payload text"},
        )
    path = ledger.segment_paths()[0]
    pristine = path.read_bytes()

    # map byte offsets to the seq of the containing line (header -> seq 0)
    line_spans = []
    offset = 0
    for line_index, line in enumerate(pristine.split(b"\n")[:-1]):
        end = offset + len(line) + 1
        seq = max(line_index - 1, 0)
        line_spans.append((offset, end, seq))
        offset = end

    rng = random.Random(1337)
    detected = 0
    trials = 100
    for _ in range(trials):
        byte_offset = rng.randrange(len(pristine))
        mutated = bytearray(pristine)
        mutated[byte_offset] ^= 0x01
        path.write_bytes(bytes(mutated))
        containing_seq = next(
            seq for start, end, seq in line_spans if start <= byte_offset < end
        )
        result = ledger.verify_chain()
        assert not result.ok, f"mutation at byte {byte_offset} undetected"
        assert result.first_bad_seq is not None
        assert result.first_bad_seq <= containing_seq, (
            f"failure reported at {result.first_bad_seq}, "
            f"mutation inside seq {containing_seq}"
        )
        detected += 1
    path.write_bytes(pristine)
    assert ledger.verify_chain().ok
    assert detected == trials
    report(f"ledger tamper evidence: {detected}/{trials} single-byte mutations caught")


# -- 8. Oversight completeness ---------------------------------------------------------

def test_oversight_completeness_over_bundled_scenarios(tmp_path):
    gaps = []
    approvals_seen = 0
    # The tamper scenario deliberately corrupts its persisted ledger, so the
    # completeness replay covers the two scenarios whose ledgers survive.
    for name in ("email-assistant", "drift-injection"):
        workdir = tmp_path / name
        workdir.mkdir()
        runner_report = run_scenario(name, workdir)
        assert runner_report.passed, name
        ledger = OversightLedger(workdir / "ledger")

        executed = set()
        last_level: dict[str, str] = {}
        parties: dict[str, list[dict]] = {}
        for entry in ledger.entries():
            action_id = entry.payload.get("action_id")
            if entry.payload_kind is PayloadKind.EXECUTION_OUTCOME:
                executed.add(action_id)
            elif entry.payload_kind is PayloadKind.ASSESSMENT:
                last_level[action_id] = entry.payload.get("level", "")
            elif entry.payload_kind is PayloadKind.PROPOSAL:
                parties[action_id] = entry.payload.get("affected_parties", [])

        for action_id in executed:
            chain = ledger.evidentiary_chain(action_id)
            if not chain.complete:
                gaps.append((name, action_id, chain.missing))
                continue
            if last_level.get(action_id) == "pre_execution_approval":
                approvals_seen += 1
                core_kinds = [
                    e.payload_kind.value
                    for e in chain.entries
                    if e.payload_kind is not PayloadKind.DISCLOSURE
                ]
                if core_kinds != [
                    "proposal",
                    "assessment",
                    "notification",
                    "human_decision",
                    "execution_outcome",
                ]:
                    gaps.append((name, action_id, core_kinds))
                decisions = [
                    e
                    for e in chain.entries
                    if e.payload_kind is PayloadKind.HUMAN_DECISION
                ]
                if not all(d.payload.get("rationale", "").strip() for d in decisions):
                    gaps.append((name, action_id, "empty rationale"))
            for party in parties.get(action_id, []):
                if party.get("disclosure_required", "none") == "none":
                    continue
                disclosed = any(
                    e.payload_kind is PayloadKind.DISCLOSURE
                    and e.payload.get("party_ref") == party["party_ref"]
                    for e in ledger.entries_for_action(action_id)
                )
                if not disclosed:
                    gaps.append((name, action_id, f"no disclosure {party['party_ref']}"))

    assert not gaps, gaps
    assert approvals_seen >= 1
    report(
        "oversight completeness: zero gaps across bundled scenarios "
        f"({approvals_seen} approval-level executions checked)"
    )


# -- 9. Drift determinism and determination ----------------------------------------------

def test_drift_determinism_and_determination(tmp_path):
    report_bytes = []
    for run in ("one", "two"):
        workdir = tmp_path / run
        workdir.mkdir()
        outcome = run_scenario("drift-injection", workdir)
        assert outcome.passed
        reports = sorted((workdir / "ledger" / "snapshots").glob("report-*.json"))
        report_bytes.append(b"".join(p.read_bytes() for p in reports))
    assert report_bytes[0] == report_bytes[1]

    # Truth table and foreseen-changes suppression: exercised exhaustively in
    # tests/test_drift.py::TestDetermine; assert the scenario surfaced the
    # candidate verdict end to end.
    from agentgate.drift import (
        BehavioralBaseline,
        DriftMonitor,
        ForeseenChange,
        ForeseenKind,
        MetricBand,
        Verdict,
        compare,
        determine,
    )

    monitor = DriftMonitor()
    base_metrics = {"approval_rate": MetricBand(1.0, 0.1)}

    def snap(metric_value, catalog):
        return monitor.take_snapshot(
            tool_catalog=catalog,
            memory_export={},
            policy_binding_version="v1",
            behavioral_metrics={"approval_rate": metric_value},
            taken_at=0.0,
        )

    cases = []
    for unforeseen, relevant in itertools.product([False, True], repeat=2):
        foreseen = () if unforeseen else (
            ForeseenChange(ForeseenKind.METRIC, "approval_rate"),
            ForeseenChange(ForeseenKind.STRUCTURAL, "tool_catalog_changed"),
        )
        compliance = frozenset({"approval_rate"}) if relevant else frozenset()
        snapshot = snap(0.5, ["t"])  # breach of approval_rate
        baseline = BehavioralBaseline(
            metrics=base_metrics,
            foreseen_changes=foreseen,
            compliance_metrics=compliance,
            tool_catalog_digest=snapshot.tool_catalog_digest,
            policy_binding_version="v1",
        )
        comparison = compare(snapshot, baseline)
        verdict = determine(comparison, baseline).verdict
        expected = (
            Verdict.SUBSTANTIAL_MODIFICATION_CANDIDATE
            if unforeseen and relevant
            else Verdict.WITHIN_ENVELOPE
        )
        cases.append(verdict is expected)
    assert all(cases) and len(cases) == 4
    report(
        "drift: byte-identical reports across reruns; 4/4 determination "
        "truth-table cases; foreseen-changes pathway suppresses the candidate"
    )


# -- 10. Envelope arithmetic -----------------------------------------------------------

def test_envelope_arithmetic():
    for k in range(1, 11):
        for n in range(0, 11):
            expected = 1
            for _ in range(n):
                expected *= k
            estimate = envelope_estimate(k, n)
            assert estimate.paths == expected, (k, n)
            assert estimate.saturated == (expected > 10**9)
    saturated = envelope_estimate(50, 10, budget=10**9)
    assert saturated.saturated and saturated.paths == 50**10
    at_budget = envelope_estimate(10, 9, budget=10**9)
    assert not at_budget.saturated  # exactly at budget does not saturate
    report("envelope arithmetic: exact for k<=10, n<=10; saturation beyond budget")
