"""Gateway core: the per-action governance pipeline and its state.

Every proposed action flows through one sequence: resolve the ontology
profile, assess oversight against live telemetry, record proposal and
assessment on the ledger, then route by level. Autonomous through
supervisory levels receive a single-action credential immediately;
pre-execution approval places a dependency-aware hold; blocked actions
terminate with their descendants. Approvals re-release descendants, which
are re-assessed against current telemetry before they may run. The ledger
is the single source of truth: the in-memory state can be rebuilt from it
after a restart.
"""

from __future__ import annotations

import random
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from ..canonical import canonical_json
from .. import chains as chains_mod
from ..chains import ChainExecutor, Decision, Status
from ..drift import (
    DriftMonitor,
    DriftReport,
    ModificationDetermination,
    RuntimeStateSnapshot,
    Verdict,
    behavioral_metrics_from_ledger,
    compare,
    determination_payload,
    determine,
    report_payload,
    snapshot_payload,
)
from ..ledger import (
    DisclosureKind,
    InitiatorClass,
    LedgerEntry,
    OversightLedger,
    PayloadKind,
    party_from_payload,
)
from ..ontology import UnknownNode
from ..policy import GatewayConfig, PolicyBundle
from ..privilege import (
    Denial,
    JitCredential,
    PrivilegeGuard,
    TrustLevel,
    UserGrant,
    scope_payload,
)
from ..risk import (
    ActionProposal,
    Initiator,
    OversightLevel,
    RiskAssessment,
    Telemetry,
    assess,
    assessment_payload,
    proposal_payload,
    telemetry_from_payload,
)
from .events import EventBus


class GatewayError(Exception):
    def __init__(self, message: str, status_code: int = 400) -> None:
        super().__init__(message)
        self.status_code = status_code


class UnknownActionError(GatewayError):
    def __init__(self, action_id: str) -> None:
        super().__init__(f"unknown action {action_id!r}", 404)


@dataclass
class PendingApproval:
    action: ActionProposal
    assessment: RiskAssessment
    chain_id: str
    held_at: float
    kind: str = "approval_request"  # or "interrupt"

    def to_payload(self) -> dict:
        return {
            "action_id": self.action.id,
            "chain_id": self.chain_id,
            "decision_type_id": self.action.decision_type_id,
            "level": self.assessment.level.wire,
            "reasons": list(self.assessment.reasons),
            "stakeholder": self.assessment.stakeholder,
            "consequences_of_inaction": self.assessment.consequences_of_inaction,
            "held_at": self.held_at,
            "kind": self.kind,
        }


@dataclass
class ActionRecord:
    proposal: ActionProposal
    user_id: str
    telemetry: Telemetry
    assessment: RiskAssessment
    credential: JitCredential | None = None
    denial: Denial | None = None
    approved: bool = False


@dataclass(frozen=True)
class PipelineResult:
    action_id: str
    chain_id: str
    status: Status
    assessment: RiskAssessment
    credential: JitCredential | None
    denial: Denial | None
    suspended: frozenset[str]


@dataclass(frozen=True)
class DecisionOutcome:
    action_id: str
    decision: Decision
    released: frozenset[str]
    cancelled: frozenset[str]
    re_evaluated: frozenset[str]
    statuses: dict[str, Status]
    replayed: bool = False


@dataclass(frozen=True)
class SnapshotOutcome:
    snapshot: RuntimeStateSnapshot
    report: DriftReport | None
    determination: ModificationDetermination | None


class GatewayCore:
    def __init__(
        self,
        policy: PolicyBundle,
        config: GatewayConfig,
        *,
        ledger: OversightLedger | None = None,
        clock=time.time,
        rng: random.Random | None = None,
    ) -> None:
        self.policy = policy
        self.config = config
        self.clock = clock
        self.ledger = ledger or OversightLedger(config.ledger_dir, clock=clock)
        self.bus = EventBus()
        self.executor = ChainExecutor(reassess_gate=self._reassess_gate)
        self.guard = PrivilegeGuard(
            default_ttl_seconds=config.credential_ttl_seconds,
            rng=rng,
            clock=clock,
        )
        self.monitor = DriftMonitor()
        self.catalog = dict(policy.tools)
        self.drift_floor = 0.0
        self.snapshots_dir = Path(config.ledger_dir) / "snapshots"
        self.snapshots_dir.mkdir(parents=True, exist_ok=True)

        self._actions: dict[str, ActionRecord] = {}
        self._pending: dict[str, PendingApproval] = {}
        self._idempotency: dict[str, DecisionOutcome] = {}
        self._last_memory_export: object = {}
        self._actions_since_snapshot = 0
        self._last_snapshot_at = clock()
        self._reports: list[SnapshotOutcome] = []
        self._lock = threading.RLock()

    # -- ledger plumbing -----------------------------------------------------

    def _append(
        self,
        kind: PayloadKind,
        payload: dict,
        initiator: InitiatorClass = InitiatorClass.SYSTEM,
    ) -> LedgerEntry:
        entry = self.ledger.append(kind, payload, initiator, self.clock())
        self.bus.publish(entry)
        return entry

    # -- pipeline --------------------------------------------------------------

    def submit_chain(
        self,
        chain_id: str,
        actions: list[tuple[ActionProposal, str, Telemetry | None]],
        edges: list[tuple[str, str]],
    ) -> list[PipelineResult]:
        """Submit a whole chain: register the DAG, then pipeline each action
        in submission order."""
        with self._lock:
            for proposal, _, _ in actions:  # validate bindings before mutating
                self._resolve_profile(proposal)
            self.executor.submit_chain(chain_id, [a for a, _, _ in actions], edges)
            producer_map: dict[str, list[str]] = {a.id: [] for a, _, _ in actions}
            for producer, consumer in edges:
                producer_map[consumer].append(producer)
            results = []
            for proposal, user_id, telemetry in actions:
                results.append(
                    self._run_pipeline(
                        chain_id, proposal, user_id, telemetry, producer_map[proposal.id]
                    )
                )
            return results

    def propose_action(
        self,
        chain_id: str,
        proposal: ActionProposal,
        user_id: str,
        telemetry: Telemetry | None = None,
        producers: list[str] | None = None,
    ) -> PipelineResult:
        """Append one action to an existing chain and run the pipeline."""
        with self._lock:
            producers = producers or []
            self.executor.chain(chain_id)  # raise UnknownChain early
            self._resolve_profile(proposal)  # validate binding before mutating
            self.executor.add_action(chain_id, proposal, producers)
            return self._run_pipeline(chain_id, proposal, user_id, telemetry, producers)

    def _resolve_profile(self, proposal: ActionProposal):
        try:
            return self.policy.ontology.resolve_profile(proposal.decision_type_id)
        except UnknownNode:
            raise GatewayError(
                f"decision type {proposal.decision_type_id!r} does not resolve "
                "in the ontology",
                422,
            ) from None

    def _effective_telemetry(self, telemetry: Telemetry | None) -> Telemetry:
        telemetry = telemetry or Telemetry()
        if self.drift_floor > telemetry.drift_score:
            telemetry = Telemetry(
                model_confidence=telemetry.model_confidence,
                drift_score=self.drift_floor,
                distance_to_decision_threshold=telemetry.distance_to_decision_threshold,
                affected_entity_vulnerability=telemetry.affected_entity_vulnerability,
                cumulative_anomaly_count=telemetry.cumulative_anomaly_count,
            )
        return telemetry

    def _run_pipeline(
        self,
        chain_id: str,
        proposal: ActionProposal,
        user_id: str,
        telemetry: Telemetry | None,
        producers: list[str],
    ) -> PipelineResult:
        profile = self._resolve_profile(proposal)
        effective = self._effective_telemetry(telemetry)
        assessment = assess(proposal, profile, effective, self.policy.escalation)

        self._append(
            PayloadKind.PROPOSAL,
            proposal_payload(proposal, producers),
            InitiatorClass.AGENT_INITIATED
            if proposal.initiator is Initiator.AGENT_INITIATED
            else InitiatorClass.USER_INITIATED,
        )
        self._append(PayloadKind.ASSESSMENT, assessment_payload(assessment))

        record = ActionRecord(proposal, user_id, effective, assessment)
        self._actions[proposal.id] = record
        self._actions_since_snapshot += 1

        credential: JitCredential | None = None
        denial: Denial | None = None
        suspended: frozenset[str] = frozenset()
        level = assessment.level

        current = self.executor.statuses(chain_id)[proposal.id]
        if level is OversightLevel.BLOCKED:
            cancelled = self.executor.block(chain_id, proposal.id)
            suspended = cancelled
        elif level is OversightLevel.PRE_EXECUTION_APPROVAL:
            if current in (Status.READY, Status.PENDING):
                suspended = self.executor.hold(chain_id, proposal.id)
                self._notify_hold(chain_id, record, "approval_request")
            # A node appended under an active hold is already suspended; the
            # re-assessment gate will place its own hold at promotion time.
        else:
            if level is OversightLevel.SUPERVISORY:
                self._append(
                    PayloadKind.NOTIFICATION,
                    {
                        "action_id": proposal.id,
                        "chain_id": chain_id,
                        "kind": "monitoring",
                        "stakeholder": assessment.stakeholder,
                        "level": level.wire,
                    },
                )
            credential, denial = self._issue_credential(
                record, trust=proposal.input_trust
            )

        self._maybe_auto_snapshot()
        return PipelineResult(
            action_id=proposal.id,
            chain_id=chain_id,
            status=self.executor.statuses(chain_id)[proposal.id],
            assessment=assessment,
            credential=credential,
            denial=denial,
            suspended=suspended,
        )

    def _notify_hold(self, chain_id: str, record: ActionRecord, kind: str) -> None:
        pending = PendingApproval(
            action=record.proposal,
            assessment=record.assessment,
            chain_id=chain_id,
            held_at=self.clock(),
            kind=kind,
        )
        self._pending[record.proposal.id] = pending
        self._append(
            PayloadKind.NOTIFICATION,
            {**pending.to_payload(), "kind": kind},
        )

    def _issue_credential(
        self, record: ActionRecord, *, trust: TrustLevel
    ) -> tuple[JitCredential | None, Denial | None]:
        proposal = record.proposal
        user = self.policy.users.get(record.user_id)
        if user is None:
            user = UserGrant(record.user_id or "anonymous", frozenset())
        strict = (
            self.config.strict_privilege_mode
            or proposal.decision_type_id in self.policy.strict_decision_types
        )
        try:
            outcome = self.guard.authorize(
                proposal,
                user,
                self.catalog,
                trust,
                strict=strict,
                now=self.clock(),
            )
        except Exception as exc:  # UnknownTool / ExpiredUserGrant
            self._append(
                PayloadKind.CREDENTIAL_EVENT,
                {
                    "action_id": proposal.id,
                    "event": "denied",
                    "reason": type(exc).__name__,
                },
            )
            raise GatewayError(str(exc), 400) from exc
        if isinstance(outcome, Denial):
            record.denial = outcome
            self._append(
                PayloadKind.CREDENTIAL_EVENT,
                {
                    "action_id": proposal.id,
                    "event": "denied",
                    "reason": outcome.reason.value,
                    "detail": outcome.detail,
                },
            )
            return None, outcome
        record.credential = outcome
        self._append(
            PayloadKind.CREDENTIAL_EVENT,
            {
                "action_id": proposal.id,
                "event": "issued",
                "credential_id": outcome.credential_id,
                "scopes": scope_payload(outcome.effective_scopes),
                "ttl_seconds": outcome.ttl_seconds,
                "trust_downgraded": outcome.trust_downgraded,
            },
        )
        return outcome, None

    def _revoke_credential(self, action_id: str, reason: str) -> None:
        record = self._actions.get(action_id)
        if record is None or record.credential is None:
            return
        credential_id = record.credential.credential_id
        if not self.guard.validate(credential_id, action_id, self.clock()).ok:
            return
        self.guard.revoke(credential_id)
        self._append(
            PayloadKind.CREDENTIAL_EVENT,
            {
                "action_id": action_id,
                "event": "revoked",
                "credential_id": credential_id,
                "reason": reason,
            },
        )

    # -- approvals ---------------------------------------------------------------

    def pending_approvals(self) -> list[PendingApproval]:
        with self._lock:
            self._expire_stale_holds()
            items = list(self._pending.values())
        items.sort(key=lambda p: (-p.assessment.level, p.held_at))
        return items

    def _expire_stale_holds(self) -> None:
        if self.config.approval_timeout_mode != "expire_to_reject":
            return
        deadline = self.config.approval_timeout_seconds or 0.0
        now = self.clock()
        for action_id, pending in list(self._pending.items()):
            if now - pending.held_at >= deadline:
                self._decide_locked(
                    action_id,
                    Decision.REJECT,
                    rationale="approval window expired without a decision",
                    approver="system:timeout",
                    idempotency_key=None,
                    initiator=InitiatorClass.SYSTEM,
                )

    def decide(
        self,
        action_id: str,
        decision: Decision,
        rationale: str,
        approver: str,
        idempotency_key: str | None = None,
    ) -> DecisionOutcome:
        with self._lock:
            return self._decide_locked(
                action_id,
                decision,
                rationale,
                approver,
                idempotency_key,
                InitiatorClass.USER_INITIATED,
            )

    def _decide_locked(
        self,
        action_id: str,
        decision: Decision,
        rationale: str,
        approver: str,
        idempotency_key: str | None,
        initiator: InitiatorClass,
    ) -> DecisionOutcome:
        if not rationale.strip():
            raise GatewayError("rationale must be non-empty", 400)
        if idempotency_key and idempotency_key in self._idempotency:
            stored = self._idempotency[idempotency_key]
            return DecisionOutcome(
                stored.action_id,
                stored.decision,
                stored.released,
                stored.cancelled,
                stored.re_evaluated,
                stored.statuses,
                replayed=True,
            )
        record = self._actions.get(action_id)
        if record is None:
            raise UnknownActionError(action_id)
        chain_id = record.proposal.chain_id
        statuses = self.executor.statuses(chain_id)
        if statuses.get(action_id) is not Status.HELD:
            raise GatewayError(
                f"action {action_id!r} is not held "
                f"({statuses.get(action_id, Status.PENDING).value})",
                409,
            )

        self._append(
            PayloadKind.HUMAN_DECISION,
            {
                "action_id": action_id,
                "decision": decision.value,
                "rationale": rationale,
                "approver": approver,
                "idempotency_key": idempotency_key,
            },
            initiator,
        )
        result = self.executor.resolve(chain_id, action_id, decision)
        self._pending.pop(action_id, None)

        if decision is Decision.REJECT:
            self._revoke_credential(action_id, "rejected")
            for cancelled_id in result.cancelled:
                self._revoke_credential(cancelled_id, "producer_rejected")
        if decision is Decision.APPROVE:
            record.approved = True
            # A recorded human approval lifts the dynamic untrusted-input
            # restriction: the oversight the restriction forces has happened.
            self._issue_credential(record, trust=TrustLevel.TRUSTED)

        outcome = DecisionOutcome(
            action_id=action_id,
            decision=decision,
            released=result.released,
            cancelled=result.cancelled,
            re_evaluated=result.re_evaluated,
            statuses=self.executor.statuses(chain_id),
        )
        if idempotency_key:
            self._idempotency[idempotency_key] = outcome
        return outcome

    # -- execution ------------------------------------------------------------------

    def start_action(self, action_id: str, credential_id: str | None = None) -> None:
        with self._lock:
            record = self._actions.get(action_id)
            if record is None:
                raise UnknownActionError(action_id)
            chain_id = record.proposal.chain_id
            status = self.executor.statuses(chain_id).get(action_id)
            if status is not Status.READY:
                raise GatewayError(
                    f"action {action_id!r} is not ready ({status.value})", 409
                )
            cred_id = credential_id or (
                record.credential.credential_id if record.credential else None
            )
            if cred_id is None:
                raise GatewayError(
                    f"no credential issued for action {action_id!r}", 403
                )
            verdict = self.guard.validate(cred_id, action_id, self.clock())
            if not verdict.ok:
                raise GatewayError(
                    f"credential invalid: {verdict.reason.value}", 403
                )
            self.executor.start(chain_id, action_id)

    def complete_action(
        self, action_id: str, outcome: str, result_digest: str = ""
    ) -> frozenset[str]:
        with self._lock:
            record = self._actions.get(action_id)
            if record is None:
                raise UnknownActionError(action_id)
            chain_id = record.proposal.chain_id
            try:
                newly_ready = self.executor.complete(chain_id, action_id)
            except chains_mod.InvalidTransition as exc:
                raise GatewayError(str(exc), 409) from exc
            self._append(
                PayloadKind.EXECUTION_OUTCOME,
                {
                    "action_id": action_id,
                    "chain_id": chain_id,
                    "outcome": outcome,
                    "result_digest": result_digest,
                },
            )
            return newly_ready

    def interrupt(self, action_id: str) -> frozenset[str]:
        """Supervisory interrupt, honored at inter-node granularity: the
        action is held before it starts; executing nodes finish."""
        with self._lock:
            record = self._actions.get(action_id)
            if record is None:
                raise UnknownActionError(action_id)
            chain_id = record.proposal.chain_id
            status = self.executor.statuses(chain_id).get(action_id)
            if status not in (Status.READY, Status.PENDING):
                raise GatewayError(
                    f"cannot interrupt {action_id!r} while {status.value}", 409
                )
            suspended = self.executor.hold(chain_id, action_id)
            self._revoke_credential(action_id, "interrupted")
            self._notify_hold(chain_id, record, "interrupt")
            return suspended

    def _reassess_gate(self, chain_id: str, action_id: str) -> bool:
        """Called by the executor when a previously suspended node's producers
        complete: re-assess against current telemetry before it may run."""
        record = self._actions.get(action_id)
        if record is None:
            return True
        profile = self._resolve_profile(record.proposal)
        telemetry = self._effective_telemetry(record.telemetry)
        assessment = assess(
            record.proposal, profile, telemetry, self.policy.escalation
        )
        record.assessment = assessment
        record.telemetry = telemetry
        self._append(PayloadKind.ASSESSMENT, assessment_payload(assessment))
        level = assessment.level
        if level is OversightLevel.BLOCKED:
            self.executor.block(chain_id, action_id)
            self._revoke_credential(action_id, "blocked_on_reassessment")
            return False
        if level is OversightLevel.PRE_EXECUTION_APPROVAL and not record.approved:
            self.executor.hold(chain_id, action_id)
            self._revoke_credential(action_id, "held_on_reassessment")
            self._notify_hold(chain_id, record, "approval_request")
            return False
        if level is OversightLevel.SUPERVISORY:
            self._append(
                PayloadKind.NOTIFICATION,
                {
                    "action_id": action_id,
                    "chain_id": chain_id,
                    "kind": "monitoring",
                    "stakeholder": assessment.stakeholder,
                    "level": level.wire,
                },
            )
        trust = (
            TrustLevel.TRUSTED if record.approved else record.proposal.input_trust
        )
        self._issue_credential(record, trust=trust)
        return True

    # -- disclosures ---------------------------------------------------------------

    def record_disclosure(self, action_id: str, party_ref: str) -> LedgerEntry:
        with self._lock:
            record = self._actions.get(action_id)
            if record is None:
                raise UnknownActionError(action_id)
            party = next(
                (
                    p
                    for p in record.proposal.affected_parties
                    if p.party_ref == party_ref
                ),
                None,
            )
            if party is None:
                raise GatewayError(
                    f"no affected party {party_ref!r} on action {action_id!r}", 404
                )
            if party.disclosure_required is DisclosureKind.NONE:
                raise GatewayError(
                    f"party {party_ref!r} carries no disclosure obligation", 400
                )
            entry = self.ledger.record_disclosure(action_id, party)
            self.bus.publish(entry)
            return entry

    # -- drift ------------------------------------------------------------------------

    def add_tool(self, tool) -> None:
        with self._lock:
            self.catalog[tool.id] = tool

    def catalog_payload(self) -> list[dict]:
        from ..triggers import tool_payload

        return [tool_payload(t) for _, t in sorted(self.catalog.items())]

    def take_snapshot(
        self, memory_export: object | None = None, deployment_event: bool = False
    ) -> SnapshotOutcome:
        with self._lock:
            if memory_export is not None:
                self._last_memory_export = memory_export
            metrics = behavioral_metrics_from_ledger(self.ledger.entries())
            baseline = self.policy.baseline
            if baseline is not None:
                for name in baseline.metrics:
                    metrics.setdefault(name, 0.0)
            snapshot = self.monitor.take_snapshot(
                tool_catalog=self.catalog_payload(),
                memory_export=self._last_memory_export,
                policy_binding_version=self.policy.version,
                behavioral_metrics=metrics,
                taken_at=self.clock(),
            )
            self._append(PayloadKind.SNAPSHOT_EVENT, snapshot_payload(snapshot))
            self._write_json(f"snapshot-{snapshot.snapshot_id:06d}.json", snapshot_payload(snapshot))

            report = None
            determination = None
            if baseline is not None:
                report = compare(snapshot, baseline)
                determination = determine(report, baseline, deployment_event)
                self._append(
                    PayloadKind.DRIFT_EVENT,
                    {
                        "snapshot_id": snapshot.snapshot_id,
                        **report_payload(report),
                        **determination_payload(determination),
                    },
                )
                self._write_json(
                    f"report-{snapshot.snapshot_id:06d}.json",
                    {**report_payload(report), **determination_payload(determination)},
                )
                if determination.verdict is Verdict.SUBSTANTIAL_MODIFICATION_CANDIDATE:
                    self.drift_floor = max(
                        report.drift_score, self.policy.escalation.drift_ceiling + 1.0
                    )
                else:
                    self.drift_floor = report.drift_score

            self._actions_since_snapshot = 0
            self._last_snapshot_at = self.clock()
            outcome = SnapshotOutcome(snapshot, report, determination)
            self._reports.append(outcome)
            return outcome

    def _write_json(self, name: str, payload: dict) -> None:
        (self.snapshots_dir / name).write_text(
            canonical_json(payload) + "\n", encoding="utf-8"
        )

    def _maybe_auto_snapshot(self) -> None:
        due_by_count = (
            self._actions_since_snapshot >= self.config.snapshot_every_actions
        )
        due_by_time = (
            self.clock() - self._last_snapshot_at
            >= self.config.snapshot_every_hours * 3600.0
        )
        if due_by_count or due_by_time:
            self.take_snapshot()

    def drift_outcomes(self) -> list[SnapshotOutcome]:
        with self._lock:
            return list(self._reports)

    # -- queries -----------------------------------------------------------------------

    def chain_state(self, chain_id: str) -> dict:
        dag = self.executor.chain(chain_id)
        statuses = self.executor.statuses(chain_id)
        return {
            "chain_id": chain_id,
            "nodes": {
                node_id: {
                    "status": statuses[node_id].value,
                    "decision_type_id": dag.nodes[node_id].decision_type_id,
                    "level": (
                        self._actions[node_id].assessment.level.wire
                        if node_id in self._actions
                        else None
                    ),
                }
                for node_id in dag.nodes
            },
            "edges": sorted(dag.edges),
            "ready": sorted(self.executor.next_ready(chain_id)),
        }

    def action_record(self, action_id: str) -> ActionRecord:
        record = self._actions.get(action_id)
        if record is None:
            raise UnknownActionError(action_id)
        return record

    # -- restart ------------------------------------------------------------------------

    def rebuild_from_ledger(self) -> None:
        """Reconstruct chain DAGs, statuses, holds, and the drift floor from
        the persisted ledger after a restart."""
        with self._lock:
            proposals: dict[str, dict] = {}
            order: list[str] = []
            assessments: dict[str, dict] = {}
            decisions: dict[str, str] = {}
            executed: set[str] = set()
            chain_edges: dict[str, list[tuple[str, str]]] = {}
            chain_actions: dict[str, list[str]] = {}

            for entry in self.ledger.entries():
                payload = entry.payload
                action_id = payload.get("action_id")
                if entry.payload_kind is PayloadKind.PROPOSAL:
                    proposals[action_id] = payload
                    order.append(action_id)
                    chain = payload["chain_id"]
                    chain_actions.setdefault(chain, []).append(action_id)
                    for producer in payload.get("producers", []):
                        chain_edges.setdefault(chain, []).append((producer, action_id))
                elif entry.payload_kind is PayloadKind.ASSESSMENT:
                    assessments[action_id] = payload
                elif entry.payload_kind is PayloadKind.HUMAN_DECISION:
                    decisions[action_id] = payload.get("decision", "")
                elif entry.payload_kind is PayloadKind.EXECUTION_OUTCOME:
                    executed.add(action_id)
                elif entry.payload_kind is PayloadKind.DRIFT_EVENT:
                    if (
                        payload.get("verdict")
                        == Verdict.SUBSTANTIAL_MODIFICATION_CANDIDATE.value
                    ):
                        self.drift_floor = max(
                            float(payload.get("drift_score", 0.0)),
                            self.policy.escalation.drift_ceiling + 1.0,
                        )
                    else:
                        self.drift_floor = float(payload.get("drift_score", 0.0))

            self.executor = ChainExecutor(reassess_gate=self._reassess_gate)
            self._actions.clear()
            self._pending.clear()

            for chain_id, action_ids in chain_actions.items():
                rebuilt = [
                    _proposal_from_payload(proposals[a]) for a in action_ids
                ]
                self.executor.submit_chain(
                    chain_id, rebuilt, chain_edges.get(chain_id, [])
                )

            for action_id in order:
                payload = proposals[action_id]
                chain_id = payload["chain_id"]
                proposal = _proposal_from_payload(payload)
                assessment_data = assessments.get(action_id, {})
                telemetry = telemetry_from_payload(assessment_data.get("telemetry"))
                profile = self._resolve_profile(proposal)
                assessment = assess(
                    proposal, profile, telemetry, self.policy.escalation
                )
                record = ActionRecord(proposal, "", telemetry, assessment)
                record.approved = decisions.get(action_id) == "approve"
                self._actions[action_id] = record

                level = assessment_data.get("level")
                decision = decisions.get(action_id)
                if action_id in executed:
                    self._force_status(chain_id, action_id, Status.COMPLETED)
                elif level == "blocked" or decision == "reject":
                    self.executor.block(chain_id, action_id)
                elif level == "pre_execution_approval" and decision is None:
                    self.executor.hold(chain_id, action_id)
                    self._pending[action_id] = PendingApproval(
                        action=proposal,
                        assessment=assessment,
                        chain_id=chain_id,
                        held_at=self.clock(),
                    )

            # Promote consumers of completed producers.
            for chain_id in chain_actions:
                dag = self.executor.chain(chain_id)
                for node_id in dag.nodes:
                    if dag.status[node_id] is Status.PENDING and all(
                        dag.status[p] is Status.COMPLETED
                        for p in dag.producers(node_id)
                    ):
                        dag.status[node_id] = Status.READY

    def _force_status(self, chain_id: str, action_id: str, status: Status) -> None:
        self.executor.chain(chain_id).status[action_id] = status


def _proposal_from_payload(payload: dict) -> ActionProposal:
    from ..privilege import scopes_from_payload

    return ActionProposal(
        id=payload["action_id"],
        chain_id=payload["chain_id"],
        decision_type_id=payload["decision_type_id"],
        initiator=Initiator(payload.get("initiator", "agent_initiated")),
        input_trust=TrustLevel(payload.get("input_trust", "trusted")),
        targets=frozenset(payload.get("targets", [])),
        requested_scopes=scopes_from_payload(payload.get("requested_scopes", {})),
        parameters_digest=payload.get("parameters_digest", ""),
        affected_parties=tuple(
            party_from_payload(p) for p in payload.get("affected_parties", [])
        ),
    )
