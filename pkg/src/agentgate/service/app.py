"""FastAPI application wrapping the gateway core.

Role model: three static roles resolved from bearer tokens in the config.
``agent`` drives chains and execution, ``approver`` decides and watches the
stream, ``auditor`` reads the ledger and drift reports. An empty token map
runs the gateway open, which is the development and test mode.
"""

from __future__ import annotations

import json
from typing import Iterator

from fastapi import Depends, FastAPI, Header, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, StreamingResponse

from .. import chains as chains_mod
from ..canonical import canonical_json
from ..chains import Decision, envelope_estimate
from ..drift import determination_payload, report_payload, snapshot_payload
from ..ledger import UnknownAction
from ..privilege import scope_payload
from ..triggers import (
    ProfileError,
    build_regulatory_map,
    checklist_payload,
    generate_checklist,
    map_payload,
    profile_from_payload,
    tool_from_payload,
)
from .core import GatewayCore, GatewayError, PipelineResult
from .schemas import (
    ActionIn,
    ActionResultOut,
    AssessmentOut,
    ChainIn,
    ChainOut,
    CredentialOut,
    DecisionIn,
    DecisionOut,
    DisclosureIn,
    EvidenceOut,
    OutcomeIn,
    SnapshotIn,
    StartIn,
    ToolIn,
    VerifyOut,
)

ROLE_AGENT = "agent"
ROLE_APPROVER = "approver"
ROLE_AUDITOR = "auditor"


def _result_out(result: PipelineResult) -> ActionResultOut:
    credential = None
    if result.credential is not None:
        credential = CredentialOut(
            credential_id=result.credential.credential_id,
            action_id=result.credential.action_id,
            scopes=scope_payload(result.credential.effective_scopes),
            issued_at=result.credential.issued_at,
            ttl_seconds=result.credential.ttl_seconds,
            trust_downgraded=result.credential.trust_downgraded,
        )
    denial = None
    if result.denial is not None:
        denial = {"reason": result.denial.reason.value, "detail": result.denial.detail}
    a = result.assessment
    return ActionResultOut(
        action_id=result.action_id,
        chain_id=result.chain_id,
        status=result.status.value,
        assessment=AssessmentOut(
            action_id=a.action_id,
            level=a.level.wire,
            stakeholder=a.stakeholder,
            reasons=list(a.reasons),
            rule_of_two_violation=a.rule_of_two_violation,
            consequences_of_inaction=a.consequences_of_inaction,
        ),
        credential=credential,
        denial=denial,
        suspended=sorted(result.suspended),
    )


def create_app(core: GatewayCore) -> FastAPI:
    app = FastAPI(title="agentgate", version="0.1.0")
    app.state.core = core

    def require_role(*roles: str):
        def dependency(authorization: str | None = Header(default=None)) -> str:
            tokens = core.config.auth_tokens
            if not tokens:
                return roles[0] if roles else ROLE_AGENT
            if not authorization or not authorization.startswith("Bearer "):
                raise GatewayError("missing bearer token", 401)
            role = tokens.get(authorization.removeprefix("Bearer ").strip())
            if role is None:
                raise GatewayError("unknown token", 401)
            if roles and role not in roles:
                raise GatewayError(f"role {role!r} cannot call this endpoint", 403)
            return role

        return Depends(dependency)

    @app.exception_handler(GatewayError)
    async def gateway_error_handler(request: Request, exc: GatewayError):
        return JSONResponse({"error": str(exc)}, status_code=exc.status_code)

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(request: Request, exc: RequestValidationError):
        return JSONResponse({"error": "malformed request", "detail": exc.errors()}, status_code=400)

    @app.exception_handler(chains_mod.ChainError)
    async def chain_error_handler(request: Request, exc: chains_mod.ChainError):
        mapping = {
            chains_mod.UnknownChain: 404,
            chains_mod.UnknownNode: 404,
            chains_mod.NotHeld: 409,
            chains_mod.AlreadyTerminal: 409,
            chains_mod.InvalidTransition: 409,
            chains_mod.DuplicateActionId: 409,
            chains_mod.DanglingEdge: 400,
            chains_mod.CycleDetected: 400,
        }
        status = next(
            (code for cls, code in mapping.items() if isinstance(exc, cls)), 400
        )
        return JSONResponse({"error": str(exc)}, status_code=status)

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "ledger_entries": len(core.ledger)}

    # -- chains / actions ----------------------------------------------------

    @app.post("/v1/chains", response_model=ChainOut, status_code=201)
    def submit_chain(chain: ChainIn, role: str = require_role(ROLE_AGENT)):
        edges = list(chain.edges)
        for action in chain.actions:
            for producer in action.producers:
                edges.append((producer, action.id))
        actions = [
            (
                a.to_domain(chain.chain_id),
                a.user_id,
                a.telemetry.to_domain() if a.telemetry else None,
            )
            for a in chain.actions
        ]
        results = core.submit_chain(chain.chain_id, actions, edges)
        return ChainOut(
            chain_id=chain.chain_id,
            results=[_result_out(r) for r in results],
            statuses={
                k: v.value for k, v in core.executor.statuses(chain.chain_id).items()
            },
        )

    @app.post("/v1/chains/{chain_id}/actions", response_model=ActionResultOut)
    def propose_action(
        chain_id: str,
        action: ActionIn,
        response: Response,
        role: str = require_role(ROLE_AGENT),
    ):
        result = core.propose_action(
            chain_id,
            action.to_domain(chain_id),
            action.user_id,
            action.telemetry.to_domain() if action.telemetry else None,
            action.producers,
        )
        if result.status is chains_mod.Status.HELD:
            response.status_code = 202
        return _result_out(result)

    @app.get("/v1/chains/{chain_id}")
    def chain_state(
        chain_id: str, role: str = require_role(ROLE_AGENT, ROLE_APPROVER, ROLE_AUDITOR)
    ):
        return core.chain_state(chain_id)

    @app.get("/v1/chains/{chain_id}/ready")
    def chain_ready(chain_id: str, role: str = require_role(ROLE_AGENT)):
        return {"ready": sorted(core.executor.next_ready(chain_id))}

    @app.post("/v1/actions/{action_id}/start")
    def start_action(
        action_id: str, body: StartIn, role: str = require_role(ROLE_AGENT)
    ):
        core.start_action(action_id, body.credential_id)
        return {"action_id": action_id, "status": "executing"}

    @app.post("/v1/actions/{action_id}/complete")
    def complete_action(
        action_id: str, body: OutcomeIn, role: str = require_role(ROLE_AGENT)
    ):
        newly_ready = core.complete_action(action_id, body.outcome, body.result_digest)
        return {"action_id": action_id, "newly_ready": sorted(newly_ready)}

    @app.post("/v1/actions/{action_id}/interrupt")
    def interrupt_action(
        action_id: str, role: str = require_role(ROLE_APPROVER)
    ):
        suspended = core.interrupt(action_id)
        return {"action_id": action_id, "suspended": sorted(suspended)}

    @app.post("/v1/actions/{action_id}/disclosures")
    def record_disclosure(
        action_id: str, body: DisclosureIn, role: str = require_role(ROLE_AGENT)
    ):
        entry = core.record_disclosure(action_id, body.party_ref)
        return {"action_id": action_id, "seq": entry.seq}

    @app.get("/v1/actions/{action_id}/evidence", response_model=EvidenceOut)
    def evidence(
        action_id: str, role: str = require_role(ROLE_AUDITOR, ROLE_APPROVER)
    ):
        try:
            chain = core.ledger.evidentiary_chain(action_id)
        except UnknownAction:
            raise GatewayError(f"unknown action {action_id!r}", 404) from None
        return EvidenceOut(
            action_id=action_id,
            complete=chain.complete,
            missing=list(chain.missing),
            entries=[
                {
                    "seq": e.seq,
                    "kind": e.payload_kind.value,
                    "timestamp": e.timestamp,
                    "payload": e.payload,
                }
                for e in chain.entries
            ],
        )

    # -- approvals -------------------------------------------------------------

    @app.get("/v1/approvals")
    def approvals(role: str = require_role(ROLE_APPROVER)):
        return {"pending": [p.to_payload() for p in core.pending_approvals()]}

    @app.post("/v1/approvals/{action_id}", response_model=DecisionOut)
    def decide(
        action_id: str,
        body: DecisionIn,
        idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
        role: str = require_role(ROLE_APPROVER),
    ):
        outcome = core.decide(
            action_id,
            Decision(body.decision),
            body.rationale,
            body.approver,
            idempotency_key,
        )
        return DecisionOut(
            action_id=outcome.action_id,
            decision=outcome.decision.value,
            released=sorted(outcome.released),
            cancelled=sorted(outcome.cancelled),
            re_evaluated=sorted(outcome.re_evaluated),
            statuses={k: v.value for k, v in outcome.statuses.items()},
            replayed=outcome.replayed,
        )

    # -- stream -------------------------------------------------------------------

    @app.get("/v1/stream")
    def stream(
        cursor: int = Query(default=-1),
        max_events: int | None = Query(default=None),
        poll_seconds: float = Query(default=0.5),
        role: str = require_role(ROLE_APPROVER, ROLE_AUDITOR),
    ):
        def event_source() -> Iterator[str]:
            sent = 0
            subscription = core.bus.subscribe()
            try:
                last_seq = cursor
                for entry in core.ledger.entries(start=max(cursor + 1, 0)):
                    payload = {
                        "seq": entry.seq,
                        "kind": entry.payload_kind.value,
                        "initiator": entry.initiator_class.value,
                        "timestamp": entry.timestamp,
                        "payload": entry.payload,
                    }
                    yield f"id: {entry.seq}\ndata: {canonical_json(payload)}\n\n"
                    last_seq = entry.seq
                    sent += 1
                    if max_events is not None and sent >= max_events:
                        return
                while True:
                    event = subscription.get(timeout=poll_seconds)
                    if event is None:
                        if max_events is not None:
                            return  # bounded reads stop at quiescence
                        yield ": keepalive\n\n"
                        continue
                    if event.seq <= last_seq:
                        continue
                    yield f"id: {event.seq}\ndata: {canonical_json(event.to_payload())}\n\n"
                    last_seq = event.seq
                    sent += 1
                    if max_events is not None and sent >= max_events:
                        return
            finally:
                core.bus.unsubscribe(subscription)

        return StreamingResponse(event_source(), media_type="text/event-stream")

    # -- ledger ----------------------------------------------------------------------

    @app.get("/v1/ledger/entries")
    def ledger_entries(
        start: int = Query(default=0, ge=0),
        end: int | None = Query(default=None),
        role: str = require_role(ROLE_AUDITOR, ROLE_APPROVER),
    ):
        return {
            "entries": [
                {
                    "seq": e.seq,
                    "kind": e.payload_kind.value,
                    "initiator": e.initiator_class.value,
                    "timestamp": e.timestamp,
                    "prev_hash": e.prev_hash,
                    "entry_hash": e.entry_hash,
                    "payload": e.payload,
                }
                for e in core.ledger.entries(start, end)
            ]
        }

    @app.get("/v1/ledger/verify", response_model=VerifyOut)
    def ledger_verify(
        start: int = Query(default=0, ge=0),
        end: int | None = Query(default=None),
        role: str = require_role(ROLE_AUDITOR, ROLE_APPROVER),
    ):
        if len(core.ledger) == 0:
            return VerifyOut(ok=True, first_bad_seq=None, entries=0)
        result = core.ledger.verify_chain(start, end)
        return VerifyOut(
            ok=result.ok,
            first_bad_seq=result.first_bad_seq,
            detail=result.detail,
            entries=len(core.ledger),
        )

    # -- drift ------------------------------------------------------------------------

    @app.post("/v1/drift/snapshot")
    def take_snapshot(body: SnapshotIn, role: str = require_role(ROLE_AUDITOR)):
        outcome = core.take_snapshot(body.memory_export, body.deployment_event)
        return {
            "snapshot": snapshot_payload(outcome.snapshot),
            "report": report_payload(outcome.report) if outcome.report else None,
            "determination": (
                determination_payload(outcome.determination)
                if outcome.determination
                else None
            ),
        }

    @app.get("/v1/drift/reports")
    def drift_reports(role: str = require_role(ROLE_AUDITOR, ROLE_APPROVER)):
        return {
            "reports": [
                {
                    "snapshot": snapshot_payload(o.snapshot),
                    "report": report_payload(o.report) if o.report else None,
                    "determination": (
                        determination_payload(o.determination)
                        if o.determination
                        else None
                    ),
                }
                for o in core.drift_outcomes()
            ]
        }

    @app.post("/v1/tools", status_code=201)
    def add_tool(tool: ToolIn, role: str = require_role(ROLE_APPROVER)):
        try:
            descriptor = tool_from_payload(tool.model_dump())
        except ProfileError as exc:
            raise GatewayError(str(exc), 400) from exc
        core.add_tool(descriptor)
        return {"id": descriptor.id, "catalog_size": len(core.catalog)}

    # -- static compliance analysis ------------------------------------------------------

    @app.post("/v1/regulatory/map")
    def regulatory_map(profile: dict, role: str = require_role(ROLE_AUDITOR, ROLE_AGENT)):
        try:
            parsed = profile_from_payload(profile)
        except ProfileError as exc:
            raise GatewayError(str(exc), 422) from exc
        return map_payload(build_regulatory_map(parsed))

    @app.post("/v1/regulatory/checklist")
    def regulatory_checklist(
        profile: dict, role: str = require_role(ROLE_AUDITOR, ROLE_AGENT)
    ):
        try:
            parsed = profile_from_payload(profile)
        except ProfileError as exc:
            raise GatewayError(str(exc), 422) from exc
        return checklist_payload(generate_checklist(parsed))

    @app.get("/v1/envelope")
    def envelope(
        tools: int = Query(ge=1),
        depth: int = Query(ge=0),
        budget: int = Query(default=10**9, ge=1),
        role: str = require_role(ROLE_AUDITOR, ROLE_AGENT),
    ):
        estimate = envelope_estimate(tools, depth, budget)
        return {
            "tool_count": estimate.tool_count,
            "depth": estimate.depth,
            "paths": str(estimate.paths),  # may exceed JSON-safe integers
            "saturated": estimate.saturated,
            "budget": estimate.budget,
        }

    @app.get("/v1/policy")
    def policy_summary(role: str = require_role(ROLE_AUDITOR, ROLE_APPROVER, ROLE_AGENT)):
        return {
            "version": core.policy.version,
            "ontology_nodes": len(core.policy.ontology),
            "tools": sorted(core.catalog),
            "escalation": {
                "confidence_floor": core.policy.escalation.confidence_floor,
                "threshold_band": core.policy.escalation.threshold_band,
                "drift_ceiling": core.policy.escalation.drift_ceiling,
            },
            "drift_floor": core.drift_floor,
            "approval_timeout": {
                "mode": core.config.approval_timeout_mode,
                "seconds": core.config.approval_timeout_seconds,
            },
        }

    return app
