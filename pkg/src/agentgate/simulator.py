"""Scripted agent simulator: drives an in-process gateway end to end.

A scenario file is one JSON document: a policy bundle, an ordered list of
steps (submit chains, run ready work, decide approvals, take snapshots,
mutate the tool catalog, tamper with ledger bytes, advance the clock), and
assertions checked inline or at the end. Runs are deterministic for a given
seed: the clock is manual and credential identifiers derive from the seeded
generator, so two runs of the same script produce byte-identical ledgers.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from .chains import Decision
from .ledger import PayloadKind
from .policy import GatewayConfig, parse_policy
from .privilege import scope_payload
from .risk import OversightLevel, Telemetry, telemetry_from_payload
from .service.core import GatewayCore
from .service.schemas import ActionIn
from .triggers import tool_from_payload

SIM_EPOCH = 1_700_000_000.0


class ManualClock:
    def __init__(self, start: float = SIM_EPOCH) -> None:
        self.now = start

    def __call__(self) -> float:
        return self.now

    def advance(self, seconds: float) -> None:
        self.now += seconds


@dataclass
class CheckResult:
    description: str
    passed: bool
    detail: str = ""


@dataclass
class SimReport:
    name: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, description: str, passed: bool, detail: str = "") -> None:
        self.checks.append(CheckResult(description, passed, detail))


def bundled_scenario_names() -> list[str]:
    root = resources.files("agentgate").joinpath("scenarios")
    return sorted(
        p.name.removesuffix(".json")
        for p in root.iterdir()
        if p.name.endswith(".json")
    )


def load_scenario(name_or_path: str) -> dict:
    path = Path(name_or_path)
    if path.exists():
        return json.loads(path.read_text(encoding="utf-8"))
    candidate = resources.files("agentgate").joinpath(
        "scenarios", f"{name_or_path.replace('-', '_')}.json"
    )
    if candidate.is_file():
        return json.loads(candidate.read_text(encoding="utf-8"))
    raise FileNotFoundError(
        f"no scenario file or bundled scenario named {name_or_path!r}"
    )


class SimulatorRunner:
    def __init__(self, script: dict, workdir: str | Path) -> None:
        self.script = script
        self.workdir = Path(workdir)
        self.clock = ManualClock()
        seed = int(script.get("seed", 0))
        self.rng = random.Random(seed)
        policy = parse_policy(script["policy"])
        config = GatewayConfig(
            ledger_dir=str(self.workdir / "ledger"),
            **script.get("config", {}),
        )
        self.core = GatewayCore(policy, config, clock=self.clock, rng=self.rng)
        self.report = SimReport(script.get("name", "scenario"))
        self.default_telemetry: Telemetry | None = None

    # -- step dispatch -------------------------------------------------------

    def run(self) -> SimReport:
        for index, step in enumerate(self.script.get("steps", [])):
            op = step.get("op")
            handler = getattr(self, f"_op_{op}", None)
            if handler is None:
                raise ValueError(f"step {index}: unknown op {op!r}")
            handler(step)
        for assertion in self.script.get("assertions", []):
            self._check(assertion)
        return self.report

    def _op_submit_chain(self, step: dict) -> None:
        chain = step["chain"]
        edges = [tuple(e) for e in chain.get("edges", [])]
        actions = []
        for raw in chain["actions"]:
            action_in = ActionIn(**raw)
            for producer in action_in.producers:
                edges.append((producer, action_in.id))
            telemetry = (
                action_in.telemetry.to_domain()
                if action_in.telemetry
                else self.default_telemetry
            )
            actions.append(
                (action_in.to_domain(chain["chain_id"]), action_in.user_id, telemetry)
            )
        self.core.submit_chain(chain["chain_id"], actions, edges)

    def _op_propose(self, step: dict) -> None:
        action_in = ActionIn(**step["action"])
        telemetry = (
            action_in.telemetry.to_domain()
            if action_in.telemetry
            else self.default_telemetry
        )
        self.core.propose_action(
            step["chain_id"],
            action_in.to_domain(step["chain_id"]),
            action_in.user_id,
            telemetry,
            action_in.producers,
        )

    def _op_inject_telemetry(self, step: dict) -> None:
        self.default_telemetry = telemetry_from_payload(step.get("telemetry", {}))

    def _op_advance_clock(self, step: dict) -> None:
        self.clock.advance(float(step.get("seconds", 1.0)))

    def _op_run_ready(self, step: dict) -> None:
        """Start and complete every ready action, repeatedly, in id order."""
        limit = int(step.get("max_rounds", 100))
        for _ in range(limit):
            progressed = False
            for chain_id in list(self.core.executor.chain_ids()):
                for action_id in sorted(self.core.executor.next_ready(chain_id)):
                    self.core.start_action(action_id)
                    self.clock.advance(1.0)
                    self.core.complete_action(action_id, "success")
                    progressed = True
            if not progressed:
                return

    def _op_decide(self, step: dict) -> None:
        self.core.decide(
            step["action_id"],
            Decision(step["decision"]),
            step.get("rationale", ""),
            step.get("approver", "sim-approver"),
            step.get("idempotency_key"),
        )

    def _op_record_disclosure(self, step: dict) -> None:
        self.core.record_disclosure(step["action_id"], step["party_ref"])

    def _op_add_tool(self, step: dict) -> None:
        self.core.add_tool(tool_from_payload(step["tool"]))

    def _op_take_snapshot(self, step: dict) -> None:
        self.core.take_snapshot(
            step.get("memory_export"), bool(step.get("deployment_event", False))
        )

    def _op_interrupt(self, step: dict) -> None:
        self.core.interrupt(step["action_id"])

    def _op_tamper(self, step: dict) -> None:
        """Flip one byte inside the persisted record body for a given seq."""
        seq = int(step["seq"])
        segment_size = self.core.ledger.segment_size
        path = self.core.ledger._segment_path((seq // segment_size) * segment_size)
        raw = path.read_bytes()
        lines = raw.split(b"\n")
        index = 1 + (seq % segment_size)  # header line first
        line = lines[index]
        prefix, body = line.split(b" ", 1)
        offset = self.rng.randrange(len(body))
        mutated = bytes([body[offset] ^ 0x01])
        lines[index] = prefix + b" " + body[:offset] + mutated + body[offset + 1 :]
        path.write_bytes(b"\n".join(lines))

    def _op_assert(self, step: dict) -> None:
        self._check(step)

    # -- assertions --------------------------------------------------------------

    def _check(self, spec: dict) -> None:
        kind = spec.get("assert") or spec.get("check")
        handler = getattr(self, f"_assert_{kind}", None)
        if handler is None:
            raise ValueError(f"unknown assertion {kind!r}")
        handler(spec)

    def _assert_level(self, spec: dict) -> None:
        record = self.core.action_record(spec["action_id"])
        level = record.assessment.level
        if "equals" in spec:
            expected = OversightLevel[spec["equals"].upper()]
            self.report.add(
                f"level of {spec['action_id']} is {spec['equals']}",
                level is expected,
                f"got {level.wire}",
            )
        if "at_least" in spec:
            floor = OversightLevel[spec["at_least"].upper()]
            self.report.add(
                f"level of {spec['action_id']} at least {spec['at_least']}",
                level >= floor,
                f"got {level.wire}",
            )

    def _assert_status(self, spec: dict) -> None:
        chain_id = self.core.action_record(spec["action_id"]).proposal.chain_id
        status = self.core.executor.statuses(chain_id)[spec["action_id"]]
        self.report.add(
            f"status of {spec['action_id']} is {spec['equals']}",
            status.value == spec["equals"],
            f"got {status.value}",
        )

    def _assert_credential_scopes(self, spec: dict) -> None:
        record = self.core.action_record(spec["action_id"])
        if record.credential is None:
            self.report.add(
                f"credential scopes of {spec['action_id']}", False, "no credential"
            )
            return
        scopes = scope_payload(record.credential.effective_scopes)
        actual = scopes.get(spec["resource"], [])
        expected = sorted(spec["verbs"])
        self.report.add(
            f"credential of {spec['action_id']} grants {spec['resource']}:{expected}",
            actual == expected,
            f"got {actual}",
        )

    def _assert_credential_trust_downgraded(self, spec: dict) -> None:
        record = self.core.action_record(spec["action_id"])
        value = record.credential.trust_downgraded if record.credential else None
        self.report.add(
            f"trust_downgraded of {spec['action_id']} is {spec['equals']}",
            value == spec["equals"],
            f"got {value}",
        )

    def _assert_evidence_complete(self, spec: dict) -> None:
        chain = self.core.ledger.evidentiary_chain(spec["action_id"])
        ok = chain.complete
        detail = f"missing={list(chain.missing)}"
        if "core_entries" in spec:
            core_entries = [
                e
                for e in chain.entries
                if e.payload_kind is not PayloadKind.DISCLOSURE
            ]
            ok = ok and len(core_entries) == int(spec["core_entries"])
            detail += f", core_entries={len(core_entries)}"
        self.report.add(
            f"evidentiary chain of {spec['action_id']} complete", ok, detail
        )

    def _assert_disclosure_recorded(self, spec: dict) -> None:
        entries = self.core.ledger.entries_for_action(spec["action_id"])
        found = any(
            e.payload_kind is PayloadKind.DISCLOSURE
            and e.payload.get("party_ref") == spec["party_ref"]
            for e in entries
        )
        self.report.add(
            f"disclosure to {spec['party_ref']} recorded for {spec['action_id']}",
            found,
        )

    def _assert_ledger_verify(self, spec: dict) -> None:
        result = self.core.ledger.verify_chain()
        ok = result.ok == spec["ok"]
        if "first_bad_seq" in spec:
            ok = ok and result.first_bad_seq == spec["first_bad_seq"]
        self.report.add(
            f"ledger verification ok={spec['ok']}"
            + (f" at seq {spec['first_bad_seq']}" if "first_bad_seq" in spec else ""),
            ok,
            f"got ok={result.ok} first_bad={result.first_bad_seq}",
        )

    def _assert_drift_verdict(self, spec: dict) -> None:
        outcomes = self.core.drift_outcomes()
        index = int(spec.get("snapshot_index", -1))
        if not outcomes or outcomes[index].determination is None:
            self.report.add("drift verdict available", False, "no determination")
            return
        verdict = outcomes[index].determination.verdict.value
        self.report.add(
            f"drift verdict is {spec['equals']}",
            verdict == spec["equals"],
            f"got {verdict}",
        )

    def _assert_ledger_contains(self, spec: dict) -> None:
        kind = PayloadKind(spec["kind"])
        found = any(
            e.payload_kind is kind for e in self.core.ledger.entries()
        )
        self.report.add(f"ledger contains a {spec['kind']} entry", found)


def run_scenario(name_or_path: str, workdir: str | Path) -> SimReport:
    script = load_scenario(name_or_path)
    return SimulatorRunner(script, workdir).run()
