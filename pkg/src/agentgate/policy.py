"""Declarative policy bundle: ontology, escalation thresholds, tool catalog,
user grants, and the conformity baseline, loaded from one JSON document and
versioned by content hash.

Schema (all sections except ``ontology`` optional):

    {
      "ontology": {"nodes": [{"id", "level", "parent"?, "attributes"?}]},
      "escalation": {"confidence_floor", "threshold_band", "drift_ceiling"},
      "tools": [<tool descriptor>],
      "users": [{"user_id", "scopes": {resource: [verbs]}, "expires_at"?}],
      "strict_decision_types": ["decision_type_id", ...],
      "baseline": {
        "metrics": {name: {"reference", "band"}},
        "compliance_metrics": [name, ...],
        "foreseen_changes": [{"kind", "target", "description"?}],
        "memory_envelope_bytes"?: int
      }
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .canonical import digest
from .drift import BehavioralBaseline, ForeseenChange, ForeseenKind, MetricBand
from .ontology import Ontology, OntologyError, node_from_payload
from .privilege import UserGrant, scopes_from_payload
from .risk import EscalationPolicy, MalformedPolicy
from .triggers import ProfileError, ToolDescriptor, tool_from_payload, tool_payload


class PolicyError(Exception):
    """Raised when the policy document violates the documented schema."""


@dataclass
class PolicyBundle:
    ontology: Ontology
    escalation: EscalationPolicy
    tools: dict[str, ToolDescriptor]
    users: dict[str, UserGrant]
    baseline: BehavioralBaseline | None
    strict_decision_types: frozenset[str]
    version: str  # content hash of the policy document

    def catalog_digest(self) -> str:
        return digest([tool_payload(t) for _, t in sorted(self.tools.items())])


def load_policy(path: str | Path) -> PolicyBundle:
    try:
        raw = Path(path).read_text(encoding="utf-8")
        data = json.loads(raw)
    except OSError as exc:
        raise PolicyError(f"cannot read policy file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise PolicyError(f"policy file is not valid JSON: {exc}") from exc
    return parse_policy(data)


def parse_policy(data: Mapping) -> PolicyBundle:
    if not isinstance(data, Mapping):
        raise PolicyError("policy document must be an object")
    version = digest(data)

    ontology_section = data.get("ontology")
    if not isinstance(ontology_section, Mapping) or "nodes" not in ontology_section:
        raise PolicyError("policy requires an 'ontology' section with 'nodes'")
    ontology = Ontology()
    try:
        for node_data in ontology_section["nodes"]:
            ontology.add_node(node_from_payload(node_data))
        ontology.validate_root_defaults()
    except OntologyError as exc:
        raise PolicyError(f"invalid ontology: {exc}") from exc

    escalation_data = data.get("escalation", {})
    try:
        escalation = EscalationPolicy(
            confidence_floor=float(escalation_data.get("confidence_floor", 0.7)),
            threshold_band=float(escalation_data.get("threshold_band", 0.1)),
            drift_ceiling=float(escalation_data.get("drift_ceiling", 3.0)),
        )
        escalation.validate()
    except (TypeError, ValueError, MalformedPolicy) as exc:
        raise PolicyError(f"invalid escalation policy: {exc}") from exc

    tools: dict[str, ToolDescriptor] = {}
    try:
        for tool_data in data.get("tools", ()):
            tool = tool_from_payload(tool_data)
            if tool.id in tools:
                raise PolicyError(f"duplicate tool id {tool.id!r}")
            tools[tool.id] = tool
    except ProfileError as exc:
        raise PolicyError(str(exc)) from exc

    users: dict[str, UserGrant] = {}
    for user_data in data.get("users", ()):
        try:
            grant = UserGrant(
                user_id=str(user_data["user_id"]),
                scopes=scopes_from_payload(user_data.get("scopes", {})),
                expires_at=user_data.get("expires_at"),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise PolicyError(f"invalid user grant: {exc}") from exc
        users[grant.user_id] = grant

    baseline = None
    baseline_data = data.get("baseline")
    if baseline_data is not None:
        baseline = _parse_baseline(
            baseline_data,
            catalog_digest=digest([tool_payload(t) for _, t in sorted(tools.items())]),
            policy_version=version,
        )

    return PolicyBundle(
        ontology=ontology,
        escalation=escalation,
        tools=tools,
        users=users,
        baseline=baseline,
        strict_decision_types=frozenset(data.get("strict_decision_types", ())),
        version=version,
    )


def _parse_baseline(
    data: Mapping, *, catalog_digest: str, policy_version: str
) -> BehavioralBaseline:
    try:
        metrics = {
            str(name): MetricBand(float(spec["reference"]), float(spec["band"]))
            for name, spec in data.get("metrics", {}).items()
        }
        foreseen = tuple(
            ForeseenChange(
                kind=ForeseenKind(item["kind"]),
                target=str(item["target"]),
                description=str(item.get("description", "")),
            )
            for item in data.get("foreseen_changes", ())
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise PolicyError(f"invalid baseline: {exc}") from exc
    return BehavioralBaseline(
        metrics=metrics,
        foreseen_changes=foreseen,
        compliance_metrics=frozenset(data.get("compliance_metrics", ())),
        tool_catalog_digest=data.get("tool_catalog_digest", catalog_digest),
        policy_binding_version=data.get("policy_binding_version", policy_version),
        memory_envelope_bytes=data.get("memory_envelope_bytes"),
    )


@dataclass(frozen=True)
class GatewayConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8400
    policy_path: str = "policy.json"
    ledger_dir: str = "ledger"
    snapshot_every_actions: int = 1000
    snapshot_every_hours: float = 24.0
    strict_privilege_mode: bool = False
    approval_timeout_mode: str = "hold_indefinitely"  # or "expire_to_reject"
    approval_timeout_seconds: float | None = None
    credential_ttl_seconds: float = 300.0
    # Static bearer-token role map: token -> "agent" | "approver" | "auditor".
    # Empty map runs the gateway open, for development and tests.
    auth_tokens: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.approval_timeout_mode not in ("hold_indefinitely", "expire_to_reject"):
            raise PolicyError(
                f"unknown approval timeout mode {self.approval_timeout_mode!r}"
            )
        if self.approval_timeout_mode == "expire_to_reject" and (
            self.approval_timeout_seconds is None or self.approval_timeout_seconds <= 0
        ):
            raise PolicyError("expire_to_reject requires a positive timeout")


def load_config(path: str | Path) -> GatewayConfig:
    import os

    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise PolicyError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise PolicyError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(data, Mapping):
        raise PolicyError("config must be an object")
    known = {
        "listen_host",
        "listen_port",
        "policy_path",
        "ledger_dir",
        "snapshot_every_actions",
        "snapshot_every_hours",
        "strict_privilege_mode",
        "approval_timeout_mode",
        "approval_timeout_seconds",
        "credential_ttl_seconds",
        "auth_tokens",
    }
    unknown = set(data) - known
    if unknown:
        raise PolicyError(f"unknown config keys: {sorted(unknown)}")
    merged = dict(data)
    # Environment overrides for deploy-time relocation.
    if "AGENTGATE_LISTEN" in os.environ:
        host, _, port = os.environ["AGENTGATE_LISTEN"].rpartition(":")
        merged["listen_host"] = host or merged.get("listen_host", "127.0.0.1")
        merged["listen_port"] = int(port)
    if "AGENTGATE_LEDGER_DIR" in os.environ:
        merged["ledger_dir"] = os.environ["AGENTGATE_LEDGER_DIR"]
    return GatewayConfig(**merged)
