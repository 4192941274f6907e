"""Policy bundle parsing and validation."""

import json

import pytest

from agentgate.policy import GatewayConfig, PolicyError, load_policy, parse_policy
from agentgate.simulator import load_scenario


@pytest.fixture
def policy_data():
    return load_scenario("email_assistant")["policy"]


def test_parse_bundled_policy(policy_data):
    bundle = parse_policy(policy_data)
    assert "summarize_inbox" in bundle.ontology
    assert set(bundle.tools) == {"mailbox", "mail_sender"}
    assert "user-1" in bundle.users
    assert bundle.escalation.confidence_floor == 0.7
    assert len(bundle.version) == 64


def test_version_tracks_content(policy_data):
    base = parse_policy(policy_data).version
    changed = json.loads(json.dumps(policy_data))
    changed["escalation"]["confidence_floor"] = 0.9
    assert parse_policy(changed).version != base


def test_missing_ontology_rejected():
    with pytest.raises(PolicyError):
        parse_policy({"tools": []})


def test_incomplete_domain_defaults_rejected(policy_data):
    broken = json.loads(json.dumps(policy_data))
    del broken["ontology"]["nodes"][0]["attributes"]["stakeholder"]
    with pytest.raises(PolicyError):
        parse_policy(broken)


def test_duplicate_tool_rejected(policy_data):
    broken = json.loads(json.dumps(policy_data))
    broken["tools"].append(broken["tools"][0])
    with pytest.raises(PolicyError):
        parse_policy(broken)


def test_invalid_escalation_rejected(policy_data):
    broken = json.loads(json.dumps(policy_data))
    broken["escalation"]["confidence_floor"] = 3.0
    with pytest.raises(PolicyError):
        parse_policy(broken)


def test_baseline_parsed_with_defaults(policy_data):
    with_baseline = json.loads(json.dumps(policy_data))
    with_baseline["baseline"] = {
        "metrics": {"approval_rate": {"reference": 1.0, "band": 0.1}},
        "compliance_metrics": ["approval_rate"],
    }
    bundle = parse_policy(with_baseline)
    assert bundle.baseline is not None
    assert bundle.baseline.tool_catalog_digest == bundle.catalog_digest()
    assert bundle.baseline.policy_binding_version == bundle.version


def test_load_policy_file(tmp_path, policy_data):
    path = tmp_path / "policy.json"
    path.write_text(json.dumps(policy_data))
    bundle = load_policy(path)
    assert len(bundle.ontology) == 4
    with pytest.raises(PolicyError):
        load_policy(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(PolicyError):
        load_policy(bad)


def test_config_validation(tmp_path):
    with pytest.raises(PolicyError):
        GatewayConfig(approval_timeout_mode="expire_to_reject")
    config = GatewayConfig(
        approval_timeout_mode="expire_to_reject", approval_timeout_seconds=30
    )
    assert config.approval_timeout_seconds == 30


def test_config_env_overrides(tmp_path, monkeypatch):
    from agentgate.policy import load_config

    path = tmp_path / "config.json"
    path.write_text(json.dumps({"listen_port": 9000, "ledger_dir": "original"}))
    monkeypatch.setenv("AGENTGATE_LISTEN", "0.0.0.0:7777")
    monkeypatch.setenv("AGENTGATE_LEDGER_DIR", "/tmp/override")
    config = load_config(path)
    assert config.listen_host == "0.0.0.0"
    assert config.listen_port == 7777
    assert config.ledger_dir == "/tmp/override"


def test_unknown_config_keys_rejected(tmp_path):
    from agentgate.policy import load_config

    path = tmp_path / "config.json"
    path.write_text(json.dumps({"listen_protocol": "h2"}))
    with pytest.raises(PolicyError):
        load_config(path)
