"""Command-line interface.

``serve`` runs the HTTP gateway; ``map`` and ``checklist`` analyze an agent
profile file locally or against a running gateway (``--server``);
``verify-ledger`` re-checks a persisted ledger's hash chain;
``simulate`` runs a scripted scenario end to end against an in-process
gateway. Exit codes: 2 for schema violations, 1 for failed verification or
failed scenario assertions.
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

import click

from .chains import envelope_estimate
from .impact_matrix import impact_matrix_row
from .ledger import OversightLedger, StorageFailure
from .policy import PolicyError, load_config, load_policy
from .simulator import bundled_scenario_names, run_scenario
from .triggers import (
    AgentCategory,
    ProfileError,
    UnknownCategory,
    build_regulatory_map,
    checklist_payload,
    generate_checklist,
    map_payload,
    profile_from_payload,
)


@click.group()
def main() -> None:
    """Runtime governance gateway for tool-using agents."""


def _load_profile(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: cannot read profile: {exc}", err=True)
        sys.exit(2)


def _remote_post(server: str, endpoint: str, payload: dict) -> dict:
    import httpx

    response = httpx.post(f"{server.rstrip('/')}{endpoint}", json=payload, timeout=30)
    if response.status_code >= 400:
        click.echo(f"error: server returned {response.status_code}: {response.text}", err=True)
        sys.exit(2)
    return response.json()


@main.command("map")
@click.argument("profile_file", type=click.Path())
@click.option("--server", default=None, help="Run against a gateway URL instead of in-process.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of text.")
def map_command(profile_file: str, server: str | None, as_json: bool) -> None:
    """Compute the regulatory map for an agent profile."""
    raw = _load_profile(profile_file)
    if server:
        payload = _remote_post(server, "/v1/regulatory/map", raw)
    else:
        try:
            profile = profile_from_payload(raw)
        except ProfileError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        payload = map_payload(build_regulatory_map(profile))
    if as_json:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
        return
    tier = payload["risk_tier"]
    click.echo(f"risk tier: {tier['kind']}" + (f" ({tier['detail']})" if tier["detail"] else ""))
    if payload["prohibited_practice_screening"]:
        click.echo("note: screen agent design against the harmful-manipulation prohibitions")
    click.echo("triggered instruments:")
    for trigger in payload["triggers"]:
        click.echo(f"  {trigger['instrument']:<28} {trigger['rule_id']}")
        for evidence in trigger["evidence"]:
            click.echo(f"      evidence: {evidence}")
        if trigger["obligation_note"]:
            click.echo(f"      note: {trigger['obligation_note']}")


@main.command("checklist")
@click.argument("profile_file", type=click.Path())
@click.option("--server", default=None, help="Run against a gateway URL instead of in-process.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of text.")
def checklist_command(profile_file: str, server: str | None, as_json: bool) -> None:
    """Walk the twelve-step compliance sequence for an agent profile."""
    raw = _load_profile(profile_file)
    if server:
        payload = _remote_post(server, "/v1/regulatory/checklist", raw)
    else:
        try:
            profile = profile_from_payload(raw)
        except ProfileError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        payload = checklist_payload(generate_checklist(profile))
    if as_json:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
        return
    for step in payload["steps"]:
        status = step["status"]
        if status == "gate":
            marker = f"GATE[{step['gate_outcome']}]"
        elif status == "required":
            marker = "REQUIRED"
        else:
            marker = "n/a"
        click.echo(f"  step {step['index']:>2}  {marker:<22} {step['name']}")
        if step["note"]:
            click.echo(f"           note: {step['note']}")
    if payload["exit_path"]:
        click.echo(f"exit path: {payload['exit_path']}")
        if payload["residual_instruments"]:
            click.echo(f"residual instruments: {', '.join(payload['residual_instruments'])}")


@main.command("matrix")
@click.argument("category")
def matrix_command(category: str) -> None:
    """Print the impact-matrix row for one deployment category."""
    try:
        row = impact_matrix_row(AgentCategory(category))
    except (ValueError, UnknownCategory) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    for layer, impact in row.items():
        click.echo(f"  {layer.value:<42} {impact.value}")


@main.command("envelope")
@click.option("--tools", "-k", type=int, required=True)
@click.option("--depth", "-n", type=int, required=True)
@click.option("--budget", type=int, default=10**9, show_default=True)
def envelope_command(tools: int, depth: int, budget: int) -> None:
    """Path-count bound for a tool catalog composed over a chain depth."""
    estimate = envelope_estimate(tools, depth, budget)
    click.echo(f"paths <= {estimate.paths}")
    if estimate.saturated:
        click.echo(f"saturated: exceeds audit budget {estimate.budget}")


@main.command("verify-ledger")
@click.argument("ledger_dir", type=click.Path(exists=True))
@click.option("--start", type=int, default=0)
@click.option("--end", type=int, default=None)
def verify_ledger_command(ledger_dir: str, start: int, end: int | None) -> None:
    """Re-verify the hash chain of a persisted ledger."""
    try:
        ledger = OversightLedger(ledger_dir)
    except StorageFailure as exc:
        click.echo(f"verification failed while loading: {exc}", err=True)
        sys.exit(1)
    if len(ledger) == 0:
        click.echo("empty ledger: ok")
        return
    result = ledger.verify_chain(start, end)
    if result.ok:
        click.echo(f"ok: {len(ledger)} entries, head {ledger.head_hash()[:16]}...")
    else:
        click.echo(
            f"verification FAILED at seq {result.first_bad_seq}: {result.detail}",
            err=True,
        )
        sys.exit(1)


@main.command("simulate")
@click.argument("scenario")
@click.option("--workdir", type=click.Path(), default=None, help="Keep artifacts here.")
def simulate_command(scenario: str, workdir: str | None) -> None:
    """Run a scripted scenario (bundled name or script file path)."""
    if workdir is None:
        workdir = tempfile.mkdtemp(prefix="agentgate-sim-")
    try:
        report = run_scenario(scenario, workdir)
    except FileNotFoundError as exc:
        click.echo(f"error: {exc}", err=True)
        click.echo(f"bundled scenarios: {', '.join(bundled_scenario_names())}", err=True)
        sys.exit(2)
    for check in report.checks:
        marker = "PASS" if check.passed else "FAIL"
        detail = f"  ({check.detail})" if check.detail and not check.passed else ""
        click.echo(f"  [{marker}] {check.description}{detail}")
    click.echo(f"scenario {report.name}: {'pass' if report.passed else 'FAIL'}")
    click.echo(f"artifacts: {workdir}")
    if not report.passed:
        sys.exit(1)


@main.command("serve")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
def serve_command(config_path: str) -> None:
    """Start the HTTP gateway."""
    import uvicorn

    from .service.app import create_app
    from .service.core import GatewayCore

    try:
        config = load_config(config_path)
        policy = load_policy(config.policy_path)
    except PolicyError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    core = GatewayCore(policy, config)
    if len(core.ledger) > 0:
        core.rebuild_from_ledger()
    app = create_app(core)
    uvicorn.run(app, host=config.listen_host, port=config.listen_port)


if __name__ == "__main__":
    main()
