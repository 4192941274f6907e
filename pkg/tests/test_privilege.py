"""Credential scoping, validation, and revocation.

The oracle for effective scopes is hand-computed set intersection with a
verb filter, independent of the production helpers.
"""

import random

import pytest

from agentgate.privilege import (
    CapabilityScope,
    Denial,
    DenialReason,
    ExpiredUserGrant,
    PrivilegeGuard,
    TrustLevel,
    UnknownCredential,
    UnknownTool,
    UserGrant,
    ValidationReason,
    Verb,
    scopes_to_map,
)
from agentgate.risk import ActionProposal, Initiator
from agentgate.triggers import ToolDescriptor


def scope(resource, *verbs):
    return CapabilityScope(resource, frozenset(verbs))


def proposal(action_id, targets, requested):
    return ActionProposal(
        id=action_id,
        chain_id="c1",
        decision_type_id="dt",
        initiator=Initiator.AGENT_INITIATED,
        input_trust=TrustLevel.TRUSTED,
        targets=frozenset(targets),
        requested_scopes=frozenset(requested),
    )


def tool(tool_id, *scopes_):
    return ToolDescriptor(id=tool_id, capabilities=frozenset(scopes_))


@pytest.fixture
def guard():
    return PrivilegeGuard(rng=random.Random(7), clock=lambda: 1000.0)


def test_exact_request_within_bounds_granted(guard):
    user = UserGrant("u1", frozenset({scope("inbox", Verb.READ, Verb.SEND)}))
    catalog = {"mail": tool("mail", scope("inbox", Verb.READ, Verb.SEND))}
    cred = guard.authorize(
        proposal("a1", ["mail"], [scope("inbox", Verb.READ)]),
        user,
        catalog,
        TrustLevel.TRUSTED,
    )
    assert scopes_to_map(cred.effective_scopes) == {"inbox": frozenset({Verb.READ})}
    assert not cred.trust_downgraded


def test_send_stripped_by_tool_interface(guard):
    # Requested inbox read+send, tool exposes read only: send never reaches
    # the credential regardless of what the request says.
    user = UserGrant("u1", frozenset({scope("inbox", Verb.READ, Verb.SEND)}))
    catalog = {"mail": tool("mail", scope("inbox", Verb.READ))}
    action = proposal("a1", ["mail"], [scope("inbox", Verb.READ, Verb.SEND)])
    cred = guard.authorize(action, user, catalog, TrustLevel.TRUSTED)
    assert scopes_to_map(cred.effective_scopes) == {"inbox": frozenset({Verb.READ})}

    denial = guard.authorize(action, user, catalog, TrustLevel.TRUSTED, strict=True)
    assert isinstance(denial, Denial)
    assert denial.reason is DenialReason.STRICT_SCOPE_MISMATCH


def test_untrusted_input_strips_state_changing_verbs(guard):
    # Oracle by hand: {db: read, write} with untrusted input -> {db: read}.
    user = UserGrant("u1", frozenset({scope("db", Verb.READ, Verb.WRITE)}))
    catalog = {"db_tool": tool("db_tool", scope("db", Verb.READ, Verb.WRITE))}
    cred = guard.authorize(
        proposal("a1", ["db_tool"], [scope("db", Verb.READ, Verb.WRITE)]),
        user,
        catalog,
        TrustLevel.UNTRUSTED,
    )
    assert scopes_to_map(cred.effective_scopes) == {"db": frozenset({Verb.READ})}
    assert cred.trust_downgraded


def test_empty_intersection_denied(guard):
    user = UserGrant("u1", frozenset({scope("inbox", Verb.READ)}))
    catalog = {"db_tool": tool("db_tool", scope("db", Verb.READ))}
    denial = guard.authorize(
        proposal("a1", ["db_tool"], [scope("inbox", Verb.READ)]),
        user,
        catalog,
        TrustLevel.TRUSTED,
    )
    assert isinstance(denial, Denial)
    assert denial.reason is DenialReason.EMPTY_INTERSECTION


def test_unknown_tool_and_expired_grant(guard):
    user = UserGrant("u1", frozenset({scope("inbox", Verb.READ)}))
    with pytest.raises(UnknownTool):
        guard.authorize(
            proposal("a1", ["ghost"], [scope("inbox", Verb.READ)]),
            user,
            {},
            TrustLevel.TRUSTED,
        )
    stale = UserGrant("u1", frozenset({scope("inbox", Verb.READ)}), expires_at=999.0)
    with pytest.raises(ExpiredUserGrant):
        guard.authorize(
            proposal("a1", ["mail"], [scope("inbox", Verb.READ)]),
            stale,
            {"mail": tool("mail", scope("inbox", Verb.READ))},
            TrustLevel.TRUSTED,
        )


def test_validate_binding_expiry_and_revocation(guard):
    user = UserGrant("u1", frozenset({scope("inbox", Verb.READ)}))
    catalog = {"mail": tool("mail", scope("inbox", Verb.READ))}
    cred = guard.authorize(
        proposal("a1", ["mail"], [scope("inbox", Verb.READ)]),
        user,
        catalog,
        TrustLevel.TRUSTED,
    )
    assert guard.validate(cred.credential_id, "a1", now=1100.0).ok
    wrong = guard.validate(cred.credential_id, "a2", now=1100.0)
    assert not wrong.ok and wrong.reason is ValidationReason.WRONG_BINDING
    # Oracle: issued_at 1000 + ttl 300 -> invalid from 1300 on; 1s past is out.
    late = guard.validate(cred.credential_id, "a1", now=1301.0)
    assert not late.ok and late.reason is ValidationReason.EXPIRED
    missing = guard.validate("feedcafe" * 4, "a1", now=1100.0)
    assert not missing.ok and missing.reason is ValidationReason.NOT_FOUND

    guard.revoke(cred.credential_id)
    revoked = guard.validate(cred.credential_id, "a1", now=1100.0)
    assert not revoked.ok and revoked.reason is ValidationReason.REVOKED
    guard.revoke(cred.credential_id)  # idempotent on known credentials
    with pytest.raises(UnknownCredential):
        guard.revoke("00" * 16)


def test_agent_cannot_exceed_user_grant(guard):
    # Agent-initiated action requesting delete the user never held.
    user = UserGrant("u1", frozenset({scope("records", Verb.READ, Verb.WRITE)}))
    catalog = {
        "crm": tool("crm", scope("records", Verb.READ, Verb.WRITE, Verb.DELETE))
    }
    cred = guard.authorize(
        proposal("a1", ["crm"], [scope("records", Verb.READ, Verb.DELETE)]),
        user,
        catalog,
        TrustLevel.TRUSTED,
    )
    assert Verb.DELETE not in scopes_to_map(cred.effective_scopes)["records"]


def test_monotone_narrowing_of_user_scopes(guard):
    catalog = {"crm": tool("crm", scope("records", Verb.READ, Verb.WRITE))}
    action = proposal("a1", ["crm"], [scope("records", Verb.READ, Verb.WRITE)])
    wide = guard.authorize(
        action,
        UserGrant("u1", frozenset({scope("records", Verb.READ, Verb.WRITE)})),
        catalog,
        TrustLevel.TRUSTED,
    )
    narrow = guard.authorize(
        action,
        UserGrant("u1", frozenset({scope("records", Verb.READ)})),
        catalog,
        TrustLevel.TRUSTED,
    )
    wide_map = scopes_to_map(wide.effective_scopes)
    narrow_map = scopes_to_map(narrow.effective_scopes)
    for resource, verbs in narrow_map.items():
        assert verbs <= wide_map.get(resource, frozenset())
