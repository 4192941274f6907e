"""Least-privilege enforcement outside the model.

Each proposed action is authorized individually: the credential it receives
covers exactly the intersection of what the action requested, what the
initiating user may do, and what the target tools declare. Untrusted input
additionally strips every state-changing verb, so a prompt-injected request
can at worst read. Credentials are single-action, time-limited capability
tokens held in an in-memory store; issuance and revocation are recorded on
the oversight ledger by the gateway.
"""

from __future__ import annotations

import enum
import random
import threading
import time
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Mapping, NamedTuple

if TYPE_CHECKING:  # structural use only; avoids an import cycle
    from .risk import ActionProposal
    from .triggers import ToolDescriptor


class Verb(enum.Enum):
    READ = "read"
    WRITE = "write"
    EXECUTE = "execute"
    DELETE = "delete"
    SEND = "send"


# Execute counts as state-changing: open-ended execution can modify
# arbitrary external state even when the request looks read-only.
STATE_CHANGING_VERBS: frozenset[Verb] = frozenset(
    {Verb.WRITE, Verb.DELETE, Verb.SEND, Verb.EXECUTE}
)


class TrustLevel(enum.Enum):
    TRUSTED = "trusted"
    UNTRUSTED = "untrusted"


@dataclass(frozen=True)
class CapabilityScope:
    resource_class: str
    verbs: frozenset[Verb]

    def __post_init__(self) -> None:
        if not self.verbs:
            raise ValueError("capability scope requires at least one verb")


@dataclass(frozen=True)
class UserGrant:
    user_id: str
    scopes: frozenset[CapabilityScope]
    expires_at: float | None = None

    def __post_init__(self) -> None:
        if not self.user_id:
            raise ValueError("user_id must be non-empty")


@dataclass(frozen=True)
class JitCredential:
    credential_id: str
    action_id: str
    effective_scopes: frozenset[CapabilityScope]
    issued_at: float
    ttl_seconds: float
    trust_downgraded: bool


class DenialReason(enum.Enum):
    EMPTY_INTERSECTION = "empty_intersection"
    STRICT_SCOPE_MISMATCH = "strict_scope_mismatch"


@dataclass(frozen=True)
class Denial:
    action_id: str
    reason: DenialReason
    detail: str = ""


class ValidationReason(enum.Enum):
    OK = "ok"
    NOT_FOUND = "not_found"
    WRONG_BINDING = "wrong_binding"
    EXPIRED = "expired"
    REVOKED = "revoked"


class ValidationResult(NamedTuple):
    ok: bool
    reason: ValidationReason


class PrivilegeError(Exception):
    pass


class UnknownTool(PrivilegeError):
    pass


class ExpiredUserGrant(PrivilegeError):
    pass


class UnknownCredential(PrivilegeError):
    pass


def scopes_to_map(scopes: Iterable[CapabilityScope]) -> dict[str, frozenset[Verb]]:
    """Normalize a scope set to resource_class -> union of verbs."""
    merged: dict[str, set[Verb]] = {}
    for scope in scopes:
        merged.setdefault(scope.resource_class, set()).update(scope.verbs)
    return {rc: frozenset(vs) for rc, vs in merged.items()}


def map_to_scopes(mapping: Mapping[str, frozenset[Verb]]) -> frozenset[CapabilityScope]:
    return frozenset(
        CapabilityScope(rc, verbs) for rc, verbs in mapping.items() if verbs
    )


def intersect_scopes(
    a: Iterable[CapabilityScope], b: Iterable[CapabilityScope]
) -> frozenset[CapabilityScope]:
    left, right = scopes_to_map(a), scopes_to_map(b)
    out: dict[str, frozenset[Verb]] = {}
    for rc, verbs in left.items():
        if rc in right:
            common = verbs & right[rc]
            if common:
                out[rc] = common
    return map_to_scopes(out)


def strip_state_changing(
    scopes: Iterable[CapabilityScope],
) -> frozenset[CapabilityScope]:
    kept: dict[str, frozenset[Verb]] = {}
    for rc, verbs in scopes_to_map(scopes).items():
        safe = verbs - STATE_CHANGING_VERBS
        if safe:
            kept[rc] = safe
    return map_to_scopes(kept)


def covers(outer: Iterable[CapabilityScope], inner: Iterable[CapabilityScope]) -> bool:
    """True when every (resource, verb) of *inner* is present in *outer*."""
    big = scopes_to_map(outer)
    for rc, verbs in scopes_to_map(inner).items():
        if not verbs <= big.get(rc, frozenset()):
            return False
    return True


@dataclass
class _StoredCredential:
    credential: JitCredential
    revoked: bool = False


class PrivilegeGuard:
    """Issues, validates, and revokes single-action credentials."""

    def __init__(
        self,
        *,
        default_ttl_seconds: float = 300.0,
        rng: random.Random | None = None,
        clock=time.time,
    ) -> None:
        self.default_ttl_seconds = default_ttl_seconds
        self._rng = rng or random.SystemRandom()
        self._clock = clock
        self._store: dict[str, _StoredCredential] = {}
        self._lock = threading.Lock()

    def _new_credential_id(self) -> str:
        return f"{self._rng.getrandbits(128):032x}"

    def authorize(
        self,
        action: "ActionProposal",
        user: UserGrant,
        catalog: Mapping[str, "ToolDescriptor"],
        trust: TrustLevel,
        *,
        strict: bool = False,
        now: float | None = None,
        ttl_seconds: float | None = None,
    ) -> JitCredential | Denial:
        """Scope the action's request to (user scopes intersect tool scopes).

        In strict mode a request that cannot be satisfied in full is denied
        instead of silently narrowed; use it for decision types where partial
        execution is dangerous.
        """
        now = self._clock() if now is None else now
        if user.expires_at is not None and now >= user.expires_at:
            raise ExpiredUserGrant(user.user_id)

        tool_scopes: list[CapabilityScope] = []
        for tool_id in sorted(action.targets):
            tool = catalog.get(tool_id)
            if tool is None:
                raise UnknownTool(tool_id)
            tool_scopes.extend(tool.capabilities)

        effective = intersect_scopes(action.requested_scopes, user.scopes)
        effective = intersect_scopes(effective, tool_scopes)

        downgraded = trust is TrustLevel.UNTRUSTED
        if downgraded:
            effective = strip_state_changing(effective)

        if not effective:
            return Denial(action.id, DenialReason.EMPTY_INTERSECTION)
        if strict and not covers(effective, action.requested_scopes):
            return Denial(
                action.id,
                DenialReason.STRICT_SCOPE_MISMATCH,
                detail="requested scopes exceed the authorizable intersection",
            )

        credential = JitCredential(
            credential_id=self._new_credential_id(),
            action_id=action.id,
            effective_scopes=effective,
            issued_at=now,
            ttl_seconds=self.default_ttl_seconds if ttl_seconds is None else ttl_seconds,
            trust_downgraded=downgraded,
        )
        with self._lock:
            self._store[credential.credential_id] = _StoredCredential(credential)
        return credential

    def validate(
        self, credential_id: str, action_id: str, now: float | None = None
    ) -> ValidationResult:
        now = self._clock() if now is None else now
        with self._lock:
            stored = self._store.get(credential_id)
        if stored is None:
            return ValidationResult(False, ValidationReason.NOT_FOUND)
        if stored.revoked:
            return ValidationResult(False, ValidationReason.REVOKED)
        cred = stored.credential
        if cred.action_id != action_id:
            return ValidationResult(False, ValidationReason.WRONG_BINDING)
        if now >= cred.issued_at + cred.ttl_seconds:
            return ValidationResult(False, ValidationReason.EXPIRED)
        return ValidationResult(True, ValidationReason.OK)

    def revoke(self, credential_id: str) -> None:
        with self._lock:
            stored = self._store.get(credential_id)
            if stored is None:
                raise UnknownCredential(credential_id)
            stored.revoked = True

    def get(self, credential_id: str) -> JitCredential:
        with self._lock:
            stored = self._store.get(credential_id)
        if stored is None:
            raise UnknownCredential(credential_id)
        return stored.credential


def scope_payload(scopes: Iterable[CapabilityScope]) -> dict[str, list[str]]:
    return {
        rc: sorted(v.value for v in verbs)
        for rc, verbs in sorted(scopes_to_map(scopes).items())
    }


def scopes_from_payload(data: Mapping[str, Iterable[str]]) -> frozenset[CapabilityScope]:
    return frozenset(
        CapabilityScope(rc, frozenset(Verb(v) for v in verbs))
        for rc, verbs in data.items()
    )
