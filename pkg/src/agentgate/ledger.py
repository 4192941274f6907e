"""Immutable, hash-chained record of every governance event.

Entries are SHA-256 hash-chained: each entry's hash covers its fields plus
the previous entry's hash, so mutating any persisted byte breaks
verification at or before that sequence number. Storage is append-only
segment files of length-prefixed canonical-JSON records; a sealed segment's
head hash is anchored in a separate file so removing a whole sealed segment
is detectable (truncation of the open tail requires the external anchor).

On-disk format, per segment file ``segment-<first_seq>.log``:

    <len> <canonical JSON header>\n      header: {"first_seq", "prev_segment_head_hash"}
    <len> <canonical JSON entry>\n       one line per entry, in seq order

``<len>`` is the decimal byte length of the JSON that follows the single
space. Canonical JSON never contains raw newlines, so records are
line-oriented and independently parseable by third-party verifiers.
"""

from __future__ import annotations

import enum
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .canonical import ZERO_HASH, canonical_json, sha256_hex


class PayloadKind(enum.Enum):
    PROPOSAL = "proposal"
    ASSESSMENT = "assessment"
    NOTIFICATION = "notification"
    HUMAN_DECISION = "human_decision"
    EXECUTION_OUTCOME = "execution_outcome"
    DISCLOSURE = "disclosure"
    CREDENTIAL_EVENT = "credential_event"
    DRIFT_EVENT = "drift_event"
    SNAPSHOT_EVENT = "snapshot_event"


class InitiatorClass(enum.Enum):
    USER_INITIATED = "user_initiated"
    AGENT_INITIATED = "agent_initiated"
    SYSTEM = "system"


class PartyRelation(enum.Enum):
    DIRECT_USER = "direct_user"
    RECIPIENT = "recipient"
    AUDIENCE = "audience"
    ACCOUNT_HOLDER = "account_holder"
    DATA_SUBJECT = "data_subject"


class DisclosureKind(enum.Enum):
    AI_INTERACTION_NOTICE = "ai_interaction_notice"
    SYNTHETIC_CONTENT_MARK = "synthetic_content_mark"
    NONE = "none"


# Party references must be pseudonymous handles, never raw identifiers.
_PARTY_REF_PATTERN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._:-]{0,63}$")


@dataclass
class AffectedParty:
    party_ref: str
    relation: PartyRelation
    disclosure_required: DisclosureKind = DisclosureKind.NONE
    disclosure_done: bool = False

    def __post_init__(self) -> None:
        if not _PARTY_REF_PATTERN.match(self.party_ref) or "@" in self.party_ref:
            raise ValueError(
                f"party_ref {self.party_ref!r} does not look pseudonymous"
            )
        if self.disclosure_done and self.disclosure_required is DisclosureKind.NONE:
            raise ValueError("disclosure_done requires a disclosure obligation")


def party_payload(party: AffectedParty) -> dict:
    return {
        "party_ref": party.party_ref,
        "relation": party.relation.value,
        "disclosure_required": party.disclosure_required.value,
        "disclosure_done": party.disclosure_done,
    }


def party_from_payload(data: Mapping) -> AffectedParty:
    return AffectedParty(
        party_ref=str(data["party_ref"]),
        relation=PartyRelation(data["relation"]),
        disclosure_required=DisclosureKind(data.get("disclosure_required", "none")),
        disclosure_done=bool(data.get("disclosure_done", False)),
    )


@dataclass(frozen=True)
class LedgerEntry:
    seq: int
    prev_hash: str
    payload_kind: PayloadKind
    payload: dict
    initiator_class: InitiatorClass
    timestamp: float
    entry_hash: str

    def hash_input(self) -> dict:
        return {
            "seq": self.seq,
            "prev_hash": self.prev_hash,
            "payload_kind": self.payload_kind.value,
            "payload": self.payload,
            "initiator_class": self.initiator_class.value,
            "timestamp": self.timestamp,
        }

    def to_record(self) -> dict:
        record = self.hash_input()
        record["entry_hash"] = self.entry_hash
        return record


def compute_entry_hash(
    seq: int,
    prev_hash: str,
    payload_kind: PayloadKind,
    payload: dict,
    initiator_class: InitiatorClass,
    timestamp: float,
) -> str:
    return sha256_hex(
        canonical_json(
            {
                "seq": seq,
                "prev_hash": prev_hash,
                "payload_kind": payload_kind.value,
                "payload": payload,
                "initiator_class": initiator_class.value,
                "timestamp": timestamp,
            }
        )
    )


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    first_bad_seq: int | None = None
    detail: str = ""


@dataclass(frozen=True)
class EvidentiaryChain:
    action_id: str
    entries: tuple[LedgerEntry, ...]
    complete: bool
    missing: tuple[str, ...] = ()


class LedgerError(Exception):
    pass


class UnknownAction(LedgerError):
    pass


class DisclosureNotRequired(LedgerError):
    pass


class StorageFailure(LedgerError):
    pass


# Kinds that form the per-action decision chain; credential and drift events
# are issuance/monitoring records queried separately.
_EVIDENCE_KINDS = (
    PayloadKind.PROPOSAL,
    PayloadKind.ASSESSMENT,
    PayloadKind.NOTIFICATION,
    PayloadKind.HUMAN_DECISION,
    PayloadKind.EXECUTION_OUTCOME,
    PayloadKind.DISCLOSURE,
)


class OversightLedger:
    """Single-writer, hash-chained, segment-file-backed event ledger."""

    def __init__(
        self,
        directory: str | Path,
        *,
        segment_size: int = 10_000,
        clock=time.time,
    ) -> None:
        if segment_size < 1:
            raise ValueError("segment_size must be positive")
        self.directory = Path(directory)
        self.anchor_directory = self.directory / "anchors"
        self.segment_size = segment_size
        self._clock = clock
        self._lock = threading.RLock()
        self._entries: list[LedgerEntry] = []
        self._action_index: dict[str, list[int]] = {}
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            self.anchor_directory.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageFailure(str(exc)) from exc
        self._load_existing()

    # -- write path ---------------------------------------------------------

    def append(
        self,
        payload_kind: PayloadKind,
        payload: dict,
        initiator_class: InitiatorClass = InitiatorClass.SYSTEM,
        timestamp: float | None = None,
    ) -> LedgerEntry:
        with self._lock:
            seq = len(self._entries)
            prev_hash = self._entries[-1].entry_hash if self._entries else ZERO_HASH
            ts = self._clock() if timestamp is None else timestamp
            entry_hash = compute_entry_hash(
                seq, prev_hash, payload_kind, payload, initiator_class, ts
            )
            entry = LedgerEntry(
                seq=seq,
                prev_hash=prev_hash,
                payload_kind=payload_kind,
                payload=payload,
                initiator_class=initiator_class,
                timestamp=ts,
                entry_hash=entry_hash,
            )
            self._persist(entry)
            self._entries.append(entry)
            action_id = payload.get("action_id")
            if action_id:
                self._action_index.setdefault(str(action_id), []).append(seq)
            return entry

    def _segment_path(self, first_seq: int) -> Path:
        return self.directory / f"segment-{first_seq:08d}.log"

    def _anchor_path(self, first_seq: int) -> Path:
        return self.anchor_directory / f"segment-{first_seq:08d}.head"

    def _persist(self, entry: LedgerEntry) -> None:
        first_seq = (entry.seq // self.segment_size) * self.segment_size
        path = self._segment_path(first_seq)
        try:
            if entry.seq == first_seq:
                # Seal the previous segment by anchoring its head hash.
                if entry.seq > 0:
                    prev_first = first_seq - self.segment_size
                    self._anchor_path(prev_first).write_text(
                        canonical_json(
                            {"first_seq": prev_first, "head_hash": entry.prev_hash}
                        )
                        + "\n",
                        encoding="utf-8",
                    )
                header = canonical_json(
                    {"first_seq": first_seq, "prev_segment_head_hash": entry.prev_hash}
                ).encode("utf-8")
                with path.open("xb") as fh:
                    fh.write(b"%d %s\n" % (len(header), header))
            record = canonical_json(entry.to_record()).encode("utf-8")
            with path.open("ab") as fh:
                fh.write(b"%d %s\n" % (len(record), record))
        except OSError as exc:
            raise StorageFailure(str(exc)) from exc

    # -- read path ------------------------------------------------------------

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def get(self, seq: int) -> LedgerEntry:
        with self._lock:
            return self._entries[seq]

    def head_hash(self) -> str:
        with self._lock:
            return self._entries[-1].entry_hash if self._entries else ZERO_HASH

    def entries(self, start: int = 0, end: int | None = None) -> list[LedgerEntry]:
        with self._lock:
            stop = len(self._entries) if end is None else min(end + 1, len(self._entries))
            return self._entries[start:stop]

    def entries_by_initiator(self, initiator: InitiatorClass) -> list[LedgerEntry]:
        with self._lock:
            return [e for e in self._entries if e.initiator_class is initiator]

    def segment_paths(self) -> list[Path]:
        return sorted(self.directory.glob("segment-*.log"))

    # -- verification -----------------------------------------------------------

    def verify_chain(self, start: int = 0, end: int | None = None) -> VerifyResult:
        """Recompute every hash, link, and segment header over [start, end]
        from the persisted bytes, reporting the first inconsistent seq."""
        import json

        with self._lock:
            total = len(self._entries)
        stop = total - 1 if end is None else end
        if start < 0 or stop >= total or start > stop + 1:
            raise ValueError(f"range [{start}, {stop}] outside ledger of {total}")
        if stop < start:
            return VerifyResult(True, None)

        prev_hash: str | None = ZERO_HASH if start == 0 else None
        for path in self.segment_paths():
            try:
                first_seq = int(path.stem.split("-")[1])
            except (IndexError, ValueError):
                continue
            if first_seq > stop:
                break
            if first_seq + self.segment_size <= start:
                continue
            try:
                raw = path.read_bytes()
            except OSError as exc:
                return VerifyResult(False, first_seq, f"unreadable segment: {exc}")

            index = -1  # header line comes first
            offset = 0
            while offset < len(raw):
                newline = raw.find(b"\n", offset)
                line = raw[offset : newline if newline != -1 else len(raw)]
                offset = (newline + 1) if newline != -1 else len(raw)
                seq = first_seq + max(index, 0)
                try:
                    length_bytes, body = line.split(b" ", 1)
                    if int(length_bytes) != len(body):
                        raise ValueError("length prefix mismatch")
                    parsed = json.loads(body.decode("utf-8"))
                    if not isinstance(parsed, dict):
                        raise ValueError("record is not an object")
                except (ValueError, UnicodeDecodeError) as exc:
                    return VerifyResult(False, seq, f"unparseable record: {exc}")

                if index == -1:
                    if parsed.get("first_seq") != first_seq:
                        return VerifyResult(False, first_seq, "header first_seq mismatch")
                    if prev_hash is not None and parsed.get(
                        "prev_segment_head_hash"
                    ) != prev_hash:
                        return VerifyResult(
                            False, first_seq, "header segment link mismatch"
                        )
                    index = 0
                    continue

                if start <= seq <= stop:
                    try:
                        recomputed = compute_entry_hash(
                            parsed["seq"],
                            parsed["prev_hash"],
                            PayloadKind(parsed["payload_kind"]),
                            parsed["payload"],
                            InitiatorClass(parsed["initiator_class"]),
                            parsed["timestamp"],
                        )
                    except (KeyError, ValueError, TypeError) as exc:
                        return VerifyResult(False, seq, f"malformed record: {exc}")
                    if parsed["seq"] != seq:
                        return VerifyResult(False, seq, "sequence number mismatch")
                    if recomputed != parsed.get("entry_hash"):
                        return VerifyResult(False, seq, "entry hash mismatch")
                    if prev_hash is None:  # mid-ledger start adopts stored link
                        prev_hash = parsed["prev_hash"]
                    if parsed["prev_hash"] != prev_hash:
                        return VerifyResult(False, seq, "chain link mismatch")
                    prev_hash = parsed["entry_hash"]
                elif prev_hash is not None and seq < start:
                    prev_hash = parsed.get("entry_hash")
                index += 1
                if first_seq + index > stop:
                    return VerifyResult(True, None)
        return VerifyResult(True, None)

    # -- evidentiary queries ---------------------------------------------------

    def entries_for_action(self, action_id: str) -> list[LedgerEntry]:
        with self._lock:
            seqs = self._action_index.get(action_id, [])
            return [self._entries[s] for s in seqs]

    def evidentiary_chain(self, action_id: str) -> EvidentiaryChain:
        """Ordered decision-chain entries for one action plus a completeness
        verdict for the oversight level its latest assessment recorded."""
        all_entries = self.entries_for_action(action_id)
        if not any(e.payload_kind is PayloadKind.PROPOSAL for e in all_entries):
            raise UnknownAction(action_id)
        chain = tuple(e for e in all_entries if e.payload_kind in _EVIDENCE_KINDS)

        kinds = [e.payload_kind for e in chain]
        missing: list[str] = []
        assessments = [e for e in chain if e.payload_kind is PayloadKind.ASSESSMENT]
        if not assessments:
            missing.append("assessment")
            return EvidentiaryChain(action_id, chain, False, tuple(missing))
        level = assessments[-1].payload.get("level", "")

        decisions = [e for e in chain if e.payload_kind is PayloadKind.HUMAN_DECISION]
        outcomes = [e for e in chain if e.payload_kind is PayloadKind.EXECUTION_OUTCOME]
        notified = PayloadKind.NOTIFICATION in kinds
        rejected = any(d.payload.get("decision") == "reject" for d in decisions)

        needs_decision = level == "pre_execution_approval"
        needs_notification = level in ("pre_execution_approval", "supervisory")
        terminal_without_execution = level == "blocked" or rejected

        if needs_notification and not notified:
            missing.append("notification")
        if needs_decision:
            if not decisions:
                missing.append("human_decision")
            elif not all(str(d.payload.get("rationale", "")).strip() for d in decisions):
                missing.append("human_decision_rationale")
        if not terminal_without_execution and not outcomes:
            missing.append("execution_outcome")

        if not _ordered(kinds):
            missing.append("entry_order")

        # Disclosure coverage: obligations attach once the action executed.
        if outcomes:
            proposal = next(e for e in chain if e.payload_kind is PayloadKind.PROPOSAL)
            disclosed = {
                e.payload.get("party_ref")
                for e in chain
                if e.payload_kind is PayloadKind.DISCLOSURE
            }
            for party in proposal.payload.get("affected_parties", []):
                if party.get("disclosure_required", "none") != "none":
                    if party.get("party_ref") not in disclosed:
                        missing.append(f"disclosure:{party.get('party_ref')}")

        return EvidentiaryChain(action_id, chain, not missing, tuple(missing))

    def record_disclosure(
        self, action_id: str, party: AffectedParty
    ) -> LedgerEntry:
        if not self.entries_for_action(action_id):
            raise UnknownAction(action_id)
        if party.disclosure_required is DisclosureKind.NONE:
            raise DisclosureNotRequired(party.party_ref)
        party.disclosure_done = True
        return self.append(
            PayloadKind.DISCLOSURE,
            {
                "action_id": action_id,
                "party_ref": party.party_ref,
                "relation": party.relation.value,
                "disclosure": party.disclosure_required.value,
            },
            InitiatorClass.SYSTEM,
        )

    # -- bootstrap ---------------------------------------------------------------

    def _load_existing(self) -> None:
        import json

        for path in self.segment_paths():
            raw = path.read_bytes()
            first = True
            for line in raw.splitlines():
                if not line:
                    continue
                length_bytes, body = line.split(b" ", 1)
                if int(length_bytes) != len(body):
                    raise StorageFailure(f"corrupt record in {path.name}")
                record = json.loads(body.decode("utf-8"))
                if first:
                    first = False
                    continue
                entry = LedgerEntry(
                    seq=record["seq"],
                    prev_hash=record["prev_hash"],
                    payload_kind=PayloadKind(record["payload_kind"]),
                    payload=record["payload"],
                    initiator_class=InitiatorClass(record["initiator_class"]),
                    timestamp=record["timestamp"],
                    entry_hash=record["entry_hash"],
                )
                if entry.seq != len(self._entries):
                    raise StorageFailure(
                        f"non-contiguous seq {entry.seq} in {path.name}"
                    )
                self._entries.append(entry)
                action_id = entry.payload.get("action_id")
                if action_id:
                    self._action_index.setdefault(str(action_id), []).append(entry.seq)


def _ordered(kinds: list[PayloadKind]) -> bool:
    """Proposal precedes assessment; decisions precede outcomes.

    Repeat assessments (telemetry re-evaluation after an approval) are legal
    anywhere before the execution outcome; disclosures carry no ordering
    constraint relative to the outcome.
    """
    rank = {
        PayloadKind.PROPOSAL: 0,
        PayloadKind.ASSESSMENT: 1,
        PayloadKind.NOTIFICATION: 2,
        PayloadKind.HUMAN_DECISION: 3,
        PayloadKind.EXECUTION_OUTCOME: 4,
    }
    last = -1
    for kind in kinds:
        if kind is PayloadKind.DISCLOSURE:
            continue
        r = rank[kind]
        if kind is PayloadKind.ASSESSMENT:
            if last >= rank[PayloadKind.EXECUTION_OUTCOME]:
                return False
            last = max(last, r)
            continue
        if r < last:
            return False
        last = r
    return True
