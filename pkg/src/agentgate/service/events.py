"""Fan-out of ledger appends to streaming subscribers.

Every ledger entry becomes one stream event, cursored by its ledger seq, so
replay is exact: a client that reconnects with ``cursor=k`` receives every
event with seq > k in order and misses nothing. Queues are bounded; a
subscriber that falls too far behind is disconnected rather than allowed to
block the writer.
"""

from __future__ import annotations

import queue
import threading
from dataclasses import dataclass

from ..ledger import LedgerEntry


@dataclass(frozen=True)
class StreamEvent:
    seq: int
    kind: str
    initiator: str
    timestamp: float
    payload: dict

    @staticmethod
    def from_entry(entry: LedgerEntry) -> "StreamEvent":
        return StreamEvent(
            seq=entry.seq,
            kind=entry.payload_kind.value,
            initiator=entry.initiator_class.value,
            timestamp=entry.timestamp,
            payload=entry.payload,
        )

    def to_payload(self) -> dict:
        return {
            "seq": self.seq,
            "kind": self.kind,
            "initiator": self.initiator,
            "timestamp": self.timestamp,
            "payload": self.payload,
        }


class Subscription:
    def __init__(self, maxsize: int) -> None:
        self._queue: queue.Queue[StreamEvent | None] = queue.Queue(maxsize=maxsize)
        self.dropped = False

    def offer(self, event: StreamEvent) -> None:
        try:
            self._queue.put_nowait(event)
        except queue.Full:
            self.dropped = True

    def get(self, timeout: float | None = None) -> StreamEvent | None:
        try:
            return self._queue.get(timeout=timeout)
        except queue.Empty:
            return None

    def close(self) -> None:
        try:
            self._queue.put_nowait(None)
        except queue.Full:
            pass


class EventBus:
    def __init__(self, *, queue_size: int = 1024) -> None:
        self._subscribers: list[Subscription] = []
        self._lock = threading.Lock()
        self._queue_size = queue_size

    def publish(self, entry: LedgerEntry) -> None:
        event = StreamEvent.from_entry(entry)
        with self._lock:
            subscribers = list(self._subscribers)
        for sub in subscribers:
            sub.offer(event)

    def subscribe(self) -> Subscription:
        sub = Subscription(self._queue_size)
        with self._lock:
            self._subscribers.append(sub)
        return sub

    def unsubscribe(self, sub: Subscription) -> None:
        with self._lock:
            if sub in self._subscribers:
                self._subscribers.remove(sub)
        sub.close()
