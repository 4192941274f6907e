"""Data-dependency DAG of planned action chains, with selective holds.

Holding a node suspends exactly its transitive data-dependency descendants;
everything else stays executable, so an approval wait never stalls
independent branches. Resolution either releases the node (descendants
return to Pending and are re-assessed against current telemetry before they
can run) or rejects it (descendants cascade to Cancelled). Executing nodes
are never interrupted: they finish, and their consumers are the suspension
subjects.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .risk import ActionProposal

DEFAULT_AUDIT_BUDGET = 10**9


class Status(enum.Enum):
    PENDING = "pending"
    READY = "ready"
    EXECUTING = "executing"
    HELD = "held"
    SUSPENDED = "suspended"
    COMPLETED = "completed"
    REJECTED = "rejected"
    CANCELLED = "cancelled"


TERMINAL_STATUSES: frozenset[Status] = frozenset(
    {Status.COMPLETED, Status.REJECTED, Status.CANCELLED}
)


class ChainError(Exception):
    pass


class CycleDetected(ChainError):
    pass


class DuplicateActionId(ChainError):
    pass


class DanglingEdge(ChainError):
    pass


class UnknownChain(ChainError):
    pass


class UnknownNode(ChainError):
    pass


class InvalidTransition(ChainError):
    pass


class AlreadyTerminal(InvalidTransition):
    pass


class NotHeld(ChainError):
    pass


class Decision(enum.Enum):
    APPROVE = "approve"
    REJECT = "reject"


@dataclass
class ActionDag:
    chain_id: str
    nodes: dict[str, ActionProposal] = field(default_factory=dict)
    edges: set[tuple[str, str]] = field(default_factory=set)
    status: dict[str, Status] = field(default_factory=dict)
    # node -> held nodes currently suspending it (a node may sit under
    # several overlapping holds; it resumes only when the set drains)
    suspenders: dict[str, set[str]] = field(default_factory=dict)
    needs_reassessment: set[str] = field(default_factory=set)

    def producers(self, node_id: str) -> set[str]:
        return {p for (p, c) in self.edges if c == node_id}

    def consumers(self, node_id: str) -> set[str]:
        return {c for (p, c) in self.edges if p == node_id}

    def descendants(self, node_id: str) -> set[str]:
        """Transitive closure over data-dependency edges."""
        seen: set[str] = set()
        frontier = [node_id]
        while frontier:
            current = frontier.pop()
            for child in self.consumers(current):
                if child not in seen:
                    seen.add(child)
                    frontier.append(child)
        return seen


@dataclass(frozen=True)
class ResolveResult:
    decision: Decision
    released: frozenset[str]
    cancelled: frozenset[str]
    re_evaluated: frozenset[str]


@dataclass(frozen=True)
class EnvelopeEstimate:
    tool_count: int
    depth: int
    paths: int
    budget: int
    saturated: bool


def envelope_estimate(
    tool_count: int, depth: int, budget: int = DEFAULT_AUDIT_BUDGET
) -> EnvelopeEstimate:
    """Upper bound on distinct execution paths: tool_count ** depth."""
    if tool_count < 1:
        raise ValueError("tool_count must be >= 1")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    paths = tool_count**depth
    return EnvelopeEstimate(tool_count, depth, paths, budget, paths > budget)


# ReassessGate: called when a previously suspended node's producers have all
# completed; returns True to let the node become Ready, or False when the
# gate itself re-held the node after re-assessment.
ReassessGate = Callable[[str, str], bool]


class ChainExecutor:
    """Per-chain serialized mutations; different chains progress freely."""

    def __init__(self, reassess_gate: ReassessGate | None = None) -> None:
        self._chains: dict[str, ActionDag] = {}
        self._locks: dict[str, threading.RLock] = {}
        self._registry_lock = threading.Lock()
        self.reassess_gate = reassess_gate

    # -- structure -----------------------------------------------------------

    def _lock_for(self, chain_id: str) -> threading.RLock:
        with self._registry_lock:
            if chain_id not in self._locks:
                self._locks[chain_id] = threading.RLock()
            return self._locks[chain_id]

    def chain(self, chain_id: str) -> ActionDag:
        dag = self._chains.get(chain_id)
        if dag is None:
            raise UnknownChain(chain_id)
        return dag

    def chain_ids(self) -> list[str]:
        return list(self._chains)

    def submit_chain(
        self,
        chain_id: str,
        proposals: Iterable[ActionProposal],
        edges: Iterable[tuple[str, str]] = (),
    ) -> ActionDag:
        with self._lock_for(chain_id):
            if chain_id in self._chains:
                raise DuplicateActionId(f"chain {chain_id!r} already exists")
            dag = ActionDag(chain_id=chain_id)
            for proposal in proposals:
                if proposal.id in dag.nodes:
                    raise DuplicateActionId(proposal.id)
                dag.nodes[proposal.id] = proposal
            for producer, consumer in edges:
                if producer not in dag.nodes or consumer not in dag.nodes:
                    raise DanglingEdge(f"{producer} -> {consumer}")
                dag.edges.add((producer, consumer))
            _check_acyclic(dag)
            for node_id in dag.nodes:
                dag.status[node_id] = (
                    Status.READY if not dag.producers(node_id) else Status.PENDING
                )
            self._chains[chain_id] = dag
            return dag

    def add_action(
        self,
        chain_id: str,
        proposal: ActionProposal,
        producers: Iterable[str] = (),
    ) -> Status:
        """Append a node mid-flight. New nodes cannot create cycles (they have
        no consumers yet); producers must not have failed terminally."""
        with self._lock_for(chain_id):
            dag = self.chain(chain_id)
            if proposal.id in dag.nodes:
                raise DuplicateActionId(proposal.id)
            producer_ids = set(producers)
            for producer in producer_ids:
                if producer not in dag.nodes:
                    raise DanglingEdge(f"{producer} -> {proposal.id}")
                if dag.status[producer] in (Status.REJECTED, Status.CANCELLED):
                    raise InvalidTransition(
                        f"cannot extend {producer!r} ({dag.status[producer].value})"
                    )
            dag.nodes[proposal.id] = proposal
            for producer in producer_ids:
                dag.edges.add((producer, proposal.id))

            inherited: set[str] = set()
            for producer in producer_ids:
                if dag.status[producer] is Status.HELD:
                    inherited.add(producer)
                inherited |= dag.suspenders.get(producer, set())
            if inherited:
                dag.status[proposal.id] = Status.SUSPENDED
                dag.suspenders[proposal.id] = inherited
            elif all(
                dag.status[p] is Status.COMPLETED for p in producer_ids
            ):
                dag.status[proposal.id] = Status.READY
            else:
                dag.status[proposal.id] = Status.PENDING
            return dag.status[proposal.id]

    # -- holds and resolution ---------------------------------------------------

    def hold(self, chain_id: str, action_id: str) -> frozenset[str]:
        """Hold one node; suspend exactly its reachable descendants."""
        with self._lock_for(chain_id):
            dag = self.chain(chain_id)
            status = self._status_of(dag, action_id)
            if status in TERMINAL_STATUSES:
                raise AlreadyTerminal(f"{action_id} is {status.value}")
            if status not in (Status.READY, Status.PENDING):
                raise InvalidTransition(
                    f"cannot hold {action_id} while {status.value}"
                )
            dag.status[action_id] = Status.HELD
            suspended: set[str] = set()
            for descendant in dag.descendants(action_id):
                mark = dag.suspenders.setdefault(descendant, set())
                mark.add(action_id)
                if dag.status[descendant] in (Status.PENDING, Status.READY):
                    dag.status[descendant] = Status.SUSPENDED
                if dag.status[descendant] is Status.SUSPENDED:
                    suspended.add(descendant)
            return frozenset(suspended)

    def resolve(
        self, chain_id: str, action_id: str, decision: Decision
    ) -> ResolveResult:
        with self._lock_for(chain_id):
            dag = self.chain(chain_id)
            status = self._status_of(dag, action_id)
            if status is not Status.HELD:
                raise NotHeld(f"{action_id} is {status.value}")

            if decision is Decision.REJECT:
                dag.status[action_id] = Status.REJECTED
                cancelled: set[str] = set()
                for descendant in dag.descendants(action_id):
                    dag.suspenders.pop(descendant, None)
                    if dag.status[descendant] not in TERMINAL_STATUSES:
                        dag.status[descendant] = Status.CANCELLED
                        cancelled.add(descendant)
                return ResolveResult(
                    decision, frozenset(), frozenset(cancelled), frozenset()
                )

            re_evaluated: set[str] = set()
            for descendant in dag.descendants(action_id):
                marks = dag.suspenders.get(descendant)
                if marks is None:
                    continue
                marks.discard(action_id)
                if not marks:
                    dag.suspenders.pop(descendant, None)
                    if dag.status[descendant] is Status.SUSPENDED:
                        dag.status[descendant] = Status.PENDING
                        dag.needs_reassessment.add(descendant)
                        re_evaluated.add(descendant)
            if all(
                dag.status[p] is Status.COMPLETED for p in dag.producers(action_id)
            ):
                dag.status[action_id] = Status.READY
            else:
                dag.status[action_id] = Status.PENDING
            return ResolveResult(
                decision, frozenset({action_id}), frozenset(), frozenset(re_evaluated)
            )

    def block(self, chain_id: str, action_id: str) -> frozenset[str]:
        """Terminal policy ban: reject the node and cancel its descendants."""
        with self._lock_for(chain_id):
            dag = self.chain(chain_id)
            status = self._status_of(dag, action_id)
            if status in TERMINAL_STATUSES:
                raise AlreadyTerminal(f"{action_id} is {status.value}")
            dag.status[action_id] = Status.REJECTED
            cancelled: set[str] = set()
            for descendant in dag.descendants(action_id):
                dag.suspenders.pop(descendant, None)
                if dag.status[descendant] not in TERMINAL_STATUSES:
                    dag.status[descendant] = Status.CANCELLED
                    cancelled.add(descendant)
            return frozenset(cancelled)

    # -- execution -------------------------------------------------------------

    def start(self, chain_id: str, action_id: str) -> None:
        with self._lock_for(chain_id):
            dag = self.chain(chain_id)
            status = self._status_of(dag, action_id)
            if status is not Status.READY:
                raise InvalidTransition(f"cannot start {action_id} while {status.value}")
            if not all(
                dag.status[p] is Status.COMPLETED for p in dag.producers(action_id)
            ):
                raise InvalidTransition(f"{action_id} has incomplete producers")
            dag.status[action_id] = Status.EXECUTING

    def complete(self, chain_id: str, action_id: str) -> frozenset[str]:
        """Finish an executing node; promote now-unblocked consumers. Returns
        the set of nodes that became Ready."""
        with self._lock_for(chain_id):
            dag = self.chain(chain_id)
            status = self._status_of(dag, action_id)
            if status is not Status.EXECUTING:
                raise InvalidTransition(
                    f"cannot complete {action_id} while {status.value}"
                )
            dag.status[action_id] = Status.COMPLETED
            return self._promote_consumers(dag, action_id)

    def _promote_consumers(self, dag: ActionDag, action_id: str) -> frozenset[str]:
        newly_ready: set[str] = set()
        for consumer in sorted(dag.consumers(action_id)):
            if dag.status[consumer] is not Status.PENDING:
                continue
            if not all(
                dag.status[p] is Status.COMPLETED for p in dag.producers(consumer)
            ):
                continue
            if consumer in dag.needs_reassessment:
                dag.needs_reassessment.discard(consumer)
                if self.reassess_gate is not None and not self.reassess_gate(
                    dag.chain_id, consumer
                ):
                    continue  # the gate re-held the node
            dag.status[consumer] = Status.READY
            newly_ready.add(consumer)
        return frozenset(newly_ready)

    def next_ready(self, chain_id: str) -> frozenset[str]:
        with self._lock_for(chain_id):
            dag = self.chain(chain_id)
            return frozenset(
                node_id
                for node_id, status in dag.status.items()
                if status is Status.READY
                and all(
                    dag.status[p] is Status.COMPLETED for p in dag.producers(node_id)
                )
            )

    def statuses(self, chain_id: str) -> dict[str, Status]:
        with self._lock_for(chain_id):
            return dict(self.chain(chain_id).status)

    def _status_of(self, dag: ActionDag, action_id: str) -> Status:
        if action_id not in dag.nodes:
            raise UnknownNode(action_id)
        return dag.status[action_id]

    def find_chain(self, action_id: str) -> str | None:
        for chain_id, dag in self._chains.items():
            if action_id in dag.nodes:
                return chain_id
        return None


def _check_acyclic(dag: ActionDag) -> None:
    """Kahn's algorithm; leftovers mean a cycle."""
    indegree: dict[str, int] = {node: 0 for node in dag.nodes}
    for _, consumer in dag.edges:
        indegree[consumer] += 1
    queue = [n for n, d in indegree.items() if d == 0]
    visited = 0
    while queue:
        current = queue.pop()
        visited += 1
        for consumer in dag.consumers(current):
            indegree[consumer] -= 1
            if indegree[consumer] == 0:
                queue.append(consumer)
    if visited != len(dag.nodes):
        raise CycleDetected(dag.chain_id)
