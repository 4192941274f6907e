"""Four-level action ontology with per-field attribute inheritance.

Nodes form a forest ordered Domain > Process > DecisionType >
ActionInstanceTemplate. Each node may define a sparse set of governance
attributes; resolving a node walks its root path and takes, per field, the
value at the nearest ancestor (or self) that defines it. Regulatory tags are
the one exception: they accumulate by union along the path, because a child
can add applicable instruments but never shed one. Domain roots must define
every required field so that resolution is total.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields as dc_fields
from typing import Iterable, Mapping

from .canonical import digest


class Level(enum.IntEnum):
    DOMAIN = 0
    PROCESS = 1
    DECISION_TYPE = 2
    ACTION_INSTANCE_TEMPLATE = 3


class RiskTier(enum.IntEnum):
    """Inherent risk of a decision type; ordering drives base oversight."""

    MINIMAL = 0
    ELEVATED = 1
    HIGH = 2
    UNACCEPTABLE = 3


class Reversibility(enum.Enum):
    REVERSIBLE = "reversible"
    COMPENSABLE = "compensable"
    IRREVERSIBLE = "irreversible"


class OntologyError(Exception):
    pass


class UnknownParent(OntologyError):
    pass


class LevelMismatch(OntologyError):
    pass


class DuplicateId(OntologyError):
    pass


class UnknownNode(OntologyError):
    pass


class IncompleteRootDefaults(OntologyError):
    pass


@dataclass(frozen=True)
class AttributeSet:
    """Sparse per-node attribute values; None means "not defined here"."""

    regulatory_tags: frozenset[str] | None = None
    risk_tier: RiskTier | None = None
    stakeholder: str | None = None
    reversibility: Reversibility | None = None
    sensitive_data: bool | None = None
    state_changing: bool | None = None
    residual_risk_acceptable_without_approval: bool | None = None
    # Display metadata surfaced to approvers alongside a held action. Not
    # part of the mandatory Domain defaults; resolves to "" when unset.
    consequences_of_inaction: str | None = None


# Fields a Domain root must define so every resolution is total.
REQUIRED_DEFAULT_FIELDS: tuple[str, ...] = (
    "regulatory_tags",
    "risk_tier",
    "stakeholder",
    "reversibility",
    "sensitive_data",
    "state_changing",
    "residual_risk_acceptable_without_approval",
)

# Fields whose resolved value is the union of all definitions on the path.
UNION_FIELDS: frozenset[str] = frozenset({"regulatory_tags"})

ATTRIBUTE_FIELDS: tuple[str, ...] = tuple(f.name for f in dc_fields(AttributeSet))


@dataclass(frozen=True)
class OntologyNode:
    id: str
    level: Level
    parent: str | None = None
    attributes: AttributeSet = field(default_factory=AttributeSet)


@dataclass(frozen=True)
class ResolvedProfile:
    """Fully resolved attribute profile for one node.

    ``provenance`` maps each field to the node that supplied its value; for
    union fields it holds the tuple of contributing node ids ordered from
    root to the resolved node.
    """

    node_id: str
    regulatory_tags: frozenset[str]
    risk_tier: RiskTier
    stakeholder: str
    reversibility: Reversibility
    sensitive_data: bool
    state_changing: bool
    residual_risk_acceptable_without_approval: bool
    consequences_of_inaction: str
    provenance: Mapping[str, str | tuple[str, ...]]


class Ontology:
    """Forest of ontology nodes; reads are pure, writes go through add_node.

    The gateway treats a loaded ontology as an immutable snapshot: policy
    reloads build a fresh instance and swap the reference atomically.
    """

    def __init__(self, nodes: Iterable[OntologyNode] = ()) -> None:
        self._nodes: dict[str, OntologyNode] = {}
        for node in nodes:
            self.add_node(node)

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def get(self, node_id: str) -> OntologyNode:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None

    def nodes(self) -> list[OntologyNode]:
        return list(self._nodes.values())

    def add_node(self, node: OntologyNode) -> None:
        if node.id in self._nodes:
            raise DuplicateId(node.id)
        if node.level == Level.DOMAIN:
            if node.parent is not None:
                raise LevelMismatch(
                    f"domain node {node.id!r} must not declare a parent"
                )
        else:
            if node.parent is None:
                raise UnknownParent(
                    f"{node.level.name} node {node.id!r} requires a parent"
                )
            parent = self._nodes.get(node.parent)
            if parent is None:
                raise UnknownParent(node.parent)
            if parent.level != node.level - 1:
                raise LevelMismatch(
                    f"{node.id!r} at {node.level.name} cannot attach to "
                    f"{parent.id!r} at {parent.level.name}"
                )
        self._nodes[node.id] = node

    def path_to_root(self, node_id: str) -> list[OntologyNode]:
        """Nodes from *node_id* up to its Domain root, inclusive."""
        node = self.get(node_id)
        path = [node]
        while node.parent is not None:
            node = self.get(node.parent)
            path.append(node)
        return path

    def validate_root_defaults(self) -> None:
        """Require complete defaults on every Domain node (load-time check)."""
        for node in self._nodes.values():
            if node.level != Level.DOMAIN:
                continue
            missing = [
                name
                for name in REQUIRED_DEFAULT_FIELDS
                if getattr(node.attributes, name) is None
            ]
            if missing:
                raise IncompleteRootDefaults(
                    f"domain {node.id!r} missing defaults: {', '.join(missing)}"
                )

    def resolve_profile(self, node_id: str) -> ResolvedProfile:
        path = self.path_to_root(node_id)  # self first, root last
        resolved: dict[str, object] = {}
        provenance: dict[str, str | tuple[str, ...]] = {}

        for name in ATTRIBUTE_FIELDS:
            if name in UNION_FIELDS:
                contributors: list[str] = []
                merged: set[str] = set()
                for node in reversed(path):  # root -> self
                    value = getattr(node.attributes, name)
                    if value is not None:
                        merged |= set(value)
                        contributors.append(node.id)
                if not contributors:
                    raise IncompleteRootDefaults(
                        f"{name} undefined anywhere on root path of {node_id!r}"
                    )
                resolved[name] = frozenset(merged)
                provenance[name] = tuple(contributors)
                continue

            for node in path:  # nearest definition wins
                value = getattr(node.attributes, name)
                if value is not None:
                    resolved[name] = value
                    provenance[name] = node.id
                    break
            else:
                if name == "consequences_of_inaction":
                    resolved[name] = ""
                    provenance[name] = path[-1].id
                else:
                    raise IncompleteRootDefaults(
                        f"{name} undefined anywhere on root path of {node_id!r}"
                    )

        return ResolvedProfile(node_id=node_id, provenance=provenance, **resolved)  # type: ignore[arg-type]

    def content_hash(self) -> str:
        """Deterministic digest of the whole forest, for policy versioning."""
        payload = sorted(node_payload(n) for n in self._nodes.values())
        return digest(payload)


def attributes_payload(attrs: AttributeSet) -> dict:
    out: dict[str, object] = {}
    for name in ATTRIBUTE_FIELDS:
        value = getattr(attrs, name)
        if value is None:
            continue
        if isinstance(value, frozenset):
            out[name] = sorted(value)
        elif isinstance(value, enum.Enum):
            out[name] = value.name
        else:
            out[name] = value
    return out


def node_payload(node: OntologyNode) -> list:
    # List form keeps payloads orderable for the content hash.
    return [node.id, node.level.name, node.parent or "", attributes_payload(node.attributes)]


def attributes_from_payload(data: Mapping) -> AttributeSet:
    kwargs: dict[str, object] = {}
    for name in ATTRIBUTE_FIELDS:
        if name not in data or data[name] is None:
            continue
        value = data[name]
        if name == "regulatory_tags":
            kwargs[name] = frozenset(str(v) for v in value)
        elif name == "risk_tier":
            kwargs[name] = RiskTier[str(value).upper()]
        elif name == "reversibility":
            kwargs[name] = Reversibility[str(value).upper()]
        else:
            kwargs[name] = value
    unknown = set(data) - set(ATTRIBUTE_FIELDS)
    if unknown:
        raise OntologyError(f"unknown attribute fields: {sorted(unknown)}")
    return AttributeSet(**kwargs)  # type: ignore[arg-type]


def node_from_payload(data: Mapping) -> OntologyNode:
    try:
        level = Level[str(data["level"]).upper()]
        node_id = str(data["id"])
    except KeyError as exc:
        raise OntologyError(f"node missing field: {exc}") from None
    return OntologyNode(
        id=node_id,
        level=level,
        parent=data.get("parent"),
        attributes=attributes_from_payload(data.get("attributes", {})),
    )
