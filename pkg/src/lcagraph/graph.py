"""In-memory labeled-property-graph store.

Nodes carry a set of labels plus a property map; edges have exactly one
relationship type and are directed. A label index and per-node adjacency
lists keep lookups proportional to the result size rather than the graph
size.

Concurrency: single writer, multiple readers. Mutations require exclusive
access; read methods never mutate, so any number of threads may read a
frozen snapshot.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

from .errors import (
    DumpFormatError,
    IntegrityError,
    UnknownEntityError,
    ValueKindError,
    VersionMismatchError,
)
from .values import check_props, check_value, value_from_json, value_to_json

DUMP_HEADER = "lcagraph-dump v1"

OUT = "out"
IN = "in"
BOTH = "both"


@dataclass(slots=True)
class Node:
    id: int
    labels: set
    props: dict


@dataclass(slots=True)
class Edge:
    id: int
    rel_type: str
    src: int
    dst: int
    props: dict


class Graph:
    """Mutable labeled property graph with label and adjacency indexes."""

    def __init__(self):
        self._nodes = {}
        self._edges = {}
        self._label_index = {}
        self._out = {}
        self._in = {}
        # ids are never reused, so stale references are always detectable
        self._next_id = 1

    # ------------------------------------------------------------------ basics

    @property
    def node_count(self):
        return len(self._nodes)

    @property
    def edge_count(self):
        return len(self._edges)

    def node_ids(self):
        return list(self._nodes)

    def edge_ids(self):
        return list(self._edges)

    def nodes(self):
        return self._nodes.values()

    def edges(self):
        return self._edges.values()

    def _fresh_id(self):
        i = self._next_id
        self._next_id += 1
        return i

    # --------------------------------------------------------------- mutation

    def create_node(self, labels=(), props=None):
        """Create a node and return its id."""
        labels = set(labels)
        for label in labels:
            if not isinstance(label, str) or not label:
                raise ValueKindError(f"label must be non-empty text, got {label!r}")
        props = check_props(props) if props else {}
        nid = self._fresh_id()
        self._nodes[nid] = Node(nid, labels, props)
        self._out[nid] = []
        self._in[nid] = []
        for label in labels:
            self._label_index.setdefault(label, set()).add(nid)
        return nid

    def create_edge(self, rel_type, src, dst, props=None):
        """Create a directed edge src -> dst and return its id."""
        if not rel_type or not isinstance(rel_type, str):
            raise ValueKindError(f"rel_type must be non-empty text, got {rel_type!r}")
        if src not in self._nodes:
            raise IntegrityError(f"unknown src node {src}")
        if dst not in self._nodes:
            raise IntegrityError(f"unknown dst node {dst}")
        props = check_props(props) if props else {}
        eid = self._fresh_id()
        self._edges[eid] = Edge(eid, rel_type, src, dst, props)
        self._out[src].append(eid)
        self._in[dst].append(eid)
        return eid

    def set_prop(self, target, key, value):
        """Set one property on a node or edge."""
        entity = self._require(target)
        if not isinstance(key, str) or not key:
            raise ValueKindError(f"property key must be non-empty text, got {key!r}")
        entity.props[key] = check_value(value)

    def remove_prop(self, target, key):
        """Remove a property; returns False when it was not present."""
        entity = self._require(target)
        if key not in entity.props:
            return False
        del entity.props[key]
        return True

    def add_label(self, node_id, label):
        node = self._require_node(node_id)
        if not isinstance(label, str) or not label:
            raise ValueKindError(f"label must be non-empty text, got {label!r}")
        node.labels.add(label)
        self._label_index.setdefault(label, set()).add(node_id)

    def remove_label(self, node_id, label):
        """Remove a label; returns False when it was not present."""
        node = self._require_node(node_id)
        if label not in node.labels:
            return False
        node.labels.discard(label)
        bucket = self._label_index.get(label)
        if bucket is not None:
            bucket.discard(node_id)
            if not bucket:
                del self._label_index[label]
        return True

    def delete(self, target, detach=False):
        """Delete a node or edge; returns the number of entities removed.

        Deleting a node with incident edges requires detach=True, which also
        removes those edges; otherwise nothing is removed and an
        IntegrityError is raised.
        """
        if target in self._edges:
            self._remove_edge(target)
            return 1
        node = self._require_node(target)
        incident = set(self._out[target]) | set(self._in[target])
        if incident and not detach:
            raise IntegrityError(
                f"node {target} has {len(incident)} incident edge(s); pass detach=True"
            )
        for eid in incident:
            self._remove_edge(eid)
        for label in node.labels:
            bucket = self._label_index.get(label)
            if bucket is not None:
                bucket.discard(target)
                if not bucket:
                    del self._label_index[label]
        del self._nodes[target]
        del self._out[target]
        del self._in[target]
        return 1 + len(incident)

    def _remove_edge(self, eid):
        edge = self._edges.pop(eid)
        self._out[edge.src].remove(eid)
        self._in[edge.dst].remove(eid)

    # ------------------------------------------------------------------ reads

    def get_node(self, node_id):
        return self._nodes.get(node_id)

    def get_edge(self, edge_id):
        return self._edges.get(edge_id)

    def get_entity(self, target):
        """Return the Node or Edge with this id, or None when absent."""
        return self._nodes.get(target) or self._edges.get(target)

    def has_node(self, node_id):
        return node_id in self._nodes

    def nodes_with_label(self, label):
        """All node ids carrying the label; unknown labels yield the empty set."""
        return set(self._label_index.get(label, ()))

    def label_cardinality(self, label):
        return len(self._label_index.get(label, ()))

    def labels(self):
        return set(self._label_index)

    def neighbors(self, node_id, direction=BOTH, rel_type=None):
        """Incident edges of a node as (edge id, other node id) pairs.

        Cost is proportional to the node's degree. A self-loop shows up once
        per matching direction, so twice under direction="both".
        """
        self._require_node(node_id)
        result = []
        if direction in (OUT, BOTH):
            for eid in self._out[node_id]:
                edge = self._edges[eid]
                if rel_type is None or edge.rel_type == rel_type:
                    result.append((eid, edge.dst))
        if direction in (IN, BOTH):
            for eid in self._in[node_id]:
                edge = self._edges[eid]
                if rel_type is None or edge.rel_type == rel_type:
                    result.append((eid, edge.src))
        return result

    def degree(self, node_id):
        self._require_node(node_id)
        return len(self._out[node_id]) + len(self._in[node_id])

    def _require(self, target):
        entity = self.get_entity(target)
        if entity is None:
            raise UnknownEntityError(f"no node or edge with id {target}")
        return entity

    def _require_node(self, node_id):
        node = self._nodes.get(node_id)
        if node is None:
            raise UnknownEntityError(f"no node with id {node_id}")
        return node

    # ------------------------------------------------------------------- copy

    def copy(self):
        """Deep copy; used to make multi-statement mutations atomic."""
        g = Graph.__new__(Graph)
        g._nodes = {
            nid: Node(nid, set(n.labels), dict(n.props)) for nid, n in self._nodes.items()
        }
        g._edges = {
            eid: Edge(eid, e.rel_type, e.src, e.dst, dict(e.props))
            for eid, e in self._edges.items()
        }
        g._label_index = {label: set(ids) for label, ids in self._label_index.items()}
        g._out = {nid: list(eids) for nid, eids in self._out.items()}
        g._in = {nid: list(eids) for nid, eids in self._in.items()}
        g._next_id = self._next_id
        return g

    # --------------------------------------------------------------- snapshot

    def dump(self):
        """Serialize to the line-oriented snapshot format.

        Deterministic: equal graphs produce byte-identical dumps.
        """
        out = io.StringIO()
        out.write(DUMP_HEADER + "\n")
        out.write(f"counts nodes={len(self._nodes)} edges={len(self._edges)}\n")
        for nid in sorted(self._nodes):
            node = self._nodes[nid]
            record = {
                "kind": "node",
                "id": nid,
                "labels": sorted(node.labels),
                "props": {k: value_to_json(node.props[k]) for k in sorted(node.props)},
            }
            out.write(json.dumps(record, separators=(",", ":")) + "\n")
        for eid in sorted(self._edges):
            edge = self._edges[eid]
            record = {
                "kind": "edge",
                "id": eid,
                "rel_type": edge.rel_type,
                "src": edge.src,
                "dst": edge.dst,
                "props": {k: value_to_json(edge.props[k]) for k in sorted(edge.props)},
            }
            out.write(json.dumps(record, separators=(",", ":")) + "\n")
        return out.getvalue()

    @classmethod
    def load(cls, text):
        """Rebuild a graph from a snapshot dump."""
        lines = text.splitlines()
        if not lines:
            raise DumpFormatError("empty dump", line=1)
        if lines[0] != DUMP_HEADER:
            raise VersionMismatchError(
                f"unsupported dump header {lines[0]!r}, expected {DUMP_HEADER!r}", line=1
            )
        if len(lines) < 2 or not lines[1].startswith("counts "):
            raise DumpFormatError("missing counts line", line=2)
        try:
            fields = dict(part.split("=") for part in lines[1].split()[1:])
            n_nodes, n_edges = int(fields["nodes"]), int(fields["edges"])
        except (ValueError, KeyError):
            raise DumpFormatError(f"malformed counts line {lines[1]!r}", line=2) from None

        g = cls()
        max_id = 0
        for lineno, line in enumerate(lines[2:], start=3):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DumpFormatError(f"bad JSON record: {exc}", line=lineno) from None
            kind = record.get("kind")
            try:
                if kind == "node":
                    nid = int(record["id"])
                    labels = set(record["labels"])
                    props = {k: value_from_json(v) for k, v in record["props"].items()}
                    g._nodes[nid] = Node(nid, labels, check_props(props))
                    g._out[nid] = []
                    g._in[nid] = []
                    for label in labels:
                        g._label_index.setdefault(label, set()).add(nid)
                elif kind == "edge":
                    eid = int(record["id"])
                    src, dst = int(record["src"]), int(record["dst"])
                    if src not in g._nodes or dst not in g._nodes:
                        raise DumpFormatError(
                            f"edge {eid} references unknown node", line=lineno
                        )
                    props = {k: value_from_json(v) for k, v in record["props"].items()}
                    g._edges[eid] = Edge(eid, record["rel_type"], src, dst, check_props(props))
                    g._out[src].append(eid)
                    g._in[dst].append(eid)
                    max_id = max(max_id, eid)
                else:
                    raise DumpFormatError(f"unknown record kind {kind!r}", line=lineno)
            except (KeyError, TypeError, ValueError) as exc:
                raise DumpFormatError(f"malformed record: {exc}", line=lineno) from None
            max_id = max(max_id, int(record["id"]))
        if len(g._nodes) != n_nodes or len(g._edges) != n_edges:
            raise DumpFormatError(
                f"counts header says nodes={n_nodes} edges={n_edges} but dump has "
                f"nodes={len(g._nodes)} edges={len(g._edges)}"
            )
        g._next_id = max_id + 1
        return g


def graph_equal(a, b):
    """Strict equality: same ids, labels, props, and edges."""
    return a.dump() == b.dump()


def _node_sort_key(graph, nid):
    node = graph.get_node(nid)
    props = {k: value_to_json(node.props[k]) for k in sorted(node.props)}
    return (sorted(node.labels), json.dumps(props, sort_keys=True), nid)


def normalized_dump(graph, renumber_nodes=False):
    """Dump with edge ids (and optionally node ids) renumbered canonically.

    Edge identity is rebuilt from (src, rel_type, dst, props) ordering, which
    makes the dump insensitive to edge creation order. With renumber_nodes,
    nodes are ordered by (labels, props) content, which gives an isomorphism
    check adequate for fixtures whose nodes are content-distinct (ties fall
    back to original id order).
    """
    if renumber_nodes:
        order = sorted(graph.node_ids(), key=lambda nid: _node_sort_key(graph, nid))
    else:
        order = sorted(graph.node_ids())
    node_map = {nid: i + 1 for i, nid in enumerate(order)}

    g = Graph()
    g._next_id = len(node_map) + 1
    for nid in order:
        node = graph.get_node(nid)
        new_id = node_map[nid]
        g._nodes[new_id] = Node(new_id, set(node.labels), dict(node.props))
        g._out[new_id] = []
        g._in[new_id] = []
        for label in node.labels:
            g._label_index.setdefault(label, set()).add(new_id)

    def edge_key(edge):
        props = {k: value_to_json(edge.props[k]) for k in sorted(edge.props)}
        return (
            node_map[edge.src],
            edge.rel_type,
            node_map[edge.dst],
            json.dumps(props, sort_keys=True),
            edge.id,
        )

    for edge in sorted(graph.edges(), key=edge_key):
        g.create_edge(edge.rel_type, node_map[edge.src], node_map[edge.dst], dict(edge.props))
    return g.dump()
