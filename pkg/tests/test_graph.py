import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcagraph import Graph, Quantity, Uncertainty, graph_equal
from lcagraph.errors import (
    DumpFormatError,
    IntegrityError,
    UnknownEntityError,
    ValueKindError,
    VersionMismatchError,
)
from oracles import random_graph, scan_neighbors, scan_nodes_with_label


def test_create_minimal_node():
    g = Graph()
    nid = g.create_node(set(), {})
    assert g.node_count == 1
    node = g.get_node(nid)
    assert node.labels == set() and node.props == {}


def test_create_node_updates_label_index():
    g = Graph()
    nid = g.create_node({"Activity"}, {"name": "fermentation", "stage": "production"})
    assert g.nodes_with_label("Activity") == {nid}


def test_flow_node_with_taxonomy_kind():
    g = Graph()
    nid = g.create_node({"Flow"}, {"name": "glucose", "kind": "intermediate"})
    assert g.get_node(nid).props["kind"] == "intermediate"


def test_nonfinite_property_rejected():
    g = Graph()
    with pytest.raises(ValueKindError):
        g.create_node(set(), {"x": float("nan")})
    with pytest.raises(ValueKindError):
        g.create_node(set(), {"x": [1.0, math.inf]})
    with pytest.raises(ValueKindError):
        Quantity(float("inf"), "kg")
    with pytest.raises(ValueKindError):
        Quantity(1.0, "")


def test_uncertainty_invariants():
    with pytest.raises(ValueKindError):
        Uncertainty("uniform", 2.0, 1.0)
    with pytest.raises(ValueKindError):
        Uncertainty("normal", 0.0, -1.0)
    assert Uncertainty("uniform", 1.0, 2.0).to_json()["lo"] == 1.0


def test_self_loop_edge():
    g = Graph()
    n = g.create_node(set(), {})
    e = g.create_edge("NEXT", n, n, {})
    out = g.neighbors(n, "out")
    inc = g.neighbors(n, "in")
    assert out == [(e, n)] and inc == [(e, n)]


def test_edge_with_quantity_property():
    g = Graph()
    a = g.create_node({"Activity"}, {})
    f = g.create_node({"Flow"}, {})
    e = g.create_edge("HAS_OUTPUT", a, f, {"amount": Quantity(1.0, "kg")})
    assert g.get_edge(e).props["amount"].unit == "kg"


def test_edge_to_missing_node_fails():
    g = Graph()
    a = g.create_node(set(), {})
    with pytest.raises(IntegrityError):
        g.create_edge("HAS_INPUT", a, 9999, {})
    with pytest.raises(ValueKindError):
        g.create_edge("", a, a, {})


def test_property_read_your_write():
    g = Graph()
    n = g.create_node(set(), {})
    g.set_prop(n, "yield", 0.42)
    assert g.get_node(n).props["yield"] == 0.42


def test_add_label_updates_index():
    g = Graph()
    n = g.create_node(set(), {})
    g.add_label(n, "Validated")
    assert n in g.nodes_with_label("Validated")


def test_remove_missing_prop_and_label_report_not_present():
    g = Graph()
    n = g.create_node({"A"}, {})
    assert g.remove_prop(n, "nope") is False
    assert g.remove_label(n, "Nope") is False
    assert g.remove_label(n, "A") is True
    assert g.nodes_with_label("A") == set()


def test_get_entity_views():
    g = Graph()
    n = g.create_node({"X"}, {"a": 1})
    m = g.create_node(set(), {})
    e = g.create_edge("R", n, m, {})
    assert g.get_entity(n).labels == {"X"}
    edge = g.get_entity(e)
    assert (edge.rel_type, edge.src, edge.dst) == ("R", n, m)
    g.delete(m, detach=True)
    assert g.get_entity(m) is None


def test_unknown_label_is_empty_set():
    assert Graph().nodes_with_label("nope") == set()


def test_delete_semantics():
    g = Graph()
    lone = g.create_node(set(), {})
    assert g.delete(lone) == 1

    hub = g.create_node(set(), {})
    others = [g.create_node(set(), {}) for _ in range(3)]
    for o in others:
        g.create_edge("R", hub, o, {})
    with pytest.raises(IntegrityError):
        g.delete(hub, detach=False)
    assert g.node_count == 4 and g.edge_count == 3  # nothing removed
    assert g.delete(hub, detach=True) == 4
    assert g.edge_count == 0


def test_delete_single_edge():
    g = Graph()
    a, b = g.create_node(set(), {}), g.create_node(set(), {})
    e = g.create_edge("R", a, b, {})
    assert g.delete(e) == 1
    assert g.neighbors(a, "out") == []


def test_ids_never_reused():
    g = Graph()
    n = g.create_node(set(), {})
    g.delete(n)
    m = g.create_node(set(), {})
    assert m != n


def _apply_random_ops(g, rng, n_ops, track=None):
    labels = ["A", "B", "C", "D"]
    rels = ["R", "S", "T"]
    for _ in range(n_ops):
        roll = rng.random()
        nodes = g.node_ids()
        if roll < 0.35 or not nodes:
            g.create_node({l for l in labels if rng.random() < 0.4}, {})
        elif roll < 0.65 and len(nodes) >= 2:
            g.create_edge(rng.choice(rels), rng.choice(nodes), rng.choice(nodes), {})
        elif roll < 0.75:
            g.add_label(rng.choice(nodes), rng.choice(labels))
        elif roll < 0.85:
            g.remove_label(rng.choice(nodes), rng.choice(labels))
        elif roll < 0.93:
            edges = g.edge_ids()
            if edges:
                g.delete(rng.choice(edges))
        else:
            g.delete(rng.choice(nodes), detach=True)
        if track is not None:
            track(g)


def _check_indexes(g):
    for label in list(g.labels()) + ["Z"]:
        assert g.nodes_with_label(label) == scan_nodes_with_label(g, label)
    for nid in g.node_ids():
        for direction in ("out", "in", "both"):
            assert sorted(g.neighbors(nid, direction)) == sorted(
                scan_neighbors(g, nid, direction)
            )
    # deletion safety: adjacency references only live edges
    for nid in g.node_ids():
        for eid, other in g.neighbors(nid, "both"):
            assert g.get_edge(eid) is not None and g.has_node(other)


def test_index_coherence_random_mutations():
    rng = random.Random(7)
    g = Graph()
    for step in range(10):
        _apply_random_ops(g, rng, 100)
        _check_indexes(g)


def test_referential_integrity_under_mutation():
    rng = random.Random(11)
    g = Graph()
    _apply_random_ops(g, rng, 500)
    for e in g.edges():
        assert g.has_node(e.src) and g.has_node(e.dst)


def test_snapshot_empty_graph():
    g = Graph()
    dump = g.dump()
    assert dump.splitlines() == ["lcagraph-dump v1", "counts nodes=0 edges=0"]
    assert graph_equal(Graph.load(dump), g)


def test_snapshot_roundtrip_random_graphs():
    rng = random.Random(13)
    for _ in range(20):
        g = random_graph(rng, with_rich_props=True)
        dump = g.dump()
        assert dump == g.dump()  # deterministic
        g2 = Graph.load(dump)
        assert graph_equal(g, g2)
        assert g2.dump() == dump


def test_snapshot_version_mismatch():
    with pytest.raises(VersionMismatchError):
        Graph.load("lcagraph-dump v99\ncounts nodes=0 edges=0\n")


def test_snapshot_malformed_line_reports_line_number():
    dump = "lcagraph-dump v1\ncounts nodes=1 edges=0\nnot json\n"
    with pytest.raises(DumpFormatError) as exc:
        Graph.load(dump)
    assert "line 3" in str(exc.value)


def test_neighbors_unknown_node():
    with pytest.raises(UnknownEntityError):
        Graph().neighbors(5, "out")


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**31))
def test_property_snapshot_roundtrip(seed):
    g = random_graph(random.Random(seed), max_nodes=20, max_edges=30, with_rich_props=True)
    assert graph_equal(Graph.load(g.dump()), g)
