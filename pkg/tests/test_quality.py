import json

from lcagraph import Graph, Quantity, fair_report, score_quality
from lcagraph.figures import render_fair_figure, render_quality_figure
from lcagraph.quality import fair_json, quality_json


def _wf(graph, wid):
    return next(
        n
        for n in graph.nodes_with_label("Workflow")
        if graph.get_node(n).props["workflow_id"] == wid
    )


def test_fixture_quality_scores(fixture_graph, schema):
    report = score_quality(fixture_graph, schema)
    assert report.accuracy_proxy.ratio == 1.0
    assert report.consistency.ratio == 1.0
    assert report.precision.ratio == 1.0
    assert report.traceability.ratio == 1.0
    # W2 lacks transportation/usage/disposal stages
    assert report.completeness.numerator == 1 and report.completeness.denominator == 2
    assert report.completeness.detail == [_wf(fixture_graph, "W2")]


def test_detail_length_matches_gap(fixture_graph, schema):
    for dim in score_quality(fixture_graph, schema).dimensions():
        assert len(dim.detail) == dim.denominator - dim.numerator


def test_empty_graph_is_vacuously_perfect(schema):
    report = score_quality(Graph(), schema)
    assert all(d.ratio == 1.0 for d in report.dimensions())


def test_traceability_drops_after_reference_removal(fixture_graph, schema):
    w1 = _wf(fixture_graph, "W1")
    (eid, _), = fixture_graph.neighbors(w1, "out", "HAS_REFERENCE")
    fixture_graph.delete(eid)
    dim = score_quality(fixture_graph, schema).traceability
    assert dim.ratio == 0.5 and dim.detail == [w1]


def test_consistency_arithmetic(schema):
    g = Graph()
    for i in range(19):
        g.create_node({"Location"}, {"code": f"L{i}"})
    # 19 conforming entities plus 2 violations on 1 extra node and 1 existing
    g.create_node({"Bogus"}, {})
    g.set_prop(sorted(g.node_ids())[0], "code", 7)
    dim = score_quality(g, schema).consistency
    assert dim.denominator == 20 and dim.numerator == 18
    assert abs(dim.ratio - 0.9) < 1e-12


def test_precision_counts_unitless_amounts(fixture_graph, schema):
    act = sorted(fixture_graph.nodes_with_label("Activity"))[0]
    flow = sorted(fixture_graph.nodes_with_label("Flow"))[0]
    fixture_graph.create_edge("HAS_INPUT", act, flow, {})
    dim = score_quality(fixture_graph, schema).precision
    assert dim.denominator == 12 and dim.numerator == 11


def test_accuracy_proxy_counts_unknown_terms(fixture_graph, schema):
    before = score_quality(fixture_graph, schema).accuracy_proxy
    fixture_graph.create_node({"Mystery"}, {"whatever": 1})
    after = score_quality(fixture_graph, schema).accuracy_proxy
    assert after.denominator == before.denominator + 2
    assert sorted(after.detail) == ["label:Mystery", "prop:whatever"]


def test_quality_monotone_under_fixes(fixture_graph, schema):
    fixture_graph.create_node({"Bogus"}, {})
    broken = score_quality(fixture_graph, schema)
    bad = sorted(fixture_graph.nodes_with_label("Bogus"))[0]
    fixture_graph.delete(bad, detach=True)
    fixed = score_quality(fixture_graph, schema)
    assert fixed.consistency.ratio >= broken.consistency.ratio
    assert fixed.accuracy_proxy.ratio >= broken.accuracy_proxy.ratio


def test_quality_deterministic_and_readonly(fixture_graph, schema):
    before = fixture_graph.dump()
    a = quality_json(score_quality(fixture_graph, schema))
    b = quality_json(score_quality(fixture_graph, schema))
    assert a == b
    assert fixture_graph.dump() == before
    parsed = json.loads(a)
    assert set(parsed) == {
        "accuracy_proxy",
        "completeness",
        "consistency",
        "precision",
        "traceability",
    }


def test_fair_all_pass_on_fixture(fixture_graph, schema):
    report = fair_report(fixture_graph, schema)
    assert report.all_pass()
    assert [d.name for d in report.dimensions()] == [
        "findable",
        "accessible",
        "interoperable",
        "reusable (reproducibility)",
    ]


def test_fair_no_references_reason(fixture_graph, schema):
    for rid in list(fixture_graph.nodes_with_label("Reference")):
        fixture_graph.delete(rid, detach=True)
    report = fair_report(fixture_graph, schema)
    assert not report.reusable.passed
    assert "no references" in report.reusable.reasons


def test_fair_violation_fails_interoperable(fixture_graph, schema):
    f1, f2 = sorted(fixture_graph.nodes_with_label("Flow"))[:2]
    fixture_graph.create_edge("HAS_INPUT", f1, f2, {"amount": Quantity(1.0, "kg")})
    report = fair_report(fixture_graph, schema)
    assert not report.interoperable.passed
    assert report.findable.passed and report.accessible.passed


def test_fair_missing_metadata_fails_findable(schema):
    g = Graph()
    g.create_node({"Workflow"}, {"workflow_id": "W1"})
    report = fair_report(g, schema)
    assert not report.findable.passed


def test_fair_text_and_json_render(fixture_graph, schema):
    report = fair_report(fixture_graph, schema)
    assert "FAIR report" in report.to_text()
    assert json.loads(fair_json(report))["findable"]["passed"] is True


def test_quality_figure_renders(tmp_path, fixture_graph, schema):
    out = tmp_path / "quality.png"
    render_quality_figure(score_quality(fixture_graph, schema), out)
    assert out.stat().st_size > 0


def test_fair_figure_renders(tmp_path, fixture_graph, schema):
    out = tmp_path / "fair.svg"
    render_fair_figure(fair_report(fixture_graph, schema), out)
    assert out.stat().st_size > 0
