import random
from collections import Counter

import pytest

from lcagraph import Graph, Quantity, execute_query, parse_query, plan_query
from lcagraph.errors import QueryRuntimeError, QuerySemanticError, QuerySyntaxError
from lcagraph.query.ast import Aggregate, Prop, Var
from oracles import naive_result_multiset, random_graph, row_key


# ------------------------------------------------------------------ parsing


def test_parse_minimal_query():
    q = parse_query("MATCH (a:Activity) RETURN a.name")
    assert len(q.patterns) == 1
    assert q.patterns[0].nodes[0].labels == ("Activity",)
    item = q.returns[0]
    assert isinstance(item.expr, Prop) and item.expr.key == "name"


def test_parse_property_map_filter():
    q = parse_query("MATCH (f:Flow {kind: 'product'}) RETURN f.name")
    (key, literal) = q.patterns[0].nodes[0].props[0]
    assert key == "kind" and literal.value == "product"


def test_parse_edge_directions_and_clauses():
    q = parse_query(
        "MATCH (a:Activity)-[e:HAS_OUTPUT]->(f:Flow), (w:Workflow)-[:HAS_STEP]->(a) "
        "WHERE f.kind = 'product' "
        "RETURN DISTINCT a.name AS act, COUNT(*) ORDER BY 2 DESC LIMIT 5"
    )
    assert q.patterns[0].edges[0].direction == "right"
    assert q.distinct and q.limit == 5
    assert q.order_by == ((1, False),)
    assert q.returns[0].alias == "act"
    assert isinstance(q.returns[1].expr, Aggregate)


def test_parse_left_and_undirected_edges():
    q = parse_query("MATCH (a)<-[:R]-(b)-[r]-(c) RETURN COUNT(*)")
    assert q.patterns[0].edges[0].direction == "left"
    assert q.patterns[0].edges[1].direction == "undirected"
    assert q.patterns[0].edges[1].var == "r"


def test_unbound_variable_is_semantic_error():
    with pytest.raises(QuerySemanticError):
        parse_query("MATCH (a:Activity) RETURN b.name")
    with pytest.raises(QuerySemanticError):
        parse_query("MATCH (a) WHERE SUM(a.x) > 1 RETURN a")


def test_syntax_error_reports_position():
    with pytest.raises(QuerySyntaxError) as exc:
        parse_query("MATCH (a:Activity RETURN a")
    assert exc.value.line == 1 and exc.value.column > 0
    with pytest.raises(QuerySyntaxError):
        parse_query("RETURN 1")


def test_order_by_must_match_return():
    with pytest.raises(QuerySemanticError):
        parse_query("MATCH (a) RETURN a ORDER BY 3")
    with pytest.raises(QuerySemanticError):
        parse_query("MATCH (a) RETURN a ORDER BY a.nope")


# ------------------------------------------------------------------ planning


def test_planner_picks_rarest_label():
    g = Graph()
    for _ in range(10):
        g.create_node({"Common"}, {})
    g.create_node({"Rare"}, {})
    q = parse_query("MATCH (a:Common)-[:R]->(b:Rare) RETURN a")
    plan = plan_query(q, g)
    assert plan.seeds == (1,)
    assert plan.estimates == (1,)


def test_planner_tie_breaks_to_earliest():
    g = Graph()
    g.create_node({"X"}, {})
    g.create_node({"Y"}, {})
    q = parse_query("MATCH (a:X)-[:R]->(b:Y) RETURN a")
    assert plan_query(q, g).seeds == (0,)


# ------------------------------------------------------------------ executing


def _row_multiset(table):
    return Counter(row_key(row) for row in table.rows)


def test_count_activities(fixture_graph):
    table = execute_query(parse_query("MATCH (a:Activity) RETURN COUNT(*)"), fixture_graph)
    assert table.rows == [[6]]


def test_workflow_yield_sums(fixture_graph):
    q = parse_query(
        "MATCH (w:Workflow)-[:HAS_STEP]->(a:Activity)"
        "-[e:HAS_OUTPUT]->(f:Flow {name: 'succinic acid'}) "
        "RETURN w.workflow_id, SUM(e.amount) ORDER BY 1"
    )
    table = execute_query(q, fixture_graph)
    assert table.rows == [["W1", 1.95], ["W2", 0.8]]


def test_where_and_quantity_comparison(fixture_graph):
    q = parse_query(
        "MATCH (a:Activity)-[e:HAS_INPUT]->(f:Flow) "
        "WHERE f.name = 'glucose' RETURN a.name, a.workflow_id ORDER BY 2"
    )
    table = execute_query(q, fixture_graph)
    assert table.rows == [["fermentation", "W1"], ["fermentation", "W2"]]


def test_missing_property_compares_false(fixture_graph):
    q = parse_query("MATCH (a:Activity) WHERE a.nonexistent = 1 RETURN COUNT(*)")
    assert execute_query(q, fixture_graph).rows == [[0]]


def test_aggregate_empty_group_conventions():
    g = Graph()
    assert execute_query(parse_query("MATCH (a:Z) RETURN SUM(a.x)"), g).rows == [[0]]
    assert execute_query(parse_query("MATCH (a:Z) RETURN AVG(a.x)"), g).rows == [[None]]
    assert execute_query(parse_query("MATCH (a:Z) RETURN COUNT(*)"), g).rows == [[0]]


def test_sum_over_text_is_runtime_error(fixture_graph):
    q = parse_query("MATCH (a:Activity) RETURN SUM(a.name)")
    with pytest.raises(QueryRuntimeError):
        execute_query(q, fixture_graph)


def test_mixed_units_is_runtime_error():
    g = Graph()
    g.create_node({"M"}, {"q": Quantity(1.0, "kg")})
    g.create_node({"M"}, {"q": Quantity(2.0, "MJ")})
    with pytest.raises(QueryRuntimeError):
        execute_query(parse_query("MATCH (a:M) RETURN SUM(a.q)"), g)


def test_edges_distinct_within_pattern():
    g = Graph()
    a = g.create_node({"A"}, {})
    b = g.create_node({"A"}, {})
    g.create_edge("R", a, b, {})
    # a two-edge undirected path cannot reuse the single edge
    q = parse_query("MATCH (x:A)-[e1:R]-(y:A)-[e2:R]-(z:A) RETURN COUNT(*)")
    assert execute_query(q, g).rows == [[0]]


def test_homomorphic_node_binding():
    g = Graph()
    a = g.create_node({"A"}, {})
    b = g.create_node({"A"}, {})
    g.create_edge("R", a, b, {})
    g.create_edge("S", a, b, {})
    # x and z may bind the same node
    q = parse_query("MATCH (x:A)-[:R]->(y:A), (z:A)-[:S]->(y) RETURN COUNT(*)")
    assert execute_query(q, g).rows == [[1]]


def test_execution_is_read_only(fixture_graph):
    before = fixture_graph.dump()
    execute_query(
        parse_query("MATCH (w:Workflow)-[:HAS_STEP]->(a) RETURN w, COUNT(a)"),
        fixture_graph,
    )
    assert fixture_graph.dump() == before


# --------------------------------------------------------- oracle templates

TEMPLATES = [
    "MATCH (a) RETURN COUNT(*)",
    "MATCH (a:A) RETURN a.p",
    "MATCH (a:A {p: 'x'}) RETURN a.num",
    "MATCH (a)-[:R]->(b) RETURN COUNT(*)",
    "MATCH (a)-[e:R]->(b:B) RETURN a.p, b.p",
    "MATCH (a)<-[:S]-(b) WHERE a.num >= 5 RETURN a.num, b.num",
    "MATCH (a)-[e]-(b) RETURN COUNT(e)",
    "MATCH (a:A)-[:R]->(b)-[:S]->(c) RETURN a.p, c.p",
    "MATCH (a), (b:B) WHERE a.num < b.num RETURN COUNT(*)",
    "MATCH (a:B) RETURN DISTINCT a.p",
    "MATCH (a)-[:R]->(b) RETURN a.p, COUNT(*)",
    "MATCH (a) WHERE a.p = 'x' OR NOT a.num < 5 RETURN a.p, a.num",
    "MATCH (a:A)-[e:R]->(a) RETURN COUNT(*)",
    "MATCH (a) RETURN SUM(a.num), AVG(a.num), MIN(a.num), MAX(a.num)",
]


def test_executor_matches_naive_oracle():
    rng = random.Random(101)
    for _ in range(40):
        g = random_graph(rng, max_nodes=12, max_edges=18)
        for text in TEMPLATES:
            q = parse_query(text)
            got = _row_multiset(execute_query(q, g))
            want = naive_result_multiset(g, q)
            assert got == want, f"mismatch for {text!r}"


def test_order_by_and_limit_invariants():
    rng = random.Random(55)
    for _ in range(20):
        g = random_graph(rng, max_nodes=10, max_edges=15)
        base = parse_query("MATCH (a) RETURN a.num, a.p")
        ordered = parse_query("MATCH (a) RETURN a.num, a.p ORDER BY 1, 2")
        limited = parse_query("MATCH (a) RETURN a.num, a.p ORDER BY 1, 2 LIMIT 3")
        rows_base = execute_query(base, g).rows
        rows_ordered = execute_query(ordered, g).rows
        rows_limited = execute_query(limited, g).rows
        assert _row_multiset(execute_query(base, g)) == Counter(
            row_key(r) for r in rows_ordered
        )
        assert rows_limited == rows_ordered[:3]
        assert len(rows_base) == len(rows_ordered)
        # nulls sort last
        nums = [r[0] for r in rows_ordered]
        non_null = [n for n in nums if n is not None]
        assert nums == non_null + [None] * (len(nums) - len(non_null))


def test_monotone_filter_subset_property():
    rng = random.Random(77)
    for _ in range(20):
        g = random_graph(rng, max_nodes=12, max_edges=18)
        loose = parse_query("MATCH (a) WHERE a.num >= 3 RETURN a.num")
        tight = parse_query("MATCH (a) WHERE a.num >= 6 RETURN a.num")
        loose_rows = _row_multiset(execute_query(loose, g))
        tight_rows = _row_multiset(execute_query(tight, g))
        assert all(tight_rows[k] <= loose_rows[k] for k in tight_rows)


def test_distinct_removes_duplicates_only():
    rng = random.Random(91)
    for _ in range(10):
        g = random_graph(rng, max_nodes=15, max_edges=10)
        plain = execute_query(parse_query("MATCH (a) RETURN a.p"), g)
        distinct = execute_query(parse_query("MATCH (a) RETURN DISTINCT a.p"), g)
        assert set(_row_multiset(distinct)) == set(_row_multiset(plain))
        assert all(c == 1 for c in _row_multiset(distinct).values())


def test_column_names_use_alias_or_text(fixture_graph):
    table = execute_query(
        parse_query("MATCH (w:Workflow) RETURN w.workflow_id AS id, COUNT(*)"),
        fixture_graph,
    )
    assert table.columns == ["id", "COUNT(*)"]
