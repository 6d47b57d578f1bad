"""Query evaluation over a frozen graph snapshot.

Semantics: homomorphic node binding (two variables may bind the same
node), with distinct edges within one path pattern. Missing property
access yields null; comparisons involving null are false. Read-only.
"""

from __future__ import annotations

from functools import cmp_to_key

from ..errors import QueryRuntimeError
from ..values import Quantity
from .ast import Aggregate, And, Cmp, Literal, Not, Or, Prop, ResultTable, Var
from .planner import Plan, plan_query


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def values_equal(a, b):
    if a is None or b is None:
        return False
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    if _is_number(a) and _is_number(b):
        return a == b
    if type(a) is not type(b) and not (_is_number(a) and _is_number(b)):
        if isinstance(a, Quantity) and isinstance(b, Quantity):
            pass
        else:
            return False
    return a == b


def _order_cmp(a, b):
    """Total deterministic ordering used by ORDER BY and MIN/MAX."""
    ra, rb = _type_rank(a), _type_rank(b)
    if ra != rb:
        return -1 if ra < rb else 1
    if isinstance(a, Quantity):
        ka, kb = (a.unit, a.magnitude), (b.unit, b.magnitude)
        return -1 if ka < kb else (1 if ka > kb else 0)
    if isinstance(a, list):
        a, b = tuple(a), tuple(b)
    return -1 if a < b else (1 if a > b else 0)


def _type_rank(value):
    if isinstance(value, bool):
        return 0
    if _is_number(value):
        return 1
    if isinstance(value, str):
        return 2
    if isinstance(value, Quantity):
        return 3
    return 4


def _compare(op, a, b):
    """WHERE-clause comparison; null or incomparable operands yield False."""
    if a is None or b is None:
        return False
    if op == "=":
        return values_equal(a, b)
    if op == "<>":
        return not values_equal(a, b)
    if _is_number(a) and _is_number(b):
        pass
    elif isinstance(a, str) and isinstance(b, str):
        pass
    elif isinstance(a, Quantity) and isinstance(b, Quantity) and a.unit == b.unit:
        a, b = a.magnitude, b.magnitude
    else:
        return False
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    raise QueryRuntimeError(f"unknown comparison operator {op!r}")


def _eval(expr, binding, graph):
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, Var):
        return binding[expr.name]
    if isinstance(expr, Prop):
        entity = graph.get_entity(binding[expr.var])
        if entity is None:
            return None
        return entity.props.get(expr.key)
    if isinstance(expr, Cmp):
        return _compare(expr.op, _eval(expr.left, binding, graph), _eval(expr.right, binding, graph))
    if isinstance(expr, And):
        return bool(_eval(expr.left, binding, graph)) and bool(_eval(expr.right, binding, graph))
    if isinstance(expr, Or):
        return bool(_eval(expr.left, binding, graph)) or bool(_eval(expr.right, binding, graph))
    if isinstance(expr, Not):
        return not bool(_eval(expr.operand, binding, graph))
    raise QueryRuntimeError(f"cannot evaluate expression {expr!r}")


# ---------------------------------------------------------------- matching


def _node_var(pattern_id, pos, node):
    return node.var if node.var else f"\x00n{pattern_id}.{pos}"


def _edge_var(pattern_id, pos, edge):
    return edge.var if edge.var else f"\x00e{pattern_id}.{pos}"


def _node_ok(graph, nid, node_pattern):
    node = graph.get_node(nid)
    if node is None:
        return False
    if not set(node_pattern.labels) <= node.labels:
        return False
    for key, literal in node_pattern.props:
        value = node.props.get(key)
        if value is None or not values_equal(value, literal.value):
            return False
    return True


def _seed_candidates(graph, node_pattern, binding, var):
    if var in binding:
        cands = [binding[var]]
    elif node_pattern.labels:
        smallest = min(node_pattern.labels, key=graph.label_cardinality)
        cands = sorted(graph.nodes_with_label(smallest))
    else:
        cands = sorted(graph.node_ids())
    return [nid for nid in cands if _node_ok(graph, nid, node_pattern)]


def _match_pattern(graph, pattern, pattern_id, binding, seed):
    nodes, edges = pattern.nodes, pattern.edges
    order = [seed] + list(range(seed + 1, len(nodes))) + list(range(seed - 1, -1, -1))

    def extend(binding, used_edges, step):
        if step == len(order):
            yield binding
            return
        pos = order[step]
        node_pattern = nodes[pos]
        nvar = _node_var(pattern_id, pos, node_pattern)
        if pos == seed:
            for nid in _seed_candidates(graph, node_pattern, binding, nvar):
                yield from extend({**binding, nvar: nid}, used_edges, step + 1)
            return

        anchor_pos = pos - 1 if pos > seed else pos + 1
        edge_idx = pos - 1 if pos > seed else pos
        edge_pattern = edges[edge_idx]
        evar = _edge_var(pattern_id, edge_idx, edge_pattern)
        anchor_var = _node_var(pattern_id, anchor_pos, nodes[anchor_pos])
        anchor_id = binding[anchor_var]
        anchor_is_left = anchor_pos == edge_idx
        if edge_pattern.direction == "undirected":
            direction = "both"
        elif edge_pattern.direction == "right":
            direction = "out" if anchor_is_left else "in"
        else:
            direction = "in" if anchor_is_left else "out"
        # a self-loop shows up twice under "both"; one binding suffices
        seen = set()
        for eid, other in graph.neighbors(anchor_id, direction, edge_pattern.rel_type):
            if (eid, other) in seen:
                continue
            seen.add((eid, other))
            if eid in used_edges:
                continue
            if evar in binding and binding[evar] != eid:
                continue
            if nvar in binding and binding[nvar] != other:
                continue
            if not _node_ok(graph, other, node_pattern):
                continue
            new_binding = {**binding, evar: eid, nvar: other}
            yield from extend(new_binding, used_edges | {eid}, step + 1)

    yield from extend(binding, frozenset(), 0)


def _enumerate_bindings(graph, plan):
    query = plan.query
    bindings = [{}]
    for pattern_id, pattern in enumerate(query.patterns):
        seed = plan.seeds[pattern_id]
        new_bindings = []
        for binding in bindings:
            new_bindings.extend(_match_pattern(graph, pattern, pattern_id, binding, seed))
        bindings = new_bindings
    return bindings


# -------------------------------------------------------------- aggregation


def _numeric(values, func):
    """Magnitudes of numbers/quantities; mixed quantity units are an error."""
    out = []
    unit = None
    for value in values:
        if isinstance(value, Quantity):
            if unit is None:
                unit = value.unit
            elif value.unit != unit:
                raise QueryRuntimeError(
                    f"{func} over mixed units: {unit!r} and {value.unit!r}"
                )
            out.append(value.magnitude)
        elif _is_number(value):
            out.append(value)
        else:
            raise QueryRuntimeError(f"{func} over non-numeric value {value!r}")
    return out


def _aggregate(agg, members, graph):
    if agg.func == "COUNT":
        if agg.arg is None:
            return len(members)
        return sum(1 for b in members if _eval(agg.arg, b, graph) is not None)
    values = [v for b in members if (v := _eval(agg.arg, b, graph)) is not None]
    if agg.func == "SUM":
        return sum(_numeric(values, "SUM")) if values else 0
    if not values:
        return None
    if agg.func == "AVG":
        nums = _numeric(values, "AVG")
        return sum(nums) / len(nums)
    if agg.func in ("MIN", "MAX"):
        key = cmp_to_key(_order_cmp)
        return min(values, key=key) if agg.func == "MIN" else max(values, key=key)
    raise QueryRuntimeError(f"unknown aggregate {agg.func}")


def _hashable(value):
    if isinstance(value, list):
        return ("\x00list", tuple(value))
    return value


def execute_query(query_or_plan, graph):
    """Evaluate a query (or a prepared plan) and return a ResultTable."""
    if isinstance(query_or_plan, Plan):
        plan = query_or_plan
    else:
        plan = plan_query(query_or_plan, graph)
    query = plan.query

    bindings = _enumerate_bindings(graph, plan)
    if query.where is not None:
        bindings = [b for b in bindings if bool(_eval(query.where, b, graph))]

    has_agg = any(item.is_aggregate() for item in query.returns)
    columns = [item.name for item in query.returns]

    if not has_agg:
        rows = [
            [_eval(item.expr, b, graph) for item in query.returns] for b in bindings
        ]
    else:
        group_indexes = [i for i, item in enumerate(query.returns) if not item.is_aggregate()]
        groups = {}
        for b in bindings:
            key = tuple(
                _hashable(_eval(query.returns[i].expr, b, graph)) for i in group_indexes
            )
            groups.setdefault(key, []).append(b)
        if not group_indexes and not groups:
            groups[()] = []
        rows = []
        for key in groups:
            members = groups[key]
            row = []
            key_iter = iter(key)
            for item in query.returns:
                if item.is_aggregate():
                    row.append(_aggregate(item.expr, members, graph))
                else:
                    value = next(key_iter)
                    row.append(list(value[1]) if isinstance(value, tuple) and value and value[0] == "\x00list" else value)
            rows.append(row)

    if query.distinct:
        seen = set()
        deduped = []
        for row in rows:
            key = tuple(_hashable(v) for v in row)
            if key not in seen:
                seen.add(key)
                deduped.append(row)
        rows = deduped

    if query.order_by:

        def compare(r1, r2):
            for index, ascending in query.order_by:
                a, b = r1[index], r2[index]
                if a is None and b is None:
                    continue
                if a is None:
                    return 1  # nulls last either way
                if b is None:
                    return -1
                c = _order_cmp(a, b)
                if c:
                    return c if ascending else -c
            return 0

        rows.sort(key=cmp_to_key(compare))

    if query.limit is not None:
        rows = rows[: query.limit]

    return ResultTable(columns=columns, rows=rows)
