"""Unified-table ingestion: CSV rows -> merge statements -> graph.

Each table kind registers a (parser, statement builder) pair; adding a new
kind touches only the registry. Statements use merge semantics keyed on
identifying properties, so re-ingesting the same bundle matches every
entity instead of duplicating it, and applying is all-or-nothing.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .errors import TableFormatError
from .schema import FLOW_KINDS, STAGES
from .values import Quantity, Uncertainty

WORKFLOW = "workflow"
METADATA = "metadata"
AGENT = "agent"
REFERENCE = "reference"

TABLE_HEADERS = {
    WORKFLOW: [
        "workflow_id",
        "step_index",
        "activity_name",
        "stage",
        "direction",
        "flow_name",
        "flow_kind",
        "amount",
        "unit",
        "unc_kind",
        "unc_a",
        "unc_b",
    ],
    METADATA: ["workflow_id", "key", "value"],
    AGENT: ["workflow_id", "agent_id", "agent_name", "feature_key", "feature_value"],
    REFERENCE: ["workflow_id", "reference_id", "author", "title", "year", "doi"],
}

RESERVED_METADATA_KEYS = (
    "region",
    "functional_unit_desc",
    "functional_unit_amount",
    "functional_unit_unit",
    "boundary",
    "valid_from",
    "valid_to",
)


@dataclass(frozen=True)
class WorkflowRow:
    workflow_id: str
    step_index: int
    activity_name: str
    stage: str | None
    direction: str  # input | output
    flow_name: str
    flow_kind: str
    amount: float
    unit: str
    uncertainty: Uncertainty


@dataclass(frozen=True)
class MetadataRow:
    workflow_id: str
    key: str
    value: str


@dataclass(frozen=True)
class AgentRow:
    workflow_id: str
    agent_id: str
    agent_name: str
    feature_key: str | None
    feature_value: str | None


@dataclass(frozen=True)
class ReferenceRow:
    workflow_id: str
    reference_id: str
    author: str
    title: str
    year: int | None
    doi: str | None


@dataclass(frozen=True)
class Statement:
    """One graph mutation with merge semantics.

    op merge_node: match (label, key) -> update props, else create.
    op merge_edge: match (rel_type, src, dst) between every node matching the
      endpoint keys; a key that matches nothing records a row error and the
      edge is skipped.
    op set_prop: set props on the node matching (label, key).
    Keys are (label, identifying property map) pairs.
    """

    op: str
    label: str | None = None
    key: tuple = ()
    props: tuple = ()
    rel_type: str | None = None
    src: tuple = ()  # (label, key items)
    dst: tuple = ()
    source_line: int = 0

    def to_json(self):
        return json.dumps(
            {
                "op": self.op,
                "label": self.label,
                "key": list(map(list, self.key)),
                "props": [[k, _prop_json(v)] for k, v in self.props],
                "rel_type": self.rel_type,
                "src": _endpoint_json(self.src),
                "dst": _endpoint_json(self.dst),
            },
            separators=(",", ":"),
        )


def _prop_json(value):
    return value.to_json() if isinstance(value, Quantity) else value


def _endpoint_json(endpoint):
    if not endpoint:
        return None
    label, key = endpoint
    return {"label": label, "key": list(map(list, key))}


@dataclass
class IngestSummary:
    nodes_created: int = 0
    nodes_matched: int = 0
    edges_created: int = 0
    edges_matched: int = 0
    props_set: int = 0
    row_errors: list = field(default_factory=list)  # (line, message)

    def merge(self, other):
        self.nodes_created += other.nodes_created
        self.nodes_matched += other.nodes_matched
        self.edges_created += other.edges_created
        self.edges_matched += other.edges_matched
        self.props_set += other.props_set
        self.row_errors.extend(other.row_errors)


# ------------------------------------------------------------------- parsing


def _read_csv(kind, text):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise TableFormatError(f"{kind} table is empty, expected header") from None
    expected = TABLE_HEADERS[kind]
    if [h.strip() for h in header] != expected:
        raise TableFormatError(
            f"{kind} table header mismatch: got {','.join(header)!r}, "
            f"expected {','.join(expected)!r}"
        )
    for lineno, row in enumerate(reader, start=2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != len(expected):
            yield lineno, None, f"expected {len(expected)} columns, got {len(row)}"
            continue
        yield lineno, [cell.strip() for cell in row], None


def _parse_workflow_row(cells):
    (wf, step, name, stage, direction, flow, flow_kind, amount, unit, uk, ua, ub) = cells
    if not wf:
        raise ValueError("workflow_id is empty")
    step_index = int(step)
    if step_index < 0:
        raise ValueError(f"step_index must be non-negative, got {step_index}")
    if not name:
        raise ValueError("activity_name is empty")
    stage = stage or None
    if stage is not None and stage not in STAGES:
        raise ValueError(f"stage {stage!r} not in {STAGES}")
    if direction not in ("input", "output"):
        raise ValueError(f"direction must be input or output, got {direction!r}")
    if not flow:
        raise ValueError("flow_name is empty")
    if flow_kind not in FLOW_KINDS:
        raise ValueError(f"flow_kind {flow_kind!r} not in {FLOW_KINDS}")
    amount_f = float(amount)
    if not unit:
        raise ValueError("unit is empty")
    if uk:
        if uk not in ("uniform", "normal"):
            raise ValueError(f"unc_kind must be uniform or normal, got {uk!r}")
        unc = Uncertainty(uk, float(ua), float(ub))
    else:
        unc = Uncertainty()
    return WorkflowRow(wf, step_index, name, stage, direction, flow, flow_kind, amount_f, unit, unc)


def _parse_metadata_row(cells):
    wf, key, value = cells
    if not wf or not key:
        raise ValueError("workflow_id and key must be non-empty")
    if key == "functional_unit_amount":
        float(value)  # reserved numeric key must parse
    return MetadataRow(wf, key, value)


def _parse_agent_row(cells):
    wf, agent_id, name, fkey, fvalue = cells
    if not wf or not agent_id or not name:
        raise ValueError("workflow_id, agent_id, and agent_name must be non-empty")
    if bool(fkey) != bool(fvalue):
        raise ValueError("feature_key and feature_value must be given together")
    return AgentRow(wf, agent_id, name, fkey or None, fvalue or None)


def _parse_reference_row(cells):
    wf, ref_id, author, title, year, doi = cells
    if not wf or not ref_id:
        raise ValueError("workflow_id and reference_id must be non-empty")
    if not author or not title:
        raise ValueError("author and title must be non-empty")
    return ReferenceRow(wf, ref_id, author, title, int(year) if year else None, doi or None)


_ROW_PARSERS = {
    WORKFLOW: _parse_workflow_row,
    METADATA: _parse_metadata_row,
    AGENT: _parse_agent_row,
    REFERENCE: _parse_reference_row,
}


def parse_table(kind, text):
    """Parse one unified table.

    Returns (rows, row_errors); a bad row never aborts the parse, but a
    wrong header raises TableFormatError. Row uniqueness constraints are
    enforced here as row errors.
    """
    rows, errors = _parse_table_with_lines(kind, text)
    return [r for _, r in rows], errors


def _parse_table_with_lines(kind, text):
    parse_row = _table_registry[kind][0]
    rows = []
    errors = []
    seen = set()
    for lineno, cells, err in _read_csv(kind, text):
        if err is not None:
            errors.append((lineno, err))
            continue
        try:
            row = parse_row(cells)
        except Exception as exc:  # noqa: BLE001
            errors.append((lineno, str(exc)))
            continue
        key = _row_unique_key(kind, row)
        if key is not None:
            if key in seen:
                errors.append((lineno, f"duplicate row key {key}"))
                continue
            seen.add(key)
        rows.append((lineno, row))
    return rows, errors


def _row_unique_key(kind, row):
    if kind == WORKFLOW:
        return (row.workflow_id, row.step_index, row.direction, row.flow_name)
    if kind == AGENT:
        return (row.agent_id, row.feature_key) if row.feature_key else None
    if kind == REFERENCE:
        return row.reference_id
    return None


# --------------------------------------------------------------- statements


def _node_key(label, **props):
    return (label, tuple(sorted(props.items())))


def build_workflow_statements(rows):
    statements = []
    activities = {}  # (wf, step) -> set of activity keys
    for lineno, row in rows:
        wf_key = _node_key("Workflow", workflow_id=row.workflow_id)
        act_key = _node_key(
            "Activity",
            workflow_id=row.workflow_id,
            step_index=row.step_index,
            name=row.activity_name,
        )
        flow_key = _node_key("Flow", name=row.flow_name, kind=row.flow_kind)
        statements.append(
            Statement("merge_node", label=wf_key[0], key=wf_key[1], source_line=lineno)
        )
        act_props = (("stage", row.stage),) if row.stage else ()
        statements.append(
            Statement(
                "merge_node", label=act_key[0], key=act_key[1], props=act_props,
                source_line=lineno,
            )
        )
        statements.append(
            Statement("merge_node", label=flow_key[0], key=flow_key[1], source_line=lineno)
        )
        statements.append(
            Statement(
                "merge_edge",
                rel_type="HAS_STEP",
                src=wf_key,
                dst=act_key,
                props=(("index", row.step_index),),
                source_line=lineno,
            )
        )
        amount = Quantity(row.amount, row.unit, row.uncertainty)
        statements.append(
            Statement(
                "merge_edge",
                rel_type="HAS_INPUT" if row.direction == "input" else "HAS_OUTPUT",
                src=act_key,
                dst=flow_key,
                props=(("amount", amount),),
                source_line=lineno,
            )
        )
        activities.setdefault(row.workflow_id, {}).setdefault(row.step_index, set()).add(
            act_key
        )
    # NEXT edges link activities of consecutive distinct step indices
    for wf in sorted(activities):
        steps = sorted(activities[wf])
        for prev, nxt in zip(steps, steps[1:]):
            for src in sorted(activities[wf][prev]):
                for dst in sorted(activities[wf][nxt]):
                    statements.append(
                        Statement("merge_edge", rel_type="NEXT", src=src, dst=dst)
                    )
    return _canonical_order(statements)


def build_metadata_statements(rows):
    statements = []
    for lineno, row in rows:
        wf_key = _node_key("Workflow", workflow_id=row.workflow_id)
        if row.key == "region":
            loc_key = _node_key("Location", code=row.value)
            statements.append(
                Statement("merge_node", label=loc_key[0], key=loc_key[1], source_line=lineno)
            )
            statements.append(
                Statement(
                    "merge_edge", rel_type="LOCATED_IN", src=wf_key, dst=loc_key,
                    source_line=lineno,
                )
            )
        elif row.key.startswith("functional_unit_"):
            fu_key = _node_key("FunctionalUnit", workflow_id=row.workflow_id)
            prop = row.key[len("functional_unit_") :]
            value = float(row.value) if prop == "amount" else row.value
            statements.append(
                Statement(
                    "merge_node", label=fu_key[0], key=fu_key[1],
                    props=((prop, value),), source_line=lineno,
                )
            )
            statements.append(
                Statement(
                    "merge_edge", rel_type="HAS_FUNCTIONAL_UNIT", src=wf_key, dst=fu_key,
                    source_line=lineno,
                )
            )
        else:
            # boundary, valid_from, valid_to, and free-form keys become
            # workflow properties
            statements.append(
                Statement(
                    "set_prop", label=wf_key[0], key=wf_key[1],
                    props=((row.key, row.value),), source_line=lineno,
                )
            )
    return _canonical_order(statements)


def build_agent_statements(rows):
    statements = []
    seen_agents = set()
    for lineno, row in rows:
        agent_key = _node_key("Agent", agent_id=row.agent_id)
        if row.agent_id not in seen_agents:
            seen_agents.add(row.agent_id)
            statements.append(
                Statement(
                    "merge_node", label=agent_key[0], key=agent_key[1],
                    props=(("name", row.agent_name),), source_line=lineno,
                )
            )
            # fan-out: one edge to every activity of the workflow
            statements.append(
                Statement(
                    "merge_edge",
                    rel_type="PERFORMS",
                    src=agent_key,
                    dst=_node_key("Activity", workflow_id=row.workflow_id),
                    source_line=lineno,
                )
            )
        if row.feature_key:
            param_key = _node_key("Parameter", name=row.feature_key, owner=row.agent_id)
            statements.append(
                Statement(
                    "merge_node", label=param_key[0], key=param_key[1],
                    props=(("value", row.feature_value),), source_line=lineno,
                )
            )
            statements.append(
                Statement(
                    "merge_edge", rel_type="HAS_PARAMETER", src=agent_key, dst=param_key,
                    source_line=lineno,
                )
            )
    return _canonical_order(statements)


def build_reference_statements(rows):
    statements = []
    for lineno, row in rows:
        ref_key = _node_key("Reference", reference_id=row.reference_id)
        props = [("author", row.author), ("title", row.title)]
        if row.year is not None:
            props.append(("year", row.year))
        if row.doi is not None:
            props.append(("doi", row.doi))
        statements.append(
            Statement(
                "merge_node", label=ref_key[0], key=ref_key[1], props=tuple(props),
                source_line=lineno,
            )
        )
        statements.append(
            Statement(
                "merge_edge",
                rel_type="HAS_REFERENCE",
                src=_node_key("Workflow", workflow_id=row.workflow_id),
                dst=ref_key,
                source_line=lineno,
            )
        )
    return _canonical_order(statements)


def _canonical_order(statements):
    """Sort so that row order never affects the applied result.

    Nodes first (creation order fixed by key), then set_prop, then edges.
    """
    rank = {"merge_node": 0, "set_prop": 1, "merge_edge": 2}
    return sorted(statements, key=lambda s: (rank[s.op], s.to_json()))


_table_registry = {
    WORKFLOW: (_parse_workflow_row, build_workflow_statements),
    METADATA: (_parse_metadata_row, build_metadata_statements),
    AGENT: (_parse_agent_row, build_agent_statements),
    REFERENCE: (_parse_reference_row, build_reference_statements),
}

#: application order of the builtin kinds within a bundle
TABLE_ORDER = [WORKFLOW, METADATA, AGENT, REFERENCE]


def register_table_kind(kind, header, row_parser, statement_builder):
    """Register an additional unified-table kind."""
    TABLE_HEADERS[kind] = list(header)
    _table_registry[kind] = (row_parser, statement_builder)
    if kind not in TABLE_ORDER:
        TABLE_ORDER.append(kind)


def build_statements(kind, rows_with_lines):
    """Build the canonical statement list for parsed rows of one table."""
    return _table_registry[kind][1](rows_with_lines)


# --------------------------------------------------------------- application


def _find_node(graph, label, key_items):
    key = dict(key_items)
    candidates = graph.nodes_with_label(label)
    matches = []
    for nid in candidates:
        props = graph.get_node(nid).props
        if all(props.get(k) == v for k, v in key.items()):
            matches.append(nid)
    return sorted(matches)


def _apply_to(graph, statements, summary):
    merged_nodes = {}

    def resolve(endpoint):
        label, key = endpoint
        if (label, key) in merged_nodes:
            return [merged_nodes[(label, key)]]
        return _find_node(graph, label, key)

    for stmt in statements:
        if stmt.op == "merge_node":
            existing = _find_node(graph, stmt.label, stmt.key)
            if existing:
                nid = existing[0]
                summary.nodes_matched += 1
            else:
                nid = graph.create_node({stmt.label}, dict(stmt.key))
                summary.nodes_created += 1
            merged_nodes[(stmt.label, stmt.key)] = nid
            for key, value in stmt.props:
                if graph.get_node(nid).props.get(key) != value:
                    graph.set_prop(nid, key, value)
                    summary.props_set += 1
        elif stmt.op == "set_prop":
            targets = resolve((stmt.label, stmt.key))
            if not targets:
                summary.row_errors.append(
                    (stmt.source_line, f"no {stmt.label} matching {dict(stmt.key)}")
                )
                continue
            for nid in targets:
                for key, value in stmt.props:
                    if graph.get_node(nid).props.get(key) != value:
                        graph.set_prop(nid, key, value)
                        summary.props_set += 1
        elif stmt.op == "merge_edge":
            srcs = resolve(stmt.src)
            dsts = resolve(stmt.dst)
            if not srcs or not dsts:
                side = stmt.src if not srcs else stmt.dst
                summary.row_errors.append(
                    (
                        stmt.source_line,
                        f"edge {stmt.rel_type} skipped: no {side[0]} matching {dict(side[1])}",
                    )
                )
                continue
            for src in srcs:
                for dst in dsts:
                    existing = [
                        eid
                        for eid, other in graph.neighbors(src, "out", stmt.rel_type)
                        if other == dst
                    ]
                    if existing:
                        eid = sorted(existing)[0]
                        summary.edges_matched += 1
                    else:
                        eid = graph.create_edge(stmt.rel_type, src, dst, {})
                        summary.edges_created += 1
                    for key, value in stmt.props:
                        if graph.get_edge(eid).props.get(key) != value:
                            graph.set_prop(eid, key, value)
                            summary.props_set += 1
        else:
            raise ValueError(f"unknown statement op {stmt.op!r}")


def apply_statements(graph, statements):
    """Apply statements atomically; on any failure the graph is untouched."""
    summary = IngestSummary()
    working = graph.copy()
    _apply_to(working, statements, summary)
    _swap_state(graph, working)
    return summary


def _swap_state(graph, working):
    graph._nodes = working._nodes
    graph._edges = working._edges
    graph._label_index = working._label_index
    graph._out = working._out
    graph._in = working._in
    graph._next_id = working._next_id


def ingest_bundle(graph, tables):
    """Parse, build, and apply a bundle of named CSV texts atomically.

    tables maps kind -> csv text; kinds apply in registry order so
    cross-references through workflow_id resolve. A header error in any
    table aborts the whole bundle.
    """
    summary = IngestSummary()
    all_statements = []
    for kind in TABLE_ORDER:
        if kind not in tables:
            continue
        rows, errors = _parse_table_with_lines(kind, tables[kind])
        summary.row_errors.extend(errors)
        all_statements.extend(build_statements(kind, rows))
    working = graph.copy()
    _apply_to(working, all_statements, summary)
    _swap_state(graph, working)
    return summary
