"""Data-quality dimensions and a FAIR report, as measurable proxies.

Every dimension is a ratio with explicit (numerator, denominator) evidence
counts and a detail list of the offenders, so the proxy can be audited.
Accuracy cannot be measured against reality; its proxy measures how much
of the graph's vocabulary resolves against the schema and is named
accuracy_proxy to avoid overclaiming.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .graph import normalized_dump
from .schema import STAGES, validate_graph
from .triples import from_triples, to_triples
from .values import Quantity

EXCHANGE_RELS = ("HAS_INPUT", "HAS_OUTPUT")


@dataclass
class DimensionScore:
    name: str
    numerator: int
    denominator: int
    detail: list = field(default_factory=list)

    @property
    def ratio(self):
        if self.denominator == 0:
            return 1.0  # vacuous truth
        return self.numerator / self.denominator

    def to_json(self):
        return {
            "ratio": self.ratio,
            "numerator": self.numerator,
            "denominator": self.denominator,
            "detail": list(self.detail),
        }


@dataclass
class QualityReport:
    accuracy_proxy: DimensionScore
    completeness: DimensionScore
    consistency: DimensionScore
    precision: DimensionScore
    traceability: DimensionScore

    def dimensions(self):
        return [
            self.accuracy_proxy,
            self.completeness,
            self.consistency,
            self.precision,
            self.traceability,
        ]

    def to_json(self):
        return {d.name: d.to_json() for d in self.dimensions()}

    def to_text(self):
        lines = ["data quality report"]
        for d in self.dimensions():
            lines.append(f"  {d.name:<14} {d.ratio:.3f} ({d.numerator}/{d.denominator})")
            for item in d.detail:
                lines.append(f"    ! {item}")
        return "\n".join(lines)


@dataclass
class FairDimension:
    name: str
    passed: bool
    reasons: list = field(default_factory=list)

    def to_json(self):
        return {"passed": self.passed, "reasons": list(self.reasons)}


@dataclass
class FairReport:
    findable: FairDimension
    accessible: FairDimension
    interoperable: FairDimension
    reusable: FairDimension

    def dimensions(self):
        return [self.findable, self.accessible, self.interoperable, self.reusable]

    def all_pass(self):
        return all(d.passed for d in self.dimensions())

    def to_json(self):
        return {d.name: d.to_json() for d in self.dimensions()}

    def to_text(self):
        lines = ["FAIR report"]
        for d in self.dimensions():
            status = "pass" if d.passed else "FAIL"
            lines.append(f"  {d.name:<24} {status}")
            for reason in d.reasons:
                lines.append(f"    - {reason}")
        return "\n".join(lines)


def _workflow_ids(graph):
    return sorted(graph.nodes_with_label("Workflow"))


def score_quality(graph, schema):
    """Compute the five quality dimensions for a graph against a schema."""
    # accuracy proxy: fraction of distinct vocabulary terms the schema knows
    class_names = {c.name for c in schema.classes}
    rel_names = {r.name for r in schema.relations}
    prop_keys = schema.known_property_keys()
    used_labels = graph.labels()
    used_rels = {e.rel_type for e in graph.edges()}
    used_keys = {k for n in graph.nodes() for k in n.props} | {
        k for e in graph.edges() for k in e.props
    }
    unknown_terms = sorted(
        [f"label:{l}" for l in used_labels - class_names]
        + [f"rel:{r}" for r in used_rels - rel_names]
        + [f"prop:{k}" for k in used_keys - prop_keys]
    )
    total_terms = len(used_labels) + len(used_rels) + len(used_keys)
    accuracy = DimensionScore(
        "accuracy_proxy", total_terms - len(unknown_terms), total_terms, unknown_terms
    )

    # completeness: workflows whose activities cover all four life-cycle stages
    workflows = _workflow_ids(graph)
    incomplete = []
    for wid in workflows:
        stages = set()
        for _, aid in graph.neighbors(wid, "out", "HAS_STEP"):
            stage = graph.get_node(aid).props.get("stage")
            if isinstance(stage, str):
                stages.add(stage)
        if not stages >= set(STAGES):
            incomplete.append(wid)
    completeness = DimensionScore(
        "completeness", len(workflows) - len(incomplete), len(workflows), incomplete
    )

    # consistency: 1 - violations / checked entities
    violations = validate_graph(graph, schema)
    checked = graph.node_count + graph.edge_count
    consistency = DimensionScore(
        "consistency",
        max(checked - len(violations), 0),
        checked,
        [v.target for v in violations],
    )

    # precision: exchange edges whose amount is a unit-carrying quantity
    exchange = [e for e in graph.edges() if e.rel_type in EXCHANGE_RELS]
    imprecise = sorted(
        e.id
        for e in exchange
        if not (isinstance(e.props.get("amount"), Quantity) and e.props["amount"].unit)
    )
    precision = DimensionScore(
        "precision", len(exchange) - len(imprecise), len(exchange), imprecise
    )

    # traceability: workflows with at least one reference
    untraced = [
        wid for wid in workflows if not graph.neighbors(wid, "out", "HAS_REFERENCE")
    ]
    traceability = DimensionScore(
        "traceability", len(workflows) - len(untraced), len(workflows), untraced
    )

    return QualityReport(accuracy, completeness, consistency, precision, traceability)


def fair_report(graph, schema):
    """Pass/fail FAIR assessment with reasons."""
    workflows = _workflow_ids(graph)

    findable_reasons = []
    for wid in workflows:
        node = graph.get_node(wid)
        has_meta = any(k != "workflow_id" for k in node.props) or bool(
            graph.neighbors(wid, "out", "LOCATED_IN")
            or graph.neighbors(wid, "out", "HAS_FUNCTIONAL_UNIT")
        )
        if not has_meta:
            findable_reasons.append(f"workflow {wid} has no metadata")
    findable = FairDimension("findable", not findable_reasons, findable_reasons)

    accessible_reasons = []
    try:
        graph.dump()
    except Exception as exc:  # noqa: BLE001 - exportability is the check
        accessible_reasons.append(f"snapshot export failed: {exc}")
    accessible = FairDimension("accessible", not accessible_reasons, accessible_reasons)

    interop_reasons = []
    violations = validate_graph(graph, schema)
    if violations:
        interop_reasons.extend(str(v) for v in violations[:10])
        if len(violations) > 10:
            interop_reasons.append(f"... {len(violations) - 10} more violation(s)")
    try:
        if normalized_dump(from_triples(to_triples(graph))) != normalized_dump(graph):
            interop_reasons.append("triple export does not round-trip")
    except Exception as exc:  # noqa: BLE001
        interop_reasons.append(f"triple round-trip failed: {exc}")
    interoperable = FairDimension("interoperable", not interop_reasons, interop_reasons)

    reusable_reasons = []
    references = sorted(graph.nodes_with_label("Reference"))
    if workflows and not references:
        reusable_reasons.append("no references")
    for wid in workflows:
        if not graph.neighbors(wid, "out", "HAS_REFERENCE"):
            reusable_reasons.append(f"workflow {wid} has no reference")
    for rid in references:
        props = graph.get_node(rid).props
        if not props.get("author") or not props.get("title"):
            reusable_reasons.append(f"reference {rid} lacks author or title")
    reusable = FairDimension("reusable (reproducibility)", not reusable_reasons, reusable_reasons)

    return FairReport(findable, accessible, interoperable, reusable)


def quality_json(report):
    return json.dumps(report.to_json(), indent=2, sort_keys=True)


def fair_json(report):
    return json.dumps(report.to_json(), indent=2, sort_keys=True)
