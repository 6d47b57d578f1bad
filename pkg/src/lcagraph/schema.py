"""Canonical harmonized LCA schema and graph validation.

The builtin schema synthesizes the vocabularies of the published LCA
ontologies into one set of classes (node labels) and relations (edge
types) with domain/range and property-kind constraints. A small
line-oriented DSL lets users extend or replace it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import SchemaSyntaxError
from .values import VALUE_KINDS, value_kind

STAGES = ("production", "transportation", "usage", "disposal")
FLOW_KINDS = ("elementary", "intermediate", "product", "waste")


@dataclass(frozen=True)
class ClassDef:
    name: str
    required_props: tuple = ()
    optional_props: tuple = ()
    enum_constraints: dict = field(default_factory=dict)

    def declared_props(self):
        return dict(self.required_props) | dict(self.optional_props)


@dataclass(frozen=True)
class RelationDef:
    name: str
    domain: frozenset
    range: frozenset
    required_props: tuple = ()


@dataclass(frozen=True)
class SchemaDef:
    classes: tuple
    relations: tuple
    version: str = "builtin-1"

    def __post_init__(self):
        names = [c.name for c in self.classes]
        if len(names) != len(set(names)):
            raise SchemaSyntaxError("duplicate class names in schema")
        rel_names = [r.name for r in self.relations]
        if len(rel_names) != len(set(rel_names)):
            raise SchemaSyntaxError("duplicate relation names in schema")
        known = set(names)
        for rel in self.relations:
            for ref in rel.domain | rel.range:
                if ref not in known:
                    raise SchemaSyntaxError(
                        f"relation {rel.name} references undeclared class {ref}"
                    )

    def class_map(self):
        return {c.name: c for c in self.classes}

    def relation_map(self):
        return {r.name: r for r in self.relations}

    def known_property_keys(self):
        keys = set()
        for c in self.classes:
            keys.update(k for k, _ in c.required_props)
            keys.update(k for k, _ in c.optional_props)
        for r in self.relations:
            keys.update(k for k, _ in r.required_props)
        return keys


VIOLATION_KINDS = (
    "unknown_label",
    "unknown_relation",
    "domain_violation",
    "range_violation",
    "missing_required_property",
    "bad_enum_value",
    "bad_value_kind",
)


@dataclass(frozen=True)
class Violation:
    kind: str
    target: int
    detail: str

    def __str__(self):
        return f"{self.kind} @{self.target}: {self.detail}"


def builtin_schema():
    """The canonical LCA schema shipped with the package."""
    classes = (
        ClassDef(
            "Workflow",
            required_props=(("workflow_id", "text"),),
            optional_props=(
                ("boundary", "text"),
                ("valid_from", "text"),
                ("valid_to", "text"),
            ),
        ),
        ClassDef(
            "Activity",
            required_props=(("name", "text"),),
            optional_props=(
                ("stage", "text"),
                ("workflow_id", "text"),
                ("step_index", "int"),
            ),
            enum_constraints={"stage": set(STAGES)},
        ),
        ClassDef(
            "Flow",
            required_props=(("name", "text"), ("kind", "text")),
            enum_constraints={"kind": set(FLOW_KINDS)},
        ),
        ClassDef(
            "FlowQuantity",
            optional_props=(("name", "text"), ("unit", "text")),
        ),
        ClassDef(
            "Agent",
            required_props=(("name", "text"),),
            optional_props=(("agent_id", "text"),),
        ),
        ClassDef(
            "FunctionalUnit",
            optional_props=(
                ("workflow_id", "text"),
                ("desc", "text"),
                ("amount", "real"),
                ("unit", "text"),
            ),
        ),
        ClassDef("ImpactCategory", required_props=(("name", "text"),)),
        ClassDef("Location", required_props=(("code", "text"),)),
        ClassDef(
            "Reference",
            required_props=(
                ("reference_id", "text"),
                ("author", "text"),
                ("title", "text"),
            ),
            optional_props=(("year", "int"), ("doi", "text")),
        ),
        ClassDef(
            "Parameter",
            required_props=(("name", "text"),),
            optional_props=(("value", "text"), ("owner", "text")),
        ),
    )
    relations = (
        RelationDef(
            "HAS_STEP",
            frozenset({"Workflow"}),
            frozenset({"Activity"}),
            required_props=(("index", "int"),),
        ),
        RelationDef("NEXT", frozenset({"Activity"}), frozenset({"Activity"})),
        RelationDef(
            "HAS_INPUT",
            frozenset({"Activity"}),
            frozenset({"Flow"}),
            required_props=(("amount", "quantity"),),
        ),
        RelationDef(
            "HAS_OUTPUT",
            frozenset({"Activity"}),
            frozenset({"Flow"}),
            required_props=(("amount", "quantity"),),
        ),
        RelationDef("HAS_QUANTITY", frozenset({"Flow"}), frozenset({"FlowQuantity"})),
        RelationDef("PERFORMS", frozenset({"Agent"}), frozenset({"Activity"})),
        RelationDef(
            "LOCATED_IN", frozenset({"Workflow", "Activity"}), frozenset({"Location"})
        ),
        RelationDef("HAS_REFERENCE", frozenset({"Workflow"}), frozenset({"Reference"})),
        RelationDef(
            "HAS_FUNCTIONAL_UNIT", frozenset({"Workflow"}), frozenset({"FunctionalUnit"})
        ),
        RelationDef(
            "CONTRIBUTES_TO",
            frozenset({"Flow", "Activity"}),
            frozenset({"ImpactCategory"}),
        ),
        RelationDef(
            "HAS_PARAMETER", frozenset({"Activity", "Agent"}), frozenset({"Parameter"})
        ),
    )
    return SchemaDef(classes=classes, relations=relations, version="builtin-1")


# ------------------------------------------------------------------ DSL parsing

_CLASS_RE = re.compile(r"^class\s+(\w+)\s*(.*)$")
_REL_RE = re.compile(r"^rel\s+(\w+)\s+([\w|]+)\s*->\s*([\w|]+)\s*(.*)$")
_ENUM_RE = re.compile(r"enum\s+(\w+)\s*\{([^}]*)\}")


def _parse_prop_list(text, lineno):
    props = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" not in part:
            raise SchemaSyntaxError(f"expected key:kind, got {part!r}", line=lineno)
        key, kind = (s.strip() for s in part.split(":", 1))
        if kind not in VALUE_KINDS:
            raise SchemaSyntaxError(f"unknown value kind {kind!r}", line=lineno)
        props.append((key, kind))
    return tuple(props)


def _split_clauses(rest, lineno):
    """Split the tail of a class line into requires/optional/enum clauses."""
    requires, optional, enums = (), (), {}
    for match in _ENUM_RE.finditer(rest):
        key = match.group(1)
        enums[key] = {v.strip() for v in match.group(2).split(",") if v.strip()}
    rest = _ENUM_RE.sub("", rest)
    tokens = re.split(r"\b(requires|optional)\b", rest)
    mode = None
    for token in tokens:
        token = token.strip()
        if token in ("requires", "optional"):
            mode = token
        elif token:
            if mode is None:
                raise SchemaSyntaxError(f"unexpected text {token!r}", line=lineno)
            parsed = _parse_prop_list(token, lineno)
            if mode == "requires":
                requires += parsed
            else:
                optional += parsed
    return requires, optional, enums


def parse_schema(text):
    """Parse the schema DSL into a SchemaDef."""
    classes = []
    relations = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _CLASS_RE.match(line)
        if m:
            name, rest = m.group(1), m.group(2)
            if ("class", name) in seen:
                raise SchemaSyntaxError(f"duplicate class {name}", line=lineno)
            seen.add(("class", name))
            requires, optional, enums = _split_clauses(rest, lineno)
            declared = {k for k, _ in requires} | {k for k, _ in optional}
            for key in enums:
                if key not in declared:
                    raise SchemaSyntaxError(
                        f"enum constraint on undeclared property {key!r}", line=lineno
                    )
            classes.append(ClassDef(name, requires, optional, enums))
            continue
        m = _REL_RE.match(line)
        if m:
            name, domain, range_, rest = m.groups()
            if ("rel", name) in seen:
                raise SchemaSyntaxError(f"duplicate relation {name}", line=lineno)
            seen.add(("rel", name))
            requires = ()
            rest = rest.strip()
            if rest:
                if not rest.startswith("requires"):
                    raise SchemaSyntaxError(f"unexpected text {rest!r}", line=lineno)
                requires = _parse_prop_list(rest[len("requires") :], lineno)
            relations.append(
                RelationDef(
                    name,
                    frozenset(domain.split("|")),
                    frozenset(range_.split("|")),
                    requires,
                )
            )
            continue
        raise SchemaSyntaxError(f"unrecognized line {line!r}", line=lineno)
    known = {c.name for c in classes}
    for rel in relations:
        for ref in rel.domain | rel.range:
            if ref not in known:
                raise SchemaSyntaxError(
                    f"relation {rel.name} references undeclared class {ref}"
                )
    return SchemaDef(tuple(classes), tuple(relations), version="user")


# ------------------------------------------------------------------ validation


def validate_graph(graph, schema):
    """Check a graph against a schema; returns a sorted list of Violations.

    Violations are data, not errors: a clean graph yields the empty list.
    Multi-label nodes validate against the union of all matching classes'
    requirements; a node with zero schema-known labels yields one
    unknown_label violation.
    """
    class_map = schema.class_map()
    rel_map = schema.relation_map()
    violations = []

    for node in graph.nodes():
        matched = [class_map[l] for l in node.labels if l in class_map]
        if not matched:
            labels = ",".join(sorted(node.labels)) or "(none)"
            violations.append(
                Violation("unknown_label", node.id, f"no schema-known label among [{labels}]")
            )
            continue
        for cdef in sorted(matched, key=lambda c: c.name):
            for key, kind in cdef.required_props:
                if key not in node.props:
                    violations.append(
                        Violation(
                            "missing_required_property",
                            node.id,
                            f"class {cdef.name} requires {key}:{kind}",
                        )
                    )
            for key, kind in list(cdef.required_props) + list(cdef.optional_props):
                if key in node.props and value_kind(node.props[key]) != kind:
                    violations.append(
                        Violation(
                            "bad_value_kind",
                            node.id,
                            f"{key} should be {kind}, got {value_kind(node.props[key])}",
                        )
                    )
            for key, allowed in sorted(cdef.enum_constraints.items()):
                value = node.props.get(key)
                if isinstance(value, str) and value not in allowed:
                    violations.append(
                        Violation(
                            "bad_enum_value",
                            node.id,
                            f"{key}={value!r} not in {{{', '.join(sorted(allowed))}}}",
                        )
                    )

    for edge in graph.edges():
        rdef = rel_map.get(edge.rel_type)
        if rdef is None:
            violations.append(
                Violation("unknown_relation", edge.id, f"no relation {edge.rel_type} in schema")
            )
            continue
        src_labels = graph.get_node(edge.src).labels
        dst_labels = graph.get_node(edge.dst).labels
        if not src_labels & rdef.domain:
            violations.append(
                Violation(
                    "domain_violation",
                    edge.id,
                    f"{edge.rel_type} src must carry one of {{{', '.join(sorted(rdef.domain))}}}",
                )
            )
        if not dst_labels & rdef.range:
            violations.append(
                Violation(
                    "range_violation",
                    edge.id,
                    f"{edge.rel_type} dst must carry one of {{{', '.join(sorted(rdef.range))}}}",
                )
            )
        for key, kind in rdef.required_props:
            if key not in edge.props:
                violations.append(
                    Violation(
                        "missing_required_property",
                        edge.id,
                        f"relation {edge.rel_type} requires {key}:{kind}",
                    )
                )
            elif value_kind(edge.props[key]) != kind:
                violations.append(
                    Violation(
                        "bad_value_kind",
                        edge.id,
                        f"{key} should be {kind}, got {value_kind(edge.props[key])}",
                    )
                )

    violations.sort(key=lambda v: (v.target, VIOLATION_KINDS.index(v.kind), v.detail))
    return violations
