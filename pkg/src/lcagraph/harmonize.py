"""Vocabulary harmonization: translate source-ontology graphs to the canonical schema.

Mapping tables rename node labels (class mappings), edge types (relation
mappings, optionally flipping direction), and property keys. Unmapped
non-canonical terms pass through untouched and are listed in the
translation report, so heterogeneous sources can be harmonized
incrementally.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .errors import MappingError

KIND_CLASS = "class"
KIND_RELATION = "relation"
KIND_PROPERTY = "property"

FORWARD = "forward"
REVERSE = "reverse"

MAPPING_CSV_HEADER = ["source_ontology", "source_term", "kind", "canonical_term", "direction"]


@dataclass(frozen=True)
class MappingEntry:
    source_ontology: str
    source_term: str
    kind: str
    canonical_term: str
    direction: str = FORWARD

    def __post_init__(self):
        if self.kind not in (KIND_CLASS, KIND_RELATION, KIND_PROPERTY):
            raise MappingError(f"unknown mapping kind {self.kind!r}")
        if self.direction not in (FORWARD, REVERSE):
            raise MappingError(f"unknown direction {self.direction!r}")
        if self.direction == REVERSE and self.kind != KIND_RELATION:
            raise MappingError("reverse direction is only valid for relation mappings")


@dataclass
class MappingTable:
    entries: list

    def __post_init__(self):
        seen = set()
        for entry in self.entries:
            key = (entry.source_ontology, entry.source_term, entry.kind)
            if key in seen:
                raise MappingError(f"duplicate mapping for {key}")
            seen.add(key)

    def ontologies(self):
        return {e.source_ontology for e in self.entries}

    def lookup(self, source_ontology, source_term, kind):
        for entry in self.entries:
            if (entry.source_ontology, entry.source_term, entry.kind) == (
                source_ontology,
                source_term,
                kind,
            ):
                return entry
        return None


@dataclass(frozen=True)
class Conflict:
    kind: str  # duplicate_source_term | divergent_targets | unknown_canonical_term
    entries: tuple
    detail: str


@dataclass
class TranslationReport:
    """What translate_graph could not (or chose not to) rewrite."""

    untranslated_labels: set = field(default_factory=set)
    untranslated_rel_types: set = field(default_factory=set)
    untranslated_prop_keys: set = field(default_factory=set)
    dropped_labels: list = field(default_factory=list)  # (node id, label) pairs

    def untranslated_terms(self):
        return (
            self.untranslated_labels
            | self.untranslated_rel_types
            | self.untranslated_prop_keys
        )


def builtin_mappings():
    """Term mappings for the published source ontologies into the canonical schema."""
    entries = [
        # Wang 2022 process-flow ontology
        MappingEntry("Wang2022", "Process", KIND_CLASS, "Activity"),
        MappingEntry("Wang2022", "Flow", KIND_CLASS, "Flow"),
        MappingEntry("Wang2022", "FlowProperty", KIND_CLASS, "FlowQuantity"),
        MappingEntry("Wang2022", "hasInputFlow", KIND_RELATION, "HAS_INPUT"),
        MappingEntry("Wang2022", "hasOutputFlow", KIND_RELATION, "HAS_OUTPUT"),
        # Zhang 2015 product life cycle ontology
        MappingEntry("Zhang2015", "hasInflow", KIND_RELATION, "HAS_INPUT"),
        MappingEntry("Zhang2015", "hasOutflow", KIND_RELATION, "HAS_OUTPUT"),
        MappingEntry("Zhang2015", "hasBoundary", KIND_PROPERTY, "boundary"),
        # Kuczenski 2016 consensus ontology
        MappingEntry("Kuczenski2016", "hasInputs", KIND_RELATION, "HAS_INPUT"),
        MappingEntry("Kuczenski2016", "hasOutputs", KIND_RELATION, "HAS_OUTPUT"),
        # LciO (Meyer 2020): flows point at activities, so directions flip
        MappingEntry("LciO", "Input_Of", KIND_RELATION, "HAS_INPUT", REVERSE),
        MappingEntry("LciO", "Output_Of", KIND_RELATION, "HAS_OUTPUT", REVERSE),
        MappingEntry("LciO", "has_source", KIND_RELATION, "HAS_OUTPUT", REVERSE),
        MappingEntry("LciO", "has_Destination", KIND_RELATION, "HAS_INPUT", REVERSE),
        # Ghose 2022 BONSAI ontology
        MappingEntry("Ghose2022", "performs", KIND_RELATION, "PERFORMS"),
        MappingEntry("Ghose2022", "isInputOf", KIND_RELATION, "HAS_INPUT", REVERSE),
        # Saad 2023 LCI knowledge graph
        MappingEntry("Saad2023", "Has_flow", KIND_RELATION, "HAS_OUTPUT"),
        MappingEntry("Saad2023", "UnitProcess", KIND_CLASS, "Activity"),
        MappingEntry("Saad2023", "IntermediateFlow", KIND_CLASS, "Flow"),
        MappingEntry("Saad2023", "ReferenceProduct", KIND_CLASS, "Flow"),
    ]
    return MappingTable(entries)


def parse_mappings(text):
    """Parse the mapping CSV into a MappingTable."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MappingError("empty mapping file, expected header") from None
    if [h.strip() for h in header] != MAPPING_CSV_HEADER:
        raise MappingError(
            f"bad header {header!r}, expected {','.join(MAPPING_CSV_HEADER)}", line=1
        )
    entries = []
    for lineno, row in enumerate(reader, start=2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != 5:
            raise MappingError(f"expected 5 columns, got {len(row)}", line=lineno)
        ontology, term, kind, canonical, direction = (cell.strip() for cell in row)
        try:
            entry = MappingEntry(
                ontology, term, kind, canonical, direction or FORWARD
            )
        except MappingError as exc:
            raise MappingError(str(exc), line=lineno) from None
        entries.append(entry)
    try:
        return MappingTable(entries)
    except MappingError as exc:
        raise MappingError(str(exc)) from None


def detect_conflicts(table, schema=None):
    """Find incoherencies in a mapping table.

    With a schema, also flags entries whose canonical term does not exist in
    it. Duplicate (ontology, term, kind) keys cannot occur in a constructed
    MappingTable, but raw entry lists can be checked too.
    """
    entries = table.entries if isinstance(table, MappingTable) else list(table)
    conflicts = []

    by_full_key = {}
    for entry in entries:
        by_full_key.setdefault(
            (entry.source_ontology, entry.source_term, entry.kind), []
        ).append(entry)
    for key, group in sorted(by_full_key.items()):
        if len(group) > 1:
            conflicts.append(
                Conflict(
                    "duplicate_source_term",
                    tuple(group),
                    f"{key[1]} ({key[2]}) mapped {len(group)} times in {key[0]}",
                )
            )

    by_term = {}
    for entry in entries:
        by_term.setdefault((entry.source_term, entry.kind), []).append(entry)
    for (term, kind), group in sorted(by_term.items()):
        targets = {(e.canonical_term, e.direction) for e in group}
        if len(targets) > 1:
            conflicts.append(
                Conflict(
                    "divergent_targets",
                    tuple(group),
                    f"{term} ({kind}) maps to {sorted(t for t, _ in targets)}",
                )
            )

    if schema is not None:
        class_names = {c.name for c in schema.classes}
        rel_names = {r.name for r in schema.relations}
        prop_keys = schema.known_property_keys()
        known = {
            KIND_CLASS: class_names,
            KIND_RELATION: rel_names,
            KIND_PROPERTY: prop_keys,
        }
        for entry in entries:
            if entry.canonical_term not in known[entry.kind]:
                conflicts.append(
                    Conflict(
                        "unknown_canonical_term",
                        (entry,),
                        f"{entry.canonical_term} ({entry.kind}) is not in the schema",
                    )
                )
    return conflicts


def translate_graph(graph, table, schema):
    """Rewrite a graph's vocabulary into the canonical schema.

    Returns (new graph, TranslationReport). Node ids are preserved;
    reverse-direction relation mappings swap edge endpoints. Raises
    MappingError when the table has conflicts or targets terms absent from
    the schema.
    """
    conflicts = detect_conflicts(table, schema)
    unknown = [c for c in conflicts if c.kind == "unknown_canonical_term"]
    if unknown:
        raise MappingError(
            "mapping targets unknown canonical terms: "
            + ", ".join(c.entries[0].canonical_term for c in unknown)
        )
    if conflicts:
        raise MappingError("mapping table has conflicts: " + conflicts[0].detail)

    class_map = {}
    rel_map = {}
    prop_map = {}
    for entry in table.entries:
        if entry.kind == KIND_CLASS:
            class_map[entry.source_term] = entry.canonical_term
        elif entry.kind == KIND_RELATION:
            rel_map[entry.source_term] = (entry.canonical_term, entry.direction)
        else:
            prop_map[entry.source_term] = entry.canonical_term

    class_names = {c.name for c in schema.classes}
    rel_names = {r.name for r in schema.relations}
    prop_keys = schema.known_property_keys()

    report = TranslationReport()
    out = graph.copy()

    for node in list(out.nodes()):
        mapped = {class_map[l] for l in node.labels if l in class_map}
        passthrough = {l for l in node.labels if l not in class_map}
        # a source label colliding with a freshly mapped canonical label is dropped
        for label in sorted(passthrough & mapped):
            report.dropped_labels.append((node.id, label))
        new_labels = mapped | passthrough
        for label in sorted(node.labels - new_labels):
            out.remove_label(node.id, label)
        for label in sorted(new_labels - node.labels):
            out.add_label(node.id, label)
        for label in sorted(new_labels):
            if label not in class_names:
                report.untranslated_labels.add(label)
        for key in sorted(node.props):
            if key in prop_map:
                value = node.props.pop(key)
                node.props[prop_map[key]] = value
            elif key not in prop_keys:
                report.untranslated_prop_keys.add(key)

    for edge in list(out.edges()):
        if edge.rel_type in rel_map:
            canonical, direction = rel_map[edge.rel_type]
            edge.rel_type = canonical
            if direction == REVERSE:
                out._out[edge.src].remove(edge.id)
                out._in[edge.dst].remove(edge.id)
                edge.src, edge.dst = edge.dst, edge.src
                out._out[edge.src].append(edge.id)
                out._in[edge.dst].append(edge.id)
        elif edge.rel_type not in rel_names:
            report.untranslated_rel_types.add(edge.rel_type)
        for key in sorted(edge.props):
            if key in prop_map:
                edge.props[prop_map[key]] = edge.props.pop(key)
            elif key not in prop_keys:
                report.untranslated_prop_keys.add(key)

    return out, report
