"""Embedded labeled-property-graph engine for life-cycle inventory data."""

from .graph import Graph, graph_equal, normalized_dump
from .harmonize import (
    MappingEntry,
    MappingTable,
    builtin_mappings,
    detect_conflicts,
    parse_mappings,
    translate_graph,
)
from .ingest import apply_statements, build_statements, ingest_bundle, parse_table
from .quality import fair_report, score_quality
from .query import execute_query, parse_query, plan_query
from .schema import builtin_schema, parse_schema, validate_graph
from .triples import from_triples, to_triples
from .values import Quantity, Uncertainty

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "MappingEntry",
    "MappingTable",
    "Quantity",
    "Uncertainty",
    "apply_statements",
    "build_statements",
    "builtin_mappings",
    "builtin_schema",
    "detect_conflicts",
    "execute_query",
    "fair_report",
    "from_triples",
    "graph_equal",
    "ingest_bundle",
    "normalized_dump",
    "parse_mappings",
    "parse_query",
    "parse_schema",
    "parse_table",
    "plan_query",
    "score_quality",
    "to_triples",
    "translate_graph",
    "validate_graph",
]
