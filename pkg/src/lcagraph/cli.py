"""Command-line frontend: ingest -> harmonize -> validate -> query/score/export.

The store is a snapshot dump file loaded fully into memory per invocation.
Exit codes: 0 success, 1 data errors under --strict, 2 usage/format
errors. Diagnostics go to stderr, results to stdout.

Store path precedence: --store flag, then the config file
(~/.config/lcagraph/config, plain ``key = value`` lines), then the
LCAG_STORE environment variable, then ./graph.lcag.
"""

from __future__ import annotations

import csv
import io
import json
import os
import shutil
import sys
from pathlib import Path

import click

from .errors import LcaGraphError
from .graph import Graph
from .harmonize import builtin_mappings, parse_mappings, translate_graph
from .ingest import AGENT, METADATA, REFERENCE, WORKFLOW, ingest_bundle
from .figures import render_fair_figure, render_quality_figure
from .quality import fair_json, fair_report, quality_json, score_quality
from .query import execute_query, parse_query
from .schema import builtin_schema, parse_schema, validate_graph
from .triples import format_ntriples, from_triples, parse_ntriples, to_triples
from .values import Quantity

DEFAULT_STORE = "graph.lcag"
CONFIG_PATH = Path.home() / ".config" / "lcagraph" / "config"


def _read_config():
    if not CONFIG_PATH.is_file():
        return {}
    config = {}
    for raw in CONFIG_PATH.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line or "=" not in line:
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        config[key] = value
    return config


def _resolve_store(flag_value):
    # flags override config file, config file overrides environment
    if flag_value:
        return Path(flag_value)
    config = _read_config()
    if "store" in config:
        return Path(config["store"])
    env = os.environ.get("LCAG_STORE")
    if env:
        return Path(env)
    return Path(DEFAULT_STORE)


def _load_store(path):
    if not path.is_file():
        click.echo(
            f"error: store file {path} does not exist; run `lcagraph ingest` first",
            err=True,
        )
        sys.exit(2)
    try:
        return Graph.load(path.read_text())
    except LcaGraphError as exc:
        click.echo(f"error: cannot read store {path}: {exc}", err=True)
        sys.exit(2)


def _save_store(graph, path):
    if path.parent and not path.parent.is_dir():
        click.echo(f"error: store directory {path.parent} does not exist", err=True)
        sys.exit(2)
    path.write_text(graph.dump())


def _load_schema(schema_file):
    if schema_file is None:
        return builtin_schema()
    try:
        return parse_schema(Path(schema_file).read_text())
    except LcaGraphError as exc:
        click.echo(f"error: bad schema file: {exc}", err=True)
        sys.exit(2)


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Quantity):
        return json.dumps(value.to_json(), sort_keys=True)
    if isinstance(value, list):
        return json.dumps(value)
    return str(value)


def _json_value(value):
    if isinstance(value, Quantity):
        return value.to_json()
    return value


@click.group()
@click.option("--store", "store_flag", metavar="FILE", default=None, help="Store file path.")
@click.pass_context
def main(ctx, store_flag):
    """Graph data management for life-cycle inventory tables."""
    ctx.ensure_object(dict)
    ctx.obj["store"] = _resolve_store(store_flag)


@main.command()
@click.option("--workflow", type=click.Path(exists=True), default=None)
@click.option("--metadata", type=click.Path(exists=True), default=None)
@click.option("--agent", type=click.Path(exists=True), default=None)
@click.option("--reference", type=click.Path(exists=True), default=None)
@click.option("--strict", is_flag=True, help="Exit 1 when any row is rejected.")
@click.pass_context
def ingest(ctx, workflow, metadata, agent, reference, strict):
    """Ingest unified tables (CSV) into the store."""
    tables = {}
    for kind, path in (
        (WORKFLOW, workflow),
        (METADATA, metadata),
        (AGENT, agent),
        (REFERENCE, reference),
    ):
        if path is not None:
            tables[kind] = Path(path).read_text()
    if not tables:
        raise click.UsageError("provide at least one of --workflow/--metadata/--agent/--reference")
    store_path = ctx.obj["store"]
    graph = Graph.load(store_path.read_text()) if store_path.is_file() else Graph()
    try:
        summary = ingest_bundle(graph, tables)
    except LcaGraphError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    _save_store(graph, store_path)
    for line, message in summary.row_errors:
        click.echo(f"row error (line {line}): {message}", err=True)
    click.echo(
        f"nodes created={summary.nodes_created} matched={summary.nodes_matched}; "
        f"edges created={summary.edges_created} matched={summary.edges_matched}; "
        f"props set={summary.props_set}; row errors={len(summary.row_errors)}"
    )
    if strict and summary.row_errors:
        sys.exit(1)


@main.command()
@click.option("--schema", "schema_file", type=click.Path(exists=True), default=None)
@click.option("--strict", is_flag=True, help="Exit 1 when violations are found.")
@click.pass_context
def validate(ctx, schema_file, strict):
    """Validate the store against a schema (builtin by default)."""
    graph = _load_store(ctx.obj["store"])
    schema = _load_schema(schema_file)
    violations = validate_graph(graph, schema)
    for violation in violations:
        click.echo(str(violation))
    click.echo(f"{len(violations)} violation(s)", err=True)
    if strict and violations:
        sys.exit(1)


@main.command()
@click.option("-e", "query_text", metavar="TEXT", default=None, help="Query text.")
@click.option("-f", "query_file", type=click.Path(exists=True), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.pass_context
def query(ctx, query_text, query_file, fmt):
    """Run a MATCH ... RETURN query against the store."""
    if (query_text is None) == (query_file is None):
        raise click.UsageError("provide exactly one of -e TEXT or -f FILE")
    if query_file is not None:
        query_text = Path(query_file).read_text()
    graph = _load_store(ctx.obj["store"])
    try:
        result = execute_query(parse_query(query_text), graph)
    except LcaGraphError as exc:
        click.echo(f"query error: {exc}", err=True)
        sys.exit(1)
    if fmt == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(result.columns)
        for row in result.rows:
            writer.writerow([_cell(v) for v in row])
    else:
        for row in result.rows:
            record = {col: _json_value(v) for col, v in zip(result.columns, row)}
            click.echo(json.dumps(record, sort_keys=True))


@main.command()
@click.option("--schema", "schema_file", type=click.Path(exists=True), default=None)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.option("--figure", type=click.Path(), default=None, help="Also render a PNG chart.")
@click.pass_context
def score(ctx, schema_file, fmt, figure):
    """Compute the data-quality report."""
    graph = _load_store(ctx.obj["store"])
    report = score_quality(graph, _load_schema(schema_file))
    click.echo(quality_json(report) if fmt == "json" else report.to_text())
    if figure:
        render_quality_figure(report, figure)
        click.echo(f"figure written to {figure}", err=True)


@main.command()
@click.option("--schema", "schema_file", type=click.Path(exists=True), default=None)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.option("--figure", type=click.Path(), default=None, help="Also render a PNG chart.")
@click.pass_context
def fair(ctx, schema_file, fmt, figure):
    """Compute the FAIR assessment report."""
    graph = _load_store(ctx.obj["store"])
    report = fair_report(graph, _load_schema(schema_file))
    click.echo(fair_json(report) if fmt == "json" else report.to_text())
    if figure:
        render_fair_figure(report, figure)
        click.echo(f"figure written to {figure}", err=True)


@main.command()
@click.option("--mappings", "mappings_file", type=click.Path(exists=True), default=None,
              help="Mapping CSV; builtin mappings when omitted.")
@click.option("--schema", "schema_file", type=click.Path(exists=True), default=None)
@click.pass_context
def harmonize(ctx, mappings_file, schema_file):
    """Translate the store's vocabulary to the canonical schema, in place."""
    store_path = ctx.obj["store"]
    graph = _load_store(store_path)
    if mappings_file is None:
        table = builtin_mappings()
    else:
        try:
            table = parse_mappings(Path(mappings_file).read_text())
        except LcaGraphError as exc:
            click.echo(f"error: bad mapping file: {exc}", err=True)
            sys.exit(2)
    try:
        translated, report = translate_graph(graph, table, _load_schema(schema_file))
    except LcaGraphError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    shutil.copyfile(store_path, str(store_path) + ".bak")
    _save_store(translated, store_path)
    for term in sorted(report.untranslated_terms()):
        click.echo(f"untranslated: {term}", err=True)
    for node_id, label in report.dropped_labels:
        click.echo(f"dropped source label {label!r} on node {node_id}", err=True)
    click.echo("store harmonized")


@main.command("export-triples")
@click.option("-o", "output", type=click.Path(), required=True)
@click.pass_context
def export_triples(ctx, output):
    """Write the store as sorted N-Triples-style lines."""
    graph = _load_store(ctx.obj["store"])
    Path(output).write_text(format_ntriples(to_triples(graph)))
    click.echo(f"wrote {graph.node_count} nodes and {graph.edge_count} edges", err=True)


@main.command("import-triples")
@click.option("-i", "input_file", type=click.Path(exists=True), required=True)
@click.pass_context
def import_triples(ctx, input_file):
    """Replace the store with a graph rebuilt from triples."""
    try:
        graph = from_triples(parse_ntriples(Path(input_file).read_text()))
    except LcaGraphError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    store_path = ctx.obj["store"]
    if store_path.is_file():
        shutil.copyfile(store_path, str(store_path) + ".bak")
    _save_store(graph, store_path)
    click.echo(f"imported {graph.node_count} nodes and {graph.edge_count} edges")


@main.command()
@click.pass_context
def stats(ctx):
    """Entity counts for the store."""
    graph = _load_store(ctx.obj["store"])
    click.echo(f"nodes {graph.node_count}")
    click.echo(f"edges {graph.edge_count}")
    for label, plural in (
        ("Workflow", "workflows"),
        ("Activity", "activities"),
        ("Flow", "flows"),
        ("Agent", "agents"),
        ("Reference", "references"),
    ):
        click.echo(f"{plural} {len(graph.nodes_with_label(label))}")


if __name__ == "__main__":
    main()
