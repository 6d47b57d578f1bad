import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lcagraph import Graph, builtin_schema
from lcagraph.ingest import ingest_bundle

FIXTURES = Path(__file__).parent / "fixtures"
TABLE_KINDS = ("workflow", "metadata", "agent", "reference")


@pytest.fixture(scope="session")
def fixture_tables():
    return {kind: (FIXTURES / f"{kind}.csv").read_text() for kind in TABLE_KINDS}


@pytest.fixture()
def fixture_graph(fixture_tables):
    g = Graph()
    summary = ingest_bundle(g, fixture_tables)
    assert not summary.row_errors
    return g


@pytest.fixture(scope="session")
def schema():
    return builtin_schema()
