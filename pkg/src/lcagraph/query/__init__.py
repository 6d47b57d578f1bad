"""Pattern-matching query language: MATCH ... WHERE ... RETURN ...

The public surface is parse_query, plan_query, and execute_query.
"""

from .ast import (
    Aggregate,
    EdgePattern,
    NodePattern,
    PathPattern,
    Query,
    ResultTable,
    ReturnItem,
)
from .executor import execute_query
from .parser import parse_query
from .planner import Plan, plan_query

__all__ = [
    "Aggregate",
    "EdgePattern",
    "NodePattern",
    "PathPattern",
    "Plan",
    "Query",
    "ResultTable",
    "ReturnItem",
    "execute_query",
    "parse_query",
    "plan_query",
]
