"""AST node types for the query language."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Literal:
    value: object

    def text(self):
        if isinstance(self.value, str):
            return f'"{self.value}"'
        if isinstance(self.value, bool):
            return "true" if self.value else "false"
        if self.value is None:
            return "null"
        return str(self.value)


@dataclass(frozen=True)
class Var:
    name: str

    def text(self):
        return self.name


@dataclass(frozen=True)
class Prop:
    var: str
    key: str

    def text(self):
        return f"{self.var}.{self.key}"


@dataclass(frozen=True)
class Cmp:
    op: str  # = <> < <= > >=
    left: object
    right: object

    def text(self):
        return f"{self.left.text()} {self.op} {self.right.text()}"


@dataclass(frozen=True)
class And:
    left: object
    right: object

    def text(self):
        return f"({self.left.text()} AND {self.right.text()})"


@dataclass(frozen=True)
class Or:
    left: object
    right: object

    def text(self):
        return f"({self.left.text()} OR {self.right.text()})"


@dataclass(frozen=True)
class Not:
    operand: object

    def text(self):
        return f"NOT {self.operand.text()}"


@dataclass(frozen=True)
class Aggregate:
    func: str  # COUNT SUM AVG MIN MAX
    arg: object  # expression, or None for COUNT(*)

    def text(self):
        inner = "*" if self.arg is None else self.arg.text()
        return f"{self.func}({inner})"


@dataclass(frozen=True)
class ReturnItem:
    expr: object  # expression or Aggregate
    alias: str | None = None

    @property
    def name(self):
        return self.alias if self.alias else self.expr.text()

    def is_aggregate(self):
        return isinstance(self.expr, Aggregate)


@dataclass(frozen=True)
class NodePattern:
    var: str | None
    labels: tuple = ()
    props: tuple = ()  # ((key, literal value), ...)


@dataclass(frozen=True)
class EdgePattern:
    var: str | None
    rel_type: str | None
    direction: str  # right | left | undirected


@dataclass(frozen=True)
class PathPattern:
    nodes: tuple  # NodePattern, n+1 of them
    edges: tuple  # EdgePattern, n of them


@dataclass(frozen=True)
class Query:
    patterns: tuple
    where: object | None
    returns: tuple  # ReturnItem
    distinct: bool = False
    order_by: tuple = ()  # ((return index, ascending bool), ...)
    limit: int | None = None

    def bound_vars(self):
        out = set()
        for pattern in self.patterns:
            for node in pattern.nodes:
                if node.var:
                    out.add(node.var)
            for edge in pattern.edges:
                if edge.var:
                    out.add(edge.var)
        return out


@dataclass
class ResultTable:
    columns: list
    rows: list = field(default_factory=list)

    def __len__(self):
        return len(self.rows)
