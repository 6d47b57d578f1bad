"""Recursive-descent parser producing a validated Query AST."""

from __future__ import annotations

from ..errors import QuerySemanticError, QuerySyntaxError
from .ast import (
    Aggregate,
    And,
    Cmp,
    EdgePattern,
    Literal,
    NodePattern,
    Not,
    Or,
    PathPattern,
    Prop,
    Query,
    ReturnItem,
    Var,
)
from .lexer import tokenize

AGG_FUNCS = {"COUNT", "SUM", "AVG", "MIN", "MAX"}
CMP_OPS = {"=", "<>", "<", "<=", ">", ">="}


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def error(self, expected):
        token = self.peek()
        raise QuerySyntaxError(
            f"expected {expected}, found {token.describe()}", token.line, token.column
        )

    def accept(self, kind, value=None):
        token = self.peek()
        if token.kind == kind and (value is None or token.value == value):
            return self.advance()
        return None

    def expect(self, kind, value=None):
        token = self.accept(kind, value)
        if token is None:
            self.error(value if value is not None else kind)
        return token

    # ---------------------------------------------------------------- clauses

    def parse_query(self):
        self.expect("KEYWORD", "MATCH")
        patterns = [self.parse_pattern()]
        while self.accept("SYMBOL", ","):
            patterns.append(self.parse_pattern())
        where = None
        if self.accept("KEYWORD", "WHERE"):
            where = self.parse_expr()
        self.expect("KEYWORD", "RETURN")
        distinct = bool(self.accept("KEYWORD", "DISTINCT"))
        returns = [self.parse_return_item()]
        while self.accept("SYMBOL", ","):
            returns.append(self.parse_return_item())
        order_by = []
        if self.accept("KEYWORD", "ORDER"):
            self.expect("KEYWORD", "BY")
            order_by.append(self.parse_order(returns))
            while self.accept("SYMBOL", ","):
                order_by.append(self.parse_order(returns))
        limit = None
        if self.accept("KEYWORD", "LIMIT"):
            token = self.expect("INT")
            if token.value < 0:
                raise QuerySemanticError("LIMIT must be non-negative")
            limit = token.value
        self.expect("EOF")
        query = Query(
            patterns=tuple(patterns),
            where=where,
            returns=tuple(returns),
            distinct=distinct,
            order_by=tuple(order_by),
            limit=limit,
        )
        _check_semantics(query)
        return query

    def parse_pattern(self):
        nodes = [self.parse_node()]
        edges = []
        while self.peek().kind == "SYMBOL" and self.peek().value in ("-[", "<-["):
            edges.append(self.parse_edge())
            nodes.append(self.parse_node())
        return PathPattern(tuple(nodes), tuple(edges))

    def parse_node(self):
        self.expect("SYMBOL", "(")
        var = None
        token = self.accept("IDENT")
        if token:
            var = token.value
        labels = []
        while self.accept("SYMBOL", ":"):
            labels.append(self.expect("IDENT").value)
        props = []
        if self.accept("SYMBOL", "{"):
            if not self.accept("SYMBOL", "}"):
                props.append(self.parse_prop_entry())
                while self.accept("SYMBOL", ","):
                    props.append(self.parse_prop_entry())
                self.expect("SYMBOL", "}")
        self.expect("SYMBOL", ")")
        return NodePattern(var, tuple(labels), tuple(props))

    def parse_prop_entry(self):
        key = self.expect("IDENT").value
        self.expect("SYMBOL", ":")
        return (key, self.parse_literal())

    def parse_edge(self):
        if self.accept("SYMBOL", "<-["):
            var, rel = self.parse_edge_body()
            self.expect("SYMBOL", "]-")
            return EdgePattern(var, rel, "left")
        self.expect("SYMBOL", "-[")
        var, rel = self.parse_edge_body()
        if self.accept("SYMBOL", "]->"):
            return EdgePattern(var, rel, "right")
        self.expect("SYMBOL", "]-")
        return EdgePattern(var, rel, "undirected")

    def parse_edge_body(self):
        var = None
        token = self.accept("IDENT")
        if token:
            var = token.value
        rel = None
        if self.accept("SYMBOL", ":"):
            rel = self.expect("IDENT").value
        return var, rel

    def parse_return_item(self):
        token = self.peek()
        if token.kind == "KEYWORD" and token.value in AGG_FUNCS:
            func = self.advance().value
            self.expect("SYMBOL", "(")
            if self.accept("SYMBOL", "*"):
                if func != "COUNT":
                    raise QuerySemanticError(f"{func}(*) is not supported, only COUNT(*)")
                arg = None
            else:
                arg = self.parse_expr()
            self.expect("SYMBOL", ")")
            expr = Aggregate(func, arg)
        else:
            expr = self.parse_expr()
        alias = None
        if self.accept("KEYWORD", "AS"):
            alias = self.expect("IDENT").value
        return ReturnItem(expr, alias)

    def parse_order(self, returns):
        token = self.peek()
        index = None
        if token.kind == "INT":
            self.advance()
            if not (1 <= token.value <= len(returns)):
                raise QuerySemanticError(
                    f"ORDER BY position {token.value} out of range 1..{len(returns)}"
                )
            index = token.value - 1
        else:
            expr = self.parse_expr()
            for i, item in enumerate(returns):
                if item.expr == expr or (
                    isinstance(expr, Var) and item.alias == expr.name
                ):
                    index = i
                    break
            if index is None:
                raise QuerySemanticError(
                    f"ORDER BY key {expr.text()!r} does not match any return item"
                )
        ascending = True
        if self.accept("KEYWORD", "DESC"):
            ascending = False
        else:
            self.accept("KEYWORD", "ASC")
        return (index, ascending)

    # ------------------------------------------------------------ expressions

    def parse_expr(self):
        return self.parse_or()

    def parse_or(self):
        left = self.parse_and()
        while self.accept("KEYWORD", "OR"):
            left = Or(left, self.parse_and())
        return left

    def parse_and(self):
        left = self.parse_not()
        while self.accept("KEYWORD", "AND"):
            left = And(left, self.parse_not())
        return left

    def parse_not(self):
        if self.accept("KEYWORD", "NOT"):
            return Not(self.parse_not())
        return self.parse_comparison()

    def parse_comparison(self):
        left = self.parse_primary()
        token = self.peek()
        if token.kind == "SYMBOL" and token.value in CMP_OPS:
            op = self.advance().value
            right = self.parse_primary()
            return Cmp(op, left, right)
        return left

    def parse_primary(self):
        if self.accept("SYMBOL", "("):
            expr = self.parse_expr()
            self.expect("SYMBOL", ")")
            return expr
        token = self.peek()
        if token.kind == "KEYWORD" and token.value in AGG_FUNCS:
            raise QuerySemanticError("aggregates are not allowed inside WHERE")
        if token.kind == "IDENT":
            self.advance()
            if self.accept("SYMBOL", "."):
                key = self.expect("IDENT")
                return Prop(token.value, key.value)
            return Var(token.value)
        return Literal(self.parse_literal_token())

    def parse_literal(self):
        return Literal(self.parse_literal_token())

    def parse_literal_token(self):
        token = self.peek()
        if token.kind in ("INT", "REAL", "STRING"):
            return self.advance().value
        if token.kind == "KEYWORD" and token.value in ("TRUE", "FALSE"):
            self.advance()
            return token.value == "TRUE"
        if token.kind == "KEYWORD" and token.value == "NULL":
            self.advance()
            return None
        if token.kind == "SYMBOL" and token.value == "-":
            self.advance()
            number = self.expect_number()
            return -number
        self.error("a literal")

    def expect_number(self):
        token = self.peek()
        if token.kind in ("INT", "REAL"):
            return self.advance().value
        self.error("a number")


def _expr_vars(expr):
    if isinstance(expr, (Var,)):
        return {expr.name}
    if isinstance(expr, Prop):
        return {expr.var}
    if isinstance(expr, Cmp):
        return _expr_vars(expr.left) | _expr_vars(expr.right)
    if isinstance(expr, (And, Or)):
        return _expr_vars(expr.left) | _expr_vars(expr.right)
    if isinstance(expr, Not):
        return _expr_vars(expr.operand)
    if isinstance(expr, Aggregate):
        return _expr_vars(expr.arg) if expr.arg is not None else set()
    return set()


def _check_semantics(query):
    bound = query.bound_vars()
    used = set()
    if query.where is not None:
        used |= _expr_vars(query.where)
    for item in query.returns:
        used |= _expr_vars(item.expr)
    unbound = sorted(used - bound)
    if unbound:
        raise QuerySemanticError(f"unbound variable(s): {', '.join(unbound)}")


def parse_query(text):
    """Parse query text into a Query AST; raises on syntax/semantic errors."""
    return _Parser(tokenize(text)).parse_query()
