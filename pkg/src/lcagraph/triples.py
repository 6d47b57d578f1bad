"""Lossless conversion between property graphs and an N-Triples-style form.

IRI scheme (all under urn:lcag:):
  node <id>          urn:lcag:node:<id>
  label statement    predicate urn:lcag:meta:label, object urn:lcag:label:<Label>
  node property      predicate urn:lcag:prop:<key>, typed literal object
  bare edge          <src> urn:lcag:rel:<TYPE> <dst>
  edge with props    reified: subject urn:lcag:edge:<id> with urn:lcag:meta:src,
                     urn:lcag:meta:rel, urn:lcag:meta:dst plus property literals
  bare node          urn:lcag:meta:exists "true" (nodes with no labels/props
                     would otherwise vanish from the encoding)

Literals are "lexical"^^<urn:lcag:dt:KIND> with KIND one of
int|real|bool|text|realarray|quantity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from urllib.parse import quote, unquote

from .errors import IntegrityError, VocabularyError
from .graph import Edge, Graph, Node
from .values import (
    KIND_BOOL,
    KIND_INT,
    KIND_QUANTITY,
    KIND_REAL,
    KIND_REALARRAY,
    KIND_TEXT,
    Quantity,
    value_kind,
)

_NS = "urn:lcag:"


@dataclass(frozen=True)
class Triple:
    """subject and predicate are IRIs; obj is an IRI or a typed literal token."""

    subject: str
    predicate: str
    obj: str

    def line(self):
        obj = self.obj if self.obj.startswith('"') else f"<{self.obj}>"
        return f"<{self.subject}> <{self.predicate}> {obj} ."


def _escape(text):
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


def _unescape(text):
    out = []
    it = iter(range(len(text)))
    i = 0
    while i < len(text):
        c = text[i]
        if c == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            out.append({"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}.get(nxt, nxt))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _literal(value):
    kind = value_kind(value)
    if kind == KIND_TEXT:
        lexical = value
    elif kind == KIND_BOOL:
        lexical = "true" if value else "false"
    elif kind == KIND_INT:
        lexical = str(value)
    elif kind == KIND_REAL:
        lexical = repr(value)
    elif kind == KIND_REALARRAY:
        lexical = json.dumps(list(value), separators=(",", ":"))
    else:
        lexical = json.dumps(value.to_json(), separators=(",", ":"), sort_keys=True)
    return f'"{_escape(lexical)}"^^<{_NS}dt:{kind}>'


def _parse_literal(token):
    if not token.startswith('"'):
        raise VocabularyError(f"expected literal, got {token!r}")
    end = _find_closing_quote(token)
    lexical = _unescape(token[1:end])
    rest = token[end + 1 :]
    if not rest.startswith("^^<") or not rest.endswith(">"):
        raise VocabularyError(f"literal missing datatype: {token!r}")
    dtype = rest[3:-1]
    if not dtype.startswith(_NS + "dt:"):
        raise VocabularyError(f"foreign literal datatype {dtype!r}")
    kind = dtype[len(_NS + "dt:") :]
    if kind == KIND_TEXT:
        return lexical
    if kind == KIND_BOOL:
        return lexical == "true"
    if kind == KIND_INT:
        return int(lexical)
    if kind == KIND_REAL:
        return float(lexical)
    if kind == KIND_REALARRAY:
        return [float(x) for x in json.loads(lexical)]
    if kind == KIND_QUANTITY:
        return Quantity.from_json(json.loads(lexical))
    raise VocabularyError(f"unknown literal kind {kind!r}")


def _find_closing_quote(token):
    i = 1
    while i < len(token):
        if token[i] == "\\":
            i += 2
            continue
        if token[i] == '"':
            return i
        i += 1
    raise VocabularyError(f"unterminated literal {token!r}")


def _node_iri(nid):
    return f"{_NS}node:{nid}"


def to_triples(graph):
    """Encode a graph as a lexicographically sorted list of triples."""
    triples = []
    for node in graph.nodes():
        subject = _node_iri(node.id)
        if not node.labels and not node.props:
            triples.append(Triple(subject, f"{_NS}meta:exists", _literal(True)))
        for label in node.labels:
            triples.append(
                Triple(subject, f"{_NS}meta:label", f"{_NS}label:{quote(label, safe='')}")
            )
        for key, value in node.props.items():
            triples.append(
                Triple(subject, f"{_NS}prop:{quote(key, safe='')}", _literal(value))
            )
    for edge in graph.edges():
        rel_iri = f"{_NS}rel:{quote(edge.rel_type, safe='')}"
        if not edge.props:
            triples.append(Triple(_node_iri(edge.src), rel_iri, _node_iri(edge.dst)))
        else:
            subject = f"{_NS}edge:{edge.id}"
            triples.append(Triple(subject, f"{_NS}meta:src", _node_iri(edge.src)))
            triples.append(Triple(subject, f"{_NS}meta:rel", rel_iri))
            triples.append(Triple(subject, f"{_NS}meta:dst", _node_iri(edge.dst)))
            for key, value in edge.props.items():
                triples.append(
                    Triple(subject, f"{_NS}prop:{quote(key, safe='')}", _literal(value))
                )
    triples.sort(key=lambda t: t.line())
    return triples


def format_ntriples(triples):
    return "".join(t.line() + "\n" for t in triples)


def parse_ntriples(text):
    """Parse N-Triples-style lines back into Triple objects."""
    triples = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if not line.endswith("."):
            raise VocabularyError(f"line {lineno}: missing terminating '.'")
        line = line[:-1].strip()
        parts = _split_triple(line, lineno)
        subject, predicate, obj = parts
        triples.append(Triple(subject, predicate, obj))
    return triples


def _split_triple(line, lineno):
    if not line.startswith("<"):
        raise VocabularyError(f"line {lineno}: subject must be an IRI")
    s_end = line.index(">")
    subject = line[1:s_end]
    rest = line[s_end + 1 :].strip()
    if not rest.startswith("<"):
        raise VocabularyError(f"line {lineno}: predicate must be an IRI")
    p_end = rest.index(">")
    predicate = rest[1:p_end]
    obj = rest[p_end + 1 :].strip()
    if obj.startswith("<") and obj.endswith(">"):
        obj = obj[1:-1]
    elif not obj.startswith('"'):
        raise VocabularyError(f"line {lineno}: object must be an IRI or literal")
    return subject, predicate, obj


def _parse_id(iri, prefix):
    token = iri[len(prefix) :]
    try:
        return int(token)
    except ValueError:
        raise VocabularyError(f"non-numeric id in {iri!r}") from None


def from_triples(triples):
    """Rebuild a graph from triples produced by :func:`to_triples`.

    Node ids and reified edge ids are restored exactly; bare edges get fresh
    ids assigned in sorted-triple order.
    """
    foreign = sorted(
        {t.subject for t in triples if not t.subject.startswith(_NS)}
        | {t.predicate for t in triples if not t.predicate.startswith(_NS)}
    )
    if foreign:
        raise VocabularyError(
            f"unsupported vocabulary: {', '.join(foreign)}", subjects=foreign
        )

    node_labels = {}
    node_props = {}
    reified = {}
    bare_edges = []

    for t in sorted(triples, key=lambda t: t.line()):
        if t.subject.startswith(_NS + "node:"):
            nid = _parse_id(t.subject, _NS + "node:")
            if t.predicate == _NS + "meta:exists":
                node_labels.setdefault(nid, set())
            elif t.predicate == _NS + "meta:label":
                if not t.obj.startswith(_NS + "label:"):
                    raise VocabularyError(f"bad label object {t.obj!r}")
                node_labels.setdefault(nid, set()).add(
                    unquote(t.obj[len(_NS + "label:") :])
                )
            elif t.predicate.startswith(_NS + "prop:"):
                key = unquote(t.predicate[len(_NS + "prop:") :])
                node_props.setdefault(nid, {})[key] = _parse_literal(t.obj)
                node_labels.setdefault(nid, set())
            elif t.predicate.startswith(_NS + "rel:"):
                rel = unquote(t.predicate[len(_NS + "rel:") :])
                dst = _parse_id(t.obj, _NS + "node:")
                bare_edges.append((nid, rel, dst))
                node_labels.setdefault(nid, set())
                node_labels.setdefault(dst, set())
            else:
                raise VocabularyError(f"unknown node predicate {t.predicate!r}")
        elif t.subject.startswith(_NS + "edge:"):
            eid = _parse_id(t.subject, _NS + "edge:")
            entry = reified.setdefault(eid, {"props": {}})
            if t.predicate == _NS + "meta:src":
                entry["src"] = _parse_id(t.obj, _NS + "node:")
            elif t.predicate == _NS + "meta:dst":
                entry["dst"] = _parse_id(t.obj, _NS + "node:")
            elif t.predicate == _NS + "meta:rel":
                if not t.obj.startswith(_NS + "rel:"):
                    raise VocabularyError(f"bad rel object {t.obj!r}")
                entry["rel"] = unquote(t.obj[len(_NS + "rel:") :])
            elif t.predicate.startswith(_NS + "prop:"):
                key = unquote(t.predicate[len(_NS + "prop:") :])
                entry["props"][key] = _parse_literal(t.obj)
            else:
                raise VocabularyError(f"unknown edge predicate {t.predicate!r}")
        else:
            raise VocabularyError(f"unknown subject {t.subject!r}", subjects=[t.subject])

    g = Graph()
    for nid in sorted(node_labels):
        g._nodes[nid] = _new_node(nid, node_labels[nid], node_props.get(nid, {}))
        g._out[nid] = []
        g._in[nid] = []
        for label in node_labels[nid]:
            g._label_index.setdefault(label, set()).add(nid)

    max_id = max(node_labels, default=0)

    for eid in sorted(reified):
        entry = reified[eid]
        missing = [k for k in ("src", "rel", "dst") if k not in entry]
        if missing:
            raise IntegrityError(
                f"edge reification {eid} is missing {', '.join(missing)} statement(s)"
            )
        src, dst = entry["src"], entry["dst"]
        if src not in g._nodes or dst not in g._nodes:
            raise IntegrityError(f"edge reification {eid} references unknown node")
        g._edges[eid] = Edge(eid, entry["rel"], src, dst, entry["props"])
        g._out[src].append(eid)
        g._in[dst].append(eid)
        max_id = max(max_id, eid)

    g._next_id = max_id + 1
    for src, rel, dst in bare_edges:
        g.create_edge(rel, src, dst, {})
    return g


def _new_node(nid, labels=(), props=None):
    return Node(nid, set(labels), dict(props or {}))
