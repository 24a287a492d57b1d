#!/usr/bin/env python

# Copyright 2024 The meds-graph authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Errors shared by the RDF readers and writers, and the bridge between `Graph` and `rdflib.Graph`.

rdflib abbreviates numeric literals when it writes Turtle, doubles with only 7 significant digits, and
normalizes some lexical forms when it parses. The bridge makes both directions lossless for the canonical
lexical forms produced by `Literal.from_*`: doubles are written with their lexical form and datatype,
normalization is turned off while parsing, and numeric / boolean literals are brought back to their
canonical spelling.
"""

import threading
from contextlib import contextmanager

import rdflib

from meds_graph.common.rdf.graph import Graph
from meds_graph.common.rdf.terms import (
    IRI,
    SUPPORTED_DATATYPES,
    XSD_BOOLEAN,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    Literal,
    Term,
    Triple,
    format_double,
    parse_double,
)


class RdfSyntaxError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class BlankNodeUnsupportedError(RdfSyntaxError):
    pass


class RdfSerializationError(ValueError):
    pass


_normalize_lock = threading.Lock()


class _TypedDoubleLiteral(rdflib.Literal):
    """A double literal that the Turtle serializer writes as `"lexical"^^xsd:double`, never abbreviated."""

    def _literal_n3(self, use_plain: bool = False, qname_callback=None) -> str:
        return super()._literal_n3(False, qname_callback)


@contextmanager
def literal_normalization_disabled():
    with _normalize_lock:
        previous = rdflib.NORMALIZE_LITERALS
        rdflib.NORMALIZE_LITERALS = False
        try:
            yield
        finally:
            rdflib.NORMALIZE_LITERALS = previous


def _canonical_lexical(lexical: str, datatype: IRI) -> str:
    if datatype == XSD_DOUBLE:
        return format_double(parse_double(lexical))
    if datatype == XSD_INTEGER:
        return str(int(lexical))
    if datatype == XSD_BOOLEAN:
        return "true" if lexical.strip() in {"true", "1"} else "false"
    return lexical


def _term_to_rdflib(term: Term) -> rdflib.term.Identifier:
    if isinstance(term, IRI):
        return rdflib.URIRef(term.value)
    literal_cls = _TypedDoubleLiteral if term.datatype == XSD_DOUBLE else rdflib.Literal
    return literal_cls(term.lexical, datatype=rdflib.URIRef(term.datatype.value), normalize=False)


def _term_from_rdflib(node: rdflib.term.Node) -> Term:
    if isinstance(node, rdflib.BNode):
        raise BlankNodeUnsupportedError(f"blank node _:{node} is not supported")
    if isinstance(node, rdflib.URIRef):
        try:
            return IRI(str(node))
        except ValueError as e:
            raise RdfSyntaxError(str(e)) from e
    if isinstance(node, rdflib.Literal):
        if node.language is not None:
            raise RdfSyntaxError(f"language-tagged literals are not supported ({node.n3()})")
        datatype = IRI(str(node.datatype)) if node.datatype is not None else XSD_STRING
        if datatype not in SUPPORTED_DATATYPES:
            raise RdfSyntaxError(f"unsupported literal datatype {datatype}")
        try:
            return Literal(_canonical_lexical(str(node), datatype), datatype)
        except ValueError as e:
            raise RdfSyntaxError(f"invalid {datatype} lexical form {str(node)!r}") from e
    raise RdfSyntaxError(f"unsupported term {node!r}")


def to_rdflib(graph: Graph, prefixes: dict[str, str] | None = None) -> rdflib.Graph:
    rdf_graph = rdflib.Graph(bind_namespaces="none")
    for prefix, namespace in (prefixes or {}).items():
        rdf_graph.bind(prefix, rdflib.Namespace(namespace), override=True, replace=True)
    for t in graph:
        rdf_graph.add((_term_to_rdflib(t.subject), _term_to_rdflib(t.predicate), _term_to_rdflib(t.object)))
    return rdf_graph


def from_rdflib(rdf_graph: rdflib.Graph) -> Graph:
    """Raises `BlankNodeUnsupportedError` on blank nodes and `RdfSyntaxError` on terms outside the supported
    set (language tags, other datatypes, invalid lexical forms or IRIs)."""
    graph = Graph()
    for s, p, o in rdf_graph:
        graph.add(Triple(_term_from_rdflib(s), _term_from_rdflib(p), _term_from_rdflib(o)))
    return graph


def parse_with_rdflib(data: str | bytes, fmt: str) -> Graph:
    """Parse `data` with rdflib's `fmt` parser and convert the result. rdflib's own parse errors come out as
    `RdfSyntaxError`."""
    with literal_normalization_disabled():
        rdf_graph = rdflib.Graph(bind_namespaces="none")
        try:
            rdf_graph.parse(data=data, format=fmt)
        except Exception as e:  # rdflib raises parser-specific exception classes
            raise RdfSyntaxError(str(e).strip() or type(e).__name__) from e
        return from_rdflib(rdf_graph)
