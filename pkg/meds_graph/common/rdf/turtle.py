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
"""Turtle reading and writing through rdflib. See `meds_graph.common.rdf.utils` for how literals are kept
lossless in both directions."""

import re

from meds_graph.common.rdf.graph import Graph
from meds_graph.common.rdf.terms import IRI
from meds_graph.common.rdf.utils import (
    BlankNodeUnsupportedError,
    RdfSerializationError,
    RdfSyntaxError,
    parse_with_rdflib,
    to_rdflib,
)

_PREFIX_RE = re.compile(r"^@prefix (?P<prefix>[^:\s]*): <(?P<namespace>[^>]*)> \.$")


class TurtleSyntaxError(RdfSyntaxError):
    pass


def _prefix_header(prefixes: dict[str, str]) -> str:
    return "".join(f"@prefix {prefix}: <{namespace}> .\n" for prefix, namespace in sorted(prefixes.items()))


def serialize_turtle(graph: Graph, prefixes: dict[str, str]) -> bytes:
    """Turtle rendering of `graph`.

    Every prefix of `prefixes` is declared, used or not, so an empty graph yields the declarations only.
    Namespaces without a prefix get the ones rdflib generates (`ns1`, ...), declared alongside.
    """
    for prefix, namespace in prefixes.items():
        try:
            IRI(namespace)
        except ValueError as e:
            raise ValueError(f"Prefix {prefix!r} maps to an invalid namespace IRI: {namespace!r}.") from e

    if len(graph) == 0:
        return _prefix_header(prefixes).encode("utf-8")

    try:
        body = to_rdflib(graph, prefixes).serialize(format="turtle", encoding="utf-8").decode("utf-8")
    except Exception as e:  # rdflib signals unwritable terms with plain exceptions
        raise RdfSerializationError(f"rdflib could not write the graph as Turtle: {e}") from e

    # rdflib opens with the prefixes it used, generated ones included.
    declared = dict(prefixes)
    lines = body.split("\n")
    start = 0
    while start < len(lines):
        match = _PREFIX_RE.match(lines[start])
        if match is not None:
            declared.setdefault(match["prefix"], match["namespace"])
        elif lines[start].strip():
            break
        start += 1
    return (_prefix_header(declared) + "\n" + "\n".join(lines[start:]).rstrip("\n") + "\n").encode("utf-8")


def parse_turtle(data: bytes | str) -> Graph:
    try:
        return parse_with_rdflib(data, "turtle")
    except BlankNodeUnsupportedError:
        raise
    except RdfSyntaxError as e:
        raise TurtleSyntaxError(f"invalid Turtle: {e}") from e
