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
from pathlib import Path

from meds_graph.common.rdf.graph import Graph
from meds_graph.common.rdf.ntriples import parse_ntriples, serialize_ntriples_canonical
from meds_graph.common.rdf.turtle import parse_turtle, serialize_turtle
from meds_graph.common.utils.io_utils import write_bytes_atomic

RDF_FORMATS = ("ntriples", "turtle")
TURTLE_SUFFIXES = (".ttl", ".turtle")


def format_from_path(path: str | Path) -> str:
    return "turtle" if Path(path).suffix.lower() in TURTLE_SUFFIXES else "ntriples"


def serialize_graph(graph: Graph, fmt: str, prefixes: dict[str, str] | None = None) -> bytes:
    if fmt == "ntriples":
        return serialize_ntriples_canonical(graph)
    if fmt == "turtle":
        return serialize_turtle(graph, prefixes or {})
    raise ValueError(f"Unsupported RDF format {fmt!r}. Expected one of {RDF_FORMATS}.")


def write_graph(graph: Graph, path: str | Path, fmt: str, prefixes: dict[str, str] | None = None):
    write_bytes_atomic(path, serialize_graph(graph, fmt, prefixes))


def read_graph(path: str | Path, fmt: str | None = None) -> Graph:
    """Read an N-Triples or Turtle file. The format is guessed from the suffix unless given."""
    data = Path(path).read_bytes()
    if (fmt or format_from_path(path)) == "turtle":
        return parse_turtle(data)
    return parse_ntriples(data)
