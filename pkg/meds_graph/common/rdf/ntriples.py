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
"""Canonical N-Triples writer, and a reader over rdflib's N-Triples parser.

Canonical form: one statement per line, LF line endings, UTF-8, lines sorted by code point. Since every
serialized term is self-delimiting, sorting the lines is the same as sorting the (subject, predicate, object)
tuples of serialized terms. Documents too large for memory are written from sorted runs spooled to disk,
see `NTriplesSpool`.
"""

import heapq
import tempfile
from pathlib import Path
from typing import Iterable, Iterator

from meds_graph.common.rdf.graph import Graph
from meds_graph.common.rdf.terms import Triple
from meds_graph.common.rdf.utils import BlankNodeUnsupportedError, RdfSyntaxError, parse_with_rdflib
from meds_graph.common.utils.io_utils import atomic_writer, write_bytes_atomic


class NTriplesSyntaxError(RdfSyntaxError):
    pass


def _located(error: RdfSyntaxError, line_no: int | None) -> RdfSyntaxError:
    if isinstance(error, BlankNodeUnsupportedError):
        return BlankNodeUnsupportedError(str(error), line_no)
    return NTriplesSyntaxError(str(error), line_no)


def _first_bad_line(data: str) -> tuple[int, RdfSyntaxError] | None:
    # Statements never span lines, so the first line that fails alone is the one to report.
    for line_no, line in enumerate(data.split("\n"), start=1):
        if not line.strip(" \t\r") or line.lstrip().startswith("#"):
            continue
        try:
            parse_with_rdflib(line + "\n", "nt")
        except RdfSyntaxError as e:
            return line_no, e
    return None


def parse_ntriples(data: bytes | str) -> Graph:
    """Parse an N-Triples document into a `Graph`.

    Raises:
        BlankNodeUnsupportedError: a statement uses a blank node.
        NTriplesSyntaxError: anything else that is not a statement over IRIs and supported literals.

    Both errors carry the 1-based line number of the first bad statement.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise NTriplesSyntaxError(f"input is not valid UTF-8 ({e})") from e

    try:
        return parse_with_rdflib(data, "nt")
    except RdfSyntaxError as e:
        located = _first_bad_line(data)
        if located is None:
            raise _located(e, None) from e
        line_no, line_error = located
        raise _located(line_error, line_no) from e


def iter_canonical_lines(triples: Iterable[Triple]) -> list[str]:
    return sorted(t.n3() + "\n" for t in triples)


def serialize_ntriples_canonical(graph: Graph) -> bytes:
    """Canonical N-Triples bytes of `graph`. The output only depends on the set of triples."""
    return "".join(iter_canonical_lines(graph)).encode("utf-8")


def write_ntriples(graph: Graph, path: str | Path):
    write_bytes_atomic(path, serialize_ntriples_canonical(graph))


def read_ntriples(path: str | Path) -> Graph:
    return parse_ntriples(Path(path).read_bytes())


def merge_canonical_runs(runs: Iterable[Iterable[bytes]]) -> Iterator[bytes]:
    """K-way merge of sorted runs of canonical lines into one sorted run without repeated lines. UTF-8 byte
    order is code point order, so the merged run is canonical too."""
    previous = None
    for line in heapq.merge(*runs):
        if line != previous:
            yield line
        previous = line


class NTriplesSpool:
    """Sorted runs of canonical N-Triples lines kept in a temporary directory until they are merged into one
    canonical document. Memory holds one run at a time while adding and one line per run while merging.

    Use as a context manager; the runs are deleted on exit.
    """

    def __init__(self, directory: str | Path | None = None):
        self._tmp_dir = tempfile.TemporaryDirectory(prefix="meds-graph-runs-", dir=directory)
        self.run_paths: list[Path] = []

    def __enter__(self) -> "NTriplesSpool":
        return self

    def __exit__(self, *exc_info):
        self.close()

    def close(self):
        self._tmp_dir.cleanup()

    def add(self, triples: Iterable[Triple]) -> Path:
        path = Path(self._tmp_dir.name) / f"run-{len(self.run_paths):06d}.nt"
        with open(path, "wb") as f:
            f.writelines(line.encode("utf-8") for line in iter_canonical_lines(triples))
        self.run_paths.append(path)
        return path

    def iter_graphs(self) -> Iterator[Graph]:
        """Read the runs back one at a time, in the order they were added."""
        for path in self.run_paths:
            yield read_ntriples(path)

    def write_merged(self, path: str | Path, *extra: Iterable[Triple]) -> int:
        """Write the canonical document of every run plus the `extra` triples to `path`, atomically. Returns
        the number of triples written."""
        runs = [_iter_run(run_path) for run_path in self.run_paths]
        runs += [[line.encode("utf-8") for line in iter_canonical_lines(triples)] for triples in extra]
        count = 0
        with atomic_writer(path) as f:
            for line in merge_canonical_runs(runs):
                f.write(line)
                count += 1
        return count


def _iter_run(path: Path) -> Iterator[bytes]:
    # Binary mode: only LF ends a line, escaped CRs inside literals stay put.
    with open(path, "rb") as f:
        yield from f
