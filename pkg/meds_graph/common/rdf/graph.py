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
from typing import Iterable, Iterator

from meds_graph.common.rdf.terms import IRI, Term, Triple
from meds_graph.common.rdf.vocabulary import RDF_TYPE


class Graph:
    """A set of triples indexed by subject and by predicate.

    Graphs have set semantics: adding a triple that is already present is a no-op, `len(graph)` is the
    number of distinct triples and two graphs are equal when they hold the same triples, whatever the
    insertion order.

    A graph is written by a single thread. Parallel builders each fill their own graph and the results are
    combined with `union` / `|=`.
    """

    __slots__ = ("_triples", "_by_subject", "_by_predicate")

    def __init__(self, triples: Iterable[Triple] = ()):
        self._triples: set[Triple] = set()
        self._by_subject: dict[IRI, set[Triple]] = {}
        self._by_predicate: dict[IRI, set[Triple]] = {}
        self.update(triples)

    def add(self, triple: Triple) -> bool:
        """Add a triple. Returns True if the graph grew."""
        if triple in self._triples:
            return False
        self._triples.add(triple)
        self._by_subject.setdefault(triple.subject, set()).add(triple)
        self._by_predicate.setdefault(triple.predicate, set()).add(triple)
        return True

    def insert(self, triple: Triple) -> "Graph":
        self.add(triple)
        return self

    def update(self, triples: Iterable[Triple]) -> "Graph":
        for triple in triples:
            self.add(triple)
        return self

    def remove(self, triple: Triple) -> bool:
        if triple not in self._triples:
            return False
        self._triples.discard(triple)
        for index, key in ((self._by_subject, triple.subject), (self._by_predicate, triple.predicate)):
            bucket = index[key]
            bucket.discard(triple)
            if not bucket:
                del index[key]
        return True

    def union(self, other: "Graph") -> "Graph":
        merged = self.copy()
        merged |= other
        return merged

    def copy(self) -> "Graph":
        return Graph(self._triples)

    def __ior__(self, other: "Graph") -> "Graph":
        return self.update(other._triples)

    def __or__(self, other: "Graph") -> "Graph":
        return self.union(other)

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, triple: object) -> bool:
        return triple in self._triples

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    __hash__ = None

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(size={len(self)})"

    def triples(
        self, subject: IRI | None = None, predicate: IRI | None = None, object: Term | None = None
    ) -> Iterator[Triple]:
        """Iterate over the triples matching a pattern, `None` acting as a wildcard."""
        if subject is not None:
            candidates = self._by_subject.get(subject, ())
        elif predicate is not None:
            candidates = self._by_predicate.get(predicate, ())
        else:
            candidates = self._triples
        for triple in candidates:
            if predicate is not None and triple.predicate != predicate:
                continue
            if object is not None and triple.object != object:
                continue
            yield triple

    def subjects(self, predicate: IRI | None = None, object: Term | None = None) -> set[IRI]:
        return {t.subject for t in self.triples(None, predicate, object)}

    def objects(self, subject: IRI | None = None, predicate: IRI | None = None) -> list[Term]:
        return [t.object for t in self.triples(subject, predicate, None)]

    def value(self, subject: IRI, predicate: IRI) -> Term | None:
        """The single object of (subject, predicate), or None. Raises if there is more than one."""
        values = self.objects(subject, predicate)
        if len(values) > 1:
            raise ValueError(f"Expected at most one value for ({subject}, {predicate}). Got {len(values)}.")
        return values[0] if values else None

    def instances_of(self, cls: IRI) -> set[IRI]:
        return self.subjects(RDF_TYPE, cls)

    def has_type(self, node: Term, cls: IRI) -> bool:
        return isinstance(node, IRI) and Triple(node, RDF_TYPE, cls) in self._triples

    def subject_nodes(self) -> Iterable[IRI]:
        return self._by_subject.keys()

    def predicate_nodes(self) -> Iterable[IRI]:
        return self._by_predicate.keys()
