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
"""Graph statistics: distinct term counts, class sizes and the distribution of triples per event.

Conventions, also written into the JSON report:
- `distinct_iris` counts IRIs in any position, predicates and classes included.
- `distinct_objects` counts IRIs and literals in object position together.
- The standard deviation is the population one (the graph is the whole corpus, not a sample).
- The median of an even number of values is the lower middle value.
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from tqdm import tqdm

from meds_graph.common.rdf.terms import IRI, Literal, Triple
from meds_graph.common.rdf.vocabulary import DEFAULT_MEDS_NAMESPACE, RDF_TYPE, make_vocabulary
from meds_graph.common.utils.io_utils import dump_json_bytes
from meds_graph.common.utils.utils import format_big_number

STATS_CONVENTIONS = {
    "distinct_iris": "IRIs in subject, predicate and object position",
    "distinct_objects": "IRIs and literals in object position",
    "std": "population standard deviation",
    "median": "lower middle value for an even count",
    "blank_node_count": "always 0: blank nodes are not representable",
}


@dataclass(frozen=True)
class TripleDistribution:
    mean: float
    std: float
    min: int
    max: int
    median: int
    count: int

    @classmethod
    def from_counts(cls, counts: Iterable[int]) -> "TripleDistribution | None":
        values = np.sort(np.fromiter(counts, dtype=np.int64))
        if values.size == 0:
            return None
        return cls(
            mean=float(values.mean()),
            std=float(values.std(ddof=0)),
            min=int(values[0]),
            max=int(values[-1]),
            median=int(values[(values.size - 1) // 2]),
            count=int(values.size),
        )

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "std": self.std,
            "min": self.min,
            "max": self.max,
            "median": self.median,
        }


@dataclass(frozen=True)
class GraphStats:
    triple_count: int = 0
    distinct_subjects: int = 0
    distinct_predicates: int = 0
    distinct_objects: int = 0
    distinct_iris: int = 0
    distinct_literals: int = 0
    # There is no blank node type, so this is always 0.
    blank_node_count: int = 0
    per_class_instance_counts: dict[str, int] = field(default_factory=dict)
    # None when the graph has no event node.
    event_triple_distribution: TripleDistribution | None = None

    def to_dict(self) -> dict:
        distribution = self.event_triple_distribution
        return {
            "triple_count": self.triple_count,
            "distinct_subjects": self.distinct_subjects,
            "distinct_predicates": self.distinct_predicates,
            "distinct_objects": self.distinct_objects,
            "distinct_iris": self.distinct_iris,
            "distinct_literals": self.distinct_literals,
            "blank_node_count": self.blank_node_count,
            "per_class_instance_counts": dict(sorted(self.per_class_instance_counts.items())),
            "event_triple_distribution": distribution.to_dict() if distribution is not None else None,
            "conventions": STATS_CONVENTIONS,
        }


class StatsAccumulator:
    """Mergeable partial aggregate of `GraphStats`.

    Counting is exact, with hash sets. Accumulators merged together must have seen disjoint sets of triples
    (e.g. a partition of one graph), otherwise shared triples are counted twice in `triple_count` and in the
    per-subject counts.
    """

    def __init__(self, event_class: IRI | None = None):
        self.event_class = event_class or make_vocabulary(DEFAULT_MEDS_NAMESPACE).Event
        self.triple_count = 0
        self.subjects: set[IRI] = set()
        self.predicates: set[IRI] = set()
        self.objects: set[IRI | Literal] = set()
        self.instances: dict[IRI, set[IRI]] = {}
        self.triples_per_subject: Counter[IRI] = Counter()

    def update(self, triple: Triple) -> "StatsAccumulator":
        self.triple_count += 1
        self.subjects.add(triple.subject)
        self.predicates.add(triple.predicate)
        self.objects.add(triple.object)
        self.triples_per_subject[triple.subject] += 1
        if triple.predicate == RDF_TYPE and isinstance(triple.object, IRI):
            self.instances.setdefault(triple.object, set()).add(triple.subject)
        return self

    def update_all(self, triples: Iterable[Triple]) -> "StatsAccumulator":
        for triple in triples:
            self.update(triple)
        return self

    def merge(self, other: "StatsAccumulator") -> "StatsAccumulator":
        """Combine two partial aggregates into a new one. Associative and commutative."""
        if other.event_class != self.event_class:
            raise ValueError(
                f"Can't merge stats over different event classes: {self.event_class}, {other.event_class}."
            )
        merged = StatsAccumulator(self.event_class)
        merged.triple_count = self.triple_count + other.triple_count
        merged.subjects = self.subjects | other.subjects
        merged.predicates = self.predicates | other.predicates
        merged.objects = self.objects | other.objects
        merged.instances = {
            cls: self.instances.get(cls, set()) | other.instances.get(cls, set())
            for cls in self.instances.keys() | other.instances.keys()
        }
        merged.triples_per_subject = self.triples_per_subject + other.triples_per_subject
        return merged

    def finalize(self) -> GraphStats:
        iri_objects = {o for o in self.objects if isinstance(o, IRI)}
        events = self.instances.get(self.event_class, set())
        return GraphStats(
            triple_count=self.triple_count,
            distinct_subjects=len(self.subjects),
            distinct_predicates=len(self.predicates),
            distinct_objects=len(self.objects),
            distinct_iris=len(self.subjects | self.predicates | iri_objects),
            distinct_literals=len(self.objects) - len(iri_objects),
            per_class_instance_counts={cls.value: len(nodes) for cls, nodes in self.instances.items()},
            event_triple_distribution=TripleDistribution.from_counts(
                self.triples_per_subject[event] for event in events
            ),
        )


def compute_stats(
    triples: Iterable[Triple], vocab_namespace: str = DEFAULT_MEDS_NAMESPACE, progress: bool = False
) -> GraphStats:
    """Statistics of a graph, or of any iterable of distinct triples."""
    accumulator = StatsAccumulator(make_vocabulary(vocab_namespace).Event)
    accumulator.update_all(tqdm(triples, desc="Computing stats", disable=not progress))
    return accumulator.finalize()


def emit_stats_report(stats: GraphStats) -> bytes:
    """JSON report of `stats`. Key order is fixed, so equal stats give byte-identical reports."""
    return dump_json_bytes(stats.to_dict())


def format_stats_table(stats: GraphStats) -> str:
    rows = [
        ("triples", format_big_number(stats.triple_count, 2), stats.triple_count),
        ("distinct subjects", format_big_number(stats.distinct_subjects, 2), stats.distinct_subjects),
        ("distinct predicates", format_big_number(stats.distinct_predicates, 2), stats.distinct_predicates),
        ("distinct objects", format_big_number(stats.distinct_objects, 2), stats.distinct_objects),
        ("distinct IRIs", format_big_number(stats.distinct_iris, 2), stats.distinct_iris),
        ("distinct literals", format_big_number(stats.distinct_literals, 2), stats.distinct_literals),
        ("blank nodes", "0", stats.blank_node_count),
    ]
    lines = [f"{name:<24} {exact:>14,}  ({short})" for name, short, exact in rows]
    if stats.per_class_instance_counts:
        lines.append("instances per class:")
        for cls, count in sorted(stats.per_class_instance_counts.items()):
            lines.append(f"  {cls:<60} {count:>14,}")
    distribution = stats.event_triple_distribution
    if distribution is None:
        lines.append("triples per event: no event nodes")
    else:
        lines.append(
            f"triples per event: mean {distribution.mean:.2f} (std {distribution.std:.2f}), "
            f"median {distribution.median}, min {distribution.min}, max {distribution.max} "
            f"over {distribution.count:,} events"
        )
    return "\n".join(lines) + "\n"
