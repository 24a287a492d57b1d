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
"""Inverse mapping: MEDS-OWL graph back to MEDS tables.

The inverse reads the triple templates of the mapping backwards. What the graph does not keep comes back in
a normal form: every event lands in one shard, in canonical order, and the code table lists every code node.
"""

import logging
from datetime import datetime
from urllib.parse import unquote

from tqdm import tqdm

from meds_graph.common.datasets.meds_dataset import DEFAULT_SHARD_NAME, MedsDataset
from meds_graph.common.datasets.records import (
    LABEL_VALUE_KINDS,
    CodeRecord,
    DatasetMetadataRecord,
    EventRecord,
    LabelRecord,
    SplitAssignment,
)
from meds_graph.common.mapping.iri_scheme import license_from_iri
from meds_graph.common.rdf.graph import Graph
from meds_graph.common.rdf.terms import IRI, XSD_DATETIME, Literal, Term
from meds_graph.common.rdf.vocabulary import (
    DCAT_ACCESS_URL,
    DCAT_DISTRIBUTION,
    DCAT_DOWNLOAD_URL,
    DCT_CREATED,
    DCT_HAS_VERSION,
    DCT_LICENSE,
    DCT_TITLE,
    DEFAULT_MEDS_NAMESPACE,
    PROV_WAS_GENERATED_BY,
    RDFS_LABEL,
    MedsVocabulary,
    make_vocabulary,
)
from meds_graph.common.roundtrip.canonical import (
    canonical_events,
    canonical_labels,
    canonical_splits,
)


class InversionError(ValueError):
    pass


class NonConformingGraphError(InversionError):
    pass


class AmbiguousMetadataError(InversionError):
    pass


def _objects(g: Graph, node: IRI, predicate: IRI, min_count: int, max_count: int | None) -> list[Term]:
    values = sorted(g.objects(node, predicate), key=lambda term: term.n3())
    if len(values) < min_count or (max_count is not None and len(values) > max_count):
        expected = f"{min_count}" if min_count == max_count else f"{min_count} to {max_count or 'any'}"
        raise NonConformingGraphError(
            f"{node.n3()} has {len(values)} value(s) of {predicate.n3()}, expected {expected}. "
            "Validate the graph before inverting it."
        )
    return values


def _python_value(term: Term, node: IRI, predicate: IRI):
    if not isinstance(term, Literal):
        raise NonConformingGraphError(f"{node.n3()} {predicate.n3()} must be a literal. Got {term.n3()}.")
    try:
        return term.to_python()
    except ValueError as e:
        raise NonConformingGraphError(f"{node.n3()} {predicate.n3()}: {e}") from e


def _iri(term: Term, node: IRI, predicate: IRI) -> IRI:
    if not isinstance(term, IRI):
        raise NonConformingGraphError(f"{node.n3()} {predicate.n3()} must be an IRI. Got {term.n3()}.")
    return term


def _required(g: Graph, node: IRI, predicate: IRI):
    return _python_value(_objects(g, node, predicate, 1, 1)[0], node, predicate)


def _optional(g: Graph, node: IRI, predicate: IRI):
    values = _objects(g, node, predicate, 0, 1)
    return _python_value(values[0], node, predicate) if values else None


def _datetime(g: Graph, node: IRI, predicate: IRI, required: bool = True) -> datetime | None:
    values = _objects(g, node, predicate, 1 if required else 0, 1)
    if not values:
        return None
    if not isinstance(values[0], Literal) or values[0].datatype != XSD_DATETIME:
        raise NonConformingGraphError(f"{node.n3()} {predicate.n3()} must be an xsd:dateTime literal.")
    return _python_value(values[0], node, predicate)


def _distribution_ordinal(node: IRI) -> tuple:
    last = node.value.rsplit("/", 1)[-1]
    return (0, int(last), node.value) if last.isascii() and last.isdigit() else (1, 0, node.value)


def invert_metadata(g: Graph, v: MedsVocabulary) -> DatasetMetadataRecord:
    datasets = sorted(g.instances_of(v.DatasetMetadata))
    if len(datasets) != 1:
        raise AmbiguousMetadataError(
            f"Expected exactly one {v.DatasetMetadata.n3()} node. Got {len(datasets)}."
        )
    dataset = datasets[0]

    licenses = _objects(g, dataset, DCT_LICENSE, 0, 1)
    license = license_from_iri(_iri(licenses[0], dataset, DCT_LICENSE), dataset) if licenses else None

    location_uris, description_uris = [], set()
    distributions = [_iri(d, dataset, DCAT_DISTRIBUTION) for d in g.objects(dataset, DCAT_DISTRIBUTION)]
    for distribution in sorted(distributions, key=_distribution_ordinal):
        for download_url in _objects(g, distribution, DCAT_DOWNLOAD_URL, 1, 1):
            location_uris.append(_iri(download_url, distribution, DCAT_DOWNLOAD_URL).value)
        for access_url in g.objects(distribution, DCAT_ACCESS_URL):
            description_uris.add(_iri(access_url, distribution, DCAT_ACCESS_URL).value)

    etl_name = etl_version = None
    etls = _objects(g, dataset, PROV_WAS_GENERATED_BY, 0, 1)
    if etls:
        etl = _iri(etls[0], dataset, PROV_WAS_GENERATED_BY)
        etl_name = _required(g, etl, RDFS_LABEL)
        etl_version = _optional(g, etl, DCT_HAS_VERSION)

    return DatasetMetadataRecord(
        dataset_name=_required(g, dataset, DCT_TITLE),
        meds_version=_required(g, dataset, v.medsVersion),
        created_at=_datetime(g, dataset, DCT_CREATED),
        dataset_version=_optional(g, dataset, DCT_HAS_VERSION),
        license=license,
        location_uris=tuple(location_uris),
        description_uris=tuple(sorted(description_uris)),
        etl_name=etl_name,
        etl_version=etl_version,
    )


class _SubjectIds:
    def __init__(self, g: Graph, v: MedsVocabulary):
        self.g = g
        self.v = v
        self._ids: dict[IRI, str] = {}

    def __call__(self, node: IRI, predicate: IRI) -> str:
        subject = _objects(self.g, node, predicate, 1, 1)[0]
        subject = _iri(subject, node, predicate)
        if subject not in self._ids:
            self._ids[subject] = _required(self.g, subject, self.v.subjectId)
        return self._ids[subject]


def invert(g: Graph, vocab_namespace: str = DEFAULT_MEDS_NAMESPACE, progress: bool = False) -> MedsDataset:
    """Rebuild a MEDS dataset from a graph produced by the mapping.

    The graph must conform to the builtin suite; the parts of it this function reads are checked on the way
    and a `NonConformingGraphError` is raised on the first problem. Events come back in one shard
    (`DEFAULT_SHARD_NAME`) in canonical order.
    """
    v = make_vocabulary(vocab_namespace)
    metadata = invert_metadata(g, v)
    subject_id = _SubjectIds(g, v)

    events = []
    for node in tqdm(sorted(g.instances_of(v.Event)), desc="Inverting events", disable=not progress):
        events.append(
            EventRecord(
                subject_id=subject_id(node, v.hasSubject),
                code_string=_required(g, node, v.codeString),
                time=_datetime(g, node, v.time, required=False),
                numeric_value=_optional(g, node, v.numericValue),
                text_value=_optional(g, node, v.textValue),
            )
        )

    codes = []
    for node in g.instances_of(v.Code):
        parents = [_iri(p, node, v.parentCode) for p in g.objects(node, v.parentCode)]
        codes.append(
            CodeRecord(
                code_string=_required(g, node, v.codeString),
                description=_optional(g, node, v.codeDescription),
                parent_codes=tuple(sorted(_required(g, parent, v.codeString) for parent in parents)),
            )
        )
    codes.sort(key=lambda c: c.code_string)

    splits = []
    for subject in g.subjects(v.assignedSplit):
        for split in g.objects(subject, v.assignedSplit):
            split_name = unquote(_iri(split, subject, v.assignedSplit).value.rsplit("/", 1)[-1])
            splits.append(SplitAssignment(_required(g, subject, v.subjectId), split_name))

    labels = []
    for node in g.instances_of(v.SubjectLabel):
        values = {
            f"{kind}_value": _optional(g, node, getattr(v, f"{kind}Value")) for kind in LABEL_VALUE_KINDS
        }
        labels.append(
            LabelRecord(
                subject_id=subject_id(node, v.hasSubject),
                prediction_time=_datetime(g, node, v.predictionTime),
                **values,
            )
        )

    logging.info(
        f"Inverted {len(events)} events, {len(codes)} codes, {len(splits)} split assignments "
        f"and {len(labels)} labels"
    )
    return MedsDataset.from_preloaded(
        metadata,
        {DEFAULT_SHARD_NAME: canonical_events(events)},
        codes=codes,
        splits=canonical_splits(splits),
        labels=canonical_labels(labels),
    )
