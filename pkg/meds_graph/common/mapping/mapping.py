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
"""Table-driven mapping of MEDS records to MEDS-OWL triples.

Each `map_*` function is the triple template of one MEDS table and is a pure function of its record and the
`MappingContext`. `convert` runs them over a whole dataset, `convert_shardwise` does the same without
holding all event triples at once. Nodes shared between records (subjects, codes, splits) are emitted by
several records and deduplicated by the set semantics of `Graph`, so shards can be mapped independently and
merged in any order.
"""

import logging
from collections import defaultdict, deque
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator

from tqdm import tqdm

from meds_graph.common.datasets.meds_dataset import MedsDataset
from meds_graph.common.datasets.records import (
    CodeRecord,
    DatasetMetadataRecord,
    EventRecord,
    LabelRecord,
    SplitAssignment,
)
from meds_graph.common.mapping.configuration_mapping import MappingContext
from meds_graph.common.rdf.graph import Graph
from meds_graph.common.rdf.terms import IRI, Literal, Triple
from meds_graph.common.rdf.vocabulary import (
    DCAT_ACCESS_URL,
    DCAT_DISTRIBUTION,
    DCAT_DOWNLOAD_URL,
    DCT_CREATED,
    DCT_HAS_VERSION,
    DCT_LICENSE,
    DCT_LICENSE_DOCUMENT,
    DCT_TITLE,
    PROV_ACTIVITY,
    PROV_WAS_DERIVED_FROM,
    PROV_WAS_GENERATED_BY,
    RDF_TYPE,
    RDFS_LABEL,
)


class MappingError(ValueError):
    pass


class SelfParentError(MappingError):
    pass


class DanglingAccessUrlError(MappingError):
    pass


class MultipleLabelValuesError(MappingError):
    pass


class NoLabelValueError(MappingError):
    pass


class InvalidUriError(MappingError):
    pass


@dataclass(frozen=True)
class RecordError:
    """A record that could not be mapped, located by its table and coordinates."""

    table: str
    coordinates: tuple
    message: str

    def __str__(self) -> str:
        return f"{self.table}{list(self.coordinates)}: {self.message}"


class ConversionError(MappingError):
    def __init__(self, errors: list[RecordError]):
        self.errors = list(errors)
        shown = "\n".join(f"  - {e}" for e in self.errors[:10])
        more = f"\n  ... and {len(self.errors) - 10} more" if len(self.errors) > 10 else ""
        super().__init__(f"{len(self.errors)} record(s) could not be mapped:\n{shown}{more}")


def map_event(e: EventRecord, ids: tuple[str, int], ctx: MappingContext) -> list[Triple]:
    v, iris = ctx.vocab, ctx.iris
    event = iris.event_iri(*ids)
    triples = [
        Triple(event, RDF_TYPE, v.Event),
        Triple(event, v.hasSubject, iris.subject_iri(e.subject_id)),
        Triple(event, v.hasCode, iris.code_iri(e.code_string)),
        Triple(event, v.codeString, Literal.from_str(e.code_string)),
    ]
    if e.time is not None:
        triples.append(Triple(event, v.time, Literal.from_datetime(e.time)))
    if e.numeric_value is not None:
        triples.append(Triple(event, v.numericValue, Literal.from_double(e.numeric_value)))
    if e.text_value is not None:
        triples.append(Triple(event, v.textValue, Literal.from_str(e.text_value)))
    if ctx.include_event_provenance:
        triples.append(Triple(event, PROV_WAS_DERIVED_FROM, iris.dataset_iri()))
    return triples


def map_subject(subject_id: str, ctx: MappingContext) -> list[Triple]:
    subject = ctx.iris.subject_iri(subject_id)
    return [
        Triple(subject, RDF_TYPE, ctx.vocab.Subject),
        Triple(subject, ctx.vocab.subjectId, Literal.from_str(subject_id)),
    ]


def map_code_reference(code_string: str, ctx: MappingContext) -> list[Triple]:
    """The code node of a code string met outside the code table: type and code string only."""
    code = ctx.iris.code_iri(code_string)
    return [
        Triple(code, RDF_TYPE, ctx.vocab.Code),
        Triple(code, ctx.vocab.codeString, Literal.from_str(code_string)),
    ]


def map_code(c: CodeRecord, ctx: MappingContext) -> list[Triple]:
    if c.code_string in c.parent_codes:
        raise SelfParentError(f"Code {c.code_string!r} lists itself as a parent code.")
    v, iris = ctx.vocab, ctx.iris
    code = iris.code_iri(c.code_string)
    triples = [
        Triple(code, RDF_TYPE, v.Code),
        Triple(code, v.codeString, Literal.from_str(c.code_string)),
    ]
    if c.description is not None:
        triples.append(Triple(code, v.codeDescription, Literal.from_str(c.description)))
    for parent_code in c.parent_codes:
        parent = iris.code_iri(parent_code)
        triples.append(Triple(parent, RDF_TYPE, v.Code))
        triples.append(Triple(code, v.parentCode, parent))
    return triples


def _uri(value: str, field: str) -> IRI:
    try:
        return IRI(value)
    except ValueError as e:
        raise InvalidUriError(f"`{field}` is not a valid absolute IRI: {e}") from e


def map_dataset_metadata(m: DatasetMetadataRecord, ctx: MappingContext) -> list[Triple]:
    if m.description_uris and not m.location_uris:
        raise DanglingAccessUrlError(
            f"Dataset {m.dataset_name!r} has description URIs {list(m.description_uris)} but no "
            "location URI, so there is no distribution to attach them to."
        )
    v, iris = ctx.vocab, ctx.iris
    dataset = iris.dataset_iri()
    triples = [
        Triple(dataset, RDF_TYPE, v.DatasetMetadata),
        Triple(dataset, DCT_TITLE, Literal.from_str(m.dataset_name)),
        Triple(dataset, v.medsVersion, Literal.from_str(m.meds_version)),
        Triple(dataset, DCT_CREATED, Literal.from_datetime(m.created_at)),
    ]
    if m.dataset_version is not None:
        triples.append(Triple(dataset, DCT_HAS_VERSION, Literal.from_str(m.dataset_version)))

    if m.license is not None:
        license_node = iris.license_iri(m.license)
        triples.append(Triple(license_node, RDF_TYPE, DCT_LICENSE_DOCUMENT))
        triples.append(Triple(dataset, DCT_LICENSE, license_node))

    for i, location_uri in enumerate(m.location_uris):
        distribution = iris.distribution_iri(i)
        triples.append(Triple(dataset, DCAT_DISTRIBUTION, distribution))
        triples.append(Triple(distribution, DCAT_DOWNLOAD_URL, _uri(location_uri, "location_uri")))
    # The descriptor does not say which distribution a description belongs to: they all go to the first one.
    for description_uri in m.description_uris:
        access_url = _uri(description_uri, "description_uri")
        triples.append(Triple(iris.distribution_iri(0), DCAT_ACCESS_URL, access_url))

    if m.etl_name is not None:
        etl = iris.etl_iri()
        triples.append(Triple(etl, RDF_TYPE, PROV_ACTIVITY))
        triples.append(Triple(etl, RDFS_LABEL, Literal.from_str(m.etl_name)))
        triples.append(Triple(dataset, PROV_WAS_GENERATED_BY, etl))
        if m.etl_version is not None:
            triples.append(Triple(etl, DCT_HAS_VERSION, Literal.from_str(m.etl_version)))
    return triples


def map_split(a: SplitAssignment, ctx: MappingContext) -> list[Triple]:
    split = ctx.iris.split_iri(a.split_name)
    return [
        Triple(split, RDF_TYPE, ctx.vocab.SubjectSplit),
        Triple(ctx.iris.subject_iri(a.subject_id), ctx.vocab.assignedSplit, split),
    ]


def _label_literal(kind: str, value) -> Literal:
    match kind:
        case "boolean":
            return Literal.from_bool(value)
        case "integer":
            return Literal.from_int(value)
        case "float":
            return Literal.from_double(value)
        case _:
            return Literal.from_str(value)


def map_label(
    label: LabelRecord, ordinal: int, ctx: MappingContext, enforce_single_value: bool = True
) -> list[Triple]:
    """Triples of one label. `ordinal` numbers the labels of a subject.

    With `enforce_single_value=False`, a label with zero or several values is mapped as it is (one value
    triple per value present) so that the validator reports it instead.
    """
    if enforce_single_value and len(label.values) > 1:
        raise MultipleLabelValuesError(
            f"Label {ordinal} of subject {label.subject_id!r} has several values: {sorted(label.values)}."
        )
    if enforce_single_value and not label.values:
        raise NoLabelValueError(f"Label {ordinal} of subject {label.subject_id!r} has no value.")

    v, iris = ctx.vocab, ctx.iris
    node = iris.label_iri(label.subject_id, ordinal)
    triples = [
        Triple(node, RDF_TYPE, v.SubjectLabel),
        Triple(node, v.hasSubject, iris.subject_iri(label.subject_id)),
        Triple(node, v.predictionTime, Literal.from_datetime(label.prediction_time)),
    ]
    for kind, value in label.values.items():
        triples.append(Triple(node, getattr(v, f"{kind}Value"), _label_literal(kind, value)))
    return triples


@dataclass
class _ShardResult:
    graph: Graph
    subject_ids: set[str]
    code_strings: set[str]
    num_events: int
    errors: list[RecordError]


def _map_shard(ds: MedsDataset, shard_name: str, ctx: MappingContext, strict: bool) -> _ShardResult:
    result = _ShardResult(Graph(), set(), set(), 0, [])
    for row_index, event in ds.iter_shard(shard_name):
        try:
            result.graph.update(map_event(event, (shard_name, row_index), ctx))
        except MappingError as e:
            error = RecordError("events", (shard_name, row_index), str(e))
            if strict:
                raise ConversionError([error]) from e
            result.errors.append(error)
            continue
        result.subject_ids.add(event.subject_id)
        result.code_strings.add(event.code_string)
        result.num_events += 1
    return result


def _map_shards_in_order(
    executor: ThreadPoolExecutor, fn: Callable[[str], _ShardResult], shard_names: list[str], window: int
) -> Iterator[_ShardResult]:
    # At most `window` shards are mapped ahead of the consumer.
    pending: deque[Future] = deque()
    for name in shard_names:
        pending.append(executor.submit(fn, name))
        if len(pending) >= window:
            yield pending.popleft().result()
    while pending:
        yield pending.popleft().result()


def convert_shardwise(
    ds: MedsDataset,
    ctx: MappingContext,
    on_shard: Callable[[Graph], None],
    strict: bool = True,
    num_workers: int = 1,
    progress: bool = False,
) -> Graph:
    """Map a dataset one event shard at a time.

    The event triples of each shard are handed to `on_shard`, in shard order and on the calling thread, then
    dropped. Every other triple (dataset metadata, subjects, codes, splits, labels) is returned. The pieces
    are disjoint and no node has triples in two of them; their union is `convert(ds, ctx)`.

    Memory holds at most `num_workers` shard graphs plus the returned graph and the set of subject ids.

    Args:
        strict: Stop at the first record that cannot be mapped. Otherwise map everything that can be and
            report all failing records at the end. Either way failures raise a `ConversionError` listing
            the failing records with their table and coordinates.

    Label value unions are not checked here: a label with zero or several values is mapped as it is and
    left to the validator's exclusive-group constraint.
    """
    errors: list[RecordError] = []

    def record_error(table: str, coordinates: tuple, exc: MappingError):
        error = RecordError(table, coordinates, str(exc))
        if strict:
            raise ConversionError([error]) from exc
        errors.append(error)

    graph = Graph()
    try:
        graph.update(map_dataset_metadata(ds.metadata, ctx))
    except MappingError as e:
        record_error("metadata", (), e)

    subject_ids: set[str] = set()
    code_strings: set[str] = set()
    num_events = 0
    workers = max(1, num_workers)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        results = _map_shards_in_order(
            executor, lambda name: _map_shard(ds, name, ctx, strict), ds.shard_names, workers
        )
        for result in tqdm(results, total=ds.num_shards, desc="Mapping shards", disable=not progress):
            on_shard(result.graph)
            subject_ids |= result.subject_ids
            code_strings |= result.code_strings
            num_events += result.num_events
            errors.extend(result.errors)

    # Parents absent from the code table still need a code string to be valid code nodes.
    code_strings.update(parent for code in ds.codes for parent in code.parent_codes)
    for code_string in code_strings:
        graph.update(map_code_reference(code_string, ctx))
    for row_index, code in enumerate(ds.codes):
        try:
            graph.update(map_code(code, ctx))
        except MappingError as e:
            record_error("codes", (row_index,), e)

    for assignment in ds.splits:
        graph.update(map_split(assignment, ctx))
        subject_ids.add(assignment.subject_id)

    ordinals: dict[str, int] = defaultdict(int)
    for label in ds.labels:
        graph.update(map_label(label, ordinals[label.subject_id], ctx, enforce_single_value=False))
        ordinals[label.subject_id] += 1
        subject_ids.add(label.subject_id)

    for subject_id in subject_ids:
        graph.update(map_subject(subject_id, ctx))

    if errors:
        raise ConversionError(errors)

    logging.info(f"Mapped {num_events} events of {len(subject_ids)} subjects and {len(ds.labels)} labels")
    return graph


def convert(
    ds: MedsDataset,
    ctx: MappingContext,
    strict: bool = True,
    num_workers: int = 1,
    progress: bool = False,
) -> Graph:
    """Map a whole dataset to one in-memory graph. See `convert_shardwise` for the arguments.

    Shards are mapped on `num_workers` threads; the result does not depend on the number of workers.
    """
    events = Graph()
    graph = convert_shardwise(ds, ctx, events.update, strict, num_workers, progress)
    graph |= events
    logging.info(f"Converted to {len(graph)} triples")
    return graph

