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
"""Normal form of a MEDS dataset, as far as a MEDS-OWL graph can tell datasets apart.

A dataset and the inverse of its graph have equal normal forms. The normal form forgets:
- shard boundaries (one shard, `DEFAULT_SHARD_NAME`),
- the order of events beyond (subject_id, time with absent first, code_string, numeric_value, text_value),
- whether a code without description nor parents was listed in the code table,
- the order of parent codes, of splits and of labels, and duplicate split rows,
- the order and duplicates of description URIs.
"""

import math
from typing import Iterable

from meds_graph.common.datasets.meds_dataset import DEFAULT_SHARD_NAME, MedsDataset
from meds_graph.common.datasets.records import (
    CodeRecord,
    DatasetMetadataRecord,
    EventRecord,
    LabelRecord,
    SplitAssignment,
)
from meds_graph.common.rdf.terms import format_double


def _optional_key(value) -> tuple:
    # Absent values sort first. NaN sorts after every number so the order is total.
    if value is None:
        return (0,)
    if isinstance(value, float) and math.isnan(value):
        return (2,)
    return (1, value)


def event_sort_key(e: EventRecord) -> tuple:
    return (
        e.subject_id,
        _optional_key(e.time),
        e.code_string,
        _optional_key(e.numeric_value),
        _optional_key(e.text_value),
    )


def _label_value_lexical(kind: str, value) -> str:
    if kind == "float":
        return format_double(value)
    return str(value)


def label_sort_key(label: LabelRecord) -> tuple:
    values = tuple(sorted((kind, _label_value_lexical(kind, v)) for kind, v in label.values.items()))
    return (label.subject_id, label.prediction_time, values)


def canonical_events(events: Iterable[EventRecord]) -> list[EventRecord]:
    return sorted(events, key=event_sort_key)


def canonical_labels(labels: Iterable[LabelRecord]) -> list[LabelRecord]:
    return sorted(labels, key=label_sort_key)


def canonical_splits(splits: Iterable[SplitAssignment]) -> list[SplitAssignment]:
    return sorted(set(splits))


def canonical_codes(codes: Iterable[CodeRecord], events: Iterable[EventRecord] = ()) -> list[CodeRecord]:
    """The full code inventory: table codes, their parents and the codes of `events`, one record per code
    string, sorted.

    Rows sharing a code string are merged the way the graph merges them: parents are united and the
    description is the first one given.
    """
    descriptions: dict[str, str | None] = {}
    parents: dict[str, set[str]] = {}

    def declare(code_string: str):
        descriptions.setdefault(code_string, None)
        parents.setdefault(code_string, set())

    for code in codes:
        declare(code.code_string)
        if descriptions[code.code_string] is None:
            descriptions[code.code_string] = code.description
        parents[code.code_string].update(code.parent_codes)
        for parent in code.parent_codes:
            declare(parent)
    for event in events:
        declare(event.code_string)

    return [CodeRecord(c, descriptions[c], tuple(sorted(parents[c]))) for c in sorted(descriptions)]


def canonical_metadata(m: DatasetMetadataRecord) -> DatasetMetadataRecord:
    return DatasetMetadataRecord(
        dataset_name=m.dataset_name,
        meds_version=m.meds_version,
        created_at=m.created_at,
        dataset_version=m.dataset_version,
        license=m.license,
        location_uris=m.location_uris,
        description_uris=tuple(sorted(set(m.description_uris))),
        etl_name=m.etl_name,
        etl_version=m.etl_version,
    )


def canonicalize(ds: MedsDataset) -> MedsDataset:
    events = canonical_events(ds.events)
    return MedsDataset.from_preloaded(
        canonical_metadata(ds.metadata),
        {DEFAULT_SHARD_NAME: events},
        codes=canonical_codes(ds.codes, events),
        splits=canonical_splits(ds.splits),
        labels=canonical_labels(ds.labels),
        root=ds.root,
    )
