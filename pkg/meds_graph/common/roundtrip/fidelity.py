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
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from deepdiff import DeepDiff
from termcolor import colored

from meds_graph.common.datasets.meds_dataset import MedsDataset
from meds_graph.common.datasets.records import (
    CodeRecord,
    DatasetMetadataRecord,
    EventRecord,
    LabelRecord,
)
from meds_graph.common.rdf.terms import format_datetime, format_double
from meds_graph.common.roundtrip.canonical import canonicalize

TABLES = ("events", "codes", "metadata", "splits", "labels")
# Field name of a diff about a whole record, present on one side only.
WHOLE_RECORD = "*"


@dataclass(frozen=True)
class FieldDiff:
    table: str
    key: str
    field: str
    expected: Any
    actual: Any

    def to_dict(self) -> dict:
        return {
            "table": self.table,
            "key": self.key,
            "field": self.field,
            "expected": self.expected,
            "actual": self.actual,
        }


@dataclass
class FidelityReport:
    """Field-wise comparison of two datasets after canonicalization. Every flag is True iff its table has no
    diff."""

    diffs: list[FieldDiff] = field(default_factory=list)
    rows_compared: dict[str, int] = field(default_factory=dict)

    def _table_equal(self, table: str) -> bool:
        return not any(d.table == table for d in self.diffs)

    @property
    def events_equal(self) -> bool:
        return self._table_equal("events")

    @property
    def codes_equal(self) -> bool:
        return self._table_equal("codes")

    @property
    def metadata_equal(self) -> bool:
        return self._table_equal("metadata")

    @property
    def splits_equal(self) -> bool:
        return self._table_equal("splits")

    @property
    def labels_equal(self) -> bool:
        return self._table_equal("labels")

    @property
    def lossless(self) -> bool:
        return not self.diffs

    def diff_counts(self) -> dict[str, int]:
        counts = dict.fromkeys(TABLES, 0)
        for d in self.diffs:
            counts[d.table] += 1
        return counts

    def to_dict(self) -> dict:
        return {
            "lossless": self.lossless,
            "events_equal": self.events_equal,
            "codes_equal": self.codes_equal,
            "metadata_equal": self.metadata_equal,
            "splits_equal": self.splits_equal,
            "labels_equal": self.labels_equal,
            "rows_compared": {table: self.rows_compared.get(table, 0) for table in TABLES},
            "diff_counts": self.diff_counts(),
            "diffs": [d.to_dict() for d in self.diffs],
        }

    def summary(self) -> str:
        if self.lossless:
            return colored("Round trip is lossless", "green", attrs=["bold"])
        counts = ", ".join(f"{table}={n}" for table, n in self.diff_counts().items() if n)
        return f"{colored('Round trip lost information', 'red', attrs=['bold'])}: {counts}"


def _double(value: float | None) -> str | None:
    return None if value is None else format_double(value)


def _timestamp(value) -> str | None:
    return None if value is None else format_datetime(value)


def _event_row(e: EventRecord) -> dict:
    return {
        "subject_id": e.subject_id,
        "code_string": e.code_string,
        "time": _timestamp(e.time),
        "numeric_value": _double(e.numeric_value),
        "text_value": e.text_value,
    }


def _code_row(c: CodeRecord) -> dict:
    return {"description": c.description, "parent_codes": list(c.parent_codes)}


def _metadata_row(m: DatasetMetadataRecord) -> dict:
    return {
        "dataset_name": m.dataset_name,
        "meds_version": m.meds_version,
        "created_at": _timestamp(m.created_at),
        "dataset_version": m.dataset_version,
        "license": m.license,
        "location_uris": list(m.location_uris),
        "description_uris": list(m.description_uris),
        "etl_name": m.etl_name,
        "etl_version": m.etl_version,
    }


def _label_row(label: LabelRecord) -> dict:
    return {
        "prediction_time": _timestamp(label.prediction_time),
        "boolean_value": label.boolean_value,
        "integer_value": label.integer_value,
        "float_value": _double(label.float_value),
        "categorical_value": label.categorical_value,
    }


def _matched_rows(records: Iterable, identity: Callable[[Any], tuple], row) -> dict[tuple, dict]:
    """Rows keyed by the identity of their record plus an ordinal counting the records of equal identity in
    canonical order. One record missing on a side then leaves the keys of the others untouched."""
    ordinals: dict[tuple, int] = defaultdict(int)
    rows = {}
    for record in records:
        key = identity(record)
        rows[(*key, ordinals[key])] = row(record)
        ordinals[key] += 1
    return rows


def _event_identity(e: EventRecord) -> tuple:
    return (e.subject_id, _timestamp(e.time) or "", e.code_string)


def _label_identity(label: LabelRecord) -> tuple:
    return (label.subject_id, _timestamp(label.prediction_time))


def _render_key(key) -> str:
    # (subject, time, code, 2) -> "subject|time|code#2"
    if isinstance(key, str):
        return key
    *identity, ordinal = key
    return f"{'|'.join(identity)}#{ordinal}"


def _table_rows(ds: MedsDataset) -> dict[str, dict]:
    return {
        "events": _matched_rows(ds.events, _event_identity, _event_row),
        "codes": {c.code_string: _code_row(c) for c in ds.codes},
        "metadata": {"dataset": _metadata_row(ds.metadata)},
        "splits": _matched_rows(
            ds.splits, lambda a: (a.subject_id, a.split_name), lambda a: {"split_name": a.split_name}
        ),
        "labels": _matched_rows(ds.labels, _label_identity, _label_row),
    }


def _table_diffs(table: str, expected: dict, actual: dict) -> list[FieldDiff]:
    diffs = {}
    for level in DeepDiff(expected, actual, view="tree").values():
        for item in level:
            path = item.path(output_format="list")
            key = path[0]
            rendered = _render_key(key)
            if len(path) == 1:
                # A whole record is present on one side only.
                diffs[(rendered, WHOLE_RECORD)] = FieldDiff(
                    table, rendered, WHOLE_RECORD, expected.get(key), actual.get(key)
                )
                continue
            # List-valued fields are reported once, as a whole.
            name = path[1]
            diffs[(rendered, name)] = FieldDiff(table, rendered, name, expected[key][name], actual[key][name])
    return [diffs[k] for k in sorted(diffs)]



def fidelity(original: MedsDataset, reconstructed: MedsDataset) -> FidelityReport:
    """Compare two datasets table by table, after canonicalizing both.

    Timestamps are compared at their stored precision and doubles by their lexical form, so NaN equals NaN.
    """
    expected_tables = _table_rows(canonicalize(original))
    actual_tables = _table_rows(canonicalize(reconstructed))
    report = FidelityReport()
    for table in TABLES:
        expected, actual = expected_tables[table], actual_tables[table]
        report.rows_compared[table] = max(len(expected), len(actual))
        report.diffs.extend(_table_diffs(table, expected, actual))
    logging.info(report.summary())
    return report
