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
"""Immutable records, one type per MEDS table.

Records check the invariants that can be checked row by row. Invariants that involve other rows (subject
contiguity, one split per subject) or that the mapping reports with dedicated errors (a code listing itself as
parent, a label with zero or several values) are left to the code that sees the wider context.
"""

from dataclasses import dataclass, field
from datetime import datetime
from typing import Any

from meds_graph.common.rdf.terms import to_naive_utc

LABEL_VALUE_KINDS = ("boolean", "integer", "float", "categorical")


def _require_non_empty(record: object, name: str):
    value = getattr(record, name)
    if not isinstance(value, str) or not value:
        raise ValueError(f"{record.__class__.__name__}.{name} must be a non-empty string. Got {value!r}.")


@dataclass(frozen=True, slots=True)
class EventRecord:
    subject_id: str
    code_string: str
    time: datetime | None = None
    numeric_value: float | None = None
    text_value: str | None = None

    def __post_init__(self):
        _require_non_empty(self, "subject_id")
        _require_non_empty(self, "code_string")
        if self.time is not None:
            object.__setattr__(self, "time", to_naive_utc(self.time))
        if self.numeric_value is not None:
            object.__setattr__(self, "numeric_value", float(self.numeric_value))

    @property
    def optional_field_count(self) -> int:
        return sum(v is not None for v in (self.time, self.numeric_value, self.text_value))


@dataclass(frozen=True, slots=True)
class CodeRecord:
    code_string: str
    description: str | None = None
    parent_codes: tuple[str, ...] = ()

    def __post_init__(self):
        _require_non_empty(self, "code_string")
        object.__setattr__(self, "parent_codes", tuple(self.parent_codes))
        for parent in self.parent_codes:
            if not isinstance(parent, str) or not parent:
                raise ValueError(f"Parent codes of {self.code_string!r} must be non-empty strings.")


@dataclass(frozen=True, slots=True)
class DatasetMetadataRecord:
    dataset_name: str
    meds_version: str
    created_at: datetime
    dataset_version: str | None = None
    license: str | None = None
    location_uris: tuple[str, ...] = ()
    description_uris: tuple[str, ...] = ()
    etl_name: str | None = None
    etl_version: str | None = None

    def __post_init__(self):
        _require_non_empty(self, "dataset_name")
        _require_non_empty(self, "meds_version")
        if not isinstance(self.created_at, datetime):
            raise ValueError(f"DatasetMetadataRecord.created_at must be a datetime. Got {self.created_at!r}.")
        object.__setattr__(self, "created_at", to_naive_utc(self.created_at))
        object.__setattr__(self, "location_uris", tuple(self.location_uris))
        object.__setattr__(self, "description_uris", tuple(self.description_uris))
        if self.etl_version is not None and self.etl_name is None:
            raise ValueError("DatasetMetadataRecord.etl_version is only allowed together with etl_name.")


@dataclass(frozen=True, slots=True, order=True)
class SplitAssignment:
    subject_id: str
    split_name: str

    def __post_init__(self):
        _require_non_empty(self, "subject_id")
        _require_non_empty(self, "split_name")


@dataclass(frozen=True, slots=True)
class LabelRecord:
    """A supervised-learning sample: a subject, a prediction time and a ground-truth value.

    The four value fields form a tagged union that should have exactly one member set. Records violating
    this can still be built (they occur in real label files); `values` exposes what is set and the mapping
    decides what to do with it.
    """

    subject_id: str
    prediction_time: datetime
    boolean_value: bool | None = None
    integer_value: int | None = None
    float_value: float | None = None
    categorical_value: str | None = None
    values: dict[str, Any] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        _require_non_empty(self, "subject_id")
        if not isinstance(self.prediction_time, datetime):
            raise ValueError(f"LabelRecord.prediction_time must be a datetime. Got {self.prediction_time!r}.")
        object.__setattr__(self, "prediction_time", to_naive_utc(self.prediction_time))
        if self.boolean_value is not None:
            object.__setattr__(self, "boolean_value", bool(self.boolean_value))
        if self.integer_value is not None:
            object.__setattr__(self, "integer_value", int(self.integer_value))
        if self.float_value is not None:
            object.__setattr__(self, "float_value", float(self.float_value))
        values = {
            kind: getattr(self, f"{kind}_value")
            for kind in LABEL_VALUE_KINDS
            if getattr(self, f"{kind}_value") is not None
        }
        object.__setattr__(self, "values", values)

    @classmethod
    def with_value(cls, subject_id: str, prediction_time: datetime, kind: str, value: Any) -> "LabelRecord":
        if kind not in LABEL_VALUE_KINDS:
            raise ValueError(f"Label value kind must be one of {LABEL_VALUE_KINDS}. Got {kind!r}.")
        return cls(subject_id, prediction_time, **{f"{kind}_value": value})
