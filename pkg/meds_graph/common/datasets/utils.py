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
"""Readers and writers for the MEDS on-disk layout.

```
<root>/
  data/**/*.parquet              event shards (required, may be empty)
  metadata/dataset.json          dataset descriptor (required)
  metadata/codes.parquet         code metadata (optional)
  metadata/subject_splits.parquet
  labels/**/*.parquet            labels (optional)
```
"""

import json
import logging
from collections import Counter
from datetime import datetime
from pathlib import Path
from typing import Any, Iterable, Iterator

import datasets
import pyarrow as pa
import pyarrow.parquet as pq

from meds_graph.common.datasets.records import (
    CodeRecord,
    DatasetMetadataRecord,
    EventRecord,
    LabelRecord,
    SplitAssignment,
)
from meds_graph.common.rdf.terms import format_datetime, parse_datetime
from meds_graph.common.utils.io_utils import write_json

DATA_DIR = "data"
METADATA_DIR = "metadata"
LABELS_DIR = "labels"
DATASET_DESCRIPTOR = "dataset.json"
CODES_FILE = "codes.parquet"
SPLITS_FILE = "subject_splits.parquet"

LABEL_VALUE_COLUMNS = ("boolean_value", "integer_value", "float_value", "categorical_value")

# Rows per record batch when streaming a shard.
DEFAULT_BATCH_SIZE = 65_536


class MedsIngestError(ValueError):
    pass


class MissingMetadataError(MedsIngestError):
    pass


class ShardParseError(MedsIngestError):
    def __init__(self, path: Path, message: str, row: int | None = None):
        self.path = Path(path)
        self.row = row
        location = f"{self.path}" if row is None else f"{self.path}, row {row}"
        super().__init__(f"{location}: {message}")


class SchemaMismatchError(MedsIngestError):
    def __init__(self, path: Path, message: str):
        self.path = Path(path)
        super().__init__(f"{self.path}: {message}")


def _is_text(dtype: pa.DataType) -> bool:
    return pa.types.is_string(dtype) or pa.types.is_large_string(dtype)


# Accepted arrow types per column. `null` covers columns that are entirely empty.
_ID_TYPE = ("string or integer", lambda t: _is_text(t) or pa.types.is_integer(t))
_TEXT_TYPE = ("string", lambda t: _is_text(t) or pa.types.is_null(t))
_TIME_TYPE = ("timestamp", lambda t: pa.types.is_timestamp(t) or pa.types.is_null(t))
_FLOAT_TYPE = (
    "floating point",
    lambda t: pa.types.is_floating(t) or pa.types.is_integer(t) or pa.types.is_null(t),
)
_INT_TYPE = ("integer", lambda t: pa.types.is_integer(t) or pa.types.is_null(t))
_BOOL_TYPE = ("boolean", lambda t: pa.types.is_boolean(t) or pa.types.is_null(t))
_LIST_TYPE = (
    "list of strings",
    lambda t: ((pa.types.is_list(t) or pa.types.is_large_list(t)) and _is_text(t.value_type))
    or pa.types.is_null(t),
)

_EVENT_SCHEMA = {
    "subject_id": (True, _ID_TYPE),
    "time": (False, _TIME_TYPE),
    "code": (True, _TEXT_TYPE),
    "numeric_value": (False, _FLOAT_TYPE),
    "text_value": (False, _TEXT_TYPE),
}
_CODES_SCHEMA = {
    "code": (True, _TEXT_TYPE),
    "description": (False, _TEXT_TYPE),
    "parent_codes": (False, _LIST_TYPE),
}
_SPLITS_SCHEMA = {
    "subject_id": (True, _ID_TYPE),
    "split": (True, _TEXT_TYPE),
}
_LABELS_SCHEMA = {
    "subject_id": (True, _ID_TYPE),
    "prediction_time": (True, _TIME_TYPE),
    "boolean_value": (False, _BOOL_TYPE),
    "integer_value": (False, _INT_TYPE),
    "float_value": (False, _FLOAT_TYPE),
    "categorical_value": (False, _TEXT_TYPE),
}


def check_schema(path: Path, schema: pa.Schema, expected: dict) -> list[str]:
    """Check the required columns and column types of a table. Returns the names of unknown columns."""
    for name, (required, (type_name, accepts)) in expected.items():
        if name not in schema.names:
            if required:
                raise SchemaMismatchError(path, f"required column '{name}' is missing, found {schema.names}.")
            continue
        dtype = schema.field(name).type
        if not accepts(dtype):
            raise SchemaMismatchError(path, f"column '{name}' must be {type_name}, got {dtype}.")
    return [name for name in schema.names if name not in expected]


def _open_parquet(path: Path) -> pq.ParquetFile:
    try:
        return pq.ParquetFile(path)
    except (pa.ArrowException, OSError) as e:
        raise ShardParseError(path, f"not a readable parquet file ({e})") from e


def _iter_rows(
    path: Path, expected: dict, batch_size: int = DEFAULT_BATCH_SIZE, warn_extra: bool = True
) -> Iterator[tuple[int, dict[str, Any]]]:
    """Yield (row_index, row) over a parquet table, reading one record batch at a time."""
    parquet_file = _open_parquet(path)
    extra = check_schema(path, parquet_file.schema_arrow, expected)
    if extra and warn_extra:
        logging.warning(f"Ignoring unknown columns {extra} in {path}")
    columns = [name for name in expected if name in parquet_file.schema_arrow.names]

    row_index = 0
    try:
        batches = parquet_file.iter_batches(batch_size=batch_size, columns=columns)
        for batch in batches:
            pydict = batch.to_pydict()
            for i in range(batch.num_rows):
                yield row_index, {name: pydict[name][i] for name in columns}
                row_index += 1
    except pa.ArrowException as e:
        raise ShardParseError(path, f"failed to decode ({e})", row_index) from e


def _as_id(value: Any) -> str | None:
    if value is None:
        return None
    return str(value)


def list_event_shards(root: str | Path) -> list[tuple[str, Path]]:
    """(shard_name, path) of every event shard, in lexicographic order of the path relative to `data/`.

    The shard name is that relative path, POSIX-style, without the `.parquet` suffix.
    """
    data_dir = Path(root) / DATA_DIR
    if not data_dir.is_dir():
        raise MissingMetadataError(f"No '{DATA_DIR}' directory under {root}.")
    shards = []
    for path in data_dir.rglob("*.parquet"):
        rel = path.relative_to(data_dir).as_posix()
        shards.append((rel, path))
    shards.sort(key=lambda item: item[0])
    return [(rel.removesuffix(".parquet"), path) for rel, path in shards]


def iter_shard_events(
    path: str | Path, batch_size: int = DEFAULT_BATCH_SIZE
) -> Iterator[tuple[int, EventRecord]]:
    path = Path(path)
    for row_index, row in _iter_rows(path, _EVENT_SCHEMA, batch_size):
        try:
            event = EventRecord(
                subject_id=_as_id(row["subject_id"]),
                code_string=row["code"],
                time=row.get("time"),
                numeric_value=row.get("numeric_value"),
                text_value=row.get("text_value"),
            )
        except ValueError as e:
            raise ShardParseError(path, str(e), row_index) from e
        yield row_index, event


def load_shard_events(path: str | Path, batch_size: int = DEFAULT_BATCH_SIZE) -> list[EventRecord]:
    events = list(event for _, event in iter_shard_events(path, batch_size))
    breaks = check_subject_contiguity(events)
    if breaks:
        logging.warning(
            f"{path}: {len(breaks)} row(s) break subject contiguity or time order, first at row {breaks[0]}"
        )
    return events


def load_events_streaming(
    root: str | Path, batch_size: int = DEFAULT_BATCH_SIZE
) -> Iterator[tuple[str, int, EventRecord]]:
    """Stream every event of a MEDS root as (shard_name, row_index, record).

    Records come in shard order, then row order. Only one record batch is held in memory at a time.
    """
    load_dataset_metadata(root)
    for shard_name, path in list_event_shards(root):
        for row_index, event in iter_shard_events(path, batch_size):
            yield shard_name, row_index, event


def _parse_timestamp(path: Path, key: str, value: Any) -> datetime:
    if isinstance(value, datetime):
        return value
    if not isinstance(value, str):
        raise SchemaMismatchError(path, f"'{key}' must be an ISO 8601 string. Got {value!r}.")
    try:
        return parse_datetime(value)
    except ValueError as e:
        raise SchemaMismatchError(path, f"'{key}' is not an ISO 8601 timestamp: {value!r}.") from e


def _as_uri_list(path: Path, key: str, value: Any) -> tuple[str, ...]:
    if value is None:
        return ()
    if isinstance(value, str):
        return (value,)
    if isinstance(value, list) and all(isinstance(v, str) for v in value):
        return tuple(value)
    raise SchemaMismatchError(path, f"'{key}' must be a string or a list of strings. Got {value!r}.")


def load_dataset_metadata(root: str | Path) -> DatasetMetadataRecord:
    path = Path(root) / METADATA_DIR / DATASET_DESCRIPTOR
    if not path.is_file():
        raise MissingMetadataError(f"No dataset descriptor at {path}.")
    try:
        with open(path, encoding="utf-8") as f:
            info = json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaMismatchError(path, f"invalid JSON ({e})") from e
    if not isinstance(info, dict):
        raise SchemaMismatchError(path, "the dataset descriptor must be a JSON object.")

    for key in ("dataset_name", "meds_version", "created_at"):
        if info.get(key) in (None, ""):
            raise SchemaMismatchError(path, f"required key '{key}' is missing.")

    try:
        return DatasetMetadataRecord(
            dataset_name=str(info["dataset_name"]),
            meds_version=str(info["meds_version"]),
            created_at=_parse_timestamp(path, "created_at", info["created_at"]),
            dataset_version=info.get("dataset_version"),
            license=info.get("license"),
            location_uris=_as_uri_list(path, "location_uri", info.get("location_uri")),
            description_uris=_as_uri_list(path, "description_uri", info.get("description_uri")),
            etl_name=info.get("etl_name"),
            etl_version=info.get("etl_version"),
        )
    except ValueError as e:
        if isinstance(e, MedsIngestError):
            raise
        raise SchemaMismatchError(path, str(e)) from e


def load_codes(root: str | Path) -> list[CodeRecord]:
    path = Path(root) / METADATA_DIR / CODES_FILE
    if not path.is_file():
        return []
    codes = []
    for row_index, row in _iter_rows(path, _CODES_SCHEMA):
        parents = row.get("parent_codes") or []
        unique_parents = list(dict.fromkeys(parents))
        if len(unique_parents) != len(parents):
            logging.warning(f"{path}, row {row_index}: dropping duplicate parent codes of {row['code']!r}")
        try:
            codes.append(CodeRecord(row["code"], row.get("description"), tuple(unique_parents)))
        except ValueError as e:
            raise ShardParseError(path, str(e), row_index) from e
    return codes


def load_splits(root: str | Path) -> list[SplitAssignment]:
    path = Path(root) / METADATA_DIR / SPLITS_FILE
    if not path.is_file():
        return []
    splits = []
    for row_index, row in _iter_rows(path, _SPLITS_SCHEMA):
        try:
            splits.append(SplitAssignment(_as_id(row["subject_id"]), row["split"]))
        except ValueError as e:
            raise ShardParseError(path, str(e), row_index) from e
    return splits


def load_labels(root: str | Path) -> list[LabelRecord]:
    labels_dir = Path(root) / LABELS_DIR
    if not labels_dir.is_dir():
        return []
    labels = []
    for path in sorted(labels_dir.rglob("*.parquet"), key=lambda p: p.relative_to(labels_dir).as_posix()):
        for row_index, row in _iter_rows(path, _LABELS_SCHEMA):
            try:
                labels.append(
                    LabelRecord(
                        subject_id=_as_id(row["subject_id"]),
                        prediction_time=row["prediction_time"],
                        **{name: row.get(name) for name in LABEL_VALUE_COLUMNS},
                    )
                )
            except ValueError as e:
                raise ShardParseError(path, str(e), row_index) from e

    counts = Counter((label.subject_id, label.prediction_time) for label in labels)
    duplicates = [key for key, n in counts.items() if n > 1]
    if duplicates:
        logging.warning(
            f"{len(duplicates)} (subject_id, prediction_time) pair(s) carry several labels, "
            f"e.g. {duplicates[0][0]!r} at {format_datetime(duplicates[0][1])}"
        )
    return labels


def check_subject_contiguity(events: Iterable[EventRecord]) -> list[int]:
    """Row indices breaking the MEDS sort convention.

    Within a shard, the rows of a subject are contiguous, and ordered by time with the rows without time
    first. A row is reported when its subject was already closed by another subject, or when it goes back in
    time (a timeless row after a timed row counts as going back).
    """
    breaks = []
    closed: set[str] = set()
    previous: EventRecord | None = None
    for row_index, event in enumerate(events):
        if previous is None or event.subject_id != previous.subject_id:
            if previous is not None:
                closed.add(previous.subject_id)
            if event.subject_id in closed:
                breaks.append(row_index)
        elif previous.time is not None and (event.time is None or event.time < previous.time):
            breaks.append(row_index)
        previous = event
    return breaks


# Writing


def _is_int64_id(i: str) -> bool:
    # ASCII only: `int` accepts other Unicode digits and would not give `i` back.
    return i.isascii() and i.isdigit() and len(i) < 19 and (i == "0" or not i.startswith("0"))


def _id_feature(ids: list[str]) -> tuple[list, datasets.Value]:
    # Integer ids are the MEDS default; keep them integers on disk when every id allows it.
    if ids and all(_is_int64_id(i) for i in ids):
        return [int(i) for i in ids], datasets.Value("int64")
    return ids, datasets.Value("string")


def _write_table(path: Path, columns: dict[str, list], features: dict[str, Any]):
    hf_dataset = datasets.Dataset.from_dict(columns, features=datasets.Features(features))
    path.parent.mkdir(parents=True, exist_ok=True)
    hf_dataset.to_parquet(str(path))


def dump_dataset_metadata(metadata: DatasetMetadataRecord) -> dict[str, Any]:
    info = {
        "dataset_name": metadata.dataset_name,
        "dataset_version": metadata.dataset_version,
        "meds_version": metadata.meds_version,
        "created_at": format_datetime(metadata.created_at),
        "license": metadata.license,
        "location_uri": list(metadata.location_uris),
        "description_uri": list(metadata.description_uris),
        "etl_name": metadata.etl_name,
        "etl_version": metadata.etl_version,
    }
    return {k: v for k, v in info.items() if v not in (None, [])}


def save_events(path: str | Path, events: list[EventRecord]):
    subject_ids, id_feature = _id_feature([e.subject_id for e in events])
    _write_table(
        Path(path),
        {
            "subject_id": subject_ids,
            "time": [e.time for e in events],
            "code": [e.code_string for e in events],
            "numeric_value": [e.numeric_value for e in events],
            "text_value": [e.text_value for e in events],
        },
        {
            "subject_id": id_feature,
            "time": datasets.Value("timestamp[us]"),
            "code": datasets.Value("string"),
            "numeric_value": datasets.Value("float64"),
            "text_value": datasets.Value("string"),
        },
    )


def save_dataset(dataset, root: str | Path):
    """Write `dataset` in the MEDS layout under `root`, so that loading `root` gives back an equal dataset.

    Optional tables that are empty are not written.
    """
    root = Path(root)
    for shard_name, events in dataset.iter_shards():
        save_events(root / DATA_DIR / f"{shard_name}.parquet", events)
    (root / DATA_DIR).mkdir(parents=True, exist_ok=True)

    write_json(root / METADATA_DIR / DATASET_DESCRIPTOR, dump_dataset_metadata(dataset.metadata))

    if dataset.codes:
        _write_table(
            root / METADATA_DIR / CODES_FILE,
            {
                "code": [c.code_string for c in dataset.codes],
                "description": [c.description for c in dataset.codes],
                "parent_codes": [list(c.parent_codes) for c in dataset.codes],
            },
            {
                "code": datasets.Value("string"),
                "description": datasets.Value("string"),
                "parent_codes": datasets.Sequence(datasets.Value("string")),
            },
        )

    if dataset.splits:
        subject_ids, id_feature = _id_feature([s.subject_id for s in dataset.splits])
        _write_table(
            root / METADATA_DIR / SPLITS_FILE,
            {"subject_id": subject_ids, "split": [s.split_name for s in dataset.splits]},
            {"subject_id": id_feature, "split": datasets.Value("string")},
        )

    if dataset.labels:
        subject_ids, id_feature = _id_feature([label.subject_id for label in dataset.labels])
        _write_table(
            root / LABELS_DIR / "labels.parquet",
            {
                "subject_id": subject_ids,
                "prediction_time": [label.prediction_time for label in dataset.labels],
                "boolean_value": [label.boolean_value for label in dataset.labels],
                "integer_value": [label.integer_value for label in dataset.labels],
                "float_value": [label.float_value for label in dataset.labels],
                "categorical_value": [label.categorical_value for label in dataset.labels],
            },
            {
                "subject_id": id_feature,
                "prediction_time": datasets.Value("timestamp[us]"),
                "boolean_value": datasets.Value("bool"),
                "integer_value": datasets.Value("int64"),
                "float_value": datasets.Value("float64"),
                "categorical_value": datasets.Value("string"),
            },
        )
