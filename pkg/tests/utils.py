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
from datetime import datetime
from functools import wraps

import pytest

from meds_graph.common.datasets.meds_dataset import MedsDataset
from meds_graph.common.datasets.records import (
    LABEL_VALUE_KINDS,
    CodeRecord,
    DatasetMetadataRecord,
    EventRecord,
    LabelRecord,
    SplitAssignment,
)
from meds_graph.common.datasets.synth import SynthConfig
from meds_graph.common.utils.import_utils import is_package_available

# Pass this as the first argument to init_hydra_config.
DEFAULT_CONFIG_PATH = "meds_graph/configs/default.yaml"


def require_package(package_name: str):
    """
    Decorator that skips the test if the given package is not installed.
    """

    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            if not is_package_available(package_name):
                pytest.skip(f"{package_name} not installed")
            return func(*args, **kwargs)

        return wrapper

    return decorator


def make_metadata(**kwargs) -> DatasetMetadataRecord:
    fields = {
        "dataset_name": "Tiny Cohort",
        "meds_version": "0.3.3",
        "created_at": datetime(2024, 5, 1, 12, 0, 0),
        "dataset_version": "1.0",
        "license": "CC-BY-4.0",
        "location_uris": ("https://example.org/tiny.tar.gz",),
        "description_uris": ("https://example.org/tiny.html",),
        "etl_name": "tiny-etl",
        "etl_version": "0.1",
    }
    fields.update(kwargs)
    return DatasetMetadataRecord(**fields)


def make_tiny_dataset() -> MedsDataset:
    """Two subjects over two shards, every optional field used at least once."""
    t0 = datetime(2021, 3, 4, 5, 6, 7)
    shards = {
        "0": [
            EventRecord("1", "ICD10:I63"),
            EventRecord("1", "LAB:GLUCOSE", time=t0, numeric_value=5.5),
            EventRecord("1", "NOTE", time=datetime(2021, 3, 5), text_value='he said "ok"\n'),
        ],
        "1": [
            EventRecord("2", "ICD10:I63", time=t0, numeric_value=1.0, text_value="x"),
        ],
    }
    codes = [
        CodeRecord("ICD10:I63", "Cerebral infarction", ("ICD10:I6",)),
        CodeRecord("LAB:GLUCOSE"),
    ]
    splits = [SplitAssignment("1", "train"), SplitAssignment("2", "held_out"), SplitAssignment("3", "train")]
    labels = [
        LabelRecord("1", datetime(2021, 4, 1), boolean_value=True),
        LabelRecord("2", datetime(2021, 4, 1), float_value=0.25),
    ]
    return MedsDataset.from_preloaded(make_metadata(), shards, codes, splits, labels)


def node_inventory(ds: MedsDataset) -> int:
    """Number of distinct nodes the conversion of `ds` has in subject position, counted from the records."""
    events = ds.events
    subject_ids = {e.subject_id for e in events}
    subject_ids |= {s.subject_id for s in ds.splits} | {label.subject_id for label in ds.labels}
    code_strings = {e.code_string for e in events} | {c.code_string for c in ds.codes}
    code_strings |= {parent for c in ds.codes for parent in c.parent_codes}
    m = ds.metadata
    return (
        len(events)
        + len(subject_ids)
        + len(code_strings)
        + 1
        + len({s.split_name for s in ds.splits})
        + (1 if m.etl_name is not None else 0)
        + len(ds.labels)
        + len(m.location_uris)
        + (1 if m.license is not None else 0)
    )


def varied_synth_config(seed: int) -> SynthConfig:
    """A small `SynthConfig` whose shape (hierarchy depth, label kind, shards, optional metadata) cycles with
    `seed`."""
    return SynthConfig(
        seed=seed,
        n_subjects=1 + seed % 7,
        events_per_subject=(0, 1 + seed % 5),
        code_hierarchy_depth=seed % 3,
        n_codes=1 + seed % 9,
        n_labels_per_subject=(0, seed % 3),
        label_kind=LABEL_VALUE_KINDS[seed % len(LABEL_VALUE_KINDS)],
        n_shards=1 + seed % 3,
        with_license=seed % 2 == 0,
        with_etl=seed % 3 != 0,
        n_location_uris=seed % 3,
        n_description_uris=seed % 2 if seed % 3 else 0,
    )
