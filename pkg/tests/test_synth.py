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
import math
from dataclasses import replace

import numpy as np
import pytest

from meds_graph.common.datasets.factory import make_synth_config
from meds_graph.common.datasets.synth import CODE_FANOUT, SynthConfig, generate, generate_codes
from meds_graph.common.datasets.utils import check_subject_contiguity
from meds_graph.common.utils.utils import init_hydra_config
from tests.utils import DEFAULT_CONFIG_PATH


def test_generate_is_deterministic(synth_cfg):
    assert generate(synth_cfg) == generate(synth_cfg)
    other = generate(replace(synth_cfg, seed=synth_cfg.seed + 1))
    assert other != generate(synth_cfg)


def test_generate_shape(synth_cfg, synth_dataset):
    assert synth_dataset.num_shards == synth_cfg.n_shards
    assert len(synth_dataset.splits) == synth_cfg.n_subjects
    assert {s.split_name for s in synth_dataset.splits} <= set(synth_cfg.split_fractions)
    low, high = synth_cfg.events_per_subject
    counts = np.bincount([int(e.subject_id) for e in synth_dataset.events], minlength=synth_cfg.n_subjects)
    assert counts.min() >= low and counts.max() <= high
    # Subjects are contiguous and in time order within each shard.
    for _, events in synth_dataset.iter_shards():
        assert check_subject_contiguity(events) == []
        for a, b in zip(events, events[1:]):
            if a.subject_id == b.subject_id and a.time is not None:
                assert b.time is not None and b.time >= a.time


def test_generate_metadata():
    cfg = SynthConfig(with_license=False, with_etl=False, n_location_uris=3, n_description_uris=0)
    metadata = generate(cfg).metadata
    assert metadata.license is None
    assert metadata.etl_name is None and metadata.etl_version is None
    assert len(metadata.location_uris) == 3
    assert metadata.description_uris == ()


@pytest.mark.parametrize(
    "kind, python_type", [("boolean", bool), ("integer", int), ("float", float), ("categorical", str)]
)
def test_label_kinds(kind, python_type):
    dataset = generate(SynthConfig(n_subjects=5, n_labels_per_subject=(1, 1), label_kind=kind))
    assert len(dataset.labels) == 5
    for label in dataset.labels:
        assert list(label.values) == [kind]
        assert isinstance(label.values[kind], python_type)


@pytest.mark.parametrize("n_codes, depth", [(1, 0), (20, 0), (20, 1), (250, 3)])
def test_generate_codes(n_codes, depth):
    codes = generate_codes(n_codes, depth)
    code_strings = [c.code_string for c in codes]
    assert len(set(code_strings)) == len(codes)
    expected, level_size = n_codes, n_codes
    for _ in range(depth):
        level_size = math.ceil(level_size / CODE_FANOUT)
        expected += level_size
    assert len(codes) == expected
    # Every parent is in the table and the hierarchy has no cycle.
    assert {p for c in codes for p in c.parent_codes} <= set(code_strings)
    assert all(c.code_string not in c.parent_codes for c in codes)
    assert all(len(c.parent_codes) == (1 if depth else 0) for c in codes[:n_codes])


def test_events_without_timestamps():
    dataset = generate(SynthConfig(n_subjects=4, p_time=0.0, p_numeric=1.0, p_text=0.0))
    for e in dataset.events:
        assert e.time is None and e.numeric_value is not None and e.text_value is None


@pytest.mark.parametrize(
    "kwargs",
    [
        {"seed": -1},
        {"p_time": 1.5},
        {"events_per_subject": (3, 1)},
        {"n_labels_per_subject": (-1, 1)},
        {"split_fractions": {}},
        {"split_fractions": {"train": 0.5, "held_out": 0.4}},
        {"split_fractions": {"train": 1.2, "held_out": -0.2}},
        {"label_kind": "ordinal"},
        {"n_codes": 0},
        {"n_shards": 0},
        {"n_location_uris": 0, "n_description_uris": 1},
        {"max_days": 0},
        {"start_date": "yesterday"},
    ],
)
def test_synth_config_validation(kwargs):
    with pytest.raises(ValueError):
        SynthConfig(**kwargs)


def test_expected_event_triples():
    cfg = SynthConfig(p_time=0.31, p_numeric=0.0, p_text=0.0)
    assert cfg.expected_event_triples == pytest.approx(5.31)


@pytest.mark.parametrize("preset", ["default", "neurovasc_like", "mimic_like"])
def test_make_synth_config(preset):
    cfg = init_hydra_config(DEFAULT_CONFIG_PATH, overrides=[f"synth={preset}", "synth.seed=11"])
    synth_cfg = make_synth_config(cfg, n_subjects=2)
    assert synth_cfg.seed == 11
    assert synth_cfg.n_subjects == 2
    assert synth_cfg.dataset_name == ("synthetic" if preset == "default" else preset)
    assert generate(synth_cfg).num_events > 0
