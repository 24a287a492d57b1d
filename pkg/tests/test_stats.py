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
import json

import pytest

from meds_graph.common.datasets.factory import make_synth_config
from meds_graph.common.datasets.synth import SynthConfig, generate
from meds_graph.common.mapping.configuration_mapping import MappingContext
from meds_graph.common.mapping.mapping import convert
from meds_graph.common.rdf.graph import Graph
from meds_graph.common.stats.compute_stats import (
    StatsAccumulator,
    compute_stats,
    emit_stats_report,
    format_stats_table,
)
from meds_graph.common.utils.utils import init_hydra_config
from tests.utils import DEFAULT_CONFIG_PATH, node_inventory


def test_tiny_stats(tiny_dataset, tiny_graph, vocab):
    stats = compute_stats(tiny_graph)
    assert stats.triple_count == len(tiny_graph)
    assert stats.distinct_subjects == node_inventory(tiny_dataset)
    assert stats.blank_node_count == 0
    assert stats.per_class_instance_counts[vocab.Event.value] == 4
    assert stats.per_class_instance_counts[vocab.Subject.value] == 3
    assert stats.per_class_instance_counts[vocab.Code.value] == 4
    assert stats.per_class_instance_counts[vocab.SubjectSplit.value] == 2

    # Events carry 0, 2, 2 and 3 optional fields.
    distribution = stats.event_triple_distribution
    assert (distribution.min, distribution.max, distribution.median, distribution.count) == (5, 8, 7, 4)
    assert distribution.mean == pytest.approx(6.75)
    assert distribution.std == pytest.approx(1.1875**0.5)


def test_events_without_optional_fields():
    cfg = SynthConfig(seed=3, n_subjects=20, p_time=0.0, p_numeric=0.0, p_text=0.0)
    graph = convert(generate(cfg), MappingContext.for_dataset(cfg.dataset_name))
    distribution = compute_stats(graph).event_triple_distribution
    assert distribution.min == distribution.max == distribution.median == 5
    assert distribution.std == 0.0

    bare_ctx = MappingContext.for_dataset(cfg.dataset_name, include_event_provenance=False)
    bare = convert(generate(cfg), bare_ctx)
    assert compute_stats(bare).event_triple_distribution.mean == 4.0


def test_empty_graph_stats():
    graph = Graph()
    stats = compute_stats(graph)
    assert stats.triple_count == 0
    assert stats.event_triple_distribution is None
    assert stats.per_class_instance_counts == {}


def test_merge_equals_whole(synth_dataset):
    graph = convert(synth_dataset, MappingContext.for_dataset("synthetic"))
    triples = sorted(graph)
    parts = [StatsAccumulator().update_all(triples[i::3]) for i in range(3)]
    merged = parts[0].merge(parts[1]).merge(parts[2])
    assert merged.finalize() == compute_stats(graph)
    # Merging is commutative and associative.
    assert parts[2].merge(parts[0].merge(parts[1])).finalize() == merged.finalize()
    assert StatsAccumulator().merge(merged).finalize() == merged.finalize()


def test_merge_rejects_other_event_class(vocab):
    other = StatsAccumulator(vocab.Subject)
    with pytest.raises(ValueError):
        StatsAccumulator().merge(other)


def test_stats_report(synth_dataset):
    ctx = MappingContext.for_dataset("synthetic")
    report = emit_stats_report(compute_stats(convert(synth_dataset, ctx, num_workers=1)))
    assert report == emit_stats_report(compute_stats(convert(synth_dataset, ctx, num_workers=4)))
    assert report.endswith(b"\n")

    data = json.loads(report)
    assert list(data) == [
        "triple_count",
        "distinct_subjects",
        "distinct_predicates",
        "distinct_objects",
        "distinct_iris",
        "distinct_literals",
        "blank_node_count",
        "per_class_instance_counts",
        "event_triple_distribution",
        "conventions",
    ]
    assert list(data["per_class_instance_counts"]) == sorted(data["per_class_instance_counts"])
    assert data["distinct_literals"] + data["distinct_iris"] >= data["distinct_objects"]


def test_format_stats_table(tiny_graph):
    table = format_stats_table(compute_stats(tiny_graph))
    assert table.endswith("\n")
    assert "triples per event: mean 6.75" in table
    assert "triples per event: no event nodes" in format_stats_table(compute_stats(Graph()))


@pytest.mark.slow
def test_neurovasc_like_distribution():
    cfg = init_hydra_config(DEFAULT_CONFIG_PATH, overrides=["synth=neurovasc_like"])
    synth_cfg = make_synth_config(cfg)
    graph = convert(generate(synth_cfg), MappingContext.for_dataset(synth_cfg.dataset_name), num_workers=4)
    distribution = compute_stats(graph).event_triple_distribution
    assert abs(distribution.mean - 5.31) <= 0.02
    assert abs(distribution.std - 0.46) <= 0.03
    assert (distribution.min, distribution.max) == (5, 6)
