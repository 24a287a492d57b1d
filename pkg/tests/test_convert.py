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
import tracemalloc

import pytest

from meds_graph.common.datasets.meds_dataset import MedsDataset
from meds_graph.common.datasets.records import LabelRecord
from meds_graph.common.datasets.synth import SynthConfig, generate
from meds_graph.common.mapping.configuration_mapping import MappingContext
from meds_graph.common.mapping.mapping import convert
from meds_graph.common.rdf.ntriples import serialize_ntriples_canonical
from meds_graph.common.shapes.shapes import builtin_meds_suite
from meds_graph.common.stats.compute_stats import compute_stats
from meds_graph.scripts.convert import convert_in_memory, convert_to_ntriples


def test_convert_to_ntriples(tmp_path, synth_dataset):
    ctx = MappingContext.for_dataset("synthetic")
    graph = convert(synth_dataset, ctx)
    output = tmp_path / "graph.nt"
    result = convert_to_ntriples(
        synth_dataset, ctx, output, builtin_meds_suite(), with_stats=True, num_workers=3
    )
    assert output.read_bytes() == serialize_ntriples_canonical(graph)
    assert result.num_triples == len(graph)
    assert result.report.conforms
    assert result.report.num_focus_nodes > synth_dataset.num_events
    assert result.stats == compute_stats(graph, ctx.vocab_namespace)


def test_convert_to_ntriples_writes_nothing_that_does_not_conform(tmp_path, tiny_dataset, tiny_ctx):
    labels = [LabelRecord("1", tiny_dataset.labels[0].prediction_time, boolean_value=True, float_value=1.0)]
    shards = dict(tiny_dataset.iter_shards())
    dataset = MedsDataset.from_preloaded(tiny_dataset.metadata, shards, tiny_dataset.codes, labels=labels)
    output = tmp_path / "graph.nt"
    result = convert_to_ntriples(dataset, tiny_ctx, output, builtin_meds_suite())
    assert not result.report.conforms
    assert result.num_triples == 0
    assert not output.exists()

    result = convert_to_ntriples(dataset, tiny_ctx, output)
    assert result.report is None
    assert output.exists()


def test_convert_in_memory(tmp_path, tiny_dataset, tiny_ctx, tiny_graph):
    output = tmp_path / "graph.ttl"
    result = convert_in_memory(tiny_dataset, tiny_ctx, output, "turtle", builtin_meds_suite())
    assert result.num_triples == len(tiny_graph)
    assert result.stats is None
    assert output.read_bytes().startswith(b"@prefix ")


def _peak_traced_memory(fn) -> int:
    tracemalloc.start()
    try:
        fn()
        return tracemalloc.get_traced_memory()[1]
    finally:
        tracemalloc.stop()


@pytest.mark.slow
def test_streamed_conversion_memory_follows_the_shard_size(tmp_path):
    suite = builtin_meds_suite()

    def peak(n_shards: int) -> int:
        # Every shard holds 10 subjects of 50 events.
        cfg = SynthConfig(
            seed=n_shards,
            n_subjects=10 * n_shards,
            events_per_subject=(50, 50),
            n_labels_per_subject=(0, 0),
            n_shards=n_shards,
        )
        dataset = generate(cfg)
        ctx = MappingContext.for_dataset(cfg.dataset_name)
        output = tmp_path / f"graph-{n_shards}.nt"
        return _peak_traced_memory(lambda: convert_to_ntriples(dataset, ctx, output, suite))

    # The first run loads rdflib's parser plugins.
    peak(1)
    small, large = peak(1), peak(8)
    assert large < 2 * small, (small, large)
