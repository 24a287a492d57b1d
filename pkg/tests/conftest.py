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
import pytest

from meds_graph.common.datasets.synth import SynthConfig, generate
from meds_graph.common.datasets.utils import save_dataset
from meds_graph.common.mapping.configuration_mapping import MappingContext
from meds_graph.common.mapping.mapping import convert
from meds_graph.common.rdf.vocabulary import make_vocabulary
from tests.utils import make_tiny_dataset


@pytest.fixture
def vocab():
    return make_vocabulary()


@pytest.fixture
def tiny_dataset():
    return make_tiny_dataset()


@pytest.fixture
def tiny_ctx(tiny_dataset):
    return MappingContext.for_dataset(tiny_dataset.metadata.dataset_name)


@pytest.fixture
def tiny_graph(tiny_dataset, tiny_ctx):
    return convert(tiny_dataset, tiny_ctx)


@pytest.fixture
def synth_cfg():
    return SynthConfig(
        seed=7, n_subjects=12, events_per_subject=(0, 6), n_labels_per_subject=(0, 2), n_shards=3
    )


@pytest.fixture
def synth_dataset(synth_cfg):
    return generate(synth_cfg)


@pytest.fixture
def meds_root(tmp_path, synth_dataset):
    root = tmp_path / "meds_root"
    save_dataset(synth_dataset, root)
    return root
