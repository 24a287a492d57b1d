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
from pathlib import Path

import pytest

import meds_graph
from meds_graph.common.datasets.records import LABEL_VALUE_KINDS
from meds_graph.common.rdf.serialization import RDF_FORMATS
from meds_graph.common.shapes.shapes import ConstraintKind
from meds_graph.common.utils.utils import init_hydra_config
from meds_graph.scripts.run_config import SUBCOMMANDS
from tests.utils import DEFAULT_CONFIG_PATH


def test_available_formats():
    assert set(meds_graph.available_formats) == set(RDF_FORMATS)


def test_available_subcommands():
    assert set(meds_graph.available_subcommands) == set(SUBCOMMANDS)


def test_available_constraint_kinds():
    assert set(meds_graph.available_constraint_kinds) == {kind.value for kind in ConstraintKind}


def test_available_label_kinds():
    assert set(meds_graph.available_label_kinds) == set(LABEL_VALUE_KINDS)


def test_available_synth_presets():
    presets_dir = Path(DEFAULT_CONFIG_PATH).parent / "synth"
    assert {p.stem for p in presets_dir.glob("*.yaml")} == set(meds_graph.available_synth_presets)


@pytest.mark.parametrize("preset", meds_graph.available_synth_presets)
def test_synth_presets_compose(preset):
    cfg = init_hydra_config(DEFAULT_CONFIG_PATH, overrides=[f"synth={preset}"])
    assert cfg.synth.n_subjects > 0


def test_print():
    print(meds_graph.available_formats)
    print(meds_graph.available_synth_presets)
    print(meds_graph.available_subcommands)
    print(meds_graph.available_constraint_kinds)
    print(meds_graph.available_label_kinds)
