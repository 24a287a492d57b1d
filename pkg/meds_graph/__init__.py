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
"""
This file lists what the meds-graph toolkit currently supports: output formats, synthetic dataset presets, CLI
subcommands and constraint kinds. It does not import the heavy dependencies, so these lists are cheap to read.

Example:
    ```python
        import meds_graph
        print(meds_graph.available_formats)
        print(meds_graph.available_synth_presets)
        print(meds_graph.available_subcommands)
        print(meds_graph.available_constraint_kinds)
    ```

When adding a synthetic preset, add its yaml file under `meds_graph/configs/synth/` and update
`available_synth_presets`. When adding a constraint kind, update `ConstraintKind` in
`meds_graph/common/shapes/shapes.py` and `available_constraint_kinds`; `tests/test_available.py` checks both.
"""

from meds_graph.__version__ import __version__  # noqa: F401

available_formats = ["ntriples", "turtle"]

available_synth_presets = ["default", "neurovasc_like", "mimic_like"]

available_subcommands = ["convert", "validate", "stats", "roundtrip", "synth"]

available_constraint_kinds = [
    "minCount",
    "maxCount",
    "datatype",
    "class",
    "exclusiveGroup",
    "splitMembership",
]

available_label_kinds = ["boolean", "integer", "float", "categorical"]
