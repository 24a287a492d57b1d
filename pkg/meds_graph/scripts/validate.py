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
"""Validate an N-Triples or Turtle graph against the MEDS-OWL shapes.

The JSON report goes to `--report`, or to stdout. Exits with 3 when the graph does not conform.

```bash
meds-graph validate --input out/graph.nt --shapes my_rules.shapes
```
"""

from omegaconf import DictConfig

from meds_graph.common.rdf.serialization import read_graph
from meds_graph.common.shapes.factory import make_suite
from meds_graph.common.shapes.validate import validate
from meds_graph.common.utils.io_utils import dump_json_bytes
from meds_graph.scripts.run_config import ExitCode, RunConfig, write_report


def run_validate(cfg: DictConfig, run: RunConfig) -> ExitCode:
    graph = read_graph(run.input)
    report = validate(graph, make_suite(cfg), run.progress)
    write_report(dump_json_bytes(report.to_dict()), cfg.conversion.report_path, "Validation report")
    return ExitCode.OK if report.conforms else ExitCode.VALIDATION_FAILED
