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
"""Compute statistics of a MEDS-OWL graph.

`--input` is either an RDF file or a MEDS root, which is converted first. The JSON report goes to
`--stats-out` (or `--output`), or to stdout; a human readable table goes to stderr.

```bash
meds-graph stats --input out/graph.nt --stats-out out/stats.json
meds-graph stats synth=neurovasc_like synth.n_subjects=100
```
"""

import sys

from omegaconf import DictConfig

from meds_graph.common.datasets.factory import make_dataset
from meds_graph.common.mapping.factory import make_mapping_context
from meds_graph.common.mapping.mapping import convert
from meds_graph.common.rdf.serialization import read_graph
from meds_graph.common.stats.compute_stats import compute_stats, emit_stats_report, format_stats_table
from meds_graph.scripts.run_config import ExitCode, RunConfig, write_report


def run_stats(cfg: DictConfig, run: RunConfig) -> ExitCode:
    if run.input is not None and not run.reads_meds_root:
        graph = read_graph(run.input)
    else:
        ds = make_dataset(cfg, run.progress)
        ctx = make_mapping_context(cfg, ds.metadata)
        graph = convert(
            ds, ctx, strict=cfg.conversion.strict, num_workers=cfg.num_workers, progress=run.progress
        )
    stats = compute_stats(graph, cfg.mapping.vocab_namespace, run.progress)
    write_report(
        emit_stats_report(stats), cfg.conversion.stats_path or cfg.conversion.output_path, "Stats"
    )
    sys.stderr.write(format_stats_table(stats))
    return ExitCode.OK
