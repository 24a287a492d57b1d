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
"""Check that converting a MEDS dataset loses nothing.

The dataset is converted, validated, converted back and compared table by table with the original. The
fidelity report goes to `--report` (or `--output`), or to stdout. Exits with 5 when information was lost.

```bash
meds-graph roundtrip --input data/meds_root
meds-graph roundtrip synth=mimic_like --seed 7 --report out/fidelity.json
```
"""

import logging

from omegaconf import DictConfig

from meds_graph.common.datasets.factory import make_dataset
from meds_graph.common.mapping.factory import make_mapping_context
from meds_graph.common.mapping.mapping import convert
from meds_graph.common.roundtrip.fidelity import fidelity
from meds_graph.common.roundtrip.invert import invert
from meds_graph.common.shapes.factory import make_suite
from meds_graph.common.shapes.validate import validate
from meds_graph.common.utils.io_utils import dump_json_bytes
from meds_graph.scripts.run_config import ExitCode, RunConfig, write_report


def run_roundtrip(cfg: DictConfig, run: RunConfig) -> ExitCode:
    report_path = cfg.conversion.report_path or cfg.conversion.output_path
    ds = make_dataset(cfg, run.progress)
    ctx = make_mapping_context(cfg, ds.metadata)
    graph = convert(ds, ctx, strict=cfg.conversion.strict, num_workers=cfg.num_workers, progress=run.progress)

    validation = validate(graph, make_suite(cfg), run.progress)
    if not validation.conforms:
        logging.error("The converted graph does not conform to the shapes; it can't be inverted")
        write_report(dump_json_bytes(validation.to_dict()), report_path, "Validation report")
        return ExitCode.VALIDATION_FAILED

    reconstructed = invert(graph, ctx.vocab_namespace, run.progress)
    report = fidelity(ds, reconstructed)
    write_report(dump_json_bytes(report.to_dict()), report_path, "Fidelity report")
    return ExitCode.OK if report.lossless else ExitCode.FIDELITY_LOSS
